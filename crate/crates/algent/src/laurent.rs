//! Sparse Laurent polynomials over the exact rationals.
//!
//! An element of the group ring `Q[Z^d]` is a finite sum `f = Σ f_γ x^γ`
//! with `γ ∈ Z^d`. Terms live in a `BTreeMap` keyed by exponent vector, so
//! iteration, formatting, and hashing are deterministic (lexicographic on
//! exponents). Coefficients are arbitrary-precision rationals: the p-adic
//! side of the crate depends on this arithmetic being exact, so nothing in
//! this module touches floating point except [`LaurentPoly::evaluate_on_torus`].

use std::collections::BTreeMap;
use std::fmt;

use num::complex::Complex64;
use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::Error;
use crate::Result;

/// A point of `Z^d`: the exponent vector of one monomial.
///
/// Ordering is lexicographic (derived from `Vec<i64>`), which fixes the
/// canonical term order used everywhere in this crate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExponentVector(pub Vec<i64>);

impl ExponentVector {
    /// The origin of `Z^d`.
    pub fn zero(dim: usize) -> Self {
        ExponentVector(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Componentwise sum; exponent overflow is a hard error by design.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "exponent dimension mismatch");
        ExponentVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.checked_add(*b).expect("exponent overflow beyond 64 bits"))
                .collect(),
        )
    }

    /// Componentwise difference; exponent overflow is a hard error by design.
    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "exponent dimension mismatch");
        ExponentVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.checked_sub(*b).expect("exponent overflow beyond 64 bits"))
                .collect(),
        )
    }

    /// Componentwise negation (the group inverse).
    pub fn neg(&self) -> Self {
        ExponentVector(
            self.0
                .iter()
                .map(|a| a.checked_neg().expect("exponent overflow beyond 64 bits"))
                .collect(),
        )
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A sparse Laurent polynomial with exact rational coefficients.
///
/// Invariants: no stored zero coefficients; every exponent vector has
/// length `dim`. The zero polynomial is the empty term map — arithmetic
/// accepts it, entropy operations downstream reject it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    dim: usize,
    terms: BTreeMap<ExponentVector, BigRational>,
}

impl LaurentPoly {
    /// The zero polynomial in dimension `dim`.
    pub fn zero(dim: usize) -> Self {
        LaurentPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    /// The constant polynomial `c`.
    pub fn constant(dim: usize, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(ExponentVector::zero(dim), c);
        }
        LaurentPoly { dim, terms }
    }

    /// Integer constant convenience.
    pub fn constant_i64(dim: usize, c: i64) -> Self {
        Self::constant(dim, BigRational::from_integer(BigInt::from(c)))
    }

    /// The monomial `c · x^γ`.
    pub fn monomial(expo: ExponentVector, c: BigRational) -> Self {
        let dim = expo.dim();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(expo, c);
        }
        LaurentPoly { dim, terms }
    }

    /// The coordinate variable of the given axis, as a polynomial.
    pub fn variable(dim: usize, axis: usize) -> Self {
        assert!(axis < dim, "axis out of range");
        let mut e = vec![0; dim];
        e[axis] = 1;
        Self::monomial(ExponentVector(e), BigRational::one())
    }

    /// Build from raw terms, merging duplicates and dropping zeros.
    pub fn from_terms<I>(dim: usize, iter: I) -> Self
    where
        I: IntoIterator<Item = (ExponentVector, BigRational)>,
    {
        let mut terms: BTreeMap<ExponentVector, BigRational> = BTreeMap::new();
        for (e, c) in iter {
            assert_eq!(e.dim(), dim, "exponent dimension mismatch");
            let slot = terms.entry(e).or_insert_with(BigRational::zero);
            *slot += c;
        }
        terms.retain(|_, c| !c.is_zero());
        LaurentPoly { dim, terms }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in canonical (lexicographic) order.
    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &BigRational)> {
        self.terms.iter()
    }

    /// The support `S = supp(f)` in canonical order.
    pub fn support(&self) -> impl Iterator<Item = &ExponentVector> {
        self.terms.keys()
    }

    /// Coefficient at `γ` (zero when absent).
    pub fn coeff(&self, e: &ExponentVector) -> BigRational {
        self.terms.get(e).cloned().unwrap_or_else(BigRational::zero)
    }

    /// True when every coefficient is an integer (denominator 1).
    pub fn is_integer(&self) -> bool {
        self.terms.values().all(|c| c.denom().is_one())
    }

    /// Exact convolution product. Panics on dimension mismatch.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in multiplication");
        let mut acc: BTreeMap<ExponentVector, BigRational> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1.add(e2);
                let slot = acc.entry(e).or_insert_with(BigRational::zero);
                *slot += c1 * c2;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        LaurentPoly {
            dim: self.dim,
            terms: acc,
        }
    }

    /// Exact sum. Panics on dimension mismatch.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in addition");
        let mut acc = self.terms.clone();
        for (e, c) in &other.terms {
            let slot = acc.entry(e.clone()).or_insert_with(BigRational::zero);
            *slot += c;
        }
        acc.retain(|_, c| !c.is_zero());
        LaurentPoly {
            dim: self.dim,
            terms: acc,
        }
    }

    /// Exact difference. Panics on dimension mismatch.
    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    /// Multiply every coefficient by a fixed rational.
    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        LaurentPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// The canonical involution `γ ↦ −γ` (coefficients are self-conjugate).
    pub fn involution(&self) -> Self {
        LaurentPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.neg(), c.clone()))
                .collect(),
        }
    }

    /// Evaluate `Σ f_γ exp(2πi⟨γ,θ⟩)` in double precision.
    pub fn evaluate_on_torus(&self, theta: &[f64]) -> Complex64 {
        assert_eq!(theta.len(), self.dim, "theta length must equal dim");
        let tau = std::f64::consts::TAU;
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut phase = 0.0;
            for (k, t) in e.0.iter().zip(theta) {
                phase += *k as f64 * t;
            }
            acc += rational_to_f64(c) * Complex64::from_polar(1.0, tau * phase);
        }
        acc
    }

    /// Evaluate exactly at a point with nonzero rational coordinates.
    ///
    /// Negative exponents invert the coordinate, so each must be nonzero.
    pub fn evaluate_rational(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.dim, "point length must equal dim");
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (k, q) in e.0.iter().zip(point) {
                term *= rational_pow(q, *k);
            }
            acc += term;
        }
        acc
    }

    /// Parse the polynomial grammar: terms joined by `+`/`-`; a term is
    /// `[rational][*]monomials` or a bare rational; `rational` is `int` or
    /// `int/int`; a monomial is `var[^signed-int]`; variables are
    /// `x,y,z,w` for `dim ≤ 4` and `x1..xN` otherwise. Whitespace is
    /// ignored. Example: `5 + 2*x + 2*x^-1`.
    pub fn parse(text: &str, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::UnsupportedDimension(0));
        }
        Parser {
            s: text.as_bytes(),
            pos: 0,
            dim,
        }
        .parse()
    }

    /// Canonical text form; `parse(format(f), dim) == f`.
    pub fn format(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            let mono = self.monomial_string(e);
            let piece = if mono.is_empty() {
                rational_string(&abs)
            } else if abs.is_one() {
                mono
            } else {
                format!("{}*{}", rational_string(&abs), mono)
            };
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&piece);
        }
        out
    }

    fn monomial_string(&self, e: &ExponentVector) -> String {
        let mut parts = Vec::new();
        for (axis, &k) in e.0.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let name = variable_name(self.dim, axis);
            if k == 1 {
                parts.push(name);
            } else {
                parts.push(format!("{name}^{k}"));
            }
        }
        parts.join("*")
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format())
    }
}

/// Variable name for an axis: `x,y,z,w` up to dimension 4, `x1..xN` above.
pub fn variable_name(dim: usize, axis: usize) -> String {
    if dim <= 4 {
        ["x", "y", "z", "w"][axis].to_string()
    } else {
        format!("x{}", axis + 1)
    }
}

/// Best-effort conversion to `f64` (exact rationals are converted once, at
/// the numeric boundary).
pub fn rational_to_f64(r: &BigRational) -> f64 {
    num::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

/// Exact integer power of a rational; negative exponents invert.
pub fn rational_pow(base: &BigRational, k: i64) -> BigRational {
    if k == 0 {
        return BigRational::one();
    }
    let mag = k.unsigned_abs();
    assert!(
        mag <= u32::MAX as u64,
        "exponent too large for exact evaluation"
    );
    let n = num::pow::pow(base.numer().clone(), mag as usize);
    let d = num::pow::pow(base.denom().clone(), mag as usize);
    if k > 0 {
        BigRational::new(n, d)
    } else {
        assert!(!base.is_zero(), "negative power of zero");
        BigRational::new(d, n)
    }
}

fn rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    dim: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::parse(self.pos, message)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn parse(mut self) -> Result<LaurentPoly> {
        let mut terms: Vec<(ExponentVector, BigRational)> = Vec::new();
        self.skip_ws();
        if self.peek().is_none() {
            return Err(self.err("empty polynomial"));
        }
        let mut sign = match self.peek() {
            Some(b'+') => {
                self.bump();
                1
            }
            Some(b'-') => {
                self.bump();
                -1
            }
            _ => 1,
        };
        loop {
            let (coeff, expo) = self.term()?;
            let signed = if sign < 0 { -coeff } else { coeff };
            terms.push((expo, signed));
            self.skip_ws();
            match self.peek() {
                None => break,
                Some(b'+') => {
                    self.bump();
                    sign = 1;
                }
                Some(b'-') => {
                    self.bump();
                    sign = -1;
                }
                Some(c) => {
                    return Err(self.err(format!("expected '+' or '-', found '{}'", c as char)))
                }
            }
        }
        Ok(LaurentPoly::from_terms(self.dim, terms))
    }

    fn term(&mut self) -> Result<(BigRational, ExponentVector)> {
        self.skip_ws();
        let mut expo = vec![0i64; self.dim];
        let mut coeff = BigRational::one();
        let mut have_any = false;
        if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            coeff = self.rational()?;
            have_any = true;
        }
        loop {
            self.skip_ws();
            let after_star = if self.peek() == Some(b'*') {
                if !have_any {
                    return Err(self.err("'*' must follow a coefficient or variable"));
                }
                self.bump();
                self.skip_ws();
                true
            } else {
                false
            };
            match self.peek() {
                Some(c) if c.is_ascii_alphabetic() => {
                    let (axis, k) = self.monomial()?;
                    expo[axis] = expo[axis]
                        .checked_add(k)
                        .ok_or_else(|| self.err("exponent overflow beyond 64 bits"))?;
                    have_any = true;
                }
                _ if after_star => return Err(self.err("expected a variable after '*'")),
                _ => break,
            }
        }
        if !have_any {
            return Err(self.err("expected a term"));
        }
        Ok((coeff, ExponentVector(expo)))
    }

    fn rational(&mut self) -> Result<BigRational> {
        let n = self.integer_digits()?;
        if self.peek() == Some(b'/') {
            self.bump();
            let d = self.integer_digits()?;
            if d.is_zero() {
                return Err(self.err("zero denominator"));
            }
            Ok(BigRational::new(n, d))
        } else {
            Ok(BigRational::from_integer(n))
        }
    }

    fn integer_digits(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        if self.pos == start {
            return Err(self.err("expected digits"));
        }
        BigInt::parse_bytes(&self.s[start..self.pos], 10).ok_or_else(|| self.err("invalid integer"))
    }

    fn monomial(&mut self) -> Result<(usize, i64)> {
        let axis = self.variable()?;
        self.skip_ws();
        if self.peek() == Some(b'^') {
            self.bump();
            self.skip_ws();
            let k = self.signed_i64()?;
            Ok((axis, k))
        } else {
            Ok((axis, 1))
        }
    }

    fn signed_i64(&mut self) -> Result<i64> {
        let neg = match self.peek() {
            Some(b'-') => {
                self.bump();
                true
            }
            Some(b'+') => {
                self.bump();
                false
            }
            _ => false,
        };
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        if self.pos == start {
            return Err(self.err("expected an exponent"));
        }
        let digits = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        let mag: i128 = digits
            .parse()
            .map_err(|_| self.err("exponent overflow beyond 64 bits"))?;
        let val = if neg { -mag } else { mag };
        i64::try_from(val).map_err(|_| self.err("exponent overflow beyond 64 bits"))
    }

    fn variable(&mut self) -> Result<usize> {
        let at = self.pos;
        let c = self.bump().expect("caller checked alphabetic");
        if self.dim <= 4 {
            let axis = match c {
                b'x' => 0,
                b'y' => 1,
                b'z' => 2,
                b'w' => 3,
                _ => {
                    self.pos = at;
                    return Err(self.err(format!("unknown variable '{}'", c as char)));
                }
            };
            if axis >= self.dim {
                self.pos = at;
                return Err(self.err(format!(
                    "variable '{}' is not available in dimension {}",
                    c as char, self.dim
                )));
            }
            Ok(axis)
        } else {
            if c != b'x' {
                self.pos = at;
                return Err(self.err(format!("unknown variable '{}'", c as char)));
            }
            let start = self.pos;
            while matches!(self.peek(), Some(d) if d.is_ascii_digit()) {
                self.bump();
            }
            if self.pos == start {
                return Err(self.err("expected a variable index after 'x'"));
            }
            let idx: usize = std::str::from_utf8(&self.s[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| self.err("variable index overflow"))?;
            if idx == 0 || idx > self.dim {
                self.pos = at;
                return Err(self.err(format!(
                    "variable 'x{idx}' is not available in dimension {}",
                    self.dim
                )));
            }
            Ok(idx - 1)
        }
    }
}
