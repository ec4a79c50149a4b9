//! p-adic valuations, contents, and local factors.
//!
//! For a nonzero rational `q`, `vp(q, p)` is the unique exponent `e` with
//! `q = p^e · a/b` and `p ∤ ab`. The p-content of a nonzero Laurent
//! polynomial is the minimum valuation over its coefficients; by Gauss's
//! lemma the content is additive under multiplication, and the local factor
//! `L_p(f) = content · log p` is the entropy contribution of the prime `p`.
//! Local factors are stored as exact `(multiplicity, prime)` pairs and only
//! rendered to floating point at the reporting boundary, so additivity
//! tests never see rounding.

use std::collections::BTreeSet;
use std::fmt;

use num::{BigInt, BigRational, Integer, One, Signed, Zero};

use crate::error::Error;
use crate::laurent::LaurentPoly;
use crate::Result;

/// A prime number below 2^63, primality checked at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime_u64(p) {
            Ok(Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    /// `log p` in natural-log units.
    pub fn log(self) -> f64 {
        (self.0 as f64).ln()
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A place of Q: a finite prime or the archimedean place.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Place {
    Finite(Prime),
    Infinite,
}

/// An entropy contribution attached to a place.
///
/// Finite places hold the exact integer multiplicity of `log p`; the
/// archimedean place holds a floating value (a Mahler measure).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlaceValue {
    Finite { prime: Prime, multiplicity: i64 },
    Infinite { value: f64 },
}

impl PlaceValue {
    pub fn finite(prime: Prime, multiplicity: i64) -> Self {
        PlaceValue::Finite {
            prime,
            multiplicity,
        }
    }

    pub fn infinite(value: f64) -> Self {
        PlaceValue::Infinite { value }
    }

    pub fn place(&self) -> Place {
        match self {
            PlaceValue::Finite { prime, .. } => Place::Finite(*prime),
            PlaceValue::Infinite { .. } => Place::Infinite,
        }
    }

    /// The exact multiplicity of `log p`, when this is a finite place.
    pub fn multiplicity(&self) -> Option<i64> {
        match self {
            PlaceValue::Finite { multiplicity, .. } => Some(*multiplicity),
            PlaceValue::Infinite { .. } => None,
        }
    }

    /// Render to natural-log units (the only lossy step).
    pub fn value(&self) -> f64 {
        match self {
            PlaceValue::Finite {
                prime,
                multiplicity,
            } => *multiplicity as f64 * prime.log(),
            PlaceValue::Infinite { value } => *value,
        }
    }
}

/// p-adic valuation of a nonzero integer.
pub fn vp_int(n: &BigInt, p: Prime) -> Result<i64> {
    if n.is_zero() {
        return Err(Error::ZeroValuation);
    }
    let p = BigInt::from(p.get());
    let mut m = n.abs();
    let mut e = 0i64;
    loop {
        let (q, r) = m.div_rem(&p);
        if r.is_zero() {
            e += 1;
            m = q;
        } else {
            return Ok(e);
        }
    }
}

/// p-adic valuation of a nonzero rational: `vp(num) − vp(den)`.
pub fn vp(q: &BigRational, p: Prime) -> Result<i64> {
    if q.is_zero() {
        return Err(Error::ZeroValuation);
    }
    // q is stored reduced, so p divides at most one of numerator and
    // denominator; computing both valuations is still exact.
    Ok(vp_int(q.numer(), p)? - vp_int(q.denom(), p)?)
}

/// p-content: `min_γ vp(f_γ, p)`. For integer `f` this is the largest `k`
/// with `p^{-k} f` still integral.
pub fn p_content(f: &LaurentPoly, p: Prime) -> Result<i64> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut min = i64::MAX;
    for (_, c) in f.terms() {
        min = min.min(vp(c, p)?);
    }
    Ok(min)
}

/// The local factor `L_p(f) = p_content(f, p) · log p`, stored exactly.
pub fn local_factor(f: &LaurentPoly, p: Prime) -> Result<PlaceValue> {
    Ok(PlaceValue::finite(p, p_content(f, p)?))
}

/// The gcd of coefficient numerators and lcm of coefficient denominators.
///
/// For nonzero `f` the fraction `gcd/lcm` is the rational content: its
/// valuation at every prime equals the p-content of `f`.
pub fn content_fraction(f: &LaurentPoly) -> Result<(BigInt, BigInt)> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut g = BigInt::zero();
    let mut l = BigInt::one();
    for (_, c) in f.terms() {
        g = g.gcd(&c.numer().abs());
        l = l.lcm(c.denom());
    }
    Ok((g, l))
}

/// Exactly the primes with nonzero p-content: the primes dividing the gcd
/// of numerators or the lcm of denominators.
pub fn relevant_primes(f: &LaurentPoly) -> Result<BTreeSet<Prime>> {
    let (g, l) = content_fraction(f)?;
    let g = to_u64(&g, "gcd")?;
    let l = to_u64(&l, "lcm")?;
    let mut primes = BTreeSet::new();
    for n in [g, l] {
        for p in factor_u64(n)? {
            primes.insert(Prime(p));
        }
    }
    Ok(primes)
}

fn to_u64(n: &BigInt, what: &'static str) -> Result<u64> {
    num::ToPrimitive::to_u64(n).ok_or_else(|| Error::CoefficientBound {
        what,
        value: n.to_string(),
    })
}

/// Trial division bound; factors below it are found by direct division.
const TRIAL_BOUND: u64 = 1 << 20;

/// Distinct prime factors of `n ≥ 1` by trial division up to [`TRIAL_BOUND`]
/// plus a deterministic Miller–Rabin check on the remaining cofactor.
/// A composite cofactor above the bound is rejected rather than guessed at.
pub fn factor_u64(mut n: u64) -> Result<BTreeSet<u64>> {
    let mut out = BTreeSet::new();
    if n <= 1 {
        return Ok(out);
    }
    while n.is_multiple_of(2) {
        out.insert(2);
        n /= 2;
    }
    let mut d = 3u64;
    while d <= TRIAL_BOUND && d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            out.insert(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 2;
    }
    if n > 1 {
        if n <= TRIAL_BOUND * TRIAL_BOUND || is_prime_u64(n) {
            // Either the cofactor is below the square of the bound (hence
            // prime after trial division) or Miller–Rabin certified it.
            out.insert(n);
        } else {
            return Err(Error::FactorizationFailure(n));
        }
    }
    Ok(out)
}

/// Deterministic Miller–Rabin for 64-bit integers.
///
/// The witness set {2,3,5,7,11,13,17,19,23,29,31,37} is known to be exact
/// for all n < 3.3·10^24, which covers u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}
