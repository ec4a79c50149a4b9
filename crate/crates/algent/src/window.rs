//! Cubical-window linear algebra.
//!
//! The boxes `F = [0,n)^d` form the canonical Følner sequence of `Z^d`.
//! Restricting multiplication by `f` to coordinates in `F` yields a
//! multilevel Toeplitz integer matrix `f_F` with `entry(s,t) = f_{t−s}`;
//! its exact determinant, the p-adic valuation of that determinant, and
//! its rank over `F_p` are the finite shadows of the entropy invariants.
//!
//! Determinants are computed by Chinese remaindering residues modulo
//! word-size primes (enough of them that the product exceeds twice the
//! Hadamard bound) and cross-checked against fraction-free Bareiss
//! elimination on sizes ≤ 8. Rank over `F_2` uses bit-packed rows; other
//! primes use word-size modular arithmetic.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num::{BigInt, One, ToPrimitive, Zero};

use crate::error::Error;
use crate::exec;
use crate::laurent::{ExponentVector, LaurentPoly};
use crate::places::{is_prime_u64, mul_mod, pow_mod, vp_int, Prime};
use crate::Result;

/// Largest supported window volume.
pub const MAX_WINDOW_VOLUME: usize = 4096;

/// The box `F = {0,…,side−1}^d`, enumerated lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    dim: usize,
    side: usize,
}

impl Window {
    pub fn new(dim: usize, side: usize) -> Result<Self> {
        if !(1..=4).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        assert!(side >= 1, "window side must be at least 1");
        let volume = (side as u128).pow(dim as u32);
        if volume > MAX_WINDOW_VOLUME as u128 {
            return Err(Error::WindowTooLarge {
                volume,
                cap: MAX_WINDOW_VOLUME,
            });
        }
        Ok(Window { dim, side })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self) -> usize {
        self.side
    }

    /// `|F| = side^dim`.
    pub fn volume(&self) -> usize {
        self.side.pow(self.dim as u32)
    }

    /// All points of `F` in lexicographic order.
    pub fn points(&self) -> Vec<ExponentVector> {
        let mut out = Vec::with_capacity(self.volume());
        let mut cur = vec![0i64; self.dim];
        loop {
            out.push(ExponentVector(cur.clone()));
            let mut a = self.dim;
            loop {
                if a == 0 {
                    return out;
                }
                a -= 1;
                cur[a] += 1;
                if (cur[a] as usize) < self.side {
                    break;
                }
                cur[a] = 0;
            }
        }
    }

    /// Index of a point in the lexicographic enumeration, if it lies in `F`.
    pub fn index_of(&self, point: &ExponentVector) -> Option<usize> {
        if point.dim() != self.dim {
            return None;
        }
        let mut idx = 0usize;
        for &c in &point.0 {
            if c < 0 || c as usize >= self.side {
                return None;
            }
            idx = idx * self.side + c as usize;
        }
        Some(idx)
    }
}

/// The restriction `f_F`: a `|F|×|F|` exact integer matrix with
/// `entry(s,t) = f_{t−s}`, stored by its Toeplitz symbol.
#[derive(Debug, Clone)]
pub struct RestrictionMatrix {
    window: Window,
    points: Vec<ExponentVector>,
    /// difference `t−s` → integer coefficient of `f` there.
    symbol: BTreeMap<ExponentVector, i64>,
}

/// Build `f_F` for integer `f ≠ 0`.
pub fn build_restriction(f: &LaurentPoly, w: &Window) -> Result<RestrictionMatrix> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    assert_eq!(
        f.dim(),
        w.dim(),
        "window dimension must match the polynomial"
    );
    if !f.is_integer() {
        return Err(Error::NonIntegerCoefficients);
    }
    let mut symbol = BTreeMap::new();
    for (e, c) in f.terms() {
        let v = c.numer().to_i64().ok_or(Error::EntryOverflow)?;
        symbol.insert(e.clone(), v);
    }
    Ok(RestrictionMatrix {
        window: w.clone(),
        points: w.points(),
        symbol,
    })
}

impl RestrictionMatrix {
    pub fn window(&self) -> &Window {
        &self.window
    }

    /// Side length of the matrix, `|F|`.
    pub fn size(&self) -> usize {
        self.points.len()
    }

    /// `entry(s,t) = f_{t−s}` in the fixed enumeration.
    pub fn entry(&self, s: usize, t: usize) -> i64 {
        let diff = self.points[t].sub(&self.points[s]);
        self.symbol.get(&diff).copied().unwrap_or(0)
    }

    /// The transpose is the restriction of the involution of `f`.
    pub fn transpose(&self) -> Self {
        RestrictionMatrix {
            window: self.window.clone(),
            points: self.points.clone(),
            symbol: self.symbol.iter().map(|(e, &c)| (e.neg(), c)).collect(),
        }
    }

    /// Dense rows reduced modulo `p`.
    fn dense_mod(&self, p: u64) -> Vec<Vec<u64>> {
        let n = self.size();
        let mut rows = vec![vec![0u64; n]; n];
        for (s, s_pt) in self.points.iter().enumerate() {
            for (diff, &c) in &self.symbol {
                let t_pt = s_pt.add(diff);
                if let Some(t) = self.window.index_of(&t_pt) {
                    rows[s][t] = c.rem_euclid(p as i64) as u64;
                }
            }
        }
        rows
    }

    /// Dense rows as exact integers.
    fn dense_bigint(&self) -> Vec<Vec<BigInt>> {
        let n = self.size();
        let mut rows = vec![vec![BigInt::zero(); n]; n];
        for (s, s_pt) in self.points.iter().enumerate() {
            for (diff, &c) in &self.symbol {
                let t_pt = s_pt.add(diff);
                if let Some(t) = self.window.index_of(&t_pt) {
                    rows[s][t] = BigInt::from(c);
                }
            }
        }
        rows
    }

    /// log2 of the Hadamard bound on `|det|`, with slack for rounding.
    fn hadamard_bits(&self) -> f64 {
        let norm_sq: f64 = self.symbol.values().map(|&c| (c as f64) * (c as f64)).sum();
        0.5 * self.size() as f64 * norm_sq.max(1.0).log2()
    }
}

/// Exact determinant of `f_F` by CRT over word-size primes.
///
/// On sizes ≤ 8 the result is verified against Bareiss elimination; a
/// disagreement would mean a bug in one of the routes, so it panics.
pub fn det_exact(m: &RestrictionMatrix) -> BigInt {
    // Product of moduli must exceed twice the Hadamard bound so the
    // symmetric lift is unambiguous; +6 bits absorb f64 rounding slack.
    let primes = crt_primes(m.hadamard_bits() + 6.0);
    let residues: Vec<u64> = exec::map_slice(&primes, |&p| det_dense_mod(m.dense_mod(p), p));
    let det = crt_combine(&residues, &primes);
    if m.size() <= 8 {
        let check = det_bareiss(m);
        assert_eq!(det, check, "CRT and Bareiss determinants disagree");
    }
    det
}

/// Fraction-free (Bareiss) determinant; the independent cross-check route.
pub fn det_bareiss(m: &RestrictionMatrix) -> BigInt {
    let mut a = m.dense_bigint();
    let n = a.len();
    let mut sign = 1i64;
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        let row_k = a[k].clone();
        for row in a.iter_mut().skip(k + 1) {
            let lead = row[k].clone();
            for j in k + 1..n {
                row[j] = (&row[j] * &row_k[k] - &lead * &row_k[j]) / &prev;
            }
        }
        prev = row_k[k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// `v_p(det f_F)`: a nonnegative integer, or +∞ when the determinant is 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Finite(u64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

/// p-adic valuation of the exact determinant.
pub fn vp_det(m: &RestrictionMatrix, p: Prime) -> Valuation {
    let det = det_exact(m);
    if det.is_zero() {
        Valuation::Infinite
    } else {
        Valuation::Finite(vp_int(&det, p).expect("nonzero determinant") as u64)
    }
}

/// Rank of `f_F` over `F_p`: bit-packed elimination for p = 2, word-size
/// modular arithmetic otherwise.
pub fn rank_mod_p(m: &RestrictionMatrix, p: Prime) -> usize {
    let n = m.size();
    if p.get() == 2 {
        let words = n.div_ceil(64);
        let mut rows = vec![vec![0u64; words]; n];
        for (s, s_pt) in m.points.iter().enumerate() {
            for (diff, &c) in &m.symbol {
                if c.rem_euclid(2) == 0 {
                    continue;
                }
                let t_pt = s_pt.add(diff);
                if let Some(t) = m.window.index_of(&t_pt) {
                    rows[s][t / 64] ^= 1u64 << (t % 64);
                }
            }
        }
        rank_bits(rows, n)
    } else {
        rank_dense_mod(m.dense_mod(p.get()), p.get())
    }
}

/// The matrix of window translates of `f` over `F_p`: one row per `s ∈ F`
/// (the translate `s^{-1}·f`), columns indexed by the union of shifted
/// supports, `entry(s,u) = f_{u+s} mod p`.
#[derive(Debug, Clone)]
pub struct TranslateMatrix {
    p: Prime,
    columns: Vec<ExponentVector>,
    rows: Vec<Vec<u64>>,
}

impl TranslateMatrix {
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[ExponentVector] {
        &self.columns
    }

    /// Rank over `F_p`; the Peters sumset count for `E = F_p·f` is
    /// `p^rank`.
    pub fn rank(&self) -> usize {
        if self.p.get() == 2 {
            let words = self.num_columns().div_ceil(64);
            let packed: Vec<Vec<u64>> = self
                .rows
                .iter()
                .map(|row| {
                    let mut w = vec![0u64; words];
                    for (c, &v) in row.iter().enumerate() {
                        if v & 1 == 1 {
                            w[c / 64] |= 1u64 << (c % 64);
                        }
                    }
                    w
                })
                .collect();
            rank_bits(packed, self.num_columns())
        } else {
            rank_dense_mod(self.rows.clone(), self.p.get())
        }
    }
}

/// Reduce the coefficients of `f` modulo `p`; denominators prime to `p`
/// are inverted, a denominator divisible by `p` is an error.
pub(crate) fn residues_mod_p(f: &LaurentPoly, p: Prime) -> Result<BTreeMap<ExponentVector, u64>> {
    let mut out = BTreeMap::new();
    for (e, c) in f.terms() {
        let num = mod_u64(c.numer(), p.get());
        let den = mod_u64(c.denom(), p.get());
        if den == 0 {
            return Err(Error::NonIntegerCoefficients);
        }
        let r = mul_mod(num, inv_mod(den, p.get()), p.get());
        if r != 0 {
            out.insert(e.clone(), r);
        }
    }
    Ok(out)
}

/// Nonnegative residue of an arbitrary integer modulo `p`.
fn mod_u64(x: &BigInt, p: u64) -> u64 {
    use num::Integer;
    x.mod_floor(&BigInt::from(p))
        .to_u64()
        .expect("residue in [0,p)")
}

/// Build the translate matrix of `f` over `F_p` for the window `w`.
pub fn build_translates(f: &LaurentPoly, w: &Window, p: Prime) -> Result<TranslateMatrix> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    assert_eq!(
        f.dim(),
        w.dim(),
        "window dimension must match the polynomial"
    );
    let support = residues_mod_p(f, p)?;
    if support.is_empty() {
        return Err(Error::ZeroModP(p.get()));
    }
    let points = w.points();
    let mut column_set = BTreeSet::new();
    for s in &points {
        for gamma in support.keys() {
            column_set.insert(gamma.sub(s));
        }
    }
    let columns: Vec<ExponentVector> = column_set.into_iter().collect();
    let col_index: BTreeMap<&ExponentVector, usize> =
        columns.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let rows = points
        .iter()
        .map(|s| {
            let mut row = vec![0u64; columns.len()];
            for (gamma, &r) in &support {
                row[col_index[&gamma.sub(s)]] = r;
            }
            row
        })
        .collect();
    Ok(TranslateMatrix { p, columns, rows })
}

/// Rank over `F_p` of the span of window translates of `f`.
pub fn translate_rank(f: &LaurentPoly, w: &Window, p: Prime) -> Result<usize> {
    Ok(build_translates(f, w, p)?.rank())
}

/// One element of `F_p[Z^d]` given by explicit residues on a finite
/// support (no zero entries stored).
pub type FpElement = BTreeMap<ExponentVector, u64>;

/// The set `F_p·f = {c·f mod p : c ∈ F_p}`, including 0.
pub fn fp_multiples(f: &LaurentPoly, p: Prime) -> Result<Vec<FpElement>> {
    let base = residues_mod_p(f, p)?;
    let mut out = Vec::with_capacity(p.get() as usize);
    for c in 0..p.get() {
        let mut e = FpElement::new();
        if c != 0 {
            for (k, &v) in &base {
                let r = mul_mod(v, c, p.get());
                if r != 0 {
                    e.insert(k.clone(), r);
                }
            }
        }
        out.push(e);
    }
    Ok(out)
}

/// Guard exponent for the brute-force enumeration: `|E|^{|F|} ≤ 2^24`.
pub const ENUMERATION_GUARD_LOG2: u32 = 24;

/// Exact cardinality of the sumset `{Σ_{s∈F} translate_{−s}(e_s)}` with
/// each `e_s` ranging over `E`, by direct enumeration.
pub fn peters_sumset_count(elements: &[FpElement], w: &Window, p: Prime) -> Result<u64> {
    assert!(!elements.is_empty(), "the element set E must be nonempty");
    let volume = w.volume();
    let log2_size = volume as f64 * (elements.len() as f64).log2();
    if log2_size > ENUMERATION_GUARD_LOG2 as f64 + 1e-9 {
        return Err(Error::EnumerationGuard {
            size: format!("{}^{}", elements.len(), volume),
            limit_log2: ENUMERATION_GUARD_LOG2,
        });
    }
    let points = w.points();
    let mut seen: HashSet<Vec<(ExponentVector, u64)>> = HashSet::new();
    let mut sum: BTreeMap<ExponentVector, u64> = BTreeMap::new();
    enumerate_assignments(&points, 0, elements, p.get(), &mut sum, &mut seen);
    Ok(seen.len() as u64)
}

fn enumerate_assignments(
    points: &[ExponentVector],
    depth: usize,
    elements: &[FpElement],
    p: u64,
    sum: &mut BTreeMap<ExponentVector, u64>,
    seen: &mut HashSet<Vec<(ExponentVector, u64)>>,
) {
    if depth == points.len() {
        seen.insert(sum.iter().map(|(k, &v)| (k.clone(), v)).collect());
        return;
    }
    let s = &points[depth];
    for e in elements {
        add_translated(sum, e, s, p, false);
        enumerate_assignments(points, depth + 1, elements, p, sum, seen);
        add_translated(sum, e, s, p, true);
    }
}

fn add_translated(
    sum: &mut BTreeMap<ExponentVector, u64>,
    e: &FpElement,
    s: &ExponentVector,
    p: u64,
    undo: bool,
) {
    for (gamma, &c) in e {
        let key = gamma.sub(s);
        let delta = if undo { p - c } else { c };
        let slot = sum.entry(key.clone()).or_insert(0);
        *slot = (*slot + delta) % p;
        if *slot == 0 {
            sum.remove(&key);
        }
    }
}

/// `log` of the exact Peters sumset cardinality.
pub fn peters_bruteforce(elements: &[FpElement], w: &Window, p: Prime) -> Result<f64> {
    Ok((peters_sumset_count(elements, w, p)? as f64).ln())
}

// ---------------------------------------------------------------------
// Modular elimination kernels.

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p), "inverse of zero mod {p}");
    pow_mod(a, p - 2, p)
}

/// Rank of bit-packed rows over F_2.
fn rank_bits(mut rows: Vec<Vec<u64>>, ncols: usize) -> usize {
    let mut rank = 0;
    let mut pivot_row = 0;
    for col in 0..ncols {
        let (w, b) = (col / 64, col % 64);
        if let Some(r) = (pivot_row..rows.len()).find(|&r| rows[r][w] >> b & 1 == 1) {
            rows.swap(pivot_row, r);
            let piv = rows[pivot_row].clone();
            for row in rows.iter_mut().skip(pivot_row + 1) {
                if row[w] >> b & 1 == 1 {
                    for (x, y) in row.iter_mut().zip(&piv) {
                        *x ^= y;
                    }
                }
            }
            rank += 1;
            pivot_row += 1;
            if pivot_row == rows.len() {
                break;
            }
        }
    }
    rank
}

/// Rank of dense rows over F_p (first-nonzero pivoting, deterministic).
fn rank_dense_mod(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut pivot_row = 0;
    for col in 0..ncols {
        if let Some(r) = (pivot_row..rows.len()).find(|&r| rows[r][col] != 0) {
            rows.swap(pivot_row, r);
            let inv = inv_mod(rows[pivot_row][col], p);
            let piv = rows[pivot_row].clone();
            for row in rows.iter_mut().skip(pivot_row + 1) {
                if row[col] != 0 {
                    let scale = mul_mod(row[col], inv, p);
                    for (x, y) in row.iter_mut().zip(&piv).skip(col) {
                        *x = (*x + p - mul_mod(scale, *y, p)) % p;
                    }
                }
            }
            rank += 1;
            pivot_row += 1;
            if pivot_row == rows.len() {
                break;
            }
        }
    }
    rank
}

/// Determinant of a dense matrix over F_p.
fn det_dense_mod(mut rows: Vec<Vec<u64>>, p: u64) -> u64 {
    let n = rows.len();
    let mut det = 1u64 % p;
    for col in 0..n {
        let Some(r) = (col..n).find(|&r| rows[r][col] != 0) else {
            return 0;
        };
        if r != col {
            rows.swap(col, r);
            det = (p - det) % p;
        }
        let piv = rows[col][col];
        det = mul_mod(det, piv, p);
        let inv = inv_mod(piv, p);
        let pivot_row = rows[col].clone();
        for row in rows.iter_mut().skip(col + 1) {
            if row[col] != 0 {
                let scale = mul_mod(row[col], inv, p);
                for (x, y) in row.iter_mut().zip(&pivot_row).skip(col) {
                    *x = (*x + p - mul_mod(scale, *y, p)) % p;
                }
            }
        }
    }
    det
}

/// Descending 62-bit primes until their product carries `min_bits` bits.
fn crt_primes(min_bits: f64) -> Vec<u64> {
    let mut primes = Vec::new();
    let mut bits = 0.0;
    let mut candidate = (1u64 << 62) - 1;
    while bits <= min_bits {
        while !is_prime_u64(candidate) {
            candidate -= 2;
        }
        primes.push(candidate);
        bits += (candidate as f64).log2();
        candidate -= 2;
    }
    primes
}

/// Incremental Chinese remaindering with a final symmetric lift.
fn crt_combine(residues: &[u64], primes: &[u64]) -> BigInt {
    let mut x = BigInt::from(residues[0]);
    let mut modulus = BigInt::from(primes[0]);
    for i in 1..primes.len() {
        let p = primes[i];
        let pb = BigInt::from(p);
        let x_mod = (&x % &pb).to_u64().expect("x kept nonnegative");
        let delta = (residues[i] + p - x_mod % p) % p;
        let m_mod = (&modulus % &pb).to_u64().expect("modulus residue fits");
        let k = mul_mod(delta, inv_mod(m_mod, p), p);
        x += &modulus * BigInt::from(k);
        modulus *= pb;
    }
    if BigInt::from(2) * &x > modulus {
        x -= &modulus;
    }
    x
}
