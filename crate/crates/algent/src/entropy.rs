//! Closed-form entropy invariants of principal `Z[Z^d]`-modules.
//!
//! For nonzero `f` the entropy of the principal algebraic action is the
//! logarithmic Mahler measure, `ρ(f) = m(f)`, and it splits over the
//! places of `Q`: an archimedean part `ρ_∞` (the solenoid entropy of the
//! rationalized module) plus one exact term `|f|_p · log p` per prime.
//! Everything p-adic here is integer arithmetic; only the Mahler term is
//! numerical, so decomposition residuals are attributed to its error
//! estimate.

use std::collections::BTreeMap;

use num::{BigInt, BigRational, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::exec;
use crate::laurent::LaurentPoly;
use crate::mahler::{self, MahlerConfig, MahlerResult};
use crate::matrix::RationalMatrix;
use crate::places::{self, content_fraction, local_factor, relevant_primes, PlaceValue, Prime};
use crate::Result;

/// Entropy of the principal action of `f`, `ρ(f) = m(f)`, with the
/// quadrature/root-finding error estimate attached.
pub fn principal_entropy(f: &LaurentPoly) -> Result<MahlerResult> {
    principal_entropy_with(f, &MahlerConfig::default())
}

pub fn principal_entropy_with(f: &LaurentPoly, cfg: &MahlerConfig) -> Result<MahlerResult> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !f.is_integer() {
        return Err(Error::NonIntegerCoefficients);
    }
    mahler::mahler_with(f, cfg)
}

/// The p-adic entropy component `ρ_p(f) = |f|_p · log p`, exact.
pub fn rho_p_principal(f: &LaurentPoly, p: Prime) -> Result<PlaceValue> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !f.is_integer() {
        return Err(Error::NonIntegerCoefficients);
    }
    local_factor(f, p)
}

/// Solenoid entropy computed along two algebraically equal routes, with
/// their floating-point disagreement as a consistency residual.
#[derive(Debug, Clone)]
pub struct SolenoidEntropy {
    /// Canonical value (the place-sum route).
    pub value: f64,
    /// `m(f) − Σ_p |f|_p · log p` over the relevant primes.
    pub via_local_factors: f64,
    /// `m(f) − log gcd(numerators) + log lcm(denominators)`.
    pub via_gcd_lcm: f64,
    /// `|via_local_factors − via_gcd_lcm|`.
    pub residual: f64,
    /// The shared Mahler term.
    pub mahler: MahlerResult,
}

/// Entropy of the solenoid action of nonzero `f ∈ QΓ`.
pub fn solenoid_entropy(f: &LaurentPoly) -> Result<SolenoidEntropy> {
    solenoid_entropy_with(f, &MahlerConfig::default())
}

pub fn solenoid_entropy_with(f: &LaurentPoly, cfg: &MahlerConfig) -> Result<SolenoidEntropy> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    solenoid_from_parts(f, mahler::mahler_with(f, cfg)?)
}

fn solenoid_from_parts(f: &LaurentPoly, mahler: MahlerResult) -> Result<SolenoidEntropy> {
    let primes: Vec<Prime> = relevant_primes(f)?.into_iter().collect();
    let mut place_sum = 0.0;
    for &p in &primes {
        place_sum += local_factor(f, p)?.value();
    }
    let via_local_factors = mahler.value - place_sum;
    let (gcd, lcm) = content_fraction(f)?;
    let via_gcd_lcm = mahler.value - big_ln(&gcd) + big_ln(&lcm);
    Ok(SolenoidEntropy {
        value: via_local_factors,
        via_local_factors,
        via_gcd_lcm,
        residual: (via_local_factors - via_gcd_lcm).abs(),
        mahler,
    })
}

/// Natural log of a positive big integer.
fn big_ln(x: &BigInt) -> f64 {
    let v = x.to_f64().expect("content fits in f64");
    assert!(v > 0.0, "content terms are positive");
    v.ln()
}

/// The full adelic decomposition `ρ = ρ_∞ + Σ_p ρ_p` of a principal
/// action, with every term reported and the identity's defect measured.
#[derive(Debug, Clone)]
pub struct EntropyReport {
    /// Canonical text form of the input polynomial.
    pub input: String,
    pub dim: usize,
    /// `ρ(f) = m(f)`.
    pub rho_total: f64,
    /// `ρ_∞(f)`, the solenoid entropy of the rationalized module.
    pub rho_infinity: f64,
    /// Exact `ρ_p` per relevant prime, keyed by `p`.
    pub components: BTreeMap<u64, PlaceValue>,
    pub mahler: MahlerResult,
    /// `|rho_total − rho_infinity − Σ_p components|`; never dropped.
    pub residual: f64,
    /// Human-readable formula for each reported term.
    pub formulas: BTreeMap<String, String>,
}

impl EntropyReport {
    /// Sum of the finite-place components.
    pub fn component_sum(&self) -> f64 {
        self.components.values().map(PlaceValue::value).sum()
    }
}

/// Decompose the entropy of integer `f ≠ 0` into its adelic parts.
pub fn decompose(f: &LaurentPoly) -> Result<EntropyReport> {
    decompose_with(f, &MahlerConfig::default())
}

pub fn decompose_with(f: &LaurentPoly, cfg: &MahlerConfig) -> Result<EntropyReport> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !f.is_integer() {
        return Err(Error::NonIntegerCoefficients);
    }
    let mahler = mahler::mahler_with(f, cfg)?;
    let primes: Vec<Prime> = relevant_primes(f)?.into_iter().collect();
    let components: BTreeMap<u64, PlaceValue> = exec::map_slice(&primes, |&p| local_factor(f, p))
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .map(|v| {
            let p = match v.place() {
                places::Place::Finite(p) => p.get(),
                places::Place::Infinite => unreachable!("local factors are finite places"),
            };
            (p, v)
        })
        .collect();
    let solenoid = solenoid_from_parts(f, mahler.clone())?;
    let component_sum: f64 = components.values().map(PlaceValue::value).sum();
    let residual = (mahler.value - solenoid.value - component_sum).abs();
    let mut formulas = BTreeMap::new();
    formulas.insert("rho_total".into(), "m(f)".into());
    formulas.insert("rho_infinity".into(), "m(f) - sum_p |f|_p log p".into());
    formulas.insert("component_p".into(), "|f|_p log p".into());
    formulas.insert(
        "residual".into(),
        "|rho_total - rho_infinity - sum_p component_p|".into(),
    );
    Ok(EntropyReport {
        input: f.format(),
        dim: f.dim(),
        rho_total: mahler.value,
        rho_infinity: solenoid.value,
        components,
        mahler,
        residual,
        formulas,
    })
}

/// The local entropy `L_p(t − a) = −k·log p` of the automorphism given
/// by `a ∈ GL_n(Q)`, where `p^k` is the largest power of `p` dividing a
/// denominator of the characteristic polynomial of `a`.
pub fn lind_ward(a: &RationalMatrix, p: Prime) -> Result<PlaceValue> {
    if a.det().is_zero() {
        return Err(Error::SingularMatrix);
    }
    let chi = a.char_poly();
    let k = (-places::p_content(&chi, p)?).max(0);
    let result = PlaceValue::finite(p, -k);
    // χ is monic, so its p-content is ≤ 0 and the denominator count must
    // agree with the generic local factor; verify at runtime regardless.
    let check = local_factor(&chi, p)?;
    if check.multiplicity() != result.multiplicity() {
        return Err(Error::Inconsistent(format!(
            "local factor of the characteristic polynomial ({:?}) disagrees with the \
             denominator count ({:?})",
            check.multiplicity(),
            result.multiplicity()
        )));
    }
    Ok(result)
}

/// A finite presentation of a `Q[Z^d]`-module: `generators` columns and
/// one row per relation.
#[derive(Debug, Clone)]
pub struct ModulePresentation {
    generators: usize,
    dim: usize,
    relations: Vec<Vec<LaurentPoly>>,
}

impl ModulePresentation {
    pub fn new(generators: usize, dim: usize, relations: Vec<Vec<LaurentPoly>>) -> Result<Self> {
        if generators == 0 {
            return Err(Error::BadPresentation(
                "at least one generator is required".into(),
            ));
        }
        if dim == 0 {
            return Err(Error::BadPresentation(
                "the acting group must have rank >= 1".into(),
            ));
        }
        for (i, row) in relations.iter().enumerate() {
            if row.len() != generators {
                return Err(Error::BadPresentation(format!(
                    "relation {i} has {} entries for {generators} generators",
                    row.len()
                )));
            }
            for f in row {
                if f.dim() != dim {
                    return Err(Error::BadPresentation(format!(
                        "relation {i} mixes dimensions {} and {dim}",
                        f.dim()
                    )));
                }
            }
        }
        Ok(ModulePresentation {
            generators,
            dim,
            relations,
        })
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn relations(&self) -> &[Vec<LaurentPoly>] {
        &self.relations
    }
}

/// Coordinate magnitude for random evaluation points.
pub const EVALUATION_MAGNITUDE: i64 = 1 << 20;
/// Independent random trials; the fraction-field rank is the maximum.
pub const EVALUATION_TRIALS: usize = 5;

/// The von Neumann rank `rk(M) = generators − rank` of the presentation
/// matrix over the fraction field `Q(x_1,…,x_d)`, computed by exact
/// rational elimination at random integer points (Schwartz–Zippel: the
/// generic rank is the maximum over specializations).
pub fn von_neumann_rank(m: &ModulePresentation, seed: u64) -> usize {
    if m.relations.is_empty() {
        return m.generators;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0;
    for _ in 0..EVALUATION_TRIALS {
        let point: Vec<BigRational> = (0..m.dim)
            .map(|_| {
                let mag = rng.gen_range(1..=EVALUATION_MAGNITUDE);
                let sign: bool = rng.gen();
                BigRational::from_integer(BigInt::from(if sign { mag } else { -mag }))
            })
            .collect();
        let rows: Vec<Vec<BigRational>> = exec::map_slice(&m.relations, |row| {
            row.iter().map(|f| f.evaluate_rational(&point)).collect()
        });
        best = best.max(rational_rank(rows));
        if best == m.generators.min(m.relations.len()) {
            break;
        }
    }
    m.generators - best
}

/// Exact rank of a dense rational matrix by Gaussian elimination.
fn rational_rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut pivot_row = 0;
    for col in 0..ncols {
        if let Some(r) = (pivot_row..rows.len()).find(|&r| !rows[r][col].is_zero()) {
            rows.swap(pivot_row, r);
            let pivot = rows[pivot_row].clone();
            for row in rows.iter_mut().skip(pivot_row + 1) {
                if !row[col].is_zero() {
                    let scale = &row[col] / &pivot[col];
                    for (x, y) in row.iter_mut().zip(&pivot).skip(col) {
                        *x = &*x - &(&scale * y);
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
