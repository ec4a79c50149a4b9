//! Logarithmic Mahler measures.
//!
//! For `f ∈ Q[Z^d]` the measure is `m(f) = ∫ log|f(θ)| dθ` over the
//! d-torus; it is the entropy of the principal action presented by `f`.
//! Two routes are implemented:
//!
//! - `d = 1`: Jensen's formula. The measure is `log|lead| + Σ log⁺|root|`,
//!   with roots from a balanced companion matrix (QR-iterated) and then
//!   Newton-polished against the original coefficients until the step size
//!   drops below the requested tolerance.
//! - `d ≥ 2`: quadrature on the offset grid `θ_j = (j+1/2)/N` per axis.
//!   Integer polynomials tend to vanish at low-order rational points of the
//!   torus (cube roots of unity and friends); the half-cell offset dodges
//!   them generically, and points where `|f| < ε` are excluded and counted
//!   rather than adaptively refined — `log|f|` is integrable, so skipped
//!   cells contribute `O(ε log ε)`.
//!
//! Grid sums run through [`crate::exec`] with a fixed chunk-then-pairwise
//! reduction tree, so values are bit-identical whether or not the work is
//! parallelized.

use std::collections::BTreeSet;

use num::complex::Complex64;
use num::Signed;

use crate::error::Error;
use crate::exec::{self, Kahan};
use crate::laurent::{rational_to_f64, LaurentPoly};
use crate::Result;

/// How a Mahler value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MahlerMethod {
    /// Jensen evaluation from companion-matrix roots (dim 1 only).
    Roots,
    /// Offset torus-grid quadrature.
    Grid,
}

impl MahlerMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            MahlerMethod::Roots => "roots",
            MahlerMethod::Grid => "grid",
        }
    }
}

/// A Mahler measure with its provenance and error estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct MahlerResult {
    /// Natural-log units.
    pub value: f64,
    /// Nonnegative; for grids, the difference against the half-size grid;
    /// for roots, the accumulated Newton residuals.
    pub error_estimate: f64,
    pub method: MahlerMethod,
    /// Grid size per axis (grid method only).
    pub grid_size: Option<usize>,
    /// Grid points skipped because `|f| < ε` (grid method only).
    pub excluded_points: u64,
    /// False when a doubling run hit its cap before reaching the target
    /// tolerance; callers decide what to do with an unconverged value.
    pub converged: bool,
}

/// Tuning knobs for the [`mahler`] dispatcher.
#[derive(Debug, Clone)]
pub struct MahlerConfig {
    /// Stop doubling once successive grid values differ by less than this.
    pub target_tol: f64,
    /// Exclusion threshold for near-zeros of `|f|` on the grid.
    pub epsilon: f64,
    /// First grid size tried (doubling from here).
    pub grid_start: usize,
    /// Override the per-dimension grid cap (4096 / 256 / 64 for d = 2/3/4).
    pub grid_cap: Option<usize>,
}

impl Default for MahlerConfig {
    fn default() -> Self {
        MahlerConfig {
            target_tol: 1e-6,
            epsilon: 1e-12,
            grid_start: 64,
            grid_cap: None,
        }
    }
}

/// Default grid cap per dimension (≤ ~17M evaluations).
pub fn default_grid_cap(dim: usize) -> usize {
    match dim {
        2 => 4096,
        3 => 256,
        _ => 64,
    }
}

/// Largest grid (total points) accepted by [`mahler_grid`].
const MAX_GRID_POINTS: u128 = 1 << 26;

/// Jensen evaluation for `dim == 1`: `log|lead| + Σ log⁺|root|` after
/// normalizing away the monomial unit. Roots are companion-matrix
/// eigenvalues polished to residual < `tol`.
pub fn mahler_univariate(f: &LaurentPoly, tol: f64) -> Result<MahlerResult> {
    assert_eq!(f.dim(), 1, "mahler_univariate requires dim 1");
    assert!(tol > 0.0, "tolerance must be positive");
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }

    // Shift by the minimal exponent: m(±x^k · g) = m(g).
    let exponents: Vec<i64> = f.support().map(|e| e.0[0]).collect();
    let min_e = *exponents.first().unwrap();
    let max_e = *exponents.last().unwrap();
    let degree = (max_e - min_e) as usize;
    let mut coeffs = vec![0.0f64; degree + 1];
    for (e, c) in f.terms() {
        coeffs[(e.0[0] - min_e) as usize] = rational_to_f64(c);
    }
    let lead_log = {
        let lead = f
            .terms()
            .find(|(e, _)| e.0[0] == max_e)
            .map(|(_, c)| c.abs())
            .unwrap();
        rational_to_f64(&lead).ln()
    };

    if degree == 0 {
        return Ok(MahlerResult {
            value: lead_log,
            error_estimate: 0.0,
            method: MahlerMethod::Roots,
            grid_size: None,
            excluded_points: 0,
            converged: true,
        });
    }

    let roots = polynomial_roots(&coeffs, tol);
    let mut value = lead_log;
    let mut error = 0.0;
    let mut converged = true;
    for r in &roots {
        let mag = r.z.norm();
        if mag > 1.0 {
            value += mag.ln();
        }
        // A root error δ moves log⁺|z| by at most δ/max(|z|,1); scale the
        // per-root bound by the degree to stay honest for multiple roots.
        error += r.residual * degree as f64 / mag.max(1.0);
        // NaN residuals must also count as unconverged.
        let within_tol = r.residual <= tol * mag.max(1.0);
        if !within_tol {
            converged = false;
        }
    }
    Ok(MahlerResult {
        value,
        error_estimate: error,
        method: MahlerMethod::Roots,
        grid_size: None,
        excluded_points: 0,
        converged,
    })
}

struct PolishedRoot {
    z: Complex64,
    /// Per-root error bound: the larger of the last Newton step and the
    /// Weierstrass correction `|p(z) / (lead · Π_{j≠i}(z - z_j))|`. The
    /// second term stays honest at repeated roots, where Newton stalls on
    /// the floating-point floor and the final step alone underreports.
    residual: f64,
}

/// All complex roots of the real polynomial `Σ coeffs[k] x^k`
/// (`coeffs[0] ≠ 0`, `coeffs[deg] ≠ 0`): balanced companion matrix, QR
/// eigenvalues, then Newton polish against the original coefficients.
fn polynomial_roots(coeffs: &[f64], tol: f64) -> Vec<PolishedRoot> {
    let degree = coeffs.len() - 1;
    let lead = coeffs[degree];
    let mut companion = faer::Mat::<f64>::zeros(degree, degree);
    for i in 1..degree {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..degree {
        companion[(i, degree - 1)] = -coeffs[i] / lead;
    }
    balance_in_place(&mut companion);
    let eigen: Vec<faer::complex_native::c64> = companion.eigenvalues();

    let cc: Vec<Complex64> = coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect();
    let polished: Vec<(Complex64, f64)> = eigen
        .iter()
        .map(|&z0| {
            let mut z = Complex64::new(z0.re, z0.im);
            let mut step = f64::INFINITY;
            for _ in 0..60 {
                let (p, dp) = horner_with_derivative(&cc, z);
                if dp.norm() == 0.0 {
                    break;
                }
                let dz = p / dp;
                z -= dz;
                step = dz.norm();
                if step <= tol * z.norm().max(1.0) {
                    break;
                }
            }
            (z, if step.is_finite() { step } else { 0.0 })
        })
        .collect();

    polished
        .iter()
        .enumerate()
        .map(|(i, &(z, step))| {
            let (p, _) = horner_with_derivative(&cc, z);
            let mut denom = Complex64::new(lead, 0.0);
            for (j, &(zj, _)) in polished.iter().enumerate() {
                if j != i {
                    denom *= z - zj;
                }
            }
            let correction = if denom.norm() > 0.0 && (p / denom).norm().is_finite() {
                (p / denom).norm()
            } else {
                // Coincident computed roots: fall back to the distance scale
                // of a double root sitting on the rounding floor of `p`.
                (p.norm() / lead.abs()).sqrt()
            };
            PolishedRoot {
                z,
                residual: step.max(correction),
            }
        })
        .collect()
}

fn horner_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Parlett–Reinsch balancing with power-of-two scale factors (exact in
/// floating point), improving eigenvalue accuracy for uneven coefficients.
fn balance_in_place(m: &mut faer::Mat<f64>) {
    let n = m.nrows();
    let radix = 2.0f64;
    loop {
        let mut done = true;
        for i in 0..n {
            let mut c: f64 = (0..n).filter(|&j| j != i).map(|j| m[(j, i)].abs()).sum();
            let mut r: f64 = (0..n).filter(|&j| j != i).map(|j| m[(i, j)].abs()).sum();
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut factor = 1.0;
            while c < r / radix {
                c *= radix;
                r /= radix;
                factor *= radix;
            }
            while c >= r * radix {
                c /= radix;
                r *= radix;
                factor /= radix;
            }
            if c + r < 0.95 * s && factor != 1.0 {
                done = false;
                for j in 0..n {
                    m[(i, j)] /= factor;
                    m[(j, i)] *= factor;
                }
            }
        }
        if done {
            return;
        }
    }
}

/// Quadrature on the offset grid `θ_j = (j+1/2)/N` per axis. The value is
/// the mean of `log|f(θ)|` over the points with `|f(θ)| ≥ ε`; the error
/// estimate compares against the half-size grid.
pub fn mahler_grid(f: &LaurentPoly, n: usize, epsilon: f64) -> Result<MahlerResult> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    assert!(n >= 2, "grid size must be at least 2");
    let (value, excluded) = grid_mean(f, n, epsilon)?;
    let (half_value, _) = grid_mean(f, (n / 2).max(1), epsilon)?;
    Ok(MahlerResult {
        value,
        error_estimate: (value - half_value).abs(),
        method: MahlerMethod::Grid,
        grid_size: Some(n),
        excluded_points: excluded,
        converged: true,
    })
}

/// Dispatcher: Jensen roots for `dim == 1`, doubling offset grids for
/// `dim 2..=4`. A run that hits the grid cap before reaching `target_tol`
/// comes back with `converged == false` rather than as an error.
pub fn mahler(f: &LaurentPoly, target_tol: f64) -> Result<MahlerResult> {
    mahler_with(
        f,
        &MahlerConfig {
            target_tol,
            ..MahlerConfig::default()
        },
    )
}

/// Dispatcher with explicit configuration (grid cap, epsilon, start size).
pub fn mahler_with(f: &LaurentPoly, cfg: &MahlerConfig) -> Result<MahlerResult> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    assert!(cfg.target_tol > 0.0, "tolerance must be positive");
    match f.dim() {
        1 => mahler_univariate(f, cfg.target_tol.min(1e-10)),
        2..=4 => {
            let cap = cfg.grid_cap.unwrap_or_else(|| default_grid_cap(f.dim()));
            let start = cfg.grid_start.max(2).min(cap);
            let mut prev = grid_mean(f, (start / 2).max(1), cfg.epsilon)?.0;
            let mut n = start;
            loop {
                let (value, excluded) = grid_mean(f, n, cfg.epsilon)?;
                let error_estimate = (value - prev).abs();
                let converged = error_estimate < cfg.target_tol;
                if converged || n.saturating_mul(2) > cap {
                    return Ok(MahlerResult {
                        value,
                        error_estimate,
                        method: MahlerMethod::Grid,
                        grid_size: Some(n),
                        excluded_points: excluded,
                        converged,
                    });
                }
                prev = value;
                n *= 2;
            }
        }
        d => Err(Error::UnsupportedDimension(d)),
    }
}

/// Mean of `log|f|` over the offset grid, with the excluded-point count.
///
/// Points are evaluated from per-axis twiddle tables (one row of phases per
/// distinct exponent), chunked by the first coordinate; chunk subtotals are
/// Kahan-compensated and combined with a fixed pairwise tree.
fn grid_mean(f: &LaurentPoly, n: usize, epsilon: f64) -> Result<(f64, u64)> {
    let dim = f.dim();
    let total_points = (n as u128).pow(dim as u32);
    if total_points > MAX_GRID_POINTS {
        return Err(Error::WindowTooLarge {
            volume: total_points,
            cap: MAX_GRID_POINTS as usize,
        });
    }

    // Distinct exponents per axis, each with a table of n phase factors.
    let mut axis_exponents: Vec<Vec<i64>> = Vec::with_capacity(dim);
    for a in 0..dim {
        let set: BTreeSet<i64> = f.support().map(|e| e.0[a]).collect();
        axis_exponents.push(set.into_iter().collect());
    }
    let tau = std::f64::consts::TAU;
    let tables: Vec<Vec<Vec<Complex64>>> = axis_exponents
        .iter()
        .map(|exps| {
            exps.iter()
                .map(|&e| {
                    (0..n)
                        .map(|j| {
                            // frac(e·(2j+1)/(2n)) computed exactly in i128
                            // so huge exponents keep full phase accuracy.
                            let num = (e as i128) * (2 * j as i128 + 1);
                            let r = num.rem_euclid(2 * n as i128);
                            Complex64::from_polar(1.0, tau * (r as f64) / (2.0 * n as f64))
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let coeffs: Vec<f64> = f.terms().map(|(_, c)| rational_to_f64(c)).collect();
    let slots: Vec<Vec<usize>> = f
        .support()
        .map(|e| {
            (0..dim)
                .map(|a| axis_exponents[a].binary_search(&e.0[a]).unwrap())
                .collect()
        })
        .collect();

    // One chunk per first-axis index: same split regardless of threading.
    let rows: Vec<(f64, u64)> = exec::map_indexed(n, |j0| {
        let mut sum = Kahan::default();
        let mut excluded = 0u64;
        let mut idx = vec![0usize; dim];
        idx[0] = j0;
        let mut done = false;
        while !done {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, &coeff) in coeffs.iter().enumerate() {
                let mut prod = Complex64::new(1.0, 0.0);
                for a in 0..dim {
                    prod *= tables[a][slots[t][a]][idx[a]];
                }
                acc += coeff * prod;
            }
            let mag = acc.norm();
            if mag < epsilon {
                excluded += 1;
            } else {
                sum.add(mag.ln());
            }
            done = true;
            for a in (1..dim).rev() {
                idx[a] += 1;
                if idx[a] < n {
                    done = false;
                    break;
                }
                idx[a] = 0;
            }
        }
        (sum.total(), excluded)
    });

    let subtotals: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let excluded: u64 = rows.iter().map(|r| r.1).sum();
    let included = total_points as u64 - excluded;
    if included == 0 {
        return Err(Error::AllPointsExcluded);
    }
    Ok((exec::pairwise_sum(&subtotals) / included as f64, excluded))
}
