//! Finite-approximation series over growing cubical windows.
//!
//! Each series normalizes an exact window statistic — a determinant
//! valuation, a kernel dimension, a translate rank — by the window
//! volume and tracks it against the closed-form target when one exists.
//! Verdicts are deliberately conservative: the comparison tolerance is
//! an explicit function of the largest window reached (`log p / n`),
//! never a hidden constant, because the limit statements come with no
//! rate.

use crate::error::Error;
use crate::exec;
use crate::laurent::LaurentPoly;
use crate::places::{local_factor, Prime};
use crate::window::{
    build_restriction, rank_mod_p, residues_mod_p, translate_rank, vp_det, Valuation, Window,
};
use crate::Result;

/// Which normalized statistic a series tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    /// `v_p(det f_F)·log p / |F|`, the finite shadow of `|f|_p·log p`.
    PadicDet,
    /// `dim ker(f_F mod p) / |F|`.
    ElekRank,
    /// `rank of window translates of f mod p · log p / |F|`.
    Peters,
    /// `log p − Peters value`, the quotient-module estimate.
    PetersComplement,
}

impl SeriesKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SeriesKind::PadicDet => "padic_det",
            SeriesKind::ElekRank => "elek_rank",
            SeriesKind::Peters => "peters",
            SeriesKind::PetersComplement => "peters_complement",
        }
    }
}

/// How the last series value relates to the reference, judged at
/// tolerance `log p / n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Converging,
    DivergingFromReference,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Converging => "converging",
            Verdict::DivergingFromReference => "diverging-from-reference",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// One window measurement. `raw` is the exact integer statistic (as a
/// float), `normalized` the volume-normalized value; both are absent on
/// a gap (a singular window).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    pub side: usize,
    pub volume: usize,
    pub raw: Option<f64>,
    pub normalized: Option<f64>,
}

/// A finite-approximation series with its verdict.
#[derive(Debug, Clone)]
pub struct ApproxSeries {
    pub kind: SeriesKind,
    /// Canonical text form of the input polynomial.
    pub input: String,
    pub dim: usize,
    pub prime: u64,
    /// Points in increasing window order.
    pub points: Vec<SeriesPoint>,
    /// Last non-gap normalized value.
    pub limit_estimate: Option<f64>,
    /// Closed-form target, when one exists.
    pub reference: Option<f64>,
    pub verdict: Verdict,
}

fn sorted_sides(sides: &[usize]) -> Vec<usize> {
    let mut s = sides.to_vec();
    s.sort_unstable();
    s.dedup();
    s
}

/// Last valid point decides both the limit estimate and the verdict;
/// the tolerance is `log p` over that point's side.
fn judge(points: &[SeriesPoint], reference: Option<f64>, p: Prime) -> (Option<f64>, Verdict) {
    let Some(last) = points.iter().rev().find(|pt| pt.normalized.is_some()) else {
        return (None, Verdict::Inconclusive);
    };
    let limit = last.normalized.expect("found a non-gap point");
    let Some(reference) = reference else {
        return (Some(limit), Verdict::Inconclusive);
    };
    let tol = p.log() / last.side as f64;
    let verdict = if (limit - reference).abs() <= tol + 1e-12 {
        Verdict::Converging
    } else {
        Verdict::DivergingFromReference
    };
    (Some(limit), verdict)
}

/// The series `v_p(det f_F)·log p / |F|` whose conjectural limit is the
/// local factor `|f|_p·log p`. Singular windows become gaps, not errors.
pub fn padic_det_series(f: &LaurentPoly, p: Prime, sides: &[usize]) -> Result<ApproxSeries> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let sides = sorted_sides(sides);
    let points = exec::map_slice(&sides, |&n| -> Result<SeriesPoint> {
        let w = Window::new(f.dim(), n)?;
        let m = build_restriction(f, &w)?;
        let volume = w.volume();
        Ok(match vp_det(&m, p) {
            Valuation::Finite(v) => SeriesPoint {
                side: n,
                volume,
                raw: Some(v as f64),
                normalized: Some(v as f64 * p.log() / volume as f64),
            },
            Valuation::Infinite => SeriesPoint {
                side: n,
                volume,
                raw: None,
                normalized: None,
            },
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let reference = Some(local_factor(f, p)?.value());
    let (limit_estimate, verdict) = judge(&points, reference, p);
    Ok(ApproxSeries {
        kind: SeriesKind::PadicDet,
        input: f.format(),
        dim: f.dim(),
        prime: p.get(),
        points,
        limit_estimate,
        reference,
        verdict,
    })
}

/// The normalized kernel dimension `(|F| − rank_p(f_F)) / |F|`. The
/// limit exists, but no closed form is asserted, so the verdict is
/// always inconclusive.
pub fn elek_rank_series(f: &LaurentPoly, p: Prime, sides: &[usize]) -> Result<ApproxSeries> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let sides = sorted_sides(sides);
    let points = exec::map_slice(&sides, |&n| -> Result<SeriesPoint> {
        let w = Window::new(f.dim(), n)?;
        let m = build_restriction(f, &w)?;
        let volume = w.volume();
        let kernel = (volume - rank_mod_p(&m, p)) as f64;
        Ok(SeriesPoint {
            side: n,
            volume,
            raw: Some(kernel),
            normalized: Some(kernel / volume as f64),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let (limit_estimate, verdict) = judge(&points, None, p);
    Ok(ApproxSeries {
        kind: SeriesKind::ElekRank,
        input: f.format(),
        dim: f.dim(),
        prime: p.get(),
        points,
        limit_estimate,
        reference: None,
        verdict,
    })
}

/// Entropy estimates from window translate ranks over `F_p`: the main
/// series `rank·log p / |F|` approximates the entropy of the submodule
/// generated by `f`, and the complement series `(|F| − rank)·log p/|F|`
/// approximates the quotient's entropy, whose closed form is 0 because
/// `F_p[Z^d]` has no zero divisors.
pub fn peters_series(
    f: &LaurentPoly,
    p: Prime,
    sides: &[usize],
) -> Result<(ApproxSeries, ApproxSeries)> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let sides = sorted_sides(sides);
    let ranks = exec::map_slice(&sides, |&n| -> Result<(usize, usize)> {
        let w = Window::new(f.dim(), n)?;
        Ok((w.volume(), translate_rank(f, &w, p)?))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut main_points = Vec::with_capacity(sides.len());
    let mut comp_points = Vec::with_capacity(sides.len());
    for (&n, &(volume, rank)) in sides.iter().zip(&ranks) {
        let kernel = volume - rank;
        main_points.push(SeriesPoint {
            side: n,
            volume,
            raw: Some(rank as f64),
            normalized: Some(rank as f64 * p.log() / volume as f64),
        });
        comp_points.push(SeriesPoint {
            side: n,
            volume,
            raw: Some(kernel as f64),
            normalized: Some(kernel as f64 * p.log() / volume as f64),
        });
    }
    let (main_limit, main_verdict) = judge(&main_points, Some(p.log()), p);
    let (comp_limit, comp_verdict) = judge(&comp_points, Some(0.0), p);
    let main = ApproxSeries {
        kind: SeriesKind::Peters,
        input: f.format(),
        dim: f.dim(),
        prime: p.get(),
        points: main_points,
        limit_estimate: main_limit,
        reference: Some(p.log()),
        verdict: main_verdict,
    };
    let complement = ApproxSeries {
        kind: SeriesKind::PetersComplement,
        input: f.format(),
        dim: f.dim(),
        prime: p.get(),
        points: comp_points,
        limit_estimate: comp_limit,
        reference: Some(0.0),
        verdict: comp_verdict,
    };
    Ok((main, complement))
}

/// One positivity check: the window entropy estimate must clear the
/// support-size lower bound `log p / |S|²` up to an explicit boundary
/// correction.
#[derive(Debug, Clone)]
pub struct PosentCheck {
    pub input: String,
    pub prime: u64,
    pub side: usize,
    /// The Peters point at this window, `rank·log p / |F|`.
    pub value: f64,
    /// `log p / |S|²` for `S` the support of `f mod p`.
    pub lower_bound: f64,
    /// `log p·|∂F|/|F|`, where `∂F` is the boundary shell of width the
    /// support diameter.
    pub boundary_slack: f64,
    /// `value − (lower_bound − boundary_slack)`.
    pub margin: f64,
    pub holds: bool,
}

/// Check the entropy-positivity lower bound at a single window.
pub fn posent_check(f: &LaurentPoly, p: Prime, side: usize) -> Result<PosentCheck> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let support = residues_mod_p(f, p)?;
    if support.is_empty() {
        return Err(Error::ZeroModP(p.get()));
    }
    let w = Window::new(f.dim(), side)?;
    let volume = w.volume();
    let rank = translate_rank(f, &w, p)?;
    let value = rank as f64 * p.log() / volume as f64;
    let support_size = support.len();
    let lower_bound = p.log() / (support_size * support_size) as f64;

    // ∞-diameter of the support of f mod p, per axis.
    let diameter = (0..f.dim())
        .map(|axis| {
            let lo = support
                .keys()
                .map(|e| e.0[axis])
                .min()
                .expect("nonempty support");
            let hi = support
                .keys()
                .map(|e| e.0[axis])
                .max()
                .expect("nonempty support");
            (hi - lo) as usize
        })
        .max()
        .unwrap_or(0);
    let interior = side.saturating_sub(2 * diameter);
    let boundary = volume - interior.pow(f.dim() as u32);
    let boundary_slack = p.log() * boundary as f64 / volume as f64;

    let margin = value - (lower_bound - boundary_slack);
    Ok(PosentCheck {
        input: f.format(),
        prime: p.get(),
        side,
        value,
        lower_bound,
        boundary_slack,
        margin,
        holds: margin >= -1e-12,
    })
}
