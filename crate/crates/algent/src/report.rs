//! Deterministic report rendering: JSON, CSV, and human-readable text.
//!
//! Identical inputs must produce byte-identical output, so everything
//! here is pure string assembly over already-ordered data (maps are
//! B-trees, series points are sorted). Every numeric field carries 12
//! significant digits; entropy-like quantities are natural logarithms
//! unless bit units are requested, and each document says which.

use std::fmt::Write as _;

use crate::approx::{ApproxSeries, PosentCheck};
use crate::entropy::{EntropyReport, SolenoidEntropy};
use crate::mahler::MahlerResult;
use crate::places::PlaceValue;

/// Unit for logarithmic quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogUnits {
    /// Natural logarithm (the internal representation).
    #[default]
    Nat,
    /// Logarithm base 2.
    Bits,
}

impl LogUnits {
    pub fn convert(self, nats: f64) -> f64 {
        match self {
            LogUnits::Nat => nats,
            LogUnits::Bits => nats / std::f64::consts::LN_2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            LogUnits::Nat => "nat",
            LogUnits::Bits => "bits",
        }
    }
}

/// Render a float with 12 significant digits.
pub fn fmt_sig(x: f64) -> String {
    format!("{x:.11e}")
}

/// Escape a string for inclusion in a JSON document.
pub fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

fn json_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "null".into(), fmt_sig)
}

fn csv_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, fmt_sig)
}

/// `Some(k)` when `exp(nats)` is within `1e-9` (relative) of an integer
/// `k ≥ 2`; used to garnish text output with `= log k`.
pub fn log_integer_garnish(nats: f64) -> Option<u64> {
    let e = nats.exp();
    let r = e.round();
    if (2.0..=1e15).contains(&r) && (e - r).abs() <= 1e-9 * r {
        Some(r as u64)
    } else {
        None
    }
}

fn garnish_suffix(nats: f64, units: LogUnits) -> String {
    match (log_integer_garnish(nats), units) {
        (Some(k), LogUnits::Nat) => format!(" = log {k}"),
        (Some(k), LogUnits::Bits) => format!(" = log2 {k}"),
        (None, _) => String::new(),
    }
}

fn mahler_json_object(r: &MahlerResult, units: LogUnits) -> String {
    format!(
        "{{\"value\":{},\"error\":{},\"method\":\"{}\",\"grid\":{},\"converged\":{}}}",
        fmt_sig(units.convert(r.value)),
        fmt_sig(units.convert(r.error_estimate)),
        r.method.as_str(),
        r.grid_size.map_or_else(|| "null".into(), |g| g.to_string()),
        r.converged,
    )
}

// -------------------------------------------------------------------
// Mahler measure.

pub fn mahler_json(input: &str, dim: usize, r: &MahlerResult, units: LogUnits) -> String {
    format!(
        "{{\"input\":\"{}\",\"dim\":{},\"mahler\":{},\"excluded_points\":{},\"log_units\":\"{}\"}}\n",
        json_escape(input),
        dim,
        mahler_json_object(r, units),
        r.excluded_points,
        units.label(),
    )
}

pub fn mahler_text(input: &str, r: &MahlerResult, units: LogUnits) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "m({input}) = {}{} [{}]",
        fmt_sig(units.convert(r.value)),
        garnish_suffix(r.value, units),
        units.label(),
    );
    let _ = writeln!(
        out,
        "method = {}, error <= {}, converged = {}",
        r.method.as_str(),
        fmt_sig(units.convert(r.error_estimate)),
        r.converged,
    );
    if let Some(g) = r.grid_size {
        let _ = writeln!(out, "grid = {g}, excluded points = {}", r.excluded_points);
    }
    out
}

pub fn mahler_csv(input: &str, r: &MahlerResult, units: LogUnits) -> String {
    let mut out = String::from("key,value\n");
    let _ = writeln!(out, "input,{input}");
    let _ = writeln!(out, "value,{}", fmt_sig(units.convert(r.value)));
    let _ = writeln!(out, "error,{}", fmt_sig(units.convert(r.error_estimate)));
    let _ = writeln!(out, "method,{}", r.method.as_str());
    let _ = writeln!(
        out,
        "grid,{}",
        r.grid_size.map_or_else(String::new, |g| g.to_string())
    );
    let _ = writeln!(out, "converged,{}", r.converged);
    let _ = writeln!(out, "log_units,{}", units.label());
    out
}

// -------------------------------------------------------------------
// Adelic decomposition.

pub fn entropy_json(r: &EntropyReport, units: LogUnits) -> String {
    let mut components = String::from("{");
    for (i, (p, v)) in r.components.iter().enumerate() {
        if i > 0 {
            components.push(',');
        }
        let _ = write!(components, "\"{p}\":{}", fmt_sig(units.convert(v.value())));
    }
    components.push('}');
    let mut formulas = String::from("{");
    for (i, (k, v)) in r.formulas.iter().enumerate() {
        if i > 0 {
            formulas.push(',');
        }
        let _ = write!(formulas, "\"{}\":\"{}\"", json_escape(k), json_escape(v));
    }
    formulas.push('}');
    format!(
        "{{\"input\":\"{}\",\"dim\":{},\"rho_total\":{},\"rho_infinity\":{},\"components\":{},\"mahler\":{},\"residual\":{},\"formulas\":{},\"log_units\":\"{}\"}}\n",
        json_escape(&r.input),
        r.dim,
        fmt_sig(units.convert(r.rho_total)),
        fmt_sig(units.convert(r.rho_infinity)),
        components,
        mahler_json_object(&r.mahler, units),
        fmt_sig(units.convert(r.residual)),
        formulas,
        units.label(),
    )
}

pub fn entropy_text(r: &EntropyReport, units: LogUnits) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "entropy decomposition of {} [{}]",
        r.input,
        units.label()
    );
    let _ = writeln!(
        out,
        "rho_total    = {}{}",
        fmt_sig(units.convert(r.rho_total)),
        garnish_suffix(r.rho_total, units),
    );
    let _ = writeln!(
        out,
        "rho_infinity = {}{}",
        fmt_sig(units.convert(r.rho_infinity)),
        garnish_suffix(r.rho_infinity, units),
    );
    for (p, v) in &r.components {
        let _ = writeln!(
            out,
            "rho_{p}        = {} ({} x log {p})",
            fmt_sig(units.convert(v.value())),
            v.multiplicity().expect("finite place"),
        );
    }
    let _ = writeln!(out, "residual     = {}", fmt_sig(units.convert(r.residual)));
    let _ = writeln!(
        out,
        "mahler error <= {} ({})",
        fmt_sig(units.convert(r.mahler.error_estimate)),
        r.mahler.method.as_str(),
    );
    out
}

pub fn entropy_csv(r: &EntropyReport, units: LogUnits) -> String {
    let mut out = String::from("term,value\n");
    let _ = writeln!(out, "rho_total,{}", fmt_sig(units.convert(r.rho_total)));
    let _ = writeln!(
        out,
        "rho_infinity,{}",
        fmt_sig(units.convert(r.rho_infinity))
    );
    for (p, v) in &r.components {
        let _ = writeln!(out, "rho_{p},{}", fmt_sig(units.convert(v.value())));
    }
    let _ = writeln!(out, "residual,{}", fmt_sig(units.convert(r.residual)));
    let _ = writeln!(out, "# input = {}", r.input);
    let _ = writeln!(out, "# log_units = {}", units.label());
    out
}

// -------------------------------------------------------------------
// Solenoid entropy.

pub fn solenoid_json(input: &str, dim: usize, s: &SolenoidEntropy, units: LogUnits) -> String {
    format!(
        "{{\"input\":\"{}\",\"dim\":{},\"value\":{},\"via_local_factors\":{},\"via_gcd_lcm\":{},\"residual\":{},\"mahler\":{},\"log_units\":\"{}\"}}\n",
        json_escape(input),
        dim,
        fmt_sig(units.convert(s.value)),
        fmt_sig(units.convert(s.via_local_factors)),
        fmt_sig(units.convert(s.via_gcd_lcm)),
        fmt_sig(units.convert(s.residual)),
        mahler_json_object(&s.mahler, units),
        units.label(),
    )
}

pub fn solenoid_text(input: &str, s: &SolenoidEntropy, units: LogUnits) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "rho({input}) = {}{} [{}]",
        fmt_sig(units.convert(s.value)),
        garnish_suffix(s.value, units),
        units.label(),
    );
    let _ = writeln!(
        out,
        "place sum route = {}, content route = {}, residual = {}",
        fmt_sig(units.convert(s.via_local_factors)),
        fmt_sig(units.convert(s.via_gcd_lcm)),
        fmt_sig(units.convert(s.residual)),
    );
    let _ = writeln!(
        out,
        "mahler term = {} (error <= {}, {})",
        fmt_sig(units.convert(s.mahler.value)),
        fmt_sig(units.convert(s.mahler.error_estimate)),
        s.mahler.method.as_str(),
    );
    out
}

pub fn solenoid_csv(input: &str, s: &SolenoidEntropy, units: LogUnits) -> String {
    let mut out = String::from("key,value\n");
    let _ = writeln!(out, "input,{input}");
    let _ = writeln!(out, "value,{}", fmt_sig(units.convert(s.value)));
    let _ = writeln!(
        out,
        "via_local_factors,{}",
        fmt_sig(units.convert(s.via_local_factors))
    );
    let _ = writeln!(out, "via_gcd_lcm,{}", fmt_sig(units.convert(s.via_gcd_lcm)));
    let _ = writeln!(out, "residual,{}", fmt_sig(units.convert(s.residual)));
    let _ = writeln!(out, "log_units,{}", units.label());
    out
}

// -------------------------------------------------------------------
// Lind–Ward local entropy.

pub fn lindward_json(size: usize, prime: u64, v: &PlaceValue, units: LogUnits) -> String {
    format!(
        "{{\"matrix_size\":{},\"prime\":{},\"multiplicity\":{},\"value\":{},\"log_units\":\"{}\"}}\n",
        size,
        prime,
        v.multiplicity().expect("finite place"),
        fmt_sig(units.convert(v.value())),
        units.label(),
    )
}

pub fn lindward_text(size: usize, prime: u64, v: &PlaceValue, units: LogUnits) -> String {
    format!(
        "L_{prime}(t - a) = {} ({} x log {prime}) for a of size {size} [{}]\n",
        fmt_sig(units.convert(v.value())),
        v.multiplicity().expect("finite place"),
        units.label(),
    )
}

pub fn lindward_csv(size: usize, prime: u64, v: &PlaceValue, units: LogUnits) -> String {
    let mut out = String::from("key,value\n");
    let _ = writeln!(out, "matrix_size,{size}");
    let _ = writeln!(out, "prime,{prime}");
    let _ = writeln!(
        out,
        "multiplicity,{}",
        v.multiplicity().expect("finite place")
    );
    let _ = writeln!(out, "value,{}", fmt_sig(units.convert(v.value())));
    let _ = writeln!(out, "log_units,{}", units.label());
    out
}

// -------------------------------------------------------------------
// von Neumann rank.

pub fn rank_json(
    generators: usize,
    relations: usize,
    dim: usize,
    rank: usize,
    seed: u64,
) -> String {
    format!(
        "{{\"generators\":{generators},\"relations\":{relations},\"dim\":{dim},\"rank\":{rank},\"seed\":{seed}}}\n",
    )
}

pub fn rank_text(
    generators: usize,
    relations: usize,
    dim: usize,
    rank: usize,
    seed: u64,
) -> String {
    format!(
        "rk(M) = {rank} (presentation: {generators} generators, {relations} relations over Z^{dim}; seed {seed})\n",
    )
}

pub fn rank_csv(generators: usize, relations: usize, dim: usize, rank: usize, seed: u64) -> String {
    let mut out = String::from("key,value\n");
    let _ = writeln!(out, "generators,{generators}");
    let _ = writeln!(out, "relations,{relations}");
    let _ = writeln!(out, "dim,{dim}");
    let _ = writeln!(out, "rank,{rank}");
    let _ = writeln!(out, "seed,{seed}");
    out
}

// -------------------------------------------------------------------
// Approximation series.

pub fn approx_json(s: &ApproxSeries, units: LogUnits) -> String {
    let mut points = String::from("[");
    for (i, pt) in s.points.iter().enumerate() {
        if i > 0 {
            points.push(',');
        }
        let _ = write!(
            points,
            "{{\"side\":{},\"volume\":{},\"raw\":{},\"normalized\":{}}}",
            pt.side,
            pt.volume,
            json_opt(pt.raw),
            json_opt(pt.normalized.map(|v| units.convert(v))),
        );
    }
    points.push(']');
    format!(
        "{{\"kind\":\"{}\",\"input\":\"{}\",\"dim\":{},\"prime\":{},\"points\":{},\"limit_estimate\":{},\"reference\":{},\"verdict\":\"{}\",\"log_units\":\"{}\"}}\n",
        s.kind.as_str(),
        json_escape(&s.input),
        s.dim,
        s.prime,
        points,
        json_opt(s.limit_estimate.map(|v| units.convert(v))),
        json_opt(s.reference.map(|v| units.convert(v))),
        s.verdict.as_str(),
        units.label(),
    )
}

pub fn approx_csv(s: &ApproxSeries, units: LogUnits) -> String {
    let mut out = String::from("n,volume,raw_statistic,normalized_value,reference,gap_flag\n");
    for pt in &s.points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            pt.side,
            pt.volume,
            csv_opt(pt.raw),
            csv_opt(pt.normalized.map(|v| units.convert(v))),
            csv_opt(s.reference.map(|v| units.convert(v))),
            u8::from(pt.normalized.is_none()),
        );
    }
    let _ = writeln!(out, "# kind = {}", s.kind.as_str());
    let _ = writeln!(out, "# input = {}", s.input);
    let _ = writeln!(out, "# prime = {}", s.prime);
    let _ = writeln!(
        out,
        "# limit_estimate = {}",
        csv_opt(s.limit_estimate.map(|v| units.convert(v)))
    );
    let _ = writeln!(
        out,
        "# reference = {}",
        csv_opt(s.reference.map(|v| units.convert(v)))
    );
    let _ = writeln!(out, "# verdict = {}", s.verdict.as_str());
    let _ = writeln!(out, "# log_units = {}", units.label());
    out
}

pub fn approx_text(s: &ApproxSeries, units: LogUnits) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} series for {} at p = {} [{}]",
        s.kind.as_str(),
        s.input,
        s.prime,
        units.label(),
    );
    for pt in &s.points {
        match (pt.raw, pt.normalized) {
            (Some(raw), Some(norm)) => {
                let _ = writeln!(
                    out,
                    "n = {:>4}  |F| = {:>6}  raw = {:>10}  value = {}",
                    pt.side,
                    pt.volume,
                    raw,
                    fmt_sig(units.convert(norm)),
                );
            }
            _ => {
                let _ = writeln!(
                    out,
                    "n = {:>4}  |F| = {:>6}  gap (singular window)",
                    pt.side, pt.volume,
                );
            }
        }
    }
    let _ = writeln!(
        out,
        "limit estimate = {}, reference = {}, verdict = {}",
        csv_opt(s.limit_estimate.map(|v| units.convert(v))),
        csv_opt(s.reference.map(|v| units.convert(v))),
        s.verdict.as_str(),
    );
    out
}

// -------------------------------------------------------------------
// Positivity bound check.

pub fn posent_json(c: &PosentCheck, units: LogUnits) -> String {
    format!(
        "{{\"input\":\"{}\",\"prime\":{},\"side\":{},\"value\":{},\"lower_bound\":{},\"boundary_slack\":{},\"margin\":{},\"holds\":{},\"log_units\":\"{}\"}}\n",
        json_escape(&c.input),
        c.prime,
        c.side,
        fmt_sig(units.convert(c.value)),
        fmt_sig(units.convert(c.lower_bound)),
        fmt_sig(units.convert(c.boundary_slack)),
        fmt_sig(units.convert(c.margin)),
        c.holds,
        units.label(),
    )
}

pub fn posent_text(c: &PosentCheck, units: LogUnits) -> String {
    format!(
        "positivity bound for {} at p = {}, n = {} [{}]\nvalue = {} >= {} - {} : {} (margin {})\n",
        c.input,
        c.prime,
        c.side,
        units.label(),
        fmt_sig(units.convert(c.value)),
        fmt_sig(units.convert(c.lower_bound)),
        fmt_sig(units.convert(c.boundary_slack)),
        if c.holds { "holds" } else { "VIOLATED" },
        fmt_sig(units.convert(c.margin)),
    )
}

pub fn posent_csv(c: &PosentCheck, units: LogUnits) -> String {
    let mut out = String::from("key,value\n");
    let _ = writeln!(out, "input,{}", c.input);
    let _ = writeln!(out, "prime,{}", c.prime);
    let _ = writeln!(out, "side,{}", c.side);
    let _ = writeln!(out, "value,{}", fmt_sig(units.convert(c.value)));
    let _ = writeln!(out, "lower_bound,{}", fmt_sig(units.convert(c.lower_bound)));
    let _ = writeln!(
        out,
        "boundary_slack,{}",
        fmt_sig(units.convert(c.boundary_slack))
    );
    let _ = writeln!(out, "margin,{}", fmt_sig(units.convert(c.margin)));
    let _ = writeln!(out, "holds,{}", c.holds);
    let _ = writeln!(out, "log_units,{}", units.label());
    out
}
