//! `algent` — entropy invariants of algebraic Z^d-actions from the command
//! line.
//!
//! One subcommand per quantity: `mahler`, `entropy`, `solenoid`,
//! `lindward`, `rank`, `approx`. Each run writes exactly one report
//! document (text, JSON, or CSV) to standard output and is byte-reproducible
//! given the same flags and seed.
//!
//! Exit codes: 0 success (mathematical verdicts such as
//! "diverging-from-reference" are data, not failures), 2 malformed input,
//! 3 guard violation (size caps, factorization bounds), 4 internal
//! consistency check failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use algent::entropy::{self, ModulePresentation};
use algent::mahler::MahlerConfig;
use algent::places::{PlaceValue, Prime};
use algent::report::{self, LogUnits};
use algent::{approx, Error, LaurentPoly, RationalMatrix};

#[derive(Parser)]
#[command(
    name = "algent",
    version,
    about = "Entropy invariants of algebraic Z^d-actions",
    long_about = "Computes logarithmic Mahler measures, adelic entropy \
                  decompositions, solenoid entropies, local entropies of \
                  toral automorphisms, von Neumann ranks, and finite-window \
                  approximation series, using exact arithmetic wherever the \
                  quantity is exact.\n\n\
                  Polynomials use the grammar `5 + 2*x + 2*x^-1` with \
                  variables x, y, z, w for dimensions 1 through 4; \
                  coefficients are integers or fractions like 3/2.\n\n\
                  Set RAYON_NUM_THREADS to control parallelism; results do \
                  not depend on the thread count."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Logarithmic Mahler measure m(f) of a Laurent polynomial.
    Mahler {
        #[command(flatten)]
        poly: PolyArgs,
        #[command(flatten)]
        measure: MeasureArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Adelic decomposition rho = rho_inf + sum_p rho_p of a principal
    /// action given by an integer polynomial.
    Entropy {
        #[command(flatten)]
        poly: PolyArgs,
        #[command(flatten)]
        measure: MeasureArgs,
        /// Finite places to list: "auto" (all relevant primes) or an
        /// explicit comma list like "2,3,5". Explicitly listed primes that
        /// carry no entropy appear with an exact zero. The consistency
        /// residual is always taken over all relevant primes.
        #[arg(long, default_value = "auto")]
        primes: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Solenoid entropy of the rationalized module, by two independent
    /// formulas with their disagreement reported.
    Solenoid {
        #[command(flatten)]
        poly: PolyArgs,
        #[command(flatten)]
        measure: MeasureArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Local entropy at p of the toral/solenoidal automorphism given by a
    /// rational matrix.
    Lindward {
        /// Matrix file: first line n, then n rows of n whitespace-separated
        /// rationals (e.g. "1/2 0").
        #[arg(long)]
        matrix: PathBuf,
        /// The prime of the local place.
        #[arg(long)]
        prime: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Von Neumann rank of a finitely presented module over Q[Z^d].
    Rank {
        /// Presentation file: first line `<relations> <generators> <dim>`,
        /// then one line per relation with generator entries separated by
        /// ';', each entry a polynomial in the grammar.
        #[arg(long)]
        relations: PathBuf,
        /// Seed for the random evaluation points; the seed fully determines
        /// the result.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output format.
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Finite-window approximation series over Folner boxes.
    Approx {
        /// Which series or check to run.
        #[arg(long, value_enum)]
        kind: Kind,
        #[command(flatten)]
        poly: PolyArgs,
        /// The prime of the local place.
        #[arg(long)]
        prime: u64,
        /// Window sides: an inclusive range "1..12" or a comma list
        /// "2,4,8,16". For `posent` the check runs at the largest side.
        #[arg(long)]
        sides: String,
        /// Output format.
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Report logarithms base 2 instead of natural logs.
        #[arg(long)]
        bits: bool,
    },
}

#[derive(Args)]
struct PolyArgs {
    /// Polynomial, e.g. "5 + 2*x + 2*x^-1" or "1 + x + y".
    #[arg(long)]
    poly: String,
    /// Number of variables d (1..=4).
    #[arg(long, default_value_t = 1)]
    dim: usize,
}

#[derive(Args)]
struct MeasureArgs {
    /// Target tolerance for the Mahler measure.
    #[arg(long)]
    tol: Option<f64>,
    /// Grid cap per axis for d >= 2 (doubling stops at this size).
    #[arg(long)]
    grid: Option<usize>,
    /// Exclusion threshold: grid points with |f| below this are skipped.
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Report logarithms base 2 instead of natural logs.
    #[arg(long)]
    bits: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    #[value(name = "padic_det")]
    PadicDet,
    #[value(name = "elek_rank")]
    ElekRank,
    #[value(name = "peters")]
    Peters,
    #[value(name = "peters_complement")]
    PetersComplement,
    #[value(name = "posent")]
    Posent,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_class(&e))
        }
    }
}

/// Exit code for a library error: guards are 3, inconsistencies 4, and
/// everything else is malformed input at 2.
fn exit_class(e: &Error) -> u8 {
    match e {
        Error::WindowTooLarge { .. }
        | Error::EnumerationGuard { .. }
        | Error::CoefficientBound { .. }
        | Error::FactorizationFailure(_)
        | Error::EntryOverflow => 3,
        Error::Inconsistent(_) => 4,
        _ => 2,
    }
}

fn run(command: Command) -> Result<String, Error> {
    match command {
        Command::Mahler {
            poly,
            measure,
            output,
        } => {
            let f = parse_poly(&poly)?;
            let r = algent::mahler::mahler_with(&f, &measure.config())?;
            let units = output.units();
            Ok(match output.format {
                Format::Text => report::mahler_text(&f.format(), &r, units),
                Format::Json => report::mahler_json(&f.format(), f.dim(), &r, units),
                Format::Csv => report::mahler_csv(&f.format(), &r, units),
            })
        }
        Command::Entropy {
            poly,
            measure,
            primes,
            output,
        } => {
            let f = parse_poly(&poly)?;
            let cfg = measure.config();
            let mut r = entropy::decompose_with(&f, &cfg)?;
            if r.residual > 10.0 * cfg.target_tol {
                return Err(Error::Inconsistent(format!(
                    "decomposition residual {} exceeds 10x the tolerance {}",
                    r.residual, cfg.target_tol
                )));
            }
            if let Some(list) = parse_primes(&primes)? {
                let mut filtered = std::collections::BTreeMap::new();
                for p in list {
                    let value = match r.components.get(&p) {
                        Some(v) => *v,
                        None => PlaceValue::finite(Prime::new(p)?, 0),
                    };
                    filtered.insert(p, value);
                }
                r.components = filtered;
            }
            let units = output.units();
            Ok(match output.format {
                Format::Text => report::entropy_text(&r, units),
                Format::Json => report::entropy_json(&r, units),
                Format::Csv => report::entropy_csv(&r, units),
            })
        }
        Command::Solenoid {
            poly,
            measure,
            output,
        } => {
            let f = parse_poly(&poly)?;
            let s = entropy::solenoid_entropy_with(&f, &measure.config())?;
            let units = output.units();
            Ok(match output.format {
                Format::Text => report::solenoid_text(&f.format(), &s, units),
                Format::Json => report::solenoid_json(&f.format(), f.dim(), &s, units),
                Format::Csv => report::solenoid_csv(&f.format(), &s, units),
            })
        }
        Command::Lindward {
            matrix,
            prime,
            output,
        } => {
            let text = read_file(&matrix)?;
            let a = RationalMatrix::parse_text(&text)?;
            let p = Prime::new(prime)?;
            let v = entropy::lind_ward(&a, p)?;
            let units = output.units();
            Ok(match output.format {
                Format::Text => report::lindward_text(a.size(), prime, &v, units),
                Format::Json => report::lindward_json(a.size(), prime, &v, units),
                Format::Csv => report::lindward_csv(a.size(), prime, &v, units),
            })
        }
        Command::Rank {
            relations,
            seed,
            format,
        } => {
            let text = read_file(&relations)?;
            let m = parse_presentation(&text)?;
            let rank = entropy::von_neumann_rank(&m, seed);
            Ok(match format {
                Format::Text => {
                    report::rank_text(m.generators(), m.relations().len(), m.dim(), rank, seed)
                }
                Format::Json => {
                    report::rank_json(m.generators(), m.relations().len(), m.dim(), rank, seed)
                }
                Format::Csv => {
                    report::rank_csv(m.generators(), m.relations().len(), m.dim(), rank, seed)
                }
            })
        }
        Command::Approx {
            kind,
            poly,
            prime,
            sides,
            format,
            bits,
        } => {
            let f = parse_poly(&poly)?;
            let p = Prime::new(prime)?;
            let sides = parse_sides(&sides)?;
            let units = if bits { LogUnits::Bits } else { LogUnits::Nat };
            if kind == Kind::Posent {
                let side = *sides.iter().max().expect("sides is nonempty");
                let c = approx::posent_check(&f, p, side)?;
                return Ok(match format {
                    Format::Text => report::posent_text(&c, units),
                    Format::Json => report::posent_json(&c, units),
                    Format::Csv => report::posent_csv(&c, units),
                });
            }
            let series = match kind {
                Kind::PadicDet => approx::padic_det_series(&f, p, &sides)?,
                Kind::ElekRank => approx::elek_rank_series(&f, p, &sides)?,
                Kind::Peters => approx::peters_series(&f, p, &sides)?.0,
                Kind::PetersComplement => approx::peters_series(&f, p, &sides)?.1,
                Kind::Posent => unreachable!("handled above"),
            };
            Ok(match format {
                Format::Text => report::approx_text(&series, units),
                Format::Json => report::approx_json(&series, units),
                Format::Csv => report::approx_csv(&series, units),
            })
        }
    }
}

impl MeasureArgs {
    fn config(&self) -> MahlerConfig {
        let mut cfg = MahlerConfig::default();
        if let Some(t) = self.tol {
            cfg.target_tol = t;
        }
        if let Some(g) = self.grid {
            cfg.grid_cap = Some(g);
        }
        if let Some(e) = self.epsilon {
            cfg.epsilon = e;
        }
        cfg
    }
}

impl OutputArgs {
    fn units(&self) -> LogUnits {
        if self.bits {
            LogUnits::Bits
        } else {
            LogUnits::Nat
        }
    }
}

fn parse_poly(args: &PolyArgs) -> Result<LaurentPoly, Error> {
    LaurentPoly::parse(&args.poly, args.dim)
}

fn read_file(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::parse(0, format!("cannot read {}: {e}", path.display())))
}

/// "auto" means every relevant prime; otherwise a comma list of primes.
fn parse_primes(text: &str) -> Result<Option<Vec<u64>>, Error> {
    let trimmed = text.trim();
    if trimmed == "auto" {
        return Ok(None);
    }
    let mut primes = Vec::new();
    for field in trimmed.split(',') {
        let p: u64 = field
            .trim()
            .parse()
            .map_err(|_| Error::parse(0, format!("invalid prime '{}'", field.trim())))?;
        primes.push(p);
    }
    if primes.is_empty() {
        return Err(Error::parse(0, "the prime list is empty"));
    }
    Ok(Some(primes))
}

/// Window sides: "lo..hi" (inclusive) or a comma list; all sides >= 1.
fn parse_sides(text: &str) -> Result<Vec<usize>, Error> {
    let trimmed = text.trim();
    let bad = |what: &str| Error::parse(0, format!("invalid sides '{trimmed}': {what}"));
    let sides: Vec<usize> = if let Some((lo, hi)) = trimmed.split_once("..") {
        let lo: usize = lo
            .trim()
            .parse()
            .map_err(|_| bad("range start is not a number"))?;
        let hi: usize = hi
            .trim()
            .parse()
            .map_err(|_| bad("range end is not a number"))?;
        if lo > hi {
            return Err(bad("range start exceeds range end"));
        }
        (lo..=hi).collect()
    } else {
        trimmed
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad("expected a comma list of numbers"))?
    };
    if sides.is_empty() {
        return Err(bad("no sides given"));
    }
    if sides.contains(&0) {
        return Err(bad("sides must be at least 1"));
    }
    Ok(sides)
}

/// Presentation file: `<relations> <generators> <dim>` on the first line,
/// then one relation per line with ';'-separated polynomial entries.
fn parse_presentation(text: &str) -> Result<ModulePresentation, Error> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::parse(0, "empty presentation file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(Error::parse(
            0,
            "expected header '<relations> <generators> <dim>'".to_string(),
        ));
    }
    let parse_count = |s: &str, what: &str| -> Result<usize, Error> {
        s.parse()
            .map_err(|_| Error::parse(0, format!("invalid {what} count '{s}'")))
    };
    let n_relations = parse_count(fields[0], "relation")?;
    let generators = parse_count(fields[1], "generator")?;
    let dim = parse_count(fields[2], "dimension")?;
    let mut relations = Vec::with_capacity(n_relations);
    for line in lines.take(n_relations) {
        let row: Vec<LaurentPoly> = line
            .split(';')
            .map(|entry| LaurentPoly::parse(entry.trim(), dim))
            .collect::<Result<_, _>>()?;
        relations.push(row);
    }
    if relations.len() != n_relations {
        return Err(Error::parse(
            0,
            format!(
                "expected {n_relations} relation lines, found {}",
                relations.len()
            ),
        ));
    }
    ModulePresentation::new(generators, dim, relations)
}
