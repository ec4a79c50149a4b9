//! Entropy invariants of algebraic `Z^d`-actions.
//!
//! A Laurent polynomial `f` in `d` commuting variables presents a compact
//! abelian group with a `Z^d`-action by dualizing `Z[Z^d]/(f)`, and the
//! topological entropy of that action is the logarithmic Mahler measure
//! `m(f)`. Over the rationals the entropy splits into an archimedean part
//! (the Mahler measure again) and one local contribution per prime, each of
//! the exact form `k · log p`. This crate computes all of these pieces and
//! the finite-dimensional approximations that converge to them:
//!
//! - [`laurent`]: sparse Laurent polynomials over exact rationals, parsing,
//!   convolution, torus evaluation, and exact characteristic polynomials.
//! - [`places`]: p-adic valuations, contents, local factors stored as exact
//!   `(multiplicity, prime)` pairs, and relevant-prime discovery.
//! - [`mahler`]: the archimedean part, by companion-matrix roots in one
//!   variable and by offset torus grids in several.
//! - [`window`]: restrictions of `f` to cubical windows `[0,n)^d`, exact
//!   determinants (CRT over word-size primes, cross-checked by Bareiss),
//!   ranks over `F_p`, translate matrices, and brute-force sumset counts.
//! - [`entropy`]: the closed-form entropies and the adelic decomposition,
//!   Lind–Ward local entropies from characteristic polynomials, and von
//!   Neumann ranks of finitely presented modules.
//! - [`approx`]: window series whose normalized statistics approach the
//!   closed forms, with explicit references, gap handling, and verdicts.
//! - [`report`]: deterministic JSON/CSV/text rendering (12 significant
//!   digits, natural-log units by default).
//!
//! Exact data stays exact: coefficients are `BigRational`, determinants are
//! `BigInt`, local factors are integer multiples of `log p` rendered to
//! floating point only at the reporting boundary. Floating-point reductions
//! use a fixed chunk-then-pairwise tree, so results are bit-identical
//! between the rayon-parallel core (feature `parallel`, on by default) and
//! the sequential fallback, and independent of thread count.

pub mod approx;
pub mod entropy;
pub mod error;
pub mod exec;
pub mod laurent;
pub mod mahler;
pub mod matrix;
pub mod places;
pub mod report;
pub mod window;

pub use approx::{ApproxSeries, PosentCheck, SeriesKind, SeriesPoint, Verdict};
pub use entropy::{EntropyReport, ModulePresentation, SolenoidEntropy};
pub use error::Error;
pub use laurent::{ExponentVector, LaurentPoly};
pub use mahler::{MahlerConfig, MahlerMethod, MahlerResult};
pub use matrix::RationalMatrix;
pub use places::{Place, PlaceValue, Prime};
pub use window::{RestrictionMatrix, TranslateMatrix, Valuation, Window};

/// Convenience alias used throughout: all fallible operations share one
/// error type.
pub type Result<T> = std::result::Result<T, Error>;
