//! # blochlab
//!
//! A desk-scale laboratory for weighted Bloch spaces on the unit disk.
//!
//! The crate builds the lacunary (Hadamard gap) series that are extremal for a
//! gauge `ω`, evaluates the quadratic integral
//! `I_ω(x) = ∫ₓ¹ ω²(t)/t dt` together with `Φ_ω = 1 + I_ω`, and measures
//! the inequalities tying them together on explicit grids:
//!
//! - [`gauge`]: gauge functions, regularity checks, `I_ω`, `Φ_ω`, the dyadic sum `Ψ`.
//! - [`lacunary`]: gap series `Σ a_k z^{n_k}` with `n_k = 2ᵏ` or `2ᵏ − 1`.
//! - [`means`]: integral means `M_p(f, r)` and grid estimates of Bloch and Hardy–Bloch norms.
//! - [`stochastic`]: Rademacher functions and exact sign-averaged moments.
//! - [`verify`]: named certifications producing [`report::EstimateReport`]s.
//! - [`applications`]: radial Carleson measures and the hyperbolic-derivative audit.
//! - [`cli`]: the batch front-end used by the `blochlab` binary.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory:
//!
//! ```bash
//! cargo run --example quadratic_integrals
//! cargo run --example reverse_estimate
//! ```

pub mod applications;
pub mod cli;
mod error;
pub mod gauge;
pub mod holomorphic;
pub mod lacunary;
pub mod means;
pub mod quadrature;
pub mod report;
pub mod stochastic;
pub mod summation;
pub mod verify;

pub use error::{Error, Result};
pub use gauge::{Dichotomy, Gauge, GaugeKind, QuadraticIntegralValue};
pub use holomorphic::{Holomorphic, Polynomial};
pub use lacunary::{ExponentRule, GapSeries};
pub use means::RadialGrid;
pub use report::EstimateReport;
pub use stochastic::{MomentMode, RademacherFamily};

pub use num_complex::Complex64;

/// Version string embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
