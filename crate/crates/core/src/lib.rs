//! Exact computation of the genus-0 Gromov–Witten potential of CPⁿ from the
//! periods of its mirror.
//!
//! The pipeline runs in four stages, each a module:
//!
//! 1. [`periods`]: the series ξ, its images `φ^l = f^l ξ` and the family
//!    `θ_j(t)` obtained by deforming with `exp(Σ t^m f^m / ℏ)`.
//! 2. [`normalization`]: the combination Ψ of the `θ_j` whose projection to
//!    the opposite subspace is fixed, and the mirror coordinates `y(t)`.
//! 3. [`frobenius`]: structure constants, metric, Euler and identity fields,
//!    and the potential Φ(y) with every compatibility identity checked.
//! 4. [`oracle`]: an independent reconstruction of the same potential from
//!    the associativity equations, used for comparison.
//!
//! [`pipeline`] ties the stages together and [`report`] drives the
//! `cpn-mirror` binary. All arithmetic is over `Q`.
//!
//! ```
//! use cpn_mirror::pipeline::{run, PipelineConfig};
//! use cpn_mirror::series::rational::int;
//!
//! let result = run(&PipelineConfig::new(2, 5)).unwrap();
//! assert_eq!(result.sigma.gw[&(1, vec![2])], int(1));
//! assert!(result.checks.iter().all(|(_, c)| c.passed));
//! ```

pub mod check;
pub mod error;
pub mod frobenius;
pub mod linalg;
pub mod normalization;
pub mod oracle;
pub mod periods;
pub mod pipeline;
pub mod report;
pub mod series;

pub use check::CheckOutcome;
pub use error::{Error, Result};
