//! Exact analysis and Monte Carlo simulation of sample-driven list scheduling
//! on a single machine with expected total weighted completion time.
//!
//! The scheduler sees one sampled processing time `p'_j` per job and orders
//! jobs by `w_j / p'_j` (SAM). Its expected cost is compared against the best
//! (`L`) and worst (`H`) static sequences through the relative optimality gap
//! `rog = (cost - L) / (H - L)`; a uniformly random sequence (RND) always has
//! `rog = 1/2`.
//!
//! Module map:
//! - [`distributions`]: processing-time laws and the named base densities.
//! - [`instance`]: weighted jobs, WSEPT priorities, `L`, `H` and pairwise inversion costs.
//! - [`policies`]: realization-level schedules (SAM, RND, WSEPT, WSPT) and realized cost.
//! - [`pairwise`]: exact ordering probabilities and the rog/kappa/alpha analysis.
//! - [`montecarlo`]: simulation estimators and brute-force enumeration oracles.
//! - [`numerics`]: adaptive quadrature and seeded random streams.
//! - [`experiments`]: the reproducible experiment drivers behind the `sample-sched` CLI.

pub mod distributions;
pub mod error;
pub mod experiments;
pub mod instance;
pub mod montecarlo;
pub mod numerics;
pub mod pairwise;
pub mod policies;

pub use distributions::{BaseDensity, DistKind, Distribution};
pub use error::{Error, Result};
pub use instance::{Instance, Job, Permutation};
pub use montecarlo::Estimate;
pub use numerics::QuadratureConfig;
pub use pairwise::{AnalysisReport, PairwiseMatrix};
pub use policies::Policy;
