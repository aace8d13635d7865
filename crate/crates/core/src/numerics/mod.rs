//! Shared numeric substrate: adaptive quadrature, seeded random streams and
//! compensated summation.

mod quadrature;
mod rng;
mod sum;

pub use quadrature::{integrate, integrate_with_breaks, QuadratureConfig};
pub use rng::{rng_stream, RandomStream, StreamFactory};
pub use sum::{NeumaierSum, RunningStats};
