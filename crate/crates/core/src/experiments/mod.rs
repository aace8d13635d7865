//! Experiment drivers behind the `sample-sched` binary. Each returns a
//! [`Report`] whose rows are written as CSV or JSON; row order depends only
//! on the configuration, never on thread scheduling.

mod examples;
mod report;
mod sweep;
mod verify;

pub use examples::{
    example1_instance, example2_instance, example2_rog, run_example1, run_example2, ExampleReport, MC_Z,
};
pub use report::{rel_error, write_report, Format, QuantityRow, Report};
pub use sweep::{run_sweep_alpha, separated_instance, two_job_instance, SweepReport, SweepRow, UNIT_ALPHA_RATIO};
pub use verify::{random_instance, run_verify, InstanceClass, VerifyReport, VerifyRow, ALPHA_BOUND_SLACK};
