//! Verification suites, refinement studies, and single runs with CSV output.

pub mod checks;
mod convergence;
mod single;
mod verify;

pub use convergence::{
    graded_spec, observed_order, run_convergence, ConvergenceConfig, ConvergenceRow, ConvergenceTable, DtLaw,
    GridFamily,
};
pub use single::{run_single, RunConfig, RunOutput, RunSource};
pub use verify::{run_verify, run_verify_with, CheckRecord, VerifyConfig, VerifySuiteResult};
