//! Check runner behind the `qzv` binary: named checks expand into cases,
//! cases run (optionally in parallel) and produce deterministic reports.

pub mod plan;
pub mod report;
pub mod run;
pub mod value;

pub use plan::{plan, Case, CheckName, Params, Profile, Task};
pub use report::{render, CheckReport, Format, Status, Summary};
pub use run::{run_case, run_cases};

/// Plan and run a named check.
pub fn run_check(name: CheckName, params: &Params, jobs: usize) -> qzv_core::Result<Vec<CheckReport>> {
    run_cases(&plan(name, params)?, jobs, false)
}
