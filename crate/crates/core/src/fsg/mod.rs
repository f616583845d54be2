//! Translate covers, finite-satisfiability witnesses and batch experiments.
//!
//! The "model points" of the witness checks are an explicit finite set of
//! group elements sitting inside a bounded box; all checks are exhaustive
//! over the finite quotient.

mod cover;
mod pipeline;
mod witness;

pub use cover::{exact_min_cover, greedy_cover, CoverCertificate};
pub use pipeline::{build_report, run_experiment, Config, RunSummary, Step, EXACT_COVER_MAX_ORDER, REPORT_SCHEMA};
pub use witness::{easy_direction_check, fsg_witness, EasyDirectionReport, FsgWitness};
