//! Data files, error injection, synthetic elections and Monte Carlo
//! experiments built on the audit library.

pub mod errors;
pub mod experiment;
pub mod io;
pub mod stats;
pub mod synthetic;

pub use errors::{inject_ballot_errors, ErrorModel};
pub use experiment::{
    load_election, run_experiment, CensusSpec, CensusTrial, Election, ElectionConfig, ExperimentConfig,
    ExperimentKind, ExperimentReport, Rule, TrialReport,
};
pub use stats::{assertion_stats, mean_std, median, AssertionSummary};
pub use synthetic::{generate_batches, PartyShare, SyntheticElection};
