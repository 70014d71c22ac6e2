//! Risk-limiting audits for batch-level elections and census apportionment.
//!
//! The crate is organised bottom-up:
//!
//! * [`contest`] and [`assorter`] hold ballot types, tallies and assorters,
//!   including the conversion from linear tally inequalities to assorters.
//! * [`alpha`] is the ALPHA martingale test over single ballots, plus the
//!   ALPHA-batch baseline.
//! * [`batch`] and [`batchcomp`] implement batch records, missing-ballot
//!   padding and the Batchcomp comparison audit.
//! * [`highest_averages`] and [`knesset`] allocate seats and derive the
//!   assertion set for a threshold-plus-apparentment D'Hondt election.
//! * [`census`] audits an apportionment of representatives against a
//!   post-enumeration survey.
//! * [`harness`] reads data files, injects errors, runs seeded Monte Carlo
//!   experiments and summarises them.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alpha;
pub mod assorter;
pub mod batch;
pub mod batchcomp;
pub mod census;
pub mod contest;
pub mod error;
pub mod harness;
pub mod highest_averages;
pub mod knesset;
pub mod sampling;
pub mod trace;

pub use alpha::{alpha_audit, alpha_batch_audit, alpha_init, alpha_step, AssertionState, AuditConfig, AuditOutcome};
pub use assorter::{assertion_margin, assorter_mean, inequality_to_assorter, plurality_assorter, Assorter, LinearInequality};
pub use batch::{pad_missing_ballots, BatchRecord};
pub use batchcomp::{batch_assorter_value, batchcomp_audit, batchcomp_simplified_step, BatchAssorter};
pub use contest::{BallotType, Contest, Tally, INVALID_LABEL};
pub use error::{Error, Result};
pub use knesset::{allocate_seats, generate_assertions, KnessetContest, SeatAllocation};
pub use census::{census_rla, generate_cyprus_data, CensusModel, Household, HouseholdSampler};
pub use harness::{inject_ballot_errors, run_experiment, ErrorModel};
