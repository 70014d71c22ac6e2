//! Census risk-limiting audit.
//!
//! Representatives are apportioned to states by a highest-averages rule over
//! census populations. A post-enumeration survey (PES) re-counts a random
//! sample of households; the audit compares the two counts household by
//! household and outputs the smallest risk limit at which the census
//! apportionment can be approved.

pub mod assorter;
pub mod audit;
pub mod cyprus;
pub mod model;
pub mod sampler;

pub use assorter::{census_assorter_value, comparison_assorter_value, PairAssorter};
pub use audit::{census_rla, CensusAuditConfig, CensusOutcome, PairRisk, PairStatus, UnframedScoring};
pub use cyprus::{generate_cyprus_data, District, GeneratedCensus, GenerationParams, HouseholdDistribution};
pub use model::{apportion, census_populations, validate_households, CensusModel, Household, DEFAULT_G_MAX};
pub use sampler::HouseholdSampler;
