use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::highest_averages::{highest_averages, Divisor};

/// Residents-per-household bound assumed when none is given.
pub const DEFAULT_G_MAX: u32 = 15;

/// How representatives are apportioned to states.
///
/// Cell `[s, r]` of the apportionment table holds `(pop_s + c_s) / d(r)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CensusModel {
    states: Vec<String>,
    representatives: u32,
    divisor: Divisor,
    constants: Vec<f64>,
    g_max: u32,
}

impl CensusModel {
    pub fn new(
        states: Vec<String>,
        representatives: u32,
        divisor: Divisor,
        constants: Vec<f64>,
        g_max: u32,
    ) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidConfig("census model has no states".into()));
        }
        if constants.len() != states.len() {
            return Err(Error::InvalidConfig(format!(
                "{} constants for {} states",
                constants.len(),
                states.len()
            )));
        }
        if constants.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidConfig("state constants must be finite".into()));
        }
        if representatives == 0 || g_max == 0 {
            return Err(Error::InvalidConfig("representatives and g_max must be positive".into()));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = states.iter().find(|s| !seen.insert(s.as_str())) {
            return Err(Error::InvalidConfig(format!("duplicate state `{dup}`")));
        }
        Ok(Self {
            states,
            representatives,
            divisor,
            constants,
            g_max,
        })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn representatives(&self) -> u32 {
        self.representatives
    }

    pub fn divisor(&self) -> Divisor {
        self.divisor
    }

    pub fn constants(&self) -> &[f64] {
        &self.constants
    }

    pub fn g_max(&self) -> u32 {
        self.g_max
    }

    pub fn state_index(&self, name: &str) -> Result<usize> {
        self.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::Input(format!("unknown state `{name}`")))
    }
}

/// One household as seen by the census and, if surveyed, the PES.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Household {
    pub id: String,
    pub state: usize,
    pub census_count: u32,
    /// Residents according to the PES; present only for surveyed households.
    pub pes_count: Option<u32>,
    /// Whether the household is on the list the PES sample was drawn from.
    pub in_pes_frame: bool,
}

impl Household {
    pub fn surveyed(&self) -> bool {
        self.pes_count.is_some()
    }
}

/// Checks states, the residents bound and that only frame households carry
/// PES counts.
pub fn validate_households(model: &CensusModel, households: &[Household]) -> Result<()> {
    for h in households {
        if h.state >= model.num_states() {
            return Err(Error::Input(format!("household `{}` has unknown state {}", h.id, h.state)));
        }
        for count in std::iter::once(h.census_count).chain(h.pes_count) {
            if count > model.g_max {
                return Err(Error::HouseholdOverflow {
                    id: h.id.clone(),
                    count,
                    g_max: model.g_max,
                });
            }
        }
        if h.surveyed() && !h.in_pes_frame {
            return Err(Error::Input(format!("household `{}` was surveyed but is not in the PES frame", h.id)));
        }
    }
    Ok(())
}

/// Residents per state according to the census.
pub fn census_populations(model: &CensusModel, households: &[Household]) -> Vec<u64> {
    let mut pops = vec![0u64; model.num_states()];
    for h in households {
        pops[h.state] += u64::from(h.census_count);
    }
    pops
}

/// Representatives per state for the given populations.
pub fn apportion(model: &CensusModel, populations: &[u64]) -> Result<Vec<u32>> {
    if populations.len() != model.num_states() {
        return Err(Error::InvalidConfig(format!(
            "{} populations for {} states",
            populations.len(),
            model.num_states()
        )));
    }
    let weights: Vec<f64> = populations
        .iter()
        .zip(&model.constants)
        .map(|(&p, &c)| p as f64 + c)
        .collect();
    if let Some(i) = weights.iter().position(|&w| w <= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "state `{}` has non-positive adjusted population",
            model.states[i]
        )));
    }
    highest_averages(&weights, model.representatives, model.divisor).map_err(|_| Error::ApportionmentTie)
}
