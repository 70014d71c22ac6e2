use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::alpha::betting_factor_census_form;
use crate::census::assorter::PairAssorter;
use crate::census::model::{apportion, census_populations, validate_households, CensusModel, Household};
use crate::census::sampler::HouseholdSampler;
use crate::error::{Error, Result};

/// PES count used for a sampled household outside the PES frame.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnframedScoring {
    /// Trust the census count (no discrepancy).
    #[default]
    AsCensus,
    /// Assume nobody lives there.
    AsZero,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CensusAuditConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub unframed: UnframedScoring,
}

impl Default for CensusAuditConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-9,
            delta: 1e-10,
            unframed: UnframedScoring::AsCensus,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairStatus {
    /// Tested on the sample; risk is `1/T_max`.
    Audited,
    /// The sample alone proves the inequality.
    Certain,
    /// The census' own counts contradict the inequality (margin ≤ 0).
    Refuted,
    /// `s1` holds no seat, so there is nothing to check.
    Vacuous,
    /// The state constants alone decide the inequality.
    Trivial,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairRisk {
    pub s1: usize,
    pub s2: usize,
    pub risk: f64,
    pub status: PairStatus,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CensusOutcome {
    /// Largest risk limit over all pairs, capped at 1.
    pub risk_limit: f64,
    pub pairs: Vec<PairRisk>,
    /// Per state, the largest risk over pairs that involve it.
    pub state_risk: Vec<f64>,
    pub census_seats: Vec<u32>,
    pub households_sampled: u64,
}

struct PairState {
    pair: PairAssorter,
    t: f64,
    t_max: f64,
    mu: f64,
    eta: f64,
    u: f64,
    sum: f64,
    active: bool,
}

/// Runs the census RLA and reports the smallest risk limit at which the
/// census apportionment can be approved.
///
/// Households are drawn with [`HouseholdSampler`] until every surveyed
/// household has been seen. Each ordered state pair keeps its own test
/// statistic `T` and records its maximum; the pair's risk is `1/T_max`.
pub fn census_rla<R: Rng + ?Sized>(
    model: &CensusModel,
    households: &[Household],
    cfg: &CensusAuditConfig,
    rng: &mut R,
) -> Result<CensusOutcome> {
    validate_households(model, households)?;
    if !(cfg.delta > 0.0 && cfg.epsilon > 0.0) {
        return Err(Error::InvalidConfig("delta and epsilon must be positive".into()));
    }
    if households.is_empty() {
        return Err(Error::EmptyContest);
    }
    let census_seats = apportion(model, &census_populations(model, households))?;
    let k = model.num_states();
    let mut pairs = Vec::new();
    let mut fixed = Vec::new();
    for s1 in 0..k {
        for s2 in 0..k {
            if s1 == s2 {
                continue;
            }
            match PairAssorter::new(model, s1, s2, &census_seats, households) {
                Ok(pair) if pair.margin() <= 0.0 => fixed.push(PairRisk {
                    s1,
                    s2,
                    risk: 1.0,
                    status: PairStatus::Refuted,
                }),
                Ok(pair) => pairs.push(PairState {
                    t: 1.0,
                    t_max: 1.0,
                    mu: 0.5,
                    eta: pair.eta0(),
                    u: pair.upper0(cfg.delta),
                    sum: 0.0,
                    active: true,
                    pair,
                }),
                Err(Error::InvalidAssorter(_)) => fixed.push(PairRisk {
                    s1,
                    s2,
                    risk: 0.0,
                    status: PairStatus::Vacuous,
                }),
                Err(Error::DegeneratePair { .. }) => fixed.push(PairRisk {
                    s1,
                    s2,
                    risk: 0.0,
                    status: PairStatus::Trivial,
                }),
                Err(e) => return Err(e),
            }
        }
    }

    let n = households.len() as f64;
    let mut sampler = HouseholdSampler::new(households);
    let mut sampled = 0u64;
    while sampler.has_surveyed_remaining() && pairs.iter().any(|p| p.active) {
        let h = &households[sampler.sample_household(rng)?];
        sampled += 1;
        let pes = match (h.pes_count, cfg.unframed) {
            (Some(g), _) => g,
            (None, UnframedScoring::AsCensus) => h.census_count,
            (None, UnframedScoring::AsZero) => 0,
        };
        let unseen = sampler.remaining() as f64;
        for p in pairs.iter_mut().filter(|p| p.active) {
            let a = p.pair.comparison(h.state, h.census_count, pes);
            p.t *= betting_factor_census_form(a, p.mu, p.eta, p.u);
            p.t_max = p.t_max.max(p.t);
            p.sum += a;
            if unseen == 0.0 {
                continue;
            }
            p.mu = (n / 2.0 - p.sum) / unseen;
            p.eta = p.pair.eta0().max(p.mu + cfg.epsilon);
            p.u = p.u.max(p.eta + cfg.epsilon);
            if p.mu < 0.0 {
                p.t_max = f64::INFINITY;
                p.active = false;
            }
        }
    }

    let mut all: Vec<PairRisk> = pairs
        .iter()
        .map(|p| PairRisk {
            s1: p.pair.s1,
            s2: p.pair.s2,
            risk: (1.0 / p.t_max).min(1.0),
            status: if p.t_max.is_infinite() {
                PairStatus::Certain
            } else {
                PairStatus::Audited
            },
        })
        .chain(fixed)
        .collect();
    all.sort_by_key(|p| (p.s1, p.s2));
    let mut state_risk = vec![0.0f64; k];
    for p in &all {
        state_risk[p.s1] = state_risk[p.s1].max(p.risk);
        state_risk[p.s2] = state_risk[p.s2].max(p.risk);
    }
    let risk_limit = all.iter().map(|p| p.risk).fold(0.0, f64::max);
    Ok(CensusOutcome {
        risk_limit,
        pairs: all,
        state_risk,
        census_seats,
        households_sampled: sampled,
    })
}
