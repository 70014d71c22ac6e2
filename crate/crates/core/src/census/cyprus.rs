//! Synthetic household data for a district-level apportionment.
//!
//! Only district totals are public, so households are generated: each
//! district gets `round(pop / E[residents])` households whose sizes are drawn
//! from a residents-per-household distribution, a share of households is
//! recorded as empty (non-response), and each district's constant `c_s` is
//! set to the real population minus the generated one. The generated census
//! therefore apportions exactly like the real one.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index::sample;
use rand::Rng;
use serde::Deserialize;

use crate::census::model::{apportion, CensusModel, Household};
use crate::error::{Error, Result};
use crate::highest_averages::Divisor;

/// A district's real population and, optionally, a fixed constant `c_s`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct District {
    pub district: String,
    pub population: u64,
    #[serde(default)]
    pub c_constant: Option<f64>,
}

/// Probability of each household size `0..=g_max`.
#[derive(Clone, Debug)]
pub struct HouseholdDistribution {
    probs: Vec<f64>,
    sampler: WeightedIndex<f64>,
}

impl HouseholdDistribution {
    /// Builds the distribution from `(residents, weight)` pairs; weights are
    /// normalised. Sizes above `g_max` are rejected.
    pub fn new(entries: &[(u32, f64)], g_max: u32) -> Result<Self> {
        let mut probs = vec![0.0; g_max as usize + 1];
        for &(k, w) in entries {
            if k > g_max {
                return Err(Error::InvalidConfig(format!("household size {k} exceeds g_max {g_max}")));
            }
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::InvalidConfig(format!("bad weight {w} for size {k}")));
            }
            probs[k as usize] += w;
        }
        let total: f64 = probs.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidConfig("household distribution has no mass".into()));
        }
        probs.iter_mut().for_each(|p| *p /= total);
        let sampler = WeightedIndex::new(&probs).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        Ok(Self { probs, sampler })
    }

    /// Every household has exactly `k` residents.
    pub fn point(k: u32, g_max: u32) -> Result<Self> {
        Self::new(&[(k, 1.0)], g_max)
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        self.sampler.sample(rng) as u32
    }
}

/// A generated census with the full PES it would be checked against.
#[derive(Clone, Debug)]
pub struct GeneratedCensus {
    pub model: CensusModel,
    /// Census households; none carries a PES count yet.
    pub households: Vec<Household>,
    /// What a PES surveying every household would find.
    pub full_pes: Vec<u32>,
    /// Apportionment of the real district populations.
    pub real_seats: Vec<u32>,
}

impl GeneratedCensus {
    /// Apportionment a complete PES would produce.
    pub fn full_pes_seats(&self) -> Result<Vec<u32>> {
        let mut pops = vec![0u64; self.model.num_states()];
        for (h, &g) in self.households.iter().zip(&self.full_pes) {
            pops[h.state] += u64::from(g);
        }
        apportion(&self.model, &pops)
    }

    /// Redraws the PES count of `round(rate·|H|)` uniformly chosen households.
    pub fn inject_disagreement<R: Rng + ?Sized>(&mut self, rate: f64, dist: &HouseholdDistribution, rng: &mut R) {
        let n = self.households.len();
        let k = ((rate.clamp(0.0, 1.0) * n as f64).round() as usize).min(n);
        for i in sample(rng, n, k) {
            self.full_pes[i] = dist.sample(rng);
        }
    }

    /// Households with PES results for a uniform sample of
    /// `round(fraction·|H|)` of them. Every household is in the PES frame.
    pub fn survey<R: Rng + ?Sized>(&self, fraction: f64, rng: &mut R) -> Vec<Household> {
        let n = self.households.len();
        let k = ((fraction.clamp(0.0, 1.0) * n as f64).round() as usize).min(n);
        let mut out = self.households.clone();
        for i in sample(rng, n, k) {
            out[i].pes_count = Some(self.full_pes[i]);
        }
        out
    }
}

/// Parameters of the generated apportionment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenerationParams {
    pub representatives: u32,
    pub divisor: Divisor,
    pub g_max: u32,
    /// Share of households recorded with no residents.
    pub nonresponse: f64,
}

impl Default for GenerationParams {
    fn default() -> Self {
        Self {
            representatives: 56,
            divisor: Divisor::DHondt,
            g_max: 15,
            nonresponse: 0.01,
        }
    }
}

/// Generates households for each district; see the module docs.
pub fn generate_cyprus_data<R: Rng + ?Sized>(
    districts: &[District],
    dist: &HouseholdDistribution,
    params: &GenerationParams,
    rng: &mut R,
) -> Result<GeneratedCensus> {
    if !(0.0..1.0).contains(&params.nonresponse) {
        return Err(Error::InvalidConfig(format!("nonresponse {} is not in [0, 1)", params.nonresponse)));
    }
    if dist.probabilities().len() != params.g_max as usize + 1 {
        return Err(Error::InvalidConfig("distribution support does not match g_max".into()));
    }
    let mean = dist.mean();
    if mean <= 0.0 {
        return Err(Error::InvalidConfig("mean household size is zero".into()));
    }
    let mut households = Vec::new();
    let mut constants = Vec::with_capacity(districts.len());
    for (s, d) in districts.iter().enumerate() {
        let count = (d.population as f64 / mean).round() as u64;
        let mut generated = 0u64;
        for i in 0..count {
            let mut g = dist.sample(rng);
            if rng.random::<f64>() < params.nonresponse {
                g = 0;
            }
            generated += u64::from(g);
            households.push(Household {
                id: format!("{}-{i}", d.district),
                state: s,
                census_count: g,
                pes_count: None,
                in_pes_frame: true,
            });
        }
        constants.push(d.c_constant.unwrap_or(d.population as f64 - generated as f64));
    }
    let model = CensusModel::new(
        districts.iter().map(|d| d.district.clone()).collect(),
        params.representatives,
        params.divisor,
        constants,
        params.g_max,
    )?;
    let real_model = CensusModel::new(
        model.states().to_vec(),
        params.representatives,
        params.divisor,
        vec![0.0; districts.len()],
        params.g_max,
    )?;
    let real_seats = apportion(&real_model, &districts.iter().map(|d| d.population).collect::<Vec<_>>())?;
    let full_pes = households.iter().map(|h| h.census_count).collect();
    Ok(GeneratedCensus {
        model,
        households,
        full_pes,
        real_seats,
    })
}
