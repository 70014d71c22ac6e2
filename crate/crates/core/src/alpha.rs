//! The ALPHA martingale test.
//!
//! Each assertion keeps a test statistic `T`, the inverse of a p-value for
//! the null "the assorter mean is at most 1/2". After each sampled unit the
//! statistic is multiplied by a betting factor built from three guesses:
//! `mu`, the mean of the unseen units if the null were exactly true; `eta`,
//! the mean expected from the reported results; and `u`, which controls how
//! much a single unit can move `T`. The assertion is approved once
//! `T > 1/alpha`, or outright when `mu` falls below zero.
//!
//! Sampling is without replacement. The same engine drives ballot-level
//! audits, the ALPHA-batch baseline and Batchcomp, which differ only in the
//! sampling unit and in how `eta` is re-estimated.

use num_rational::BigRational;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::assorter::{assorter_mean, to_f64, Assorter};
use crate::batch::{validate_batches, BatchRecord};
use crate::contest::{BallotType, Tally};
use crate::error::{Error, Result};
use crate::sampling::{rng_from_seed, shuffled_indices, weighted_order};
use crate::trace::Trace;

/// Risk limit, guess-separation constant and root seed of an audit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AuditConfig {
    pub alpha: f64,
    /// Keeps `mu < eta < u` strict after each update.
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            epsilon: 1e-9,
            seed: 0,
        }
    }
}

impl AuditConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidConfig(format!("alpha {} is not in (0, 1]", self.alpha)));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidConfig(format!("epsilon {} is not positive", self.epsilon)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Active,
    /// `T` crossed `1/alpha`.
    Approved,
    /// `mu` fell below zero: the sampled units alone prove the assertion.
    Certain,
    /// The reported results already contradict the assertion.
    Refuted,
}

/// Sequential-test state of one assertion.
#[derive(Clone, Debug, PartialEq)]
pub struct AssertionState {
    pub t: f64,
    pub t_max: f64,
    pub mu: f64,
    pub eta: f64,
    pub u: f64,
    /// Running sum of observed values, each weighted by its unit size.
    pub cum_sum: f64,
    /// Ballots covered by the units observed so far.
    pub seen: u64,
    pub status: Status,
}

impl AssertionState {
    pub fn new(eta: f64, u: f64) -> Self {
        Self {
            t: 1.0,
            t_max: 1.0,
            mu: 0.5,
            eta,
            u,
            cum_sum: 0.0,
            seen: 0,
            status: Status::Active,
        }
    }

    pub fn is_active(&self) -> bool {
        self.status == Status::Active
    }

    pub fn is_approved(&self) -> bool {
        matches!(self.status, Status::Approved | Status::Certain)
    }
}

/// Betting factor of the ALPHA update:
/// `(a/mu)(eta-mu)/(u-mu) + (u-eta)/(u-mu)`.
///
/// At `mu = 0` the null leaves nothing for the unseen ballots, so any
/// positive value makes the factor infinite.
pub fn betting_factor(a: f64, mu: f64, eta: f64, u: f64) -> f64 {
    if mu == 0.0 {
        return if a > 0.0 { f64::INFINITY } else { (u - eta) / u };
    }
    (a / mu) * (eta - mu) / (u - mu) + (u - eta) / (u - mu)
}

/// The same factor written as `(1/u)(a·eta/mu + (u-a)(u-eta)/(u-mu))`.
pub fn betting_factor_census_form(a: f64, mu: f64, eta: f64, u: f64) -> f64 {
    if mu == 0.0 {
        return if a > 0.0 { f64::INFINITY } else { (u - eta) / u };
    }
    (a * eta / mu + (u - a) * (u - eta) / (u - mu)) / u
}

/// How `eta` is re-estimated after each unit.
#[derive(Clone, Copy, Debug)]
pub(crate) enum EtaRule {
    /// Mean of the unseen ballots if the reported mean is right.
    Reported { mean: f64 },
    /// Never below a fixed value: what an accurately reported unit scores.
    Floor { eta0: f64 },
}

/// How `T` is updated from an observed value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateRule {
    #[default]
    Alpha,
    /// `T ← T·a/mu`, ignoring `eta` and `u`.
    Simplified,
}

impl AssertionState {
    /// Observes one unit of `weight` ballots whose mean assorter value is
    /// `value`, out of a population of `n` ballots.
    pub(crate) fn observe(
        &mut self,
        value: f64,
        weight: u64,
        n: u64,
        cfg: &AuditConfig,
        eta_rule: EtaRule,
        update: UpdateRule,
    ) {
        if !self.is_active() {
            return;
        }
        let factor = match update {
            UpdateRule::Alpha => betting_factor(value, self.mu, self.eta, self.u),
            UpdateRule::Simplified => batchcomp_factor(value, self.mu),
        };
        self.t *= factor;
        self.t_max = self.t_max.max(self.t);
        self.cum_sum += weight as f64 * value;
        self.seen += weight;
        if self.t > 1.0 / cfg.alpha {
            self.status = Status::Approved;
            return;
        }
        if self.seen >= n {
            return;
        }
        let remaining = (n - self.seen) as f64;
        self.mu = (n as f64 / 2.0 - self.cum_sum) / remaining;
        if self.mu < 0.0 {
            self.status = Status::Certain;
            self.t_max = f64::INFINITY;
            return;
        }
        self.eta = match eta_rule {
            EtaRule::Reported { mean } => (self.mu + cfg.epsilon).max((n as f64 * mean - self.cum_sum) / remaining),
            EtaRule::Floor { eta0 } => eta0.max(self.mu + cfg.epsilon),
        };
        self.u = self.u.max(self.eta + cfg.epsilon);
    }
}

fn batchcomp_factor(a: f64, mu: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else if mu == 0.0 {
        f64::INFINITY
    } else {
        a / mu
    }
}

/// Initial state of each assertion: `T = 1`, `mu = 1/2`, `u` the assorter's
/// upper bound and `eta` its reported mean.
///
/// An assertion whose reported mean is at most 1/2 is marked
/// [`Status::Refuted`]: the reported results contradict it, so it can never
/// be approved and the audit ends in a full recount.
pub fn alpha_init(assorters: &[Assorter], reported: &Tally, n: u64, cfg: &AuditConfig) -> Result<Vec<AssertionState>> {
    cfg.validate()?;
    if n == 0 {
        return Err(Error::EmptyContest);
    }
    if reported.total() != n {
        return Err(Error::TallyMismatch(format!(
            "reported tally has {} ballots, audit covers {n}",
            reported.total()
        )));
    }
    assorters
        .iter()
        .map(|a| {
            let eta = to_f64(&assorter_mean(a, reported)?);
            let u = a.upper_f64();
            let mut state = AssertionState::new(eta, u);
            if eta <= 0.5 {
                state.status = Status::Refuted;
            } else if eta >= u {
                return Err(Error::DegenerateAssorter {
                    label: a.label().to_string(),
                    eta,
                    upper: u,
                });
            }
            Ok(state)
        })
        .collect()
}

/// One ALPHA update for a single ballot with assorter value `value`.
pub fn alpha_step(state: &AssertionState, value: f64, cfg: &AuditConfig, n: u64, reported_mean: f64) -> AssertionState {
    alpha_step_weighted(state, value, 1, cfg, n, reported_mean)
}

/// ALPHA update for a unit of `weight` ballots with mean value `value`.
pub fn alpha_step_weighted(
    state: &AssertionState,
    value: f64,
    weight: u64,
    cfg: &AuditConfig,
    n: u64,
    reported_mean: f64,
) -> AssertionState {
    let mut next = state.clone();
    next.observe(value, weight, n, cfg, EtaRule::Reported { mean: reported_mean }, UpdateRule::Alpha);
    next
}

/// Result of one assertion in an audit.
#[derive(Clone, Debug, PartialEq)]
pub struct AssertionOutcome {
    pub label: String,
    pub approved: bool,
    /// Approved because the sampled ballots alone prove the assertion.
    pub certain: bool,
    /// The reported results already contradicted the assertion.
    pub refuted: bool,
    /// Ballots examined when the assertion was settled, or all examined
    /// ballots if it never was.
    pub ballots_examined: u64,
    /// Sampling units (ballots or batches) examined, counted the same way.
    pub units_examined: u64,
    pub t_max: f64,
    /// Whether the assertion holds on the full count; known only after a
    /// full recount.
    pub holds_in_truth: Option<bool>,
}

impl AssertionOutcome {
    /// Smallest risk limit at which the evidence approves the assertion.
    pub fn risk(&self) -> f64 {
        (1.0 / self.t_max).min(1.0)
    }
}

/// Result of a whole audit.
#[derive(Clone, Debug, PartialEq)]
pub struct AuditOutcome {
    pub assertions: Vec<AssertionOutcome>,
    /// True iff every assertion was approved.
    pub approved: bool,
    /// Every unit was examined, so the true outcome is known directly.
    pub full_recount: bool,
    pub ballots_examined: u64,
    pub units_examined: u64,
    pub total_ballots: u64,
    pub total_units: u64,
}

/// Sequential test over sampling units drawn in `order`.
pub(crate) struct Engine<'a> {
    pub labels: Vec<&'a str>,
    pub states: Vec<AssertionState>,
    pub eta_rules: Vec<EtaRule>,
    pub update: UpdateRule,
    pub weights: &'a [u64],
    pub n: u64,
    pub cfg: AuditConfig,
}

impl Engine<'_> {
    /// Runs until every assertion is settled or units run out. `value(k, i)`
    /// is the mean value of assertion `k` on unit `i`; `truth(k)` reports
    /// whether assertion `k` holds on the full count.
    pub fn run(
        mut self,
        order: &[usize],
        value: impl Fn(usize, usize) -> f64,
        truth: impl Fn(usize) -> bool,
        mut trace: Option<&mut Trace>,
    ) -> AuditOutcome {
        let k_count = self.states.len();
        let mut settled_at: Vec<Option<(u64, u64)>> = vec![None; k_count];
        let mut ballots = 0u64;
        let mut units = 0u64;
        for (k, s) in self.states.iter().enumerate() {
            if s.status == Status::Refuted {
                settled_at[k] = Some((0, 0));
            }
        }
        for &i in order {
            if self.states.iter().all(|s| !s.is_active()) {
                break;
            }
            units += 1;
            ballots += self.weights[i];
            for k in 0..k_count {
                if !self.states[k].is_active() {
                    continue;
                }
                let v = value(k, i);
                self.states[k].observe(v, self.weights[i], self.n, &self.cfg, self.eta_rules[k], self.update);
                let s = &self.states[k];
                if let Some(tr) = trace.as_deref_mut() {
                    tr.push(units, self.labels[k], s.t, s.mu, s.eta, s.u);
                }
                if !s.is_active() {
                    settled_at[k] = Some((ballots, units));
                }
            }
        }
        let full_recount = self.states.iter().any(|s| !s.is_approved());
        let total_units = self.weights.len() as u64;
        let assertions = self
            .states
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let (b, u) = match (s.status, settled_at[k]) {
                    (Status::Refuted, _) | (_, None) => (ballots, units),
                    (_, Some(at)) => at,
                };
                AssertionOutcome {
                    label: self.labels[k].to_string(),
                    approved: s.is_approved(),
                    certain: s.status == Status::Certain,
                    refuted: s.status == Status::Refuted,
                    ballots_examined: b,
                    units_examined: u,
                    t_max: s.t_max,
                    holds_in_truth: full_recount.then(|| truth(k)),
                }
            })
            .collect();
        AuditOutcome {
            assertions,
            approved: !full_recount,
            full_recount,
            ballots_examined: if full_recount { self.n } else { ballots },
            units_examined: if full_recount { total_units } else { units },
            total_ballots: self.n,
            total_units,
        }
    }
}

/// Ballot-polling ALPHA audit over the full list of true ballots, sampled
/// without replacement in an order seeded by `cfg.seed`.
pub fn alpha_audit(
    ballots: &[BallotType],
    assorters: &[Assorter],
    reported: &Tally,
    cfg: &AuditConfig,
) -> Result<AuditOutcome> {
    alpha_audit_with(ballots, assorters, reported, cfg, &mut rng_from_seed(cfg.seed), None)
}

/// [`alpha_audit`] with an explicit generator and optional trace.
pub fn alpha_audit_with<R: Rng + ?Sized>(
    ballots: &[BallotType],
    assorters: &[Assorter],
    reported: &Tally,
    cfg: &AuditConfig,
    rng: &mut R,
    trace: Option<&mut Trace>,
) -> Result<AuditOutcome> {
    let n = ballots.len() as u64;
    let states = alpha_init(assorters, reported, n, cfg)?;
    let eta_rules = states.iter().map(|s| EtaRule::Reported { mean: s.eta }).collect();
    let weights = vec![1u64; ballots.len()];
    let order = shuffled_indices(ballots.len(), rng);
    let engine = Engine {
        labels: assorters.iter().map(Assorter::label).collect(),
        states,
        eta_rules,
        update: UpdateRule::Alpha,
        weights: &weights,
        n,
        cfg: *cfg,
    };
    let mut true_counts = vec![0u64; reported.counts().len()];
    for b in ballots {
        true_counts[b.index()] += 1;
    }
    Ok(engine.run(
        &order,
        |k, i| assorters[k].value_f64(ballots[i]),
        |k| holds_on_counts(&assorters[k], &true_counts),
        trace,
    ))
}

pub(crate) fn holds_on_counts(a: &Assorter, counts: &[u64]) -> bool {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return false;
    }
    // Compare Σ 2·a(c)·count(c) > n exactly.
    let int = |x: u64| BigRational::from_integer(x.into());
    let sum: BigRational = counts.iter().zip(a.values()).map(|(&c, v)| v * int(c)).sum();
    sum * int(2) > int(n)
}

/// ALPHA-batch baseline: batches are drawn with probability proportional to
/// size, without replacement, and each contributes its true assorter mean
/// weighted by its size.
pub fn alpha_batch_audit(batches: &[BatchRecord], assorters: &[Assorter], cfg: &AuditConfig) -> Result<AuditOutcome> {
    alpha_batch_audit_with(batches, assorters, cfg, &mut rng_from_seed(cfg.seed), None)
}

/// [`alpha_batch_audit`] with an explicit generator and optional trace.
pub fn alpha_batch_audit_with<R: Rng + ?Sized>(
    batches: &[BatchRecord],
    assorters: &[Assorter],
    cfg: &AuditConfig,
    rng: &mut R,
    trace: Option<&mut Trace>,
) -> Result<AuditOutcome> {
    validate_batches(batches)?;
    let reported = Tally::sum(batches.iter().map(|b| &b.reported)).expect("non-empty");
    let truth = Tally::sum(batches.iter().map(|b| &b.truth)).expect("non-empty");
    let n = reported.total();
    let states = alpha_init(assorters, &reported, n, cfg)?;
    let eta_rules = states.iter().map(|s| EtaRule::Reported { mean: s.eta }).collect();
    let weights: Vec<u64> = batches.iter().map(BatchRecord::size).collect();
    let order = weighted_order(&weights, rng);
    let means: Vec<Vec<f64>> = assorters
        .iter()
        .map(|a| batches.iter().map(|b| a.mean_f64(&b.truth)).collect())
        .collect();
    let engine = Engine {
        labels: assorters.iter().map(Assorter::label).collect(),
        states,
        eta_rules,
        update: UpdateRule::Alpha,
        weights: &weights,
        n,
        cfg: *cfg,
    };
    Ok(engine.run(
        &order,
        |k, i| means[k][i],
        |k| holds_on_counts(&assorters[k], truth.counts()),
        trace,
    ))
}
