//! Batchcomp: a batch-level comparison audit.
//!
//! Each assorter `a` is wrapped into a batch-assorter scoring the gap between
//! a batch's true and reported mean of `a`:
//!
//! ```text
//! A(B) = 1/2 + (M + a_true(B) - a_rep(B)) / (2(w - M))
//! ```
//!
//! where `M` is the reported margin of `a` over all ballots and `w` the
//! largest reported batch mean. `A` is never negative, its size-weighted mean
//! exceeds 1/2 exactly when the mean of `a` does, and it is the same on every
//! accurately reported batch, which makes the audit indifferent to sampling
//! order when the count is right.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use crate::alpha::{holds_on_counts, AssertionState, AuditConfig, AuditOutcome, Engine, EtaRule, Status, UpdateRule};
use crate::assorter::{half, to_f64, Assorter};
use crate::batch::{validate_batches, BatchRecord};
use crate::contest::Tally;
use crate::error::{Error, Result};
use crate::sampling::{rng_from_seed, weighted_order};
use crate::trace::Trace;

/// Default `delta`: the gap between the accurate-batch score and `U`.
pub const DEFAULT_DELTA: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct BatchAssorter {
    base: Assorter,
    margin: f64,
    w: f64,
    delta: f64,
}

impl BatchAssorter {
    /// Wraps `base` for the given (padded) batches.
    ///
    /// Fails when the reported margin is not positive: the reported results
    /// then contradict the assertion themselves.
    pub fn new(base: Assorter, batches: &[BatchRecord], delta: f64) -> Result<Self> {
        let (margin, w) = reported_margin_and_max(&base, batches)?;
        if margin <= 0.0 {
            return Err(Error::InvalidAssorter(format!(
                "`{}` has non-positive reported margin {margin}",
                base.label()
            )));
        }
        Self::from_parts(base, margin, w, delta)
    }

    /// Builds a batch-assorter from a known margin `M` and maximum reported
    /// batch mean `w`. Requires `w > M > 0` and `delta > 0`.
    pub fn from_parts(base: Assorter, margin: f64, w: f64, delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::InvalidConfig(format!("delta {delta} is not positive")));
        }
        if !(w > margin && margin > 0.0) {
            return Err(Error::InvalidAssorter(format!(
                "`{}` needs w > M > 0, got w = {w}, M = {margin}",
                base.label()
            )));
        }
        Ok(Self { base, margin, w, delta })
    }

    pub fn base(&self) -> &Assorter {
        &self.base
    }

    /// Reported margin `M`: reported mean minus 1/2.
    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// Largest reported batch mean.
    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Score of any accurately reported batch.
    pub fn eta0(&self) -> f64 {
        0.5 + self.margin / (2.0 * (self.w - self.margin))
    }

    /// Initial `U`.
    pub fn upper0(&self) -> f64 {
        0.5 + (self.margin + self.delta) / (2.0 * (self.w - self.margin))
    }

    /// `A(B)` from the batch's true and reported means of the base assorter.
    pub fn value_from_means(&self, true_mean: f64, reported_mean: f64) -> f64 {
        0.5 + (self.margin + (true_mean - reported_mean)) / (2.0 * (self.w - self.margin))
    }
}

/// Reported margin and maximum reported batch mean, computed exactly and
/// rounded once.
fn reported_margin_and_max(base: &Assorter, batches: &[BatchRecord]) -> Result<(f64, f64)> {
    validate_batches(batches)?;
    let mut total = BigRational::from_integer(BigInt::from(0));
    let mut n = 0u64;
    let mut w: Option<BigRational> = None;
    for b in batches {
        let sum = base.total(&b.reported);
        let mean = &sum / BigRational::from_integer(BigInt::from(b.size()));
        if w.as_ref().is_none_or(|cur| &mean > cur) {
            w = Some(mean);
        }
        total += sum;
        n += b.size();
    }
    let margin = total / BigRational::from_integer(BigInt::from(n)) - half();
    Ok((to_f64(&margin), to_f64(&w.expect("validated non-empty"))))
}

/// `A(B)` for one batch.
pub fn batch_assorter_value(a: &BatchAssorter, batch: &BatchRecord) -> f64 {
    a.value_from_means(a.base.mean_f64(&batch.truth), a.base.mean_f64(&batch.reported))
}

/// The simplified update `T·A/mu`. A single zero-valued batch sends `T` to
/// zero for good; with honest counting that needs a batch whose every ballot
/// was misreported against the assertion.
pub fn batchcomp_simplified_step(t: f64, a_value: f64, mu: f64) -> f64 {
    if a_value == 0.0 {
        0.0
    } else {
        t * (a_value / mu)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BatchcompParams {
    pub delta: f64,
    pub update: UpdateRule,
}

impl Default for BatchcompParams {
    fn default() -> Self {
        Self {
            delta: DEFAULT_DELTA,
            update: UpdateRule::Alpha,
        }
    }
}

/// Batchcomp audit with sampling seeded by `cfg.seed`.
pub fn batchcomp_audit(batches: &[BatchRecord], assorters: &[Assorter], cfg: &AuditConfig, delta: f64) -> Result<AuditOutcome> {
    let params = BatchcompParams {
        delta,
        ..BatchcompParams::default()
    };
    batchcomp_audit_with(batches, assorters, cfg, &params, &mut rng_from_seed(cfg.seed), None)
}

/// Batchcomp audit with explicit parameters, generator and optional trace.
///
/// Batches are drawn with probability proportional to size, without
/// replacement. An assertion with non-positive reported margin is marked
/// refuted and forces a full recount.
pub fn batchcomp_audit_with<R: Rng + ?Sized>(
    batches: &[BatchRecord],
    assorters: &[Assorter],
    cfg: &AuditConfig,
    params: &BatchcompParams,
    rng: &mut R,
    trace: Option<&mut Trace>,
) -> Result<AuditOutcome> {
    cfg.validate()?;
    validate_batches(batches)?;
    if !(params.delta > 0.0) {
        return Err(Error::InvalidConfig(format!("delta {} is not positive", params.delta)));
    }
    let weights: Vec<u64> = batches.iter().map(BatchRecord::size).collect();
    let n: u64 = weights.iter().sum();
    let mut states = Vec::with_capacity(assorters.len());
    let mut eta_rules = Vec::with_capacity(assorters.len());
    let mut values: Vec<Vec<f64>> = Vec::with_capacity(assorters.len());
    for a in assorters {
        let (margin, w) = reported_margin_and_max(a, batches)?;
        if margin <= 0.0 {
            let mut s = AssertionState::new(0.5, 1.0);
            s.status = Status::Refuted;
            states.push(s);
            eta_rules.push(EtaRule::Floor { eta0: 0.5 });
            values.push(vec![0.0; batches.len()]);
            continue;
        }
        let ba = BatchAssorter::from_parts(a.clone(), margin, w, params.delta)?;
        states.push(AssertionState::new(ba.eta0(), ba.upper0()));
        eta_rules.push(EtaRule::Floor { eta0: ba.eta0() });
        values.push(batches.iter().map(|b| batch_assorter_value(&ba, b)).collect());
    }
    let truth = Tally::sum(batches.iter().map(|b| &b.truth)).expect("validated non-empty");
    let order = weighted_order(&weights, rng);
    let engine = Engine {
        labels: assorters.iter().map(Assorter::label).collect(),
        states,
        eta_rules,
        update: params.update,
        weights: &weights,
        n,
        cfg: *cfg,
    };
    Ok(engine.run(
        &order,
        |k, i| values[k][i],
        |k| holds_on_counts(&assorters[k], truth.counts()),
        trace,
    ))
}
