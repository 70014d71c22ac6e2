//! Assorters: non-negative scores over ballot types.
//!
//! An assertion holds when the mean of its assorter over all ballots is
//! strictly above one half. A mean of exactly one half counts as false.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::contest::{BallotType, Contest, Tally};
use crate::error::{Error, Result};

/// Exact rational from a numerator and denominator.
pub fn ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn half() -> BigRational {
    ratio(1, 2)
}

/// Exact conversion of a finite `f64` to a rational.
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::InvalidConfig(format!("{x} is not a finite number")))
}

pub(crate) fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// A scoring function over the ballot types of one contest.
///
/// Values are held exactly; a binary64 copy is cached for the sequential
/// tests, which run in floating point.
#[derive(Clone, Debug)]
pub struct Assorter {
    values: Vec<BigRational>,
    upper: BigRational,
    label: String,
    values_f64: Vec<f64>,
    upper_f64: f64,
}

impl Assorter {
    /// Builds an assorter from one value per contest ballot type.
    pub fn new(
        contest: &Contest,
        values: Vec<BigRational>,
        upper: BigRational,
        label: impl Into<String>,
    ) -> Result<Self> {
        let label = label.into();
        if values.len() != contest.len() {
            return Err(Error::InvalidAssorter(format!(
                "`{label}` has {} values for {} ballot types",
                values.len(),
                contest.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| v.is_negative()) {
            return Err(Error::InvalidAssorter(format!("`{label}` has negative value {v}")));
        }
        if !upper.is_positive() || values.iter().any(|v| v > &upper) {
            return Err(Error::InvalidAssorter(format!(
                "`{label}` upper bound {upper} is not a positive bound on its values"
            )));
        }
        let values_f64 = values.iter().map(to_f64).collect();
        let upper_f64 = to_f64(&upper);
        Ok(Self {
            values,
            upper,
            label,
            values_f64,
            upper_f64,
        })
    }

    /// Builds an assorter whose upper bound is its largest value.
    pub fn with_max_upper(contest: &Contest, values: Vec<BigRational>, label: impl Into<String>) -> Result<Self> {
        let upper = values.iter().max().cloned().unwrap_or_else(BigRational::zero);
        Self::new(contest, values, upper, label)
    }

    pub fn value(&self, t: BallotType) -> &BigRational {
        &self.values[t.index()]
    }

    pub fn value_f64(&self, t: BallotType) -> f64 {
        self.values_f64[t.index()]
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn values_f64(&self) -> &[f64] {
        &self.values_f64
    }

    pub fn upper(&self) -> &BigRational {
        &self.upper
    }

    pub fn upper_f64(&self) -> f64 {
        self.upper_f64
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn max_value(&self) -> &BigRational {
        self.values.iter().max().expect("contest always has an invalid type")
    }

    /// Mean over a tally in floating point. Returns NaN for an empty tally.
    pub fn mean_f64(&self, tally: &Tally) -> f64 {
        let sum: f64 = tally
            .counts()
            .iter()
            .zip(&self.values_f64)
            .map(|(&c, v)| c as f64 * v)
            .sum();
        sum / tally.total() as f64
    }

    /// Sum of values over a tally, exactly.
    pub fn total(&self, tally: &Tally) -> BigRational {
        let mut sum = BigRational::zero();
        for (&c, v) in tally.counts().iter().zip(&self.values) {
            if c > 0 {
                sum += v * BigRational::from_integer(BigInt::from(c));
            }
        }
        sum
    }

    /// Whether the assertion "mean > 1/2" holds on the tally.
    pub fn holds(&self, tally: &Tally) -> bool {
        tally.total() > 0 && assorter_mean(self, tally).map(|m| m > half()).unwrap_or(false)
    }
}

/// Exact mean of an assorter over a tally.
pub fn assorter_mean(a: &Assorter, t: &Tally) -> Result<BigRational> {
    if t.total() == 0 {
        return Err(Error::EmptyContest);
    }
    if t.counts().len() != a.values.len() {
        return Err(Error::TallyMismatch("tally and assorter cover different contests".into()));
    }
    Ok(a.total(t) / BigRational::from_integer(BigInt::from(t.total())))
}

/// The inequality `Σ β_c · v(c) > d` over tallies with `n` ballots.
#[derive(Clone, Debug)]
pub struct LinearInequality {
    coefficients: Vec<BigRational>,
    rhs: BigRational,
    n: u64,
}

impl LinearInequality {
    pub fn new(contest: &Contest, coefficients: Vec<BigRational>, rhs: BigRational, n: u64) -> Result<Self> {
        if coefficients.len() != contest.len() {
            return Err(Error::InvalidAssorter(format!(
                "{} coefficients for {} ballot types",
                coefficients.len(),
                contest.len()
            )));
        }
        if coefficients.iter().all(Zero::is_zero) {
            return Err(Error::InvalidAssorter("all coefficients are zero".into()));
        }
        if n == 0 {
            return Err(Error::EmptyContest);
        }
        Ok(Self { coefficients, rhs, n })
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coefficients
    }

    pub fn rhs(&self) -> &BigRational {
        &self.rhs
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn lhs(&self, tally: &Tally) -> BigRational {
        let mut sum = BigRational::zero();
        for (&c, b) in tally.counts().iter().zip(&self.coefficients) {
            sum += b * BigRational::from_integer(BigInt::from(c));
        }
        sum
    }

    pub fn holds(&self, tally: &Tally) -> bool {
        self.lhs(tally) > self.rhs
    }
}

/// Converts a linear inequality into an equivalent assorter.
///
/// With `z` the smallest coefficient, the assorter is
/// `a(b) = -(β_b - z) / (2(z - d/n))`, whose mean exceeds one half exactly
/// when the inequality holds on a tally of `n` ballots.
///
/// When `z = d/n` the inequality says some ballot has `β_b > z`, and the
/// assorter is `1/2 + (β_b - z) / (2 (max β - z))`. When `z > d/n`, or all
/// coefficients are equal, the inequality is constant over tallies and
/// [`Error::TrivialInequality`] is returned.
pub fn inequality_to_assorter(contest: &Contest, q: &LinearInequality, label: impl Into<String>) -> Result<Assorter> {
    let z = q.coefficients.iter().min().expect("non-empty").clone();
    let gap = &z - &q.rhs / BigRational::from_integer(BigInt::from(q.n));
    let top = q.coefficients.iter().max().expect("non-empty") - &z;
    if top.is_zero() {
        // Every tally gives the same left-hand side `z·n`.
        return Err(Error::TrivialInequality(to_f64(&gap)));
    }
    if gap.is_zero() {
        let scale = BigRational::from_integer(BigInt::from(2)) * top;
        let values: Vec<_> = q.coefficients.iter().map(|b| half() + (b - &z) / &scale).collect();
        return Assorter::with_max_upper(contest, values, label);
    }
    if gap.is_positive() {
        return Err(Error::TrivialInequality(to_f64(&gap)));
    }
    let denom = BigRational::from_integer(BigInt::from(-2)) * gap;
    let values: Vec<_> = q.coefficients.iter().map(|b| (b - &z) / &denom).collect();
    Assorter::with_max_upper(contest, values, label)
}

/// Plurality assorter: 1 for the winner, 0 for the loser, 1/2 otherwise.
pub fn plurality_assorter(contest: &Contest, winner: BallotType, loser: BallotType) -> Result<Assorter> {
    if winner == loser {
        return Err(Error::SameCandidate);
    }
    let values = contest
        .ballot_types()
        .map(|t| {
            if t == winner {
                BigRational::one()
            } else if t == loser {
                BigRational::zero()
            } else {
                half()
            }
        })
        .collect();
    let label = format!("{}>{}", contest.name(winner), contest.name(loser));
    Assorter::new(contest, values, BigRational::one(), label)
}

/// Fewest single-ballot relabels that bring the assorter mean over `truth`
/// down to at most one half, keeping the ballot count fixed.
///
/// Ballots are moved greedily from the highest-valued types to the
/// lowest-valued type. Returns `Some(0)` when the assertion is already false
/// and `None` when no relabelling can falsify it (every value exceeds 1/2).
pub fn assertion_margin(a: &Assorter, truth: &Tally) -> Option<u64> {
    if truth.total() == 0 {
        return Some(0);
    }
    let n = BigRational::from_integer(BigInt::from(truth.total()));
    let mut excess = a.total(truth) - n * half();
    if !excess.is_positive() {
        return Some(0);
    }
    let floor = a.values.iter().min().expect("non-empty").clone();
    let mut order: Vec<usize> = (0..a.values.len()).collect();
    order.sort_by(|&i, &j| a.values[j].cmp(&a.values[i]));
    let mut moved = 0u64;
    for i in order {
        let gain = &a.values[i] - &floor;
        let count = truth.counts()[i];
        if !gain.is_positive() || count == 0 {
            continue;
        }
        let need = (&excess / &gain).ceil().to_integer();
        let need = need.to_u64().unwrap_or(u64::MAX);
        if need <= count {
            return Some(moved + need);
        }
        moved += count;
        excess -= gain * BigRational::from_integer(BigInt::from(count));
    }
    None
}
