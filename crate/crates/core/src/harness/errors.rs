//! Error injection for simulations.
//!
//! Ballot misreads start from the true batch tallies and produce the
//! reported ones: each ballot is misread independently, and a misread ballot
//! is reported as invalid with some probability, otherwise as a party chosen
//! uniformly. Batch totals are preserved.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::Deserialize;

use crate::batch::BatchRecord;
use crate::contest::{Contest, Tally};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ErrorModel {
    /// Reported tallies are exact.
    #[default]
    None,
    /// Each ballot is misread with probability `p_misread`; a misread ballot
    /// becomes invalid with probability `p_invalid`, otherwise a uniformly
    /// chosen party.
    BallotMisread { p_misread: f64, p_invalid: f64 },
    /// The PES count of a `rate` share of households is redrawn.
    CensusDisagree { rate: f64 },
}

impl ErrorModel {
    pub fn validate(&self) -> Result<()> {
        let prob = |name: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} = {p} is not a probability")))
            }
        };
        match *self {
            ErrorModel::None => Ok(()),
            ErrorModel::BallotMisread { p_misread, p_invalid } => {
                prob("p_misread", p_misread)?;
                prob("p_invalid", p_invalid)
            }
            ErrorModel::CensusDisagree { rate } => prob("rate", rate),
        }
    }
}

/// Replaces every batch's reported tally with a misread copy of its truth.
pub fn inject_ballot_errors<R: Rng + ?Sized>(
    contest: &Contest,
    batches: &[BatchRecord],
    p_misread: f64,
    p_invalid: f64,
    rng: &mut R,
) -> Result<Vec<BatchRecord>> {
    ErrorModel::BallotMisread { p_misread, p_invalid }.validate()?;
    let parties: Vec<_> = contest.parties().collect();
    batches
        .iter()
        .map(|b| {
            let mut counts = b.truth.counts().to_vec();
            let mut moved = 0;
            for t in contest.ballot_types() {
                let m = Binomial::new(b.truth.get(t), p_misread).expect("validated").sample(rng);
                counts[t.index()] -= m;
                moved += m;
            }
            for _ in 0..moved {
                let dest = if parties.is_empty() || rng.random::<f64>() < p_invalid {
                    contest.invalid()
                } else {
                    parties[rng.random_range(0..parties.len())]
                };
                counts[dest.index()] += 1;
            }
            let reported = Tally::from_counts(contest, counts)?;
            BatchRecord::new(b.id.clone(), reported, b.truth.clone())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::rng_from_seed;

    #[test]
    fn totals_are_preserved() {
        let c = Contest::new(["A", "B", "C"]).unwrap();
        let truth = Tally::from_counts(&c, vec![200, 150, 100, 5]).unwrap();
        let batches = vec![BatchRecord::accurate("1", truth)];
        let out = inject_ballot_errors(&c, &batches, 0.2, 0.3, &mut rng_from_seed(4)).unwrap();
        assert_eq!(out[0].reported.total(), 455);
        assert_eq!(out[0].truth, batches[0].truth);
        assert_ne!(out[0].reported, out[0].truth);
    }

    #[test]
    fn zero_rate_is_identity() {
        let c = Contest::new(["A", "B"]).unwrap();
        let truth = Tally::from_counts(&c, vec![20, 15, 1]).unwrap();
        let batches = vec![BatchRecord::accurate("1", truth)];
        let out = inject_ballot_errors(&c, &batches, 0.0, 0.5, &mut rng_from_seed(4)).unwrap();
        assert_eq!(out, batches);
    }

    #[test]
    fn bad_probability_rejected() {
        assert!(ErrorModel::BallotMisread { p_misread: 1.5, p_invalid: 0.0 }.validate().is_err());
    }
}
