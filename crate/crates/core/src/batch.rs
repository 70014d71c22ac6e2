//! Batches of ballots with reported and true tallies.

use std::collections::HashSet;

use crate::contest::{Contest, Tally};
use crate::error::{Error, Result};

/// One batch of paper ballots: what was reported for it and what its ballots
/// actually say.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BatchRecord {
    pub id: String,
    pub reported: Tally,
    pub truth: Tally,
}

impl BatchRecord {
    /// Builds a batch whose reported and true tallies cover the same number
    /// of ballots. Use [`pad_missing_ballots`] when they differ.
    pub fn new(id: impl Into<String>, reported: Tally, truth: Tally) -> Result<Self> {
        let id = id.into();
        if reported.total() != truth.total() {
            return Err(Error::TallyMismatch(format!(
                "batch `{id}` reports {} ballots but holds {}; pad it to a declared size",
                reported.total(),
                truth.total()
            )));
        }
        Ok(Self { id, reported, truth })
    }

    /// Builds a batch without checking that the two tallies agree in size.
    pub fn unpadded(id: impl Into<String>, reported: Tally, truth: Tally) -> Self {
        Self {
            id: id.into(),
            reported,
            truth,
        }
    }

    /// A batch whose reported tally is exact.
    pub fn accurate(id: impl Into<String>, tally: Tally) -> Self {
        Self {
            id: id.into(),
            reported: tally.clone(),
            truth: tally,
        }
    }

    pub fn size(&self) -> u64 {
        self.reported.total().max(self.truth.total())
    }

    pub fn is_padded(&self) -> bool {
        self.reported.total() == self.truth.total()
    }
}

/// Pads both tallies of a batch with invalid ballots up to `declared_size`.
///
/// A ballot that is missing from either count is treated as an invalid one,
/// which is the worst case for every assertion that gives invalid ballots
/// one half.
pub fn pad_missing_ballots(contest: &Contest, batch: &BatchRecord, declared_size: u64) -> Result<BatchRecord> {
    let actual = batch.size();
    if declared_size < actual {
        return Err(Error::BatchOverflow {
            batch: batch.id.clone(),
            declared: declared_size,
            actual,
        });
    }
    let mut padded = batch.clone();
    padded.reported.add(contest.invalid(), declared_size - batch.reported.total());
    padded.truth.add(contest.invalid(), declared_size - batch.truth.total());
    Ok(padded)
}

/// Pads every batch to the larger of its two counts.
pub fn pad_to_larger_count(contest: &Contest, batches: &[BatchRecord]) -> Vec<BatchRecord> {
    batches
        .iter()
        .map(|b| pad_missing_ballots(contest, b, b.size()).expect("own size never overflows"))
        .collect()
}

/// Checks a batch list is non-empty, padded and has unique ids.
pub fn validate_batches(batches: &[BatchRecord]) -> Result<()> {
    if batches.is_empty() {
        return Err(Error::NoBatches);
    }
    let mut ids = HashSet::new();
    for b in batches {
        if !ids.insert(b.id.as_str()) {
            return Err(Error::DuplicateBatch(b.id.clone()));
        }
        if !b.is_padded() {
            return Err(Error::TallyMismatch(format!("batch `{}` is not padded", b.id)));
        }
        if b.size() == 0 {
            return Err(Error::TallyMismatch(format!("batch `{}` is empty", b.id)));
        }
    }
    Ok(())
}

/// Sum of reported tallies over all batches.
pub fn reported_total(contest: &Contest, batches: &[BatchRecord]) -> Tally {
    Tally::sum(batches.iter().map(|b| &b.reported)).unwrap_or_else(|| Tally::zeros(contest))
}

/// Sum of true tallies over all batches.
pub fn true_total(contest: &Contest, batches: &[BatchRecord]) -> Tally {
    Tally::sum(batches.iter().map(|b| &b.truth)).unwrap_or_else(|| Tally::zeros(contest))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn contest() -> Contest {
        Contest::new(["A", "B"]).unwrap()
    }

    fn tally(c: &Contest, a: u64, b: u64, inv: u64) -> Tally {
        Tally::from_counts(c, vec![a, b, inv]).unwrap()
    }

    #[test]
    fn short_truth_gets_invalid_ballots() {
        let c = contest();
        let batch = BatchRecord::unpadded("b1", tally(&c, 10, 5, 0), tally(&c, 7, 3, 0));
        let padded = pad_missing_ballots(&c, &batch, 15).unwrap();
        assert_eq!(padded.truth, tally(&c, 7, 3, 5));
        assert_eq!(padded.reported, batch.reported);
    }

    #[test]
    fn equal_sizes_are_unchanged() {
        let c = contest();
        let batch = BatchRecord::accurate("b1", tally(&c, 4, 4, 1));
        assert_eq!(pad_missing_ballots(&c, &batch, 9).unwrap(), batch);
    }

    #[test]
    fn both_sides_padded() {
        let c = contest();
        let batch = BatchRecord::unpadded("b1", tally(&c, 5, 2, 0), tally(&c, 5, 3, 1));
        let padded = pad_missing_ballots(&c, &batch, 10).unwrap();
        assert_eq!(padded.reported, tally(&c, 5, 2, 3));
        assert_eq!(padded.truth, tally(&c, 5, 3, 2));
        assert!(padded.is_padded());
    }

    #[test]
    fn overflow_is_rejected() {
        let c = contest();
        let batch = BatchRecord::unpadded("b1", tally(&c, 5, 2, 0), tally(&c, 5, 3, 1));
        assert!(matches!(
            pad_missing_ballots(&c, &batch, 8),
            Err(Error::BatchOverflow { declared: 8, actual: 9, .. })
        ));
    }

    #[test]
    fn validation_catches_duplicates_and_unpadded() {
        let c = contest();
        let b = BatchRecord::accurate("x", tally(&c, 1, 1, 0));
        assert!(matches!(validate_batches(&[]), Err(Error::NoBatches)));
        assert!(matches!(validate_batches(&[b.clone(), b.clone()]), Err(Error::DuplicateBatch(_))));
        let bad = BatchRecord::unpadded("y", tally(&c, 1, 1, 0), tally(&c, 1, 0, 0));
        assert!(validate_batches(&[b, bad]).is_err());
    }
}
