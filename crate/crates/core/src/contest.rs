//! Ballot types and vote tallies.
//!
//! A [`Contest`] fixes the closed set of ballot types a voter may cast: one
//! per party plus exactly one invalid type. Tallies and assorters are dense
//! vectors indexed by [`BallotType`], so every contest type always has an
//! entry, possibly zero.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

/// Row label reserved for invalid ballots in tally files.
pub const INVALID_LABEL: &str = "__invalid__";

/// Opaque handle for one ballot type of a [`Contest`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BallotType(usize);

impl BallotType {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BallotKind {
    Party(String),
    Invalid,
}

/// The closed set of ballot types of one contest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contest {
    kinds: Vec<BallotKind>,
}

impl Contest {
    /// Builds a contest from party names. The invalid type is appended last.
    pub fn new<I, S>(parties: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut seen = HashSet::new();
        let mut kinds = Vec::new();
        for name in parties {
            let name = name.into();
            if name == INVALID_LABEL || !seen.insert(name.clone()) {
                return Err(Error::DuplicateBallotType(name));
            }
            kinds.push(BallotKind::Party(name));
        }
        kinds.push(BallotKind::Invalid);
        Ok(Self { kinds })
    }

    /// Number of ballot types, the invalid type included.
    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn num_parties(&self) -> usize {
        self.kinds.len() - 1
    }

    pub fn invalid(&self) -> BallotType {
        BallotType(self.kinds.len() - 1)
    }

    pub fn ballot_types(&self) -> impl Iterator<Item = BallotType> + '_ {
        (0..self.kinds.len()).map(BallotType)
    }

    pub fn parties(&self) -> impl Iterator<Item = BallotType> + '_ {
        (0..self.kinds.len() - 1).map(BallotType)
    }

    pub fn kind(&self, t: BallotType) -> &BallotKind {
        &self.kinds[t.0]
    }

    pub fn is_invalid(&self, t: BallotType) -> bool {
        t == self.invalid()
    }

    pub fn name(&self, t: BallotType) -> &str {
        match &self.kinds[t.0] {
            BallotKind::Party(name) => name,
            BallotKind::Invalid => INVALID_LABEL,
        }
    }

    /// Looks up a ballot type by name; [`INVALID_LABEL`] names the invalid type.
    pub fn lookup(&self, name: &str) -> Result<BallotType> {
        if name == INVALID_LABEL {
            return Ok(self.invalid());
        }
        self.parties()
            .find(|&t| self.name(t) == name)
            .ok_or_else(|| Error::UnknownBallotType(name.to_string()))
    }

    /// Looks up a party by name, rejecting the invalid label.
    pub fn party(&self, name: &str) -> Result<BallotType> {
        let t = self.lookup(name)?;
        if self.is_invalid(t) {
            return Err(Error::UnknownBallotType(name.to_string()));
        }
        Ok(t)
    }
}

/// Vote counts over the ballot types of a contest.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tally {
    counts: Vec<u64>,
    total: u64,
}

impl Tally {
    pub fn zeros(contest: &Contest) -> Self {
        Self {
            counts: vec![0; contest.len()],
            total: 0,
        }
    }

    /// Builds a tally from counts listed in ballot-type order (invalid last).
    pub fn from_counts(contest: &Contest, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != contest.len() {
            return Err(Error::TallyMismatch(format!(
                "expected {} counts, got {}",
                contest.len(),
                counts.len()
            )));
        }
        let total = counts.iter().sum();
        Ok(Self { counts, total })
    }

    /// Builds a tally from `(name, count)` pairs. Names not in the contest are
    /// an error; contest types not mentioned get zero.
    pub fn from_named<'a, I>(contest: &Contest, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, u64)>,
    {
        let mut tally = Self::zeros(contest);
        for (name, count) in entries {
            tally.add(contest.lookup(name)?, count);
        }
        Ok(tally)
    }

    pub fn from_ballots(contest: &Contest, ballots: &[BallotType]) -> Self {
        let mut tally = Self::zeros(contest);
        for &b in ballots {
            tally.add(b, 1);
        }
        tally
    }

    pub fn get(&self, t: BallotType) -> u64 {
        self.counts[t.0]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of non-invalid ballots.
    pub fn valid(&self, contest: &Contest) -> u64 {
        self.total - self.get(contest.invalid())
    }

    pub fn add(&mut self, t: BallotType, count: u64) {
        self.counts[t.0] += count;
        self.total += count;
    }

    /// Moves `count` ballots from one type to another, keeping the total.
    pub fn relabel(&mut self, from: BallotType, to: BallotType, count: u64) {
        assert!(self.counts[from.0] >= count, "relabel more ballots than present");
        self.counts[from.0] -= count;
        self.counts[to.0] += count;
    }

    /// Element-wise sum of two tallies over the same contest.
    pub fn merged(&self, other: &Tally) -> Tally {
        assert_eq!(self.counts.len(), other.counts.len(), "tallies over different contests");
        Tally {
            counts: self.counts.iter().zip(&other.counts).map(|(a, b)| a + b).collect(),
            total: self.total + other.total,
        }
    }

    /// Expands the tally into one ballot per vote, in ballot-type order.
    pub fn to_ballots(&self) -> Vec<BallotType> {
        let mut out = Vec::with_capacity(self.total as usize);
        for (i, &c) in self.counts.iter().enumerate() {
            out.extend(std::iter::repeat_n(BallotType(i), c as usize));
        }
        out
    }

    /// Sums a sequence of tallies. Returns `None` for an empty sequence.
    pub fn sum<'a, I>(tallies: I) -> Option<Tally>
    where
        I: IntoIterator<Item = &'a Tally>,
    {
        let mut iter = tallies.into_iter();
        let first = iter.next()?.clone();
        Some(iter.fold(first, |acc, t| acc.merged(t)))
    }
}

impl fmt::Display for BallotType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invalid_is_last_and_unique() {
        let c = Contest::new(["Alice", "Bob"]).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.name(c.invalid()), INVALID_LABEL);
        assert_eq!(c.parties().count(), 2);
        assert!(Contest::new(["A", "A"]).is_err());
        assert!(Contest::new([INVALID_LABEL]).is_err());
    }

    #[test]
    fn unknown_names_are_rejected() {
        let c = Contest::new(["Alice", "Bob"]).unwrap();
        assert!(matches!(
            Tally::from_named(&c, [("Carol", 3)]),
            Err(Error::UnknownBallotType(_))
        ));
        assert!(c.party(INVALID_LABEL).is_err());
    }

    #[test]
    fn totals_track_counts() {
        let c = Contest::new(["Alice", "Bob"]).unwrap();
        let mut t = Tally::from_named(&c, [("Alice", 3), ("Bob", 1), (INVALID_LABEL, 2)]).unwrap();
        assert_eq!(t.total(), 6);
        assert_eq!(t.valid(&c), 4);
        t.relabel(c.party("Alice").unwrap(), c.invalid(), 2);
        assert_eq!(t.total(), 6);
        assert_eq!(t.get(c.invalid()), 4);
        let back = Tally::from_ballots(&c, &t.to_ballots());
        assert_eq!(back, t);
    }
}
