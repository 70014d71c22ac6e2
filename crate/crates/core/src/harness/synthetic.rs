//! Synthetic batch-level elections.
//!
//! Batch sizes are uniform on `[min_size, max_size]`. Each batch's vote
//! shares are a Dirichlet draw around the national shares (larger
//! `concentration` means less variation between batches), and counts are a
//! multinomial draw from those shares. Tallies come out accurate; misreads
//! are added separately.

use rand::Rng;
use rand_distr::{Binomial, Distribution, Gamma};
use serde::Deserialize;

use crate::batch::BatchRecord;
use crate::contest::{Contest, Tally};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct PartyShare {
    pub name: String,
    pub share: f64,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticElection {
    pub parties: Vec<PartyShare>,
    #[serde(default)]
    pub invalid_share: f64,
    pub batches: usize,
    #[serde(default = "default_min")]
    pub min_size: u64,
    #[serde(default = "default_max")]
    pub max_size: u64,
    #[serde(default = "default_concentration")]
    pub concentration: f64,
}

fn default_min() -> u64 {
    250
}

fn default_max() -> u64 {
    550
}

fn default_concentration() -> f64 {
    200.0
}

impl SyntheticElection {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.parties.is_empty() {
            return bad("synthetic election has no parties".into());
        }
        if self.batches == 0 {
            return Err(Error::NoBatches);
        }
        if self.min_size == 0 || self.min_size > self.max_size {
            return bad(format!("bad batch size range {}..={}", self.min_size, self.max_size));
        }
        if !(self.concentration > 0.0 && self.concentration.is_finite()) {
            return bad(format!("concentration {} is not positive", self.concentration));
        }
        for s in self.parties.iter().map(|p| p.share).chain([self.invalid_share]) {
            if !(s >= 0.0 && s.is_finite()) {
                return bad(format!("bad share {s}"));
            }
        }
        if self.shares().iter().sum::<f64>() <= 0.0 {
            return bad("all shares are zero".into());
        }
        Ok(())
    }

    /// Shares per ballot type in contest order, invalid last.
    fn shares(&self) -> Vec<f64> {
        self.parties.iter().map(|p| p.share).chain([self.invalid_share]).collect()
    }
}

/// Draws multinomial counts for `n` trials with probabilities `p` (which
/// need not be normalised), by successive binomials.
pub fn multinomial<R: Rng + ?Sized>(n: u64, p: &[f64], rng: &mut R) -> Vec<u64> {
    let mut left = n;
    let mut mass: f64 = p.iter().sum();
    let mut out = Vec::with_capacity(p.len());
    for (i, &pi) in p.iter().enumerate() {
        let k = if i + 1 == p.len() || left == 0 {
            left
        } else if mass <= 0.0 {
            0
        } else {
            let q = (pi / mass).clamp(0.0, 1.0);
            Binomial::new(left, q).expect("clamped").sample(rng)
        };
        out.push(k);
        left -= k;
        mass -= pi;
    }
    out
}

/// Generates accurately reported batches; ids are `b1`, `b2`, ...
pub fn generate_batches<R: Rng + ?Sized>(spec: &SyntheticElection, rng: &mut R) -> Result<(Contest, Vec<BatchRecord>)> {
    spec.validate()?;
    let contest = Contest::new(spec.parties.iter().map(|p| p.name.clone()))?;
    let base = spec.shares();
    let total: f64 = base.iter().sum();
    let mut batches = Vec::with_capacity(spec.batches);
    for i in 0..spec.batches {
        let size = rng.random_range(spec.min_size..=spec.max_size);
        let shares: Vec<f64> = base
            .iter()
            .map(|&s| {
                if s == 0.0 {
                    0.0
                } else {
                    Gamma::new(spec.concentration * s / total, 1.0).expect("positive").sample(rng)
                }
            })
            .collect();
        let counts = multinomial(size, &shares, rng);
        let tally = Tally::from_counts(&contest, counts)?;
        batches.push(BatchRecord::accurate(format!("b{}", i + 1), tally));
    }
    Ok((contest, batches))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::rng_from_seed;

    fn spec() -> SyntheticElection {
        SyntheticElection {
            parties: vec![
                PartyShare { name: "A".into(), share: 0.55 },
                PartyShare { name: "B".into(), share: 0.45 },
            ],
            invalid_share: 0.01,
            batches: 40,
            min_size: 250,
            max_size: 550,
            concentration: 200.0,
        }
    }

    #[test]
    fn batches_in_range_and_accurate() {
        let (c, b) = generate_batches(&spec(), &mut rng_from_seed(1)).unwrap();
        assert_eq!(b.len(), 40);
        assert_eq!(c.num_parties(), 2);
        for x in &b {
            assert!((250..=550).contains(&x.size()));
            assert_eq!(x.reported, x.truth);
        }
    }

    #[test]
    fn multinomial_sums_to_n() {
        let mut rng = rng_from_seed(2);
        for n in [0, 1, 17, 1000] {
            assert_eq!(multinomial(n, &[0.2, 0.0, 0.5, 0.3], &mut rng).iter().sum::<u64>(), n);
        }
        assert_eq!(multinomial(10, &[0.0, 1.0, 0.0], &mut rng), vec![0, 10, 0]);
    }

    #[test]
    fn bad_range_rejected() {
        let mut s = spec();
        s.min_size = 600;
        assert!(generate_batches(&s, &mut rng_from_seed(1)).is_err());
    }
}
