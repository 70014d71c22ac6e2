use rand::Rng;

use crate::census::model::Household;
use crate::error::{Error, Result};

/// Draws unsampled households so that, to an auditor who does not know which
/// households the PES surveyed, each draw looks uniform over all unsampled
/// households.
///
/// With probability `|frame ∩ unsampled| / |unsampled|` it returns a uniform
/// unsampled surveyed household, and otherwise a uniform unsampled household
/// outside the PES frame. Frame households the PES skipped are never drawn.
#[derive(Clone, Debug)]
pub struct HouseholdSampler {
    surveyed: Vec<usize>,
    unframed: Vec<usize>,
    frame_remaining: u64,
    remaining: u64,
}

impl HouseholdSampler {
    pub fn new(households: &[Household]) -> Self {
        let mut surveyed = Vec::new();
        let mut unframed = Vec::new();
        let mut frame = 0u64;
        for (i, h) in households.iter().enumerate() {
            if h.in_pes_frame {
                frame += 1;
                if h.surveyed() {
                    surveyed.push(i);
                }
            } else {
                unframed.push(i);
            }
        }
        Self {
            surveyed,
            unframed,
            frame_remaining: frame,
            remaining: households.len() as u64,
        }
    }

    /// Households not yet sampled, surveyed or not.
    pub fn remaining(&self) -> u64 {
        self.remaining
    }

    pub fn has_surveyed_remaining(&self) -> bool {
        !self.surveyed.is_empty()
    }

    /// Draws and removes one household, returning its index.
    pub fn sample_household<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<usize> {
        if self.remaining == 0 {
            return Err(Error::SamplingFrameExhausted);
        }
        let p_frame = self.frame_remaining as f64 / self.remaining as f64;
        let from_frame = rng.random::<f64>() < p_frame;
        let pool = if from_frame { &mut self.surveyed } else { &mut self.unframed };
        if pool.is_empty() {
            return Err(Error::SamplingFrameExhausted);
        }
        let pick = pool.swap_remove(rng.random_range(0..pool.len()));
        if from_frame {
            self.frame_remaining -= 1;
        }
        self.remaining -= 1;
        Ok(pick)
    }
}
