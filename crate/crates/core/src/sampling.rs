//! Seeded randomness and sampling orders.
//!
//! Every random draw in the crate comes from [`ChaCha8Rng`]. A run with root
//! seed `s` uses `ChaCha8Rng::seed_from_u64(s)`; Monte Carlo trial `i` of
//! that run uses the same key with stream `i`, so trials are independent of
//! each other and of the order in which they are executed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The crate's pseudo-random generator.
pub type AuditRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> AuditRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for one Monte Carlo trial of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> AuditRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Independent sub-generator `sub` of trial `trial`: the trial's stream,
/// advanced to a block 2^48 words apart from every other sub-generator.
pub fn trial_substream_rng(seed: u64, trial: u64, sub: u64) -> AuditRng {
    let mut rng = trial_rng(seed, trial);
    rng.set_word_pos(u128::from(sub) << 48);
    rng
}

/// Random order of `0..n`, i.e. sampling without replacement.
pub fn shuffled_indices<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order
}

/// Order in which items would be drawn one at a time, without replacement,
/// each draw picking a remaining item with probability proportional to its
/// weight.
///
/// Uses the Efraimidis–Spirakis keys `u^(1/w)`: sorting by key descending is
/// distributed exactly as successive weighted draws. Zero-weight items come
/// last, in index order.
pub fn weighted_order<R: Rng + ?Sized>(weights: &[u64], rng: &mut R) -> Vec<usize> {
    let mut keyed: Vec<(f64, usize)> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            // ln(u)/w is a monotone transform of u^(1/w) and avoids underflow.
            let u: f64 = rng.random::<f64>();
            let key = if w == 0 { f64::NEG_INFINITY } else { u.ln() / w as f64 };
            (key, i)
        })
        .collect();
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    keyed.into_iter().map(|(_, i)| i).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| trial_rng(7, 3).random()).collect();
        let b: Vec<u64> = (0..4).map(|_| trial_rng(7, 3).random()).collect();
        assert_eq!(a, b);
        assert_ne!(trial_rng(7, 3).random::<u64>(), trial_rng(7, 4).random::<u64>());
    }

    #[test]
    fn weighted_first_draw_follows_weights() {
        let weights = [1u64, 3, 6];
        let mut rng = rng_from_seed(11);
        let mut first = [0u32; 3];
        let trials = 60_000;
        for _ in 0..trials {
            first[weighted_order(&weights, &mut rng)[0]] += 1;
        }
        for (i, &w) in weights.iter().enumerate() {
            let p = w as f64 / 10.0;
            let sd = (p * (1.0 - p) / trials as f64).sqrt();
            let got = first[i] as f64 / trials as f64;
            assert!((got - p).abs() < 4.0 * sd, "item {i}: {got} vs {p}");
        }
    }

    #[test]
    fn weighted_second_draw_is_conditional_on_first() {
        // P(second = 2 | first = 1) = 6 / (1 + 6).
        let weights = [1u64, 3, 6];
        let mut rng = rng_from_seed(5);
        let (mut hits, mut total) = (0u32, 0u32);
        for _ in 0..60_000 {
            let order = weighted_order(&weights, &mut rng);
            if order[0] == 1 {
                total += 1;
                hits += u32::from(order[1] == 2);
            }
        }
        let p = 6.0 / 7.0;
        let got = hits as f64 / total as f64;
        let sd = (p * (1.0 - p) / total as f64).sqrt();
        assert!((got - p).abs() < 4.0 * sd, "{got} vs {p}");
    }

    #[test]
    fn shuffle_is_a_permutation() {
        let mut rng = rng_from_seed(1);
        let mut order = shuffled_indices(50, &mut rng);
        order.sort_unstable();
        assert_eq!(order, (0..50).collect::<Vec<_>>());
    }
}
