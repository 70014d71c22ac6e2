//! Highest-averages apportionment.
//!
//! Picture a table with one row per party (or state) and one column per seat
//! number `r`; cell `[i, r]` holds `w_i / d(r)`. The `S` largest cells are
//! coloured and each row wins as many seats as it has coloured cells. Since
//! `d` increases, each row's coloured cells form a prefix, so seats can be
//! handed out one at a time to the row with the largest next quotient.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

/// Divisor sequence `d(r)` for `r = 1, 2, ...`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Divisor {
    /// `d(r) = r`.
    #[default]
    DHondt,
    /// `d(r) = 2r - 1`.
    SainteLague,
}

impl Divisor {
    pub fn d(self, r: u32) -> u64 {
        assert!(r >= 1, "divisors start at the first seat");
        match self {
            Divisor::DHondt => u64::from(r),
            Divisor::SainteLague => 2 * u64::from(r) - 1,
        }
    }
}

/// A row weight that can compare quotients `a/da` and `b/db` without
/// rounding trouble.
pub trait Weight: Copy {
    fn cmp_quotients(a: Self, da: u64, b: Self, db: u64) -> Ordering;
}

impl Weight for u64 {
    fn cmp_quotients(a: u64, da: u64, b: u64, db: u64) -> Ordering {
        (u128::from(a) * u128::from(db)).cmp(&(u128::from(b) * u128::from(da)))
    }
}

impl Weight for f64 {
    // Cross-multiplication is exact for integral weights below 2^53 and small
    // divisors, which covers every population this crate handles.
    fn cmp_quotients(a: f64, da: u64, b: f64, db: u64) -> Ordering {
        (a * db as f64).total_cmp(&(b * da as f64))
    }
}

/// The last awarded seat and the best unawarded cell hold equal quotients.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tie;

/// Allocates `seats` among rows with the given weights.
///
/// Returns [`Tie`] when the `seats`-th largest cell equals the next one, so
/// the allocation is not determined by the rule alone.
pub fn highest_averages<W: Weight>(weights: &[W], seats: u32, divisor: Divisor) -> Result<Vec<u32>, Tie> {
    let mut alloc = vec![0u32; weights.len()];
    if seats == 0 {
        return Ok(alloc);
    }
    if weights.is_empty() {
        return Err(Tie);
    }
    let next_best = |alloc: &[u32]| -> usize {
        let mut best = 0;
        for i in 1..weights.len() {
            let ord = W::cmp_quotients(weights[i], divisor.d(alloc[i] + 1), weights[best], divisor.d(alloc[best] + 1));
            if ord == Ordering::Greater {
                best = i;
            }
        }
        best
    };
    let mut last = 0;
    for _ in 0..seats {
        last = next_best(&alloc);
        alloc[last] += 1;
    }
    let next = next_best(&alloc);
    let ord = W::cmp_quotients(
        weights[last],
        divisor.d(alloc[last]),
        weights[next],
        divisor.d(alloc[next] + 1),
    );
    if ord == Ordering::Equal {
        return Err(Tie);
    }
    Ok(alloc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dhondt_small_example() {
        assert_eq!(highest_averages(&[100u64, 60, 40], 5, Divisor::DHondt), Ok(vec![3, 1, 1]));
    }

    #[test]
    fn single_row_takes_everything() {
        assert_eq!(highest_averages(&[7u64], 9, Divisor::DHondt), Ok(vec![9]));
    }

    #[test]
    fn boundary_tie_is_reported() {
        // Quotients 10, 10, 5, 5: the second seat is a tie.
        assert_eq!(highest_averages(&[10u64, 10], 1, Divisor::DHondt), Err(Tie));
        assert_eq!(highest_averages(&[10u64, 10], 2, Divisor::DHondt), Ok(vec![1, 1]));
    }

    #[test]
    fn sainte_lague_differs() {
        // d = 1, 3, 5: quotients 100, 33.3, 20 vs 60, 20 vs 40, 13.3.
        assert_eq!(highest_averages(&[100u64, 60, 40], 4, Divisor::SainteLague), Ok(vec![2, 1, 1]));
    }

    #[test]
    fn float_weights_match_integer_ones() {
        let ints = [17u64, 9, 4, 12];
        let floats = ints.map(|x| x as f64);
        for s in 0..8 {
            assert_eq!(
                highest_averages(&ints, s, Divisor::DHondt),
                highest_averages(&floats, s, Divisor::DHondt)
            );
        }
    }
}
