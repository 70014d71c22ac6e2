//! Independent oracles shared by the integration tests. Nothing here calls
//! into the allocation or assorter code it is used to check.

#![allow(dead_code)]

use rand::Rng;
use rla::batch::BatchRecord;
use rla::contest::{Contest, Tally};

/// Every way to split `seats` among `k` rows.
pub fn compositions(k: usize, seats: u32) -> Vec<Vec<u32>> {
    fn go(k: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for r in 0..=left {
            cur.push(r);
            go(k - 1, left - r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k > 0 {
        go(k, seats, &mut Vec::new(), &mut out);
    }
    out
}

/// Colouring oracle: the seat vector whose coloured cells are exactly the
/// `seats` largest cells `w_i / d(r)`, or `None` if the `seats`-th and the
/// next cell tie. `d(r)` is given as a function of the 1-based column.
///
/// A vector `r` colours the top cells iff every coloured cell beats every
/// uncoloured one; it suffices to compare each row's last coloured cell
/// against each row's first uncoloured cell.
pub fn coloring_oracle(weights: &[u64], seats: u32, d: impl Fn(u32) -> u64) -> Option<Vec<u32>> {
    let mut found = None;
    for r in compositions(weights.len(), seats) {
        let ok = (0..weights.len()).filter(|&i| r[i] > 0).all(|i| {
            (0..weights.len()).all(|j| {
                // w_i / d(r_i) > w_j / d(r_j + 1)
                u128::from(weights[i]) * u128::from(d(r[j] + 1)) > u128::from(weights[j]) * u128::from(d(r[i]))
            })
        });
        if ok {
            assert!(found.is_none(), "two strict colourings cannot exist");
            found = Some(r);
        }
    }
    found
}

pub fn dhondt(r: u32) -> u64 {
    u64::from(r)
}

pub fn sainte_lague(r: u32) -> u64 {
    2 * u64::from(r) - 1
}

/// Knesset allocation by colouring: parties with `400 v >= 13 valid` pass,
/// alliances whose members both pass share a row, then each alliance's seats
/// are coloured again between its members.
pub fn knesset_oracle(votes: &[u64], seats: u32, alliances: &[(usize, usize)]) -> Option<Vec<u32>> {
    let valid: u64 = votes.iter().sum();
    let passes: Vec<bool> = votes.iter().map(|&v| 400 * v >= 13 * valid).collect();
    let mut rows: Vec<Vec<usize>> = Vec::new();
    let mut placed = vec![false; votes.len()];
    for i in 0..votes.len() {
        if !passes[i] || placed[i] {
            continue;
        }
        let partner = alliances
            .iter()
            .find_map(|&(a, b)| if a == i { Some(b) } else if b == i { Some(a) } else { None })
            .filter(|&q| passes[q]);
        placed[i] = true;
        match partner {
            Some(q) => {
                placed[q] = true;
                rows.push(vec![i, q]);
            }
            None => rows.push(vec![i]),
        }
    }
    let row_votes: Vec<u64> = rows.iter().map(|r| r.iter().map(|&p| votes[p]).sum()).collect();
    let row_seats = coloring_oracle(&row_votes, seats, dhondt)?;
    let mut out = vec![0u32; votes.len()];
    for (row, &s) in rows.iter().zip(&row_seats) {
        if row.len() == 1 {
            out[row[0]] = s;
        } else {
            let split = coloring_oracle(&[votes[row[0]], votes[row[1]]], s, dhondt)?;
            out[row[0]] = split[0];
            out[row[1]] = split[1];
        }
    }
    Some(out)
}

/// All vectors of `k` counts, each in `0..=max`.
pub fn grid(k: usize, max: u64) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=max).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// All vectors of `k` non-negative counts summing to `n`.
pub fn tallies_summing_to(k: usize, n: u64) -> Vec<Vec<u64>> {
    compositions(k, n as u32)
        .into_iter()
        .map(|v| v.into_iter().map(u64::from).collect())
        .collect()
}

/// Relabels ballots one at a time, moving a ballot from a category above
/// its target to one below, until `counts` sum to `targets` per category.
/// Each move picks a random batch that has a ballot of the surplus
/// category.
pub fn force_totals<R: Rng>(counts: &mut [Vec<u64>], targets: &[u64], rng: &mut R) {
    let k = targets.len();
    loop {
        let totals: Vec<u64> = (0..k).map(|c| counts.iter().map(|b| b[c]).sum()).collect();
        let Some(from) = (0..k).find(|&c| totals[c] > targets[c]) else {
            break;
        };
        let to = (0..k).find(|&c| totals[c] < targets[c]).expect("equal grand totals");
        let excess = totals[from] - targets[from];
        let need = targets[to] - totals[to];
        for _ in 0..excess.min(need) {
            loop {
                let b = rng.random_range(0..counts.len());
                if counts[b][from] > 0 {
                    counts[b][from] -= 1;
                    counts[b][to] += 1;
                    break;
                }
            }
        }
    }
}

/// Accurately reported batches from per-batch counts.
pub fn accurate_batches(contest: &Contest, counts: Vec<Vec<u64>>) -> Vec<BatchRecord> {
    counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| BatchRecord::accurate(format!("b{i}"), Tally::from_counts(contest, c).unwrap()))
        .collect()
}

/// Standard error of a proportion `p` estimated from `n` trials.
pub fn sigma(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}
