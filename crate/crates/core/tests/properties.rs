//! Invariants checked on generated inputs.

mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use common::{coloring_oracle, dhondt, tallies_summing_to};
use rla::alpha::{alpha_init, alpha_step, betting_factor, AuditConfig, Status};
use rla::assorter::{assertion_margin, half, inequality_to_assorter, plurality_assorter, ratio, Assorter, LinearInequality};
use rla::batch::BatchRecord;
use rla::batchcomp::{batch_assorter_value, BatchAssorter, DEFAULT_DELTA};
use rla::census::{comparison_assorter_value, census_assorter_value, CensusModel, Household, PairAssorter};
use rla::contest::{Contest, Tally};
use rla::highest_averages::{highest_averages, Divisor};
use rla::Error;

fn contest(k: usize) -> Contest {
    Contest::new(["A", "B", "C", "D"][..k].iter().copied()).unwrap()
}

fn int(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// The converted assorter's assertion agrees with the inequality on
    /// every tally of `n` ballots.
    #[test]
    fn inequality_round_trip(
        k in 1usize..=3,
        coeffs in prop::collection::vec((-6i64..=6, 1i64..=4), 4),
        rhs in (-40i64..=40, 1i64..=3),
        n in 1u64..=8,
    ) {
        let c = contest(k);
        let betas: Vec<BigRational> = coeffs[..=k].iter().map(|&(p, q)| ratio(p, q)).collect();
        prop_assume!(betas.iter().any(|b| *b != int(0)));
        let q = LinearInequality::new(&c, betas, ratio(rhs.0, rhs.1), n).unwrap();
        let tallies: Vec<Tally> = tallies_summing_to(k + 1, n)
            .into_iter()
            .map(|v| Tally::from_counts(&c, v).unwrap())
            .collect();
        match inequality_to_assorter(&c, &q, "q") {
            Ok(a) => {
                prop_assert!(a.values().iter().all(|v| *v >= int(0)));
                for t in &tallies {
                    prop_assert_eq!(a.holds(t), q.holds(t), "tally {:?}", t.counts());
                }
            }
            Err(Error::TrivialInequality(_)) => {
                let first = q.holds(&tallies[0]);
                prop_assert!(tallies.iter().all(|t| q.holds(t) == first));
            }
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    /// Assorter totals are linear in the tally.
    #[test]
    fn assorter_total_is_linear(x in prop::collection::vec(0u64..50, 4), y in prop::collection::vec(0u64..50, 4)) {
        let c = contest(3);
        let a = plurality_assorter(&c, c.party("A").unwrap(), c.party("C").unwrap()).unwrap();
        let tx = Tally::from_counts(&c, x).unwrap();
        let ty = Tally::from_counts(&c, y).unwrap();
        prop_assert_eq!(a.total(&tx.merged(&ty)), a.total(&tx) + a.total(&ty));
    }

    /// The margin is the smallest number of relabelled ballots that makes
    /// the assertion false (checked against every tally with the same
    /// ballot count).
    #[test]
    fn margin_matches_search(counts in prop::collection::vec(0u64..=6, 4), w in 0usize..3, l in 0usize..3) {
        prop_assume!(w != l);
        let c = contest(3);
        let parties: Vec<_> = c.parties().collect();
        let a = plurality_assorter(&c, parties[w], parties[l]).unwrap();
        let truth = Tally::from_counts(&c, counts.clone()).unwrap();
        let n = truth.total();
        prop_assume!(n > 0);
        let best = tallies_summing_to(4, n)
            .into_iter()
            .filter(|v| !a.holds(&Tally::from_counts(&c, v.clone()).unwrap()))
            .map(|v| v.iter().zip(&counts).map(|(&x, &y)| y.saturating_sub(x)).sum::<u64>())
            .min();
        prop_assert_eq!(assertion_margin(&a, &truth), best);
    }

    /// `mu < eta < u` after every step while an assertion is active, and the
    /// statistic never goes negative.
    #[test]
    fn alpha_keeps_parameters_ordered(
        winner in 500u64..700,
        invalid in 0u64..50,
        draws in prop::collection::vec(0usize..3, 1..400),
    ) {
        let c = contest(2);
        let n = 1000u64;
        let loser = n - winner - invalid;
        let reported = Tally::from_counts(&c, vec![winner, loser, invalid]).unwrap();
        let a = plurality_assorter(&c, c.party("A").unwrap(), c.party("B").unwrap()).unwrap();
        let cfg = AuditConfig::default();
        let mut s = alpha_init(std::slice::from_ref(&a), &reported, n, &cfg).unwrap().remove(0);
        let mean = a.mean_f64(&reported);
        for d in draws {
            if s.status != Status::Active {
                break;
            }
            let v = [1.0, 0.0, 0.5][d];
            s = alpha_step(&s, v, &cfg, n, mean);
            prop_assert!(s.t >= 0.0);
            if s.status == Status::Active {
                prop_assert!(0.0 <= s.mu && s.mu < s.eta && s.eta < s.u, "{s:?}");
            }
        }
    }

    /// Under the null, the betting factor averages to at most one over the
    /// remaining population: it is linear in `a` and equals 1 at `a = mu`.
    #[test]
    fn betting_factor_fair_under_null(
        values in prop::collection::vec(0.0f64..1.0, 2..50),
        eta_gap in 1e-6f64..0.4,
        u_gap in 1e-6f64..0.4,
    ) {
        let mu = values.iter().sum::<f64>() / values.len() as f64;
        prop_assume!(mu > 1e-3);
        let eta = mu + eta_gap;
        let u = (eta + u_gap).max(1.0);
        let avg = values.iter().map(|&a| betting_factor(a, mu, eta, u)).sum::<f64>() / values.len() as f64;
        prop_assert!((avg - 1.0).abs() < 1e-9, "average factor {avg}");
        prop_assert!(values.iter().all(|&a| betting_factor(a, mu, eta, u) >= 0.0));
    }

    /// Batchcomp values are non-negative, and the size-weighted mean of `A`
    /// exceeds 1/2 exactly when the assertion holds on the true counts.
    #[test]
    fn batchcomp_assorter_claims(
        batches in prop::collection::vec((0u64..30, 0u64..30, 0u64..3, -5i64..=5), 2..12),
    ) {
        let c = contest(2);
        let a = plurality_assorter(&c, c.party("A").unwrap(), c.party("B").unwrap()).unwrap();
        let records: Vec<BatchRecord> = batches
            .iter()
            .enumerate()
            .filter(|(_, b)| b.0 + b.1 + b.2 > 0)
            .map(|(i, &(x, y, z, shift))| {
                // Truth moves `shift` ballots between A and B.
                let s = shift.clamp(-(y as i64), x as i64);
                let truth = vec![(x as i64 - s) as u64, (y as i64 + s) as u64, z];
                BatchRecord::new(
                    format!("b{i}"),
                    Tally::from_counts(&c, vec![x, y, z]).unwrap(),
                    Tally::from_counts(&c, truth).unwrap(),
                )
                .unwrap()
            })
            .collect();
        prop_assume!(records.len() >= 2);
        let Ok(ba) = BatchAssorter::new(a.clone(), &records, DEFAULT_DELTA) else {
            return Ok(());
        };
        let truth = Tally::sum(records.iter().map(|b| &b.truth)).unwrap();
        let mut weighted = 0.0;
        let mut n = 0.0;
        for b in &records {
            let v = batch_assorter_value(&ba, b);
            prop_assert!(v >= -1e-12, "negative batch value {v}");
            weighted += v * b.size() as f64;
            n += b.size() as f64;
        }
        let mean = weighted / n;
        // Skip the knife edge where f64 rounding decides.
        if (mean - 0.5).abs() > 1e-9 {
            prop_assert_eq!(mean > 0.5, a.holds(&truth), "mean {}", mean);
        }
    }

    /// Census comparison assorters: non-negative, and their mean over all
    /// households exceeds 1/2 exactly when the PES-count assorter's does.
    #[test]
    fn census_comparison_equivalence(
        hh in prop::collection::vec((0usize..3, 0u32..=6, 0u32..=6), 6..60),
        reps in 2u32..8,
    ) {
        let model = CensusModel::new(vec!["X".into(), "Y".into(), "Z".into()], reps, Divisor::DHondt, vec![3.0, 0.0, 1.0], 6).unwrap();
        let households: Vec<Household> = hh
            .iter()
            .enumerate()
            .map(|(i, &(s, cen, pes))| Household {
                id: format!("h{i}"),
                state: s,
                census_count: cen,
                pes_count: Some(pes),
                in_pes_frame: true,
            })
            .collect();
        let mut pops = vec![0u64; 3];
        for h in &households {
            pops[h.state] += u64::from(h.census_count);
        }
        let Ok(seats) = rla::census::apportion(&model, &pops) else {
            return Ok(());
        };
        for s1 in 0..3 {
            for s2 in 0..3 {
                let Ok(pair) = PairAssorter::new(&model, s1, s2, &seats, &households) else {
                    continue;
                };
                if pair.margin() <= 0.0 {
                    continue;
                }
                let n = households.len() as f64;
                let cmp: f64 = households
                    .iter()
                    .map(|h| comparison_assorter_value(&pair, h, h.pes_count.unwrap()))
                    .sum::<f64>() / n;
                let pes: f64 = households.iter().map(|h| census_assorter_value(&pair, h, true)).sum::<f64>() / n;
                for h in &households {
                    let v = comparison_assorter_value(&pair, h, h.pes_count.unwrap());
                    prop_assert!(v >= -1e-12, "negative comparison value {v}");
                    prop_assert!(census_assorter_value(&pair, h, true) >= 0.0);
                }
                if (pes - 0.5).abs() > 1e-9 {
                    prop_assert_eq!(cmp > 0.5, pes > 0.5, "comparison mean {} vs PES mean {}", cmp, pes);
                }
            }
        }
    }

    /// Highest averages agrees with colouring on random larger inputs too.
    #[test]
    fn dhondt_matches_colouring(weights in prop::collection::vec(1u64..10_000, 1..6), seats in 1u32..9) {
        let got = highest_averages(&weights, seats, Divisor::DHondt).ok();
        prop_assert_eq!(got, coloring_oracle(&weights, seats, dhondt));
    }
}

#[test]
fn half_is_one_half() {
    assert_eq!(half(), ratio(1, 2));
}

/// Exhaustive version of the batchcomp claim on a tiny grid: a negative
/// batch value needs a discrepancy larger than the largest reported batch
/// mean allows, which no real batch can have.
#[test]
fn batchcomp_values_nonnegative_exhaustive() {
    let c = contest(2);
    let a: Assorter = plurality_assorter(&c, c.party("A").unwrap(), c.party("B").unwrap()).unwrap();
    let reported = [vec![6u64, 2, 0], vec![3, 3, 2], vec![4, 1, 3]];
    for truth0 in tallies_summing_to(3, 8) {
        let records: Vec<BatchRecord> = reported
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let truth = if i == 0 { truth0.clone() } else { r.clone() };
                BatchRecord::new(
                    format!("b{i}"),
                    Tally::from_counts(&c, r.clone()).unwrap(),
                    Tally::from_counts(&c, truth).unwrap(),
                )
                .unwrap()
            })
            .collect();
        let ba = BatchAssorter::new(a.clone(), &records, DEFAULT_DELTA).unwrap();
        for b in &records {
            assert!(batch_assorter_value(&ba, b) >= 0.0, "truth {truth0:?}");
        }
    }
}
