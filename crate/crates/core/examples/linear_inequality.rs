//! Turning a linear inequality over vote counts into an assorter.
//!
//! A two-thirds super-majority for "Yes" reads `v(Yes) > 2/3 · valid`, i.e.
//! `1/3·v(Yes) - 2/3·v(No) > 0` with invalid ballots weighted 0. The
//! conversion gives an assorter whose mean is above one half exactly when
//! the inequality holds.
//!
//! Run with `cargo run --example linear_inequality`.

use rla::assorter::ratio;
use rla::{assertion_margin, assorter_mean, inequality_to_assorter, Contest, LinearInequality, Tally};

fn main() -> rla::Result<()> {
    let contest = Contest::new(["Yes", "No"])?;
    let reported = Tally::from_named(&contest, [("Yes", 7_000), ("No", 3_000), ("__invalid__", 200)])?;

    let q = LinearInequality::new(&contest, vec![ratio(1, 3), ratio(-2, 3), ratio(0, 1)], ratio(0, 1), reported.total())?;
    let a = inequality_to_assorter(&contest, &q, "yes>2/3")?;

    for t in contest.ballot_types() {
        println!("a({}) = {}", contest.name(t), a.value(t));
    }
    println!("upper bound u = {}", a.upper());
    println!("inequality holds: {}", q.holds(&reported));
    println!("assorter mean: {}", assorter_mean(&a, &reported)?);
    match assertion_margin(&a, &reported) {
        Some(m) => println!("ballots to relabel before the outcome flips: {m}"),
        None => println!("no relabeling can falsify this assertion"),
    }

    // An inequality that holds for every tally is rejected.
    let trivial = LinearInequality::new(&contest, vec![ratio(1, 1), ratio(1, 1), ratio(1, 1)], ratio(-1, 1), 10)?;
    println!("{}", inequality_to_assorter(&contest, &trivial, "t").unwrap_err());
    Ok(())
}
