//! Knesset-style seat allocation, its assertions and their margins.
//!
//! Seats go to parties passing the threshold; two parties in an
//! apparentment are merged for the first allocation round and then split
//! the alliance's seats between them.
//!
//! Run with `cargo run --example knesset_margins`.

use rla::assorter::ratio;
use rla::knesset::margin_fraction;
use rla::{allocate_seats, assertion_margin, generate_assertions, Contest, KnessetContest, Tally};

fn main() -> rla::Result<()> {
    let contest = Contest::new(["Oak", "Pine", "Elm", "Ash", "Fir", "Yew"])?;
    let reported = Tally::from_named(
        &contest,
        [
            ("Oak", 310_000),
            ("Pine", 265_000),
            ("Elm", 140_000),
            ("Ash", 88_000),
            ("Fir", 61_000),
            ("Yew", 24_000),
            ("__invalid__", 6_000),
        ],
    )?;
    let apparentments = vec![(contest.party("Elm")?, contest.party("Fir")?)];
    let kc = KnessetContest::new(contest.clone(), 120, ratio(13, 400), apparentments)?;

    let seats = allocate_seats(&kc, &reported)?;
    for p in contest.parties() {
        println!("{:>5}: {:>7} votes, {:>3} seats", contest.name(p), reported.get(p), seats.get(p));
    }

    let assertions = generate_assertions(&kc, &reported, &seats, &[])?;
    println!("\n{} assertions; the five tightest:", assertions.len());
    let mut rows: Vec<_> = assertions
        .iter()
        .filter_map(|a| assertion_margin(a, &reported).map(|m| (m, a.label().to_string())))
        .collect();
    rows.sort();
    for (m, label) in rows.iter().take(5) {
        println!("  {label:<24} margin {m:>6} ballots ({:.3}%)", 100.0 * margin_fraction(*m, reported.total()));
    }

    // Tolerating one wrongly moved seat between the two closest units.
    let (gainer, holder) = (contest.party("Ash")?, contest.party("Oak")?);
    let weak = generate_assertions(&kc, &reported, &seats, &[(gainer, holder)])?;
    for a in weak.iter().filter(|a| a.label().starts_with("no-move2")) {
        println!(
            "\nweakened {}: margin {} ballots",
            a.label(),
            assertion_margin(a, &reported).unwrap_or(0)
        );
    }
    Ok(())
}
