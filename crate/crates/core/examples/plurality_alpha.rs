//! Ballot-polling ALPHA audit of a two-candidate contest.
//!
//! Run with `cargo run --example plurality_alpha`.

use rla::{alpha_audit, plurality_assorter, AuditConfig, Contest, Tally};

fn main() -> rla::Result<()> {
    let contest = Contest::new(["Alice", "Bob"])?;
    let alice = contest.party("Alice")?;
    let bob = contest.party("Bob")?;

    let reported = Tally::from_named(&contest, [("Alice", 5_400), ("Bob", 4_500), ("__invalid__", 100)])?;
    let assertion = plurality_assorter(&contest, alice, bob)?;

    // The paper ballots agree with the count.
    let ballots = reported.to_ballots();
    for seed in 0..5 {
        let cfg = AuditConfig { seed, ..AuditConfig::default() };
        let out = alpha_audit(&ballots, std::slice::from_ref(&assertion), &reported, &cfg)?;
        println!(
            "seed {seed}: approved={} after {} of {} ballots",
            out.approved, out.ballots_examined, out.total_ballots
        );
    }

    // The count swapped the winner: Bob really won 5,400 to 4,500.
    let truth = Tally::from_named(&contest, [("Alice", 4_500), ("Bob", 5_400), ("__invalid__", 100)])?;
    let out = alpha_audit(&truth.to_ballots(), &[assertion], &reported, &AuditConfig::default())?;
    println!(
        "wrong outcome: approved={}, full recount={}",
        out.approved, out.full_recount
    );
    Ok(())
}
