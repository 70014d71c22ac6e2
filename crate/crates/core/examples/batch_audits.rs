//! Batchcomp against ALPHA-batch on the same synthetic polling-place data.
//!
//! Both audits draw polling places with probability proportional to size,
//! from the same seed, so each trial compares them on the same order.
//!
//! Run with `cargo run --release --example batch_audits`.

use rla::alpha::alpha_batch_audit_with;
use rla::batchcomp::{batchcomp_audit_with, BatchcompParams};
use rla::harness::synthetic::{generate_batches, PartyShare, SyntheticElection};
use rla::sampling::{rng_from_seed, trial_rng};
use rla::{assertion_margin, plurality_assorter, AuditConfig, Tally};

fn main() -> rla::Result<()> {
    let spec = SyntheticElection {
        parties: vec![
            PartyShare { name: "Red".into(), share: 0.505 },
            PartyShare { name: "Blue".into(), share: 0.495 },
        ],
        invalid_share: 0.01,
        batches: 250,
        min_size: 250,
        max_size: 550,
        concentration: 300.0,
    };
    let (contest, batches) = generate_batches(&spec, &mut rng_from_seed(7))?;
    let reported = Tally::sum(batches.iter().map(|b| &b.reported)).expect("batches");
    let (red, blue) = (contest.party("Red")?, contest.party("Blue")?);
    let (winner, loser) = if reported.get(red) > reported.get(blue) { (red, blue) } else { (blue, red) };
    let a = plurality_assorter(&contest, winner, loser)?;
    println!(
        "{} ballots in {} batches, margin {} ballots",
        reported.total(),
        batches.len(),
        assertion_margin(&a, &reported).unwrap_or(0)
    );

    let cfg = AuditConfig::default();
    println!("trial  batchcomp  alpha-batch   (ballots examined)");
    for trial in 0..5 {
        let bc = batchcomp_audit_with(
            &batches,
            std::slice::from_ref(&a),
            &cfg,
            &BatchcompParams::default(),
            &mut trial_rng(1, trial),
            None,
        )?;
        let ab = alpha_batch_audit_with(&batches, std::slice::from_ref(&a), &cfg, &mut trial_rng(1, trial), None)?;
        println!("{trial:>5}  {:>9}  {:>11}", bc.ballots_examined, ab.ballots_examined);
    }
    Ok(())
}
