//! Padding batches whose counts fall short of the declared number of ballots.
//!
//! Ballots missing from either count are added to it as invalid ballots,
//! which is the worst case for assertions scoring invalid ballots 1/2.
//!
//! Run with `cargo run --example missing_ballots`.

use rla::batch::pad_to_larger_count;
use rla::{pad_missing_ballots, BatchRecord, Contest, Tally};

fn main() -> rla::Result<()> {
    let contest = Contest::new(["A", "B"])?;
    let batch = BatchRecord::unpadded(
        "polling-place-17",
        Tally::from_named(&contest, [("A", 180), ("B", 150)])?,
        Tally::from_named(&contest, [("A", 178), ("B", 149)])?,
    );

    let padded = pad_missing_ballots(&contest, &batch, 340)?;
    println!("declared 340 ballots");
    println!("  reported: {:?}", padded.reported.counts());
    println!("  true:     {:?}", padded.truth.counts());

    match pad_missing_ballots(&contest, &batch, 300) {
        Err(e) => println!("declared 300 ballots: {e}"),
        Ok(_) => unreachable!("the batch holds more than 300 ballots"),
    }

    // Without declared sizes, pad the smaller count up to the larger one.
    let even = pad_to_larger_count(&contest, std::slice::from_ref(&batch));
    println!("padded to larger count: {} ballots", even[0].size());
    Ok(())
}
