//! Census RLA on generated Cyprus-style household data.
//!
//! Households are generated from district populations and a
//! residents-per-household distribution; the PES then surveys a growing
//! share of them and the audit reports the risk limit it can certify.
//!
//! Run with `cargo run --release --example census_cyprus`.

use std::path::Path;

use rla::census::{apportion, census_populations, CensusAuditConfig, GenerationParams};
use rla::harness::io::{read_distribution_csv, read_districts_csv};
use rla::harness::median;
use rla::sampling::{rng_from_seed, trial_rng};
use rla::{census_rla, generate_cyprus_data};

fn main() -> rla::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let districts = read_districts_csv(&data.join("cyprus_districts.csv"))?;
    let dist = read_distribution_csv(&data.join("us_household_sizes.csv"), 15)?;
    let generated = generate_cyprus_data(&districts, &dist, &GenerationParams::default(), &mut rng_from_seed(0))?;

    let seats = apportion(&generated.model, &census_populations(&generated.model, &generated.households))?;
    println!("{} households", generated.households.len());
    for (name, s) in generated.model.states().iter().zip(&seats) {
        println!("  {name:<10} {s:>2} seats");
    }

    let cfg = CensusAuditConfig::default();
    println!("\nsurveyed   median risk limit (5 trials)");
    for frac in [0.002, 0.005, 0.01, 0.02, 0.05] {
        let mut risks = Vec::new();
        for trial in 0..5 {
            let mut rng = trial_rng(0, trial);
            let households = generated.survey(frac, &mut rng);
            risks.push(census_rla(&generated.model, &households, &cfg, &mut rng)?.risk_limit);
        }
        println!("{:>7.2}%   {:.4}", 100.0 * frac, median(&risks));
    }

    // Which pair of districts limits the audit at a 1% survey?
    let households = generated.survey(0.01, &mut trial_rng(0, 99));
    let out = census_rla(&generated.model, &households, &cfg, &mut trial_rng(0, 100))?;
    let worst = out
        .pairs
        .iter()
        .max_by(|a, b| a.risk.total_cmp(&b.risk))
        .expect("pairs");
    let names = generated.model.states();
    println!(
        "\nhardest pair at 1%: {} keeps its last seat over {} (risk {:.4})",
        names[worst.s1], names[worst.s2], worst.risk
    );
    Ok(())
}
