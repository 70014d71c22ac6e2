//! A config-driven experiment with ballot misreads, written to CSV.
//!
//! Run with `cargo run --release --example experiment_config`; the CSV files
//! land in a temporary directory whose path is printed.

use rla::harness::{run_experiment, ExperimentConfig};

const CONFIG: &str = r#"
kind = "batchcomp"
alpha = 0.05
trials = 4
seed = 3

[election]
seats = 20
threshold = "1/20"
apparentments = [["A", "D"]]

[election.synthetic]
parties = [
    { name = "A", share = 0.34 },
    { name = "B", share = 0.30 },
    { name = "C", share = 0.20 },
    { name = "D", share = 0.13 },
    { name = "E", share = 0.03 },
]
invalid_share = 0.01
batches = 300

[errors]
kind = "ballot_misread"
p_misread = 0.01
p_invalid = 0.1
"#;

fn main() -> rla::Result<()> {
    let cfg = ExperimentConfig::from_toml(CONFIG, std::env::current_dir()?)?;
    let report = run_experiment(&cfg, false)?;
    let out = std::env::temp_dir().join("rla-experiment-example");
    let summary = report.write_csv(&out)?;
    println!("{summary}");
    println!("CSV written to {}", out.display());
    print!("{}", std::fs::read_to_string(out.join("summary.csv"))?);
    Ok(())
}
