use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rla::harness::experiment::{load_election, CensusSpec, ElectionConfig, ExperimentConfig, ExperimentKind, Rule};
use rla::harness::{run_experiment, ErrorModel};
use rla::{assertion_margin, Error, Result};

/// Risk-limiting audit simulations.
#[derive(Parser)]
#[command(name = "audit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo experiment described by a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's root seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the config's trial count.
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Also write a per-step CSV for every trial.
        #[arg(long)]
        trace: bool,
    },
    /// Print the assertions of an election with their reported margins.
    Margins {
        /// Election TOML, or a contest tally CSV (120 seats, 3.25% threshold).
        #[arg(long)]
        contest: PathBuf,
        /// Weaken the seat-move assertion from HOLDER to GAINER.
        #[arg(long, value_name = "GAINER:HOLDER")]
        weaken: Vec<String>,
        /// Assertion rule for a tally CSV: `knesset` or `plurality`.
        #[arg(long)]
        rule: Option<String>,
    },
    /// Census audit risk over a grid of PES sample fractions.
    Census {
        /// Census model TOML.
        #[arg(long)]
        model: PathBuf,
        /// Comma-separated fractions, or `start:stop:step`.
        #[arg(long, value_name = "GRID")]
        sample_frac: Option<String>,
        /// Share of households on which census and PES disagree.
        #[arg(long)]
        disagree: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        trials: u64,
        #[arg(long, default_value = "census-out")]
        out: PathBuf,
    },
}

fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidConfig(format!("bad sample-fraction grid `{s}`"));
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let (start, stop, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(step > 0.0 && start <= stop) {
            return Err(bad());
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| start + i as f64 * step).collect());
    }
    s.split(',').map(num).collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            seed,
            trials,
            out,
            trace,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(t) = trials {
                cfg.trials = t;
            }
            let report = run_experiment(&cfg, trace)?;
            println!("{}", report.write_csv(&out)?);
        }
        Command::Margins { contest, weaken, rule } => margins(&contest, &weaken, rule.as_deref())?,
        Command::Census {
            model,
            sample_frac,
            disagree,
            seed,
            trials,
            out,
        } => {
            let (mut spec, base) = CensusSpec::load(&model)?;
            if let Some(g) = sample_frac {
                spec.sample_fracs = parse_grid(&g)?;
            }
            if let Some(rate) = disagree {
                spec.errors = Some(ErrorModel::CensusDisagree { rate });
            }
            let cfg = ExperimentConfig {
                kind: ExperimentKind::Census,
                alpha: 0.05,
                epsilon: 1e-9,
                delta: rla::batchcomp::DEFAULT_DELTA,
                trials,
                seed,
                update: Default::default(),
                election: None,
                errors: ErrorModel::None,
                census: Some(spec),
                base_dir: base,
            };
            let report = run_experiment(&cfg, false)?;
            println!("{}", report.write_csv(&out)?);
        }
    }
    Ok(())
}

fn margins(path: &Path, weaken: &[String], rule: Option<&str>) -> Result<()> {
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let (mut cfg, base) = if is_csv {
        let cfg = ElectionConfig {
            tally: Some(path.to_path_buf()),
            ..ElectionConfig::default()
        };
        (cfg, PathBuf::new())
    } else {
        ElectionConfig::load(path)?
    };
    match rule {
        None => {}
        Some("knesset") => cfg.rule = Rule::Knesset,
        Some("plurality") => cfg.rule = Rule::Plurality,
        Some(other) => return Err(Error::InvalidConfig(format!("unknown rule `{other}`"))),
    }
    for w in weaken {
        let (g, h) = w
            .split_once(':')
            .ok_or_else(|| Error::InvalidConfig(format!("`--weaken {w}` is not GAINER:HOLDER")))?;
        cfg.weaken.push([g.to_string(), h.to_string()]);
    }
    let election = load_election(&cfg, &base, 0)?;
    let reported = election.reported();
    let total = reported.total();
    let assertions = election.assertions(&reported)?;
    let mut out = csv::Writer::from_writer(std::io::stdout());
    out.write_record(["assertion", "margin", "margin_pct"])?;
    for a in assertions {
        let m = assertion_margin(&a, &reported);
        out.write_record([
            a.label().to_string(),
            m.map(|m| m.to_string()).unwrap_or_else(|| "unfalsifiable".into()),
            m.map(|m| (100.0 * m as f64 / total as f64).to_string()).unwrap_or_default(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0.1,0.2").unwrap(), vec![0.1, 0.2]);
        assert_eq!(parse_grid("0.1:0.3:0.1").unwrap().len(), 3);
        assert!(parse_grid("x").is_err());
    }
}
