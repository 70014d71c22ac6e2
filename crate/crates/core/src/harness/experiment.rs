//! Config-driven Monte Carlo experiments.
//!
//! An experiment is a TOML file naming the audit kind, its parameters and
//! the data. Paths inside it are relative to the file. Trial `i` draws all
//! its randomness from stream `i` of the root seed (see
//! [`crate::sampling`]), so results do not depend on how trials are
//! scheduled, and the same seed gives byte-identical CSV output.
//!
//! ```toml
//! kind = "batchcomp"        # alpha | alpha_batch | batchcomp | census
//! alpha = 0.05
//! trials = 10
//! seed = 0
//!
//! [election]
//! seats = 120
//! threshold = 0.0325
//! apparentments = [["A", "B"]]
//! batches = "batches.csv"
//!
//! [errors]
//! kind = "ballot_misread"
//! p_misread = 0.01
//! p_invalid = 0.1
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Deserialize;

use crate::alpha::{alpha_audit_with, alpha_batch_audit_with, AuditConfig, AuditOutcome, UpdateRule};
use crate::assorter::{assertion_margin, plurality_assorter, Assorter};
use crate::batch::BatchRecord;
use crate::batchcomp::{batchcomp_audit_with, BatchcompParams, DEFAULT_DELTA};
use crate::census::{
    apportion, census_populations, census_rla, generate_cyprus_data, CensusAuditConfig, CensusModel, CensusOutcome,
    GeneratedCensus, GenerationParams, Household, HouseholdDistribution, PairStatus, UnframedScoring, DEFAULT_G_MAX,
};
use crate::contest::{BallotType, Contest, Tally};
use crate::error::{Error, Result};
use crate::harness::errors::{inject_ballot_errors, ErrorModel};
use crate::harness::io;
use crate::harness::stats::{assertion_stats, mean_std, median};
use crate::harness::synthetic::{generate_batches, SyntheticElection};
use crate::highest_averages::Divisor;
use crate::knesset::{allocate_seats, default_threshold, generate_assertions, KnessetContest, DEFAULT_SEATS};
use crate::sampling::{rng_from_seed, trial_rng, trial_substream_rng};
use crate::trace::Trace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Ballot-polling ALPHA.
    Alpha,
    /// ALPHA over batches drawn with probability proportional to size.
    AlphaBatch,
    Batchcomp,
    Census,
}

/// Which assertions an election needs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// Threshold, apportionment and seat-move assertions.
    #[default]
    Knesset,
    /// The winner beats every other party.
    Plurality,
}

/// A number written as a TOML float or as a string such as `"13/400"`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Float(f64),
    Text(String),
}

/// An election: its rules and where its ballots come from. Exactly one of
/// `batches`, `tally` and `synthetic` must be set.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElectionConfig {
    #[serde(default)]
    pub rule: Rule,
    #[serde(default)]
    pub seats: Option<u32>,
    /// Decimal (`0.0325`) or fraction (`"13/400"`); kept exact.
    #[serde(default)]
    pub threshold: Option<Number>,
    #[serde(default)]
    pub apparentments: Vec<[String; 2]>,
    /// `[gainer, holder]` pairs whose seat-move assertion is weakened.
    #[serde(default)]
    pub weaken: Vec<[String; 2]>,
    /// Plurality winner; defaults to the reported leader.
    #[serde(default)]
    pub winner: Option<String>,
    /// Batch tallies CSV.
    #[serde(default)]
    pub batches: Option<PathBuf>,
    /// Declared batch sizes CSV, used to pad missing ballots.
    #[serde(default)]
    pub declared_sizes: Option<PathBuf>,
    /// Contest tally CSV of reported votes, treated as a single batch.
    #[serde(default)]
    pub tally: Option<PathBuf>,
    /// Contest tally CSV of true votes; defaults to `tally`.
    #[serde(default)]
    pub truth: Option<PathBuf>,
    #[serde(default)]
    pub synthetic: Option<SyntheticElection>,
    /// Seed for synthetic data; defaults to the experiment seed.
    #[serde(default)]
    pub data_seed: Option<u64>,
}

impl ElectionConfig {
    /// Reads a standalone election file.
    pub fn load(path: &Path) -> Result<(Self, PathBuf)> {
        let text = fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
        let cfg: Self = toml::from_str(&text)?;
        Ok((cfg, base_dir(path)))
    }

    pub fn threshold(&self) -> Result<BigRational> {
        match &self.threshold {
            None => Ok(default_threshold()),
            Some(Number::Float(f)) => io::parse_rational(&f.to_string()),
            Some(Number::Text(s)) => io::parse_rational(s),
        }
    }
}

/// Census data: generated from district populations, or read from a
/// household file.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CensusSpec {
    /// District CSV `district,population,c_constant`.
    pub districts: PathBuf,
    /// Residents-per-household CSV; needed to generate households.
    #[serde(default)]
    pub household_sizes: Option<PathBuf>,
    /// Household CSV; when set, no data is generated.
    #[serde(default)]
    pub households: Option<PathBuf>,
    #[serde(default = "default_representatives")]
    pub representatives: u32,
    #[serde(default)]
    pub divisor: Divisor,
    #[serde(default = "default_g_max")]
    pub g_max: u32,
    #[serde(default = "default_nonresponse")]
    pub nonresponse: f64,
    /// Surveyed share of households, one audit per value and trial.
    #[serde(default)]
    pub sample_fracs: Vec<f64>,
    #[serde(default)]
    pub unframed: UnframedScoring,
    #[serde(default)]
    pub data_seed: Option<u64>,
    /// PES disagreement; overrides the experiment's `errors`.
    #[serde(default)]
    pub errors: Option<ErrorModel>,
}

fn default_representatives() -> u32 {
    56
}

fn default_g_max() -> u32 {
    DEFAULT_G_MAX
}

fn default_nonresponse() -> f64 {
    0.01
}

fn default_alpha() -> f64 {
    0.05
}

fn default_epsilon() -> f64 {
    1e-9
}

fn default_delta() -> f64 {
    DEFAULT_DELTA
}

fn default_trials() -> u64 {
    10
}

impl CensusSpec {
    /// Reads a standalone census model file.
    pub fn load(path: &Path) -> Result<(Self, PathBuf)> {
        let text = fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
        let spec: Self = toml::from_str(&text)?;
        Ok((spec, base_dir(path)))
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    /// Batchcomp's update of `T`.
    #[serde(default)]
    pub update: UpdateRule,
    #[serde(default)]
    pub election: Option<ElectionConfig>,
    #[serde(default)]
    pub errors: ErrorModel,
    #[serde(default)]
    pub census: Option<CensusSpec>,
    /// Directory that relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text, base_dir(path))
    }

    pub fn from_toml(text: &str, base_dir: PathBuf) -> Result<Self> {
        let mut cfg: Self = toml::from_str(text)?;
        cfg.base_dir = base_dir;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.audit_config(self.seed).validate()?;
        self.errors.validate()?;
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be positive".into()));
        }
        if !(self.delta > 0.0) {
            return Err(Error::InvalidConfig(format!("delta {} is not positive", self.delta)));
        }
        match self.kind {
            ExperimentKind::Census if self.census.is_none() => {
                Err(Error::InvalidConfig("census experiment needs a [census] section".into()))
            }
            ExperimentKind::Census => Ok(()),
            _ if self.election.is_none() => Err(Error::InvalidConfig("audit experiment needs an [election] section".into())),
            _ if matches!(self.errors, ErrorModel::CensusDisagree { .. }) => {
                Err(Error::InvalidConfig("census_disagree errors apply only to census experiments".into()))
            }
            _ => Ok(()),
        }
    }

    fn audit_config(&self, seed: u64) -> AuditConfig {
        AuditConfig {
            alpha: self.alpha,
            epsilon: self.epsilon,
            seed,
        }
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// A loaded election with padded batches.
#[derive(Clone, Debug)]
pub struct Election {
    pub knesset: KnessetContest,
    pub rule: Rule,
    pub winner: Option<BallotType>,
    pub weaken: Vec<(BallotType, BallotType)>,
    pub batches: Vec<BatchRecord>,
}

impl Election {
    pub fn contest(&self) -> &Contest {
        self.knesset.contest()
    }

    pub fn reported(&self) -> Tally {
        Tally::sum(self.batches.iter().map(|b| &b.reported)).expect("non-empty")
    }

    pub fn truth(&self) -> Tally {
        Tally::sum(self.batches.iter().map(|b| &b.truth)).expect("non-empty")
    }

    /// Assertions implied by `reported` under the election's rule.
    pub fn assertions(&self, reported: &Tally) -> Result<Vec<Assorter>> {
        let c = self.contest();
        match self.rule {
            Rule::Knesset => {
                let seats = allocate_seats(&self.knesset, reported)?;
                generate_assertions(&self.knesset, reported, &seats, &self.weaken)
            }
            Rule::Plurality => {
                let winner = match self.winner {
                    Some(w) => w,
                    None => {
                        let parties: Vec<_> = c.parties().collect();
                        let best = parties.iter().map(|&p| reported.get(p)).max().unwrap_or(0);
                        let leaders: Vec<_> = parties.into_iter().filter(|&p| reported.get(p) == best).collect();
                        if leaders.len() != 1 {
                            return Err(Error::InvalidConfig("reported plurality is tied".into()));
                        }
                        leaders[0]
                    }
                };
                c.parties()
                    .filter(|&p| p != winner)
                    .map(|p| plurality_assorter(c, winner, p))
                    .collect()
            }
        }
    }
}

/// Loads an election, resolving paths against `base`. `seed` seeds
/// synthetic data unless the config fixes `data_seed`.
pub fn load_election(cfg: &ElectionConfig, base: &Path, seed: u64) -> Result<Election> {
    let sources = [cfg.batches.is_some(), cfg.tally.is_some(), cfg.synthetic.is_some()];
    if sources.iter().filter(|&&s| s).count() != 1 {
        return Err(Error::InvalidConfig(
            "an election needs exactly one of `batches`, `tally` and `synthetic`".into(),
        ));
    }
    let (contest, batches) = if let Some(p) = &cfg.batches {
        let (contest, raw) = io::read_batches_csv(&resolve(base, p), None)?;
        let declared = match &cfg.declared_sizes {
            Some(d) => io::read_declared_sizes(&resolve(base, d))?,
            None => BTreeMap::new(),
        };
        let padded = io::pad_batches(&contest, &raw, &declared)?;
        (contest, padded)
    } else if let Some(p) = &cfg.tally {
        let (contest, reported) = io::read_contest_csv(&resolve(base, p))?;
        let truth = match &cfg.truth {
            Some(t) => {
                let (tc, truth) = io::read_contest_csv(&resolve(base, t))?;
                if tc != contest {
                    return Err(Error::Input("truth tally lists different parties".into()));
                }
                truth
            }
            None => reported.clone(),
        };
        (contest.clone(), vec![BatchRecord::new("all", reported, truth)?])
    } else {
        let spec = cfg.synthetic.as_ref().expect("checked");
        generate_batches(spec, &mut rng_from_seed(cfg.data_seed.unwrap_or(seed)))?
    };
    if cfg.declared_sizes.is_some() && cfg.batches.is_none() {
        return Err(Error::InvalidConfig("`declared_sizes` needs `batches`".into()));
    }
    let pair = |[a, b]: &[String; 2]| -> Result<(BallotType, BallotType)> { Ok((contest.party(a)?, contest.party(b)?)) };
    let apparentments = cfg.apparentments.iter().map(pair).collect::<Result<Vec<_>>>()?;
    let weaken = cfg.weaken.iter().map(pair).collect::<Result<Vec<_>>>()?;
    let winner = cfg.winner.as_deref().map(|w| contest.party(w)).transpose()?;
    let knesset = KnessetContest::new(contest, cfg.seats.unwrap_or(DEFAULT_SEATS), cfg.threshold()?, apparentments)?;
    Ok(Election {
        knesset,
        rule: cfg.rule,
        winner,
        weaken,
        batches,
    })
}

/// One audit trial.
#[derive(Clone, Debug)]
pub struct TrialReport {
    pub trial: u64,
    /// Root seed; the trial used stream `trial` of it.
    pub seed: u64,
    pub outcome: AuditOutcome,
    /// Reported margin of each assertion, in ballots.
    pub margins: Vec<Option<u64>>,
    pub trace: Option<Trace>,
    /// Not written to CSV, which must not depend on timing.
    pub wall_time: Duration,
}

/// One census audit.
#[derive(Clone, Debug)]
pub struct CensusTrial {
    pub trial: u64,
    pub seed: u64,
    /// Surveyed share of households; `None` for household files.
    pub sample_frac: Option<f64>,
    pub outcome: CensusOutcome,
    pub wall_time: Duration,
}

#[derive(Clone, Debug)]
pub enum ExperimentReport {
    Audit { trials: Vec<TrialReport> },
    Census { states: Vec<String>, trials: Vec<CensusTrial> },
}

/// Runs all trials. With `trace`, each audit trial keeps its step trace.
pub fn run_experiment(cfg: &ExperimentConfig, trace: bool) -> Result<ExperimentReport> {
    cfg.validate()?;
    if cfg.kind == ExperimentKind::Census {
        let spec = cfg.census.as_ref().expect("validated");
        let errors = spec.errors.unwrap_or(cfg.errors);
        return run_census(spec, &cfg.base_dir, cfg, errors);
    }
    let election = load_election(cfg.election.as_ref().expect("validated"), &cfg.base_dir, cfg.seed)?;
    let trials = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| run_audit_trial(cfg, &election, trial, trace))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentReport::Audit { trials })
}

fn run_audit_trial(cfg: &ExperimentConfig, election: &Election, trial: u64, trace: bool) -> Result<TrialReport> {
    let start = Instant::now();
    let mut rng = trial_rng(cfg.seed, trial);
    let batches = match cfg.errors {
        ErrorModel::BallotMisread { p_misread, p_invalid } => {
            inject_ballot_errors(election.contest(), &election.batches, p_misread, p_invalid, &mut rng)?
        }
        _ => election.batches.clone(),
    };
    let reported = Tally::sum(batches.iter().map(|b| &b.reported)).expect("non-empty");
    let assertions = election.assertions(&reported)?;
    let margins = assertions.iter().map(|a| assertion_margin(a, &reported)).collect();
    let audit_cfg = cfg.audit_config(cfg.seed);
    let mut tr = trace.then(Trace::new);
    let outcome = match cfg.kind {
        ExperimentKind::Alpha => {
            let truth = Tally::sum(batches.iter().map(|b| &b.truth)).expect("non-empty");
            alpha_audit_with(&truth.to_ballots(), &assertions, &reported, &audit_cfg, &mut rng, tr.as_mut())?
        }
        ExperimentKind::AlphaBatch => alpha_batch_audit_with(&batches, &assertions, &audit_cfg, &mut rng, tr.as_mut())?,
        ExperimentKind::Batchcomp => {
            let params = BatchcompParams {
                delta: cfg.delta,
                update: cfg.update,
            };
            batchcomp_audit_with(&batches, &assertions, &audit_cfg, &params, &mut rng, tr.as_mut())?
        }
        ExperimentKind::Census => unreachable!("handled by run_census"),
    };
    Ok(TrialReport {
        trial,
        seed: cfg.seed,
        outcome,
        margins,
        trace: tr,
        wall_time: start.elapsed(),
    })
}

enum CensusData {
    Generated {
        census: GeneratedCensus,
        dist: HouseholdDistribution,
    },
    Fixed {
        model: CensusModel,
        households: Vec<Household>,
    },
}

fn load_census(spec: &CensusSpec, base: &Path, seed: u64) -> Result<CensusData> {
    let districts = io::read_districts_csv(&resolve(base, &spec.districts))?;
    if let Some(h) = &spec.households {
        if !spec.sample_fracs.is_empty() {
            return Err(Error::InvalidConfig(
                "sample fractions apply to generated data, not to a household file".into(),
            ));
        }
        let names: Vec<String> = districts.iter().map(|d| d.district.clone()).collect();
        let zero = CensusModel::new(
            names.clone(),
            spec.representatives,
            spec.divisor,
            vec![0.0; names.len()],
            spec.g_max,
        )?;
        let households = io::read_households_csv(&resolve(base, h), &zero)?;
        let counted = census_populations(&zero, &households);
        let constants = districts
            .iter()
            .zip(&counted)
            .map(|(d, &g)| d.c_constant.unwrap_or(d.population as f64 - g as f64))
            .collect();
        let model = CensusModel::new(names, spec.representatives, spec.divisor, constants, spec.g_max)?;
        return Ok(CensusData::Fixed { model, households });
    }
    let sizes = spec.household_sizes.as_ref().ok_or_else(|| {
        Error::InvalidConfig("generating households needs `household_sizes` (or give `households`)".into())
    })?;
    if spec.sample_fracs.is_empty() {
        return Err(Error::InvalidConfig("no sample fractions to audit".into()));
    }
    if let Some(f) = spec.sample_fracs.iter().find(|f| !(0.0..=1.0).contains(*f)) {
        return Err(Error::InvalidConfig(format!("sample fraction {f} is not in [0, 1]")));
    }
    let dist = io::read_distribution_csv(&resolve(base, sizes), spec.g_max)?;
    let params = GenerationParams {
        representatives: spec.representatives,
        divisor: spec.divisor,
        g_max: spec.g_max,
        nonresponse: spec.nonresponse,
    };
    let census = generate_cyprus_data(&districts, &dist, &params, &mut rng_from_seed(spec.data_seed.unwrap_or(seed)))?;
    Ok(CensusData::Generated { census, dist })
}

/// Attempts to find a disagreeing PES that still apportions like the census.
const DISAGREEMENT_ATTEMPTS: usize = 1000;

fn run_census(spec: &CensusSpec, base: &Path, cfg: &ExperimentConfig, errors: ErrorModel) -> Result<ExperimentReport> {
    errors.validate()?;
    if matches!(errors, ErrorModel::BallotMisread { .. }) {
        return Err(Error::InvalidConfig("ballot_misread errors do not apply to a census".into()));
    }
    let audit_cfg = CensusAuditConfig {
        epsilon: cfg.epsilon,
        delta: cfg.delta,
        unframed: spec.unframed,
    };
    let data = load_census(spec, base, cfg.seed)?;
    let seed = cfg.seed;
    let trials = match &data {
        CensusData::Fixed { model, households } => (0..cfg.trials)
            .into_par_iter()
            .map(|trial| {
                let start = Instant::now();
                let outcome = census_rla(model, households, &audit_cfg, &mut trial_rng(seed, trial))?;
                Ok(CensusTrial {
                    trial,
                    seed,
                    sample_frac: None,
                    outcome,
                    wall_time: start.elapsed(),
                })
            })
            .collect::<Result<Vec<_>>>()?,
        CensusData::Generated { census, dist } => {
            let census_seats = apportion(&census.model, &census_populations(&census.model, &census.households))?;
            // Each trial's PES is shared by all sample sizes, so the curve
            // compares like with like.
            let pes: Vec<GeneratedCensus> = (0..cfg.trials)
                .into_par_iter()
                .map(|trial| match errors {
                    ErrorModel::CensusDisagree { rate } if rate > 0.0 => {
                        let mut rng = trial_substream_rng(seed, trial, 0);
                        for _ in 0..DISAGREEMENT_ATTEMPTS {
                            let mut g = census.clone();
                            g.inject_disagreement(rate, dist, &mut rng);
                            if g.full_pes_seats()? == census_seats {
                                return Ok(g);
                            }
                        }
                        Err(Error::InvalidConfig(format!(
                            "no PES with {rate} disagreement kept the census apportionment"
                        )))
                    }
                    _ => Ok(census.clone()),
                })
                .collect::<Result<Vec<_>>>()?;
            let jobs: Vec<(u64, usize)> = (0..cfg.trials)
                .flat_map(|t| (0..spec.sample_fracs.len()).map(move |j| (t, j)))
                .collect();
            jobs.into_par_iter()
                .map(|(trial, j)| {
                    let start = Instant::now();
                    let frac = spec.sample_fracs[j];
                    let g = &pes[trial as usize];
                    let mut rng = trial_substream_rng(seed, trial, j as u64 + 1);
                    let households = g.survey(frac, &mut rng);
                    let outcome = census_rla(&g.model, &households, &audit_cfg, &mut rng)?;
                    Ok(CensusTrial {
                        trial,
                        seed,
                        sample_frac: Some(frac),
                        outcome,
                        wall_time: start.elapsed(),
                    })
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    let states = match &data {
        CensusData::Fixed { model, .. } => model.states().to_vec(),
        CensusData::Generated { census, .. } => census.model.states().to_vec(),
    };
    Ok(ExperimentReport::Census { states, trials })
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    Ok(csv::Writer::from_path(path)?)
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn status_name(s: PairStatus) -> &'static str {
    match s {
        PairStatus::Audited => "audited",
        PairStatus::Certain => "certain",
        PairStatus::Refuted => "refuted",
        PairStatus::Vacuous => "vacuous",
        PairStatus::Trivial => "trivial",
    }
}

impl ExperimentReport {
    /// Writes the report's CSV files into `dir` (created if missing) and
    /// returns a one-line summary.
    ///
    /// Audit experiments write `trials.csv` (one row per trial and
    /// assertion), `audits.csv` (one row per trial) and `summary.csv` (per
    /// assertion across trials), plus `trace_<trial>.csv` when traced.
    /// Census experiments write `pairs.csv` (`pair_s1,pair_s2,risk_limit`
    /// per audit), `risk.csv` (one row per audit) and `risk_summary.csv`
    /// (the risk curve over sample sizes).
    pub fn write_csv(&self, dir: &Path) -> Result<String> {
        fs::create_dir_all(dir)?;
        match self {
            ExperimentReport::Audit { trials } => write_audit(dir, trials)?,
            ExperimentReport::Census { states, trials } => write_census(dir, states, trials)?,
        }
        Ok(self.summary())
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        match self {
            ExperimentReport::Audit { trials } => {
                let pct: Vec<f64> = trials
                    .iter()
                    .map(|t| 100.0 * t.outcome.ballots_examined as f64 / t.outcome.total_ballots as f64)
                    .collect();
                let recounts = trials.iter().filter(|t| t.outcome.full_recount).count();
                format!(
                    "{} trials: mean {:.2}% of ballots examined, {recounts} full recounts",
                    trials.len(),
                    mean_std(&pct).0
                )
            }
            ExperimentReport::Census { trials, .. } => {
                let mut parts = Vec::new();
                for (frac, risks) in census_groups(trials) {
                    let label = frac.map(|f| format!("{:.4}%", 100.0 * f)).unwrap_or_else(|| "surveyed".into());
                    parts.push(format!("{label}: median risk {:.4}", median(&risks)));
                }
                format!("risk limit by sample size: {}", parts.join("; "))
            }
        }
    }
}

/// Risk limits grouped by sample fraction, in first-seen order.
fn census_groups(trials: &[CensusTrial]) -> Vec<(Option<f64>, Vec<f64>)> {
    let mut groups: Vec<(Option<f64>, Vec<f64>)> = Vec::new();
    for t in trials {
        match groups.iter_mut().find(|(f, _)| *f == t.sample_frac) {
            Some((_, v)) => v.push(t.outcome.risk_limit),
            None => groups.push((t.sample_frac, vec![t.outcome.risk_limit])),
        }
    }
    groups
}

fn write_audit(dir: &Path, trials: &[TrialReport]) -> Result<()> {
    let mut w = csv_writer(&dir.join("trials.csv"))?;
    w.write_record([
        "trial",
        "seed",
        "assertion",
        "margin",
        "margin_pct",
        "ballots_examined",
        "units_examined",
        "pct_ballots",
        "approved",
        "refuted",
        "risk",
    ])?;
    for t in trials {
        let total = t.outcome.total_ballots as f64;
        for (a, m) in t.outcome.assertions.iter().zip(&t.margins) {
            w.write_record([
                t.trial.to_string(),
                t.seed.to_string(),
                a.label.clone(),
                opt(*m),
                opt(m.map(|m| 100.0 * m as f64 / total)),
                a.ballots_examined.to_string(),
                a.units_examined.to_string(),
                (100.0 * a.ballots_examined as f64 / total).to_string(),
                a.approved.to_string(),
                a.refuted.to_string(),
                a.risk().min(1.0).to_string(),
            ])?;
        }
    }
    w.flush()?;

    let mut w = csv_writer(&dir.join("audits.csv"))?;
    w.write_record([
        "trial",
        "seed",
        "approved",
        "full_recount",
        "ballots_examined",
        "units_examined",
        "total_ballots",
        "total_units",
        "pct_ballots",
    ])?;
    for t in trials {
        let o = &t.outcome;
        w.write_record([
            t.trial.to_string(),
            t.seed.to_string(),
            o.approved.to_string(),
            o.full_recount.to_string(),
            o.ballots_examined.to_string(),
            o.units_examined.to_string(),
            o.total_ballots.to_string(),
            o.total_units.to_string(),
            (100.0 * o.ballots_examined as f64 / o.total_ballots as f64).to_string(),
        ])?;
    }
    w.flush()?;

    let mut w = csv_writer(&dir.join("summary.csv"))?;
    for row in assertion_stats(trials) {
        w.serialize(row)?;
    }
    w.flush()?;

    for t in trials {
        if let Some(tr) = &t.trace {
            tr.write_csv(fs::File::create(dir.join(format!("trace_{}.csv", t.trial)))?)?;
        }
    }
    Ok(())
}

fn write_census(dir: &Path, states: &[String], trials: &[CensusTrial]) -> Result<()> {
    let mut w = csv_writer(&dir.join("pairs.csv"))?;
    w.write_record(["sample_frac", "trial", "pair_s1", "pair_s2", "risk_limit", "status"])?;
    for t in trials {
        for p in &t.outcome.pairs {
            w.write_record([
                opt(t.sample_frac),
                t.trial.to_string(),
                states[p.s1].clone(),
                states[p.s2].clone(),
                p.risk.min(1.0).to_string(),
                status_name(p.status).to_string(),
            ])?;
        }
    }
    w.flush()?;

    let mut w = csv_writer(&dir.join("risk.csv"))?;
    w.write_record(["sample_frac", "trial", "seed", "risk_limit", "households_sampled"])?;
    for t in trials {
        w.write_record([
            opt(t.sample_frac),
            t.trial.to_string(),
            t.seed.to_string(),
            t.outcome.risk_limit.min(1.0).to_string(),
            t.outcome.households_sampled.to_string(),
        ])?;
    }
    w.flush()?;

    let mut w = csv_writer(&dir.join("risk_summary.csv"))?;
    w.write_record(["sample_frac", "trials", "median_risk", "mean_risk", "max_risk"])?;
    for (frac, risks) in census_groups(trials) {
        let max = risks.iter().copied().fold(0.0, f64::max);
        w.write_record([
            opt(frac),
            risks.len().to_string(),
            median(&risks).to_string(),
            mean_std(&risks).0.to_string(),
            max.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
