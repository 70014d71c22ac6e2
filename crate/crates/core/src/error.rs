use thiserror::Error;

/// Errors produced while building contests, assertions and audits.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty contest")]
    EmptyContest,

    #[error("unknown ballot type `{0}`")]
    UnknownBallotType(String),

    #[error("duplicate ballot type `{0}`")]
    DuplicateBallotType(String),

    #[error("tally does not match contest: {0}")]
    TallyMismatch(String),

    #[error("invalid assorter: {0}")]
    InvalidAssorter(String),

    #[error("trivial inequality: it has the same truth value on every tally (z - d/n = {0})")]
    TrivialInequality(f64),

    #[error("winner and loser must differ")]
    SameCandidate,

    #[error("degenerate assorter `{label}`: eta {eta} >= upper bound {upper}")]
    DegenerateAssorter { label: String, eta: f64, upper: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("batch overflow: batch `{batch}` holds {actual} ballots but declared size is {declared}")]
    BatchOverflow { batch: String, declared: u64, actual: u64 },

    #[error("duplicate batch id `{0}`")]
    DuplicateBatch(String),

    #[error("empty batch list")]
    NoBatches,

    #[error("allocation tie at the last awarded seat")]
    AllocationTie,

    #[error("apportionment tie at the last awarded seat")]
    ApportionmentTie,

    #[error("cannot weaken move-seat assertion for `{0}`: it holds a single seat")]
    CannotWeaken(String),

    #[error("degenerate pair ({s1}, {s2}): normalising constant {c} is not positive")]
    DegeneratePair { s1: String, s2: String, c: f64 },

    #[error("sampling frame exhausted")]
    SamplingFrameExhausted,

    #[error("household `{id}` has {count} residents, above the bound {g_max}")]
    HouseholdOverflow { id: String, count: u32, g_max: u32 },

    #[error("{0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
