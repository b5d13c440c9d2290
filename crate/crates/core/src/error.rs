use thiserror::Error;

/// Errors raised by network construction, scoring and matching.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error(
        "index out of range in relation ({src}, {dst}, {rel}): network has {entities} entities"
    )]
    IndexOutOfRange {
        src: usize,
        dst: usize,
        rel: usize,
        entities: usize,
    },
    #[error("unknown relation type id {0}")]
    UnknownRelationType(usize),
    #[error("unknown relation type label {0:?}")]
    UnknownRelationLabel(String),
    #[error("duplicate relation type label {0:?}")]
    DuplicateLabel(String),
    #[error("registry holds {0} relation types; at most 64 are supported")]
    RegistryTooLarge(usize),
    #[error("networks use different relation registries")]
    RegistryMismatch,
    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),
    #[error("empty network")]
    EmptyNetwork,
    #[error(
        "brute-force matching refused: min(n_source, n_target) = {size} exceeds the cap of {cap}"
    )]
    OracleCapExceeded { size: usize, cap: usize },
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("invalid match configuration: {0}")]
    InvalidConfig(String),
    #[error("entity index {index} out of range for {entities} entities")]
    EntityOutOfRange { index: usize, entities: usize },
}

/// Errors from the text parsers (FEN, proof states, areas).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("FEN rank {rank}: {reason}")]
    Fen { rank: usize, reason: String },
    #[error("FEN: {0}")]
    FenLayout(String),
    #[error("non-area path {0:?}")]
    NonAreaPath(String),
    #[error("proof state has no goal line")]
    NoGoal,
    #[error("duplicate hypothesis name {0:?}")]
    DuplicateHypothesis(String),
    #[error("proof state line {line}: {reason}")]
    StateLine { line: usize, reason: String },
}

/// Errors from the statistics stage.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("area universe is empty")]
    EmptyUniverse,
    #[error("area {0:?} is observed in the corpus but missing from the area universe")]
    AreaNotInUniverse(String),
    #[error("area {0:?} is not in the area universe")]
    UnknownArea(String),
    #[error("source and target area are both {0:?}")]
    SameArea(String),
    #[error("excluded source area: {0:?} is on the source exclusion list")]
    ExcludedSource(String),
    #[error("excluded target area: {0:?} is on the target exclusion list")]
    ExcludedTarget(String),
}

/// Errors from reading the line-delimited interchange files.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: line {line}: {reason}")]
    Record {
        path: String,
        line: usize,
        reason: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
