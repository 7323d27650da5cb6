use crate::coalition::{Coalition, MAX_PLAYERS};
use thiserror::Error;

/// Failure reported by a characteristic function.
#[derive(Debug, Clone, Error)]
#[error("{0}")]
pub struct OracleError(pub String);

impl OracleError {
    pub fn new(message: impl Into<String>) -> Self {
        OracleError(message.into())
    }
}

/// Failure reported by a simulator binding.
#[derive(Debug, Clone, Error)]
#[error("{0}")]
pub struct SimulatorError(pub String);

impl SimulatorError {
    pub fn new(message: impl Into<String>) -> Self {
        SimulatorError(message.into())
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("a game needs at least one player")]
    NoPlayers,
    #[error("{0} players exceed the supported maximum of {MAX_PLAYERS}")]
    TooManyPlayers(usize),
    #[error("duplicate player label `{0}`")]
    DuplicateLabel(String),
    #[error("shapley weight is undefined for subset size {k} in a {n}-player game")]
    WeightDomain { k: usize, n: usize },
    #[error("characteristic function must map the empty coalition to 0, got {0}")]
    NonZeroEmptyCoalition(f64),
    #[error("characteristic function failed on coalition {coalition}: {source}")]
    Oracle {
        coalition: Coalition,
        source: OracleError,
    },
    #[error("simulator failed in simulation {simulation} on coalition {coalition}: {source}")]
    Simulator {
        simulation: usize,
        coalition: Coalition,
        source: SimulatorError,
    },
    #[error("baseline assignment must simulate to 0, got {0}; the replacement rule is broken")]
    BaselineNotNull(f64),
    #[error("graph has {graph} nodes but the game has {game} players")]
    GraphSizeMismatch { graph: usize, game: usize },
    #[error("graph node {node} out of range for {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("malformed graph description: {0}")]
    GraphFormat(String),
    #[error("empty roster")]
    EmptyRoster,
    #[error("agent {0} has no features")]
    AgentWithoutFeatures(u32),
    #[error("agent {agent} declares duplicate feature label `{label}`")]
    DuplicateFeature { agent: u32, label: String },
    #[error("agent {agent} must declare exactly one policy, found {found}")]
    PolicyCount { agent: u32, found: usize },
    #[error("duplicate agent id {0}")]
    DuplicateAgentId(u32),
    #[error("duplicate agent name `{0}`")]
    DuplicateAgentName(String),
    #[error("unknown agent id {0}")]
    UnknownAgent(u32),
    #[error("malformed roster: {0}")]
    RosterFormat(String),
    #[error("assignment holds {got} values for a {expected}-player game")]
    AssignmentLength { got: usize, expected: usize },
    #[error("empty sample")]
    EmptySample,
    #[error("expected one sample per player ({expected}), got {got}")]
    SampleCount { got: usize, expected: usize },
    #[error("simulation count must be at least 1")]
    NoSimulations,
    #[error("a run needs at least one matchup")]
    NoMatchups,
    #[error("invalid match configuration: {0}")]
    MatchConfig(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("could not build worker pool: {0}")]
    ThreadPool(String),
}

pub type Result<T> = std::result::Result<T, Error>;
