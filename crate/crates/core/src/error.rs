use std::fmt;

use thiserror::Error;

/// Problem with a single run record, independent of where it came from.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecordError {
    #[error("duplicate run for solver `{solver}` on instance `{instance}`")]
    DuplicateRun { solver: String, instance: String },
    #[error("unknown problem kind `{0}`")]
    UnknownKind(String),
    #[error("unknown status `{0}`")]
    UnknownStatus(String),
    #[error("negative time `{0}`")]
    NegativeTime(String),
    #[error("invalid number `{value}` in column `{column}`")]
    InvalidNumber { column: &'static str, value: String },
    #[error("invalid participant flag `{0}`")]
    InvalidParticipant(String),
    #[error("missing value for column `{0}`")]
    MissingField(&'static str),
    #[error("timeout must be strictly positive for instance `{0}`")]
    NonPositiveTimeout(String),
    #[error("instance `{instance}` declared with conflicting {what}")]
    InstanceConflict { instance: String, what: &'static str },
    #[error("solver `{0}` declared with conflicting participant flags")]
    ParticipantConflict(String),
    #[error("INCOMPLETE status on decision instance `{0}`")]
    IncompleteOnDecision(String),
    #[error("solved optimization run of `{solver}` on `{instance}` has no objective")]
    MissingObjective { solver: String, instance: String },
    #[error("run of `{solver}` references undeclared instance `{instance}`")]
    UndeclaredInstance { solver: String, instance: String },
    #[error("run references undeclared solver `{0}`")]
    UndeclaredSolver(String),
}

/// Pipeline stage, used to name where a report failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Ingest,
    Filter,
    Borda,
    Oracle,
    MinCover,
    Tradeoff,
    Shapley,
    Write,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Ingest => "ingest",
            Stage::Filter => "filter",
            Stage::Borda => "borda",
            Stage::Oracle => "oracle",
            Stage::MinCover => "mincover",
            Stage::Tradeoff => "tradeoff",
            Stage::Shapley => "shapley",
            Stage::Write => "write",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {source}")]
    Row { line: u64, source: RecordError },
    #[error("line {line}: malformed row: {message}")]
    Malformed { line: u64, message: String },
    #[error(transparent)]
    Record(#[from] RecordError),
    #[error("column mapping: {0}")]
    Mapping(String),
    #[error("unknown solver `{0}`")]
    UnknownSolver(String),
    #[error("unknown instance `{0}`")]
    UnknownInstance(String),
    #[error("dataset has no solvers or no instances")]
    EmptyDataset,
    #[error("problem kinds differ between compared runs")]
    KindMismatch,
    #[error("solver `{0}` is in the portfolio but not in the baseline")]
    NotInBaseline(String),
    #[error("baseline portfolio solves no instance")]
    BaselineSolvesNothing,
    #[error("no instance is solved by any solver in the portfolio")]
    EmptyUniverse,
    #[error("search space is empty")]
    EmptySpace,
    #[error("{what} has {size} solvers, limit is {limit}")]
    TooLarge { what: &'static str, size: usize, limit: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{stage}: {source}")]
    Stage { stage: Stage, source: Box<Error> },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn at(self, stage: Stage) -> Error {
        Error::Stage { stage, source: Box::new(self) }
    }

    /// True when the error stems from user input rather than the environment.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Stage { source, .. } => source.is_validation(),
            Error::Io(_) | Error::Json(_) => false,
            Error::Csv(e) => !e.is_io_error(),
            _ => true,
        }
    }

    /// Stage that produced the error, when known.
    pub fn stage(&self) -> Option<Stage> {
        match self {
            Error::Stage { stage, .. } => Some(*stage),
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
