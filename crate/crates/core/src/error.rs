use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },

    #[error("point {x} lies outside [0,1]")]
    Domain { x: String },

    #[error("map failed validation: {0}")]
    InvalidMap(String),

    #[error("exact scalar exceeded the bit budget at iterate {step} ({bits} bits > {budget})")]
    BitBudget { step: usize, bits: u64, budget: u64 },

    #[error("combinatorial budget exceeded after examining {examined} itinerary words")]
    WordBudget { examined: usize },

    #[error("operation requires the {required} backend")]
    BackendRequired { required: &'static str },

    #[error("operation requires affine branches")]
    AffineRequired,

    #[error("no base point found: every f^l(q) for l <= {max_skip} re-enters the critical set within the probe depth")]
    BasePointNotFound { max_skip: usize },

    #[error("measure was not produced by this map (sample mismatch at index {index})")]
    MeasureMapMismatch { index: usize },

    #[error("map is not injective on the sample set: f({x}) = f({y})")]
    NonInjectiveSample { x: String, y: String },

    #[error("branch evaluation failed: {0}")]
    BranchEval(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }
}
