use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report. The variant name doubles as the
/// stable error identifier printed by the CLI and mapped to FFI status codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("column {0} has zero norm")]
    ZeroColumn(usize),
    #[error("matrix is identically zero")]
    ZeroMatrix,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("support enumeration needs {needed} subsets, budget is {budget}")]
    TooManySupports { needed: u128, budget: u128 },
    #[error("invalid model spec: {0}")]
    InvalidSpec(String),
    #[error("sparsity {k} exceeds dimension {p}")]
    BadSparsity { k: usize, p: usize },
    #[error("bad shape: {0}")]
    BadShape(String),
    #[error("system is inconsistent (least-squares residual {residual:.3e})")]
    Infeasible { residual: f64 },
    #[error("solver hit the iteration limit ({0})")]
    MaxIters(usize),
    #[error("hyperplane constraint is degenerate (|Y^T r|_inf = {0:.3e})")]
    DegenerateConstraint(f64),
    #[error("brute-force oracle limited to {limit} columns, got {cols}")]
    TooLarge { cols: usize, limit: usize },
    #[error("every row pairing produced a degenerate constraint")]
    AllDegenerate,
    #[error("no usable candidate column")]
    NoCandidates,
    #[error("sparse factorization failed: {0}")]
    FactorizationFailed(String),
    #[error("not enough easy training columns: {0}")]
    NotEnoughEasy(String),
    #[error("no sparsity level produced a solution")]
    AllFailed,
    #[error("infeasible knobs: {0}")]
    InfeasibleKnobs(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable identifier, e.g. `ZeroColumn`.
    pub fn name(&self) -> &'static str {
        match self {
            Error::ZeroColumn(_) => "ZeroColumn",
            Error::ZeroMatrix => "ZeroMatrix",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::NonFinite { .. } => "NonFinite",
            Error::TooManySupports { .. } => "TooManySupports",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::BadSparsity { .. } => "BadSparsity",
            Error::BadShape(_) => "BadShape",
            Error::Infeasible { .. } => "Infeasible",
            Error::MaxIters(_) => "MaxIters",
            Error::DegenerateConstraint(_) => "DegenerateConstraint",
            Error::TooLarge { .. } => "TooLarge",
            Error::AllDegenerate => "AllDegenerate",
            Error::NoCandidates => "NoCandidates",
            Error::FactorizationFailed(_) => "FactorizationFailed",
            Error::NotEnoughEasy(_) => "NotEnoughEasy",
            Error::AllFailed => "AllFailed",
            Error::InfeasibleKnobs(_) => "InfeasibleKnobs",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Parse(_) => "Parse",
            Error::Io(_) => "IoError",
            Error::Json(_) => "JsonError",
            Error::Csv(_) => "CsvError",
        }
    }
}
