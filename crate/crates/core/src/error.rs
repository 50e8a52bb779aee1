use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is rank deficient: smallest/largest singular value ratio {ratio:.3e}")]
    RankDeficient { ratio: f64 },

    #[error("tangent vectors live at different base points")]
    BaseMismatch,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("tangent vector is not horizontal: |X^T delta|_F = {defect:.3e}")]
    NotHorizontal { defect: f64 },

    #[error("{}point leaves the injectivity ball: smallest cosine {smallest_cosine:.3e}", match .sample { Some(k) => format!("sample {k}: "), None => String::new() })]
    OutOfInjectivityBall {
        sample: Option<usize>,
        smallest_cosine: f64,
    },

    #[error(
        "subspaces are not in generic position: smallest singular value of X^T Y is {smallest:.3e}"
    )]
    SubspacesNotInGenericPosition { smallest: f64 },

    #[error("Neville table cell ({i}, {j}) failed: {source}")]
    NevilleCell {
        i: usize,
        j: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("sample set is empty")]
    EmptySampleSet,

    #[error("invalid sample set: {0}")]
    InvalidSampleSet(String),

    #[error("degenerate interval [{lo}, {hi}]")]
    DegenerateInterval { lo: f64, hi: f64 },

    #[error("at least two snapshots are required, got {0}")]
    TooFewSnapshots(usize),

    #[error("requested {requested} modes but numerical rank is {rank}")]
    RankTooLow { requested: usize, rank: usize },

    #[error("reference snapshots have zero norm")]
    ZeroReference,

    #[error("trajectory and reference time grids differ")]
    TimeGridMismatch,

    #[error("parameter {value} outside family domain [{lo}, {hi}]")]
    OutOfDomain { value: f64, lo: f64, hi: f64 },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("HDM run became unstable at t = {time:.4e} (max |u| = {max_abs:.3e})")]
    UnstableRun { time: f64, max_abs: f64 },

    #[error("ROM diverged at t = {time:.4e} (|a| = {norm:.3e})")]
    Divergence { time: f64, norm: f64 },

    #[error("malformed matrix file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics (as opposed to malformed input).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::RankDeficient { .. }
            | Error::OutOfInjectivityBall { .. }
            | Error::SubspacesNotInGenericPosition { .. }
            | Error::RankTooLow { .. }
            | Error::ZeroReference
            | Error::UnstableRun { .. }
            | Error::Divergence { .. } => true,
            Error::NevilleCell { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::RankDeficient { .. } => "rank_deficient",
            Error::BaseMismatch => "base_mismatch",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NotHorizontal { .. } => "not_horizontal",
            Error::OutOfInjectivityBall { .. } => "out_of_injectivity_ball",
            Error::SubspacesNotInGenericPosition { .. } => "subspaces_not_in_generic_position",
            Error::NevilleCell { .. } => "neville_cell",
            Error::EmptySampleSet => "empty_sample_set",
            Error::InvalidSampleSet(_) => "invalid_sample_set",
            Error::DegenerateInterval { .. } => "degenerate_interval",
            Error::TooFewSnapshots(_) => "too_few_snapshots",
            Error::RankTooLow { .. } => "rank_too_low",
            Error::ZeroReference => "zero_reference",
            Error::TimeGridMismatch => "time_grid_mismatch",
            Error::OutOfDomain { .. } => "out_of_domain",
            Error::InvalidProblem(_) => "invalid_problem",
            Error::UnstableRun { .. } => "unstable_run",
            Error::Divergence { .. } => "divergence",
            Error::Format(_) => "format",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub(crate) fn dims(n: usize, m: usize) -> String {
    format!("{n}x{m}")
}
