use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unsupported Daubechies order {0}; supported orders are 1 through 4")]
    UnsupportedWavelet(usize),
    #[error("invalid scaling filter: {0}")]
    InvalidFilter(&'static str),
    #[error("signal length {0} is not a power of two")]
    NotDyadic(usize),
    #[error("coarse level {coarse} must be below the maximum level {max}")]
    InvalidLevel { coarse: usize, max: usize },
    #[error("coefficient pyramid is malformed: {0}")]
    MalformedPyramid(&'static str),
    #[error("cascade argument {0} is outside the open interval (0, 1)")]
    CascadeDomain(f64),
    #[error("cascade depth must be at least 1")]
    CascadeDepth,
    #[error("the eigenvalue-1 eigenspace of the refinement matrix is not one-dimensional")]
    DegenerateEigenspace,
    #[error("input is empty")]
    EmptyInput,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("value {0} lies outside [0, 1]")]
    OutOfUnitInterval(f64),
    #[error("predictor values must be sorted in ascending order")]
    Unsorted,
    #[error("input contains a non-finite value")]
    NonFinite,
    #[error("{0}")]
    InvalidArgument(String),
    #[error("design matrix is rank deficient")]
    RankDeficient,
    #[error("response lies outside the support of the {0} family")]
    ResponseDomain(&'static str),
    #[error("fitted means left the domain of the {0} link after step halving")]
    LinkDomain(&'static str),
    #[error("model {0} is not finite at the starting values; supply an explicit start")]
    NonFiniteStart(String),
    #[error("degenerate linear predictor: max and min of the OLS predictor coincide")]
    DegeneratePredictor,
    #[error("no candidate model could be fitted")]
    NoCandidateFits,
    #[error("duplicate candidate id {0}")]
    DuplicateId(String),
    #[error("unknown model id {0}")]
    UnknownModel(String),
    #[error("expression error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("data generation failed: {0}")]
    Generation(String),
}
