use std::path::PathBuf;

/// Process exit codes. Stable across releases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    Input = 2,
    Computation = 3,
    Degenerate = 4,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Csv { path: PathBuf, message: String },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("unknown config keys: {}", .0.join(", "))]
    UnknownKeys(Vec<String>),
    #[error("{0}")]
    Input(String),
    #[error("corrupted report: {0}")]
    Report(String),
    #[error("report has no fitted series to export")]
    NoSeries,
    #[error(transparent)]
    Core(#[from] wavesel_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        use wavesel_core::Error as E;
        match self {
            CliError::Io { .. }
            | CliError::Csv { .. }
            | CliError::Config(_)
            | CliError::UnknownKeys(_)
            | CliError::Input(_) => ExitCode::Input,
            CliError::Report(_) | CliError::NoSeries => ExitCode::Computation,
            CliError::Core(e) => match e {
                E::DegeneratePredictor => ExitCode::Degenerate,
                E::NoCandidateFits | E::Generation(_) | E::RankDeficient | E::NonFiniteStart(_) => {
                    ExitCode::Computation
                }
                E::EmptyInput
                | E::LengthMismatch(..)
                | E::NonFinite
                | E::InvalidArgument(_)
                | E::DuplicateId(_)
                | E::UnknownModel(_)
                | E::Parse { .. }
                | E::UnsupportedWavelet(_)
                | E::InvalidLevel { .. }
                | E::ResponseDomain(_)
                | E::OutOfUnitInterval(_)
                | E::Unsorted => ExitCode::Input,
                _ => ExitCode::Computation,
            },
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
