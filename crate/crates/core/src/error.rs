use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library reports.
///
/// Variants fall in two groups: invalid input (bad grids, operators,
/// coefficients, exponents) and numerical failure (singular modes,
/// nonconvergence, suspected blow-up). [`Error::is_numerical`] tells them
/// apart; the command-line runner maps them to different exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("non-finite value at {location}")]
    NonFinite { location: String },

    #[error("non-finite multiplier at frequency {frequency:?}")]
    NonFiniteMultiplier { frequency: Vec<i64> },

    #[error("singular homogeneous multiplier: order {order} with nonzero mean mode")]
    SingularMultiplier { order: f64 },

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("operator is not Hermitian (relative defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("operator is not absolute positive (smallest eigenvalue {margin:.6e})")]
    NotPositive { margin: f64 },

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("invalid multipoint data: {0}")]
    InvalidMultipoint(String),

    #[error("time {t} outside sampled range [0, {end}]")]
    TimeOutOfRange { t: f64, end: f64 },

    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(String),

    #[error("singular multipoint mode at {} frequencies (first {:?})", .frequencies.len(), .frequencies.first())]
    SingularModes { frequencies: Vec<Vec<i64>> },

    #[error("time {t} beyond wraparound bound {bound}")]
    BeyondWraparound { t: f64, bound: f64 },

    #[error("invalid nonlinearity: {0}")]
    InvalidNonlinearity(String),

    #[error("Picard iteration did not converge after {iterations} iterations (last difference {last:.3e})")]
    NotConverged { iterations: usize, last: f64 },

    #[error("Picard iterate left the ball: norm {norm:.3e} exceeds {bound:.3e}")]
    Diverged { norm: f64, bound: f64 },

    #[error("window {window:.3e} below minimum at t = {time}; blow-up suspected")]
    BlowUpSuspected {
        time: f64,
        window: f64,
        windows: Vec<f64>,
        partial: Option<Box<crate::spectral::SpectralTrajectory>>,
    },

    #[error("RK4 step {dt} exceeds stability bound {bound:.6e}")]
    UnstableStep { dt: f64, bound: f64 },

    #[error("config line {line}: {kind}: {message}")]
    Config { line: usize, kind: ConfigErrorKind, message: String },

    #[error("snapshot format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Distinct config failure classes, each with a stable reason code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigErrorKind {
    Syntax,
    UnknownSection,
    UnknownKey,
    MalformedNumber,
    MalformedComplex,
    MissingKey,
    MissingSeed,
    MissingFile,
    UnknownScenario,
    Invalid,
}

impl ConfigErrorKind {
    pub fn code(self) -> &'static str {
        match self {
            Self::Syntax => "syntax",
            Self::UnknownSection => "unknown-section",
            Self::UnknownKey => "unknown-key",
            Self::MalformedNumber => "malformed-number",
            Self::MalformedComplex => "malformed-complex",
            Self::MissingKey => "missing-key",
            Self::MissingSeed => "missing-seed",
            Self::MissingFile => "missing-file",
            Self::UnknownScenario => "unknown-scenario",
            Self::Invalid => "invalid",
        }
    }
}

impl std::fmt::Display for ConfigErrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

impl Error {
    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularModes { .. }
                | Error::NotConverged { .. }
                | Error::Diverged { .. }
                | Error::BlowUpSuspected { .. }
                | Error::NonFinite { .. }
        )
    }

    /// Short machine-readable reason code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidGrid(_) => "invalid-grid",
            Error::ShapeMismatch(_) => "shape-mismatch",
            Error::NonFinite { .. } => "non-finite",
            Error::NonFiniteMultiplier { .. } => "non-finite-multiplier",
            Error::SingularMultiplier { .. } => "singular-multiplier",
            Error::InvalidExponent(_) => "invalid-exponent",
            Error::NotHermitian { .. } => "not-hermitian",
            Error::NotPositive { .. } => "not-absolute-positive",
            Error::InvalidOperator(_) => "invalid-operator",
            Error::InvalidMultipoint(_) => "invalid-multipoint",
            Error::TimeOutOfRange { .. } => "time-out-of-range",
            Error::InvalidTimeGrid(_) => "invalid-time-grid",
            Error::SingularModes { .. } => "singular-multipoint-mode",
            Error::BeyondWraparound { .. } => "beyond-wraparound",
            Error::InvalidNonlinearity(_) => "invalid-nonlinearity",
            Error::NotConverged { .. } => "not-converged",
            Error::Diverged { .. } => "diverged",
            Error::BlowUpSuspected { .. } => "blow-up-suspected",
            Error::UnstableStep { .. } => "unstable-step",
            Error::Config { kind, .. } => kind.code(),
            Error::Format(_) => "format",
            Error::Io(_) => "io",
        }
    }
}
