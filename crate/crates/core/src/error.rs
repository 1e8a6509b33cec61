use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the toolkit can report.
///
/// Numeric payloads are carried as `f64` regardless of the scalar type the
/// computation ran in, so errors stay printable and comparable.
#[derive(Debug, Error)]
pub enum Error {
    #[error("permeability is singular at f = {f_hz} Hz (Omega equals Omega_H)")]
    SingularPermeability { f_hz: f64 },

    #[error("frequency must be positive, got {0} Hz")]
    NonPositiveFrequency(f64),

    #[error("bias field must be positive, got {0} G")]
    NonPositiveField(f64),

    #[error("argument must be non-negative, got {0}")]
    NegativeArgument(f64),

    #[error("dipole-exchange radicand is non-positive in the {bracket} bracket")]
    NegativeRadicand { bracket: &'static str },

    #[error("no self-consistent solution in band for k_x = {k_x} rad/cm, m = {m}")]
    NoSolutionInBand { k_x: f64, m: u32 },

    #[error("solver did not converge after {iterations} iterations (|residual| = {residual_hz} Hz)")]
    NonConvergence { iterations: usize, residual_hz: f64 },

    #[error("at least two modes sharing a width order are required")]
    TooFewModes,

    #[error("position y = {y} cm is outside the cavity aperture [0, {width}]")]
    OutOfDomain { y: f64, width: f64 },

    #[error("transducer gap collapses to {gap} cm at y = {y} cm")]
    NonPhysicalGap { y: f64, gap: f64 },

    #[error("quadrature did not reach tolerance within {subdivisions} subdivisions (error estimate {error_estimate})")]
    QuadratureFailure { subdivisions: usize, error_estimate: f64 },

    #[error("coupling spectrum is identically zero")]
    DegenerateCoupling,

    #[error("load impedance equals -z0; reflection coefficient undefined")]
    DegenerateLoad,

    #[error("no cavity mode was solved in band")]
    EmptyModeSet,

    #[error("response has no passband (max |S21| below 1e-6)")]
    NoPassband,

    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),

    #[error("{0}")]
    Validation(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// Coarse classification used to map failures onto process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Numerical,
    Io,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            Io(_) => ErrorClass::Io,
            SingularPermeability { .. }
            | NegativeRadicand { .. }
            | NoSolutionInBand { .. }
            | NonConvergence { .. }
            | QuadratureFailure { .. }
            | DegenerateCoupling
            | DegenerateLoad
            | EmptyModeSet
            | NoPassband => ErrorClass::Numerical,
            _ => ErrorClass::Validation,
        }
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        match err.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Io(std::io::Error::other(format!("{other:?}"))),
        }
    }
}
