use thiserror::Error;

/// Errors produced by the numerical pipeline and its file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate field: total power is zero")]
    DegenerateField,

    #[error("polar window exceeds grid: r_max {r_max:e} > {limit:e}")]
    PolarWindowExceedsGrid { r_max: f64, limit: f64 },

    #[error("carrier undersampled: pitch {pitch:e} m exceeds period/4 = {limit:e} m")]
    CarrierUndersampled { pitch: f64, limit: f64 },

    #[error("malformed PGM: {0}")]
    MalformedPgm(String),

    #[error("malformed CFLD1: {0}")]
    MalformedField(String),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("non-square grid {nx}x{ny}: this transform needs nx == ny")]
    NonSquareGrid { nx: usize, ny: usize },

    #[error("use angular-spectrum regime: |z| = {z:e} m is below the chirp sampling bound {critical:e} m")]
    UseAngularSpectrum { z: f64, critical: f64 },

    #[error("expected a {expected} field, got {found}")]
    WrongPlane {
        expected: &'static str,
        found: &'static str,
    },

    #[error("disk exits grid: order centre ({x:e}, {y:e}) lies outside the sampled plane")]
    DiskExitsGrid { x: f64, y: f64 },

    #[error("formula undefined for m=0")]
    UndefinedForZeroM,

    #[error("quadrature did not converge: {0}")]
    NonConvergent(String),

    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
