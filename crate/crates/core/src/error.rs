use thiserror::Error;

/// Every failure the core numerics can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid cutoff: {0}")]
    InvalidCutoff(&'static str),

    #[error("invalid resource: {0}")]
    InvalidResource(&'static str),

    #[error("invalid input state: {0}")]
    InvalidInput(&'static str),

    #[error("invalid two-mode state: {0}")]
    InvalidState(&'static str),

    #[error("deformation function is zero or non-finite at n = {n}")]
    NonFiniteDeformation { n: usize },

    #[error("deformation table has {len} entries but n = {needed} is required")]
    TableTooShort { len: usize, needed: usize },

    #[error("operator dimensions differ ({left} vs {right})")]
    DimensionMismatch { left: usize, right: usize },

    #[error("resource state vanishes identically")]
    ZeroState,

    #[error("tail mass {tail:.3e} above n = {nmax} exceeds tolerance {tol:.1e}")]
    TailMassExceeded { tail: f64, tol: f64, nmax: usize },

    #[error("closed-form characteristic function fails chi(0,0) = 1 (deviation {deviation:.3e})")]
    SeriesDivergence { deviation: f64 },

    #[error("series changed by {drift:.3e} when the cutoff was extended")]
    SeriesNotConverged { drift: f64 },

    #[error("quadrature did not converge: last change {change:.3e} at {nodes} nodes per axis")]
    NonConvergent { change: f64, nodes: usize },

    #[error("fidelity integral has imaginary part {imag:.3e}")]
    NonRealResult { imag: f64 },

    #[error("fidelity {value} lies outside [0, 1]")]
    OutOfRange { value: f64 },

    #[error("method {0} is not available for this state")]
    MethodUnavailable(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
