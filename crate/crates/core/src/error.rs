use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite integrand at grid index {index}")]
    NonFiniteIntegrand { index: usize },

    #[error("grid mismatch")]
    GridMismatch,

    #[error("expected a {expected} wave, got a {found} wave")]
    WrongAxis {
        expected: &'static str,
        found: &'static str,
    },

    #[error("support not covered: need [{need_lo}, {need_hi}], grid spans [{have_lo}, {have_hi}]")]
    SupportNotCovered {
        need_lo: f64,
        need_hi: f64,
        have_lo: f64,
        have_hi: f64,
    },

    #[error("lobes overlap: shift L = {shift} must exceed the window extent {extent}")]
    LobesOverlap { shift: f64, extent: f64 },

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("theta grid too small: stencil needs |theta| <= {needed}, grid reaches {available}")]
    ThetaGridTooSmall { needed: f64, available: f64 },

    #[error("invalid moment sequence: {0}")]
    InvalidMomentSequence(String),

    #[error("density would go negative: |beta| = {0} > 1")]
    DensityWouldGoNegative(f64),

    #[error("grid too narrow for Nb = {basis_size}: edge amplitude {edge_amplitude:e}")]
    GridTooNarrowForBasis {
        basis_size: usize,
        edge_amplitude: f64,
    },

    #[error("aliasing detected: marginal mismatch {max_mismatch:e} exceeds {threshold:e}")]
    Aliasing {
        max_mismatch: f64,
        threshold: f64,
        /// Per-x absolute mismatch of the position marginal.
        mismatch_map: Vec<f64>,
    },

    #[error("p grid incompatible with the lag sampling: {0}")]
    IncompatiblePGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
