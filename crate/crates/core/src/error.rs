use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HcmError {
    #[error("invalid geometry: {field} {reason}")]
    InvalidGeometry { field: &'static str, reason: String },

    #[error("invalid material: {field} {reason}")]
    InvalidMaterial { field: &'static str, reason: String },

    #[error("design is mono-stable (beta = {beta_deg:.4} deg)")]
    NotBistable { beta_deg: f64 },

    #[error("eigen-solve failed: {0}")]
    EigenFailure(String),

    #[error("no calibration available")]
    NotCalibrated,

    #[error("degenerate calibration anchor: uncalibrated tip angle {0:e} rad")]
    DegenerateAnchor(f64),

    #[error("time step too large: undamped energy drift {drift:.3e} of the barrier")]
    StepTooLarge { drift: f64 },

    #[error("non-finite state at t = {time:e} s")]
    NonFinite { time: f64 },

    #[error("trace never leaves the starting well")]
    NoCrossing,

    #[error("ribbon too coarse: {n_links} links (minimum 20)")]
    TooCoarse { n_links: usize },

    #[error("minimizer did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("equilibrium search fell to the opposite side (psi_tip = {psi_tip:.4} rad)")]
    FellToOppositeSide { psi_tip: f64 },

    #[error("time step {dt:e} s exceeds the waveform limit {limit:e} s")]
    DtTooLarge { dt: f64, limit: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, HcmError>;
