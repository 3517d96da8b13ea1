use std::fmt;

use hcm_core::HcmError;

/// Failure of a subcommand, split along the exit-code contract.
#[derive(Debug)]
pub enum CliError {
    /// Bad config, flag or input file: exit 2.
    Input(String),
    /// Solver or integrator failure, or a design that cannot do what was
    /// asked: exit 3.
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Numeric(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<HcmError> for CliError {
    fn from(e: HcmError) -> Self {
        let msg = e.to_string();
        match e {
            HcmError::InvalidGeometry { .. }
            | HcmError::InvalidMaterial { .. }
            | HcmError::InvalidInput(_)
            | HcmError::NotCalibrated
            | HcmError::DegenerateAnchor(_)
            | HcmError::TooCoarse { .. }
            | HcmError::DtTooLarge { .. } => CliError::Input(msg),
            HcmError::NotBistable { .. }
            | HcmError::EigenFailure(_)
            | HcmError::StepTooLarge { .. }
            | HcmError::NonFinite { .. }
            | HcmError::NoCrossing
            | HcmError::NoConvergence { .. }
            | HcmError::FellToOppositeSide { .. } => CliError::Numeric(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(format!("i/o error: {e}"))
    }
}
