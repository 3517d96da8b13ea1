//! Locating and checking the tip-angle calibration.

use std::path::{Path, PathBuf};

use serde::Serialize;

use hcm_core::buckling::MomentModel;
use hcm_core::postbuckle::Calibration;

use crate::error::CliError;

/// Default location, relative to the working directory.
pub const DEFAULT_PATH: &str = "data/calibration.json";

const EMBEDDED: &str = include_str!("../../../data/calibration.json");

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedCalibration {
    pub calibration: Calibration,
    /// `None` for the `--uncalibrated` bare integral.
    pub source: Option<String>,
}

/// What reports echo about the calibration. The creation time is left out so
/// reports stay byte-stable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub calibrated: bool,
    pub c_psi: f64,
    pub anchor_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl LoadedCalibration {
    pub fn uncalibrated() -> Self {
        Self { calibration: Calibration::unity(), source: None }
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            calibrated: self.source.is_some(),
            c_psi: self.calibration.c_psi,
            anchor_id: self.calibration.anchor_id.clone(),
            source: self.source.clone(),
        }
    }

    /// A calibration fixes `C_psi` for one moment model only.
    pub fn check_model(&self, model: MomentModel) -> Result<(), CliError> {
        if self.source.is_none() {
            return Ok(());
        }
        let anchored = self.calibration.anchor_id.rsplit(':').next().unwrap_or_default();
        if anchored != model.as_str() {
            return Err(CliError::Input(format!(
                "calibration {} was anchored with moment model \"{anchored}\" but the config uses \"{}\"; \
                 recalibrate or pass --uncalibrated",
                self.calibration.anchor_id,
                model.as_str()
            )));
        }
        Ok(())
    }
}

fn parse(text: &str, origin: &str) -> Result<Calibration, CliError> {
    let c: Calibration =
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("invalid calibration {origin}: {e}")))?;
    c.validate().map_err(|e| CliError::Input(format!("invalid calibration {origin}: {e}")))?;
    Ok(c)
}

/// Explicit path first, then [`DEFAULT_PATH`], then the copy built into the
/// binary.
pub fn load(explicit: Option<&Path>, uncalibrated: bool) -> Result<LoadedCalibration, CliError> {
    if uncalibrated {
        return Ok(LoadedCalibration::uncalibrated());
    }
    let from_file = |p: &Path| -> Result<LoadedCalibration, CliError> {
        let text = std::fs::read_to_string(p)
            .map_err(|e| CliError::Input(format!("cannot read calibration {}: {e}", p.display())))?;
        let origin = p.display().to_string();
        Ok(LoadedCalibration { calibration: parse(&text, &origin)?, source: Some(origin) })
    };
    if let Some(p) = explicit {
        return from_file(p);
    }
    let default = PathBuf::from(DEFAULT_PATH);
    if default.is_file() {
        return from_file(&default);
    }
    Ok(LoadedCalibration { calibration: parse(EMBEDDED, "(built-in)")?, source: Some("built-in".into()) })
}
