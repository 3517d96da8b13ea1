//! Post-buckling analytics: tip bending angle, energy barrier between the two
//! stable states, and the one-constant calibration of the tip angle.

use serde::{Deserialize, Serialize};

use crate::buckling::{critical_load_with, BucklingMode, BucklingOptions};
use crate::error::{HcmError, Result};
use crate::model::{bistability_margin, derive_lengths, require_bistable, section_properties, Material, RibbonGeometry, TorsionMode};
use crate::snapdyn::snap_timescale;

/// Below this magnitude an uncalibrated anchor angle cannot fix `C_psi`.
const DEGENERATE_ANCHOR: f64 = 1e-12;

/// Single multiplier applied to the tip-angle integral, with the identity of
/// the design it was anchored on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Calibration {
    pub c_psi: f64,
    pub anchor_id: String,
    pub created: String,
}

impl Calibration {
    /// `C_psi = 1`, i.e. the bare integral.
    pub fn unity() -> Self {
        Self { c_psi: 1.0, anchor_id: "uncalibrated".into(), created: String::new() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.c_psi.is_finite() && self.c_psi > 0.0 {
            Ok(())
        } else {
            Err(HcmError::InvalidInput(format!("c_psi must be > 0, got {}", self.c_psi)))
        }
    }
}

/// `(P_cr/EI_η) ∫₀^l φ(z)(l−z) dz`, trapezoid rule on the mode grid.
pub fn tip_angle_integral(geom: &RibbonGeometry, mat: &Material, mode: &BucklingMode) -> f64 {
    let l = derive_lengths(geom).l;
    let ei = section_properties(geom, mat, TorsionMode::ThinStrip).ei_eta(mat);
    let integral: f64 = mode
        .grid
        .windows(2)
        .zip(mode.phi.windows(2))
        .map(|(z, f)| 0.5 * (z[1] - z[0]) * (f[0] * (l - z[0]) + f[1] * (l - z[1])))
        .sum();
    (mode.p_cr / ei * integral).abs()
}

/// Stable-state tip bending angle magnitude, rad.
pub fn tip_angle(
    geom: &RibbonGeometry,
    mat: &Material,
    mode: &BucklingMode,
    calib: Option<&Calibration>,
) -> Result<f64> {
    require_bistable(geom)?;
    let calib = calib.ok_or(HcmError::NotCalibrated)?;
    calib.validate()?;
    Ok(calib.c_psi * tip_angle_integral(geom, mat, mode))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBarrier {
    /// J.
    pub u_barr: f64,
    /// `U_barr L1 / (E I_η)`.
    pub u_barr_unitless: f64,
}

/// `U_barr = 3 P_cr L2 β`, β in radians.
pub fn energy_barrier(geom: &RibbonGeometry, mat: &Material, p_cr: f64) -> Result<EnergyBarrier> {
    let beta = require_bistable(geom)?;
    let l2 = derive_lengths(geom).l2;
    let u_barr = 3.0 * p_cr * l2 * beta;
    let ei = section_properties(geom, mat, TorsionMode::ThinStrip).ei_eta(mat);
    Ok(EnergyBarrier { u_barr, u_barr_unitless: u_barr * geom.l1() / ei })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HcmAnalysis {
    pub beta: f64,
    pub psi_l: f64,
    pub psi_eq: f64,
    pub u_barr: f64,
    pub u_barr_unitless: f64,
    pub p_cr: f64,
    pub t_star: f64,
}

pub fn analyze(
    geom: &RibbonGeometry,
    mat: &Material,
    opts: &BucklingOptions,
    calib: Option<&Calibration>,
) -> Result<HcmAnalysis> {
    let beta = require_bistable(geom)?;
    let mode = critical_load_with(geom, mat, opts)?;
    let psi_l = tip_angle(geom, mat, &mode, calib)?;
    let barrier = energy_barrier(geom, mat, mode.p_cr)?;
    Ok(HcmAnalysis {
        beta,
        psi_l,
        psi_eq: psi_l,
        u_barr: barrier.u_barr,
        u_barr_unitless: barrier.u_barr_unitless,
        p_cr: mode.p_cr,
        t_star: snap_timescale(geom, mat),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumStates {
    pub psi_plus: f64,
    pub psi_minus: f64,
    pub u_plus: f64,
    pub u_minus: f64,
}

impl EquilibriumStates {
    pub fn is_degenerate(&self) -> bool {
        self.psi_plus == self.psi_minus
    }
}

/// The mirror pair of stable states. Energies are measured from the well
/// bottom, so both are zero by symmetry.
pub fn equilibrium_states(analysis: &HcmAnalysis) -> Result<EquilibriumStates> {
    if !(analysis.beta > crate::model::BETA_EPS) {
        return Err(HcmError::NotBistable { beta_deg: analysis.beta.to_degrees() });
    }
    let u = 0.0;
    Ok(EquilibriumStates { psi_plus: analysis.psi_eq, psi_minus: -analysis.psi_eq, u_plus: u, u_minus: u })
}

/// Fix `C_psi` so the anchor design reproduces `anchor_psi_l`.
pub fn calibrate(
    anchor_geom: &RibbonGeometry,
    anchor_mat: &Material,
    anchor_psi_l: f64,
    opts: &BucklingOptions,
    anchor_id: impl Into<String>,
    created: impl Into<String>,
) -> Result<Calibration> {
    if !bistability_margin(anchor_geom).bistable {
        require_bistable(anchor_geom)?;
    }
    if !(anchor_psi_l.is_finite() && anchor_psi_l > 0.0) {
        return Err(HcmError::InvalidInput(format!("anchor tip angle must be > 0, got {anchor_psi_l}")));
    }
    let mode = critical_load_with(anchor_geom, anchor_mat, opts)?;
    let bare = tip_angle_integral(anchor_geom, anchor_mat, &mode);
    if bare < DEGENERATE_ANCHOR {
        return Err(HcmError::DegenerateAnchor(bare));
    }
    Ok(Calibration { c_psi: anchor_psi_l / bare, anchor_id: anchor_id.into(), created: created.into() })
}
