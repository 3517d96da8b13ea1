//! JSON design configuration. Field names carry their units; everything is
//! converted to SI here and nowhere else.

use std::path::Path;

use serde::{Deserialize, Serialize};

use hcm_core::buckling::{BucklingOptions, MomentModel};
use hcm_core::model::{Material, RibbonGeometry, TorsionMode};
use hcm_core::snapdyn::{Medium, AIR_ZETA, WATER_ZETA};

use crate::error::CliError;

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryBlock {
    pub L1_mm: f64,
    pub gamma_s: f64,
    pub theta_deg: f64,
    pub h_mm: f64,
    pub t_mm: f64,
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub E_GPa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_kg_m3: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsBlock {
    #[serde(default)]
    pub j_correction: bool,
    #[serde(default = "default_n_grid")]
    pub n_grid: usize,
    #[serde(default = "default_n_links")]
    pub n_links: usize,
    #[serde(default)]
    pub moment_model: MomentModel,
    #[serde(default = "default_zeta_air")]
    pub zeta_air: f64,
    #[serde(default = "default_zeta_water")]
    pub zeta_water: f64,
}

fn default_n_grid() -> usize {
    BucklingOptions::default().n_grid
}

fn default_n_links() -> usize {
    60
}

fn default_zeta_air() -> f64 {
    AIR_ZETA
}

fn default_zeta_water() -> f64 {
    WATER_ZETA
}

impl Default for OptionsBlock {
    fn default() -> Self {
        Self {
            j_correction: false,
            n_grid: default_n_grid(),
            n_links: default_n_links(),
            moment_model: MomentModel::default(),
            zeta_air: AIR_ZETA,
            zeta_water: WATER_ZETA,
        }
    }
}

/// A measured swimming point used to fit the lumped hydrodynamics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferencePoint {
    pub amplitude_deg: f64,
    pub frequency_hz: f64,
    pub speed_cm_s: f64,
    /// Tail lever of the swimmer the point was measured on; the fit is
    /// transferred to this design's span when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lever_mm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HydroBlock {
    pub mass_kg: f64,
    pub body_length_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_drag_kg_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_thrust_n_s2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferencePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwimBlock {
    /// Transition time of the bistable tail; defaults to the snap timescale.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snap_time_ms: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency_hz: Option<f64>,
    /// Half-amplitude of the sinusoidal tail; defaults to the reference
    /// point's amplitude.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sinusoid_amplitude_deg: Option<f64>,
    #[serde(default = "default_medium")]
    pub medium: Medium,
}

fn default_medium() -> Medium {
    Medium::Water
}

impl Default for SwimBlock {
    fn default() -> Self {
        Self { snap_time_ms: None, frequency_hz: None, sinusoid_amplitude_deg: None, medium: default_medium() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignConfig {
    #[serde(default)]
    pub name: String,
    pub geometry: GeometryBlock,
    pub material: MaterialBlock,
    #[serde(default)]
    pub options: OptionsBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hydro: Option<HydroBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub swim: Option<SwimBlock>,
}

/// The validated SI view of a config.
#[derive(Debug, Clone)]
pub struct Design {
    pub config: DesignConfig,
    pub geometry: RibbonGeometry,
    pub material: Material,
    pub buckling: BucklingOptions,
}

impl DesignConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("invalid config {}: {e}", path.display())))
    }

    pub fn geometry(&self) -> Result<RibbonGeometry, CliError> {
        let g = &self.geometry;
        Ok(RibbonGeometry::new(g.L1_mm * 1e-3, g.gamma_s, g.theta_deg.to_radians(), g.h_mm * 1e-3, g.t_mm * 1e-3)?)
    }

    pub fn material(&self) -> Result<Material, CliError> {
        let m = &self.material;
        match (&m.preset, m.E_GPa, m.nu, m.rho_kg_m3) {
            (Some(name), None, None, None) => {
                Material::preset(name).ok_or_else(|| CliError::Input(format!("material: unknown preset \"{name}\"")))
            }
            (None, Some(e), Some(nu), Some(rho)) => Ok(Material::new(e * 1e9, nu, rho)?),
            _ => Err(CliError::Input(
                "material: give either \"preset\" or all of \"E_GPa\", \"nu\", \"rho_kg_m3\"".into(),
            )),
        }
    }

    pub fn torsion(&self) -> TorsionMode {
        if self.options.j_correction {
            TorsionMode::EndCorrected
        } else {
            TorsionMode::ThinStrip
        }
    }

    pub fn buckling(&self) -> BucklingOptions {
        BucklingOptions { model: self.options.moment_model, torsion: self.torsion(), n_grid: self.options.n_grid }
    }

    pub fn zeta(&self, medium: Medium) -> f64 {
        match medium {
            Medium::Air => self.options.zeta_air,
            Medium::Water => self.options.zeta_water,
        }
    }

    pub fn design(self) -> Result<Design, CliError> {
        let geometry = self.geometry()?;
        let material = self.material()?;
        for (name, z) in [("zeta_air", self.options.zeta_air), ("zeta_water", self.options.zeta_water)] {
            if !(z.is_finite() && z >= 0.0) {
                return Err(CliError::Input(format!("options: {name} must be >= 0, got {z}")));
            }
        }
        if let Some(h) = &self.hydro {
            for (name, v) in [("mass_kg", h.mass_kg), ("body_length_m", h.body_length_m)] {
                if !(v.is_finite() && v > 0.0) {
                    return Err(CliError::Input(format!("hydro: {name} must be > 0, got {v}")));
                }
            }
        }
        let buckling = self.buckling();
        Ok(Design { config: self, geometry, material, buckling })
    }
}
