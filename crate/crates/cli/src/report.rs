//! `analyze`, `oracle` and `calibrate`.

use serde::Serialize;

use hcm_core::buckling::BucklingOptions;
use hcm_core::model::{bistability_margin, Material, RibbonGeometry};
use hcm_core::oracle::{compare, oracle_report};
use hcm_core::postbuckle::{analyze, calibrate, Calibration, HcmAnalysis};
use hcm_core::snapdyn::snap_timescale;

use crate::calib::{LoadedCalibration, Provenance};
use crate::config::{Design, DesignConfig};
use crate::error::CliError;
use crate::{csv_field, Format};

/// The analytic chain at one design point. A mono-stable point is a valid
/// result: every field that needs the buckled state is `None`.
#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointReport {
    pub bistable: bool,
    pub beta_deg: f64,
    pub psi_l_deg: Option<f64>,
    pub psi_eq_deg: Option<f64>,
    pub P_cr_N: Option<f64>,
    pub U_barr_J: Option<f64>,
    pub U_barr_unitless: Option<f64>,
    pub t_star_ms: f64,
}

pub fn analyze_point(
    geom: &RibbonGeometry,
    mat: &Material,
    opts: &BucklingOptions,
    calib: &Calibration,
) -> Result<(PointReport, Option<HcmAnalysis>), CliError> {
    let margin = bistability_margin(geom);
    let t_star_ms = snap_timescale(geom, mat) * 1e3;
    if !margin.bistable {
        let r = PointReport {
            bistable: false,
            beta_deg: margin.beta.to_degrees(),
            psi_l_deg: None,
            psi_eq_deg: None,
            P_cr_N: None,
            U_barr_J: None,
            U_barr_unitless: None,
            t_star_ms,
        };
        return Ok((r, None));
    }
    let a = analyze(geom, mat, opts, Some(calib))?;
    let r = PointReport {
        bistable: true,
        beta_deg: a.beta.to_degrees(),
        psi_l_deg: Some(a.psi_l.to_degrees()),
        psi_eq_deg: Some(a.psi_eq.to_degrees()),
        P_cr_N: Some(a.p_cr),
        U_barr_J: Some(a.u_barr),
        U_barr_unitless: Some(a.u_barr_unitless),
        t_star_ms: a.t_star * 1e3,
    };
    Ok((r, Some(a)))
}

#[derive(Debug, Serialize)]
struct AnalyzeReport<'a> {
    name: &'a str,
    #[serde(flatten)]
    point: PointReport,
    moment_model: &'static str,
    calibration: Provenance,
    input: &'a DesignConfig,
}

pub fn run_analyze(design: &Design, calib: &LoadedCalibration, format: Format) -> Result<String, CliError> {
    calib.check_model(design.buckling.model)?;
    let (point, _) = analyze_point(&design.geometry, &design.material, &design.buckling, &calib.calibration)?;
    Ok(match format {
        Format::Json => {
            let report = AnalyzeReport {
                name: &design.config.name,
                point,
                moment_model: design.buckling.model.as_str(),
                calibration: calib.provenance(),
                input: &design.config,
            };
            crate::to_json(&report)?
        }
        Format::Csv => {
            let p = &point;
            format!(
                "name,bistable,beta_deg,psi_l_deg,psi_eq_deg,P_cr_N,U_barr_J,U_barr_unitless,t_star_ms\n\
                 {},{},{},{},{},{},{},{},{}\n",
                csv_field(&design.config.name),
                p.bistable,
                p.beta_deg,
                opt(p.psi_l_deg),
                opt(p.psi_eq_deg),
                opt(p.P_cr_N),
                opt(p.U_barr_J),
                opt(p.U_barr_unitless),
                p.t_star_ms
            )
        }
    })
}

pub fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

#[allow(non_snake_case)]
#[derive(Debug, Serialize)]
struct OracleReport<'a> {
    name: &'a str,
    n_links: usize,
    #[serde(flatten)]
    comparison: hcm_core::oracle::Comparison,
    u_min_J: f64,
    u_saddle_J: f64,
    barrier_unitless: f64,
    iterations: usize,
    calibration: Provenance,
}

pub fn run_oracle(
    design: &Design,
    calib: &LoadedCalibration,
    n_links: usize,
    format: Format,
) -> Result<String, CliError> {
    calib.check_model(design.buckling.model)?;
    let (_, analysis) = analyze_point(&design.geometry, &design.material, &design.buckling, &calib.calibration)?;
    let result = oracle_report(&design.geometry, &design.material, n_links)?;
    let cmp = compare(&result, &design.geometry, analysis.as_ref());
    Ok(match format {
        Format::Json => crate::to_json(&OracleReport {
            name: &design.config.name,
            n_links,
            comparison: cmp,
            u_min_J: result.u_min,
            u_saddle_J: result.u_saddle,
            barrier_unitless: result.barrier_unitless,
            iterations: result.iterations,
            calibration: calib.provenance(),
        })?,
        Format::Csv => {
            let nan_empty = |v: f64| if v.is_nan() { String::new() } else { v.to_string() };
            format!(
                "barrier_J,barrier_rel_err,psi_tip_deg,psi_rel_err,converged,bistable\n{},{},{},{},{},{}\n",
                cmp.barrier_j,
                nan_empty(cmp.barrier_rel_err),
                cmp.psi_tip_deg,
                nan_empty(cmp.psi_rel_err),
                cmp.converged,
                cmp.bistable
            )
        }
    })
}

/// Anchor `C_psi` on the configured design. The anchor id records the design
/// name and the moment model, which later loads are checked against.
pub fn run_calibrate(design: &Design, psi_deg: f64) -> Result<(Calibration, String), CliError> {
    if !(psi_deg.is_finite() && psi_deg > 0.0) {
        return Err(CliError::Input(format!("--psi-deg must be > 0, got {psi_deg}")));
    }
    let name = if design.config.name.is_empty() { "anchor" } else { design.config.name.as_str() };
    let id = format!("{name}:{}", design.buckling.model.as_str());
    let created = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
    let c = calibrate(&design.geometry, &design.material, psi_deg.to_radians(), &design.buckling, id, created)?;
    let body = crate::to_json(&c)?;
    Ok((c, body))
}
