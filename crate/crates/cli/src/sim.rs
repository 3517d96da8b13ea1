//! `snap` and `swim` drivers.

use serde::Serialize;

use hcm_core::model::derive_lengths;
use hcm_core::postbuckle::analyze;
use hcm_core::snapdyn::{default_snap, DoubleWell, Medium, SnapRun};
use hcm_core::swim::{
    comparison_table, cruise_speed, fit_hydro_with_drag, mean_square_tip_rate, settling_horizon, HydroFit, SwimResult,
    WaveKind, Waveform, DEFAULT_K_DRAG,
};

use crate::calib::LoadedCalibration;
use crate::config::{Design, SwimBlock};
use crate::error::CliError;
use crate::Format;

#[allow(non_snake_case)]
#[derive(Debug, Serialize)]
pub struct SnapSummary {
    pub medium: Medium,
    pub zeta: f64,
    pub duration_ms: f64,
    pub t_star_ms: f64,
    pub kick_rad_s: f64,
    pub psi_eq_deg: f64,
    pub u_barr_J: f64,
}

pub fn run_snap(design: &Design, calib: &LoadedCalibration, medium: Medium) -> Result<(SnapSummary, SnapRun), CliError> {
    calib.check_model(design.buckling.model)?;
    let a = analyze(&design.geometry, &design.material, &design.buckling, Some(&calib.calibration))?;
    let zeta = design.config.zeta(medium);
    let well = DoubleWell::from_analysis(&a, &design.geometry, &design.material, zeta)?;
    let run = default_snap(&well, a.t_star)?;
    let summary = SnapSummary {
        medium,
        zeta,
        duration_ms: run.duration * 1e3,
        t_star_ms: a.t_star * 1e3,
        kick_rad_s: run.kick,
        psi_eq_deg: a.psi_eq.to_degrees(),
        u_barr_J: a.u_barr,
    };
    Ok((summary, run))
}

pub fn snap_text(s: &SnapSummary, format: Format) -> Result<String, CliError> {
    Ok(match format {
        Format::Json => crate::to_json(s)?,
        Format::Csv => format!(
            "medium,zeta,duration_ms,t_star_ms,kick_rad_s,psi_eq_deg,u_barr_J\n{},{},{},{},{},{},{}\n",
            medium_name(s.medium),
            s.zeta,
            s.duration_ms,
            s.t_star_ms,
            s.kick_rad_s,
            s.psi_eq_deg,
            s.u_barr_J
        ),
    })
}

pub fn medium_name(m: Medium) -> &'static str {
    match m {
        Medium::Air => "air",
        Medium::Water => "water",
    }
}

pub fn kind_name(k: WaveKind) -> &'static str {
    match k {
        WaveKind::Sinusoid => "sinusoid",
        WaveKind::Bistable => "bistable",
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SwimLine {
    pub waveform: WaveKind,
    pub amplitude_deg: f64,
    pub frequency_hz: f64,
    pub snap_time_ms: Option<f64>,
    pub mean_square_rate: f64,
    pub peak_rate_deg_s: f64,
    pub speed_cm_s: f64,
    pub speed_bl_s: f64,
    pub accel0_cm_s2: f64,
}

#[derive(Debug, Serialize)]
pub struct SwimSummary {
    pub hydro: HydroFit,
    pub body_length_m: f64,
    pub runs: Vec<SwimLine>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bistable_over_sinusoid: Option<f64>,
}

/// Lumped hydrodynamics: explicit coefficients when both are given, else fit
/// to the reference point and move the thrust to this design's tail lever.
pub fn hydro_for(design: &Design) -> Result<(HydroFit, f64), CliError> {
    let h = design
        .config
        .hydro
        .as_ref()
        .ok_or_else(|| CliError::Input("swim needs a \"hydro\" block with coefficients or a reference point".into()))?;
    if let (Some(k_thrust), Some(k_drag)) = (h.k_thrust_n_s2, h.k_drag_kg_m) {
        let fit = HydroFit { k_thrust, k_drag, mass: h.mass_kg };
        fit.validate()?;
        return Ok((fit, h.body_length_m));
    }
    let r = h.reference.as_ref().ok_or_else(|| {
        CliError::Input("hydro: give both k_thrust_n_s2 and k_drag_kg_m, or a reference point".into())
    })?;
    let reference = Waveform::sinusoid(r.amplitude_deg.to_radians(), r.frequency_hz)?;
    let fit = fit_hydro_with_drag(&reference, r.speed_cm_s * 1e-2, h.mass_kg, h.k_drag_kg_m.unwrap_or(DEFAULT_K_DRAG))?;
    let fit = match r.lever_mm {
        Some(from) => fit.with_lever(from * 1e-3, derive_lengths(&design.geometry).l, h.mass_kg)?,
        None => fit,
    };
    Ok((fit, h.body_length_m))
}

pub fn waveform_for(
    design: &Design,
    calib: &LoadedCalibration,
    kind: WaveKind,
    frequency: Option<f64>,
) -> Result<Waveform, CliError> {
    let swim = design.config.swim.clone().unwrap_or_default();
    let reference = design.config.hydro.as_ref().and_then(|h| h.reference.as_ref());
    let f = frequency
        .or(swim.frequency_hz)
        .or(reference.map(|r| r.frequency_hz))
        .ok_or_else(|| CliError::Input("no frequency: pass --frequency or set swim.frequency_hz".into()))?;
    if !(f.is_finite() && f > 0.0) {
        return Err(CliError::Input(format!("frequency must be > 0, got {f}")));
    }
    match kind {
        WaveKind::Sinusoid => {
            let amp = swim.sinusoid_amplitude_deg.or(reference.map(|r| r.amplitude_deg)).ok_or_else(|| {
                CliError::Input("no sinusoid amplitude: set swim.sinusoid_amplitude_deg or hydro.reference".into())
            })?;
            Ok(Waveform::sinusoid(amp.to_radians(), f)?)
        }
        WaveKind::Bistable => bistable_waveform(design, calib, &swim, f),
    }
}

fn bistable_waveform(design: &Design, calib: &LoadedCalibration, swim: &SwimBlock, f: f64) -> Result<Waveform, CliError> {
    calib.check_model(design.buckling.model)?;
    let a = analyze(&design.geometry, &design.material, &design.buckling, Some(&calib.calibration))?;
    let ts = swim.snap_time_ms.map(|ms| ms * 1e-3).unwrap_or(a.t_star);
    Ok(Waveform::bistable(a.psi_eq, f, ts)?)
}

pub fn swim_line(w: &Waveform, hydro: &HydroFit, body_length: f64) -> Result<(SwimLine, SwimResult), CliError> {
    let r = cruise_speed(w, hydro, body_length, settling_horizon(w, hydro))?;
    let line = SwimLine {
        waveform: w.kind,
        amplitude_deg: w.amplitude.to_degrees(),
        frequency_hz: w.frequency,
        snap_time_ms: (w.kind == WaveKind::Bistable).then_some(w.snap_time * 1e3),
        mean_square_rate: mean_square_tip_rate(w),
        peak_rate_deg_s: w.peak_rate().to_degrees(),
        speed_cm_s: r.v_steady * 1e2,
        speed_bl_s: r.speed_bl_s,
        accel0_cm_s2: r.accel0 * 1e2,
    };
    Ok((line, r))
}

pub fn swim_text(s: &SwimSummary, format: Format) -> Result<String, CliError> {
    Ok(match format {
        Format::Json => crate::to_json(s)?,
        Format::Csv => {
            let mut out = String::from(
                "waveform,amplitude_deg,frequency_hz,snap_time_ms,mean_square_rate,peak_rate_deg_s,speed_cm_s,speed_bl_s,accel0_cm_s2\n",
            );
            for l in &s.runs {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    kind_name(l.waveform),
                    l.amplitude_deg,
                    l.frequency_hz,
                    crate::report::opt(l.snap_time_ms),
                    l.mean_square_rate,
                    l.peak_rate_deg_s,
                    l.speed_cm_s,
                    l.speed_bl_s,
                    l.accel0_cm_s2
                ));
            }
            out
        }
    })
}

pub fn table_csv() -> Result<String, CliError> {
    let mut buf = Vec::new();
    hcm_core::swim::write_table_csv(&comparison_table()?, &mut buf)?;
    Ok(String::from_utf8(buf).unwrap_or_default())
}
