//! Reduced-order undulatory propulsion: tail waveforms, a lumped
//! thrust ∝ ⟨ψ̇²⟩ / drag ∝ v² balance, and speed bookkeeping.

use std::f64::consts::PI;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{HcmError, Result};

/// `½ ρ_w C_D A` with ρ_w = 1000 kg/m³, C_D = 0.4 and a 20 cm² frontal area.
pub const DEFAULT_K_DRAG: f64 = 0.5 * 1000.0 * 0.4 * 2.0e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveKind {
    Sinusoid,
    Bistable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waveform {
    pub kind: WaveKind,
    /// Tip half-amplitude (Ψ or ψ_eq), rad.
    pub amplitude: f64,
    pub frequency: f64,
    /// Duration of one transition, s. Ignored for sinusoids.
    pub snap_time: f64,
    pub snaps_per_period: u32,
}

impl Waveform {
    pub fn sinusoid(amplitude: f64, frequency: f64) -> Result<Self> {
        let w = Self { kind: WaveKind::Sinusoid, amplitude, frequency, snap_time: 0.0, snaps_per_period: 2 };
        w.validate()?;
        Ok(w)
    }

    pub fn bistable(psi_eq: f64, frequency: f64, snap_time: f64) -> Result<Self> {
        Self::bistable_with(psi_eq, frequency, snap_time, 2)
    }

    pub fn bistable_with(psi_eq: f64, frequency: f64, snap_time: f64, snaps_per_period: u32) -> Result<Self> {
        let w = Self { kind: WaveKind::Bistable, amplitude: psi_eq, frequency, snap_time, snaps_per_period };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HcmError::InvalidInput(m));
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return bad(format!("amplitude must be >= 0, got {}", self.amplitude));
        }
        if !(self.frequency.is_finite() && self.frequency > 0.0) {
            return bad(format!("frequency must be > 0, got {}", self.frequency));
        }
        if self.kind == WaveKind::Bistable {
            if !(self.snap_time.is_finite() && self.snap_time > 0.0) {
                return bad(format!("snap_time must be > 0, got {}", self.snap_time));
            }
            if self.snaps_per_period == 0 || !self.snaps_per_period.is_multiple_of(2) {
                return bad(format!("snaps_per_period must be a positive even number, got {}", self.snaps_per_period));
            }
            let busy = self.snaps_per_period as f64 * self.frequency * self.snap_time;
            if busy >= 1.0 {
                return bad(format!("transitions do not fit in the period ({busy:.3} of it)"));
            }
        }
        Ok(())
    }

    /// Largest sampling step accepted by [`waveform_series`].
    pub fn max_dt(&self) -> f64 {
        let base = 1.0 / (50.0 * self.frequency);
        match self.kind {
            WaveKind::Sinusoid => base,
            WaveKind::Bistable => base.min(self.snap_time / 10.0),
        }
    }

    pub fn peak_rate(&self) -> f64 {
        match self.kind {
            WaveKind::Sinusoid => 2.0 * PI * self.frequency * self.amplitude,
            WaveKind::Bistable => 2.0 * self.amplitude / self.snap_time,
        }
    }

    /// `(ψ, ψ̇)` at time `t`.
    pub fn sample(&self, t: f64) -> (f64, f64) {
        match self.kind {
            WaveKind::Sinusoid => {
                let w = 2.0 * PI * self.frequency;
                (self.amplitude * (w * t).sin(), self.amplitude * w * (w * t).cos())
            }
            WaveKind::Bistable => {
                let seg = 1.0 / (self.frequency * self.snaps_per_period as f64);
                let k = (t / seg).floor();
                let tau = t - k * seg;
                let dir = if (k as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                let a = self.amplitude;
                if tau < self.snap_time {
                    (dir * (-a + 2.0 * a * tau / self.snap_time), dir * 2.0 * a / self.snap_time)
                } else {
                    (dir * a, 0.0)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct WaveSeries {
    pub time: Vec<f64>,
    pub psi: Vec<f64>,
    pub psi_dot: Vec<f64>,
}

impl WaveSeries {
    /// Sample mean of `ψ̇²`.
    pub fn mean_square_rate(&self) -> f64 {
        self.psi_dot.iter().map(|v| v * v).sum::<f64>() / self.psi_dot.len() as f64
    }
}

/// Samples at `t = i·dt` for `0 ≤ t < T`.
pub fn waveform_series(w: &Waveform, dt: f64, t_end: f64) -> Result<WaveSeries> {
    w.validate()?;
    let limit = w.max_dt();
    if !(dt.is_finite() && dt > 0.0) || dt > limit {
        return Err(HcmError::DtTooLarge { dt, limit });
    }
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(HcmError::InvalidInput(format!("T must be > 0, got {t_end}")));
    }
    let n = (t_end / dt).round() as usize;
    let mut s = WaveSeries::default();
    for i in 0..n {
        let t = i as f64 * dt;
        let (p, v) = w.sample(t);
        s.time.push(t);
        s.psi.push(p);
        s.psi_dot.push(v);
    }
    Ok(s)
}

/// Cycle average of `ψ̇²`, (rad/s)².
pub fn mean_square_tip_rate(w: &Waveform) -> f64 {
    match w.kind {
        WaveKind::Sinusoid => (2.0 * PI * w.frequency * w.amplitude).powi(2) / 2.0,
        WaveKind::Bistable => {
            let rate = 2.0 * w.amplitude / w.snap_time;
            rate * rate * w.snaps_per_period as f64 * w.frequency * w.snap_time
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HydroFit {
    /// N·s², multiplies ⟨ψ̇²⟩.
    pub k_thrust: f64,
    /// kg/m.
    pub k_drag: f64,
    pub mass: f64,
}

impl HydroFit {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("k_thrust", self.k_thrust), ("k_drag", self.k_drag), ("mass", self.mass)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(HcmError::InvalidInput(format!("{name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn steady_speed(&self, w: &Waveform) -> f64 {
        (self.k_thrust * mean_square_tip_rate(w) / self.k_drag).sqrt()
    }

    /// Transfer to a tail of a different lever length: thrust scales with
    /// the lever squared, body drag is kept.
    pub fn with_lever(&self, from: f64, to: f64, mass: f64) -> Result<Self> {
        let h = Self { k_thrust: self.k_thrust * (to / from).powi(2), k_drag: self.k_drag, mass };
        h.validate()?;
        Ok(h)
    }
}

pub fn fit_hydro(reference: &Waveform, reference_speed: f64, mass: f64) -> Result<HydroFit> {
    fit_hydro_with_drag(reference, reference_speed, mass, DEFAULT_K_DRAG)
}

pub fn fit_hydro_with_drag(reference: &Waveform, reference_speed: f64, mass: f64, k_drag: f64) -> Result<HydroFit> {
    reference.validate()?;
    if !(reference_speed.is_finite() && reference_speed > 0.0) {
        return Err(HcmError::InvalidInput(format!("reference speed must be > 0, got {reference_speed}")));
    }
    let ms = mean_square_tip_rate(reference);
    if !(ms > 0.0) {
        return Err(HcmError::InvalidInput("reference waveform has no motion".into()));
    }
    let fit = HydroFit { k_thrust: k_drag * reference_speed * reference_speed / ms, k_drag, mass };
    fit.validate()?;
    Ok(fit)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwimResult {
    pub v_steady: f64,
    pub time: Vec<f64>,
    pub v_trace: Vec<f64>,
    pub accel0: f64,
    pub speed_bl_s: f64,
}

impl SwimResult {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "time_s,v_m_s")?;
        for (t, v) in self.time.iter().zip(&self.v_trace) {
            writeln!(w, "{t},{v}")?;
        }
        Ok(())
    }
}

pub const CRUISE_STEPS: usize = 4000;

/// RK4 on `m v̇ = k_T ⟨ψ̇²⟩ − k_D v²` from rest over `[0, T]`.
pub fn cruise_speed(w: &Waveform, hydro: &HydroFit, body_length: f64, t_end: f64) -> Result<SwimResult> {
    w.validate()?;
    hydro.validate()?;
    if !(body_length.is_finite() && body_length > 0.0) {
        return Err(HcmError::InvalidInput(format!("body length must be > 0, got {body_length}")));
    }
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(HcmError::InvalidInput(format!("T must be > 0, got {t_end}")));
    }
    let thrust = hydro.k_thrust * mean_square_tip_rate(w);
    let rhs = |v: f64| (thrust - hydro.k_drag * v * v) / hydro.mass;
    let dt = t_end / CRUISE_STEPS as f64;
    let mut time = Vec::with_capacity(CRUISE_STEPS + 1);
    let mut trace = Vec::with_capacity(CRUISE_STEPS + 1);
    let mut v = 0.0f64;
    for i in 0..=CRUISE_STEPS {
        let t = i as f64 * dt;
        if !v.is_finite() {
            return Err(HcmError::NonFinite { time: t });
        }
        time.push(t);
        trace.push(v);
        let k1 = rhs(v);
        let k2 = rhs(v + 0.5 * dt * k1);
        let k3 = rhs(v + 0.5 * dt * k2);
        let k4 = rhs(v + dt * k3);
        v += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    let v_steady = (thrust / hydro.k_drag).sqrt();
    Ok(SwimResult { v_steady, time, v_trace: trace, accel0: thrust / hydro.mass, speed_bl_s: v_steady / body_length })
}

/// `10 m / (k_D v_s)`: ten time constants of the Riccati approach.
pub fn settling_horizon(w: &Waveform, hydro: &HydroFit) -> f64 {
    10.0 * hydro.mass / (hydro.k_drag * hydro.steady_speed(w))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpeedMetrics {
    pub v: f64,
    pub bl_s: f64,
}

pub fn speed_metrics(distance: f64, duration: f64, body_length: f64) -> Result<SpeedMetrics> {
    for (name, v) in [("distance", distance), ("duration", duration), ("body length", body_length)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(HcmError::InvalidInput(format!("{name} must be > 0, got {v}")));
        }
    }
    let v = distance / duration;
    Ok(SpeedMetrics { v, bl_s: v / body_length })
}

pub fn body_lengths_per_second(v: f64, body_length: f64) -> Result<f64> {
    speed_metrics(v, 1.0, body_length).map(|m| m.bl_s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeedRow {
    pub label: String,
    pub frequency_hz: Option<f64>,
    pub speed_cm_s: f64,
    pub speed_bl_s: f64,
    pub tethered: bool,
}

pub const TETHERED_BODY_LENGTH: f64 = 0.186;
pub const UNTETHERED_BODY_LENGTH: f64 = 0.215;

/// Reported swimmers of the speed-vs-frequency comparison, with BL/s
/// recomputed from the stated speed and body length. Labels note where the
/// recomputed value departs from the quoted one.
pub fn comparison_table() -> Result<Vec<SpeedRow>> {
    let circuit = speed_metrics(5.54, 12.7, UNTETHERED_BODY_LENGTH)?;
    let row = |label: &str, f: Option<f64>, v: f64, bl: f64, tethered: bool| -> Result<SpeedRow> {
        Ok(SpeedRow {
            label: label.into(),
            frequency_hz: f,
            speed_cm_s: v * 100.0,
            speed_bl_s: body_lengths_per_second(v, bl)?,
            tethered,
        })
    };
    Ok(vec![
        row("pneumatic HCM fish (quoted 1.40 BL/s)", Some(1.3), 0.2654, TETHERED_BODY_LENGTH, true)?,
        row("mono-stable reference fish", Some(1.3), 0.1310, TETHERED_BODY_LENGTH, true)?,
        row("untethered HCM fish (also quoted as 42.6 cm/s)", Some(3.0), circuit.v, UNTETHERED_BODY_LENGTH, false)?,
        row("bistable fish with corrected body length", None, 0.08527, 0.15, true)?,
    ])
}

pub fn write_table_csv<W: Write>(rows: &[SpeedRow], mut w: W) -> io::Result<()> {
    writeln!(w, "label,frequency_hz,speed_cm_s,speed_bl_s,tethered")?;
    for r in rows {
        let f = r.frequency_hz.map(|f| f.to_string()).unwrap_or_default();
        writeln!(w, "{},{},{},{},{}", r.label, f, r.speed_cm_s, r.speed_bl_s, r.tethered)?;
    }
    Ok(())
}
