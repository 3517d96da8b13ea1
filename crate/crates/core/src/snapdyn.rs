//! Snap-through: the elastic-wave timescale and a one-degree-of-freedom
//! double-well simulator with viscous damping.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{HcmError, Result};
use crate::model::{derive_lengths, Material, RibbonGeometry};
use crate::postbuckle::HcmAnalysis;

pub const AIR_ZETA: f64 = 0.05;
pub const WATER_ZETA: f64 = 1.2;

/// Undamped runs whose energy wanders further than this (relative to the
/// barrier) are rejected as under-resolved.
const MAX_DRIFT: f64 = 0.05;

/// `(2l)² / (t·sqrt(E/ρ))`, s.
pub fn snap_timescale(geom: &RibbonGeometry, mat: &Material) -> f64 {
    let two_l = derive_lengths(geom).two_l;
    two_l * two_l / (geom.t() * (mat.e / mat.rho).sqrt())
}

/// Strip of mass `ρ h t l` rotating about its pinned end: `ρ h t l³ / 3`.
pub fn effective_inertia(geom: &RibbonGeometry, mat: &Material) -> f64 {
    let l = derive_lengths(geom).l;
    mat.rho * geom.h() * geom.t() * l * l * l / 3.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Medium {
    Air,
    Water,
}

impl Medium {
    pub fn zeta(self) -> f64 {
        match self {
            Medium::Air => AIR_ZETA,
            Medium::Water => WATER_ZETA,
        }
    }
}

/// `U(ψ) = U_b ((ψ/ψ_eq)² − 1)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleWell {
    pub u_barr: f64,
    pub psi_eq: f64,
    pub i_eff: f64,
    pub zeta: f64,
}

impl DoubleWell {
    pub fn new(u_barr: f64, psi_eq: f64, i_eff: f64, zeta: f64) -> Result<Self> {
        let pos = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(HcmError::InvalidInput(format!("{name} must be > 0, got {v}")))
            }
        };
        pos("U_barr", u_barr)?;
        pos("psi_eq", psi_eq)?;
        pos("I_eff", i_eff)?;
        if !(zeta.is_finite() && zeta >= 0.0) {
            return Err(HcmError::InvalidInput(format!("zeta must be >= 0, got {zeta}")));
        }
        Ok(Self { u_barr, psi_eq, i_eff, zeta })
    }

    pub fn from_analysis(a: &HcmAnalysis, geom: &RibbonGeometry, mat: &Material, zeta: f64) -> Result<Self> {
        Self::new(a.u_barr, a.psi_eq, effective_inertia(geom, mat), zeta)
    }

    pub fn with_zeta(&self, zeta: f64) -> Result<Self> {
        Self::new(self.u_barr, self.psi_eq, self.i_eff, zeta)
    }

    pub fn potential(&self, psi: f64) -> f64 {
        let q = (psi / self.psi_eq).powi(2) - 1.0;
        self.u_barr * q * q
    }

    /// `dU/dψ`.
    pub fn slope(&self, psi: f64) -> f64 {
        let p2 = self.psi_eq * self.psi_eq;
        4.0 * self.u_barr * (psi * psi / p2 - 1.0) * psi / p2
    }

    /// `U''(ψ_eq)`.
    pub fn well_curvature(&self) -> f64 {
        8.0 * self.u_barr / (self.psi_eq * self.psi_eq)
    }

    pub fn damping(&self) -> f64 {
        2.0 * self.zeta * (self.i_eff * self.well_curvature()).sqrt()
    }

    /// Small-oscillation frequency about either well, Hz.
    pub fn well_frequency(&self) -> f64 {
        (self.well_curvature() / self.i_eff).sqrt() / (2.0 * std::f64::consts::PI)
    }

    /// Rate that carries the state from rest-energy zero over the barrier
    /// exactly, absent damping.
    pub fn barrier_kick(&self) -> f64 {
        (2.0 * self.u_barr / self.i_eff).sqrt()
    }

    fn accel(&self, psi: f64, dpsi: f64, c: f64) -> f64 {
        (-self.slope(psi) - c * dpsi) / self.i_eff
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SnapTrace {
    pub time: Vec<f64>,
    pub psi: Vec<f64>,
    pub psi_dot: Vec<f64>,
    pub kinetic: Vec<f64>,
    pub potential: Vec<f64>,
    /// Well position the trace was generated with; fixes the travel used
    /// by [`snap_duration`].
    pub psi_eq: f64,
}

impl SnapTrace {
    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    pub fn total_energy(&self, i: usize) -> f64 {
        self.kinetic[i] + self.potential[i]
    }

    /// `max |E(t) − E(0)|`.
    pub fn max_energy_drift(&self) -> f64 {
        let e0 = self.total_energy(0);
        (0..self.len()).map(|i| (self.total_energy(i) - e0).abs()).fold(0.0, f64::max)
    }

    pub fn crosses_zero(&self) -> bool {
        let Some(&first) = self.psi.first() else { return false };
        let side = if first != 0.0 { first.signum() } else { -self.psi_dot[0].signum() };
        self.psi.iter().any(|p| p * side < 0.0)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "time_s,psi_rad,psi_dot_rad_s,kinetic_J,potential_J")?;
        for i in 0..self.len() {
            writeln!(
                w,
                "{},{},{},{},{}",
                self.time[i], self.psi[i], self.psi_dot[i], self.kinetic[i], self.potential[i]
            )?;
        }
        Ok(())
    }
}

/// Fixed-step RK4 on `I ψ̈ = −U'(ψ) − c ψ̇`.
pub fn simulate_snap(well: &DoubleWell, psi0: f64, psi_dot0: f64, dt: f64, t_end: f64) -> Result<SnapTrace> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(HcmError::InvalidInput(format!("dt must be > 0, got {dt}")));
    }
    if !(t_end.is_finite() && t_end >= 10.0 * dt) {
        return Err(HcmError::InvalidInput(format!("T must be at least 10 dt, got {t_end}")));
    }
    if !(psi0.is_finite() && psi_dot0.is_finite()) {
        return Err(HcmError::InvalidInput("initial state must be finite".into()));
    }
    let steps = (t_end / dt).round() as usize;
    let c = well.damping();
    let mut tr = SnapTrace { psi_eq: well.psi_eq, ..Default::default() };
    for v in [&mut tr.time, &mut tr.psi, &mut tr.psi_dot, &mut tr.kinetic, &mut tr.potential] {
        v.reserve(steps + 1);
    }
    let (mut x, mut v) = (psi0, psi_dot0);
    for i in 0..=steps {
        let t = i as f64 * dt;
        if !(x.is_finite() && v.is_finite()) {
            return Err(HcmError::NonFinite { time: t });
        }
        tr.time.push(t);
        tr.psi.push(x);
        tr.psi_dot.push(v);
        tr.kinetic.push(0.5 * well.i_eff * v * v);
        tr.potential.push(well.potential(x));
        if i == steps {
            break;
        }
        let k1x = v;
        let k1v = well.accel(x, v, c);
        let k2x = v + 0.5 * dt * k1v;
        let k2v = well.accel(x + 0.5 * dt * k1x, k2x, c);
        let k3x = v + 0.5 * dt * k2v;
        let k3v = well.accel(x + 0.5 * dt * k2x, k3x, c);
        let k4x = v + dt * k3v;
        let k4v = well.accel(x + dt * k3x, k4x, c);
        x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    if well.zeta == 0.0 {
        let drift = tr.max_energy_drift() / well.u_barr;
        if drift > MAX_DRIFT {
            return Err(HcmError::StepTooLarge { drift });
        }
    }
    Ok(tr)
}

/// Time between first reaching 10% and first reaching 90% of the travel from
/// the starting point to the opposite well.
pub fn snap_duration(trace: &SnapTrace) -> Result<f64> {
    if trace.len() < 2 || !trace.crosses_zero() {
        return Err(HcmError::NoCrossing);
    }
    let start = trace.psi[0];
    let side = if start != 0.0 { start.signum() } else { -trace.psi_dot[0].signum() };
    let dest = -side * trace.psi_eq;
    let frac = |p: f64| (p - start) / (dest - start);
    let first_reach = |level: f64| -> Result<f64> {
        let i = trace.psi.iter().position(|&p| frac(p) >= level).ok_or(HcmError::NoCrossing)?;
        if i == 0 {
            return Ok(trace.time[0]);
        }
        let (f0, f1) = (frac(trace.psi[i - 1]), frac(trace.psi[i]));
        let s = (level - f0) / (f1 - f0);
        Ok(trace.time[i - 1] + s * (trace.time[i] - trace.time[i - 1]))
    };
    Ok(first_reach(0.9)? - first_reach(0.1)?)
}

fn crosses(well: &DoubleWell, kick: f64, dt: f64, t_end: f64) -> Result<bool> {
    Ok(simulate_snap(well, -well.psi_eq, kick, dt, t_end)?.crosses_zero())
}

/// Smallest rate imparted at rest in the −ψ_eq well that still carries the
/// state over the barrier within `t_end`.
pub fn minimal_crossing_kick(well: &DoubleWell, dt: f64, t_end: f64) -> Result<f64> {
    let mut lo = 0.0;
    let mut hi = well.barrier_kick();
    let mut grow = 0;
    while !crosses(well, hi, dt, t_end)? {
        lo = hi;
        hi *= 2.0;
        grow += 1;
        if grow > 60 {
            return Err(HcmError::NoCrossing);
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if crosses(well, mid, dt, t_end)? {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(hi)
}

#[derive(Debug, Clone)]
pub struct SnapRun {
    pub kick: f64,
    pub trace: SnapTrace,
    pub duration: f64,
}

/// Kick at rest from the −ψ_eq well carrying `energy_factor` times the
/// minimal crossing kinetic energy.
pub fn kicked_snap(well: &DoubleWell, energy_factor: f64, dt: f64, t_end: f64) -> Result<SnapRun> {
    if !(energy_factor.is_finite() && energy_factor >= 1.0) {
        return Err(HcmError::InvalidInput(format!("energy factor must be >= 1, got {energy_factor}")));
    }
    let kick = minimal_crossing_kick(well, dt, t_end)? * energy_factor.sqrt();
    let trace = simulate_snap(well, -well.psi_eq, kick, dt, t_end)?;
    let duration = snap_duration(&trace)?;
    Ok(SnapRun { kick, trace, duration })
}

/// Default protocol: 5% excess energy, `dt = t*/500`, horizon `40 t*`.
pub fn default_snap(well: &DoubleWell, t_star: f64) -> Result<SnapRun> {
    kicked_snap(well, 1.05, t_star / 500.0, 40.0 * t_star)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pneumatic() -> RibbonGeometry {
        RibbonGeometry::new(0.0125, 6.0, (-3f64).to_radians(), 0.015, 0.381e-3).unwrap()
    }

    fn well(zeta: f64) -> DoubleWell {
        DoubleWell::new(1.976e-3, 39f64.to_radians(), 1.531e-6, zeta).unwrap()
    }

    #[test]
    fn timescale_examples() {
        let plastic = snap_timescale(&pneumatic(), &Material::plastic());
        assert_relative_eq!(plastic * 1e3, 66.9, epsilon = 0.05);
        let steel = snap_timescale(&pneumatic().with_thickness(0.254e-3).unwrap(), &Material::steel());
        assert_relative_eq!(steel * 1e3, 23.9, epsilon = 0.05);
        let unt = RibbonGeometry::new(0.029, 2.0, (-23.5f64).to_radians(), 0.015, 0.762e-3).unwrap();
        assert_relative_eq!(snap_timescale(&unt, &Material::plastic()) * 1e3, 33.1, epsilon = 0.05);
    }

    #[test]
    fn inertia_examples() {
        let g = pneumatic();
        let m = Material::plastic();
        assert_relative_eq!(effective_inertia(&g, &m), 1.531e-6, max_relative = 1e-3);
        let long = RibbonGeometry::new(0.025, 6.0, g.theta(), g.h(), g.t()).unwrap();
        assert_relative_eq!(effective_inertia(&long, &m) / effective_inertia(&g, &m), 8.0, max_relative = 1e-12);
        let dense = Material::new(m.e, m.nu, 2.0 * m.rho).unwrap();
        assert_relative_eq!(effective_inertia(&g, &dense) / effective_inertia(&g, &m), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn potential_landmarks_and_symmetry() {
        let w = well(0.0);
        assert_eq!(w.potential(w.psi_eq), 0.0);
        assert_eq!(w.potential(-w.psi_eq), 0.0);
        assert_eq!(w.potential(0.0), w.u_barr);
        for i in 0..200 {
            let p = -2.0 * w.psi_eq + i as f64 * 0.02 * w.psi_eq;
            assert_eq!(w.potential(p), w.potential(-p));
            let h = 1e-6 * w.psi_eq;
            let fd = (w.potential(p + h) - w.potential(p - h)) / (2.0 * h);
            assert!((fd - w.slope(p)).abs() <= 1e-6 * w.u_barr / w.psi_eq);
        }
    }

    #[test]
    fn rejects_bad_wells_and_steps() {
        assert!(DoubleWell::new(0.0, 1.0, 1.0, 0.0).is_err());
        assert!(DoubleWell::new(1.0, 1.0, 1.0, -0.1).is_err());
        let w = well(0.0);
        assert!(simulate_snap(&w, 0.1, 0.0, 0.0, 1.0).is_err());
        assert!(simulate_snap(&w, 0.1, 0.0, 0.1, 0.5).is_err());
        let coarse = simulate_snap(&w, -w.psi_eq, 1.5 * w.barrier_kick(), 0.003, 2.0);
        assert!(matches!(coarse, Err(HcmError::StepTooLarge { .. })), "{coarse:?}");
    }

    #[test]
    fn undamped_conservation_over_ten_periods() {
        let w = well(0.0);
        let t_star = snap_timescale(&pneumatic(), &Material::plastic());
        for factor in [0.5, 0.999, 1.001, 2.0] {
            let kick = w.barrier_kick() * f64::sqrt(factor);
            let t_end = 10.0 / w.well_frequency();
            let tr = simulate_snap(&w, -w.psi_eq, kick, t_star / 500.0, t_end).unwrap();
            let rel = tr.max_energy_drift() / tr.total_energy(0);
            assert!(rel < 1e-3, "{factor}: {rel}");
        }
    }

    #[test]
    fn barrier_gate() {
        let w = well(0.0);
        let dt = 1e-4;
        let above = simulate_snap(&w, -w.psi_eq, w.barrier_kick() * 1.001f64.sqrt(), dt, 0.5).unwrap();
        assert!(above.crosses_zero());
        assert!(above.psi.iter().any(|p| *p > 0.9 * w.psi_eq));
        let below = simulate_snap(&w, -w.psi_eq, w.barrier_kick() * 0.999f64.sqrt(), dt, 0.5).unwrap();
        assert!(!below.crosses_zero());
        assert!(matches!(snap_duration(&below), Err(HcmError::NoCrossing)));
    }

    #[test]
    fn small_oscillation_frequency() {
        let w = well(0.0);
        let f0 = w.well_frequency();
        let amp = 0.01 * w.psi_eq;
        let period = 1.0 / f0;
        let tr = simulate_snap(&w, w.psi_eq + amp, 0.0, period / 2000.0, 20.0 * period).unwrap();
        // upward crossings of the well centre
        let ups: Vec<f64> = (1..tr.len())
            .filter(|&i| tr.psi[i - 1] < w.psi_eq && tr.psi[i] >= w.psi_eq)
            .map(|i| {
                let (a, b) = (tr.psi[i - 1] - w.psi_eq, tr.psi[i] - w.psi_eq);
                tr.time[i - 1] + (tr.time[i] - tr.time[i - 1]) * (-a / (b - a))
            })
            .collect();
        let measured = (ups.len() - 1) as f64 / (ups[ups.len() - 1] - ups[0]);
        assert!((measured - f0).abs() / f0 < 0.02, "{measured} vs {f0}");
    }

    #[test]
    fn ramp_duration_by_definition() {
        let psi_eq = 0.5;
        let t_total = 0.1;
        let n = 1001;
        let time: Vec<f64> = (0..n).map(|i| t_total * i as f64 / (n - 1) as f64).collect();
        let psi: Vec<f64> = time.iter().map(|t| -psi_eq + 2.0 * psi_eq * t / t_total).collect();
        let tr = SnapTrace {
            psi_dot: vec![2.0 * psi_eq / t_total; n],
            kinetic: vec![0.0; n],
            potential: vec![0.0; n],
            time,
            psi,
            psi_eq,
        };
        assert_relative_eq!(snap_duration(&tr).unwrap(), 0.8 * t_total, max_relative = 1e-9);
    }

    #[test]
    fn air_duration_matches_timescale_order() {
        let t_star = snap_timescale(&pneumatic(), &Material::plastic());
        let run = default_snap(&well(AIR_ZETA), t_star).unwrap();
        let ratio = run.duration / t_star;
        assert!((0.3..=3.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn water_slows_the_snap() {
        let t_star = snap_timescale(&pneumatic(), &Material::plastic());
        let air = default_snap(&well(Medium::Air.zeta()), t_star).unwrap();
        let water = default_snap(&well(Medium::Water.zeta()), t_star).unwrap();
        let ratio = water.duration / air.duration;
        assert!((2.0..=4.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn csv_header_and_rows() {
        let w = well(AIR_ZETA);
        let tr = simulate_snap(&w, -w.psi_eq, 0.0, 1e-3, 0.01).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some("time_s,psi_rad,psi_dot_rad_s,kinetic_J,potential_J"));
        assert_eq!(lines.count(), tr.len());
    }
}
