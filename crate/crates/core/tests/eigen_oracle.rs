//! Finite-difference buckling pencil against an independent shooting solve of
//! the twist equation `φ'' + k² m(s)² φ = 0` on `s ∈ [0, 1]`.

use std::f64::consts::PI;

use hcm_core::buckling::{critical_load_with, BucklingOptions, MomentModel};
use hcm_core::model::{derive_lengths, section_properties, Material, RibbonGeometry, TorsionMode};

const STEPS: usize = 4000;

fn arm(model: MomentModel, s: f64) -> f64 {
    match model {
        MomentModel::TipLoad => 1.0 - s,
        MomentModel::PrebuckledSinusoid => (PI * s).sin(),
    }
}

/// RK4 from `φ(0) = 0, φ'(0) = 1`; returns the sampled `φ` and the end state.
fn shoot(model: MomentModel, k: f64) -> (Vec<f64>, f64, f64) {
    let h = 1.0 / STEPS as f64;
    let rhs = |s: f64, y: [f64; 2]| [y[1], -k * k * arm(model, s).powi(2) * y[0]];
    let mut y = [0.0, 1.0];
    let mut trace = vec![0.0];
    for i in 0..STEPS {
        let s = i as f64 * h;
        let k1 = rhs(s, y);
        let k2 = rhs(s + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = rhs(s + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = rhs(s + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        for j in 0..2 {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        trace.push(y[0]);
    }
    (trace, y[0], y[1])
}

/// Far-end residual: `φ'(1)` for the free tip, `φ(1)` for the pinned end.
fn residual(model: MomentModel, k: f64) -> f64 {
    let (_, phi, dphi) = shoot(model, k);
    match model {
        MomentModel::TipLoad => dphi,
        MomentModel::PrebuckledSinusoid => phi,
    }
}

fn lowest_root(model: MomentModel) -> f64 {
    // scan for the first sign change, then bisect
    let mut lo = 0.5;
    let mut r_lo = residual(model, lo);
    let mut hi = lo;
    loop {
        hi += 0.05;
        let r = residual(model, hi);
        if r.signum() != r_lo.signum() {
            break;
        }
        lo = hi;
        r_lo = r;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let r = residual(model, mid);
        if r.signum() == r_lo.signum() {
            lo = mid;
            r_lo = r;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn pneumatic() -> RibbonGeometry {
    RibbonGeometry::new(0.0125, 6.0, (-3f64).to_radians(), 0.015, 0.381e-3).unwrap()
}

#[test]
fn tip_load_eigenvalue_matches_shooting() {
    let k_shoot = lowest_root(MomentModel::TipLoad);
    assert!((k_shoot - 4.0126).abs() < 1e-3, "{k_shoot}");
    let opts = BucklingOptions { n_grid: 1000, ..Default::default() };
    let mode = critical_load_with(&pneumatic(), &Material::plastic(), &opts).unwrap();
    let k_fd = mode.eigenvalue.sqrt();
    assert!((k_fd - k_shoot).abs() / k_shoot < 1e-4, "fd {k_fd} shooting {k_shoot}");

    let mat = Material::plastic();
    let sp = section_properties(&pneumatic(), &mat, TorsionMode::ThinStrip);
    let l = derive_lengths(&pneumatic()).l;
    let p = k_shoot * (sp.gj() * sp.ei_eta(&mat)).sqrt() / (l * l);
    assert!((mode.p_cr - p).abs() / p < 1e-4);
}

#[test]
fn sinusoid_eigenvalue_matches_shooting() {
    let k_shoot = lowest_root(MomentModel::PrebuckledSinusoid);
    let opts = BucklingOptions { model: MomentModel::PrebuckledSinusoid, n_grid: 1000, ..Default::default() };
    let mode = critical_load_with(&pneumatic(), &Material::plastic(), &opts).unwrap();
    let k_fd = mode.eigenvalue.sqrt();
    assert!((k_fd - k_shoot).abs() / k_shoot < 1e-4, "fd {k_fd} shooting {k_shoot}");
}

#[test]
fn mode_shapes_match_shooting() {
    for model in [MomentModel::TipLoad, MomentModel::PrebuckledSinusoid] {
        let k = lowest_root(model);
        let (trace, _, _) = shoot(model, k);
        let peak = trace.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let n = 400;
        let opts = BucklingOptions { model, n_grid: n, ..Default::default() };
        let mode = critical_load_with(&pneumatic(), &Material::plastic(), &opts).unwrap();
        for (i, phi) in mode.phi.iter().enumerate() {
            let reference = trace[i * STEPS / n] / peak;
            let fd = phi / mode.amplitude;
            assert!((fd - reference).abs() < 2e-3, "{model:?} node {i}: {fd} vs {reference}");
        }
    }
}
