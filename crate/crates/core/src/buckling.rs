//! Lateral-torsional critical load and twist mode of the assembled ribbon.
//!
//! The strip twist `φ(z)` obeys `GJ φ'' + (M(z)² / EI_η) φ = 0` with an
//! in-plane moment `M = P m(z)`. Two moment distributions are supported:
//!
//! * [`MomentModel::TipLoad`]: the closing force acts at the pinned tip, so
//!   `m(z) = l - z`; the root is clamped (`φ(0) = 0`) and the tip carries no
//!   torque (`φ'(l) = 0`).
//! * [`MomentModel::PrebuckledSinusoid`]: the kinked arm is replaced by a
//!   straight beam with the pre-buckled in-plane shape
//!   `w(z) = A_ini sin(πz/l)`, `m(z) = w(z)`, pinned at both ends.
//!
//! The problem is discretised by second-order central differences in the
//! dimensionless coordinate `s = z / l` and solved as a symmetric-definite
//! generalized eigenproblem in `P²`. Because the dimensionless pencil only
//! depends on the model and the grid, `P_cr l² / EI_η` is independent of the
//! absolute scale.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{HcmError, Result};
use crate::model::{
    derive_lengths, require_bistable, section_properties, Material, RibbonGeometry, TorsionMode,
};
use crate::tridiag::{EigenRoute, TridiagPencil};

/// Classical critical-load coefficient of a narrow cantilever strip under a
/// tip load, `P_cr = k sqrt(EI GJ) / l²`.
pub const PRANDTL_COEFFICIENT: f64 = 4.0126;

pub const MIN_GRID: usize = 64;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentModel {
    #[default]
    TipLoad,
    PrebuckledSinusoid,
}

impl MomentModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            MomentModel::TipLoad => "tip-load",
            MomentModel::PrebuckledSinusoid => "prebuckled-sinusoid",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BucklingOptions {
    pub model: MomentModel,
    pub torsion: TorsionMode,
    pub n_grid: usize,
}

impl Default for BucklingOptions {
    fn default() -> Self {
        Self { model: MomentModel::TipLoad, torsion: TorsionMode::ThinStrip, n_grid: 200 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrebuckledShape {
    /// `A_ini`, m.
    pub amplitude: f64,
    /// `(z, w)` samples, m.
    pub samples: Vec<(f64, f64)>,
}

/// Kinked-to-straight surrogate: the first pinned-pinned buckling shape whose
/// end slope equals the released kink rotation, `A_ini = (l/π) sin β`.
pub fn prebuckled_inplane_shape(geom: &RibbonGeometry, n_samples: usize) -> Result<PrebuckledShape> {
    let beta = require_bistable(geom)?;
    let l = derive_lengths(geom).l;
    let amplitude = l / PI * beta.sin();
    let n = n_samples.max(2);
    let samples = (0..=n)
        .map(|i| {
            let s = i as f64 / n as f64;
            let w = if i == 0 || i == n { 0.0 } else { amplitude * (PI * s).sin() };
            (s * l, w)
        })
        .collect();
    Ok(PrebuckledShape { amplitude, samples })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BucklingMode {
    pub model: MomentModel,
    /// Critical load, N.
    pub p_cr: f64,
    /// Grid positions `z`, m, from root (0) to tip (l).
    pub grid: Vec<f64>,
    /// Twist angle at each grid point, rad.
    pub phi: Vec<f64>,
    /// `max |φ|`: the amplitude the mode was normalised to.
    pub amplitude: f64,
    /// Dimensionless eigenvalue `k² = P² l² M_s² / (GJ EI_η)`, with `M_s` the
    /// moment-arm scale (`l` or `A_ini`).
    pub eigenvalue: f64,
    pub route: EigenRoute,
}

impl BucklingMode {
    pub fn n_grid(&self) -> usize {
        self.grid.len() - 1
    }

    /// Number of sign changes of `φ` strictly inside the span.
    pub fn interior_sign_changes(&self) -> usize {
        let inner: Vec<f64> =
            self.phi.iter().copied().filter(|v| v.abs() > 1e-12 * self.amplitude).collect();
        inner.windows(2).filter(|w| w[0].signum() != w[1].signum()).count()
    }
}

/// Dimensionless moment arm `m(s) / M_s`.
fn arm(model: MomentModel, s: f64) -> f64 {
    match model {
        MomentModel::TipLoad => 1.0 - s,
        MomentModel::PrebuckledSinusoid => (PI * s).sin(),
    }
}

struct UnitMode {
    k2: f64,
    /// Normalised so that the largest entry is +1; includes boundary nodes.
    shape: Vec<f64>,
    route: EigenRoute,
}

fn solve_unit_mode(model: MomentModel, n: usize) -> Result<UnitMode> {
    let h = 1.0 / n as f64;
    let inv_h2 = 1.0 / (h * h);
    // interior nodes 1..n-1; for the tip-load model the tip node is eliminated
    // through φ_n = φ_{n-1} (zero-torque tip, where m(l) = 0)
    let m = n - 1;
    let mut diag = vec![2.0 * inv_h2; m];
    let off = vec![-inv_h2; m - 1];
    if model == MomentModel::TipLoad {
        diag[m - 1] = inv_h2;
    }
    let weight = (1..n).map(|i| arm(model, i as f64 * h).powi(2)).collect();
    let pair = TridiagPencil { diag, off, weight }.smallest()?;
    let mut shape = Vec::with_capacity(n + 1);
    shape.push(0.0);
    shape.extend_from_slice(&pair.vector);
    shape.push(match model {
        MomentModel::TipLoad => pair.vector[m - 1],
        MomentModel::PrebuckledSinusoid => 0.0,
    });
    Ok(UnitMode { k2: pair.value, shape, route: pair.route })
}

fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2).zip(ys.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
}

pub fn critical_load(geom: &RibbonGeometry, mat: &Material, n_grid: usize) -> Result<BucklingMode> {
    critical_load_with(geom, mat, &BucklingOptions { n_grid, ..Default::default() })
}

pub fn critical_load_with(
    geom: &RibbonGeometry,
    mat: &Material,
    opts: &BucklingOptions,
) -> Result<BucklingMode> {
    let beta = require_bistable(geom)?;
    if opts.n_grid < MIN_GRID {
        return Err(HcmError::InvalidInput(format!(
            "n_grid must be >= {MIN_GRID}, got {}",
            opts.n_grid
        )));
    }
    let lens = derive_lengths(geom);
    let l = lens.l;
    let sp = section_properties(geom, mat, opts.torsion);
    let (gj, ei) = (sp.gj(), sp.ei_eta(mat));

    let unit = solve_unit_mode(opts.model, opts.n_grid)?;
    let k = unit.k2.sqrt();
    let n = opts.n_grid;
    let s: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();

    let (p_cr, amplitude) = match opts.model {
        MomentModel::TipLoad => {
            let p = k * (gj * ei).sqrt() / (l * l);
            // compatibility: the tip's lateral travel (P/EI)∫(l-z)²φ²dz
            // must equal the kink release L2·β
            let i2 = trapezoid(
                &s,
                &s.iter().zip(&unit.shape).map(|(s, f)| (1.0 - s).powi(2) * f * f).collect::<Vec<_>>(),
            );
            let r = (gj / ei).sqrt();
            let a = ((lens.l2 / l) * beta / (k * r * i2)).sqrt();
            (p, a)
        }
        MomentModel::PrebuckledSinusoid => {
            let a_ini = l / PI * beta.sin();
            (k * (gj * ei).sqrt() / (l * a_ini), beta)
        }
    };
    if !(p_cr.is_finite() && p_cr > 0.0) {
        return Err(HcmError::EigenFailure(format!("non-positive critical load {p_cr}")));
    }
    Ok(BucklingMode {
        model: opts.model,
        p_cr,
        grid: s.iter().map(|s| s * l).collect(),
        phi: unit.shape.iter().map(|f| f * amplitude).collect(),
        amplitude,
        eigenvalue: unit.k2,
        route: unit.route,
    })
}

/// Fast closed-form estimate of `P_cr` for the given moment model.
///
/// For the sinusoid model this is the uniform-moment surrogate using the
/// mean of `sin²`, `π sqrt(2 GJ EI) / (A_ini l)`; for the tip-load model it
/// is the classical cantilever-strip value.
pub fn critical_load_closed_form(
    geom: &RibbonGeometry,
    mat: &Material,
    model: MomentModel,
    torsion: TorsionMode,
) -> Result<f64> {
    let beta = require_bistable(geom)?;
    let l = derive_lengths(geom).l;
    let sp = section_properties(geom, mat, torsion);
    let stiff = (sp.gj() * sp.ei_eta(mat)).sqrt();
    Ok(match model {
        MomentModel::TipLoad => PRANDTL_COEFFICIENT * stiff / (l * l),
        MomentModel::PrebuckledSinusoid => {
            let a_ini = l / PI * beta.sin();
            PI * (2.0f64).sqrt() * stiff / (a_ini * l)
        }
    })
}

/// Lateral travel of the loaded tip produced by the mode, `(P/EI)∫m²φ²dz`.
pub fn tip_travel(mode: &BucklingMode, geom: &RibbonGeometry, mat: &Material, torsion: TorsionMode) -> f64 {
    let l = derive_lengths(geom).l;
    let ei = section_properties(geom, mat, torsion).ei_eta(mat);
    let ys: Vec<f64> = mode
        .grid
        .iter()
        .zip(&mode.phi)
        .map(|(z, f)| {
            let m = match mode.model {
                MomentModel::TipLoad => l - z,
                MomentModel::PrebuckledSinusoid => (l / PI * bistable_sin(geom)) * (PI * z / l).sin(),
            };
            m * m * f * f
        })
        .collect();
    mode.p_cr / ei * trapezoid(&mode.grid, &ys)
}

fn bistable_sin(geom: &RibbonGeometry) -> f64 {
    crate::model::bistability_margin(geom).beta.sin()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pneumatic() -> RibbonGeometry {
        RibbonGeometry::new(0.0125, 6.0, (-3f64).to_radians(), 0.015, 0.381e-3).unwrap()
    }

    fn sinusoid(n_grid: usize) -> BucklingOptions {
        BucklingOptions { model: MomentModel::PrebuckledSinusoid, n_grid, ..Default::default() }
    }

    #[test]
    fn prebuckled_amplitude() {
        let s = prebuckled_inplane_shape(&pneumatic(), 100).unwrap();
        // (87.5 / pi) * sin(6.594 deg) mm
        assert_relative_eq!(s.amplitude * 1e3, 3.198, epsilon = 1e-3);
        assert_eq!(s.samples.first().unwrap().1, 0.0);
        assert_eq!(s.samples.last().unwrap().1, 0.0);
        let peak = s.samples.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
        assert_relative_eq!(peak, s.amplitude, max_relative = 1e-12);
    }

    #[test]
    fn prebuckled_flat_limit_and_scaling() {
        let g = pneumatic();
        let beta0 = -(1.0f64 / 6.0).asin();
        let near = g.with_shape(beta0 + 1e-9, 6.0).unwrap();
        assert!(prebuckled_inplane_shape(&near, 10).unwrap().amplitude < 1e-9);

        let a = prebuckled_inplane_shape(&g, 10).unwrap().amplitude;
        let b = prebuckled_inplane_shape(&g.scaled(2.0).unwrap(), 10).unwrap().amplitude;
        assert_relative_eq!(b, 2.0 * a, max_relative = 1e-12);
    }

    #[test]
    fn mono_stable_rejected() {
        let g = pneumatic().with_shape(-(0.5f64).asin() - 0.01, 2.0).unwrap();
        assert!(matches!(prebuckled_inplane_shape(&g, 10), Err(HcmError::NotBistable { .. })));
        assert!(matches!(critical_load(&g, &Material::plastic(), 100), Err(HcmError::NotBistable { .. })));
        assert!(matches!(
            critical_load_closed_form(&g, &Material::plastic(), MomentModel::TipLoad, TorsionMode::ThinStrip),
            Err(HcmError::NotBistable { .. })
        ));
    }

    #[test]
    fn coarse_grid_rejected() {
        assert!(matches!(
            critical_load(&pneumatic(), &Material::plastic(), 32),
            Err(HcmError::InvalidInput(_))
        ));
    }

    #[test]
    fn sinusoid_closed_form_value() {
        let p = critical_load_closed_form(
            &pneumatic(),
            &Material::plastic(),
            MomentModel::PrebuckledSinusoid,
            TorsionMode::ThinStrip,
        )
        .unwrap();
        // pi*sqrt(2*1.7718e-4*1.1960e-4)/(3.198e-3*0.0875)
        assert_relative_eq!(p, 2.311, epsilon = 2e-3);
    }

    #[test]
    fn closed_form_homogeneity() {
        let g = pneumatic();
        let m = Material::plastic();
        for model in [MomentModel::TipLoad, MomentModel::PrebuckledSinusoid] {
            let p = critical_load_closed_form(&g, &m, model, TorsionMode::ThinStrip).unwrap();
            let pe = critical_load_closed_form(&g, &m.with_modulus(4.0 * m.e), model, TorsionMode::ThinStrip)
                .unwrap();
            let pt = critical_load_closed_form(&g.with_thickness(2.0 * g.t()).unwrap(), &m, model, TorsionMode::ThinStrip)
                .unwrap();
            assert_relative_eq!(pe / p, 4.0, max_relative = 1e-12);
            assert_relative_eq!(pt / p, 8.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn sinusoid_numeric_is_fixed_fraction_of_surrogate() {
        // the uniform-moment surrogate overestimates: P_num / P_cf is a pure
        // shape constant (0.8112 from an independent dense solve)
        let m = Material::plastic();
        for (theta, gamma) in [(-5.0, 2.0), (0.0, 4.0), (10.0, 6.0), (20.0, 8.0)] {
            let g = pneumatic().with_shape(f64::to_radians(theta), gamma).unwrap();
            let p = critical_load_with(&g, &m, &sinusoid(400)).unwrap().p_cr;
            let cf = critical_load_closed_form(&g, &m, MomentModel::PrebuckledSinusoid, TorsionMode::ThinStrip)
                .unwrap();
            assert_relative_eq!(p / cf, 0.8112, epsilon = 1e-3);
        }
    }

    #[test]
    fn tip_load_matches_classical_coefficient() {
        let m = Material::plastic();
        for (theta, gamma) in [(-5.0, 2.0), (0.0, 4.0), (10.0, 6.0), (20.0, 8.0)] {
            let g = pneumatic().with_shape(f64::to_radians(theta), gamma).unwrap();
            let p = critical_load(&g, &m, 400).unwrap().p_cr;
            let cf = critical_load_closed_form(&g, &m, MomentModel::TipLoad, TorsionMode::ThinStrip).unwrap();
            assert!((p - cf).abs() / cf < 0.15);
            assert!((p - cf).abs() / cf < 1e-3, "{p} vs {cf}");
        }
    }

    #[test]
    fn grid_convergence() {
        let g = pneumatic();
        let m = Material::plastic();
        for opts in [BucklingOptions::default(), sinusoid(0)] {
            let a = critical_load_with(&g, &m, &BucklingOptions { n_grid: 200, ..opts }).unwrap().p_cr;
            let b = critical_load_with(&g, &m, &BucklingOptions { n_grid: 400, ..opts }).unwrap().p_cr;
            assert!((a - b).abs() / b < 5e-3);
        }
    }

    #[test]
    fn second_order_convergence() {
        let g = pneumatic();
        let m = Material::plastic();
        for model in [MomentModel::TipLoad, MomentModel::PrebuckledSinusoid] {
            let k = |n| {
                critical_load_with(&g, &m, &BucklingOptions { model, n_grid: n, ..Default::default() })
                    .unwrap()
                    .eigenvalue
            };
            let (a, b, c) = (k(100), k(200), k(400));
            let ratio = (a - b) / (b - c);
            assert!((3.5..4.5).contains(&ratio), "{model:?} richardson ratio {ratio}");
        }
    }

    #[test]
    fn length_scaling() {
        let g = pneumatic();
        let m = Material::plastic();
        for opts in [BucklingOptions::default(), sinusoid(200)] {
            let a = critical_load_with(&g, &m, &opts).unwrap();
            let g2 = g.scaled(2.0).unwrap();
            let b = critical_load_with(&g2, &m, &opts).unwrap();
            // all lengths x2: EI, GJ x16, l^2 x4
            let ei = |g: &RibbonGeometry| section_properties(g, &m, TorsionMode::ThinStrip).ei_eta(&m);
            let l = |g: &RibbonGeometry| derive_lengths(g).l;
            let pa = a.p_cr * l(&g).powi(2) / ei(&g);
            let pb = b.p_cr * l(&g2).powi(2) / ei(&g2);
            assert_relative_eq!(pa, pb, max_relative = 1e-9);
            // with only the span doubled the load drops by four
            let g3 = RibbonGeometry::new(2.0 * g.l1(), g.gamma_s(), g.theta(), g.h(), g.t()).unwrap();
            let c = critical_load_with(&g3, &m, &opts).unwrap();
            assert_relative_eq!(c.p_cr / a.p_cr, 0.25, max_relative = 1e-9);
        }
    }

    #[test]
    fn fundamental_mode_shape() {
        let g = pneumatic();
        let m = Material::plastic();
        for opts in [BucklingOptions::default(), sinusoid(200)] {
            let mode = critical_load_with(&g, &m, &opts).unwrap();
            assert_eq!(mode.phi[0], 0.0);
            if opts.model == MomentModel::PrebuckledSinusoid {
                assert_eq!(*mode.phi.last().unwrap(), 0.0);
                assert_relative_eq!(mode.amplitude, bistable_sin(&g).asin(), max_relative = 1e-12);
            }
            assert_eq!(mode.interior_sign_changes(), 0);
            let peak = mode.phi.iter().copied().fold(0.0, f64::max);
            assert_relative_eq!(peak, mode.amplitude, max_relative = 1e-12);
            assert!(mode.p_cr > 0.0);
        }
    }

    #[test]
    fn tip_load_amplitude_satisfies_compatibility() {
        let g = pneumatic();
        let m = Material::plastic();
        let mode = critical_load(&g, &m, 200).unwrap();
        let beta = crate::model::bistability_margin(&g).beta;
        let travel = tip_travel(&mode, &g, &m, TorsionMode::ThinStrip);
        assert_relative_eq!(travel, derive_lengths(&g).l2 * beta, max_relative = 1e-10);
    }

    #[test]
    fn dense_and_bisection_routes_agree() {
        let g = pneumatic();
        let m = Material::plastic();
        let dense = critical_load(&g, &m, 400).unwrap();
        assert_eq!(dense.route, EigenRoute::Dense);
        let big = critical_load(&g, &m, 1024).unwrap();
        assert_eq!(big.route, EigenRoute::Bisection);
        assert!((dense.p_cr - big.p_cr).abs() / big.p_cr < 1e-3);
    }
}
