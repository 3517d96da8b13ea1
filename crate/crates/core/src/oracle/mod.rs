//! Independent check of the analytic chain: minimise a discrete elastic
//! ribbon directly and read off the stable states and the barrier.

pub mod lbfgs;
pub mod ribbon;

use serde::Serialize;

pub use ribbon::{
    build_discrete, build_discrete_with, find_equilibrium, find_saddle, DiscreteRibbon, Equilibrium, RibbonConfig,
    Side,
};

use crate::error::Result;
use crate::model::{bistability_margin, Material, RibbonGeometry};
use crate::postbuckle::HcmAnalysis;

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub u_min: f64,
    pub u_saddle: f64,
    pub barrier: f64,
    /// Tip angle of the lower-energy well.
    pub psi_tip: f64,
    pub converged: bool,
    pub iterations: usize,
    pub plus: Equilibrium,
    pub minus: Equilibrium,
    pub saddle: Equilibrium,
    /// `barrier·L1/(E I_η)`.
    pub barrier_unitless: f64,
}

pub fn oracle_report(geom: &RibbonGeometry, mat: &Material, n_links: usize) -> Result<OracleResult> {
    let ribbon = build_discrete(geom, mat, n_links)?;
    report_for(&ribbon, geom)
}

pub fn report_for(ribbon: &DiscreteRibbon, geom: &RibbonGeometry) -> Result<OracleResult> {
    let plus = find_equilibrium(ribbon, Side::Plus)?;
    let minus = find_equilibrium(ribbon, Side::Minus)?;
    let saddle = find_saddle(ribbon)?;
    let low = if plus.energy <= minus.energy { &plus } else { &minus };
    let u_min = low.energy;
    let barrier = saddle.energy - u_min;
    Ok(OracleResult {
        u_min,
        u_saddle: saddle.energy,
        barrier,
        psi_tip: low.psi_tip,
        converged: plus.converged && minus.converged && saddle.converged,
        iterations: plus.iterations + minus.iterations + saddle.iterations,
        barrier_unitless: barrier * geom.l1() / (ribbon.energy_unit() * ribbon.rest_length()),
        plus,
        minus,
        saddle,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Comparison {
    #[serde(rename = "barrier_J")]
    pub barrier_j: f64,
    pub barrier_rel_err: f64,
    pub psi_tip_deg: f64,
    pub psi_rel_err: f64,
    pub converged: bool,
    pub bistable: bool,
}

/// Relative deviations of the oracle from the analytic barrier and tip
/// angle. Without an analysis (mono-stable input) both errors are NaN.
pub fn compare(result: &OracleResult, geom: &RibbonGeometry, analysis: Option<&HcmAnalysis>) -> Comparison {
    let (eb, ep) = match analysis {
        Some(a) => (
            (result.barrier - a.u_barr).abs() / a.u_barr,
            (result.psi_tip.abs() - a.psi_l).abs() / a.psi_l,
        ),
        None => (f64::NAN, f64::NAN),
    };
    Comparison {
        barrier_j: result.barrier,
        barrier_rel_err: eb,
        psi_tip_deg: result.psi_tip.abs().to_degrees(),
        psi_rel_err: ep,
        converged: result.converged,
        bistable: bistability_margin(geom).bistable,
    }
}
