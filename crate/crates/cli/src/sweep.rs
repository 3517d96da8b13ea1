//! (θ, γ_s) design-space sweep.

use rayon::prelude::*;
use serde::Serialize;

use hcm_core::postbuckle::Calibration;

use crate::config::Design;
use crate::error::CliError;
use crate::report::{analyze_point, opt};

pub const HEADER: &str = "theta_deg,gamma_s,psi_l_deg,u_barr_unitless,t_star_ms,bistable";

/// Parse `start:stop:step` (inclusive of `stop`) or a single value.
pub fn parse_range(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::Input(format!("{what}: malformed range \"{s}\": {why}"));
    let nums: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad("expected numbers"))?;
    if nums.iter().any(|v| !v.is_finite()) {
        return Err(bad("values must be finite"));
    }
    match nums[..] {
        [v] => Ok(vec![v]),
        [start, stop, step] => {
            if !(step > 0.0) {
                return Err(bad("step must be > 0"));
            }
            if stop < start {
                return Err(bad("stop is below start"));
            }
            let span = (stop - start) / step;
            let n = (span + 1e-9).floor();
            if n > 1e6 {
                return Err(bad("too many points"));
            }
            Ok((0..=n as usize).map(|i| start + i as f64 * step).collect())
        }
        _ => Err(bad("expected start:stop:step or a single value")),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub theta_deg: f64,
    pub gamma_s: f64,
    pub psi_l_deg: Option<f64>,
    pub u_barr_unitless: Option<f64>,
    pub t_star_ms: f64,
    pub bistable: bool,
}

/// Cells run in parallel; rows come back θ-outer, γ_s-inner.
pub fn sweep(design: &Design, calib: &Calibration, thetas: &[f64], gammas: &[f64]) -> Result<Vec<SweepRow>, CliError> {
    let cells: Vec<(f64, f64)> = thetas.iter().flat_map(|&t| gammas.iter().map(move |&g| (t, g))).collect();
    cells
        .par_iter()
        .map(|&(theta_deg, gamma_s)| {
            let geom = design.geometry.with_shape(theta_deg.to_radians(), gamma_s)?;
            let (p, _) = analyze_point(&geom, &design.material, &design.buckling, calib)?;
            Ok(SweepRow {
                theta_deg,
                gamma_s,
                psi_l_deg: p.psi_l_deg,
                u_barr_unitless: p.U_barr_unitless,
                t_star_ms: p.t_star_ms,
                bistable: p.bistable,
            })
        })
        .collect()
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from(HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.theta_deg,
            r.gamma_s,
            opt(r.psi_l_deg),
            opt(r.u_barr_unitless),
            r.t_star_ms,
            r.bistable
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0:20:5", "t").unwrap(), vec![0.0, 5.0, 10.0, 15.0, 20.0]);
        assert_eq!(parse_range("-30", "t").unwrap(), vec![-30.0]);
        assert_eq!(parse_range("0:1:0.1", "t").unwrap().len(), 11);
        assert_eq!(parse_range("2:2:1", "t").unwrap(), vec![2.0]);
        for bad in ["", "a:b:c", "0:10:0", "0:10:-1", "10:0:1", "1:2", "0:inf:1", "1:2:3:4"] {
            assert_eq!(parse_range(bad, "t").unwrap_err().exit_code(), 2, "{bad}");
        }
    }
}
