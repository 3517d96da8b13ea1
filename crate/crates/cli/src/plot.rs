//! Heatmaps from a sweep CSV.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::CliError;
use crate::sweep::{SweepRow, HEADER};

pub const QUANTITIES: [&str; 2] = ["psi_l_deg", "u_barr_unitless"];

const CELL: f64 = 40.0;
const MARGIN: f64 = 60.0;

pub fn read_sweep(path: &Path) -> Result<Vec<SweepRow>, CliError> {
    let bad = |m: String| CliError::Input(format!("malformed sweep csv {}: {m}", path.display()));
    let mut rdr = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let header = rdr.headers().map_err(|e| bad(e.to_string()))?.iter().collect::<Vec<_>>().join(",");
    if header != HEADER {
        return Err(bad(format!("header \"{header}\" is not \"{HEADER}\"")));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let line = i + 2;
        let num = |j: usize| -> Result<f64, CliError> {
            rec[j].parse::<f64>().map_err(|_| bad(format!("line {line}: \"{}\" is not a number", &rec[j])))
        };
        let maybe = |j: usize| -> Result<Option<f64>, CliError> {
            if rec[j].is_empty() {
                Ok(None)
            } else {
                num(j).map(Some)
            }
        };
        let bistable = match &rec[5] {
            "true" => true,
            "false" => false,
            other => return Err(bad(format!("line {line}: bistable must be true or false, got \"{other}\""))),
        };
        rows.push(SweepRow {
            theta_deg: num(0)?,
            gamma_s: num(1)?,
            psi_l_deg: maybe(2)?,
            u_barr_unitless: maybe(3)?,
            t_star_ms: num(4)?,
            bistable,
        });
    }
    if rows.is_empty() {
        return Err(bad("no data rows".into()));
    }
    Ok(rows)
}

/// Distinct values in first-seen order.
fn axis(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for v in values {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

/// Piecewise-linear blue-to-yellow ramp.
fn color(u: f64) -> String {
    const STOPS: [(f64, [f64; 3]); 4] =
        [(0.0, [68.0, 1.0, 84.0]), (0.33, [49.0, 104.0, 142.0]), (0.66, [53.0, 183.0, 121.0]), (1.0, [253.0, 231.0, 37.0])];
    let u = u.clamp(0.0, 1.0);
    let k = STOPS.windows(2).position(|w| u <= w[1].0).unwrap_or(STOPS.len() - 2);
    let (a, b) = (STOPS[k], STOPS[k + 1]);
    let s = (u - a.0) / (b.0 - a.0);
    let c: Vec<u8> = (0..3).map(|i| (a.1[i] + s * (b.1[i] - a.1[i])).round() as u8).collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

pub fn render(rows: &[SweepRow], quantity: &str) -> Result<String, CliError> {
    let value = |r: &SweepRow| match quantity {
        "psi_l_deg" => r.psi_l_deg,
        _ => r.u_barr_unitless,
    };
    let thetas = axis(rows.iter().map(|r| r.theta_deg));
    let gammas = axis(rows.iter().map(|r| r.gamma_s));
    let finite: Vec<f64> = rows.iter().filter_map(value).collect();
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = MARGIN * 2.0 + CELL * thetas.len() as f64;
    let height = MARGIN * 2.0 + CELL * gammas.len() as f64;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(s, "<title>{quantity}</title>");
    let _ = writeln!(s, "<style>.cell{{stroke:#ffffff;stroke-width:1}} text{{font:10px sans-serif}}</style>");
    for r in rows {
        let i = thetas.iter().position(|&t| t == r.theta_deg).unwrap_or(0);
        let j = gammas.iter().position(|&g| g == r.gamma_s).unwrap_or(0);
        let x = MARGIN + CELL * i as f64;
        // largest γ_s on top
        let y = MARGIN + CELL * (gammas.len() - 1 - j) as f64;
        match value(r) {
            Some(v) => {
                let u = if hi > lo { (v - lo) / (hi - lo) } else { 0.5 };
                let _ = writeln!(
                    s,
                    r#"<rect class="cell" x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{}"><title>theta={} gamma={} {quantity}={v}</title></rect>"#,
                    color(u),
                    r.theta_deg,
                    r.gamma_s
                );
            }
            None => {
                let _ = writeln!(
                    s,
                    r##"<rect class="void" x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="#d0d0d0"><title>theta={} gamma={} mono-stable</title></rect>"##,
                    r.theta_deg, r.gamma_s
                );
            }
        }
    }
    for (i, t) in thetas.iter().enumerate() {
        let x = MARGIN + CELL * (i as f64 + 0.5);
        let _ = writeln!(s, r#"<text x="{x}" y="{}" text-anchor="middle">{t}</text>"#, height - MARGIN + 15.0);
    }
    for (j, g) in gammas.iter().enumerate() {
        let y = MARGIN + CELL * ((gammas.len() - 1 - j) as f64 + 0.5);
        let _ = writeln!(s, r#"<text x="{}" y="{y}" text-anchor="end">{g}</text>"#, MARGIN - 5.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">theta_deg</text>"#, width / 2.0, height - 15.0);
    let _ = writeln!(s, r#"<text x="15" y="{}" transform="rotate(-90 15 {})">gamma_s</text>"#, height / 2.0, height / 2.0);
    if lo.is_finite() {
        let _ = writeln!(s, r#"<text x="{MARGIN}" y="{}">{quantity}: {lo} .. {hi}</text>"#, MARGIN - 20.0);
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_end_points() {
        assert_eq!(color(0.0), "#440154");
        assert_eq!(color(1.0), "#fde725");
        assert_eq!(color(2.0), color(1.0));
    }
}
