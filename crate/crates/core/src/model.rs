//! Domain types shared by every solver: ribbon geometry, material, section
//! properties and the bistability criterion.
//!
//! All quantities are SI (m, Pa, kg/m³, rad). Degrees and millimetres only
//! appear at the CLI boundary.

use serde::{Deserialize, Serialize};

use crate::error::{HcmError, Result};

/// The flat ribbon blank before assembly.
///
/// `l1` is the core-end segment, the far-end segment is `gamma_s * l1`, and
/// `theta` is the signed prop angle at the kink.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RibbonGeometry {
    l1: f64,
    gamma_s: f64,
    theta: f64,
    h: f64,
    t: f64,
}

impl RibbonGeometry {
    pub fn new(l1: f64, gamma_s: f64, theta: f64, h: f64, t: f64) -> Result<Self> {
        let g = Self { l1, gamma_s, theta, h, t };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        fn bad(field: &'static str, reason: impl Into<String>) -> HcmError {
            HcmError::InvalidGeometry { field, reason: reason.into() }
        }
        let all = [self.l1, self.gamma_s, self.theta, self.h, self.t];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(bad("geometry", "contains a non-finite value"));
        }
        if self.l1 <= 0.0 {
            return Err(bad("L1", format!("must be > 0, got {}", self.l1)));
        }
        if self.h <= 0.0 {
            return Err(bad("h", format!("must be > 0, got {}", self.h)));
        }
        if self.t <= 0.0 {
            return Err(bad("t", format!("must be > 0, got {}", self.t)));
        }
        if self.t >= self.h {
            return Err(bad("t", format!("must be < h ({} >= {})", self.t, self.h)));
        }
        if self.gamma_s <= 1.0 {
            return Err(bad("gamma_s", format!("must be > 1, got {}", self.gamma_s)));
        }
        if self.theta.abs() >= std::f64::consts::FRAC_PI_2 {
            return Err(bad("theta", format!("|theta| must be < pi/2, got {}", self.theta)));
        }
        Ok(())
    }

    pub fn l1(&self) -> f64 {
        self.l1
    }
    pub fn gamma_s(&self) -> f64 {
        self.gamma_s
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn t(&self) -> f64 {
        self.t
    }

    /// Uniform rescale of every length (`l1`, `h`, `t`); shape factors untouched.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.l1 * factor, self.gamma_s, self.theta, self.h * factor, self.t * factor)
    }

    pub fn with_thickness(&self, t: f64) -> Result<Self> {
        Self::new(self.l1, self.gamma_s, self.theta, self.h, t)
    }

    pub fn with_shape(&self, theta: f64, gamma_s: f64) -> Result<Self> {
        Self::new(self.l1, gamma_s, theta, self.h, self.t)
    }

    pub fn lengths(&self) -> Lengths {
        derive_lengths(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    /// Young's modulus, Pa.
    pub e: f64,
    pub nu: f64,
    /// Density, kg/m³.
    pub rho: f64,
}

impl Material {
    pub fn new(e: f64, nu: f64, rho: f64) -> Result<Self> {
        let m = Self { e, nu, rho };
        m.validate()?;
        Ok(m)
    }

    /// PET-like sheet used for the pneumatic and untethered fish.
    pub fn plastic() -> Self {
        Self { e: 1.73e9, nu: 0.35, rho: 1200.0 }
    }

    pub fn steel() -> Self {
        Self { e: 200e9, nu: 0.30, rho: 7850.0 }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "plastic" => Some(Self::plastic()),
            "steel" => Some(Self::steel()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn bad(field: &'static str, reason: String) -> HcmError {
            HcmError::InvalidMaterial { field, reason }
        }
        if !(self.e.is_finite() && self.e > 0.0) {
            return Err(bad("E", format!("must be > 0, got {}", self.e)));
        }
        if !(self.nu.is_finite() && (0.0..0.5).contains(&self.nu)) {
            return Err(bad("nu", format!("must be in [0, 0.5), got {}", self.nu)));
        }
        if !(self.rho.is_finite() && self.rho > 0.0) {
            return Err(bad("rho", format!("must be > 0, got {}", self.rho)));
        }
        Ok(())
    }

    pub fn shear_modulus(&self) -> f64 {
        self.e / (2.0 * (1.0 + self.nu))
    }

    pub fn with_modulus(&self, e: f64) -> Self {
        Self { e, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lengths {
    pub l2: f64,
    /// Half ribbon length `L1 + L2`.
    pub l: f64,
    pub two_l: f64,
}

pub fn derive_lengths(geom: &RibbonGeometry) -> Lengths {
    let l2 = geom.gamma_s * geom.l1;
    let l = geom.l1 * (1.0 + geom.gamma_s);
    Lengths { l2, l, two_l: 2.0 * l }
}

/// How the torsion constant of the strip is evaluated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TorsionMode {
    /// Thin-strip limit `J = h t³ / 3`. Keeps `J = 4 I_eta` exactly.
    #[default]
    ThinStrip,
    /// `J = (h t³ / 3)(1 - 0.63 t / h)`.
    EndCorrected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionProperties {
    /// Second moment for out-of-plane bending, m⁴.
    pub i_eta: f64,
    /// Second moment for in-plane bending, m⁴.
    pub i_in: f64,
    /// Torsion constant, m⁴.
    pub j: f64,
    /// Shear modulus, Pa.
    pub g: f64,
}

impl SectionProperties {
    pub fn ei_eta(&self, mat: &Material) -> f64 {
        mat.e * self.i_eta
    }
    pub fn ei_in(&self, mat: &Material) -> f64 {
        mat.e * self.i_in
    }
    pub fn gj(&self) -> f64 {
        self.g * self.j
    }
}

pub fn section_properties(
    geom: &RibbonGeometry,
    mat: &Material,
    torsion: TorsionMode,
) -> SectionProperties {
    let (h, t) = (geom.h, geom.t);
    let ht3 = h * (t * t * t);
    let j_thin = ht3 / 3.0;
    let j = match torsion {
        TorsionMode::ThinStrip => j_thin,
        TorsionMode::EndCorrected => j_thin * (1.0 - 0.63 * t / h),
    };
    SectionProperties {
        i_eta: ht3 / 12.0,
        i_in: t * (h * h * h) / 12.0,
        j,
        g: mat.shear_modulus(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BistabilityMargin {
    /// `asin(1/gamma_s) + theta`, rad.
    pub beta: f64,
    pub bistable: bool,
}

/// Margins below this are treated as the mono-stable boundary, so that
/// `asin(1/2) - 30°` does not come out bistable on rounding noise.
pub const BETA_EPS: f64 = 1e-12;

/// The kink rotation that assembly must absorb; the design is bistable iff
/// it is strictly positive.
pub fn bistability_margin(geom: &RibbonGeometry) -> BistabilityMargin {
    let beta = (1.0 / geom.gamma_s).asin() + geom.theta;
    BistabilityMargin { beta, bistable: beta > BETA_EPS }
}

pub(crate) fn require_bistable(geom: &RibbonGeometry) -> Result<f64> {
    let m = bistability_margin(geom);
    if m.bistable {
        Ok(m.beta)
    } else {
        Err(HcmError::NotBistable { beta_deg: m.beta.to_degrees() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn mm(v: f64) -> f64 {
        v * 1e-3
    }

    fn pneumatic() -> RibbonGeometry {
        RibbonGeometry::new(mm(12.5), 6.0, (-3f64).to_radians(), mm(15.0), mm(0.381)).unwrap()
    }

    #[test]
    fn lengths_tethered_and_untethered() {
        let l = derive_lengths(&pneumatic());
        assert_relative_eq!(l.l2, mm(75.0), max_relative = 1e-12);
        assert_relative_eq!(l.two_l, mm(175.0), max_relative = 1e-12);

        let g = RibbonGeometry::new(mm(29.0), 2.0, (-23.5f64).to_radians(), mm(15.0), mm(0.762))
            .unwrap();
        assert_relative_eq!(derive_lengths(&g).two_l, mm(174.0), max_relative = 1e-12);
    }

    #[test]
    fn near_equal_segments_accepted() {
        let g = RibbonGeometry::new(mm(10.0), 1.0001, 0.0, mm(15.0), mm(0.381)).unwrap();
        assert_relative_eq!(g.lengths().l2, mm(10.0), max_relative = 1e-3);
    }

    #[test]
    fn rejects_invalid_geometry() {
        let theta = 0.1;
        let cases = [
            (RibbonGeometry::new(0.0, 6.0, theta, 0.015, 4e-4), "L1"),
            (RibbonGeometry::new(0.01, 1.0, theta, 0.015, 4e-4), "gamma_s"),
            (RibbonGeometry::new(0.01, 0.5, theta, 0.015, 4e-4), "gamma_s"),
            (RibbonGeometry::new(0.01, 6.0, 1.6, 0.015, 4e-4), "theta"),
            (RibbonGeometry::new(0.01, 6.0, theta, 0.015, 0.02), "t"),
            (RibbonGeometry::new(0.01, 6.0, theta, -1.0, 4e-4), "h"),
        ];
        for (r, field) in cases {
            match r {
                Err(HcmError::InvalidGeometry { field: f, .. }) => assert_eq!(f, field),
                other => panic!("expected InvalidGeometry({field}), got {other:?}"),
            }
        }
    }

    #[test]
    fn rejects_invalid_material() {
        assert!(Material::new(-1.0, 0.3, 1000.0).is_err());
        assert!(Material::new(1e9, 0.5, 1000.0).is_err());
        assert!(Material::new(1e9, 0.3, 0.0).is_err());
        assert!(Material::new(1e9, 0.0, 1.0).is_ok());
    }

    #[test]
    fn section_properties_pneumatic() {
        let sp = section_properties(&pneumatic(), &Material::plastic(), TorsionMode::ThinStrip);
        // 0.015 * 0.381e-3^3 / 12 and 1.73e9 / 2.7
        assert_relative_eq!(sp.i_eta, 6.9132e-14, max_relative = 1e-4);
        assert_relative_eq!(sp.g, 0.640_740_7e9, max_relative = 1e-6);
        assert_eq!(sp.j, 4.0 * sp.i_eta);
    }

    #[test]
    fn thickness_doubling_is_cubic() {
        let g = pneumatic();
        let g2 = g.with_thickness(2.0 * g.t()).unwrap();
        let a = section_properties(&g, &Material::plastic(), TorsionMode::ThinStrip);
        let b = section_properties(&g2, &Material::plastic(), TorsionMode::ThinStrip);
        assert_eq!(b.i_eta, 8.0 * a.i_eta);
        assert_eq!(b.j, 8.0 * a.j);
    }

    #[test]
    fn corrected_torsion_is_smaller() {
        let g = pneumatic();
        let thin = section_properties(&g, &Material::plastic(), TorsionMode::ThinStrip);
        let corr = section_properties(&g, &Material::plastic(), TorsionMode::EndCorrected);
        assert_relative_eq!(corr.j / thin.j, 1.0 - 0.63 * 0.381 / 15.0, max_relative = 1e-12);
    }

    #[test]
    fn margin_examples() {
        let m = bistability_margin(&pneumatic());
        assert!(m.bistable);
        assert_relative_eq!(m.beta.to_degrees(), 6.594, epsilon = 1e-3);
        assert_relative_eq!(m.beta, 0.11509, epsilon = 1e-5);

        let g = RibbonGeometry::new(0.029, 2.0, (-30f64).to_radians(), 0.015, 7.62e-4).unwrap();
        let m = bistability_margin(&g);
        assert!(m.beta.abs() < 1e-12);
        assert!(!m.bistable);

        let g = g.with_shape((-23.5f64).to_radians(), 2.0).unwrap();
        let m = bistability_margin(&g);
        assert!(m.bistable);
        assert_relative_eq!(m.beta, 0.11345, epsilon = 1e-5);
    }

    #[test]
    fn margin_monotone_in_shape_factors() {
        let g = pneumatic();
        let mut prev = f64::NEG_INFINITY;
        for i in 0..50 {
            let theta = (-40.0 + 1.5 * i as f64).to_radians();
            let b = bistability_margin(&g.with_shape(theta, 6.0).unwrap()).beta;
            assert!(b > prev);
            prev = b;
        }
        let mut prev = f64::INFINITY;
        for i in 0..50 {
            let gamma = 1.05 + 0.3 * i as f64;
            let b = bistability_margin(&g.with_shape(0.1, gamma).unwrap()).beta;
            assert!(b < prev);
            prev = b;
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn torsion_is_four_bending(h in 1e-3..1.0f64, frac in 1e-3..0.99f64, e in 1e6..1e12f64) {
                let g = RibbonGeometry::new(0.01, 3.0, 0.0, h, h * frac).unwrap();
                let mat = Material::new(e, 0.3, 1000.0).unwrap();
                let sp = section_properties(&g, &mat, TorsionMode::ThinStrip);
                prop_assert_eq!(sp.j, 4.0 * sp.i_eta);
            }

            #[test]
            fn margin_ignores_length_scale(s in 1e-3..1e3f64, gamma in 1.01..20.0f64, theta in -1.5..1.5f64) {
                let g = RibbonGeometry::new(0.01, gamma, theta, 0.015, 4e-4).unwrap();
                let a = bistability_margin(&g);
                let b = bistability_margin(&g.scaled(s).unwrap());
                prop_assert_eq!(a, b);
            }
        }
    }
}
