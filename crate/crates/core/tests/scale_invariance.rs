use hcm_core::buckling::{BucklingOptions, MomentModel};
use hcm_core::model::{Material, RibbonGeometry};
use hcm_core::postbuckle::{analyze, calibrate, Calibration};

fn pneumatic() -> RibbonGeometry {
    RibbonGeometry::new(0.0125, 6.0, (-3f64).to_radians(), 0.015, 0.381e-3).unwrap()
}

fn calibration(opts: &BucklingOptions) -> Calibration {
    calibrate(&pneumatic(), &Material::plastic(), 39f64.to_radians(), opts, "pneumatic", "").unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn tip_angle_and_unitless_barrier_ignore_size_and_modulus() {
    for model in [MomentModel::TipLoad, MomentModel::PrebuckledSinusoid] {
        let opts = BucklingOptions { model, ..Default::default() };
        let c = calibration(&opts);
        let mat = Material::plastic();
        for (gamma, theta) in [(6.0, -3.0), (2.0, -23.5), (4.0, 15.0)] {
            let g = pneumatic().with_shape(f64::to_radians(theta), gamma).unwrap();
            let base = analyze(&g, &mat, &opts, Some(&c)).unwrap();
            for factor in [0.1, 10.0] {
                let a = analyze(&g.scaled(factor).unwrap(), &mat, &opts, Some(&c)).unwrap();
                assert!(rel(a.psi_l, base.psi_l) < 1e-6, "{model:?} geometry x{factor}");
                assert!(rel(a.u_barr_unitless, base.u_barr_unitless) < 1e-6);
            }
            for factor in [0.01, 100.0] {
                let a = analyze(&g, &mat.with_modulus(mat.e * factor), &opts, Some(&c)).unwrap();
                assert!(rel(a.psi_l, base.psi_l) < 1e-6, "{model:?} modulus x{factor}");
                assert!(rel(a.u_barr_unitless, base.u_barr_unitless) < 1e-6);
            }
        }
    }
}

#[test]
fn barrier_is_cubic_in_thickness() {
    let opts = BucklingOptions::default();
    let c = calibration(&opts);
    let mat = Material::plastic();
    for g in [pneumatic(), pneumatic().with_shape(0.2, 4.0).unwrap()] {
        let thin = analyze(&g, &mat, &opts, Some(&c)).unwrap();
        let thick = analyze(&g.with_thickness(2.0 * g.t()).unwrap(), &mat, &opts, Some(&c)).unwrap();
        assert!(rel(thick.u_barr / thin.u_barr, 8.0) < 1e-12);
        assert!(rel(thick.u_barr_unitless, thin.u_barr_unitless) < 1e-12);
    }
}
