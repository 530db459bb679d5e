use std::f64::consts::TAU;
use std::sync::OnceLock;

use num_complex::Complex64;
use siegel::angle::wrap_pi;
use siegel::boundary::ClassifyOptions;
use siegel::dynamics::alpha_star;
use siegel::gamma::{
    iota, switchover_on_ray, trace_gamma, verify_gamma, Critical, GammaCurve, GammaRecord, RaySwitch, StatusSwitch, TraceOptions,
    VerifyOptions,
};
use siegel::geometry::polyline_hausdorff;
use siegel::rotation::RotationNumber;

fn traced(rays: usize) -> &'static GammaCurve {
    static M32: OnceLock<GammaCurve> = OnceLock::new();
    static M64: OnceLock<GammaCurve> = OnceLock::new();
    let cell = match rays {
        32 => &M32,
        64 => &M64,
        _ => unreachable!(),
    };
    cell.get_or_init(|| trace_gamma(&RotationNumber::golden(), &TraceOptions { rays, scan: false, ..TraceOptions::default() }).unwrap())
}

fn synthetic(points: impl Iterator<Item = Complex64>) -> GammaCurve {
    let records = points
        .map(|alpha| {
            let (t, phi) = alpha.to_polar();
            let c1 = StatusSwitch { critical: Critical::C1, t_lo: t, t_hi: t, on_at_lo: false };
            let c2 = StatusSwitch { critical: Critical::C2, t_lo: t, t_hi: t, on_at_lo: true };
            GammaRecord {
                phi,
                switch: Some(RaySwitch { phi, alpha, c1, c2, classifications: 0, nudges: 0 }),
                a: None,
                a_tilde: None,
                match_error: None,
                extra_crossings: Vec::new(),
                failure: None,
            }
        })
        .collect();
    GammaCurve { theta: RotationNumber::golden().value(), tol: 1e-3, records }
}

fn circle(center: Complex64, radius: f64, n: usize) -> GammaCurve {
    synthetic((0..n).map(|k| center + Complex64::from_polar(radius, TAU * k as f64 / n as f64)))
}

#[test]
fn doubling_the_ray_count_moves_the_curve_little() {
    let (coarse, fine) = (traced(32), traced(64));
    assert!(!coarse.has_gaps() && !fine.has_gaps());
    let d = polyline_hausdorff(&coarse.points(), &fine.points());
    assert!(d < 5.0 * coarse.max_spacing(), "hausdorff {d}, spacing {}", coarse.max_spacing());
}

#[test]
fn mirror_rays_give_mirror_points() {
    let curve = traced(64);
    let theta = curve.theta;
    for r in &curve.records {
        let alpha = r.alpha().unwrap();
        let image = iota(theta, alpha);
        let partner = curve.nearest_record(image).unwrap().alpha().unwrap();
        assert!(wrap_pi(partner.arg() - image.arg()).abs() < 1e-9, "image ray missing for phi {}", r.phi);
        let rel = (partner.norm() / image.norm()).ln().abs();
        assert!(rel < 10.0 * curve.tol, "phi {}: radii differ by {rel}", r.phi);
    }
}

#[test]
fn angles_cover_the_circle_and_vanish_near_alpha_star() {
    let curve = traced(64);
    assert!(curve.angle_octants().iter().all(|&hit| hit));
    assert!(curve.angle_monotone_fraction() >= 0.95);
    let star = alpha_star(&RotationNumber::golden());
    let a = curve.nearest_record(star).unwrap().a.unwrap();
    assert!(wrap_pi(a).abs() < TAU / 64.0 + 5e-3, "A = {a}");
}

#[test]
fn switchover_on_the_ray_through_alpha_star() {
    let theta = RotationNumber::golden();
    let star = alpha_star(&theta);
    let tol = 1e-3;
    let s = switchover_on_ray(&theta, star.arg(), 1.0 / 3.0, 3.0, tol, &ClassifyOptions::default()).unwrap();
    assert!((s.alpha.norm() - star.norm()).abs() < 10.0 * tol * star.norm(), "{} vs {}", s.alpha.norm(), star.norm());
}

#[test]
fn unit_circle_fails_the_probes() {
    let theta = RotationNumber::golden();
    let r = verify_gamma(&circle(Complex64::new(0.0, 0.0), 1.0, 64), &theta, &VerifyOptions::default());
    // the circle is its own mirror image, so only the probes can reject it
    assert!(r.iota_ok && r.winding_ok);
    assert!(!r.probes_ok);
    assert!(!r.passed());
}

#[test]
fn off_center_circle_is_not_mirror_invariant() {
    let theta = RotationNumber::golden();
    let r = verify_gamma(&circle(Complex64::new(0.3, -0.2), 1.0, 64), &theta, &VerifyOptions::default());
    assert!(r.winding_ok);
    assert!(!r.iota_ok, "hausdorff {}", r.iota_hausdorff);
    assert!(!r.passed());
}

#[test]
fn reversing_the_curve_only_flips_the_winding() {
    let curve = traced(32);
    let theta = RotationNumber::golden();
    let opts = VerifyOptions::default();
    let (a, b) = (verify_gamma(curve, &theta, &opts), verify_gamma(&curve.reversed(), &theta, &opts));
    assert_eq!(a.winding, -b.winding);
    assert_eq!(a.winding.abs(), 1);
    assert_eq!((a.gaps, a.simple, a.iota_ok, a.winding_ok), (b.gaps, b.simple, b.iota_ok, b.winding_ok));
    assert!((a.iota_hausdorff - b.iota_hausdorff).abs() < 1e-12);
    assert_eq!(a.probes.len(), b.probes.len());
    assert_eq!(a.probes_ok, b.probes_ok);
}
