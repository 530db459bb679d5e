use std::f64::consts::TAU;

use num_complex::Complex64;
use siegel::boundary::{boundary_curve, classify_parameter, orbit, ClassifyOptions, Rejection, Verdict, DEFAULT_ORBIT_LEN};
use siegel::dynamics::{alpha_star, MapParams};
use siegel::gamma::iota;
use siegel::geometry::{winding_number, PointIndex};
use siegel::linearization::{build_traps, DEFAULT_ORDER};
use siegel::rotation::RotationNumber;
use siegel::sphere::{Center, SpherePoint};

fn golden(alpha: Complex64) -> MapParams {
    MapParams::new(RotationNumber::golden(), alpha).unwrap()
}

/// Ten parameters well outside Γ and their ten mirror images.
fn regression_set() -> Vec<(Complex64, Verdict)> {
    let theta = RotationNumber::golden().value();
    let outer: Vec<Complex64> = [4.0, 6.0]
        .iter()
        .flat_map(|&r| (0..5).map(move |k| Complex64::from_polar(r, TAU * (k as f64 + 0.3) / 5.0)))
        .collect();
    let mut set: Vec<_> = outer.iter().map(|&a| (a, Verdict::ExteriorType)).collect();
    set.extend(outer.iter().map(|&a| (iota(theta, a), Verdict::InteriorType)));
    set
}

#[test]
fn regression_verdicts() {
    let opts = ClassifyOptions::default();
    for (alpha, expected) in regression_set() {
        assert_eq!(classify_parameter(&golden(alpha), &opts).verdict, expected, "alpha = {alpha}");
    }
}

#[test]
fn verdicts_survive_doubling_the_orbit() {
    let short = ClassifyOptions::default();
    let long = short.with_orbit_len(2 * short.orbit_len);
    for (alpha, _) in regression_set() {
        let p = golden(alpha);
        assert_eq!(classify_parameter(&p, &short).verdict, classify_parameter(&p, &long).verdict, "alpha = {alpha}");
    }
}

#[test]
fn mirror_parameters_swap_exterior_and_interior() {
    let theta = RotationNumber::golden().value();
    let opts = ClassifyOptions::default();
    // mix of far and near-Γ parameters
    let alphas = (0..20).map(|k| Complex64::from_polar(1.2 + 0.15 * k as f64, TAU * k as f64 / 7.3));
    for alpha in alphas {
        let a = classify_parameter(&golden(alpha), &opts).verdict;
        let b = classify_parameter(&golden(iota(theta, alpha)), &opts).verdict;
        assert_eq!(a == Verdict::ExteriorType, b == Verdict::InteriorType, "alpha = {alpha}: {a:?} vs {b:?}");
        assert_eq!(a == Verdict::InteriorType, b == Verdict::ExteriorType, "alpha = {alpha}: {a:?} vs {b:?}");
        assert_eq!(a == Verdict::OnGamma, b == Verdict::OnGamma, "alpha = {alpha}: {a:?} vs {b:?}");
    }
}

#[test]
fn boundary_curves_at_alpha_star_are_disjoint() {
    let theta = RotationNumber::golden();
    let p = golden(alpha_star(&theta));
    let traps = build_traps(&p, DEFAULT_ORDER, 0.5).unwrap();
    let cp = p.critical_points();
    let zero = boundary_curve(&orbit(&p, SpherePoint::finite(cp.c1), 20_000, &traps), &theta, Center::Zero).unwrap();
    let inf = boundary_curve(&orbit(&p, SpherePoint::finite(cp.c2), 20_000, &traps), &theta, Center::Infinity).unwrap();
    // both in the z-plane
    let a = zero.points.clone();
    let b: Vec<Complex64> = inf.points.iter().map(|w| 1.0 / w).collect();
    // vertex sets separated by more than the longest edge of either curve,
    // so no edge can cross the other curve
    let gap = |v: &[Complex64]| (0..v.len()).map(|i| (v[(i + 1) % v.len()] - v[i]).norm()).fold(0.0, f64::max);
    let index = PointIndex::new(&b);
    let separation = a.iter().map(|&z| index.nearest_distance(z)).fold(f64::INFINITY, f64::min);
    assert!(separation > gap(&a).max(gap(&b)), "separation {separation}");
    // both surround 0, with ∂Δ⁰ on the 0 side of ∂Δ^∞
    assert_eq!(winding_number(&a, Complex64::new(0.0, 0.0)), 1);
    assert!(a.iter().all(|&z| winding_number(&b, z) != 0));
    assert!(b.iter().all(|&z| winding_number(&a, z) == 0));
}

#[test]
fn zero_trap_lies_inside_the_c1_boundary() {
    let theta = RotationNumber::golden();
    let p = golden(Complex64::new(3.0, 0.0));
    let traps = build_traps(&p, DEFAULT_ORDER, 0.5).unwrap();
    let curve = boundary_curve(&orbit(&p, SpherePoint::finite(p.critical_points().c1), 20_000, &traps), &theta, Center::Zero).unwrap();
    let r = traps[0].radius;
    assert!(curve.points.iter().all(|w| w.norm() > r));
    assert!((0..64).all(|k| winding_number(&curve.points, Complex64::from_polar(r, TAU * k as f64 / 64.0)) == 1));
}

#[test]
fn render_options_still_test_simplicity_on_ties() {
    // c1 fails only the simplicity test here
    let alpha = Complex64::new(-0.73, 1.3 - 118.5 * 4.0 / 185.0);
    let p = golden(alpha);
    let full = classify_parameter(&p, &ClassifyOptions::default());
    let render = classify_parameter(&p, &ClassifyOptions::for_render(DEFAULT_ORBIT_LEN));
    assert_eq!(full.verdict, Verdict::InteriorType);
    assert_eq!(render.verdict, full.verdict);
    assert_eq!(render.c1.unwrap().rejection, Some(Rejection::NotSimple));
}
