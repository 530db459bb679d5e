//! Traces the orbit of c1 at α = 3 around the Siegel disk about 0 and
//! prints its diagnostics.

use num_complex::Complex64;
use siegel::boundary::{assess_curve, boundary_curve, orbit, BoundaryCriteria};
use siegel::dynamics::MapParams;
use siegel::linearization::{build_traps, DEFAULT_ORDER};
use siegel::rotation::RotationNumber;
use siegel::sphere::{Center, SpherePoint};

fn main() {
    let theta = RotationNumber::golden();
    let p = MapParams::new(theta.clone(), Complex64::new(3.0, 0.0)).unwrap();
    let traps = build_traps(&p, DEFAULT_ORDER, 0.5).unwrap();
    let trace = orbit(&p, SpherePoint::finite(p.critical_points().c1), 20_000, &traps);
    let curve = boundary_curve(&trace, &theta, Center::Zero).unwrap();
    let (diag, rejection) = assess_curve(&curve, &BoundaryCriteria::default());
    println!("trap entry  {:?}", trace.trap_entry);
    println!("vertices    {}", curve.len());
    println!("radii       {:.4} .. {:.4}", diag.r_min, diag.r_max);
    println!("max gap     {:.2e} (diameter {:.3})", diag.max_gap, diag.diameter);
    println!("recurrence  {:?}", diag.recurrence);
    println!("winding     {:?}  simple {:?}", diag.winding, diag.simple);
    println!("rejection   {rejection:?}");
}
