//! Linearizer of f² at 0 for α = 1: leading coefficients, radius and residual.

use num_complex::Complex64;
use siegel::dynamics::MapParams;
use siegel::linearization::{build_traps, functional_residual, solve_linearizer, taylor_f2, DEFAULT_ORDER};
use siegel::rotation::RotationNumber;
use siegel::sphere::Center;

fn main() {
    let p = MapParams::new(RotationNumber::golden(), Complex64::new(1.0, 0.0)).unwrap();
    let ts = taylor_f2(&p, Center::Zero, DEFAULT_ORDER).unwrap();
    let lin = solve_linearizer(&ts, DEFAULT_ORDER).unwrap();
    for (k, c) in lin.coeffs.iter().enumerate().take(6) {
        println!("h_{k} = {c:.6}");
    }
    let r = lin.radius_estimate.unwrap();
    println!("radius estimate  {r:.6}");
    println!("residual at r/3  {:.2e}", functional_residual(&p, &lin, r / 3.0, 256));
    for t in build_traps(&p, DEFAULT_ORDER, 0.5).unwrap() {
        println!("trap {:?}  radius {:.6}", t.center, t.radius);
    }
}
