//! Conformal angles at α_* and at a point just inside Γ on the same ray.

use siegel::angle::{conformal_angle, measure_angles};
use siegel::boundary::ClassifyOptions;
use siegel::dynamics::{alpha_star, MapParams};
use siegel::rotation::RotationNumber;

fn main() {
    let theta = RotationNumber::golden();
    let star = alpha_star(&theta);
    let p = MapParams::new(theta.clone(), star).unwrap();
    let m = conformal_angle(&p, &ClassifyOptions::default()).unwrap();
    println!("alpha_*       {star}");
    println!("A, A~         {:.6} {:.6}", m.a, m.a_tilde);
    println!("A - A~ - 2pi theta (mod 2pi)  {:.2e}", m.relation_defect(theta.value()));

    // off Γ the critical value no longer sits on the traced boundary
    let q = MapParams::new(theta.clone(), star * 0.9).unwrap();
    match measure_angles(&q, 20_000) {
        Ok(m) => println!("0.9 alpha_*   match error {:.2e}", m.match_error),
        Err(e) => println!("0.9 alpha_*   {e}"),
    }
}
