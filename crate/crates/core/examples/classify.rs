//! Classifies a few parameters of the golden-mean family.
//!
//! cargo run --release --example classify [a+bi ...]

use num_complex::Complex64;
use siegel::boundary::{classify_parameter, ClassifyOptions};
use siegel::cli::parse_complex;
use siegel::dynamics::{alpha_star, MapParams};
use siegel::gamma::iota;
use siegel::rotation::RotationNumber;

fn main() {
    let theta = RotationNumber::golden();
    let mut alphas: Vec<Complex64> = std::env::args().skip(1).map(|s| parse_complex(&s).expect("complex literal a+bi")).collect();
    if alphas.is_empty() {
        let three = Complex64::new(3.0, 0.0);
        alphas = vec![three, iota(theta.value(), three), alpha_star(&theta)];
    }
    let opts = ClassifyOptions::default();
    for alpha in alphas {
        let c = classify_parameter(&MapParams::new(theta.clone(), alpha).expect("nonzero alpha"), &opts);
        let on = |e: &Option<siegel::boundary::CriticalEvidence>| e.as_ref().map(|e| e.on_boundary);
        println!("{alpha:>40}  {:<13?} c1 on {:?}  c2 on {:?}", c.verdict, on(&c.c1), on(&c.c2));
    }
}
