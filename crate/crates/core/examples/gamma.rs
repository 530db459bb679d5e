//! Traces Γ for the golden mean with a coarse ray set and checks it.
//!
//! cargo run --release --example gamma [rays]

use siegel::gamma::{trace_gamma, verify_gamma, TraceOptions, VerifyOptions};
use siegel::rotation::RotationNumber;

fn main() {
    let rays = std::env::args().nth(1).map(|s| s.parse().expect("ray count")).unwrap_or(16);
    let theta = RotationNumber::golden();
    let opts = TraceOptions { rays, scan: false, ..TraceOptions::default() };
    let curve = trace_gamma(&theta, &opts).unwrap();
    for r in &curve.records {
        if let Some(alpha) = r.alpha() {
            println!("phi {:7.4}  alpha {:>44}  A {:.4}", r.phi, alpha.to_string(), r.a.unwrap_or(f64::NAN));
        }
    }
    let report = verify_gamma(&curve, &theta, &VerifyOptions::default());
    println!("winding {}  simple {}  iota distance {:.2e}  probes ok {}", report.winding, report.simple, report.iota_hausdorff, report.probes_ok);
    println!("A monotone on {:.0}% of edges", 100.0 * curve.angle_monotone_fraction());
}
