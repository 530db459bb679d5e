//! Desk-scale property suite behind `siegel verify`.

use std::f64::consts::TAU;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::angle::{conformal_angle_with, wrap_pi, DEFAULT_MATCH_FACTOR};
use crate::boundary::{classify_parameter, orbit, ClassifyOptions, Verdict};
use crate::dynamics::{alpha_star, critical_points, limit_convergence_check, multiplier, tau, LimitAt, MapParams};
use crate::gamma::{iota, trace_gamma, verify_gamma, GammaCurve, TraceOptions, VerifyOptions, DEFAULT_TOL};
use crate::linearization::{build_traps, functional_residual, solve_linearizer, taylor_f2};
use crate::render::{encode_ppm, render_param_plane, Palette, Raster, Rect};
use crate::rotation::RotationNumber;
use crate::sphere::{Center, SpherePoint};

/// A parameter at which `c₁` has period 3, paired with `θ = [0; 20, 1, 1, ...]`.
pub const PERIOD_THREE_ALPHA: Complex64 = Complex64::new(0.30689283, 0.11243024);

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOptions {
    pub theta: RotationNumber,
    pub seed: u64,
    /// Skip the Γ trace and the render checks.
    pub quick: bool,
    pub classify: ClassifyOptions,
    pub rays: usize,
    pub tol: f64,
    pub match_factor: f64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            theta: RotationNumber::golden(),
            seed: 0,
            quick: false,
            classify: ClassifyOptions::default(),
            rays: 64,
            tol: DEFAULT_TOL,
            match_factor: DEFAULT_MATCH_FACTOR,
        }
    }
}

pub fn is_period_three_theta(theta: &RotationNumber) -> bool {
    theta.preperiod() == [20] && theta.period() == [1]
}

fn timed(name: &str, f: impl FnOnce() -> (bool, String)) -> CheckResult {
    let start = Instant::now();
    let (passed, detail) = f();
    CheckResult { name: name.to_string(), passed, detail, seconds: start.elapsed().as_secs_f64() }
}

fn random_alpha(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(10f64.powf(rng.gen_range(-1.0..1.0)), rng.gen_range(0.0..TAU))
}

/// Largest chordal defect of `τ∘f_α = f_{α'}∘τ` over 100 random `(α, z)`.
pub fn symmetry_defect(theta: &RotationNumber, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let p = MapParams::new(theta.clone(), random_alpha(&mut rng)).expect("nonzero alpha");
        let z = SpherePoint::finite(Complex64::from_polar(10f64.powf(rng.gen_range(-2.0..2.0)), rng.gen_range(0.0..TAU)));
        let lhs = p.tau(p.eval_f(z));
        let rhs = p.symmetric().eval_f(p.tau(z));
        worst = worst.max(lhs.chordal(&rhs));
    }
    worst
}

/// Largest `|D − λ|` over 10 random `α`, with `D` the central difference of
/// `f_α²` at 0.
pub fn multiplier_defect(theta: &RotationNumber, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let lambda = multiplier(theta);
    let h = 1e-5;
    (0..10)
        .map(|_| {
            let p = MapParams::new(theta.clone(), random_alpha(&mut rng)).expect("nonzero alpha");
            let d = (p.f2(Complex64::new(h, 0.0)) - p.f2(Complex64::new(-h, 0.0))) / (2.0 * h);
            (d - lambda).norm()
        })
        .fold(0.0, f64::max)
}

/// Largest defect of `c₁ + c₂ = −2/λ`, `c₁c₂ = 1/λ` and `τ(c₁) = c₂` over
/// `theta` and the rotation numbers `[0; k, k, ...]`, `k = 2..=10`.
pub fn critical_identity_defect(theta: &RotationNumber) -> f64 {
    let mut thetas = vec![theta.clone()];
    thetas.extend((2..=10).map(|k| RotationNumber::from_quotients(&[], &[k]).expect("valid quotients")));
    thetas
        .iter()
        .map(|t| {
            let lambda = multiplier(t);
            let cp = critical_points(lambda);
            let sum = (cp.c1 + cp.c2 + 2.0 / lambda).norm();
            let prod = (cp.c1 * cp.c2 - 1.0 / lambda).norm();
            let swap = (tau(lambda, SpherePoint::finite(cp.c1)).to_complex() - cp.c2).norm();
            sum.max(prod).max(swap)
        })
        .fold(0.0, f64::max)
}

/// Sup residual of the linearizer at `α = 1` on `|ζ| = r/3`.
pub fn linearizer_residual(theta: &RotationNumber, order: usize) -> Result<f64, String> {
    let p = MapParams::new(theta.clone(), Complex64::new(1.0, 0.0)).expect("unit alpha");
    let ts = taylor_f2(&p, Center::Zero, order).map_err(|e| e.to_string())?;
    let lin = solve_linearizer(&ts, order).map_err(|e| e.to_string())?;
    let r = lin.radius_estimate.ok_or("no radius estimate")?;
    Ok(functional_residual(&p, &lin, r / 3.0, 256))
}

/// Deviations of `f_α²` from `g_∞` at `|α| = 10⁶` and from `g₀` at
/// `|α| = 10⁻⁶`, each on 50 points of the unit circle kept away from the
/// two excluded points.
pub fn limit_defects(theta: &RotationNumber) -> Result<(f64, f64), String> {
    let arc = |skip: f64| -> Vec<Complex64> {
        (0..50).map(|k| Complex64::from_polar(1.0, TAU * (skip + 0.05 + 0.9 * k as f64 / 49.0))).collect()
    };
    let inf = limit_convergence_check(theta, Complex64::new(1e6, 0.0), LimitAt::Infinity, &arc(0.5 - theta.value()), 0.1)
        .map_err(|e| e.to_string())?;
    let zero = limit_convergence_check(theta, Complex64::new(1e-6, 0.0), LimitAt::Zero, &arc(0.5), 0.1).map_err(|e| e.to_string())?;
    Ok((inf, zero))
}

/// Chordal distance between `f^{∘3}(c₁)` and `c₁`.
pub fn period_three_defect(p: &MapParams) -> f64 {
    let c1 = SpherePoint::finite(p.critical_points().c1);
    p.eval_f(p.eval_f(p.eval_f(c1))).chordal(&c1)
}

fn boundary_checks(opts: &SuiteOptions) -> Vec<CheckResult> {
    let theta = &opts.theta;
    let classify = |alpha: Complex64| classify_parameter(&MapParams::new(theta.clone(), alpha).expect("nonzero alpha"), &opts.classify);
    if is_period_three_theta(theta) {
        let p = MapParams::new(theta.clone(), PERIOD_THREE_ALPHA).expect("nonzero alpha");
        return vec![
            timed("period-3 anchor f^3(c1) = c1", || {
                let d = period_three_defect(&p);
                (d < 1e-5, format!("chordal {d:.2e}"))
            }),
            timed("period-3 alpha: c2 on boundary, c1 untrapped", || {
                let c = classify(PERIOD_THREE_ALPHA);
                let c2_on = c.c2.as_ref().is_some_and(|e| e.on_boundary);
                let steps = opts.classify.orbit_len.max(100_000);
                let free = match build_traps(&p, opts.classify.series_order, opts.classify.trap_fraction) {
                    Ok(traps) => orbit(&p, SpherePoint::finite(p.critical_points().c1), steps, &traps).trap_entry.is_none(),
                    Err(_) => false,
                };
                (c2_on && free, format!("verdict {:?}, c2 on {c2_on}, c1 trap-free for {steps} steps {free}", c.verdict))
            }),
        ];
    }
    vec![
        timed("classify alpha=3", || {
            let c = classify(Complex64::new(3.0, 0.0));
            let ev = c.c1.as_ref();
            let diag = ev.and_then(|e| e.diagnostics.as_ref());
            let simple = diag.and_then(|d| d.simple) == Some(true);
            let winding = diag.and_then(|d| d.winding) == Some(1);
            let untrapped = ev.is_some_and(|e| e.trap_entry.is_none());
            let ok = c.verdict == Verdict::ExteriorType && simple && winding && untrapped;
            (ok, format!("{:?}, simple {simple}, winding 1 {winding}, untrapped {untrapped}", c.verdict))
        }),
        timed("classify iota(3)", || {
            let c = classify(iota(theta.value(), Complex64::new(3.0, 0.0)));
            (c.verdict == Verdict::InteriorType, format!("{:?}", c.verdict))
        }),
    ]
}

fn gamma_checks(opts: &SuiteOptions) -> (Vec<CheckResult>, Option<GammaCurve>) {
    let trace_opts = TraceOptions { rays: opts.rays, tol: opts.tol, classify: opts.classify, ..TraceOptions::default() };
    let mut curve = None;
    let mut out = vec![timed("gamma trace", || match trace_gamma(&opts.theta, &trace_opts) {
        Ok(c) => {
            let gaps = c.has_gaps();
            let detail = format!("{} rays, max bracket {:.1e}", c.records.len(), c.records.iter().filter_map(|r| r.bracket_width()).fold(0.0, f64::max));
            curve = Some(c);
            (!gaps, detail)
        }
        Err(e) => (false, e.to_string()),
    })];
    let Some(c) = curve.as_ref() else { return (out, None) };
    out.push(timed("gamma structure", || {
        let vopts = VerifyOptions { classify: opts.classify, ..VerifyOptions::default() };
        let r = verify_gamma(c, &opts.theta, &vopts);
        let ok = r.passed() && r.simple;
        let probes = r.probes.iter().filter(|p| p.ok).count();
        (ok, format!("simple {}, winding {}, iota {:.1e}, probes {probes}/{}", r.simple, r.winding, r.iota_hausdorff, r.probes.len()))
    }));
    out.push(timed("gamma angle monotone", || {
        let f = c.angle_monotone_fraction();
        (f >= 0.95, format!("{:.1}% of edges", 100.0 * f))
    }));
    out.push(timed("angle relation on gamma", || {
        let with_a: Vec<_> = c.records.iter().filter(|r| r.a.is_some() && r.a_tilde.is_some()).collect();
        if with_a.len() < 8 {
            return (false, format!("only {} records carry angles", with_a.len()));
        }
        let worst = (0..8)
            .map(|k| {
                let r = with_a[k * with_a.len() / 8];
                wrap_pi(r.a.unwrap() - r.a_tilde.unwrap() - TAU * opts.theta.value()).abs()
            })
            .fold(0.0, f64::max);
        (worst < 5e-3, format!("max defect {worst:.1e}"))
    }));
    (out, curve)
}

/// Runs the suite; quick mode skips the Γ trace and the render checks.
pub fn run_suite(opts: &SuiteOptions) -> Vec<CheckResult> {
    let theta = &opts.theta;
    let mut out = vec![
        timed("conjugacy symmetry", || {
            let d = symmetry_defect(theta, opts.seed);
            (d < 1e-10, format!("max chordal {d:.1e}"))
        }),
        timed("multiplier at 0", || {
            let d = multiplier_defect(theta, opts.seed);
            (d < 1e-6, format!("max |D - lambda| {d:.1e}"))
        }),
        timed("critical identities", || {
            let d = critical_identity_defect(theta);
            (d < 1e-12, format!("max defect {d:.1e}"))
        }),
        timed("linearizer residual", || match linearizer_residual(theta, opts.classify.series_order) {
            Ok(r) => (r < 1e-8, format!("sup residual {r:.1e}")),
            Err(e) => (false, e),
        }),
        timed("limit maps", || match limit_defects(theta) {
            Ok((inf, zero)) => (inf < 1e-4 && zero < 1e-4, format!("infinity {inf:.1e}, zero {zero:.1e}")),
            Err(e) => (false, e),
        }),
    ];
    out.extend(boundary_checks(opts));
    out.push(timed("alpha_* on gamma with A = 0", || {
        let p = MapParams::new(theta.clone(), alpha_star(theta)).expect("nonzero alpha");
        match conformal_angle_with(&p, &opts.classify, opts.match_factor) {
            Ok(m) => {
                let a = wrap_pi(m.a).abs();
                (a < 1e-2, format!("|A| {a:.1e}"))
            }
            Err(e) => (false, e.to_string()),
        }
    }));
    if opts.quick {
        return out;
    }
    out.extend(gamma_checks(opts).0);
    out.push(timed("render determinism", || {
        let raster = Raster::new(16, 15, Rect::overview()).expect("valid raster");
        let n = opts.classify.orbit_len.min(5_000);
        let a = encode_ppm(&render_param_plane(theta, raster, n), &Palette::default());
        let b = encode_ppm(&render_param_plane(theta, raster, n), &Palette::default());
        (a == b, format!("{} bytes", a.len()))
    }));
    out
}

/// Fixed-width pass/fail table.
pub fn format_table(results: &[CheckResult]) -> String {
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut s = String::new();
    for r in results {
        let mark = if r.passed { "PASS" } else { "FAIL" };
        s.push_str(&format!("{mark}  {:<width$}  {:>7.2}s  {}\n", r.name, r.seconds, r.detail));
    }
    s
}
