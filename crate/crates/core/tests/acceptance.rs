//! Acceptance criteria 1 to 11, one PASS/FAIL line each.
//!
//! Run with `cargo test --release --test acceptance`.

use std::collections::VecDeque;
use std::f64::consts::TAU;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use siegel::angle::{conformal_angle, wrap_pi};
use siegel::boundary::{classify_parameter, ClassifyOptions, Verdict};
use siegel::dynamics::{alpha_star, MapParams};
use siegel::gamma::{iota, trace_gamma, verify_gamma, GammaCurve, TraceOptions, VerifyOptions};
use siegel::render::{encode_ppm, render_param_plane, ImageBuffer, Palette, PixelClass, Raster, Rect};
use siegel::rotation::RotationNumber;
use siegel::verify::{
    critical_identity_defect, limit_defects, linearizer_residual, multiplier_defect, period_three_defect, symmetry_defect,
    PERIOD_THREE_ALPHA,
};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

struct Runner {
    failures: usize,
}

impl Runner {
    fn check(&mut self, id: &str, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let o = f();
        let took = start.elapsed();
        let in_time = took < budget;
        let passed = o.passed && in_time;
        if !passed {
            self.failures += 1;
        }
        let mark = if passed { "PASS" } else { "FAIL" };
        let late = if in_time { "" } else { " (over budget)" };
        println!("{mark}  {id:>3}  {name:<32} {:>8.2}s / {:>5}s{late}  {}", took.as_secs_f64(), budget.as_secs(), o.detail);
    }
}

fn golden(alpha: Complex64) -> MapParams {
    MapParams::new(RotationNumber::golden(), alpha).unwrap()
}

fn overview_render(threads: usize) -> ImageBuffer {
    let raster = Raster::new(200, 185, Rect::overview()).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| render_param_plane(&RotationNumber::golden(), raster, ClassifyOptions::default().orbit_len))
}

/// Sizes of the 4-connected components of `class`, largest first.
fn components(img: &ImageBuffer, class: PixelClass) -> Vec<usize> {
    let (w, h) = (img.width(), img.height());
    let mut seen = vec![false; w * h];
    let mut sizes = Vec::new();
    for start in 0..w * h {
        if seen[start] || img.classes[start] != class {
            continue;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut size = 0;
        while let Some(k) = queue.pop_front() {
            size += 1;
            let (i, j) = (k % w, k / w);
            let nbrs = [(i > 0).then(|| k - 1), (i + 1 < w).then(|| k + 1), (j > 0).then(|| k - w), (j + 1 < h).then(|| k + w)];
            for n in nbrs.into_iter().flatten() {
                if !seen[n] && img.classes[n] == class {
                    seen[n] = true;
                    queue.push_back(n);
                }
            }
        }
        sizes.push(size);
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

fn two_regions(img: &ImageBuffer) -> Outcome {
    let total = img.classes.len();
    let mut main = 0;
    let mut parts = Vec::new();
    let mut ok = true;
    for class in [PixelClass::ExteriorType, PixelClass::InteriorType] {
        let sizes = components(img, class);
        let count: usize = sizes.iter().sum();
        let largest = sizes.first().copied().unwrap_or(0);
        ok &= largest * 10 >= total && largest * 100 >= 95 * count;
        main += largest;
        parts.push(format!("{class:?} {largest}/{count} px in {} parts", sizes.len()));
    }
    let fringe = total - main;
    ok &= fringe * 20 <= total;
    parts.push(format!("fringe {fringe} px"));
    outcome(ok, parts.join(", "))
}

/// Classes of the pixels whose centers lie within `radius` pixels of `z`.
fn classes_near(img: &ImageBuffer, z: Complex64, radius: f64) -> Vec<PixelClass> {
    let (x, y) = img.raster.to_pixel(z);
    let mut out = Vec::new();
    for j in 0..img.height() {
        for i in 0..img.width() {
            let (dx, dy) = (i as f64 + 0.5 - x, j as f64 + 0.5 - y);
            if dx.hypot(dy) <= radius {
                out.push(img.class_at(i, j));
            }
        }
    }
    out
}

fn interface_near_gamma(img: &ImageBuffer, curve: &GammaCurve) -> Outcome {
    let points = curve.points();
    let missed: Vec<String> = points
        .iter()
        .filter(|&&g| {
            let near = classes_near(img, g, 2.0);
            !(near.contains(&PixelClass::InteriorType) && near.contains(&PixelClass::ExteriorType))
        })
        .map(|g| format!("{g:.3}"))
        .collect();
    outcome(missed.is_empty() && points.len() == 64, format!("{}/{} points, missed {missed:?}", points.len() - missed.len(), points.len()))
}

/// Class of the pixel `offset` pixels from `g` along the ray through `g`.
fn class_along_ray(img: &ImageBuffer, g: Complex64, offset: f64) -> Option<PixelClass> {
    let (x, y) = img.raster.to_pixel(g);
    let (x1, y1) = img.raster.to_pixel(g * 1.01);
    let (dx, dy) = (x1 - x, y1 - y);
    let len = dx.hypot(dy);
    let z = img.raster.to_plane(x + offset * dx / len, y + offset * dy / len);
    img.raster.pixel_of(z).map(|(i, j)| img.class_at(i, j))
}

fn offsets_around_gamma(img: &ImageBuffer, curve: &GammaCurve) -> Outcome {
    let bad: Vec<String> = curve
        .points()
        .iter()
        .filter_map(|&g| {
            let (inner, outer) = (class_along_ray(img, g, -3.0), class_along_ray(img, g, 3.0));
            (inner != Some(PixelClass::InteriorType) || outer != Some(PixelClass::ExteriorType))
                .then(|| format!("{g:.3}: {inner:?}/{outer:?}"))
        })
        .collect();
    outcome(bad.is_empty(), format!("{} of {} points off, {bad:?}", bad.len(), curve.records.len()))
}

fn main() {
    let theta = RotationNumber::golden();
    let mut r = Runner { failures: 0 };
    let secs = Duration::from_secs;

    r.check("1", "conjugacy symmetry", secs(1), || {
        let d = symmetry_defect(&theta, 0);
        outcome(d < 1e-10, format!("max chordal {d:.1e}"))
    });
    r.check("2", "multiplier at 0", secs(1), || {
        let d = multiplier_defect(&theta, 0);
        outcome(d < 1e-6, format!("max |D - lambda| {d:.1e}"))
    });
    r.check("3", "critical identities", secs(1), || {
        let d = critical_identity_defect(&theta);
        outcome(d < 1e-12, format!("max defect {d:.1e} over 10 rotation numbers"))
    });
    r.check("4", "linearizer residual", secs(5), || match linearizer_residual(&theta, 128) {
        Ok(res) => outcome(res < 1e-8, format!("sup residual {res:.1e}")),
        Err(e) => outcome(false, e),
    });
    r.check("5", "limit maps", secs(1), || match limit_defects(&theta) {
        Ok((inf, zero)) => outcome(inf < 1e-4 && zero < 1e-4, format!("infinity {inf:.1e}, zero {zero:.1e}")),
        Err(e) => outcome(false, e),
    });
    r.check("6", "period-three anchor", secs(1), || {
        let p = MapParams::new(RotationNumber::parse_cf("20:1").unwrap(), PERIOD_THREE_ALPHA).unwrap();
        let d = period_three_defect(&p);
        outcome(d < 1e-5, format!("chordal {d:.2e}"))
    });
    r.check("7", "boundary tracer at alpha=3", secs(30), || {
        let opts = ClassifyOptions::default();
        let c = classify_parameter(&golden(Complex64::new(3.0, 0.0)), &opts);
        let ev = c.c1.as_ref().unwrap();
        let diag = ev.diagnostics.as_ref();
        let simple = diag.and_then(|d| d.simple) == Some(true);
        let winding = diag.and_then(|d| d.winding);
        let mirror = classify_parameter(&golden(iota(theta.value(), Complex64::new(3.0, 0.0))), &opts).verdict;
        let ok = c.verdict == Verdict::ExteriorType && simple && winding == Some(1) && ev.trap_entry.is_none() && mirror == Verdict::InteriorType;
        outcome(ok, format!("{:?}, simple {simple}, winding {winding:?}, trap {:?}; mirror {mirror:?}", c.verdict, ev.trap_entry))
    });

    let trace_start = Instant::now();
    let traced = trace_gamma(&theta, &TraceOptions { rays: 64, tol: 1e-3, ..TraceOptions::default() });
    let trace_time = trace_start.elapsed();
    println!("      Γ trace: 64 rays in {:.1}s, shared by criteria 8, 10 and 11", trace_time.as_secs_f64());

    r.check("8", "angle relation", secs(120).saturating_sub(trace_time), || {
        let Ok(curve) = &traced else { return outcome(false, "trace failed".into()) };
        let with_a: Vec<_> = curve.records.iter().filter(|r| r.a.is_some() && r.a_tilde.is_some()).collect();
        if with_a.len() < 8 {
            return outcome(false, format!("only {} records carry angles", with_a.len()));
        }
        let worst = (0..8)
            .map(|k| {
                let rec = with_a[k * with_a.len() / 8];
                wrap_pi(rec.a.unwrap() - rec.a_tilde.unwrap() - TAU * theta.value()).abs()
            })
            .fold(0.0, f64::max);
        outcome(worst < 5e-3, format!("max defect {worst:.1e} at 8 points"))
    });
    r.check("9", "alpha_* anchor", secs(30), || {
        let p = golden(alpha_star(&theta));
        let verdict = classify_parameter(&p, &ClassifyOptions::default()).verdict;
        match conformal_angle(&p, &ClassifyOptions::default()) {
            Ok(m) => {
                let a = wrap_pi(m.a).abs();
                outcome(verdict == Verdict::OnGamma && a < 1e-2, format!("{verdict:?}, |A| {a:.1e}"))
            }
            Err(e) => outcome(false, format!("{verdict:?}, {e}")),
        }
    });
    r.check("10", "global structure of Γ", secs(1200).saturating_sub(trace_time), || {
        let curve = match &traced {
            Ok(c) => c,
            Err(e) => return outcome(false, e.to_string()),
        };
        let rep = verify_gamma(curve, &theta, &VerifyOptions::default());
        let mono = curve.angle_monotone_fraction();
        let probes = rep.probes.iter().filter(|p| p.ok).count();
        let ok = !curve.has_gaps() && rep.simple && rep.winding.abs() == 1 && rep.iota_hausdorff < 1e-2 && mono >= 0.95 && probes == 8 && rep.probes.len() == 8;
        outcome(
            ok,
            format!("simple {}, winding {}, iota {:.1e}, monotone {:.1}%, probes {probes}/{}", rep.simple, rep.winding, rep.iota_hausdorff, 100.0 * mono, rep.probes.len()),
        )
    });

    let mut rendered = None;
    r.check("11", "parameter-plane render", secs(1800), || {
        let one = overview_render(1);
        let two = overview_render(2);
        let same = encode_ppm(&one, &Palette::default()) == encode_ppm(&two, &Palette::default());
        let regions = two_regions(&one);
        let interface = match &traced {
            Ok(c) => interface_near_gamma(&one, c),
            Err(_) => outcome(false, "no trace".into()),
        };
        rendered = Some(one);
        outcome(same && regions.passed && interface.passed, format!("1 vs 2 threads identical {same}; {}; interface {}", regions.detail, interface.detail))
    });
    if let (Some(img), Ok(curve)) = (&rendered, &traced) {
        r.check("11+", "classes 3 px either side of Γ", secs(1), || offsets_around_gamma(img, curve));
    }

    println!("{} failed", r.failures);
    if r.failures > 0 {
        std::process::exit(1);
    }
}
