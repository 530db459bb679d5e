//! Tracing the curve Γ of parameters whose two critical points both lie on
//! the Siegel boundaries, by bisection along rays from `α = 0`.
//!
//! Inside Γ the classifier reports `InteriorType`, outside `ExteriorType`.
//! Each ray is bisected (in `ln t`) separately on the status of each
//! critical point. Γ is not known to be star-shaped, so every ray bracket is
//! also scanned on a coarse grid and all further sign changes are reported.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::angle::{measure_angles, wrap_pi};
use crate::boundary::{classify_parameter, ClassifyOptions, Verdict};
use crate::dynamics::MapParams;
use crate::geometry;
use crate::rotation::RotationNumber;

pub const DEFAULT_TOL: f64 = 1e-3;
const MAX_RETRIES: usize = 3;
const SCAN_SUBINTERVALS: usize = 8;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum GammaError {
    #[error("{critical:?} at t = {t} on ray {phi} has on-boundary status {found}, expected {}", !found)]
    WrongBracket { phi: f64, t: f64, critical: Critical, found: bool },
    #[error("classification on ray {phi} keeps failing near t = {t} after {MAX_RETRIES} nudges")]
    UndeterminedBracket { phi: f64, t: f64 },
    #[error("invalid bracket [{0}, {1}]")]
    InvalidBracket(f64, f64),
    #[error("need at least 8 rays, got {0}")]
    TooFewRays(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Critical {
    C1,
    C2,
}

/// Radius bracket `[t_lo, t_hi]` across which one critical point changes
/// its on-boundary status.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StatusSwitch {
    pub critical: Critical,
    pub t_lo: f64,
    pub t_hi: f64,
    pub on_at_lo: bool,
}

impl StatusSwitch {
    pub fn midpoint(&self) -> f64 {
        (self.t_lo * self.t_hi).sqrt()
    }
}

/// Result of bisecting one ray. Going outward across Γ, `c₁` joins `∂Δ⁰`
/// and `c₂` leaves `∂Δ^∞`; both switches are located and `alpha` sits at
/// their geometric mean. On the image ray under `α ↦ e^{−6πiθ}/α` the roles
/// of the two critical points are exchanged and radii are inverted.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RaySwitch {
    pub phi: f64,
    #[serde(with = "crate::serde_complex")]
    pub alpha: Complex64,
    pub c1: StatusSwitch,
    pub c2: StatusSwitch,
    pub classifications: usize,
    pub nudges: usize,
}

impl RaySwitch {
    /// Widest of the two final brackets.
    pub fn width(&self) -> f64 {
        (self.c1.t_hi - self.c1.t_lo).max(self.c2.t_hi - self.c2.t_lo)
    }

    /// `|ln(t₁/t₂)|` between the two switch radii: how far apart the two
    /// one-sided estimates of Γ are.
    pub fn band(&self) -> f64 {
        (self.c1.midpoint() / self.c2.midpoint()).ln().abs()
    }
}

struct RayProbe<'a> {
    base: &'a MapParams,
    phi: f64,
    opts: &'a ClassifyOptions,
    cache: HashMap<u64, Option<(bool, bool)>>,
    nudges: usize,
}

impl<'a> RayProbe<'a> {
    fn new(base: &'a MapParams, phi: f64, opts: &'a ClassifyOptions) -> Self {
        Self { base, phi, opts, cache: HashMap::new(), nudges: 0 }
    }

    /// On-boundary status of `(c₁, c₂)`, or `None` when the classifier
    /// could not build its traps.
    fn statuses(&mut self, t: f64) -> Option<(bool, bool)> {
        let (base, phi, opts) = (self.base, self.phi, self.opts);
        *self.cache.entry(t.to_bits()).or_insert_with(|| {
            let p = base.with_alpha(Complex64::from_polar(t, phi)).expect("t > 0");
            let c = classify_parameter(&p, opts);
            Some((c.c1?.on_boundary, c.c2?.on_boundary))
        })
    }

    fn status(&mut self, t: f64, which: Critical) -> Option<bool> {
        self.statuses(t).map(|(a, b)| if which == Critical::C1 { a } else { b })
    }

    /// Status at `t`, nudging `t` geometrically within `[lo, hi]` when the
    /// classifier fails.
    fn settled(&mut self, t: f64, which: Critical, lo: f64, hi: f64) -> Result<(f64, bool), GammaError> {
        if let Some(s) = self.status(t, which) {
            return Ok((t, s));
        }
        for k in 1..=MAX_RETRIES {
            self.nudges += 1;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            let tt = (t * (sign * 0.01 * k as f64).exp()).clamp(lo, hi);
            if let Some(s) = self.status(tt, which) {
                return Ok((tt, s));
            }
        }
        Err(GammaError::UndeterminedBracket { phi: self.phi, t })
    }

    /// Bisects (in `ln t`) a bracket whose endpoints have different status.
    /// The depth is fixed up front so that brackets mirrored by `t ↦ 1/t`
    /// sample mirrored radii.
    fn bisect(&mut self, which: Critical, mut lo: f64, mut hi: f64, on_at_lo: bool, tol: f64) -> Result<StatusSwitch, GammaError> {
        let depth = ((hi / lo).ln() * hi.max(1.0 / lo) / tol).log2().ceil().max(0.0) as usize;
        for _ in 0..depth {
            let mid = (lo * hi).sqrt();
            let (inner, outer) = (lo * (hi / lo).powf(0.05), hi * (lo / hi).powf(0.05));
            let (t, s) = self.settled(mid, which, inner, outer)?;
            if s == on_at_lo {
                lo = t;
            } else {
                hi = t;
            }
        }
        Ok(StatusSwitch { critical: which, t_lo: lo, t_hi: hi, on_at_lo })
    }
}

impl RayProbe<'_> {
    /// Off-boundary reports are reliable (trap entry, stalled recurrence),
    /// while an orbit captured onto an invariant curve very close to its
    /// critical point can pass for a boundary orbit. Such islands pull the
    /// `c₁` switch inward and the `c₂` switch outward. The band between the
    /// two is walked on a grid of spacing about `4·tol`; the `c₁` switch is
    /// moved to the outermost point where `c₁` is off and the `c₂` switch to
    /// the innermost point where `c₂` is off.
    fn refine(&mut self, c1: StatusSwitch, c2: StatusSwitch, tol: f64) -> Result<(StatusSwitch, StatusSwitch), GammaError> {
        let (a, b) = (c1.t_hi, c2.t_lo);
        if a >= b {
            return Ok((c1, c2));
        }
        let cells = ((b / a).ln() * b / (4.0 * tol)).ceil().max(1.0) as usize;
        let grid: Vec<f64> = (0..=cells).map(|k| a * (b / a).powf(k as f64 / cells as f64)).collect();
        let states: Vec<Option<(bool, bool)>> = grid.iter().map(|&t| self.statuses(t)).collect();
        let mut c1 = c1;
        if let Some(i) = states.iter().rposition(|s| matches!(s, Some((false, _)))) {
            let hi = if i == cells { c2.t_hi } else { grid[i + 1] };
            if self.status(hi, Critical::C1) == Some(true) {
                c1 = self.bisect(Critical::C1, grid[i], hi, false, tol)?;
            }
        }
        let mut c2 = c2;
        if let Some(j) = states.iter().position(|s| matches!(s, Some((_, false)))) {
            let lo = if j == 0 { c1.t_lo.min(grid[0]) } else { grid[j - 1] };
            if self.status(lo, Critical::C2) == Some(true) {
                c2 = self.bisect(Critical::C2, lo, grid[j], true, tol)?;
            }
        }
        Ok((c1, c2))
    }
}

/// Locates Γ on the ray `arg α = phi` between an interior-type parameter at
/// `t_lo` and an exterior-type one at `t_hi`.
pub fn switchover_on_ray(
    theta: &RotationNumber,
    phi: f64,
    t_lo: f64,
    t_hi: f64,
    tol: f64,
    opts: &ClassifyOptions,
) -> Result<RaySwitch, GammaError> {
    if !(t_lo > 0.0 && t_lo < t_hi && tol > 0.0) {
        return Err(GammaError::InvalidBracket(t_lo, t_hi));
    }
    let base = MapParams::new(theta.clone(), Complex64::new(1.0, 0.0)).expect("unit alpha");
    let mut probe = RayProbe::new(&base, phi, opts);
    let mut ends = [[false; 2]; 2];
    let mut radii = [t_lo, t_hi];
    for (end, t) in radii.iter_mut().enumerate() {
        let (lo, hi) = if end == 0 { (0.5 * t_lo, t_hi) } else { (t_lo, 2.0 * t_hi) };
        let (tt, s1) = probe.settled(*t, Critical::C1, lo, hi)?;
        let (_, s2) = probe.settled(tt, Critical::C2, tt, tt)?;
        *t = tt;
        ends[end] = [s1, s2];
    }
    let expected = [[false, true], [true, false]];
    for end in 0..2 {
        for (k, which) in [Critical::C1, Critical::C2].into_iter().enumerate() {
            if ends[end][k] != expected[end][k] {
                return Err(GammaError::WrongBracket { phi, t: radii[end], critical: which, found: ends[end][k] });
            }
        }
    }
    let c1 = probe.bisect(Critical::C1, radii[0], radii[1], false, tol)?;
    let c2 = probe.bisect(Critical::C2, radii[0], radii[1], true, tol)?;
    let (c1, c2) = probe.refine(c1, c2, tol)?;
    let t = (c1.midpoint() * c2.midpoint()).sqrt();
    Ok(RaySwitch {
        phi,
        alpha: Complex64::from_polar(t, phi),
        c1,
        c2,
        classifications: probe.cache.len(),
        nudges: probe.nudges,
    })
}

/// Cells of a geometric grid on `[t_lo, t_hi]` across which the status of
/// `c₁` flips, as radius brackets.
pub fn scan_ray(theta: &RotationNumber, phi: f64, t_lo: f64, t_hi: f64, opts: &ClassifyOptions) -> Vec<(f64, f64, bool)> {
    let base = MapParams::new(theta.clone(), Complex64::new(1.0, 0.0)).expect("unit alpha");
    let mut probe = RayProbe::new(&base, phi, opts);
    let ratio = (t_hi / t_lo).powf(1.0 / SCAN_SUBINTERVALS as f64);
    let known: Vec<(f64, bool)> = (0..=SCAN_SUBINTERVALS)
        .filter_map(|k| {
            let t = t_lo * ratio.powi(k as i32);
            probe.status(t, Critical::C1).map(|s| (t, s))
        })
        .collect();
    known.windows(2).filter(|w| w[0].1 != w[1].1).map(|w| (w[0].0, w[1].0, w[0].1)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaRecord {
    pub phi: f64,
    pub switch: Option<RaySwitch>,
    /// `A` measured at the outer end of the final bracket.
    pub a: Option<f64>,
    pub a_tilde: Option<f64>,
    pub match_error: Option<f64>,
    /// Further crossings of Γ found on this ray, as radii.
    pub extra_crossings: Vec<f64>,
    pub failure: Option<String>,
}

impl GammaRecord {
    pub fn alpha(&self) -> Option<Complex64> {
        self.switch.as_ref().map(|s| s.alpha)
    }

    pub fn bracket_width(&self) -> Option<f64> {
        self.switch.as_ref().map(RaySwitch::width)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaCurve {
    pub theta: f64,
    pub tol: f64,
    pub records: Vec<GammaRecord>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceOptions {
    pub rays: usize,
    pub tol: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub classify: ClassifyOptions,
    /// Scan each bracket for additional crossings.
    pub scan: bool,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self { rays: 64, tol: DEFAULT_TOL, t_lo: 1.0 / 3.0, t_hi: 3.0, classify: ClassifyOptions::default(), scan: true }
    }
}

/// Ray directions `φ₀ + 2πk/M` with `φ₀ ≡ −3πθ`, a set mapped onto itself by
/// the parameter involution `α ↦ e^{−6πiθ}/α` (which sends the ray `φ` to
/// the ray `−6πθ − φ`).
pub fn ray_angles(theta: f64, m: usize) -> Vec<f64> {
    let step = TAU / m as f64;
    let phi0 = (-3.0 * PI * theta).rem_euclid(step);
    (0..m).map(|k| phi0 + step * k as f64).collect()
}

pub fn trace_gamma(theta: &RotationNumber, opts: &TraceOptions) -> Result<GammaCurve, GammaError> {
    if opts.rays < 8 {
        return Err(GammaError::TooFewRays(opts.rays));
    }
    let base = MapParams::new(theta.clone(), Complex64::new(1.0, 0.0)).expect("unit alpha");
    let records = ray_angles(theta.value(), opts.rays)
        .into_par_iter()
        .map(|phi| trace_ray(theta, &base, phi, opts))
        .collect();
    Ok(GammaCurve { theta: theta.value(), tol: opts.tol, records })
}

fn trace_ray(theta: &RotationNumber, base: &MapParams, phi: f64, opts: &TraceOptions) -> GammaRecord {
    let mut rec = GammaRecord { phi, switch: None, a: None, a_tilde: None, match_error: None, extra_crossings: Vec::new(), failure: None };
    let sw = match switchover_on_ray(theta, phi, opts.t_lo, opts.t_hi, opts.tol, &opts.classify) {
        Ok(sw) => sw,
        Err(e) => {
            rec.failure = Some(e.to_string());
            return rec;
        }
    };
    // A and Ã only need c₁ on ∂Δ⁰, which holds at the outer end of its bracket
    let outer = base.with_alpha(Complex64::from_polar(sw.c1.t_hi, phi)).expect("t > 0");
    match measure_angles(&outer, opts.classify.orbit_len) {
        Ok(m) => {
            rec.a = Some(m.a);
            rec.a_tilde = Some(m.a_tilde);
            rec.match_error = Some(m.match_error);
        }
        Err(e) => rec.failure = Some(format!("angle: {e}")),
    }
    if opts.scan {
        let t = sw.c1.midpoint();
        let mut probe = RayProbe::new(base, phi, &opts.classify);
        for (lo, hi, on_at_lo) in scan_ray(theta, phi, opts.t_lo, opts.t_hi, &opts.classify) {
            if t >= lo && t <= hi {
                continue;
            }
            match probe.bisect(Critical::C1, lo, hi, on_at_lo, opts.tol) {
                Ok(s) => rec.extra_crossings.push(s.midpoint()),
                Err(_) => rec.extra_crossings.push((lo * hi).sqrt()),
            }
        }
    }
    rec.switch = Some(sw);
    rec
}

impl GammaCurve {
    pub fn has_gaps(&self) -> bool {
        self.records.iter().any(|r| r.switch.is_none())
    }

    /// Traced parameters in ray order (gaps skipped).
    pub fn points(&self) -> Vec<Complex64> {
        self.records.iter().filter_map(GammaRecord::alpha).collect()
    }

    pub fn winding(&self) -> i64 {
        geometry::winding_number(&self.points(), Complex64::new(0.0, 0.0))
    }

    pub fn is_simple(&self) -> bool {
        geometry::is_simple_closed(&self.points())
    }

    pub fn max_spacing(&self) -> f64 {
        let pts = self.points();
        let n = pts.len();
        (0..n).map(|i| (pts[(i + 1) % n] - pts[i]).norm()).fold(0.0, f64::max)
    }

    /// Fraction of edges (cyclic, both ends measured) along which `A`
    /// moves in the majority direction.
    pub fn angle_monotone_fraction(&self) -> f64 {
        let a: Vec<Option<f64>> = self.records.iter().map(|r| r.a).collect();
        let n = a.len();
        let steps: Vec<f64> = (0..n).filter_map(|i| Some(wrap_pi(a[(i + 1) % n]? - a[i]?))).collect();
        if steps.is_empty() {
            return 0.0;
        }
        let pos = steps.iter().filter(|&&d| d > 0.0).count();
        let neg = steps.iter().filter(|&&d| d < 0.0).count();
        pos.max(neg) as f64 / steps.len() as f64
    }

    /// Octants of `[0, 2π)` hit by the measured angles.
    pub fn angle_octants(&self) -> [bool; 8] {
        let mut hit = [false; 8];
        for a in self.records.iter().filter_map(|r| r.a) {
            hit[((a.rem_euclid(TAU) / TAU * 8.0) as usize).min(7)] = true;
        }
        hit
    }

    pub fn reversed(&self) -> GammaCurve {
        let mut c = self.clone();
        c.records.reverse();
        c
    }

    /// Record closest to `alpha`.
    pub fn nearest_record(&self, alpha: Complex64) -> Option<&GammaRecord> {
        self.records
            .iter()
            .filter(|r| r.alpha().is_some())
            .min_by(|a, b| (a.alpha().unwrap() - alpha).norm().total_cmp(&(b.alpha().unwrap() - alpha).norm()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeResult {
    pub phi: f64,
    pub t_inner: f64,
    pub t_outer: f64,
    pub inner: Verdict,
    pub outer: Verdict,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaReport {
    pub gaps: bool,
    pub simple: bool,
    pub winding: i64,
    pub winding_ok: bool,
    pub iota_hausdorff: f64,
    pub iota_ok: bool,
    pub probes: Vec<ProbeResult>,
    pub probes_ok: bool,
}

impl GammaReport {
    pub fn passed(&self) -> bool {
        !self.gaps && self.winding_ok && self.iota_ok && self.probes_ok
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub iota_threshold: f64,
    /// Relative radial offset of the probes from the traced point.
    pub probe_offset: f64,
    pub probe_rays: usize,
    pub classify: ClassifyOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { iota_threshold: 1e-2, probe_offset: 0.03, probe_rays: 8, classify: ClassifyOptions::default() }
    }
}

/// `α ↦ e^{−6πiθ}/α`.
pub fn iota(theta: f64, alpha: Complex64) -> Complex64 {
    Complex64::from_polar(1.0, -3.0 * TAU * theta) / alpha
}

/// Checks winding ±1 around 0, invariance under `α ↦ e^{−6πiθ}/α`, and
/// interior/exterior verdicts just inside and outside on sampled rays.
pub fn verify_gamma(curve: &GammaCurve, theta: &RotationNumber, opts: &VerifyOptions) -> GammaReport {
    let pts = curve.points();
    let winding = curve.winding();
    let image: Vec<Complex64> = pts.iter().map(|&a| iota(curve.theta, a)).collect();
    let iota_hausdorff = if pts.len() >= 2 { geometry::polyline_hausdorff(&pts, &image) } else { f64::INFINITY };
    let base = MapParams::new(theta.clone(), Complex64::new(1.0, 0.0)).expect("unit alpha");
    let with_alpha: Vec<&GammaRecord> = curve.records.iter().filter(|r| r.alpha().is_some()).collect();
    let stride = (with_alpha.len() / opts.probe_rays.max(1)).max(1);
    let probes: Vec<ProbeResult> = with_alpha
        .iter()
        .step_by(stride)
        .take(opts.probe_rays)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|r| {
            let alpha = r.alpha().unwrap();
            let (t, phi) = alpha.to_polar();
            let t_inner = t * (1.0 - opts.probe_offset);
            let t_outer = t * (1.0 + opts.probe_offset);
            let classify = |t: f64| classify_parameter(&base.with_alpha(Complex64::from_polar(t, phi)).unwrap(), &opts.classify).verdict;
            let (inner, outer) = (classify(t_inner), classify(t_outer));
            ProbeResult { phi, t_inner, t_outer, inner, outer, ok: inner == Verdict::InteriorType && outer == Verdict::ExteriorType }
        })
        .collect();
    GammaReport {
        gaps: curve.has_gaps(),
        simple: curve.is_simple(),
        winding,
        winding_ok: winding.abs() == 1,
        iota_hausdorff,
        iota_ok: iota_hausdorff < opts.iota_threshold,
        probes_ok: !probes.is_empty() && probes.iter().all(|p| p.ok),
        probes,
    }
}
