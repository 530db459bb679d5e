//! Siegel boundaries from critical orbits, and the per-parameter
//! classifier deciding which critical point lies on which boundary.
//!
//! On `∂Δ` the return map `f²` is conjugate to the rotation by `θ`, so the
//! n-th point of a boundary orbit sits at boundary angle `2π{nθ}` and
//! sorting by `{nθ}` lays the orbit out along the curve.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::dynamics::MapParams;
use crate::geometry;
use crate::linearization::{build_traps, LinearizationError, Trap, DEFAULT_ORDER};
use crate::rotation::RotationNumber;
use crate::sphere::{Center, SpherePoint};

pub const DEFAULT_ORBIT_LEN: usize = 20_000;
pub const MIN_ORBIT_LEN: usize = 2_000;

#[derive(Debug, Error, PartialEq)]
pub enum BoundaryError {
    #[error("orbit entered the {center:?} trap at step {step}; its seed is not on a Siegel boundary")]
    TrapEntered { step: usize, center: Center },
    #[error("orbit has {0} points, need at least {MIN_ORBIT_LEN}")]
    TooShort(usize),
    #[error("boundary curves have different centers")]
    CenterMismatch,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitTrace {
    pub seed: SpherePoint,
    /// `points[n] = f^{2n}(seed)`.
    pub points: Vec<SpherePoint>,
    pub trap_entry: Option<(usize, Center)>,
}

/// Iterates `f²` from `seed` for `n` steps, stopping early when a trap is
/// entered (the seed itself is tested as step 0).
pub fn orbit(p: &MapParams, seed: SpherePoint, n: usize, traps: &[Trap]) -> OrbitTrace {
    let mut points = Vec::with_capacity(n + 1);
    let mut z = seed;
    for step in 0..=n {
        points.push(z);
        if let Some(t) = traps.iter().find(|t| t.contains(&z)) {
            return OrbitTrace { seed, points, trap_entry: Some((step, t.center)) };
        }
        if step < n {
            z = p.eval_f2(z);
        }
    }
    OrbitTrace { seed, points, trap_entry: None }
}

/// An orbit laid out in rotation order as a closed polyline in the chart of
/// its Siegel center.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryCurve {
    pub center: Center,
    /// Sort keys `{nθ}` in increasing order.
    pub keys: Vec<f64>,
    /// Orbit index `n` of each vertex.
    pub indices: Vec<usize>,
    /// Chart coordinates of each vertex.
    pub points: Vec<Complex64>,
}

pub fn boundary_curve(trace: &OrbitTrace, theta: &RotationNumber, center: Center) -> Result<BoundaryCurve, BoundaryError> {
    curve_from_keys(trace, center, |n| theta.frac_multiple(n as u64))
}

/// Same as [`boundary_curve`] with a plain binary64 rotation number, for
/// rotation numbers that are not given as continued fractions.
pub fn boundary_curve_with_rotation(trace: &OrbitTrace, rotation: f64, center: Center) -> Result<BoundaryCurve, BoundaryError> {
    curve_from_keys(trace, center, |n| (n as f64 * rotation).rem_euclid(1.0))
}

fn curve_from_keys(trace: &OrbitTrace, center: Center, key: impl Fn(usize) -> f64) -> Result<BoundaryCurve, BoundaryError> {
    if let Some((step, center)) = trace.trap_entry {
        return Err(BoundaryError::TrapEntered { step, center });
    }
    if trace.points.len() < MIN_ORBIT_LEN {
        return Err(BoundaryError::TooShort(trace.points.len()));
    }
    let mut order: Vec<(f64, usize)> = (0..trace.points.len()).map(|n| (key(n), n)).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(BoundaryCurve {
        center,
        keys: order.iter().map(|o| o.0).collect(),
        indices: order.iter().map(|o| o.1).collect(),
        points: order.iter().map(|o| trace.points[o.1].chart(center)).collect(),
    })
}

/// Geometric checks that an angle-ordered orbit is a plausible Jordan
/// curve around its Siegel center.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveDiagnostics {
    pub r_min: f64,
    pub r_max: f64,
    /// Largest distance between consecutive vertices.
    pub max_gap: f64,
    /// Diagonal of the bounding box.
    pub diameter: f64,
    /// See [`BoundaryCurve::gap_decay`].
    pub gap_decay: Option<f64>,
    /// See [`BoundaryCurve::recurrence`].
    pub recurrence: Option<f64>,
    pub winding: Option<i64>,
    pub simple: Option<bool>,
}

impl BoundaryCurve {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn winding(&self) -> i64 {
        geometry::winding_number(&self.points, Complex64::new(0.0, 0.0))
    }

    pub fn is_simple(&self) -> bool {
        geometry::is_simple_closed(&self.points)
    }

    pub fn max_gap(&self) -> f64 {
        let n = self.points.len();
        (0..n).map(|i| (self.points[(i + 1) % n] - self.points[i]).norm()).fold(0.0, f64::max)
    }

    /// Largest gap of the whole curve over the largest gap of the curve
    /// drawn by the first half of the orbit. Boundary orbits fill in and give
    /// roughly 0.55 to 0.87; an orbit on an invariant curve that misses the
    /// seed keeps its jump back to the seed and gives about 1.
    pub fn gap_decay(&self) -> f64 {
        let half = self.indices.iter().max().map_or(0, |&m| (m + 1).div_ceil(2));
        let early: Vec<Complex64> = self.indices.iter().zip(&self.points).filter(|(&i, _)| i < half).map(|(_, &z)| z).collect();
        let n = early.len();
        let early_gap = (0..n).map(|i| (early[(i + 1) % n] - early[i]).norm()).fold(0.0, f64::max);
        self.max_gap() / early_gap
    }

    pub fn diameter(&self) -> f64 {
        let (mut lo, mut hi) = (Complex64::new(f64::INFINITY, f64::INFINITY), Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in &self.points {
            lo = Complex64::new(lo.re.min(p.re), lo.im.min(p.im));
            hi = Complex64::new(hi.re.max(p.re), hi.im.max(p.im));
        }
        (hi - lo).norm()
    }

    /// How much the orbit's closest approach to its seed improved over its
    /// last three record-breaking returns: `d_min(N) / d_min(k)` where `k` is
    /// the step just before the third-to-last record. Boundary orbits keep
    /// returning closer to the seed; orbits on an invariant curve that misses
    /// the seed stall at a positive distance and give a ratio near 1.
    pub fn recurrence(&self) -> Option<f64> {
        let mut by_step = vec![None; self.points.len()];
        for (&i, &z) in self.indices.iter().zip(&self.points) {
            *by_step.get_mut(i)? = Some(z);
        }
        let seed = by_step.first().copied()??;
        let mut records = Vec::new();
        let mut best = f64::INFINITY;
        for z in by_step.iter().skip(1) {
            let d = (z.as_ref()? - seed).norm();
            if d < best {
                records.push(best);
                best = d;
            }
        }
        if records.len() < 4 {
            return None;
        }
        Some(best / records[records.len() - 3])
    }

    pub fn radial_range(&self) -> (f64, f64) {
        self.points
            .iter()
            .map(|p| p.norm())
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)))
    }
}

/// Thresholds of the on-boundary test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundaryCriteria {
    pub r_min: f64,
    pub r_max: f64,
    /// Largest allowed `max_gap / diameter`.
    pub max_gap_ratio: f64,
    /// Largest allowed [`BoundaryCurve::gap_decay`].
    pub max_gap_decay: f64,
    /// Largest allowed [`BoundaryCurve::recurrence`].
    pub max_recurrence_ratio: f64,
    /// Renders turn the (most expensive) simplicity test off; see
    /// [`classify_parameter`].
    pub check_simplicity: bool,
}

impl Default for BoundaryCriteria {
    fn default() -> Self {
        Self { r_min: 1e-4, r_max: 1e4, max_gap_ratio: 0.1, max_gap_decay: 0.9, max_recurrence_ratio: 0.75, check_simplicity: true }
    }
}

/// Why a critical orbit failed the on-boundary test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Rejection {
    TrapEntered,
    OutsideAnnulus,
    Gap,
    GapStalled,
    NotRecurrent,
    Winding,
    NotSimple,
}

/// Runs the on-boundary checks in increasing order of cost and returns the
/// diagnostics gathered so far together with the first failure, if any.
pub fn assess_curve(curve: &BoundaryCurve, criteria: &BoundaryCriteria) -> (CurveDiagnostics, Option<Rejection>) {
    let (r_min, r_max) = curve.radial_range();
    let mut diag = CurveDiagnostics {
        r_min,
        r_max,
        max_gap: curve.max_gap(),
        diameter: curve.diameter(),
        gap_decay: None,
        recurrence: None,
        winding: None,
        simple: None,
    };
    if !(r_min >= criteria.r_min && r_max <= criteria.r_max) {
        return (diag, Some(Rejection::OutsideAnnulus));
    }
    if !(diag.max_gap <= criteria.max_gap_ratio * diag.diameter) {
        return (diag, Some(Rejection::Gap));
    }
    let decay = curve.gap_decay();
    diag.gap_decay = Some(decay);
    if !(decay <= criteria.max_gap_decay) {
        return (diag, Some(Rejection::GapStalled));
    }
    diag.recurrence = curve.recurrence();
    if !diag.recurrence.is_some_and(|r| r <= criteria.max_recurrence_ratio) {
        return (diag, Some(Rejection::NotRecurrent));
    }
    let w = curve.winding();
    diag.winding = Some(w);
    if w != 1 {
        return (diag, Some(Rejection::Winding));
    }
    if !criteria.check_simplicity {
        return (diag, None);
    }
    let simple = curve.is_simple();
    diag.simple = Some(simple);
    if !simple {
        return (diag, Some(Rejection::NotSimple));
    }
    (diag, None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    /// `c₁ ∈ ∂Δ⁰`, `∂Δ^∞` free of critical points (outside Γ).
    ExteriorType,
    /// `c₂ ∈ ∂Δ^∞`, `∂Δ⁰` free of critical points (inside Γ).
    InteriorType,
    /// Both critical points on their boundaries (on Γ).
    OnGamma,
    Undetermined,
}

impl Verdict {
    /// `c₁ ∈ ∂Δ⁰` holds, i.e. the parameter is on or outside Γ.
    pub fn c1_on_boundary(self) -> bool {
        matches!(self, Verdict::ExteriorType | Verdict::OnGamma)
    }
}

/// Evidence about one critical point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalEvidence {
    pub center: Center,
    pub on_boundary: bool,
    pub steps: usize,
    pub trap_entry: Option<(usize, Center)>,
    pub rejection: Option<Rejection>,
    pub diagnostics: Option<CurveDiagnostics>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub c1: Option<CriticalEvidence>,
    pub c2: Option<CriticalEvidence>,
    pub traps: Option<[Trap; 2]>,
    pub failure: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClassifyOptions {
    pub orbit_len: usize,
    pub series_order: usize,
    pub trap_fraction: f64,
    pub criteria: BoundaryCriteria,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            orbit_len: DEFAULT_ORBIT_LEN,
            series_order: DEFAULT_ORDER,
            trap_fraction: 0.5,
            criteria: BoundaryCriteria::default(),
        }
    }
}

impl ClassifyOptions {
    pub fn with_orbit_len(self, orbit_len: usize) -> Self {
        Self { orbit_len, ..self }
    }

    /// Options used per pixel by the parameter-plane renderer.
    pub fn for_render(orbit_len: usize) -> Self {
        let criteria = BoundaryCriteria { check_simplicity: false, ..BoundaryCriteria::default() };
        Self { orbit_len, criteria, ..Self::default() }
    }
}

/// Tests whether the `f²`-orbit of `seed` traces the boundary of the Siegel
/// disk about `center`.
pub fn critical_evidence(p: &MapParams, seed: Complex64, center: Center, traps: &[Trap; 2], opts: &ClassifyOptions) -> CriticalEvidence {
    evidence_and_curve(p, seed, center, traps, opts).0
}

fn evidence_and_curve(
    p: &MapParams,
    seed: Complex64,
    center: Center,
    traps: &[Trap; 2],
    opts: &ClassifyOptions,
) -> (CriticalEvidence, Option<BoundaryCurve>) {
    let trace = orbit(p, SpherePoint::finite(seed), opts.orbit_len, traps);
    let steps = trace.points.len() - 1;
    let mut ev = CriticalEvidence { center, on_boundary: false, steps, trap_entry: trace.trap_entry, rejection: None, diagnostics: None };
    if trace.trap_entry.is_some() {
        ev.rejection = Some(Rejection::TrapEntered);
        return (ev, None);
    }
    let curve = match boundary_curve(&trace, p.theta(), center) {
        Ok(c) => c,
        Err(_) => {
            ev.rejection = Some(Rejection::TrapEntered);
            return (ev, None);
        }
    };
    let (diag, rejection) = assess_curve(&curve, &opts.criteria);
    ev.on_boundary = rejection.is_none();
    ev.rejection = rejection;
    ev.diagnostics = Some(diag);
    (ev, Some(curve))
}

fn apply_simplicity(ev: &mut CriticalEvidence, curve: &BoundaryCurve) {
    let simple = curve.is_simple();
    if let Some(d) = ev.diagnostics.as_mut() {
        d.simple = Some(simple);
    }
    if !simple {
        ev.on_boundary = false;
        ev.rejection = Some(Rejection::NotSimple);
    }
}

/// Decides the critical configuration of `f_α`: runs the orbits of `c₁`
/// (against `∂Δ⁰`) and `c₂` (against `∂Δ^∞`) and assembles the verdict.
/// With `check_simplicity` off, simplicity is still tested when both orbits
/// pass the other checks.
pub fn classify_parameter(p: &MapParams, opts: &ClassifyOptions) -> Classification {
    let traps = match build_traps(p, opts.series_order, opts.trap_fraction) {
        Ok(t) => t,
        Err(e) => return undetermined_by(e),
    };
    let cp = p.critical_points();
    let (mut c1, curve1) = evidence_and_curve(p, cp.c1, Center::Zero, &traps, opts);
    let (mut c2, curve2) = evidence_and_curve(p, cp.c2, Center::Infinity, &traps, opts);
    if let (true, true, Some(a), Some(b)) = (c1.on_boundary && c2.on_boundary, !opts.criteria.check_simplicity, &curve1, &curve2) {
        apply_simplicity(&mut c1, a);
        apply_simplicity(&mut c2, b);
    }
    let verdict = match (c1.on_boundary, c2.on_boundary) {
        (true, false) => Verdict::ExteriorType,
        (false, true) => Verdict::InteriorType,
        (true, true) => Verdict::OnGamma,
        (false, false) => Verdict::Undetermined,
    };
    Classification { verdict, c1: Some(c1), c2: Some(c2), traps: Some(traps), failure: None }
}

fn undetermined_by(e: LinearizationError) -> Classification {
    Classification { verdict: Verdict::Undetermined, c1: None, c2: None, traps: None, failure: Some(e.to_string()) }
}

/// Symmetric Hausdorff distance between the vertex sets of two curves with
/// the same center.
pub fn hausdorff(a: &BoundaryCurve, b: &BoundaryCurve) -> Result<f64, BoundaryError> {
    if a.center != b.center {
        return Err(BoundaryError::CenterMismatch);
    }
    Ok(geometry::hausdorff(&a.points, &b.points))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden(alpha: Complex64) -> MapParams {
        MapParams::new(RotationNumber::golden(), alpha).unwrap()
    }

    fn rotation_trace(theta: f64, n: usize) -> OrbitTrace {
        let points = (0..=n).map(|k| SpherePoint::finite(Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 * theta))).collect();
        OrbitTrace { seed: SpherePoint::finite(Complex64::new(1.0, 0.0)), points, trap_entry: None }
    }

    #[test]
    fn fixed_point_orbit() {
        let p = golden(Complex64::new(3.0, 0.0));
        let t = orbit(&p, SpherePoint::ZERO, 10, &[]);
        assert_eq!(t.points.len(), 11);
        assert!(t.points.iter().all(|z| z.chordal(&SpherePoint::ZERO) == 0.0));
    }

    #[test]
    fn seed_inside_trap_stops_at_step_zero() {
        let p = golden(Complex64::new(3.0, 0.0));
        let trap = Trap { center: Center::Zero, radius: 0.1 };
        let t = orbit(&p, SpherePoint::finite(Complex64::new(0.05, 0.0)), 100, &[trap]);
        assert_eq!(t.trap_entry, Some((0, Center::Zero)));
        assert_eq!(t.points.len(), 1);
    }

    #[test]
    fn rotation_orbit_gives_unit_circle() {
        let g = RotationNumber::golden();
        let curve = boundary_curve(&rotation_trace(g.value(), 5000), &g, Center::Zero).unwrap();
        assert_eq!(curve.winding(), 1);
        assert!(curve.is_simple());
        let (lo, hi) = curve.radial_range();
        assert!((lo - 1.0).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
        assert!(curve.keys.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn wrong_sort_key_breaks_the_curve() {
        let g = RotationNumber::golden();
        let trace = rotation_trace(g.value(), 5000);
        let curve = boundary_curve_with_rotation(&trace, g.value() + 1e-3, Center::Zero).unwrap();
        assert!(!curve.is_simple());
    }

    #[test]
    fn boundary_curve_rejects_trapped_or_short_traces() {
        let g = RotationNumber::golden();
        let mut trace = rotation_trace(g.value(), 5000);
        trace.trap_entry = Some((3, Center::Infinity));
        assert_eq!(
            boundary_curve(&trace, &g, Center::Zero),
            Err(BoundaryError::TrapEntered { step: 3, center: Center::Infinity })
        );
        assert_eq!(boundary_curve(&rotation_trace(g.value(), 10), &g, Center::Zero), Err(BoundaryError::TooShort(11)));
    }

    #[test]
    fn hausdorff_between_curves() {
        let g = RotationNumber::golden();
        let a = boundary_curve(&rotation_trace(g.value(), 3000), &g, Center::Zero).unwrap();
        let mut b = a.clone();
        b.points.iter_mut().for_each(|z| *z *= 1.01);
        assert_eq!(hausdorff(&a, &a).unwrap(), 0.0);
        assert!((hausdorff(&a, &b).unwrap() - 0.01).abs() < 1e-6);
        b.center = Center::Infinity;
        assert_eq!(hausdorff(&a, &b), Err(BoundaryError::CenterMismatch));
    }

    #[test]
    fn stalled_gap_is_rejected() {
        let g = RotationNumber::golden();
        let mut trace = rotation_trace(g.value(), 20_000);
        // a seed just off the invariant circle
        trace.points[0] = SpherePoint::finite(Complex64::new(1.1, 0.0));
        let curve = boundary_curve(&trace, &g, Center::Zero).unwrap();
        let (diag, rej) = assess_curve(&curve, &BoundaryCriteria::default());
        assert_eq!(rej, Some(Rejection::GapStalled));
        assert!(diag.gap_decay.unwrap() > 0.99);
        let clean = boundary_curve(&rotation_trace(g.value(), 20_000), &g, Center::Zero).unwrap();
        assert!(clean.gap_decay() < 0.9);
    }

    #[test]
    fn gap_rejection_catches_spikes() {
        let g = RotationNumber::golden();
        let mut trace = rotation_trace(g.value(), 3000);
        // a preperiodic seed far from the circle
        trace.points[0] = SpherePoint::finite(Complex64::new(3.0, 0.0));
        let curve = boundary_curve(&trace, &g, Center::Zero).unwrap();
        let (_, rej) = assess_curve(&curve, &BoundaryCriteria::default());
        assert_eq!(rej, Some(Rejection::Gap));
    }
}
