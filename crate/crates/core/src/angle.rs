//! Conformal angles `A(α)` and `Ã(α)` of parameters on Γ.
//!
//! With the boundary linearizers normalized so that angle 0 of `∂Δ⁰` is
//! `c₁` and angle 0 of `∂Δ^∞` is `f_α(c₁)`, the point `f^{2n}(c₁)` sits at
//! angle `2πnθ`. `A` is the angle of the critical value `f_α(c₂)` on `∂Δ⁰`
//! and `Ã` the angle of `c₂` on `∂Δ^∞`; they satisfy `A = Ã + 2πθ`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::boundary::{boundary_curve, classify_parameter, orbit, BoundaryCurve, ClassifyOptions, Verdict, MIN_ORBIT_LEN};
use crate::dynamics::MapParams;
use crate::sphere::{Center, SpherePoint};

#[derive(Debug, Error, PartialEq)]
pub enum AngleError {
    #[error("parameter is classified {0:?}, conformal angles need both critical points on the boundaries")]
    NotOnGamma(Verdict),
    #[error("target lies {error:e} from the boundary curve, more than {factor}x its largest vertex spacing {spacing:e}")]
    PoorMatch { error: f64, spacing: f64, factor: f64 },
    #[error("boundary orbit is too short ({0} points)")]
    TooShort(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AngleMeasurement {
    /// `A(α)` in `[0, 2π)`.
    pub a: f64,
    /// `Ã(α)` in `[0, 2π)`.
    pub a_tilde: f64,
    /// Larger of the two chart distances between target and curve.
    pub match_error: f64,
    pub samples_used: usize,
    /// Orbit index of the vertex nearest to `f_α(c₂)` on `∂Δ⁰`.
    pub nearest_index: usize,
}

impl AngleMeasurement {
    /// `(A − Ã − 2πθ)` reduced to `(−π, π]`.
    pub fn relation_defect(&self, theta: f64) -> f64 {
        wrap_pi(self.a - self.a_tilde - TAU * theta)
    }
}

/// Reduces an angle to `(−π, π]`.
pub fn wrap_pi(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r > std::f64::consts::PI {
        r - TAU
    } else {
        r
    }
}

/// Angle of `target` along an angle-ordered boundary curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Location {
    /// Angle in `[0, 2π)`.
    pub angle: f64,
    pub match_error: f64,
    pub nearest_index: usize,
    pub max_spacing: f64,
}

/// Locates `target` (chart coordinate) on `curve`: nearest vertex first, then
/// projection onto the two incident segments with the angle interpolated
/// linearly in arclength along the better one.
pub fn locate(curve: &BoundaryCurve, target: Complex64) -> Location {
    let n = curve.len();
    let nearest = (0..n)
        .min_by(|&i, &j| (curve.points[i] - target).norm_sqr().total_cmp(&(curve.points[j] - target).norm_sqr()))
        .expect("nonempty curve");
    let key_at = |i: usize, wrap: bool| curve.keys[i] + if wrap { 1.0 } else { 0.0 };
    let prev = (nearest + n - 1) % n;
    let next = (nearest + 1) % n;
    // segment (prev -> nearest) and (nearest -> next), with keys unwrapped
    let cands = [
        (prev, nearest, key_at(prev, false) - if prev > nearest { 1.0 } else { 0.0 }, key_at(nearest, false)),
        (nearest, next, key_at(nearest, false), key_at(next, next < nearest)),
    ];
    let (mut best_d, mut best_key) = (f64::INFINITY, 0.0);
    for (a, b, ka, kb) in cands {
        let (d, t) = crate::geometry::point_segment(target, curve.points[a], curve.points[b]);
        if d < best_d {
            best_d = d;
            best_key = ka + t * (kb - ka);
        }
    }
    Location {
        angle: (TAU * best_key).rem_euclid(TAU),
        match_error: best_d,
        nearest_index: curve.indices[nearest],
        max_spacing: curve.max_gap(),
    }
}

/// Default bound on `match_error / max_spacing`.
pub const DEFAULT_MATCH_FACTOR: f64 = 10.0;

fn checked(loc: Location, factor: f64) -> Result<Location, AngleError> {
    if loc.match_error < factor * loc.max_spacing {
        Ok(loc)
    } else {
        Err(AngleError::PoorMatch { error: loc.match_error, spacing: loc.max_spacing, factor })
    }
}

/// Boundary curve of the `f²`-orbit of `seed` whose first point is given
/// the orbit index `first_index` (so its angle is `2π{first_index·θ}`).
pub fn reseeded_curve(p: &MapParams, seed: SpherePoint, first_index: u64, n: usize, center: Center) -> Result<BoundaryCurve, AngleError> {
    if n + 1 < MIN_ORBIT_LEN {
        return Err(AngleError::TooShort(n + 1));
    }
    let trace = orbit(p, seed, n, &[]);
    let mut curve = boundary_curve(&trace, p.theta(), center).map_err(|_| AngleError::TooShort(trace.points.len()))?;
    if first_index != 0 {
        let theta = p.theta();
        let mut items: Vec<(f64, usize, Complex64)> = curve
            .indices
            .iter()
            .zip(&curve.points)
            .map(|(&i, &z)| (theta.frac_multiple(i as u64 + first_index), i + first_index as usize, z))
            .collect();
        items.sort_by(|a, b| a.0.total_cmp(&b.0));
        curve.keys = items.iter().map(|x| x.0).collect();
        curve.indices = items.iter().map(|x| x.1).collect();
        curve.points = items.iter().map(|x| x.2).collect();
    }
    Ok(curve)
}

/// Measures `A` and `Ã` without first classifying the parameter. Only the
/// quality of the match is checked; callers must know the critical orbits
/// trace the boundaries (e.g. parameters within a bisection tolerance of Γ).
pub fn measure_angles(p: &MapParams, n: usize) -> Result<AngleMeasurement, AngleError> {
    measure_angles_with(p, n, DEFAULT_MATCH_FACTOR)
}

/// [`measure_angles`] with the target required to lie within
/// `match_factor` vertex spacings of each curve.
pub fn measure_angles_with(p: &MapParams, n: usize, match_factor: f64) -> Result<AngleMeasurement, AngleError> {
    let cp = p.critical_points();
    let c1 = SpherePoint::finite(cp.c1);
    let c2 = SpherePoint::finite(cp.c2);
    let zero_curve = reseeded_curve(p, c1, 0, n, Center::Zero)?;
    let loc = checked(locate(&zero_curve, p.eval_f(c2).chart(Center::Zero)), match_factor)?;
    let inf_curve = reseeded_curve(p, p.eval_f(c1), 0, n, Center::Infinity)?;
    let loc_t = checked(locate(&inf_curve, c2.chart(Center::Infinity)), match_factor)?;
    Ok(AngleMeasurement {
        a: loc.angle,
        a_tilde: loc_t.angle,
        match_error: loc.match_error.max(loc_t.match_error),
        samples_used: n,
        nearest_index: loc.nearest_index,
    })
}

/// `A(α)` and `Ã(α)` for a parameter the classifier places on Γ.
pub fn conformal_angle(p: &MapParams, opts: &ClassifyOptions) -> Result<AngleMeasurement, AngleError> {
    conformal_angle_with(p, opts, DEFAULT_MATCH_FACTOR)
}

/// [`conformal_angle`] with an explicit match factor.
pub fn conformal_angle_with(p: &MapParams, opts: &ClassifyOptions, match_factor: f64) -> Result<AngleMeasurement, AngleError> {
    let verdict = classify_parameter(p, opts).verdict;
    if verdict != Verdict::OnGamma {
        return Err(AngleError::NotOnGamma(verdict));
    }
    measure_angles_with(p, opts.orbit_len, match_factor)
}
