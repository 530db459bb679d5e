//! The family `f_α(z) = α (1 + λz) / (z + z²)`, `λ = e^{2πiθ}`, its second
//! iterate, critical points, limit maps and the involution
//! `τ(z) = 1/(λz)` conjugating `f_α` to `f_{α'}` with `α' = e^{−6πiθ}/α`.
//!
//! Everything is evaluated in homogeneous coordinates; orbits routinely
//! pass next to the poles `0` and `−1`.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::rotation::RotationNumber;
use crate::sphere::SpherePoint;

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("alpha must be nonzero and finite, got {0}")]
    InvalidAlpha(Complex64),
    #[error("{0} sample(s) violate the chordal margin {1} from the excluded points")]
    MarginViolation(usize, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MapParams {
    theta: RotationNumber,
    lambda: Complex64,
    alpha: Complex64,
}

fn unit(turns: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * turns)
}

/// `e^{2πiθ}`.
pub fn multiplier(theta: &RotationNumber) -> Complex64 {
    unit(theta.value())
}

impl MapParams {
    pub fn new(theta: RotationNumber, alpha: Complex64) -> Result<Self, DynamicsError> {
        if alpha == Complex64::new(0.0, 0.0) || !alpha.re.is_finite() || !alpha.im.is_finite() {
            return Err(DynamicsError::InvalidAlpha(alpha));
        }
        let lambda = multiplier(&theta);
        Ok(Self { theta, lambda, alpha })
    }

    pub fn theta(&self) -> &RotationNumber {
        &self.theta
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn with_alpha(&self, alpha: Complex64) -> Result<Self, DynamicsError> {
        if alpha == Complex64::new(0.0, 0.0) || !alpha.re.is_finite() || !alpha.im.is_finite() {
            return Err(DynamicsError::InvalidAlpha(alpha));
        }
        Ok(Self { alpha, ..self.clone() })
    }

    /// `(u, v) ↦ (α v (v + λu), u (u + v))`.
    #[inline]
    pub fn eval_f(&self, z: SpherePoint) -> SpherePoint {
        let (u, v) = (z.u, z.v);
        SpherePoint { u: self.alpha * v * (v + self.lambda * u), v: u * (u + v) }.normalized()
    }

    /// Second iterate from the factored closed form
    /// `P (P + αλQ) / (Q (P + αQ))`, `P = u(u+v)`, `Q = v(v+λu)`.
    #[inline]
    pub fn eval_f2(&self, z: SpherePoint) -> SpherePoint {
        let (u, v) = (z.u, z.v);
        let p = u * (u + v);
        let q = v * (v + self.lambda * u);
        let aq = self.alpha * q;
        SpherePoint { u: p * (p + self.lambda * aq), v: q * (p + aq) }.normalized()
    }

    pub fn f(&self, z: Complex64) -> Complex64 {
        self.eval_f(SpherePoint::finite(z)).to_complex()
    }

    pub fn f2(&self, z: Complex64) -> Complex64 {
        self.eval_f2(SpherePoint::finite(z)).to_complex()
    }

    /// `f_α'(z) = −α (λz² + 2z + 1) / (z + z²)²` at an affine point.
    pub fn f_prime(&self, z: Complex64) -> Complex64 {
        let d = z + z * z;
        -self.alpha * (self.lambda * z * z + 2.0 * z + 1.0) / (d * d)
    }

    pub fn critical_points(&self) -> CriticalPair {
        critical_points(self.lambda)
    }

    /// Both solutions of `f_α(z) = w` (projective, with multiplicity).
    pub fn preimages(&self, w: SpherePoint) -> [SpherePoint; 2] {
        // w_v α (v² + λuv) = w_u (u² + uv) in the affine chart v = 1 unless
        // the leading coefficient vanishes.
        let (wu, wv) = (w.u, w.v);
        let a = wu; // z² coefficient
        let b = wu - wv * self.alpha * self.lambda;
        let c = -wv * self.alpha;
        let zero = Complex64::new(0.0, 0.0);
        if a == zero {
            // w = 0: preimages are ∞ and −c/b = −1/λ.
            return [SpherePoint::INFINITY, SpherePoint::finite(-c / b)];
        }
        let disc = (b * b - 4.0 * a * c).sqrt();
        let r1 = if (-b + disc).norm() >= (-b - disc).norm() { (-b + disc) / (2.0 * a) } else { (-b - disc) / (2.0 * a) };
        let r2 = if r1 == zero { -b / a } else { c / (a * r1) };
        [SpherePoint::finite(r1), SpherePoint::finite(r2)]
    }

    /// Mirror parameter: same θ with `α' = e^{−6πiθ}/α`.
    pub fn symmetric(&self) -> MapParams {
        let alpha = unit(-3.0 * self.theta.value()) / self.alpha;
        Self { alpha, ..self.clone() }
    }

    pub fn tau(&self, z: SpherePoint) -> SpherePoint {
        tau(self.lambda, z)
    }
}

/// `τ(z) = 1/(λz)`: `(u, v) ↦ (v, λu)`.
pub fn tau(lambda: Complex64, z: SpherePoint) -> SpherePoint {
    SpherePoint { u: z.v, v: lambda * z.u }.normalized()
}

/// `τ⁻¹(z) = 1/(λz)` as well; `τ` is an involution.
pub fn tau_inv(lambda: Complex64, z: SpherePoint) -> SpherePoint {
    tau(lambda, z)
}

/// Critical points of `f_α`, marked by `c₁ = −(1+s)⁻¹`, `c₂ = −(1−s)⁻¹`
/// where `s = √(1−λ)` is taken with `Re s > 0` (or `Im s > 0` when the real
/// part is numerically zero).
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct CriticalPair {
    #[serde(serialize_with = "crate::serde_complex::serialize")]
    pub c1: Complex64,
    #[serde(serialize_with = "crate::serde_complex::serialize")]
    pub c2: Complex64,
}

pub fn critical_points(lambda: Complex64) -> CriticalPair {
    let mut s = (Complex64::new(1.0, 0.0) - lambda).sqrt();
    if s.re.abs() < 1e-14 {
        if s.im < 0.0 {
            s = -s;
        }
    } else if s.re < 0.0 {
        s = -s;
    }
    let one = Complex64::new(1.0, 0.0);
    CriticalPair { c1: -one / (one + s), c2: -one / (one - s) }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimitAt {
    /// `α → 0`: `g₀(z) = (z + z²)/(1 + λz)`.
    Zero,
    /// `α → ∞`: `g_∞(z) = λ (z + z²)/(1 + λz)`.
    Infinity,
}

pub fn limit_map(which: LimitAt, lambda: Complex64, z: SpherePoint) -> SpherePoint {
    let (u, v) = (z.u, z.v);
    let p = u * (u + v);
    let q = v * (v + lambda * u);
    let p = match which {
        LimitAt::Zero => p,
        LimitAt::Infinity => lambda * p,
    };
    SpherePoint { u: p, v: q }.normalized()
}

/// Largest chordal distance between `f_α²` and the corresponding limit map
/// over `samples`.
///
/// The α → ∞ limit is uniform away from `{∞, −1/λ}`, the α → 0 limit away
/// from `{0, −1}`; samples closer than `margin` (chordal) to those points
/// are reported as an error rather than silently included.
pub fn limit_convergence_check(
    theta: &RotationNumber,
    alpha: Complex64,
    which: LimitAt,
    samples: &[Complex64],
    margin: f64,
) -> Result<f64, DynamicsError> {
    let params = MapParams::new(theta.clone(), alpha)?;
    let lambda = params.lambda;
    let excluded = match which {
        LimitAt::Infinity => [SpherePoint::INFINITY, SpherePoint::finite(-1.0 / lambda)],
        LimitAt::Zero => [SpherePoint::ZERO, SpherePoint::finite(Complex64::new(-1.0, 0.0))],
    };
    let pts: Vec<SpherePoint> = samples.iter().map(|&z| SpherePoint::finite(z)).collect();
    let bad = pts.iter().filter(|p| excluded.iter().any(|e| p.chordal(e) < margin)).count();
    if bad > 0 {
        return Err(DynamicsError::MarginViolation(bad, margin));
    }
    Ok(pts
        .iter()
        .map(|&p| params.eval_f2(p).chordal(&limit_map(which, lambda, p)))
        .fold(0.0, f64::max))
}

/// `α_* = c₁ / f₁(c₂)`, the parameter whose critical value `f(c₂)` is `c₁`.
pub fn alpha_star(theta: &RotationNumber) -> Complex64 {
    let cp = critical_points(multiplier(theta));
    let lambda = multiplier(theta);
    let f1 = (1.0 + lambda * cp.c2) / (cp.c2 + cp.c2 * cp.c2);
    cp.c1 / f1
}

/// Attracting cycle reached by the orbit of `seed`: after `warmup` steps the
/// orbit must close up to within chordal `tol` for some period up to
/// `max_period`. Returns the cycle starting at the point reached.
pub fn attracting_cycle(p: &MapParams, seed: SpherePoint, warmup: usize, max_period: usize, tol: f64) -> Option<Vec<SpherePoint>> {
    let mut z = seed;
    for _ in 0..warmup {
        z = p.eval_f(z);
    }
    let mut cycle = vec![z];
    let mut w = z;
    for _ in 0..max_period {
        w = p.eval_f(w);
        if w.chordal(&z) < tol {
            return Some(cycle);
        }
        cycle.push(w);
    }
    None
}

/// The six critical points of `f_α²`: `{c₁, c₂} ∪ f⁻¹(c₁) ∪ f⁻¹(c₂)`.
pub fn critical_set_f2(p: &MapParams) -> Vec<SpherePoint> {
    let cp = p.critical_points();
    let (c1, c2) = (SpherePoint::finite(cp.c1), SpherePoint::finite(cp.c2));
    let mut out = vec![c1, c2];
    out.extend(p.preimages(c1));
    out.extend(p.preimages(c2));
    out
}
