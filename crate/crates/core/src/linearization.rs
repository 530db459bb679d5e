//! Schröder equation `h(λζ) = F(h(ζ))` for the return map `F = f_α²` at its
//! Siegel fixed points `0` and `∞`, solved as a formal power series with
//! `h'(0) = 1`, plus the conformal-radius estimate and the trap disks used
//! to certify that an orbit has entered a Siegel disk.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::dynamics::MapParams;
use crate::sphere::{Center, SpherePoint};

pub const DEFAULT_ORDER: usize = 128;

/// Minimum number of usable coefficients for the root-test fit.
const MIN_FIT_COEFFICIENTS: usize = 16;

#[derive(Debug, Error, PartialEq)]
pub enum LinearizationError {
    #[error("series order {0} is below the minimum of 2")]
    OrderTooSmall(usize),
    #[error("small divisor |λ^{n} − λ| = {value:e} underflows at order {n}")]
    DivisorUnderflow { n: usize, value: f64 },
    #[error("series does not start with the multiplier (a_1 = {0})")]
    NotSiegelFixedPoint(Complex64),
    #[error("conformal radius could not be fitted ({0} usable coefficients, need {MIN_FIT_COEFFICIENTS})")]
    RadiusUnavailable(usize),
    #[error("trap fraction {0} outside (0, 0.6]")]
    BadFraction(f64),
}

/// Taylor coefficients `a_0 = 0, a_1, ..., a_N` of `f_α²` in the chart of a
/// Siegel center.
#[derive(Clone, Debug, PartialEq)]
pub struct TaylorSeries {
    pub center: Center,
    pub coeffs: Vec<Complex64>,
}

impl TaylorSeries {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, w: Complex64) -> Complex64 {
        horner(&self.coeffs, w)
    }
}

fn horner(coeffs: &[Complex64], w: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * w + c)
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).copied().unwrap_or_default() + b.get(i).copied().unwrap_or_default())
        .collect()
}

fn scale(a: &[Complex64], s: Complex64) -> Vec<Complex64> {
    a.iter().map(|&x| x * s).collect()
}

/// `num / den` truncated after degree `order`; requires `den[0] != 0`.
fn series_div(num: &[Complex64], den: &[Complex64], order: usize) -> Vec<Complex64> {
    let mut q = vec![Complex64::new(0.0, 0.0); order + 1];
    for n in 0..=order {
        let mut acc = num.get(n).copied().unwrap_or_default();
        for k in 1..=n.min(den.len() - 1) {
            acc -= den[k] * q[n - k];
        }
        q[n] = acc / den[0];
    }
    q
}

/// Taylor series of `f_α²` at `center`, by power-series division of the
/// factored closed form.
///
/// With `P = u(u+v)`, `Q = v(v+λu)` we have `f² = P(P+αλQ) / (Q(P+αQ))`.
/// At 0 the chart is `(u, v) = (w, 1)`; at ∞ it is `(1, w)` and the chart
/// map is the reciprocal `Q(P+αQ) / (P(P+αλQ))`.
pub fn taylor_f2(p: &MapParams, center: Center, order: usize) -> Result<TaylorSeries, LinearizationError> {
    if order < 2 {
        return Err(LinearizationError::OrderTooSmall(order));
    }
    let c = |re: f64| Complex64::new(re, 0.0);
    let (lambda, alpha) = (p.lambda(), p.alpha());
    let (u, v) = match center {
        Center::Zero => (vec![c(0.0), c(1.0)], vec![c(1.0)]),
        Center::Infinity => (vec![c(1.0)], vec![c(0.0), c(1.0)]),
    };
    let pp = poly_mul(&u, &poly_add(&u, &v));
    let qq = poly_mul(&v, &poly_add(&v, &scale(&u, lambda)));
    let upper = poly_mul(&pp, &poly_add(&pp, &scale(&qq, alpha * lambda)));
    let lower = poly_mul(&qq, &poly_add(&pp, &scale(&qq, alpha)));
    let coeffs = match center {
        Center::Zero => series_div(&upper, &lower, order),
        Center::Infinity => series_div(&lower, &upper, order),
    };
    Ok(TaylorSeries { center, coeffs })
}

/// Formal linearizer `h(ζ) = ζ + Σ_{n≥2} b_n ζⁿ` together with its
/// conformal-radius estimate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Linearizer {
    pub center: Center,
    #[serde(skip)]
    pub coeffs: Vec<Complex64>,
    pub lambda: [f64; 2],
    /// `1 / limsup |b_n|^{1/n}` from a least-squares fit of `log|b_n|`
    /// over the top third of indices.
    pub radius_estimate: Option<f64>,
    pub usable_coefficients: usize,
}

impl Linearizer {
    /// Assembles a linearizer from known coefficients (index 0 must be 0,
    /// index 1 must be 1) and an externally supplied radius.
    pub fn from_parts(center: Center, lambda: Complex64, coeffs: Vec<Complex64>, radius: f64) -> Self {
        let usable = coeffs.len().saturating_sub(1);
        Self { center, coeffs, lambda: [lambda.re, lambda.im], radius_estimate: Some(radius), usable_coefficients: usable }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn lambda(&self) -> Complex64 {
        Complex64::new(self.lambda[0], self.lambda[1])
    }

    pub fn eval(&self, zeta: Complex64) -> Complex64 {
        horner(&self.coeffs, zeta)
    }

    /// `(h(ζ), h'(ζ))`.
    pub fn eval_with_derivative(&self, zeta: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        self.coeffs.iter().rev().fold((zero, zero), |(v, d), &c| (v * zeta + c, d * zeta + v))
    }

    /// Solves `h(ζ) = w` by Newton's method from `ζ = w`. Gives up (returns
    /// `None`) if an iterate leaves `|ζ| < bound` or 40 steps do not
    /// converge.
    pub fn invert(&self, w: Complex64, bound: f64) -> Option<Complex64> {
        let mut zeta = w;
        for _ in 0..40 {
            let (v, d) = self.eval_with_derivative(zeta);
            let step = (v - w) / d;
            if !step.re.is_finite() || !step.im.is_finite() {
                return None;
            }
            zeta -= step;
            if zeta.norm() >= bound {
                return None;
            }
            if step.norm() <= 1e-14 * (1.0 + zeta.norm()) {
                return Some(zeta);
            }
        }
        None
    }
}

/// Solves `h(λζ) = F(h(ζ))` order by order.
///
/// Matching `ζⁿ` gives `(λⁿ − λ) b_n = Σ_{k=2}^{n} a_k [ζⁿ] h^k`, whose right
/// side only involves `b_1..b_{n−1}`.
pub fn solve_linearizer(ts: &TaylorSeries, order: usize) -> Result<Linearizer, LinearizationError> {
    let order = order.min(ts.order());
    if order < 2 {
        return Err(LinearizationError::OrderTooSmall(order));
    }
    let lambda = ts.coeffs[1];
    if ((lambda.norm() - 1.0).abs()) > 1e-12 {
        return Err(LinearizationError::NotSiegelFixedPoint(lambda));
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut b = vec![zero; order + 1];
    b[1] = Complex64::new(1.0, 0.0);
    // powers[k][m] = [ζ^m] h^k, filled column by column.
    let mut powers = vec![vec![zero; order + 1]; order + 1];
    powers[1][1] = b[1];
    let mut lambda_n = lambda;
    for n in 2..=order {
        lambda_n *= lambda;
        let mut rhs = zero;
        for k in 2..=n {
            let mut acc = zero;
            for j in 1..=(n - k + 1) {
                acc += b[j] * powers[k - 1][n - j];
            }
            powers[k][n] = acc;
            rhs += ts.coeffs[k] * acc;
        }
        let divisor = lambda_n - lambda;
        if divisor.norm() < 1e-12 {
            return Err(LinearizationError::DivisorUnderflow { n, value: divisor.norm() });
        }
        b[n] = rhs / divisor;
        powers[1][n] = b[n];
    }
    let (radius_estimate, usable) = fit_radius(&b);
    Ok(Linearizer {
        center: ts.center,
        coeffs: b,
        lambda: [lambda.re, lambda.im],
        radius_estimate,
        usable_coefficients: usable,
    })
}

fn fit_radius(b: &[Complex64]) -> (Option<f64>, usize) {
    let n_max = b.len() - 1;
    let start = (2 * n_max).div_ceil(3).max(2);
    let pts: Vec<(f64, f64)> = (start..=n_max)
        .filter_map(|n| {
            let m = b[n].norm();
            (m > 1e-300 && m.is_finite()).then(|| (n as f64, m.ln()))
        })
        .collect();
    if pts.len() < MIN_FIT_COEFFICIENTS {
        return (None, pts.len());
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (Some((-slope).exp()), pts.len())
}

/// `F` in the chart of `center`.
pub fn chart_f2(p: &MapParams, center: Center, w: Complex64) -> Complex64 {
    p.eval_f2(SpherePoint::from_chart(center, w)).chart(center)
}

/// `sup_{|ζ| = ρ} |F(h(ζ)) − h(λζ)|` over `samples` equally spaced angles.
pub fn functional_residual(p: &MapParams, lin: &Linearizer, rho: f64, samples: usize) -> f64 {
    let lambda = lin.lambda();
    (0..samples)
        .map(|k| {
            let zeta = Complex64::from_polar(rho, std::f64::consts::TAU * k as f64 / samples as f64);
            (chart_f2(p, lin.center, lin.eval(zeta)) - lin.eval(lambda * zeta)).norm()
        })
        .fold(0.0, f64::max)
}

/// Chart disk `|w| < radius` about a Siegel center, certified (up to the
/// accuracy of the series) to lie inside the Siegel disk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Trap {
    pub center: Center,
    pub radius: f64,
}

impl Trap {
    #[inline]
    pub fn contains(&self, z: &SpherePoint) -> bool {
        z.chart_modulus_below(self.center, self.radius)
    }
}

const TRAP_ANGLES: usize = 256;

/// `r_trap = min_φ |h(fraction · R · e^{iφ})|` over 256 angles.
pub fn trap_disk(lin: &Linearizer, fraction: f64) -> Result<Trap, LinearizationError> {
    if !(fraction > 0.0 && fraction <= 0.6) {
        return Err(LinearizationError::BadFraction(fraction));
    }
    let radius = lin
        .radius_estimate
        .filter(|_| lin.usable_coefficients >= MIN_FIT_COEFFICIENTS)
        .ok_or(LinearizationError::RadiusUnavailable(lin.usable_coefficients))?;
    let rho = fraction * radius;
    let r = (0..TRAP_ANGLES)
        .map(|k| lin.eval(Complex64::from_polar(rho, std::f64::consts::TAU * k as f64 / TRAP_ANGLES as f64)).norm())
        .fold(f64::INFINITY, f64::min);
    Ok(Trap { center: lin.center, radius: r })
}

/// Both traps of a parameter, built with the default series order.
///
/// The ∞-side linearizer of `f_α` is `w ↦ λ·h'(w/λ)` with `h'` the 0-side
/// linearizer of `f_{α'}`, so the ∞-side trap is built from `h'`. This makes
/// the traps of `α` and `α'` exact mirror images.
pub fn build_traps(p: &MapParams, order: usize, fraction: f64) -> Result<[Trap; 2], LinearizationError> {
    let make = |q: &MapParams| -> Result<f64, LinearizationError> {
        let ts = taylor_f2(q, Center::Zero, order)?;
        Ok(trap_disk(&solve_linearizer(&ts, order)?, fraction)?.radius)
    };
    Ok([
        Trap { center: Center::Zero, radius: make(p)? },
        Trap { center: Center::Infinity, radius: make(&p.symmetric())? },
    ])
}

/// The region `h(|ζ| < level)` enclosed by an invariant curve of the
/// linearizer, in the chart of its center.
///
/// Unlike the round [`Trap`], it catches every orbit that lands in the Siegel
/// disk below the chosen level. The ∞-side region is `λ·h'(|η| < level)`
/// with `h'` the 0-side linearizer of the mirror parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelTrap {
    pub center: Center,
    pub level: f64,
    /// Largest disk about the center inside the region.
    pub inner: f64,
    /// Smallest disk about the center containing the region.
    pub outer: f64,
    scale: Complex64,
    lin: Linearizer,
    /// Boundary samples `(unwrapped argument, point)` when the boundary is
    /// star-shaped about the center.
    star: Option<Vec<(f64, Complex64)>>,
}

const LEVEL_SAMPLES: usize = 2048;

/// Samples of a closed curve around 0 keyed by unwrapped argument, if the
/// argument increases strictly along it.
fn star_samples(pts: &[Complex64]) -> Option<Vec<(f64, Complex64)>> {
    let mut out = Vec::with_capacity(pts.len() + 1);
    let mut arg = pts[0].arg();
    out.push((arg, pts[0]));
    for w in pts.windows(2) {
        let d = (w[1] / w[0]).arg();
        if d <= 0.0 {
            return None;
        }
        arg += d;
        out.push((arg, w[1]));
    }
    arg += (pts[0] / pts[pts.len() - 1]).arg();
    out.push((arg, pts[0]));
    ((arg - out[0].0 - std::f64::consts::TAU).abs() < 1e-9).then_some(out)
}

impl LevelTrap {
    /// Region below `fraction · R`, `R` the radius estimate.
    pub fn new(lin: Linearizer, center: Center, scale: Complex64, fraction: f64) -> Result<Self, LinearizationError> {
        if !(fraction > 0.0 && fraction <= 0.95) {
            return Err(LinearizationError::BadFraction(fraction));
        }
        let radius = lin
            .radius_estimate
            .filter(|_| lin.usable_coefficients >= MIN_FIT_COEFFICIENTS)
            .ok_or(LinearizationError::RadiusUnavailable(lin.usable_coefficients))?;
        let level = fraction * radius;
        let pts: Vec<Complex64> = (0..LEVEL_SAMPLES)
            .map(|k| lin.eval(Complex64::from_polar(level, std::f64::consts::TAU * k as f64 / LEVEL_SAMPLES as f64)))
            .collect();
        let (inner, outer) = pts.iter().map(|w| w.norm()).fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
        let star = star_samples(&pts);
        Ok(Self { center, level, inner, outer, scale, lin, star })
    }

    pub fn contains(&self, z: &SpherePoint) -> bool {
        if z.chart_modulus_below(self.center, self.inner) {
            return true;
        }
        if !z.chart_modulus_below(self.center, self.outer) {
            return false;
        }
        let w = z.chart(self.center) / self.scale;
        match &self.star {
            Some(star) => {
                let a0 = star[0].0;
                let a = a0 + (w.arg() - a0).rem_euclid(std::f64::consts::TAU);
                let k = star.partition_point(|s| s.0 <= a).clamp(1, star.len() - 1);
                let (p, q) = (star[k - 1].1, star[k].1);
                let e = q - p;
                let v = w - p;
                e.re * v.im - e.im * v.re > 0.0
            }
            None => self.lin.invert(w, 1.2 * self.level).is_some_and(|zeta| zeta.norm() < self.level),
        }
    }

    pub fn is_star_shaped(&self) -> bool {
        self.star.is_some()
    }
}

/// Level traps about 0 and ∞ at `fraction` of the radius estimates.
pub fn level_traps(p: &MapParams, order: usize, fraction: f64) -> Result<[LevelTrap; 2], LinearizationError> {
    let lin = |q: &MapParams| solve_linearizer(&taylor_f2(q, Center::Zero, order)?, order);
    Ok([
        LevelTrap::new(lin(p)?, Center::Zero, Complex64::new(1.0, 0.0), fraction)?,
        LevelTrap::new(lin(&p.symmetric())?, Center::Infinity, p.lambda(), fraction)?,
    ])
}
