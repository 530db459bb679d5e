//! Points of the Riemann sphere in homogeneous coordinates.

use num_complex::Complex64;

/// Which Siegel center a chart is attached to: `w = z` at 0 or `w = 1/z` at ∞.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Center {
    Zero,
    Infinity,
}

impl Center {
    pub fn other(self) -> Self {
        match self {
            Center::Zero => Center::Infinity,
            Center::Infinity => Center::Zero,
        }
    }
}

/// `z = u/v` with `(u, v) != (0, 0)`, kept normalized so that
/// `max(|u|, |v|)` lies in `[1/2, 1)`.
///
/// Normalization multiplies by an exact power of two, so the ratio `u/v`
/// is never perturbed by rescaling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpherePoint {
    pub u: Complex64,
    pub v: Complex64,
}

impl SpherePoint {
    pub const ZERO: SpherePoint = SpherePoint { u: Complex64::new(0.0, 0.0), v: Complex64::new(1.0, 0.0) };
    pub const INFINITY: SpherePoint = SpherePoint { u: Complex64::new(1.0, 0.0), v: Complex64::new(0.0, 0.0) };

    /// Builds a normalized point; returns `None` for `(0, 0)` or non-finite input.
    pub fn new(u: Complex64, v: Complex64) -> Option<Self> {
        let comps = [u.re, u.im, v.re, v.im];
        if comps.iter().any(|c| !c.is_finite()) || comps.iter().all(|&c| c == 0.0) {
            return None;
        }
        Some(Self { u, v }.normalized())
    }

    pub fn finite(z: Complex64) -> Self {
        Self { u: z, v: Complex64::new(1.0, 0.0) }.normalized()
    }

    /// Point with chart coordinate `w` about `center`.
    pub fn from_chart(center: Center, w: Complex64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        match center {
            Center::Zero => Self { u: w, v: one }.normalized(),
            Center::Infinity => Self { u: one, v: w }.normalized(),
        }
    }

    pub fn is_infinity(&self) -> bool {
        self.v == Complex64::new(0.0, 0.0)
    }

    /// Affine value `u/v`; infinite components when `v = 0`.
    pub fn to_complex(&self) -> Complex64 {
        if self.is_infinity() {
            Complex64::new(f64::INFINITY, f64::INFINITY)
        } else {
            self.u / self.v
        }
    }

    /// Coordinate in the chart of `center`.
    pub fn chart(&self, center: Center) -> Complex64 {
        match center {
            Center::Zero => self.to_complex(),
            Center::Infinity => {
                if self.u == Complex64::new(0.0, 0.0) {
                    Complex64::new(f64::INFINITY, f64::INFINITY)
                } else {
                    self.v / self.u
                }
            }
        }
    }

    /// `|w| < r` in the chart of `center`, tested without dividing.
    #[inline]
    pub fn chart_modulus_below(&self, center: Center, r: f64) -> bool {
        match center {
            Center::Zero => self.u.norm_sqr() < r * r * self.v.norm_sqr(),
            Center::Infinity => self.v.norm_sqr() < r * r * self.u.norm_sqr(),
        }
    }

    #[inline]
    pub fn normalized(self) -> Self {
        let m_sq = self.u.norm_sqr().max(self.v.norm_sqr());
        match pow2_rescale(m_sq) {
            Some(1.0) => self,
            Some(s) => Self { u: self.u * s, v: self.v * s },
            None => {
                let m = [self.u.re, self.u.im, self.v.re, self.v.im].iter().fold(0.0f64, |a, c| a.max(c.abs()));
                if m > 0.0 && m.is_finite() {
                    // modulus/m is in [1, √2]
                    Self { u: self.u / m * 0.6, v: self.v / m * 0.6 }
                } else {
                    self
                }
            }
        }
    }

    /// Chordal distance `2|u₁v₂ − u₂v₁| / (‖(u₁,v₁)‖ ‖(u₂,v₂)‖)`, in `[0, 2]`.
    pub fn chordal(&self, other: &SpherePoint) -> f64 {
        let cross = (self.u * other.v - other.u * self.v).norm();
        let n1 = (self.u.norm_sqr() + self.v.norm_sqr()).sqrt();
        let n2 = (other.u.norm_sqr() + other.v.norm_sqr()).sqrt();
        2.0 * cross / (n1 * n2)
    }
}

/// Chordal distance between two affine points.
pub fn chordal(z: Complex64, w: Complex64) -> f64 {
    SpherePoint::finite(z).chordal(&SpherePoint::finite(w))
}

/// Power of two `s` such that `sqrt(m_sq) * s` is in `[1/2, 1)`; `None`
/// when `m_sq` is subnormal, zero or non-finite.
#[inline]
fn pow2_rescale(m_sq: f64) -> Option<f64> {
    let exp = ((m_sq.to_bits() >> 52) & 0x7ff) as i64;
    if exp == 0 || exp == 0x7ff {
        return None;
    }
    // m_sq in [2^e, 2^(e+1)) puts the modulus in [2^(e/2), 2^((e+1)/2)).
    let k = -(exp - 1023).div_euclid(2) - 1;
    Some(f64::from_bits(((k + 1023) as u64) << 52))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn normalization_bounds() {
        for &x in &[1e-300, 1e-20, 0.3, 0.5, 0.99, 1.0, 7.0, 1e20, 1e300] {
            let p = SpherePoint::new(c(x, 0.0), c(0.0, x * 0.25)).unwrap();
            let m = p.u.norm().max(p.v.norm());
            assert!((0.5..1.0).contains(&m), "x={x} m={m}");
        }
    }

    #[test]
    fn zero_pair_rejected() {
        assert!(SpherePoint::new(c(0.0, 0.0), c(0.0, 0.0)).is_none());
        assert!(SpherePoint::new(c(f64::NAN, 0.0), c(1.0, 0.0)).is_none());
    }

    #[test]
    fn infinity_is_regular_for_chordal_metric() {
        let big = SpherePoint::finite(c(1e12, 0.0));
        assert!(big.chordal(&SpherePoint::INFINITY) < 1e-11);
        assert!((SpherePoint::ZERO.chordal(&SpherePoint::INFINITY) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn charts() {
        let p = SpherePoint::finite(c(2.0, 0.0));
        assert!((p.chart(Center::Infinity) - c(0.5, 0.0)).norm() < 1e-15);
        assert!(SpherePoint::INFINITY.chart(Center::Infinity).norm() == 0.0);
        assert!(p.chart_modulus_below(Center::Infinity, 0.6));
        assert!(!p.chart_modulus_below(Center::Zero, 1.9));
    }

    proptest! {
        #[test]
        fn affine_round_trip(re in -1e6f64..1e6, im in -1e6f64..1e6, scale in -200i32..200) {
            let z = c(re, im) * 2f64.powi(scale / 4);
            let p = SpherePoint::finite(z);
            let back = p.to_complex();
            prop_assert!((back - z).norm() <= 1e-14 * z.norm().max(f64::MIN_POSITIVE));
        }

        #[test]
        fn chordal_is_a_symmetric_bounded_distance(a in -50f64..50.0, b in -50f64..50.0, x in -50f64..50.0, y in -50f64..50.0) {
            let d1 = chordal(c(a, b), c(x, y));
            let d2 = chordal(c(x, y), c(a, b));
            prop_assert!((d1 - d2).abs() < 1e-15);
            prop_assert!((0.0..=2.0 + 1e-15).contains(&d1));
        }
    }
}
