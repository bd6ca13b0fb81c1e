//! Complex quaternions (biquaternions).
//!
//! A [`Biquaternion`] is a complex scalar `w` plus a complex 3-vector `v`,
//! multiplied with the Hamilton rule `e1·e2 = e3`, `e_k² = -1`. The complex
//! unit `i` commutes with the quaternion units.
//!
//! Spacetime conventions (c = 1):
//!
//! * a point is `X = t - i·x⃗`, a 4-velocity `U = γ(1 - iβ⃗)`,
//!   a potential `A = φ - i·A⃗`;
//! * an electromagnetic field is the pure vector `B = E⃗ + i·H⃗`;
//! * `scal(conj(P)·Q)` is the Minkowski product `p⁰q⁰ - p⃗·q⃗` of two
//!   real 4-vectors.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, PartialEq, Default)]
pub struct Biquaternion {
    pub w: Complex64,
    pub v: [Complex64; 3],
}

/// Real 4-vector embedded as `t - i·x⃗`.
pub type FourVector = Biquaternion;

/// Electromagnetic 6-vector embedded as `E⃗ + i·H⃗`.
pub type SixVector = Biquaternion;

impl Biquaternion {
    pub const ZERO: Biquaternion = Biquaternion {
        w: ZERO,
        v: [ZERO; 3],
    };
    pub const ONE: Biquaternion = Biquaternion {
        w: Complex64::new(1.0, 0.0),
        v: [ZERO; 3],
    };

    pub const fn new(w: Complex64, v: [Complex64; 3]) -> Self {
        Biquaternion { w, v }
    }

    pub fn scalar(w: Complex64) -> Self {
        Biquaternion { w, v: [ZERO; 3] }
    }

    pub fn real_scalar(w: f64) -> Self {
        Self::scalar(Complex64::new(w, 0.0))
    }

    pub fn vector(v: [Complex64; 3]) -> Self {
        Biquaternion { w: ZERO, v }
    }

    /// Quaternion unit `e_k` (k = 0, 1, 2).
    pub fn unit(k: usize) -> Self {
        let mut v = [ZERO; 3];
        v[k] = Complex64::new(1.0, 0.0);
        Self::vector(v)
    }

    /// Real quaternion `w + v⃗` with real coefficients.
    pub fn real(w: f64, v: [f64; 3]) -> Self {
        Biquaternion {
            w: Complex64::new(w, 0.0),
            v: v.map(|c| Complex64::new(c, 0.0)),
        }
    }

    /// Spacetime 4-vector `t - i·x⃗`.
    pub fn spacetime(t: f64, x: [f64; 3]) -> FourVector {
        Biquaternion {
            w: Complex64::new(t, 0.0),
            v: x.map(|c| Complex64::new(0.0, -c)),
        }
    }

    /// Same as [`spacetime`](Self::spacetime), from contravariant components.
    pub fn from_components(c: [f64; 4]) -> FourVector {
        Self::spacetime(c[0], [c[1], c[2], c[3]])
    }

    /// Field 6-vector `E⃗ + i·H⃗`.
    pub fn field(e: [f64; 3], h: [f64; 3]) -> SixVector {
        Biquaternion {
            w: ZERO,
            v: [0, 1, 2].map(|k| Complex64::new(e[k], h[k])),
        }
    }

    /// Time component of a 4-vector (real part of the scalar).
    pub fn time(&self) -> f64 {
        self.w.re
    }

    /// Spatial components of a 4-vector, undoing the `-i` embedding.
    pub fn space(&self) -> [f64; 3] {
        self.v.map(|c| -c.im)
    }

    /// Contravariant real components `(t, x, y, z)`.
    pub fn components(&self) -> [f64; 4] {
        let s = self.space();
        [self.time(), s[0], s[1], s[2]]
    }

    /// Electric part of a 6-vector.
    pub fn electric(&self) -> [f64; 3] {
        self.v.map(|c| c.re)
    }

    /// Magnetic part of a 6-vector.
    pub fn magnetic(&self) -> [f64; 3] {
        self.v.map(|c| c.im)
    }

    /// Quaternion conjugate: the vector part is negated, the complex
    /// coefficients are left alone.
    pub fn conj(&self) -> Self {
        Biquaternion {
            w: self.w,
            v: self.v.map(|c| -c),
        }
    }

    pub fn scal(&self) -> Complex64 {
        self.w
    }

    /// Vector part of `self`.
    pub fn vector_part(&self) -> Self {
        Self::vector(self.v)
    }

    /// Vector part of the product `self·rhs`.
    pub fn vect(&self, rhs: &Biquaternion) -> Self {
        (*self * *rhs).vector_part()
    }

    /// Componentwise real part.
    pub fn realpart(&self) -> Self {
        Biquaternion {
            w: Complex64::new(self.w.re, 0.0),
            v: self.v.map(|c| Complex64::new(c.re, 0.0)),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Biquaternion {
            w: self.w * s,
            v: self.v.map(|c| c * s),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Biquaternion {
            w: self.w * s,
            v: self.v.map(|c| c * s),
        }
    }

    /// Multiplies by the commuting complex unit.
    pub fn times_i(&self) -> Self {
        self.scale(I)
    }

    /// Euclidean norm over the eight real coefficients.
    pub fn norm(&self) -> f64 {
        (self.w.norm_sqr() + self.v.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// `scal(conj(self)·rhs)`.
    pub fn dot(&self, rhs: &Biquaternion) -> Complex64 {
        (self.conj() * *rhs).w
    }

    pub fn is_finite(&self) -> bool {
        self.w.is_finite() && self.v.iter().all(|c| c.is_finite())
    }
}

impl Add for Biquaternion {
    type Output = Biquaternion;
    fn add(self, rhs: Biquaternion) -> Biquaternion {
        Biquaternion {
            w: self.w + rhs.w,
            v: [0, 1, 2].map(|k| self.v[k] + rhs.v[k]),
        }
    }
}

impl AddAssign for Biquaternion {
    fn add_assign(&mut self, rhs: Biquaternion) {
        *self = *self + rhs;
    }
}

impl Sub for Biquaternion {
    type Output = Biquaternion;
    fn sub(self, rhs: Biquaternion) -> Biquaternion {
        Biquaternion {
            w: self.w - rhs.w,
            v: [0, 1, 2].map(|k| self.v[k] - rhs.v[k]),
        }
    }
}

impl SubAssign for Biquaternion {
    fn sub_assign(&mut self, rhs: Biquaternion) {
        *self = *self - rhs;
    }
}

impl Neg for Biquaternion {
    type Output = Biquaternion;
    fn neg(self) -> Biquaternion {
        Biquaternion {
            w: -self.w,
            v: self.v.map(|c| -c),
        }
    }
}

impl Mul for Biquaternion {
    type Output = Biquaternion;

    /// Hamilton product: `(a + u)(b + w) = ab - u·w + a·w + b·u + u×w`.
    fn mul(self, rhs: Biquaternion) -> Biquaternion {
        let (a, u) = (self.w, self.v);
        let (b, w) = (rhs.w, rhs.v);
        let dot = u[0] * w[0] + u[1] * w[1] + u[2] * w[2];
        let cross = [
            u[1] * w[2] - u[2] * w[1],
            u[2] * w[0] - u[0] * w[2],
            u[0] * w[1] - u[1] * w[0],
        ];
        Biquaternion {
            w: a * b - dot,
            v: [0, 1, 2].map(|k| a * w[k] + b * u[k] + cross[k]),
        }
    }
}

impl Mul<Complex64> for Biquaternion {
    type Output = Biquaternion;
    fn mul(self, rhs: Complex64) -> Biquaternion {
        self.scale(rhs)
    }
}

impl Mul<f64> for Biquaternion {
    type Output = Biquaternion;
    fn mul(self, rhs: f64) -> Biquaternion {
        self.scale_real(rhs)
    }
}

impl fmt::Debug for Biquaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({} + [{}, {}, {}])",
            self.w, self.v[0], self.v[1], self.v[2]
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn basis_relations() {
        let (e1, e2, e3) = (
            Biquaternion::unit(0),
            Biquaternion::unit(1),
            Biquaternion::unit(2),
        );
        assert_eq!(e1 * e2, e3);
        assert_eq!(e2 * e3, e1);
        assert_eq!(e3 * e1, e2);
        assert_eq!(e2 * e1, -e3);
        assert_eq!(e1 * e1, -Biquaternion::ONE);
    }

    #[test]
    fn identity() {
        let q = Biquaternion::new(c(1.0, 2.0), [c(0.5, -1.0), c(3.0, 0.0), c(0.0, 0.25)]);
        assert_eq!(q * Biquaternion::ONE, q);
        assert_eq!(Biquaternion::ONE * q, q);
    }

    #[test]
    fn boost_factor_product() {
        // (1 + iβ⃗)(1 - iβ⃗) with β⃗ = (0.6, 0, 0)
        let plus = Biquaternion::new(c(1.0, 0.0), [c(0.0, 0.6), c(0.0, 0.0), c(0.0, 0.0)]);
        let minus = plus.conj();
        let p = plus * minus;
        assert!((p.w - c(0.64, 0.0)).norm() < 1e-15);
        assert!(p.vector_part().norm() < 1e-15);
    }

    #[test]
    fn conjugation() {
        let v = [c(1.0, 1.0), c(-2.0, 0.0), c(0.0, 3.0)];
        let q = Biquaternion::new(c(2.0, 0.0), v);
        let qc = q.conj();
        assert_eq!(qc.w, c(2.0, 0.0));
        assert_eq!(qc.v, v.map(|x| -x));
        assert_eq!(qc.conj(), q);
    }

    #[test]
    fn scalar_and_vector_parts() {
        let v = [c(1.0, 0.0), c(0.0, 1.0), c(2.0, 2.0)];
        assert_eq!(Biquaternion::new(c(3.0, 0.0), v).scal(), c(3.0, 0.0));
        let vq = Biquaternion::vector(v);
        assert_eq!(Biquaternion::ONE.vect(&vq), vq);
        let real = Biquaternion::real(0.0, [0.3, -1.2, 0.7]);
        assert_eq!(real.vect(&real), Biquaternion::ZERO);
    }

    #[test]
    fn unit_velocity_normalization() {
        let beta = [0.3, -0.4, 0.5];
        let b2: f64 = beta.iter().map(|b| b * b).sum();
        let gamma = 1.0 / (1.0 - b2).sqrt();
        let u = Biquaternion::spacetime(gamma, beta.map(|b| gamma * b));
        assert!((u.dot(&u) - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn realpart_cases() {
        assert_eq!(
            Biquaternion::scalar(c(3.0, 4.0)).realpart(),
            Biquaternion::real_scalar(3.0)
        );
        let iv = Biquaternion::real(0.0, [1.0, 2.0, 3.0]).times_i();
        assert_eq!(iv.realpart(), Biquaternion::ZERO);
    }

    #[test]
    fn field_invariant() {
        let e = [1.0, -2.0, 0.5];
        let h = [0.3, 0.1, -0.7];
        let b = Biquaternion::field(e, h);
        let bb = (b.conj() * b).realpart();
        let e2: f64 = e.iter().map(|x| x * x).sum();
        let h2: f64 = h.iter().map(|x| x * x).sum();
        assert!((bb.w.re - (e2 - h2)).abs() < 1e-14);
        assert!(bb.vector_part().norm() < 1e-14);
    }

    #[test]
    fn spacetime_round_trip() {
        let x = Biquaternion::spacetime(1.5, [0.1, -0.2, 3.0]);
        assert_eq!(x.components(), [1.5, 0.1, -0.2, 3.0]);
        let b = Biquaternion::field([1.0, 2.0, 3.0], [4.0, 5.0, 6.0]);
        assert_eq!(b.electric(), [1.0, 2.0, 3.0]);
        assert_eq!(b.magnetic(), [4.0, 5.0, 6.0]);
    }
}
