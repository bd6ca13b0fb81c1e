//! Volume-form self-energy and Hadamard finite parts of radial integrals.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::biquat::FourVector;
use crate::error::{Error, Result};
use crate::hypersurface::sphere_direction;
use crate::lwfield::SingularityField;
use crate::quadrature::{gauss_legendre, integrate, integrate_real, pairwise_sum, AdaptiveOptions};

/// A radial integrand `f(ξ)` on `[lo, hi]` whose declared negative powers
/// `ξ^{-p}` are to be removed at ξ → 0.
pub struct RadialIntegrand<F> {
    pub f: F,
    pub singular_orders: Vec<u32>,
    pub lo: f64,
    pub hi: f64,
}

impl<F: Fn(f64) -> f64 + Sync> RadialIntegrand<F> {
    pub fn new(f: F, singular_orders: Vec<u32>, lo: f64, hi: f64) -> Self {
        RadialIntegrand {
            f,
            singular_orders,
            lo,
            hi,
        }
    }
}

/// Rest-frame self-energy density per unit proper time and unit radius,
/// (1/8π)·4πξ²·|E|² = e²/(2ξ²).
pub fn self_energy_integrand(charge: f64, xi2: f64) -> RadialIntegrand<impl Fn(f64) -> f64 + Sync> {
    let e2 = charge * charge;
    RadialIntegrand::new(move |xi: f64| e2 / (2.0 * xi * xi), vec![2], 0.0, xi2)
}

/// Least-squares polynomial coefficients (ascending powers of s) by
/// Householder QR.
fn polyfit(s: &[f64], y: &[f64], degree: usize) -> Vec<f64> {
    let m = s.len();
    let n = degree + 1;
    let mut a: Vec<Vec<f64>> = s
        .iter()
        .map(|&x| (0..n).map(|k| x.powi(k as i32)).collect())
        .collect();
    let mut b = y.to_vec();
    for j in 0..n {
        let norm = (j..m).map(|i| a[i][j] * a[i][j]).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if a[j][j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (j..m).map(|i| a[i][j]).collect();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|c| c * c).sum();
        if vv == 0.0 {
            continue;
        }
        for col in j..n {
            let d: f64 = (j..m).map(|i| v[i - j] * a[i][col]).sum::<f64>() * 2.0 / vv;
            for i in j..m {
                a[i][col] -= d * v[i - j];
            }
        }
        let d: f64 = (j..m).map(|i| v[i - j] * b[i]).sum::<f64>() * 2.0 / vv;
        for i in j..m {
            b[i] -= d * v[i - j];
        }
    }
    let mut c = vec![0.0; n];
    for j in (0..n).rev() {
        let tail: f64 = (j + 1..n).map(|k| a[j][k] * c[k]).sum();
        c[j] = (b[j] - tail) / a[j][j];
    }
    c
}

/// Fit of ξ^{pmax}·f(ξ) on (0, δ] as Σ_k c_k (ξ/δ)^k, with the largest
/// fit residual relative to the sampled magnitude.
fn fit_expansion<F: Fn(f64) -> f64>(f: &F, pmax: u32, delta: f64) -> (Vec<f64>, f64) {
    let degree = pmax as usize + 12;
    let m = 4 * (degree + 1);
    let (s, y): (Vec<f64>, Vec<f64>) = (0..m)
        .map(|j| {
            let s = 0.5 * (1.0 - ((j as f64 + 0.5) * PI / m as f64).cos());
            let xi = delta * s;
            (s, xi.powi(pmax as i32) * f(xi))
        })
        .unzip();
    let c = polyfit(&s, &y, degree);
    let peak = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let misfit = s
        .iter()
        .zip(&y)
        .map(|(x, v)| {
            let p = c.iter().rev().fold(0.0, |acc, ck| acc * x + ck);
            (p - v).abs()
        })
        .fold(0.0f64, f64::max);
    let rel = if peak > 0.0 { misfit / peak } else { misfit };
    (c, rel)
}

/// Hadamard finite part of ∫ f over (lo, hi].
///
/// With `lo > 0` this is the ordinary integral. With `lo == 0` the range is
/// split at δ = hi/4: (δ, hi] is integrated directly, and on (0, δ] the
/// local expansion f = Σ c_k δ^{-k} ξ^{k-pmax} is fitted and integrated
/// term by term with finite-part antiderivatives. Singular powers that were
/// not declared, or an expansion that does not fit, raise
/// [`Error::SingularMismatch`].
pub fn hadamard_finite_part<F: Fn(f64) -> f64 + Sync>(
    integrand: &RadialIntegrand<F>,
) -> Result<f64> {
    let (lo, hi) = (integrand.lo, integrand.hi);
    if !(lo >= 0.0 && lo < hi && hi.is_finite()) {
        return Err(Error::InvalidInterval {
            lo,
            hi,
            reason: "finite part needs 0 <= lo < hi < inf".into(),
        });
    }
    let opts = AdaptiveOptions::default();
    let f = &integrand.f;
    if lo > 0.0 {
        return Ok(integrate_real(|x| Ok(f(x)), lo, hi, &opts)?.0);
    }

    let pmax = integrand
        .singular_orders
        .iter()
        .copied()
        .max()
        .unwrap_or(0)
        .max(2);
    let delta = 0.25 * hi;
    let (c, misfit) = fit_expansion(f, pmax, delta);
    if !(misfit < 1e-8) {
        return Err(Error::SingularMismatch(format!(
            "ξ^{pmax}·f(ξ) is not smooth at the origin (relative misfit {misfit:e})"
        )));
    }
    // size of each term at ξ = δ
    let sizes: Vec<f64> = c
        .iter()
        .map(|ck| (ck * delta.powi(-(pmax as i32))).abs())
        .collect();
    let scale = sizes.iter().fold(f64::MIN_POSITIVE, |m, v| m.max(*v));
    let mut parts = Vec::with_capacity(c.len());
    for (k, ck) in c.iter().enumerate() {
        let power = k as i32 - pmax as i32;
        if power < 0 {
            let p = (-power) as u32;
            if !integrand.singular_orders.contains(&p) && sizes[k] > 1e-8 * scale {
                return Err(Error::SingularMismatch(format!(
                    "undeclared ξ^-{p} term (coefficient {:e})",
                    ck * delta.powi(-(k as i32))
                )));
            }
        }
        // FP ∫₀^δ c_k δ^{-k} ξ^{power} dξ
        let antiderivative = if power == -1 {
            delta.ln()
        } else {
            delta.powi(power + 1) / (power + 1) as f64
        };
        parts.push(ck * delta.powi(-(k as i32)) * antiderivative);
    }
    let (outer, _) = integrate_real(|x| Ok(f(x)), delta, hi, &opts)?;
    Ok(outer + pairwise_sum(&parts))
}

/// Result of the rest-frame volume self-energy with its closed-form split.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VolumeSelfEnergy {
    /// Re(1/8π) ∫ scal(B̄B) d³x over ξ₁ < r < ξ₂, per unit proper time.
    pub value: f64,
    pub error: f64,
    /// e²/(2ξ₁), the part that diverges as ξ₁ → 0.
    pub divergent: f64,
    /// −e²/(2ξ₂), the part that survives.
    pub finite: f64,
}

/// Rest-frame field energy of the shell ξ₁ < r < ξ₂ (ξ₂ may be infinite),
/// integrated from the field evaluator on a product sphere rule.
pub fn volume_self_energy(
    field: &SingularityField,
    xi1: f64,
    xi2: f64,
) -> Result<VolumeSelfEnergy> {
    if !(xi1 > 0.0 && xi1 < xi2) {
        return Err(Error::InvalidInterval {
            lo: xi1,
            hi: xi2,
            reason: "volume self-energy needs 0 < xi1 < xi2".into(),
        });
    }
    if !field.worldline.is_at_rest() {
        return Err(Error::InvalidParameter(
            "volume self-energy is a rest-frame computation".into(),
        ));
    }
    let e2 = field.charge * field.charge;
    let origin = field.worldline.position_components(0.0);
    let t = origin[0] + 2.0 * xi2.min(1e6 * xi1).max(xi1);
    let (mus, wmu) = gauss_legendre(8);
    let nphi = 8;
    // r²·∫ scal(B̄B) dΩ at radius r
    let shell = |r: f64| -> Result<f64> {
        let mut terms = Vec::with_capacity(mus.len() * nphi);
        for (mu, w) in mus.iter().zip(&wmu) {
            for j in 0..nphi {
                let phi = 2.0 * PI * (j as f64 + 0.5) / nphi as f64;
                let (n, _, _) = sphere_direction(*mu, phi);
                let x = FourVector::spacetime(
                    t,
                    [
                        origin[1] + r * n[0],
                        origin[2] + r * n[1],
                        origin[3] + r * n[2],
                    ],
                );
                let b = field.field(&x)?;
                terms.push((b.conj() * b).scal().re * w * 2.0 * PI / nphi as f64);
            }
        }
        Ok(r * r * pairwise_sum(&terms) / (8.0 * PI))
    };
    let opts = AdaptiveOptions::default();
    let r = if xi2.is_infinite() {
        // r = 1/v
        integrate(
            |v: f64| Ok(Complex64::new(shell(1.0 / v)? / (v * v), 0.0)),
            0.0,
            1.0 / xi1,
            &opts,
        )?
    } else {
        integrate(
            |s: f64| {
                let r = s.exp();
                Ok(Complex64::new(shell(r)? * r, 0.0))
            },
            xi1.ln(),
            xi2.ln(),
            &opts,
        )?
    };
    Ok(VolumeSelfEnergy {
        value: r.value.re,
        error: r.error,
        divergent: e2 / (2.0 * xi1),
        finite: if xi2.is_infinite() {
            0.0
        } else {
            -e2 / (2.0 * xi2)
        },
    })
}

/// Field energy inside (finite part) and outside the proper sphere of
/// radius ξ₂, rest frame, per unit proper time. Diagnostic only.
pub fn proper_sphere_energies(field: &SingularityField, xi2: f64) -> Result<(f64, f64)> {
    let inside = hadamard_finite_part(&self_energy_integrand(field.charge, xi2))?;
    let outside = volume_self_energy(field, xi2, f64::INFINITY)?.value;
    Ok((inside, outside))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::Worldline;
    use approx::assert_relative_eq;

    #[test]
    fn regular_integrand_is_ordinary_integral() {
        let r = RadialIntegrand::new(|_| 1.0, vec![], 0.0, 1.0);
        assert_relative_eq!(hadamard_finite_part(&r).unwrap(), 1.0, epsilon = 1e-13);
        let r = RadialIntegrand::new(|x: f64| x.cos(), vec![], 0.0, 2.0);
        assert_relative_eq!(
            hadamard_finite_part(&r).unwrap(),
            2f64.sin(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn inverse_square_plus_constant() {
        let r = RadialIntegrand::new(|x: f64| 1.0 / (x * x) + 1.0, vec![2], 0.0, 2.0);
        assert_relative_eq!(hadamard_finite_part(&r).unwrap(), 1.5, epsilon = 1e-10);
    }

    #[test]
    fn logarithmic_order() {
        // FP ∫₀² (1/ξ + e^ξ) = ln 2 + e² − 1
        let r = RadialIntegrand::new(|x: f64| 1.0 / x + x.exp(), vec![1], 0.0, 2.0);
        let expect = 2f64.ln() + 2f64.exp() - 1.0;
        assert_relative_eq!(hadamard_finite_part(&r).unwrap(), expect, epsilon = 1e-9);
    }

    #[test]
    fn mixed_orders_with_smooth_tail() {
        // FP ∫₀¹ (3/ξ² − 2/ξ + sin ξ) = −3 − 0 + 1 − cos 1
        let r = RadialIntegrand::new(
            |x: f64| 3.0 / (x * x) - 2.0 / x + x.sin(),
            vec![1, 2],
            0.0,
            1.0,
        );
        assert_relative_eq!(
            hadamard_finite_part(&r).unwrap(),
            -2.0 - 1f64.cos(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn self_energy_finite_part() {
        for xi2 in [0.01, 0.1, 1.0, 10.0, 100.0] {
            let v = hadamard_finite_part(&self_energy_integrand(1.0, xi2)).unwrap();
            assert_relative_eq!(v, -0.5 / xi2, max_relative = 1e-10);
        }
    }

    #[test]
    fn half_sphere_symmetric_form() {
        // ξ over (−ξ₂, ξ₂) with density e²/(4ξ²); the even integrand folds
        // onto (0, ξ₂] with a factor 2.
        let quarter = RadialIntegrand::new(|x: f64| 1.0 / (4.0 * x * x), vec![2], 0.0, 1.0);
        let v = 2.0 * hadamard_finite_part(&quarter).unwrap();
        assert_relative_eq!(v, -0.5, epsilon = 1e-10);
    }

    #[test]
    fn undeclared_singularity_rejected() {
        let r = RadialIntegrand::new(|x: f64| 1.0 / (x * x), vec![1], 0.0, 1.0);
        assert!(matches!(
            hadamard_finite_part(&r),
            Err(Error::SingularMismatch(_))
        ));
        let r = RadialIntegrand::new(|x: f64| 1.0 / x, vec![], 0.0, 1.0);
        assert!(matches!(
            hadamard_finite_part(&r),
            Err(Error::SingularMismatch(_))
        ));
    }

    #[test]
    fn non_polynomial_singularity_rejected() {
        let r = RadialIntegrand::new(|x: f64| x.powf(-1.5), vec![1, 2], 0.0, 1.0);
        assert!(matches!(
            hadamard_finite_part(&r),
            Err(Error::SingularMismatch(_))
        ));
    }

    #[test]
    fn shell_energy() {
        let w = Worldline::rest();
        let f = SingularityField::new(1.0, &w);
        let v = volume_self_energy(&f, 1.0, 2.0).unwrap();
        assert_relative_eq!(v.value, 0.25, max_relative = 1e-11);
        let v = volume_self_energy(&f, 0.5, f64::INFINITY).unwrap();
        assert_relative_eq!(v.value, 1.0, max_relative = 1e-11);
        assert_eq!(v.divergent, 1.0);
        let z = SingularityField::new(0.0, &w);
        assert_eq!(volume_self_energy(&z, 1.0, 2.0).unwrap().value, 0.0);
    }

    #[test]
    fn volume_energy_rejects_bad_input() {
        let w = Worldline::rest();
        let f = SingularityField::new(1.0, &w);
        assert!(volume_self_energy(&f, 2.0, 1.0).is_err());
        assert!(volume_self_energy(&f, 0.0, 1.0).is_err());
        let h = Worldline::hyperbolic(0.1, [1.0, 0.0, 0.0]).unwrap();
        assert!(volume_self_energy(&SingularityField::new(1.0, &h), 1.0, 2.0).is_err());
    }

    #[test]
    fn inside_outside_split() {
        let w = Worldline::rest();
        let f = SingularityField::new(1.0, &w);
        let (inside, outside) = proper_sphere_energies(&f, 0.5).unwrap();
        assert_relative_eq!(inside, -1.0, max_relative = 1e-10);
        assert_relative_eq!(outside, 1.0, max_relative = 1e-10);
    }
}
