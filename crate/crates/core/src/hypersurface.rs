//! Directed hypersurface elements and quadrature over the proper tube and
//! its light-cone caps.
//!
//! A patch maps three parameters `u = (u₁, u₂, u₃)` to spacetime points.
//! Its element is built from the tangents `T_a = ∂X/∂u_a` as the covariant
//! normal `N_μ = ε_{μαβγ} T₁^α T₂^β T₃^γ`, embedded as the quaternion
//! `d³Σ = -i·N₀ + N₁e₁ + N₂e₂ + N₃e₃` (the same embedding as the gradient
//! operator). With this embedding
//!
//! ```text
//! scal(conj(V)·d³Σ) = -i · det(V, T₁, T₂, T₃)
//! ```
//!
//! and, for any smooth `a`, `b`, the closed-surface sum of
//! `scal(ā·d³Σ·b)` equals the 4-volume integral of `Σ_μ ∂_μ(ā E^μ b)`.
//!
//! Tube and cone patches use `(u₁, μ = cos θ, φ)` with the lab-frame
//! direction `n̂(μ, φ)`; `u₁` is proper time on the tube and retarded radius
//! on a cone.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::biquat::{Biquaternion, FourVector, SixVector};
use crate::error::{Error, Result};
use crate::kinematics::Worldline;
use crate::lwfield::gradient_basis;
use crate::quadrature::{
    gauss_legendre, gauss_legendre_on, integrate, pairwise_sum_complex, AdaptiveOptions,
};

/// Outward orientation of the tube for parameter order (τ, μ, φ).
pub const TUBE_ORIENTATION: f64 = 1.0;
/// Outward (past-pointing) orientation of the cap at τ₁ for (ξ, μ, φ).
pub const START_CONE_ORIENTATION: f64 = 1.0;
/// Outward (future-pointing) orientation of the cap at τ₂ for (ξ, μ, φ).
pub const END_CONE_ORIENTATION: f64 = -1.0;

/// Tube radius must exceed this multiple of the worldline's degenerate-point
/// epsilon.
pub const TUBE_GUARD_FACTOR: f64 = 1e3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConeEnd {
    Start,
    End,
}

#[derive(Clone, Copy, Debug)]
pub enum PatchKind<'w> {
    /// Constant retarded radius `xi2` for τ ∈ [tau1, tau2].
    Tube {
        worldline: &'w Worldline,
        xi2: f64,
        tau1: f64,
        tau2: f64,
    },
    /// Forward light cone of Z(tau_end) for ξ ∈ [xi_lo, xi_hi].
    Cone {
        worldline: &'w Worldline,
        tau_end: f64,
        xi_lo: f64,
        xi_hi: f64,
        end: ConeEnd,
    },
    /// Constant-time box t = `t`, parameters (x, y, z). Test patch.
    Slab { t: f64, lo: [f64; 3], hi: [f64; 3] },
}

#[derive(Clone, Copy, Debug)]
pub struct SurfacePatch<'w> {
    pub kind: PatchKind<'w>,
    pub orientation: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceElement {
    /// Quaternion d³Σ per unit parameter volume, orientation applied.
    pub element: FourVector,
    /// Euclidean norm of the covariant normal.
    pub jacobian: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceIntegral {
    /// Σ scal(ā·d³Σ·b), complex.
    pub value: Complex64,
    pub error: f64,
}

impl SurfaceIntegral {
    pub fn real(&self) -> f64 {
        self.value.re
    }
}

/// Orders and tolerances for patch quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureScheme {
    /// Gauss–Legendre order in μ = cos θ (and in y, z on slabs).
    pub polar_order: usize,
    /// Trapezoid points in φ.
    pub azimuth_order: usize,
    /// Adaptive Gauss–Kronrod settings along u₁.
    pub adaptive: AdaptiveOptions,
    /// Repeat the inner rule at two-thirds order and add the difference to
    /// the error estimate.
    pub estimate_angular_error: bool,
}

impl Default for QuadratureScheme {
    fn default() -> Self {
        QuadratureScheme {
            polar_order: 24,
            azimuth_order: 48,
            adaptive: AdaptiveOptions {
                abs_tol: 1e-13,
                rel_tol: 1e-12,
                initial_panels: 2,
                max_panels: 400,
            },
            estimate_angular_error: true,
        }
    }
}

impl QuadratureScheme {
    /// Multiplies the fixed orders by `factor` (at least 4 points each).
    pub fn scaled(&self, factor: f64) -> Self {
        let scale = |n: usize| ((n as f64 * factor).round() as usize).max(4);
        QuadratureScheme {
            polar_order: scale(self.polar_order),
            azimuth_order: scale(self.azimuth_order),
            ..*self
        }
    }

    fn coarse(&self) -> Self {
        QuadratureScheme {
            polar_order: (2 * self.polar_order / 3).max(2),
            azimuth_order: (2 * self.azimuth_order / 3).max(3),
            estimate_angular_error: false,
            ..*self
        }
    }
}

/// Lab direction on the unit sphere and its parameter derivatives.
pub fn sphere_direction(mu: f64, phi: f64) -> ([f64; 3], [f64; 3], [f64; 3]) {
    let s = (1.0 - mu * mu).max(0.0).sqrt();
    let (sp, cp) = phi.sin_cos();
    let n = [s * cp, s * sp, mu];
    let dmu = if s > 0.0 {
        [-mu / s * cp, -mu / s * sp, 1.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let dphi = [-s * sp, s * cp, 0.0];
    (n, dmu, dphi)
}

fn det3(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// Covariant normal N_μ with Σ V^μ N_μ = det(V, t1, t2, t3).
pub fn alternating_normal(t1: &[f64; 4], t2: &[f64; 4], t3: &[f64; 4]) -> [f64; 4] {
    let minor = |skip: usize| {
        let pick = |t: &[f64; 4]| {
            let mut out = [0.0; 3];
            let mut j = 0;
            for (k, c) in t.iter().enumerate() {
                if k != skip {
                    out[j] = *c;
                    j += 1;
                }
            }
            out
        };
        det3(pick(t1), pick(t2), pick(t3))
    };
    [minor(0), -minor(1), minor(2), -minor(3)]
}

/// 4×4 determinant with the given rows.
pub fn det4(r0: &[f64; 4], r1: &[f64; 4], r2: &[f64; 4], r3: &[f64; 4]) -> f64 {
    let n = alternating_normal(r1, r2, r3);
    r0[0] * n[0] + r0[1] * n[1] + r0[2] * n[2] + r0[3] * n[3]
}

/// Embeds a covariant normal as the quaternion element -i·N₀ + N⃗.
pub fn element_from_normal(n: &[f64; 4]) -> FourVector {
    Biquaternion::new(
        Complex64::new(0.0, -n[0]),
        [
            Complex64::new(n[1], 0.0),
            Complex64::new(n[2], 0.0),
            Complex64::new(n[3], 0.0),
        ],
    )
}

/// Point and tangents of X(τ, ξ, n̂) = Z(τ) + (ξ/D)(1, n̂), D = U⁰ - n̂·u⃗,
/// with respect to (τ, ξ, μ, φ).
pub(crate) fn retarded_chart(
    worldline: &Worldline,
    tau: f64,
    xi: f64,
    mu: f64,
    phi: f64,
) -> ([f64; 4], [[f64; 4]; 4]) {
    let z = worldline.position_components(tau);
    let u = worldline.velocity_components(tau);
    let du = worldline.acceleration_components(tau);
    let (n, dn_mu, dn_phi) = sphere_direction(mu, phi);
    let d = u[0] - (u[1] * n[0] + u[2] * n[1] + u[3] * n[2]);
    let rho = xi / d;
    let ray = [1.0, n[0], n[1], n[2]];
    let x = [
        z[0] + rho,
        z[1] + rho * n[0],
        z[2] + rho * n[1],
        z[3] + rho * n[2],
    ];

    let d_tau = du[0] - (du[1] * n[0] + du[2] * n[1] + du[3] * n[2]);
    let drho_tau = -xi * d_tau / (d * d);
    let t_tau = [0, 1, 2, 3].map(|m| u[m] + drho_tau * ray[m]);
    let t_xi = ray.map(|c| c / d);
    let angular = |dn: [f64; 3]| {
        let drho = xi * (u[1] * dn[0] + u[2] * dn[1] + u[3] * dn[2]) / (d * d);
        [
            drho,
            drho * n[0] + rho * dn[0],
            drho * n[1] + rho * dn[1],
            drho * n[2] + rho * dn[2],
        ]
    };
    (x, [t_tau, t_xi, angular(dn_mu), angular(dn_phi)])
}

impl<'w> SurfacePatch<'w> {
    pub fn tube(worldline: &'w Worldline, xi2: f64, tau1: f64, tau2: f64) -> Result<Self> {
        if !(xi2 > TUBE_GUARD_FACTOR * worldline.epsilon()) || !xi2.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "tube radius {xi2} must exceed {TUBE_GUARD_FACTOR}× the degenerate-point epsilon {}",
                worldline.epsilon()
            )));
        }
        if !(tau1 <= tau2) {
            return Err(Error::InvalidInterval {
                lo: tau1,
                hi: tau2,
                reason: "tube needs tau1 <= tau2".into(),
            });
        }
        Ok(SurfacePatch {
            kind: PatchKind::Tube {
                worldline,
                xi2,
                tau1,
                tau2,
            },
            orientation: TUBE_ORIENTATION,
        })
    }

    pub fn cone(
        worldline: &'w Worldline,
        tau_end: f64,
        xi_lo: f64,
        xi_hi: f64,
        end: ConeEnd,
    ) -> Result<Self> {
        if !(0.0 <= xi_lo && xi_lo <= xi_hi) || !xi_hi.is_finite() {
            return Err(Error::InvalidInterval {
                lo: xi_lo,
                hi: xi_hi,
                reason: "cone needs 0 <= xi_lo <= xi_hi < inf".into(),
            });
        }
        let orientation = match end {
            ConeEnd::Start => START_CONE_ORIENTATION,
            ConeEnd::End => END_CONE_ORIENTATION,
        };
        Ok(SurfacePatch {
            kind: PatchKind::Cone {
                worldline,
                tau_end,
                xi_lo,
                xi_hi,
                end,
            },
            orientation,
        })
    }

    pub fn slab(t: f64, lo: [f64; 3], hi: [f64; 3]) -> Self {
        SurfacePatch {
            kind: PatchKind::Slab { t, lo, hi },
            orientation: 1.0,
        }
    }

    /// Same patch with the orientation sign replaced.
    pub fn with_orientation(mut self, sign: f64) -> Self {
        self.orientation = sign;
        self
    }

    /// Point and tangents at parameter `u`.
    pub fn chart(&self, u: [f64; 3]) -> ([f64; 4], [[f64; 4]; 3]) {
        match self.kind {
            PatchKind::Tube { worldline, xi2, .. } => {
                let (x, t) = retarded_chart(worldline, u[0], xi2, u[1], u[2]);
                (x, [t[0], t[2], t[3]])
            }
            PatchKind::Cone {
                worldline, tau_end, ..
            } => {
                let (x, t) = retarded_chart(worldline, tau_end, u[0], u[1], u[2]);
                (x, [t[1], t[2], t[3]])
            }
            PatchKind::Slab { t, .. } => (
                [t, u[0], u[1], u[2]],
                [
                    [0.0, 1.0, 0.0, 0.0],
                    [0.0, 0.0, 1.0, 0.0],
                    [0.0, 0.0, 0.0, 1.0],
                ],
            ),
        }
    }

    pub fn point(&self, u: [f64; 3]) -> FourVector {
        FourVector::from_components(self.chart(u).0)
    }

    /// Range of the first parameter.
    pub fn first_range(&self) -> (f64, f64) {
        match self.kind {
            PatchKind::Tube { tau1, tau2, .. } => (tau1, tau2),
            PatchKind::Cone { xi_lo, xi_hi, .. } => (xi_lo, xi_hi),
            PatchKind::Slab { lo, hi, .. } => (lo[0], hi[0]),
        }
    }
}

/// d³Σ at parameter `u`.
pub fn element_at(patch: &SurfacePatch, u: [f64; 3]) -> Result<SurfaceElement> {
    let (_, t) = patch.chart(u);
    let n = alternating_normal(&t[0], &t[1], &t[2]);
    let jacobian = n.iter().map(|c| c * c).sum::<f64>().sqrt();
    let scale = t
        .iter()
        .map(|v| v.iter().map(|c| c * c).sum::<f64>().sqrt())
        .product::<f64>();
    if !(jacobian > 1e-13 * scale) {
        return Err(Error::DegenerateTangents { u });
    }
    let n = n.map(|c| c * patch.orientation);
    Ok(SurfaceElement {
        element: element_from_normal(&n),
        jacobian,
    })
}

/// Fixed inner rule over (u₂, u₃): nodes and weights.
fn inner_rule(patch: &SurfacePatch, scheme: &QuadratureScheme) -> Vec<(f64, f64, f64)> {
    match patch.kind {
        PatchKind::Slab { lo, hi, .. } => {
            let (ys, wy) = gauss_legendre_on(scheme.polar_order, lo[1], hi[1]);
            let (zs, wz) = gauss_legendre_on(scheme.polar_order, lo[2], hi[2]);
            let mut out = Vec::with_capacity(ys.len() * zs.len());
            for (y, a) in ys.iter().zip(&wy) {
                for (z, b) in zs.iter().zip(&wz) {
                    out.push((*y, *z, a * b));
                }
            }
            out
        }
        _ => {
            let (mus, wmu) = gauss_legendre(scheme.polar_order);
            let m = scheme.azimuth_order;
            let wphi = 2.0 * PI / m as f64;
            let mut out = Vec::with_capacity(mus.len() * m);
            for (mu, w) in mus.iter().zip(&wmu) {
                for j in 0..m {
                    out.push((*mu, wphi * (j as f64 + 0.5), w * wphi));
                }
            }
            out
        }
    }
}

/// Whether the cone's radial direction is integrated in ln ξ.
fn log_radial(patch: &SurfacePatch) -> bool {
    matches!(patch.kind, PatchKind::Cone { xi_lo, xi_hi, .. } if xi_lo > 0.0 && xi_hi > xi_lo)
}

fn integrate_once<A, B>(
    patch: &SurfacePatch,
    a: &A,
    b: &B,
    scheme: &QuadratureScheme,
) -> Result<SurfaceIntegral>
where
    A: Fn(&FourVector) -> Result<FourVector> + Sync,
    B: Fn(&FourVector) -> Result<SixVector> + Sync,
{
    let rule = inner_rule(patch, scheme);
    let (lo, hi) = patch.first_range();
    let logmap = log_radial(patch);
    let slice = |s: f64| -> Result<Complex64> {
        let (u1, jac) = if logmap {
            let xi = s.exp();
            (xi, xi)
        } else {
            (s, 1.0)
        };
        let terms = rule
            .iter()
            .map(|&(u2, u3, w)| {
                let u = [u1, u2, u3];
                let x = patch.point(u);
                let el = element_at(patch, u)?.element;
                let av = a(&x)?;
                let bv = b(&x)?;
                Ok((av.conj() * el * bv).scal() * w)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(pairwise_sum_complex(&terms) * jac)
    };
    let (s_lo, s_hi) = if logmap { (lo.ln(), hi.ln()) } else { (lo, hi) };
    let r = integrate(slice, s_lo, s_hi, &scheme.adaptive)?;
    Ok(SurfaceIntegral {
        value: r.value,
        error: r.error,
    })
}

/// Σ scal(ā·d³Σ·b) over the patch.
///
/// The error estimate adds the Gauss–Kronrod estimate along u₁ to the
/// change observed when the inner rule is coarsened.
pub fn surface_integral<A, B>(
    patch: &SurfacePatch,
    a: A,
    b: B,
    scheme: &QuadratureScheme,
) -> Result<SurfaceIntegral>
where
    A: Fn(&FourVector) -> Result<FourVector> + Sync,
    B: Fn(&FourVector) -> Result<SixVector> + Sync,
{
    let fine = integrate_once(patch, &a, &b, scheme)?;
    if !scheme.estimate_angular_error {
        return Ok(fine);
    }
    let coarse = integrate_once(patch, &a, &b, &scheme.coarse())?;
    Ok(SurfaceIntegral {
        value: fine.value,
        error: fine.error + (fine.value - coarse.value).norm(),
    })
}

/// The causally closed region inside a proper tube between the light cones
/// of Z(τ₁) and Z(τ₂).
#[derive(Clone, Copy, Debug)]
pub struct ProperRegion<'w> {
    pub worldline: &'w Worldline,
    pub xi2: f64,
    pub tau1: f64,
    pub tau2: f64,
}

impl<'w> ProperRegion<'w> {
    /// Tube plus both caps (apex included), with their outward signs.
    pub fn boundary(&self) -> Result<[SurfacePatch<'w>; 3]> {
        Ok([
            SurfacePatch::tube(self.worldline, self.xi2, self.tau1, self.tau2)?,
            SurfacePatch::cone(self.worldline, self.tau1, 0.0, self.xi2, ConeEnd::Start)?,
            SurfacePatch::cone(self.worldline, self.tau2, 0.0, self.xi2, ConeEnd::End)?,
        ])
    }

    /// ∫ f d⁴x over the region in coordinates (τ, ξ, μ, φ), with the
    /// Jacobian taken as the determinant of the chart tangents.
    pub fn volume_integral<F>(&self, f: F, scheme: &QuadratureScheme) -> Result<SurfaceIntegral>
    where
        F: Fn(&FourVector) -> Result<Complex64> + Sync,
    {
        let (xis, wxi) = gauss_legendre_on(scheme.polar_order, 0.0, self.xi2);
        let (mus, wmu) = gauss_legendre(scheme.polar_order);
        let m = scheme.azimuth_order;
        let wphi = 2.0 * PI / m as f64;
        let slice = |tau: f64| -> Result<Complex64> {
            let mut terms = Vec::with_capacity(xis.len() * mus.len() * m);
            for (xi, wx) in xis.iter().zip(&wxi) {
                for (mu, wm) in mus.iter().zip(&wmu) {
                    for j in 0..m {
                        let phi = wphi * (j as f64 + 0.5);
                        let (x, t) = retarded_chart(self.worldline, tau, *xi, *mu, phi);
                        let jac = det4(&t[0], &t[1], &t[2], &t[3]).abs();
                        let v = f(&FourVector::from_components(x))?;
                        terms.push(v * (jac * wx * wm * wphi));
                    }
                }
            }
            Ok(pairwise_sum_complex(&terms))
        };
        let r = integrate(slice, self.tau1, self.tau2, &scheme.adaptive)?;
        Ok(SurfaceIntegral {
            value: r.value,
            error: r.error,
        })
    }
}

/// Outcome of a closed-surface versus 4-volume comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussCheck {
    pub surface: SurfaceIntegral,
    pub volume: SurfaceIntegral,
    pub residual: f64,
    /// residual / max(|surface|, |volume|), or the residual itself when
    /// both vanish.
    pub relative: f64,
}

/// Fourth-order central difference of a quaternion field along x^μ.
fn partial4<F>(f: &F, x: &FourVector, mu: usize, h: f64) -> Result<Biquaternion>
where
    F: Fn(&FourVector) -> Result<Biquaternion>,
{
    let at = |k: f64| {
        let mut c = x.components();
        c[mu] += k * h;
        f(&FourVector::from_components(c))
    };
    let d = (at(-2.0)? - at(2.0)?) + (at(1.0)? - at(-1.0)?).scale_real(8.0);
    Ok(d.scale_real(1.0 / (12.0 * h)))
}

/// Compares Σ scal(ā·d³Σ·b) over `patches` with ∫ scal(Σ_μ ∂_μ(ā E^μ b)) d⁴x
/// over `region`. Derivatives of `a` and `b` are fourth-order central
/// differences with step `h`.
pub fn gauss_check<A, B>(
    a: A,
    b: B,
    region: &ProperRegion,
    patches: &[SurfacePatch],
    scheme: &QuadratureScheme,
    h: f64,
) -> Result<GaussCheck>
where
    A: Fn(&FourVector) -> Result<FourVector> + Sync,
    B: Fn(&FourVector) -> Result<SixVector> + Sync,
{
    let mut surface = SurfaceIntegral {
        value: Complex64::new(0.0, 0.0),
        error: 0.0,
    };
    for p in patches {
        let s = surface_integral(p, &a, &b, scheme)?;
        surface.value += s.value;
        surface.error += s.error;
    }
    let basis = gradient_basis();
    let divergence = |x: &FourVector| -> Result<Complex64> {
        let av = a(x)?.conj();
        let bv = b(x)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for mu in 0..4 {
            let da = partial4(&a, x, mu, h)?.conj();
            let db = partial4(&b, x, mu, h)?;
            acc += (da * basis[mu] * bv + av * basis[mu] * db).scal();
        }
        Ok(acc)
    };
    let volume = region.volume_integral(divergence, scheme)?;
    let residual = (surface.value - volume.value).norm();
    let scale = surface.value.norm().max(volume.value.norm());
    Ok(GaussCheck {
        surface,
        volume,
        residual,
        relative: if scale > 0.0 {
            residual / scale
        } else {
            residual
        },
    })
}
