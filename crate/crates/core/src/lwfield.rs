//! Liénard–Wiechert potential and field of a point singularity, external
//! field families, and finite-difference checks of the homogeneous field
//! equation.

use num_complex::Complex64;

use crate::biquat::{Biquaternion, FourVector, SixVector};
use crate::error::{Error, Result};
use crate::kinematics::{RetardedFrame, Worldline};

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Retarded field of a point singularity of charge `charge` moving on
/// `worldline`: A = e·U/ξ, B = ∇̄ ⊙ A.
#[derive(Clone, Copy, Debug)]
pub struct SingularityField<'w> {
    pub charge: f64,
    pub worldline: &'w Worldline,
}

impl<'w> SingularityField<'w> {
    pub fn new(charge: f64, worldline: &'w Worldline) -> Self {
        SingularityField { charge, worldline }
    }

    pub fn potential(&self, x: &FourVector) -> Result<FourVector> {
        let frame = self.worldline.retarded_solve(x)?;
        Ok(self.potential_at(&frame))
    }

    pub fn potential_at(&self, frame: &RetardedFrame) -> FourVector {
        self.worldline
            .velocity(frame.tau_r)
            .scale_real(self.charge / frame.xi)
    }

    pub fn field(&self, x: &FourVector) -> Result<SixVector> {
        let (v, r) = self.field_parts(x)?;
        Ok(v + r)
    }

    /// Velocity (∝ 1/ξ²) and radiation (∝ 1/ξ) parts of the field.
    pub fn field_parts(&self, x: &FourVector) -> Result<(SixVector, SixVector)> {
        let frame = self.worldline.retarded_solve(x)?;
        Ok(self.field_parts_at(&frame))
    }

    pub fn field_parts_at(&self, frame: &RetardedFrame) -> (SixVector, SixVector) {
        let u = self.worldline.velocity_components(frame.tau_r);
        let du = self.worldline.acceleration_components(frame.tau_r);
        let gamma = u[0];
        let beta = [u[1] / gamma, u[2] / gamma, u[3] / gamma];
        // dβ⃗/dt
        let g2 = gamma * gamma;
        let beta_dot = [
            (du[1] - beta[0] * du[0]) / g2,
            (du[2] - beta[1] * du[0]) / g2,
            (du[3] - beta[2] * du[0]) / g2,
        ];
        let n = frame.nhat;
        let r = frame.distance;
        let kappa = 1.0 - dot(&n, &beta);
        let k3 = kappa * kappa * kappa;
        let n_minus_beta = [n[0] - beta[0], n[1] - beta[1], n[2] - beta[2]];

        let cv = self.charge / (g2 * k3 * r * r);
        let e_vel = n_minus_beta.map(|c| cv * c);
        let cr = self.charge / (k3 * r);
        let e_rad = cross(&n, &cross(&n_minus_beta, &beta_dot)).map(|c| cr * c);

        let h_vel = cross(&n, &e_vel);
        let h_rad = cross(&n, &e_rad);
        (
            Biquaternion::field(e_vel, h_vel),
            Biquaternion::field(e_rad, h_rad),
        )
    }

    pub fn field_at(&self, frame: &RetardedFrame) -> SixVector {
        let (v, r) = self.field_parts_at(frame);
        v + r
    }
}

/// Smooth external field families with closed-form potentials.
///
/// Potentials are given as contravariant components `(φ, A_x, A_y, A_z)`
/// and embedded as `φ - i·A⃗`.
#[derive(Clone, Debug, PartialEq)]
pub enum ExternalField {
    Constant {
        potential: [f64; 4],
    },
    /// A(X) = A₀·(1 + ε·scal(k̄·X)), with scal(k̄X) = k⁰t - k⃗·x⃗.
    PolynomialSlow {
        amplitude: [f64; 4],
        wavevector: [f64; 4],
        epsilon: f64,
    },
    /// Transverse plane wave A⃗ = a⃗·cos(ωt - k⃗·x⃗ + phase), φ = 0, ω = |k⃗|.
    PlaneWave {
        amplitude: [f64; 3],
        wavevector: [f64; 3],
        phase: f64,
    },
    /// Coulomb potential of a static charge at `position`.
    DistantCharge {
        charge: f64,
        position: [f64; 3],
    },
}

impl ExternalField {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::Constant { .. } => "constant",
            Self::PolynomialSlow { .. } => "polynomial-slow",
            Self::PlaneWave { .. } => "plane-wave",
            Self::DistantCharge { .. } => "distant-charge",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::PlaneWave {
                amplitude,
                wavevector,
                ..
            } => {
                let k = dot(wavevector, wavevector).sqrt();
                if !(k > 0.0) {
                    return Err(Error::InvalidParameter(
                        "plane wave needs a nonzero wavevector".into(),
                    ));
                }
                let a = dot(amplitude, amplitude).sqrt();
                if dot(amplitude, wavevector).abs() > 1e-12 * a * k {
                    return Err(Error::InvalidParameter(
                        "plane-wave amplitude must be transverse to the wavevector".into(),
                    ));
                }
                Ok(())
            }
            Self::PolynomialSlow { epsilon, .. } if !epsilon.is_finite() => Err(
                Error::InvalidParameter("polynomial-slow epsilon must be finite".into()),
            ),
            _ => Ok(()),
        }
    }

    /// True when the family has a constant potential (Ā̇ = 0 everywhere).
    pub fn is_constant(&self) -> bool {
        match self {
            Self::Constant { .. } => true,
            Self::PolynomialSlow { epsilon, .. } => *epsilon == 0.0,
            Self::PlaneWave { amplitude, .. } => amplitude.iter().all(|a| *a == 0.0),
            Self::DistantCharge { charge, .. } => *charge == 0.0,
        }
    }

    /// Returns a copy with the slow-variation parameter replaced (only the
    /// polynomial family has one).
    pub fn with_epsilon(&self, eps: f64) -> Self {
        match self {
            Self::PolynomialSlow {
                amplitude,
                wavevector,
                ..
            } => Self::PolynomialSlow {
                amplitude: *amplitude,
                wavevector: *wavevector,
                epsilon: eps,
            },
            other => other.clone(),
        }
    }

    pub fn potential_components(&self, x: &[f64; 4]) -> [f64; 4] {
        match self {
            Self::Constant { potential } => *potential,
            Self::PolynomialSlow {
                amplitude,
                wavevector: k,
                epsilon,
            } => {
                let s = k[0] * x[0] - k[1] * x[1] - k[2] * x[2] - k[3] * x[3];
                amplitude.map(|a| a * (1.0 + epsilon * s))
            }
            Self::PlaneWave {
                amplitude,
                wavevector: k,
                phase,
            } => {
                let omega = dot(k, k).sqrt();
                let theta = omega * x[0] - k[0] * x[1] - k[1] * x[2] - k[2] * x[3] + phase;
                let c = theta.cos();
                [0.0, amplitude[0] * c, amplitude[1] * c, amplitude[2] * c]
            }
            Self::DistantCharge { charge, position } => {
                let d = [x[1] - position[0], x[2] - position[1], x[3] - position[2]];
                [charge / dot(&d, &d).sqrt(), 0.0, 0.0, 0.0]
            }
        }
    }

    /// `grad[μ][ν] = ∂A^ν/∂x^μ` with x^μ = (t, x, y, z).
    pub fn gradient_components(&self, x: &[f64; 4]) -> [[f64; 4]; 4] {
        match self {
            Self::Constant { .. } => [[0.0; 4]; 4],
            Self::PolynomialSlow {
                amplitude,
                wavevector: k,
                epsilon,
            } => {
                let ds = [k[0], -k[1], -k[2], -k[3]];
                ds.map(|d| amplitude.map(|a| a * epsilon * d))
            }
            Self::PlaneWave {
                amplitude,
                wavevector: k,
                phase,
            } => {
                let omega = dot(k, k).sqrt();
                let theta = omega * x[0] - k[0] * x[1] - k[1] * x[2] - k[2] * x[3] + phase;
                let s = -theta.sin();
                let dtheta = [omega, -k[0], -k[1], -k[2]];
                dtheta.map(|d| {
                    [
                        0.0,
                        amplitude[0] * s * d,
                        amplitude[1] * s * d,
                        amplitude[2] * s * d,
                    ]
                })
            }
            Self::DistantCharge { charge, position } => {
                let d = [x[1] - position[0], x[2] - position[1], x[3] - position[2]];
                let r = dot(&d, &d).sqrt();
                let r3 = r * r * r;
                [
                    [0.0; 4],
                    [-charge * d[0] / r3, 0.0, 0.0, 0.0],
                    [-charge * d[1] / r3, 0.0, 0.0, 0.0],
                    [-charge * d[2] / r3, 0.0, 0.0, 0.0],
                ]
            }
        }
    }

    pub fn potential(&self, x: &FourVector) -> FourVector {
        FourVector::from_components(self.potential_components(&x.components()))
    }

    /// B_e = E⃗ + i·H⃗ with E⃗ = -∇φ - ∂_t A⃗ and H⃗ = ∇×A⃗, from the analytic
    /// gradient.
    pub fn field(&self, x: &FourVector) -> SixVector {
        let g = self.gradient_components(&x.components());
        let e = [-g[1][0] - g[0][1], -g[2][0] - g[0][2], -g[3][0] - g[0][3]];
        let h = [g[2][3] - g[3][2], g[3][1] - g[1][3], g[1][2] - g[2][1]];
        Biquaternion::field(e, h)
    }

    /// Directional derivative U^μ ∂_μ A along a 4-velocity: the proper-time
    /// rate of the potential seen by the particle.
    pub fn rate_along(&self, x: &FourVector, u: &[f64; 4]) -> FourVector {
        let g = self.gradient_components(&x.components());
        let mut out = [0.0; 4];
        for (mu, row) in g.iter().enumerate() {
            for nu in 0..4 {
                out[nu] += u[mu] * row[nu];
            }
        }
        FourVector::from_components(out)
    }
}

/// Central-difference partial derivative ∂f/∂x^μ at `x`.
pub fn partial<F>(f: &F, x: &FourVector, mu: usize, h: f64) -> Result<Biquaternion>
where
    F: Fn(&FourVector) -> Result<Biquaternion>,
{
    let mut c = x.components();
    c[mu] += h;
    let plus = f(&FourVector::from_components(c))?;
    c[mu] -= 2.0 * h;
    let minus = f(&FourVector::from_components(c))?;
    Ok((plus - minus).scale_real(0.5 / h))
}

/// Quaternion weights of the gradient operator: ∇ = Σ_μ E^μ ∂_μ with
/// E⁰ = -i and E^k = e_k.
pub fn gradient_basis() -> [Biquaternion; 4] {
    [
        Biquaternion::scalar(Complex64::new(0.0, -1.0)),
        Biquaternion::unit(0),
        Biquaternion::unit(1),
        Biquaternion::unit(2),
    ]
}

/// ∇̄A by central differences (scalar part included).
pub fn numerical_conj_gradient<F>(potential: &F, x: &FourVector, h: f64) -> Result<Biquaternion>
where
    F: Fn(&FourVector) -> Result<Biquaternion>,
{
    let basis = gradient_basis();
    let mut acc = Biquaternion::ZERO;
    for mu in 0..4 {
        acc += basis[mu].conj() * partial(potential, x, mu, h)?;
    }
    Ok(acc)
}

/// B = ∇̄ ⊙ A evaluated by central differences of the potential.
pub fn numerical_field<F>(potential: &F, x: &FourVector, h: f64) -> Result<SixVector>
where
    F: Fn(&FourVector) -> Result<Biquaternion>,
{
    Ok(numerical_conj_gradient(potential, x, h)?.vector_part())
}

/// ∇B by central differences.
pub fn numerical_divergence<F>(field: &F, x: &FourVector, h: f64) -> Result<Biquaternion>
where
    F: Fn(&FourVector) -> Result<SixVector>,
{
    let basis = gradient_basis();
    let mut acc = Biquaternion::ZERO;
    for mu in 0..4 {
        acc += basis[mu] * partial(field, x, mu, h)?;
    }
    Ok(acc)
}

/// Largest |∇B| over the sample points, with derivatives taken by central
/// differences of step `h`. Zero analytically wherever B is regular.
pub fn check_regularity<F>(field: F, samples: &[FourVector], h: f64) -> Result<f64>
where
    F: Fn(&FourVector) -> Result<SixVector>,
{
    let mut worst = 0.0f64;
    for x in samples {
        worst = worst.max(numerical_divergence(&field, x, h)?.norm());
    }
    Ok(worst)
}
