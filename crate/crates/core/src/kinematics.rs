//! Worldlines parameterized by proper time, and the retarded-time solver.
//!
//! All built-in families are closed form; there is no interpolation
//! anywhere between a worldline and the fields computed from it.

use std::fmt;
use std::sync::Arc;

use crate::biquat::FourVector;
use crate::error::{Error, Result};

/// Default distance below which a field point counts as sitting on the
/// worldline.
pub const DEFAULT_EPSILON: f64 = 1e-9;

type Trajectory = Arc<dyn Fn(f64) -> [f64; 4] + Send + Sync>;

/// Analytic callbacks returning contravariant components `(t, x, y, z)` of
/// Z(τ), U(τ) and U̇(τ).
#[derive(Clone)]
pub struct CustomWorldline {
    pub position: Trajectory,
    pub velocity: Trajectory,
    pub acceleration: Trajectory,
}

impl CustomWorldline {
    pub fn new(
        position: impl Fn(f64) -> [f64; 4] + Send + Sync + 'static,
        velocity: impl Fn(f64) -> [f64; 4] + Send + Sync + 'static,
        acceleration: impl Fn(f64) -> [f64; 4] + Send + Sync + 'static,
    ) -> Self {
        CustomWorldline {
            position: Arc::new(position),
            velocity: Arc::new(velocity),
            acceleration: Arc::new(acceleration),
        }
    }
}

#[derive(Clone)]
pub enum WorldlineFamily {
    /// Charge at rest at `origin`; Z(0) = (0, origin).
    Rest {
        origin: [f64; 3],
    },
    /// Constant velocity β⃗ through `origin` at τ = 0.
    Uniform {
        beta: [f64; 3],
        origin: [f64; 3],
    },
    /// Constant proper acceleration along `direction`, at rest at the
    /// spatial origin when τ = 0.
    Hyperbolic {
        acceleration: f64,
        direction: [f64; 3],
    },
    /// Uniform circular motion in the xy-plane around the origin, with
    /// coordinate angular velocity `omega`; starts on the +x axis.
    Circular {
        radius: f64,
        omega: f64,
    },
    Custom(CustomWorldline),
}

impl fmt::Debug for WorldlineFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Rest { origin } => f.debug_struct("Rest").field("origin", origin).finish(),
            Self::Uniform { beta, origin } => f
                .debug_struct("Uniform")
                .field("beta", beta)
                .field("origin", origin)
                .finish(),
            Self::Hyperbolic {
                acceleration,
                direction,
            } => f
                .debug_struct("Hyperbolic")
                .field("acceleration", acceleration)
                .field("direction", direction)
                .finish(),
            Self::Circular { radius, omega } => f
                .debug_struct("Circular")
                .field("radius", radius)
                .field("omega", omega)
                .finish(),
            Self::Custom(_) => f.write_str("Custom"),
        }
    }
}

impl WorldlineFamily {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::Rest { .. } => "rest",
            Self::Uniform { .. } => "uniform",
            Self::Hyperbolic { .. } => "hyperbolic",
            Self::Circular { .. } => "circular",
            Self::Custom(_) => "custom-analytic",
        }
    }
}

/// A timelike worldline Z(τ) with its proper-time domain.
#[derive(Clone, Debug)]
pub struct Worldline {
    family: WorldlineFamily,
    tau_min: f64,
    tau_max: f64,
    epsilon: f64,
}

/// Retarded point of a field point X on a worldline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RetardedFrame {
    pub tau_r: f64,
    /// Retarded distance ξ = scal(Ū·(X − Z)).
    pub xi: f64,
    /// Unit vector from z⃗(τ_r) to x⃗.
    pub nhat: [f64; 3],
    /// Coordinate distance |x⃗ − z⃗(τ_r)|.
    pub distance: f64,
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn normalize(v: [f64; 3]) -> Result<[f64; 3]> {
    let n = dot3(&v, &v).sqrt();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "direction {v:?} cannot be normalized"
        )));
    }
    Ok(v.map(|c| c / n))
}

fn gamma_of(beta: &[f64; 3]) -> Result<f64> {
    let b2 = dot3(beta, beta);
    if !(b2 < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "speed |β| = {} must be below 1",
            b2.sqrt()
        )));
    }
    Ok(1.0 / (1.0 - b2).sqrt())
}

impl Worldline {
    pub fn new(family: WorldlineFamily) -> Result<Self> {
        let family = match family {
            WorldlineFamily::Uniform { beta, origin } => {
                gamma_of(&beta)?;
                WorldlineFamily::Uniform { beta, origin }
            }
            WorldlineFamily::Hyperbolic {
                acceleration,
                direction,
            } => {
                if !(acceleration > 0.0) || !acceleration.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "hyperbolic acceleration must be positive, got {acceleration}"
                    )));
                }
                WorldlineFamily::Hyperbolic {
                    acceleration,
                    direction: normalize(direction)?,
                }
            }
            WorldlineFamily::Circular { radius, omega } => {
                if !(radius > 0.0) || !((radius * omega).abs() < 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "circular orbit needs radius > 0 and speed below 1 (r = {radius}, ω = {omega})"
                    )));
                }
                WorldlineFamily::Circular { radius, omega }
            }
            other => other,
        };
        Ok(Worldline {
            family,
            tau_min: f64::NEG_INFINITY,
            tau_max: f64::INFINITY,
            epsilon: DEFAULT_EPSILON,
        })
    }

    pub fn rest() -> Self {
        Self::new(WorldlineFamily::Rest { origin: [0.0; 3] }).expect("rest worldline")
    }

    pub fn uniform(beta: [f64; 3]) -> Result<Self> {
        Self::new(WorldlineFamily::Uniform {
            beta,
            origin: [0.0; 3],
        })
    }

    pub fn hyperbolic(acceleration: f64, direction: [f64; 3]) -> Result<Self> {
        Self::new(WorldlineFamily::Hyperbolic {
            acceleration,
            direction,
        })
    }

    pub fn circular(radius: f64, omega: f64) -> Result<Self> {
        Self::new(WorldlineFamily::Circular { radius, omega })
    }

    pub fn custom(c: CustomWorldline) -> Self {
        Self::new(WorldlineFamily::Custom(c)).expect("custom worldline")
    }

    /// Restricts the proper-time domain; retarded solves landing outside
    /// it fail with [`Error::NoRetardedPoint`].
    pub fn with_domain(mut self, tau_min: f64, tau_max: f64) -> Result<Self> {
        if !(tau_min < tau_max) {
            return Err(Error::InvalidInterval {
                lo: tau_min,
                hi: tau_max,
                reason: "proper-time domain must be non-empty".into(),
            });
        }
        self.tau_min = tau_min;
        self.tau_max = tau_max;
        Ok(self)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "degenerate-point epsilon must be positive, got {epsilon}"
            )));
        }
        self.epsilon = epsilon;
        Ok(self)
    }

    pub fn family(&self) -> &WorldlineFamily {
        &self.family
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.tau_min, self.tau_max)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn is_at_rest(&self) -> bool {
        matches!(self.family, WorldlineFamily::Rest { .. })
    }

    /// Z(τ) as contravariant components.
    pub fn position_components(&self, tau: f64) -> [f64; 4] {
        match &self.family {
            WorldlineFamily::Rest { origin } => [tau, origin[0], origin[1], origin[2]],
            WorldlineFamily::Uniform { beta, origin } => {
                let g = gamma_of(beta).expect("validated");
                [
                    g * tau,
                    origin[0] + g * beta[0] * tau,
                    origin[1] + g * beta[1] * tau,
                    origin[2] + g * beta[2] * tau,
                ]
            }
            WorldlineFamily::Hyperbolic {
                acceleration: a,
                direction: d,
            } => {
                let s = (a * tau).sinh() / a;
                // cosh(aτ) - 1 without cancellation
                let c = 2.0 * (0.5 * a * tau).sinh().powi(2) / a;
                [s, c * d[0], c * d[1], c * d[2]]
            }
            WorldlineFamily::Circular { radius, omega } => {
                let g = 1.0 / (1.0 - (radius * omega).powi(2)).sqrt();
                let phase = omega * g * tau;
                [g * tau, radius * phase.cos(), radius * phase.sin(), 0.0]
            }
            WorldlineFamily::Custom(c) => (c.position)(tau),
        }
    }

    /// U(τ) as contravariant components.
    pub fn velocity_components(&self, tau: f64) -> [f64; 4] {
        match &self.family {
            WorldlineFamily::Rest { .. } => [1.0, 0.0, 0.0, 0.0],
            WorldlineFamily::Uniform { beta, .. } => {
                let g = gamma_of(beta).expect("validated");
                [g, g * beta[0], g * beta[1], g * beta[2]]
            }
            WorldlineFamily::Hyperbolic {
                acceleration: a,
                direction: d,
            } => {
                let (sh, ch) = ((a * tau).sinh(), (a * tau).cosh());
                [ch, sh * d[0], sh * d[1], sh * d[2]]
            }
            WorldlineFamily::Circular { radius, omega } => {
                let v = radius * omega;
                let g = 1.0 / (1.0 - v * v).sqrt();
                let phase = omega * g * tau;
                [g, -g * v * phase.sin(), g * v * phase.cos(), 0.0]
            }
            WorldlineFamily::Custom(c) => (c.velocity)(tau),
        }
    }

    /// U̇(τ) = dU/dτ as contravariant components.
    pub fn acceleration_components(&self, tau: f64) -> [f64; 4] {
        match &self.family {
            WorldlineFamily::Rest { .. } | WorldlineFamily::Uniform { .. } => [0.0; 4],
            WorldlineFamily::Hyperbolic {
                acceleration: a,
                direction: d,
            } => {
                let (sh, ch) = ((a * tau).sinh(), (a * tau).cosh());
                [a * sh, a * ch * d[0], a * ch * d[1], a * ch * d[2]]
            }
            WorldlineFamily::Circular { radius, omega } => {
                let v = radius * omega;
                let g2 = 1.0 / (1.0 - v * v);
                let phase = omega * g2.sqrt() * tau;
                let k = -g2 * v * omega;
                [0.0, k * phase.cos(), k * phase.sin(), 0.0]
            }
            WorldlineFamily::Custom(c) => (c.acceleration)(tau),
        }
    }

    pub fn position(&self, tau: f64) -> FourVector {
        FourVector::from_components(self.position_components(tau))
    }

    pub fn velocity(&self, tau: f64) -> FourVector {
        FourVector::from_components(self.velocity_components(tau))
    }

    pub fn acceleration(&self, tau: f64) -> FourVector {
        FourVector::from_components(self.acceleration_components(tau))
    }

    /// Lorentz factor γ(τ) = U⁰.
    pub fn gamma(&self, tau: f64) -> f64 {
        self.velocity_components(tau)[0]
    }

    /// Solves for the retarded proper time of the field point `x`.
    ///
    /// The root is taken on h(τ) = t - z⁰(τ) - |x⃗ - z⃗(τ)|, the causal branch
    /// of the null condition. h is strictly decreasing, so after bracketing
    /// a safeguarded Newton iteration converges from any start.
    pub fn retarded_solve(&self, x: &FourVector) -> Result<RetardedFrame> {
        self.retarded_solve_components(x.components())
    }

    pub fn retarded_solve_components(&self, x: [f64; 4]) -> Result<RetardedFrame> {
        let no_root = || Error::NoRetardedPoint { point: x };
        if !x.iter().all(|c| c.is_finite()) {
            return Err(no_root());
        }
        let spatial = |tau: f64| -> ([f64; 3], f64, f64) {
            let z = self.position_components(tau);
            let d = [x[1] - z[1], x[2] - z[2], x[3] - z[3]];
            let r = dot3(&d, &d).sqrt();
            (d, r, x[0] - z[0] - r)
        };

        // Upper bracket: any τ with z⁰(τ) ≥ t has h ≤ 0, and dz⁰/dτ ≥ 1.
        let mut hi = 0.0f64.clamp(self.tau_min, self.tau_max);
        for _ in 0..64 {
            let gap = x[0] - self.position_components(hi)[0];
            if gap <= 0.0 {
                break;
            }
            hi += gap.max(1e-12 * hi.abs().max(1.0));
        }
        if hi > self.tau_max {
            return Err(no_root());
        }
        let (_, r_hi, h_hi) = spatial(hi);
        if h_hi > 0.0 {
            return Err(no_root());
        }
        if h_hi == 0.0 && r_hi < self.epsilon {
            return Err(Error::DegeneratePoint {
                point: x,
                epsilon: self.epsilon,
            });
        }

        // Lower bracket by geometric expansion from a small step; a large
        // first jump can land where z⁰ and |x⃗ - z⃗| cancel catastrophically.
        let mut step = 1e-3 * hi.abs().max(1.0);
        // Beyond this time lag h(τ) is dominated by rounding.
        let reach = 1e10 * x.iter().fold(1.0f64, |m, c| m.max(c.abs()));
        let mut lo = hi - step;
        let mut h_lo = spatial(lo).2;
        let mut expansions = 0;
        while !(h_lo > 0.0) {
            expansions += 1;
            let lag = x[0] - self.position_components(lo)[0];
            if expansions > 200 || lo < self.tau_min || !h_lo.is_finite() || lag > reach {
                return Err(no_root());
            }
            step *= 2.0;
            lo = hi - step;
            h_lo = spatial(lo).2;
        }
        if lo < self.tau_min {
            return Err(no_root());
        }

        // Safeguarded Newton on [lo, hi] with h(lo) > 0 ≥ h(hi).
        let mut tau = 0.5 * (lo + hi);
        for _ in 0..300 {
            let (d, r, h) = spatial(tau);
            if h > 0.0 {
                lo = tau;
            } else {
                hi = tau;
            }
            let u = self.velocity_components(tau);
            let dh = if r > 0.0 {
                -u[0] + (u[1] * d[0] + u[2] * d[1] + u[3] * d[2]) / r
            } else {
                -u[0]
            };
            let newton = tau - h / dh;
            let next = if dh < 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            let delta = (next - tau).abs();
            tau = next;
            if delta <= 2.0 * f64::EPSILON * tau.abs().max(1.0)
                || hi - lo <= f64::EPSILON * tau.abs().max(1.0)
            {
                break;
            }
        }
        if tau < self.tau_min || tau > self.tau_max {
            return Err(no_root());
        }

        let (d, r, _) = spatial(tau);
        if r < self.epsilon {
            return Err(Error::DegeneratePoint {
                point: x,
                epsilon: self.epsilon,
            });
        }
        let nhat = d.map(|c| c / r);
        let u = self.velocity_components(tau);
        let xi = r * (u[0] - (u[1] * nhat[0] + u[2] * nhat[1] + u[3] * nhat[2]));
        Ok(RetardedFrame {
            tau_r: tau,
            xi,
            nhat,
            distance: r,
        })
    }

    /// Coordinate light-distance R at which the forward null ray from Z(τ)
    /// in lab direction `nhat` reaches retarded distance `xi`.
    pub fn light_distance(&self, tau: f64, nhat: &[f64; 3], xi: f64) -> f64 {
        let u = self.velocity_components(tau);
        xi / (u[0] - (u[1] * nhat[0] + u[2] * nhat[1] + u[3] * nhat[2]))
    }

    /// Point on the proper tube of retarded radius `xi2` at proper time `tau`
    /// in lab direction `nhat`: X = Z(τ) + R(1 - i·n̂).
    pub fn tube_point(&self, tau: f64, nhat: &[f64; 3], xi2: f64) -> FourVector {
        let z = self.position_components(tau);
        let r = self.light_distance(tau, nhat, xi2);
        FourVector::from_components([
            z[0] + r,
            z[1] + r * nhat[0],
            z[2] + r * nhat[1],
            z[3] + r * nhat[2],
        ])
    }

    /// Point on the forward light cone of Z(τ_end) at retarded radius `xi`.
    pub fn cone_point(&self, tau_end: f64, nhat: &[f64; 3], xi: f64) -> FourVector {
        self.tube_point(tau_end, nhat, xi)
    }
}
