//! Assembly of the action terms: self term (mass), interaction with an
//! external field, slow-variation ratios and the mass assignment.
//!
//! Surface terms use `Re(1/8π)` for the self term and `Re(1/4π)` for the
//! cross term. All "analytic" references along the worldline are
//! τ-quadratures of closed-form integrands.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::biquat::FourVector;
use crate::error::{Error, Result};
use crate::hypersurface::{
    sphere_direction, surface_integral, ConeEnd, ProperRegion, QuadratureScheme, SurfacePatch,
};
use crate::kinematics::Worldline;
use crate::lwfield::{ExternalField, SingularityField};
use crate::quadrature::{
    gauss_legendre, gauss_legendre_on, integrate, pairwise_sum, AdaptiveOptions,
};
use crate::regint::{hadamard_finite_part, self_energy_integrand};

pub const SELF_PREFACTOR: f64 = 1.0 / (8.0 * PI);
pub const CROSS_PREFACTOR: f64 = 1.0 / (4.0 * PI);

/// Default bound on slow-variation ratios.
pub const DEFAULT_THRESHOLD: f64 = 0.01;

/// Tube radius, inner cone cutoff and proper-time span.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TubeGeometry {
    pub xi1: f64,
    pub xi2: f64,
    pub tau1: f64,
    pub tau2: f64,
}

impl TubeGeometry {
    pub fn new(xi1: f64, xi2: f64, tau1: f64, tau2: f64) -> Result<Self> {
        if !(xi1 >= 0.0 && xi1 <= xi2 && xi2 > 0.0 && xi2.is_finite()) {
            return Err(Error::InvalidInterval {
                lo: xi1,
                hi: xi2,
                reason: "need 0 <= xi1 <= xi2 < inf and xi2 > 0".into(),
            });
        }
        if !(tau1 <= tau2) || !tau1.is_finite() || !tau2.is_finite() {
            return Err(Error::InvalidInterval {
                lo: tau1,
                hi: tau2,
                reason: "need finite tau1 <= tau2".into(),
            });
        }
        Ok(TubeGeometry {
            xi1,
            xi2,
            tau1,
            tau2,
        })
    }

    pub fn duration(&self) -> f64 {
        self.tau2 - self.tau1
    }

    pub fn with_xi1(self, xi1: f64) -> Result<Self> {
        Self::new(xi1, self.xi2, self.tau1, self.tau2)
    }

    /// Checks that every point of the tube and caps has a retarded point
    /// inside the worldline's domain.
    pub fn check_coverage(&self, worldline: &Worldline) -> Result<()> {
        let (lo, hi) = worldline.domain();
        if self.tau1 < lo || self.tau2 > hi {
            return Err(Error::InvalidInterval {
                lo: self.tau1,
                hi: self.tau2,
                reason: format!("tube span leaves the worldline domain [{lo}, {hi}]"),
            });
        }
        Ok(())
    }
}

/// A numeric value with its quadrature error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn new(value: f64, error: f64) -> Self {
        Estimate { value, error }
    }

    fn scaled(self, k: f64) -> Self {
        Estimate::new(self.value * k, self.error * k.abs())
    }
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, rhs: Estimate) -> Estimate {
        Estimate::new(self.value + rhs.value, self.error + rhs.error)
    }
}

impl std::ops::Sub for Estimate {
    type Output = Estimate;
    fn sub(self, rhs: Estimate) -> Estimate {
        Estimate::new(self.value - rhs.value, self.error + rhs.error)
    }
}

/// A numeric term next to its closed-form reference.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub numeric: Estimate,
    pub analytic: f64,
}

impl Term {
    pub fn abs_error(&self) -> f64 {
        (self.numeric.value - self.analytic).abs()
    }

    pub fn rel_error(&self) -> f64 {
        let d = self.abs_error();
        if self.analytic != 0.0 {
            d / self.analytic.abs()
        } else {
            d
        }
    }
}

fn real_part(v: Complex64, err: f64, prefactor: f64) -> Estimate {
    Estimate::new(v.re * prefactor, err * prefactor)
}

/// ∫_{τ₁}^{τ₂} f(τ) dτ.
fn along<F>(f: F, tau1: f64, tau2: f64) -> Result<Estimate>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let opts = AdaptiveOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-13,
        ..Default::default()
    };
    let r = integrate(|t| Ok(Complex64::new(f(t)?, 0.0)), tau1, tau2, &opts)?;
    Ok(Estimate::new(r.value.re, r.error))
}

/// Re(1/8π)·∮ Ā_i d³Σ B_i over one patch.
fn self_surface(
    field: &SingularityField,
    patch: &SurfacePatch,
    scheme: &QuadratureScheme,
) -> Result<Estimate> {
    let r = surface_integral(patch, |x| field.potential(x), |x| field.field(x), scheme)?;
    Ok(real_part(r.value, r.error, SELF_PREFACTOR))
}

/// Re(1/4π)·∮ Ā_e d³Σ B_i over one patch.
fn cross_surface(
    field: &SingularityField,
    external: &ExternalField,
    patch: &SurfacePatch,
    scheme: &QuadratureScheme,
) -> Result<Estimate> {
    let r = surface_integral(
        patch,
        |x| Ok(external.potential(x)),
        |x| field.field(x),
        scheme,
    )?;
    Ok(real_part(r.value, r.error, CROSS_PREFACTOR))
}

/// Self-term on the tube alone, with reference −e²Δτ/(2ξ₂).
pub fn tube_self_term(
    worldline: &Worldline,
    charge: f64,
    geom: &TubeGeometry,
    scheme: &QuadratureScheme,
) -> Result<Term> {
    let field = SingularityField::new(charge, worldline);
    let tube = SurfacePatch::tube(worldline, geom.xi2, geom.tau1, geom.tau2)?;
    Ok(Term {
        numeric: self_surface(&field, &tube, scheme)?,
        analytic: -charge * charge * geom.duration() / (2.0 * geom.xi2),
    })
}

/// Self-term values of the two caps on ξ ∈ [ξ₁, ξ₂].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConeSelfTerms {
    /// Cap at τ₁, counted with the sign it carries in the difference.
    pub cone1: Estimate,
    pub cone2: Estimate,
    /// cone2 − cone1, i.e. the signed contribution of both caps to the
    /// closed surface.
    pub difference: Estimate,
    /// e²·ln(ξ₂/ξ₁).
    pub full_log: f64,
    /// (e²/2)·ln(ξ₂/ξ₁), the value the surface element produces.
    pub half_log: f64,
}

pub fn cone_self_cancellation(
    worldline: &Worldline,
    charge: f64,
    geom: &TubeGeometry,
    scheme: &QuadratureScheme,
) -> Result<ConeSelfTerms> {
    if !(geom.xi1 > 0.0) {
        return Err(Error::InvalidInterval {
            lo: geom.xi1,
            hi: geom.xi2,
            reason: "cone self terms need xi1 > 0".into(),
        });
    }
    let field = SingularityField::new(charge, worldline);
    let start = SurfacePatch::cone(worldline, geom.tau1, geom.xi1, geom.xi2, ConeEnd::Start)?;
    let end = SurfacePatch::cone(worldline, geom.tau2, geom.xi1, geom.xi2, ConeEnd::End)?;
    let (s, e) = rayon::join(
        || self_surface(&field, &start, scheme),
        || self_surface(&field, &end, scheme),
    );
    let cone1 = s?.scaled(-1.0);
    let cone2 = e?;
    let log = (geom.xi2 / geom.xi1).ln();
    Ok(ConeSelfTerms {
        cone1,
        cone2,
        difference: cone2 - cone1,
        full_log: charge * charge * log,
        half_log: 0.5 * charge * charge * log,
    })
}

/// Self term of the closed tube-plus-caps surface, reference −e²Δτ/(2ξ₂).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MassTerm {
    pub total: Term,
    pub tube: Estimate,
    pub cones: ConeSelfTerms,
}

pub fn mass_term(
    worldline: &Worldline,
    charge: f64,
    geom: &TubeGeometry,
    scheme: &QuadratureScheme,
) -> Result<MassTerm> {
    geom.check_coverage(worldline)?;
    let (tube, cones) = rayon::join(
        || tube_self_term(worldline, charge, geom, scheme),
        || cone_self_cancellation(worldline, charge, geom, scheme),
    );
    let tube = tube?;
    let cones = cones?;
    Ok(MassTerm {
        total: Term {
            numeric: tube.numeric + cones.difference,
            analytic: tube.analytic,
        },
        tube: tube.numeric,
        cones,
    })
}

/// scal(Ā_e(Z)·U) at proper time τ.
fn coupling(external: &ExternalField, worldline: &Worldline, tau: f64) -> f64 {
    let a = external.potential(&worldline.position(tau));
    a.dot(&worldline.velocity(tau)).re
}

/// Cross term on the tube.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InteractionTube {
    /// Reference −e∫ scal(Ā_e(U + ξ₂U̇)) dτ.
    pub term: Term,
    /// −e∫ scal(Ā_e U) dτ, the same without the acceleration correction.
    pub without_acceleration: f64,
}

pub fn interaction_tube(
    worldline: &Worldline,
    charge: f64,
    external: &ExternalField,
    geom: &TubeGeometry,
    scheme: &QuadratureScheme,
) -> Result<InteractionTube> {
    let field = SingularityField::new(charge, worldline);
    let tube = SurfacePatch::tube(worldline, geom.xi2, geom.tau1, geom.tau2)?;
    let numeric = cross_surface(&field, external, &tube, scheme)?;
    let with_acc = along(
        |t| {
            let a = external.potential(&worldline.position(t));
            let v = worldline.velocity(t) + worldline.acceleration(t).scale_real(geom.xi2);
            Ok(-charge * a.dot(&v).re)
        },
        geom.tau1,
        geom.tau2,
    )?;
    let plain = along(
        |t| Ok(-charge * coupling(external, worldline, t)),
        geom.tau1,
        geom.tau2,
    )?;
    Ok(InteractionTube {
        term: Term {
            numeric,
            analytic: with_acc.value,
        },
        without_acceleration: plain.value,
    })
}

/// Cross term on both caps over ξ ∈ [ξ₁, ξ₂], reference
/// e(ξ₂ − ξ₁)·[scal(Ā_e U)] between τ₁ and τ₂.
pub fn interaction_cones(
    worldline: &Worldline,
    charge: f64,
    external: &ExternalField,
    geom: &TubeGeometry,
    scheme: &QuadratureScheme,
) -> Result<Term> {
    let field = SingularityField::new(charge, worldline);
    let start = SurfacePatch::cone(worldline, geom.tau1, geom.xi1, geom.xi2, ConeEnd::Start)?;
    let end = SurfacePatch::cone(worldline, geom.tau2, geom.xi1, geom.xi2, ConeEnd::End)?;
    let (s, e) = rayon::join(
        || cross_surface(&field, external, &start, scheme),
        || cross_surface(&field, external, &end, scheme),
    );
    let analytic = charge
        * (geom.xi2 - geom.xi1)
        * (coupling(external, worldline, geom.tau2) - coupling(external, worldline, geom.tau1));
    Ok(Term {
        numeric: s? + e?,
        analytic,
    })
}

/// Complete cross term with its two closed forms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InteractionTotal {
    /// Tube plus caps, caps taken down to their apex.
    pub numeric: Estimate,
    pub tube: InteractionTube,
    pub cones: Term,
    /// −e∫ scal((Ā_e − ξ₂Ā̇_e)U) dτ.
    pub by_parts: f64,
    /// −e∫ scal(Ā_e U) dτ.
    pub usual: f64,
}

impl InteractionTotal {
    /// |by_parts − usual|.
    pub fn correction(&self) -> f64 {
        (self.by_parts - self.usual).abs()
    }
}

/// Closed form −e∫ scal((Ā_e − ξ₂Ā̇_e)U) dτ with Ā̇_e by chain rule.
pub fn integrated_by_parts(
    worldline: &Worldline,
    charge: f64,
    external: &ExternalField,
    geom: &TubeGeometry,
) -> Result<f64> {
    Ok(along(
        |t| {
            let x = worldline.position(t);
            let u = worldline.velocity(t);
            let rate = external.rate_along(&x, &worldline.velocity_components(t));
            let a = external.potential(&x) - rate.scale_real(geom.xi2);
            Ok(-charge * a.dot(&u).re)
        },
        geom.tau1,
        geom.tau2,
    )?
    .value)
}

/// Tube plus caps (ξ₁ = 0) against the integrated-by-parts closed form and
/// the usual coupling. With `threshold` set, slow-variation ratios above it
/// are a [`Error::ConditionViolated`].
pub fn interaction_total(
    worldline: &Worldline,
    charge: f64,
    external: &ExternalField,
    geom: &TubeGeometry,
    scheme: &QuadratureScheme,
    threshold: Option<f64>,
) -> Result<InteractionTotal> {
    geom.check_coverage(worldline)?;
    if let Some(limit) = threshold {
        slow_variation_ratios(external, worldline, geom, 0.0)?.check(limit)?;
    }
    let full = geom.with_xi1(0.0)?;
    let (tube, cones) = rayon::join(
        || interaction_tube(worldline, charge, external, &full, scheme),
        || interaction_cones(worldline, charge, external, &full, scheme),
    );
    let tube = tube?;
    let cones = cones?;
    let by_parts = integrated_by_parts(worldline, charge, external, geom)?;
    Ok(InteractionTotal {
        numeric: tube.term.numeric + cones.numeric,
        tube,
        cones,
        by_parts,
        usual: tube.without_acceleration,
    })
}

/// Re(1/4π)∫ scal(B̄_e B_i) d⁴x over the region enclosed by the tube and
/// caps. The closed-surface cross term equals the usual coupling plus this
/// volume term, so it measures what the slow-variation conditions neglect.
pub fn interaction_interior(
    worldline: &Worldline,
    charge: f64,
    external: &ExternalField,
    geom: &TubeGeometry,
    scheme: &QuadratureScheme,
) -> Result<Estimate> {
    let field = SingularityField::new(charge, worldline);
    let region = ProperRegion {
        worldline,
        xi2: geom.xi2,
        tau1: geom.tau1,
        tau2: geom.tau2,
    };
    let r = region.volume_integral(
        |x| {
            let be = external.field(x);
            let bi = field.field(x)?;
            Ok((be.conj() * bi).scal())
        },
        scheme,
    )?;
    Ok(real_part(r.value, r.error, CROSS_PREFACTOR))
}

/// Slow-variation ratios per coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct SlowVariation {
    /// (coordinate, max over samples and components of ξ₂|∂A^c|/|A^c|),
    /// for τ (along U) and t, x, y, z.
    pub ratios: Vec<(&'static str, f64)>,
    /// Potential components skipped because |A^c| fell below the floor.
    pub excluded: Vec<usize>,
}

pub const SLOW_COORDINATES: [&str; 5] = ["tau", "t", "x", "y", "z"];

impl SlowVariation {
    pub fn max(&self) -> f64 {
        self.ratios.iter().map(|r| r.1).fold(0.0, f64::max)
    }

    pub fn check(&self, threshold: f64) -> Result<()> {
        for &(coordinate, ratio) in &self.ratios {
            if ratio > threshold {
                return Err(Error::ConditionViolated {
                    coordinate,
                    ratio,
                    threshold,
                });
            }
        }
        Ok(())
    }
}

/// Componentwise max of ξ₂|∂_n A_e^c| / |A_e^c| over sample points filling
/// the tube. Components with |A^c| ≤ `floor` at any sample are excluded.
pub fn slow_variation_ratios(
    external: &ExternalField,
    worldline: &Worldline,
    geom: &TubeGeometry,
    floor: f64,
) -> Result<SlowVariation> {
    let (taus, _) = gauss_legendre_on(5, geom.tau1, geom.tau2.max(geom.tau1 + 1e-12));
    let (mus, _) = gauss_legendre(4);
    let mut samples = Vec::new();
    for &tau in &taus {
        samples.push((tau, worldline.position_components(tau)));
        for xi in [0.5 * geom.xi2, geom.xi2] {
            for &mu in &mus {
                for j in 0..6 {
                    let (n, _, _) = sphere_direction(mu, PI * j as f64 / 3.0 + 0.3);
                    samples.push((tau, worldline.tube_point(tau, &n, xi).components()));
                }
            }
        }
    }
    let mut excluded = Vec::new();
    for &(_, x) in &samples {
        let a = external.potential_components(&x);
        for c in 0..4 {
            if a[c].abs() <= floor && !excluded.contains(&c) {
                excluded.push(c);
            }
        }
    }
    excluded.sort_unstable();
    let mut ratios = [0.0f64; 5];
    for &(tau, x) in &samples {
        let a = external.potential_components(&x);
        let g = external.gradient_components(&x);
        let u = worldline.velocity_components(tau);
        for c in (0..4).filter(|c| !excluded.contains(c)) {
            let along_u: f64 = (0..4).map(|m| u[m] * g[m][c]).sum();
            ratios[0] = ratios[0].max(geom.xi2 * along_u.abs() / a[c].abs());
            for m in 0..4 {
                ratios[m + 1] = ratios[m + 1].max(geom.xi2 * g[m][c].abs() / a[c].abs());
            }
        }
    }
    Ok(SlowVariation {
        ratios: SLOW_COORDINATES.iter().copied().zip(ratios).collect(),
        excluded,
    })
}

/// Gaussian-unit electron constants.
pub mod gaussian {
    /// Elementary charge, statcoulomb.
    pub const ELEMENTARY_CHARGE: f64 = 4.803_204_712_570_263e-10;
    /// Electron mass, gram.
    pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-28;
    /// Speed of light, cm/s.
    pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e10;
}

/// Mass from the self term, mc² = e²/(2ξ₂), and the resulting radius
/// r_e = e²/(mc²).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MassAssignment {
    pub mass: f64,
    pub rest_energy: f64,
    pub r_e: f64,
    pub xi2_over_re: f64,
}

pub fn assign_mass(charge: f64, xi2: f64, c: f64) -> Result<MassAssignment> {
    if !(xi2 > 0.0 && c > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "mass assignment needs xi2 > 0 and c > 0 (xi2 = {xi2}, c = {c})"
        )));
    }
    let rest_energy = charge * charge / (2.0 * xi2);
    let r_e = charge * charge / rest_energy;
    Ok(MassAssignment {
        mass: rest_energy / (c * c),
        rest_energy,
        r_e,
        xi2_over_re: xi2 / r_e,
    })
}

/// Classical electron radius e²/(m_e c²) in metres.
pub fn classical_electron_radius_m() -> f64 {
    use gaussian::*;
    ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (ELECTRON_MASS * SPEED_OF_LIGHT * SPEED_OF_LIGHT) * 1e-2
}

/// Axis-aligned spacetime box for the external field's own term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpacetimeBox {
    pub lo: [f64; 4],
    pub hi: [f64; 4],
}

/// (1/8π)∫ Re scal(B̄_e B_e) d⁴x = (1/8π)∫ (E² − H²) d⁴x by a Gauss–Legendre
/// product rule of the given order; the error is the change from
/// two-thirds order.
pub fn external_field_term(
    external: &ExternalField,
    region: &SpacetimeBox,
    order: usize,
) -> Estimate {
    let rule = |n: usize| -> f64 {
        let axes: Vec<(Vec<f64>, Vec<f64>)> = (0..4)
            .map(|k| gauss_legendre_on(n, region.lo[k], region.hi[k]))
            .collect();
        let mut terms = Vec::with_capacity(n.pow(4));
        for (t, wt) in axes[0].0.iter().zip(&axes[0].1) {
            for (x, wx) in axes[1].0.iter().zip(&axes[1].1) {
                for (y, wy) in axes[2].0.iter().zip(&axes[2].1) {
                    for (z, wz) in axes[3].0.iter().zip(&axes[3].1) {
                        let b = external.field(&FourVector::from_components([*t, *x, *y, *z]));
                        terms.push((b.conj() * b).scal().re * wt * wx * wy * wz);
                    }
                }
            }
        }
        pairwise_sum(&terms) / (8.0 * PI)
    };
    let fine = rule(order.max(2));
    let coarse = rule((2 * order / 3).max(1));
    Estimate::new(fine, (fine - coarse).abs())
}

/// Least-squares slope of ln y against ln x.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Everything needed for one report.
#[derive(Clone, Debug)]
pub struct ActionInputs<'w> {
    pub worldline: &'w Worldline,
    pub charge: f64,
    pub external: ExternalField,
    pub geometry: TubeGeometry,
    pub scheme: QuadratureScheme,
    pub threshold: f64,
    pub floor: f64,
    pub field_region: Option<SpacetimeBox>,
}

/// All terms of one scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionReport {
    pub mass_term: MassTerm,
    /// Rest-frame finite part per unit τ times Δτ; `None` off rest.
    pub hadamard_mass: Option<f64>,
    pub interaction: InteractionTotal,
    /// Caps on [ξ₁, ξ₂] alone.
    pub interaction_cones_cut: Term,
    pub condition_ratios: SlowVariation,
    pub assigned_mass: MassAssignment,
    pub external_field_term: Option<Estimate>,
}

impl ActionReport {
    pub fn compute(inputs: &ActionInputs) -> Result<ActionReport> {
        let w = inputs.worldline;
        let g = &inputs.geometry;
        let e = inputs.charge;
        inputs.external.validate()?;
        let ratios = slow_variation_ratios(&inputs.external, w, g, inputs.floor)?;
        ratios.check(inputs.threshold)?;
        let mass = mass_term(w, e, g, &inputs.scheme)?;
        let hadamard_mass = if w.is_at_rest() {
            Some(hadamard_finite_part(&self_energy_integrand(e, g.xi2))? * g.duration())
        } else {
            None
        };
        let interaction = interaction_total(w, e, &inputs.external, g, &inputs.scheme, None)?;
        let interaction_cones_cut = interaction_cones(w, e, &inputs.external, g, &inputs.scheme)?;
        Ok(ActionReport {
            mass_term: mass,
            hadamard_mass,
            interaction,
            interaction_cones_cut,
            condition_ratios: ratios,
            assigned_mass: assign_mass(e, g.xi2, 1.0)?,
            external_field_term: inputs
                .field_region
                .map(|r| external_field_term(&inputs.external, &r, 8)),
        })
    }
}
