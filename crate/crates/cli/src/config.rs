//! Scenario configuration: TOML text parsed into an all-optional raw form,
//! then validated into typed values with every problem reported by path.

use std::path::Path;

use serde::Deserialize;
use tubeaction_core::action::{SpacetimeBox, DEFAULT_THRESHOLD};
use tubeaction_core::{ExternalField, QuadratureScheme, TubeGeometry, Worldline, WorldlineFamily};

use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: Option<String>,
    charge: Option<f64>,
    worldline: Option<RawWorldline>,
    external: Option<RawExternal>,
    geometry: Option<RawGeometry>,
    quadrature: Option<RawQuadrature>,
    checks: Option<RawChecks>,
    field_region: Option<RawBox>,
    fault: Option<RawFault>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWorldline {
    family: Option<String>,
    origin: Option<[f64; 3]>,
    beta: Option<[f64; 3]>,
    acceleration: Option<f64>,
    direction: Option<[f64; 3]>,
    radius: Option<f64>,
    omega: Option<f64>,
    epsilon: Option<f64>,
    tau_min: Option<f64>,
    tau_max: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExternal {
    family: Option<String>,
    potential: Option<[f64; 4]>,
    amplitude: Option<Vec<f64>>,
    wavevector: Option<Vec<f64>>,
    epsilon: Option<f64>,
    epsilon_sweep: Option<Vec<f64>>,
    phase: Option<f64>,
    charge: Option<f64>,
    position: Option<[f64; 3]>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    xi1: Option<f64>,
    xi2: Option<f64>,
    tau1: Option<f64>,
    tau2: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuadrature {
    polar_order: Option<usize>,
    azimuth_order: Option<usize>,
    abs_tol: Option<f64>,
    rel_tol: Option<f64>,
    max_panels: Option<usize>,
    convergence_levels: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChecks {
    threshold: Option<f64>,
    floor: Option<f64>,
    error_multiple: Option<f64>,
    rel_tol: Option<f64>,
    gauss: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBox {
    lo: Option<[f64; 4]>,
    hi: Option<[f64; 4]>,
    order: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFault {
    flip_orientation: Option<String>,
}

/// Patch whose orientation sign the fault fixture inverts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlippedPatch {
    Tube,
    ConeStart,
    ConeEnd,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Checks {
    pub threshold: f64,
    pub floor: f64,
    pub error_multiple: f64,
    pub rel_tol: f64,
    pub gauss: bool,
}

impl Default for Checks {
    fn default() -> Self {
        Checks {
            threshold: DEFAULT_THRESHOLD,
            floor: 1e-12,
            error_multiple: 10.0,
            rel_tol: 1e-9,
            gauss: true,
        }
    }
}

/// A validated scenario.
#[derive(Clone, Debug)]
pub struct ScenarioConfig {
    pub name: String,
    pub charge: f64,
    pub worldline: Worldline,
    pub external: ExternalField,
    pub epsilon_sweep: Vec<f64>,
    pub geometry: TubeGeometry,
    pub scheme: QuadratureScheme,
    pub convergence_levels: Vec<f64>,
    pub checks: Checks,
    pub field_region: Option<(SpacetimeBox, usize)>,
    pub flipped: Option<FlippedPatch>,
}

/// Collects missing or invalid fields by dotted path.
#[derive(Default)]
struct Problems(Vec<String>);

impl Problems {
    fn missing(&mut self, path: &str) {
        self.0.push(format!("{path}: missing"));
    }

    fn invalid(&mut self, path: &str, why: impl std::fmt::Display) {
        self.0.push(format!("{path}: {why}"));
    }

    fn need<T: Clone>(&mut self, v: &Option<T>, path: &str) -> Option<T> {
        if v.is_none() {
            self.missing(path);
        }
        v.clone()
    }
}

fn triple(v: &Option<Vec<f64>>, path: &str, p: &mut Problems) -> Option<[f64; 3]> {
    let v = p.need(v, path)?;
    match <[f64; 3]>::try_from(v.as_slice()) {
        Ok(a) => Some(a),
        Err(_) => {
            p.invalid(path, format!("expected 3 components, got {}", v.len()));
            None
        }
    }
}

fn quad(v: &Option<Vec<f64>>, path: &str, p: &mut Problems) -> Option<[f64; 4]> {
    let v = p.need(v, path)?;
    match <[f64; 4]>::try_from(v.as_slice()) {
        Ok(a) => Some(a),
        Err(_) => {
            p.invalid(path, format!("expected 4 components, got {}", v.len()));
            None
        }
    }
}

fn worldline(raw: &Option<RawWorldline>, p: &mut Problems) -> Option<Worldline> {
    let Some(w) = raw else {
        p.missing("worldline.family");
        return None;
    };
    let family = p.need(&w.family, "worldline.family")?;
    let family = match family.as_str() {
        "rest" => WorldlineFamily::Rest {
            origin: w.origin.unwrap_or([0.0; 3]),
        },
        "uniform" => WorldlineFamily::Uniform {
            beta: p.need(&w.beta, "worldline.beta")?,
            origin: w.origin.unwrap_or([0.0; 3]),
        },
        "hyperbolic" => {
            let a = p.need(&w.acceleration, "worldline.acceleration");
            let d = p.need(&w.direction, "worldline.direction");
            WorldlineFamily::Hyperbolic {
                acceleration: a?,
                direction: d?,
            }
        }
        "circular" => {
            let r = p.need(&w.radius, "worldline.radius");
            let o = p.need(&w.omega, "worldline.omega");
            WorldlineFamily::Circular {
                radius: r?,
                omega: o?,
            }
        }
        other => {
            p.invalid(
                "worldline.family",
                format!("unknown family {other:?} (rest, uniform, hyperbolic, circular)"),
            );
            return None;
        }
    };
    let mut line = match Worldline::new(family) {
        Ok(l) => l,
        Err(e) => {
            p.invalid("worldline", e);
            return None;
        }
    };
    if let Some(eps) = w.epsilon {
        line = match line.with_epsilon(eps) {
            Ok(l) => l,
            Err(e) => {
                p.invalid("worldline.epsilon", e);
                return None;
            }
        };
    }
    if w.tau_min.is_some() || w.tau_max.is_some() {
        let lo = w.tau_min.unwrap_or(f64::NEG_INFINITY);
        let hi = w.tau_max.unwrap_or(f64::INFINITY);
        line = match line.with_domain(lo, hi) {
            Ok(l) => l,
            Err(e) => {
                p.invalid("worldline.tau_min", e);
                return None;
            }
        };
    }
    Some(line)
}

fn external(raw: &Option<RawExternal>, p: &mut Problems) -> Option<(ExternalField, Vec<f64>)> {
    let Some(x) = raw else {
        p.missing("external.family");
        return None;
    };
    let family = p.need(&x.family, "external.family")?;
    let field = match family.as_str() {
        "constant" => ExternalField::Constant {
            potential: p.need(&x.potential, "external.potential")?,
        },
        "polynomial-slow" => {
            let a = quad(&x.amplitude, "external.amplitude", p);
            let k = quad(&x.wavevector, "external.wavevector", p);
            let e = p.need(&x.epsilon, "external.epsilon");
            ExternalField::PolynomialSlow {
                amplitude: a?,
                wavevector: k?,
                epsilon: e?,
            }
        }
        "plane-wave" => {
            let a = triple(&x.amplitude, "external.amplitude", p);
            let k = triple(&x.wavevector, "external.wavevector", p);
            ExternalField::PlaneWave {
                amplitude: a?,
                wavevector: k?,
                phase: x.phase.unwrap_or(0.0),
            }
        }
        "distant-charge" => {
            let c = p.need(&x.charge, "external.charge");
            let r = p.need(&x.position, "external.position");
            ExternalField::DistantCharge {
                charge: c?,
                position: r?,
            }
        }
        other => {
            p.invalid(
                "external.family",
                format!(
                    "unknown family {other:?} (constant, polynomial-slow, plane-wave, distant-charge)"
                ),
            );
            return None;
        }
    };
    if let Err(e) = field.validate() {
        p.invalid("external", e);
        return None;
    }
    let sweep = x.epsilon_sweep.clone().unwrap_or_default();
    if !sweep.is_empty() {
        if !matches!(field, ExternalField::PolynomialSlow { .. }) {
            p.invalid(
                "external.epsilon_sweep",
                "only the polynomial-slow family has an epsilon",
            );
        } else if sweep.len() < 2 || sweep.iter().any(|e| !(*e > 0.0)) {
            p.invalid(
                "external.epsilon_sweep",
                "needs at least two positive values",
            );
        }
    }
    Some((field, sweep))
}

fn geometry(raw: &Option<RawGeometry>, p: &mut Problems) -> Option<TubeGeometry> {
    let g = raw.as_ref();
    let get = |f: fn(&RawGeometry) -> Option<f64>| g.and_then(f);
    let xi1 = p.need(&get(|g| g.xi1), "geometry.xi1");
    let xi2 = p.need(&get(|g| g.xi2), "geometry.xi2");
    let tau1 = p.need(&get(|g| g.tau1), "geometry.tau1");
    let tau2 = p.need(&get(|g| g.tau2), "geometry.tau2");
    let (xi1, xi2, tau1, tau2) = (xi1?, xi2?, tau1?, tau2?);
    if !(xi1 > 0.0 && xi1 < xi2) {
        p.invalid(
            "geometry.xi1",
            format!("need 0 < xi1 < xi2 (xi1 = {xi1}, xi2 = {xi2})"),
        );
        return None;
    }
    match TubeGeometry::new(xi1, xi2, tau1, tau2) {
        Ok(g) => Some(g),
        Err(e) => {
            p.invalid("geometry", e);
            None
        }
    }
}

fn scheme(raw: &Option<RawQuadrature>, p: &mut Problems) -> (QuadratureScheme, Vec<f64>) {
    let mut s = QuadratureScheme::default();
    let mut levels = vec![0.25, 0.5, 1.0];
    if let Some(q) = raw {
        if let Some(n) = q.polar_order {
            s.polar_order = n;
        }
        if let Some(n) = q.azimuth_order {
            s.azimuth_order = n;
        }
        if let Some(t) = q.abs_tol {
            s.adaptive.abs_tol = t;
        }
        if let Some(t) = q.rel_tol {
            s.adaptive.rel_tol = t;
        }
        if let Some(n) = q.max_panels {
            s.adaptive.max_panels = n;
        }
        if let Some(l) = &q.convergence_levels {
            levels = l.clone();
        }
    }
    if s.polar_order < 2 {
        p.invalid("quadrature.polar_order", "must be at least 2");
    }
    if s.azimuth_order < 3 {
        p.invalid("quadrature.azimuth_order", "must be at least 3");
    }
    if !(s.adaptive.abs_tol > 0.0 || s.adaptive.rel_tol > 0.0) {
        p.invalid(
            "quadrature.abs_tol",
            "abs_tol and rel_tol cannot both be zero",
        );
    }
    if levels.iter().any(|l| !(*l > 0.0)) {
        p.invalid("quadrature.convergence_levels", "levels must be positive");
    }
    (s, levels)
}

impl ScenarioConfig {
    pub fn from_toml(text: &str, fallback_name: &str) -> Result<Self, CliError> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| CliError::Config(vec![e.message().to_string()]))?;
        let mut p = Problems::default();
        let charge = p.need(&raw.charge, "charge");
        let worldline = worldline(&raw.worldline, &mut p);
        let external = external(&raw.external, &mut p);
        let geometry = geometry(&raw.geometry, &mut p);
        let (scheme, convergence_levels) = scheme(&raw.quadrature, &mut p);

        let mut checks = Checks::default();
        if let Some(c) = &raw.checks {
            checks.threshold = c.threshold.unwrap_or(checks.threshold);
            checks.floor = c.floor.unwrap_or(checks.floor);
            checks.error_multiple = c.error_multiple.unwrap_or(checks.error_multiple);
            checks.rel_tol = c.rel_tol.unwrap_or(checks.rel_tol);
            checks.gauss = c.gauss.unwrap_or(checks.gauss);
        }

        let field_region = raw.field_region.as_ref().and_then(|b| {
            let lo = p.need(&b.lo, "field_region.lo");
            let hi = p.need(&b.hi, "field_region.hi");
            let (lo, hi) = (lo?, hi?);
            if lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
                p.invalid("field_region", "need lo < hi in every coordinate");
                return None;
            }
            Some((SpacetimeBox { lo, hi }, b.order.unwrap_or(8)))
        });

        let flipped = match raw
            .fault
            .as_ref()
            .and_then(|f| f.flip_orientation.as_deref())
        {
            None => None,
            Some("tube") => Some(FlippedPatch::Tube),
            Some("cone-start") => Some(FlippedPatch::ConeStart),
            Some("cone-end") => Some(FlippedPatch::ConeEnd),
            Some(other) => {
                p.invalid("fault.flip_orientation", format!("unknown patch {other:?}"));
                None
            }
        };

        if let (Some(w), Some(g)) = (&worldline, &geometry) {
            if let Err(e) = g.check_coverage(w) {
                p.invalid("worldline.tau_min", e);
            }
            if !(g.xi2 > tubeaction_core::hypersurface::TUBE_GUARD_FACTOR * w.epsilon()) {
                p.invalid(
                    "geometry.xi2",
                    format!(
                        "tube radius must exceed {}× worldline.epsilon",
                        tubeaction_core::hypersurface::TUBE_GUARD_FACTOR
                    ),
                );
            }
        }

        if !p.0.is_empty() {
            return Err(CliError::Config(p.0));
        }
        let (external, epsilon_sweep) = external.expect("validated");
        Ok(ScenarioConfig {
            name: raw.name.unwrap_or_else(|| fallback_name.to_string()),
            charge: charge.expect("validated"),
            worldline: worldline.expect("validated"),
            external,
            epsilon_sweep,
            geometry: geometry.expect("validated"),
            scheme,
            convergence_levels,
            checks,
            field_region,
            flipped,
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "scenario".into());
        Self::from_toml(&text, &stem).map_err(|e| match e {
            CliError::Config(list) => CliError::Config(
                list.into_iter()
                    .map(|m| format!("{}: {m}", path.display()))
                    .collect(),
            ),
            other => other,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const REST: &str = r#"
        charge = 1.0
        [worldline]
        family = "rest"
        [external]
        family = "constant"
        potential = [1.0, 0.0, 0.0, 0.0]
        [geometry]
        xi1 = 0.01
        xi2 = 1.0
        tau1 = 0.0
        tau2 = 1.0
    "#;

    fn problems(text: &str) -> Vec<String> {
        match ScenarioConfig::from_toml(text, "x") {
            Err(CliError::Config(p)) => p,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_config_parses() {
        let c = ScenarioConfig::from_toml(REST, "rest").unwrap();
        assert_eq!(c.name, "rest");
        assert_eq!(c.geometry.xi2, 1.0);
        assert_eq!(c.scheme, QuadratureScheme::default());
        assert!(c.flipped.is_none());
    }

    #[test]
    fn empty_config_lists_every_missing_field() {
        let p = problems("");
        for path in [
            "charge",
            "worldline.family",
            "external.family",
            "geometry.xi1",
            "geometry.xi2",
            "geometry.tau1",
            "geometry.tau2",
        ] {
            assert!(p.iter().any(|m| m.starts_with(path)), "{path} not in {p:?}");
        }
    }

    #[test]
    fn family_parameters_reported_by_path() {
        let text = REST.replace("family = \"rest\"", "family = \"hyperbolic\"");
        let p = problems(&text);
        assert_eq!(
            p,
            vec![
                "worldline.acceleration: missing".to_string(),
                "worldline.direction: missing".to_string()
            ]
        );
    }

    #[test]
    fn ordering_and_guard_violations() {
        let p = problems(&REST.replace("xi1 = 0.01", "xi1 = 2.0"));
        assert!(p[0].starts_with("geometry.xi1"));
        let p = problems(
            &REST
                .replace("xi2 = 1.0", "xi2 = 1e-7")
                .replace("xi1 = 0.01", "xi1 = 1e-8"),
        );
        assert!(p.iter().any(|m| m.starts_with("geometry.xi2")), "{p:?}");
    }

    #[test]
    fn domain_must_cover_span() {
        let text = REST.replace("family = \"rest\"", "family = \"rest\"\ntau_min = 0.5");
        let p = problems(&text);
        assert!(p[0].starts_with("worldline.tau_min"), "{p:?}");
    }

    #[test]
    fn unknown_keys_rejected() {
        let p = problems(&format!("{REST}\nbogus = 1"));
        assert!(p[0].contains("bogus"), "{p:?}");
    }

    #[test]
    fn sweep_only_for_polynomial_family() {
        let text = REST.replace(
            "potential = [1.0, 0.0, 0.0, 0.0]",
            "potential = [1.0, 0.0, 0.0, 0.0]\nepsilon_sweep = [0.1, 0.01]",
        );
        let p = problems(&text);
        assert!(p[0].starts_with("external.epsilon_sweep"));
    }
}
