use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tubeaction_core::action::{
    classical_electron_radius_m, interaction_total, loglog_slope, mass_term, ActionInputs,
    ActionReport, SLOW_COORDINATES,
};
use tubeaction_core::hypersurface::{gauss_check, GaussCheck, ProperRegion};
use tubeaction_core::{ExternalField, QuadratureScheme};

use crate::config::{FlippedPatch, ScenarioConfig};
use crate::{full_precision, CliError};

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub mesh_scale: f64,
    pub quiet: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            out_dir: PathBuf::from("out"),
            mesh_scale: 1.0,
            quiet: false,
        }
    }
}

/// Whether a row counts towards the exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    Enforced,
    Diagnostic,
}

impl CheckKind {
    fn label(self) -> &'static str {
        match self {
            CheckKind::Enforced => "enforced",
            CheckKind::Diagnostic => "diagnostic",
        }
    }
}

#[derive(Clone, Debug)]
pub struct TermRow {
    pub term: String,
    pub numeric: f64,
    pub analytic: Option<f64>,
    pub error_estimate: f64,
    pub tolerance: f64,
    pub eq_tag: &'static str,
    pub criterion: &'static str,
    pub check: CheckKind,
    pub passed: bool,
}

impl TermRow {
    pub fn abs_error(&self) -> Option<f64> {
        self.analytic.map(|a| (self.numeric - a).abs())
    }

    pub fn failed_enforced(&self) -> bool {
        self.check == CheckKind::Enforced && !self.passed
    }
}

/// Row builder. The default pass rule is
/// |numeric − analytic| ≤ k·(error estimate) + rel_tol·max(|numeric|, |analytic|).
struct Rows<'c> {
    cfg: &'c ScenarioConfig,
    rows: Vec<TermRow>,
}

#[allow(clippy::too_many_arguments)]
impl<'c> Rows<'c> {
    fn compare(
        &mut self,
        term: &str,
        numeric: f64,
        analytic: f64,
        error: f64,
        eq_tag: &'static str,
        criterion: &'static str,
        check: CheckKind,
    ) {
        let c = &self.cfg.checks;
        let tolerance = c.error_multiple * error + c.rel_tol * numeric.abs().max(analytic.abs());
        self.push(
            term,
            numeric,
            Some(analytic),
            error,
            tolerance,
            eq_tag,
            criterion,
            check,
        );
    }

    fn compare_abs(
        &mut self,
        term: &str,
        numeric: f64,
        analytic: f64,
        error: f64,
        tolerance: f64,
        eq_tag: &'static str,
        criterion: &'static str,
    ) {
        self.push(
            term,
            numeric,
            Some(analytic),
            error,
            tolerance,
            eq_tag,
            criterion,
            CheckKind::Enforced,
        );
    }

    fn push(
        &mut self,
        term: &str,
        numeric: f64,
        analytic: Option<f64>,
        error: f64,
        tolerance: f64,
        eq_tag: &'static str,
        criterion: &'static str,
        check: CheckKind,
    ) {
        let passed = match analytic {
            Some(a) => (numeric - a).abs() <= tolerance,
            None => numeric <= tolerance,
        };
        self.rows.push(TermRow {
            term: term.to_string(),
            numeric,
            analytic,
            error_estimate: error,
            tolerance,
            eq_tag,
            criterion,
            check,
            passed,
        });
    }
}

#[derive(Clone, Debug, Serialize)]
struct ConvergenceRow {
    level: f64,
    polar_order: usize,
    azimuth_order: usize,
    quantity: &'static str,
    value: String,
    error: String,
    reference: String,
    abs_error: String,
}

#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub epsilon: f64,
    pub assembled: f64,
    pub usual: f64,
    pub difference: f64,
}

#[derive(Debug)]
pub struct ScenarioOutcome {
    pub name: String,
    pub report: ActionReport,
    pub rows: Vec<TermRow>,
    pub sweep: Vec<SweepPoint>,
    pub slope: Option<f64>,
    pub gauss: Option<GaussCheck>,
    pub files: Vec<PathBuf>,
}

impl ScenarioOutcome {
    pub fn passed(&self) -> bool {
        !self.rows.iter().any(TermRow::failed_enforced)
    }

    pub fn row(&self, term: &str) -> Option<&TermRow> {
        self.rows.iter().find(|r| r.term == term)
    }
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io {
        path: dir.display().to_string(),
        source: e,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(full_precision).unwrap_or_default()
}

/// Closed-surface check on the scenario's tube with a pair of plane waves,
/// so that the surface side is not identically zero.
fn gauss_on_tube(cfg: &ScenarioConfig, scheme: &QuadratureScheme) -> Result<GaussCheck, CliError> {
    let g = &cfg.geometry;
    let region = ProperRegion {
        worldline: &cfg.worldline,
        xi2: g.xi2,
        tau1: g.tau1,
        tau2: g.tau2,
    };
    let mut patches = region.boundary()?;
    if let Some(which) = cfg.flipped {
        let i = match which {
            FlippedPatch::Tube => 0,
            FlippedPatch::ConeStart => 1,
            FlippedPatch::ConeEnd => 2,
        };
        patches[i] = patches[i].with_orientation(-patches[i].orientation);
    }
    let s = 1.0 / g.xi2.max(g.tau2 - g.tau1).max(1.0);
    let a = ExternalField::PlaneWave {
        amplitude: [-0.3, 0.8, 0.5],
        wavevector: [0.8 * s, 0.3 * s, 0.0],
        phase: 0.4,
    };
    let b = ExternalField::PlaneWave {
        amplitude: [1.0, 0.0, 0.0],
        wavevector: [0.0, 0.5 * s, 0.9 * s],
        phase: -0.2,
    };
    Ok(gauss_check(
        |x| Ok(a.potential(x)),
        |x| Ok(b.field(x)),
        &region,
        &patches,
        scheme,
        1e-3 * g.xi2.min(1.0),
    )?)
}

/// Runs one scenario and writes `<name>_terms.csv`, `<name>_convergence.csv`
/// and, with an ε-sweep configured, `<name>_sweep.csv` into `opts.out_dir`.
pub fn run_scenario(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<ScenarioOutcome, CliError> {
    if !(opts.mesh_scale > 0.0 && opts.mesh_scale.is_finite()) {
        return Err(CliError::Config(vec![format!(
            "--mesh-scale: must be positive, got {}",
            opts.mesh_scale
        )]));
    }
    let scheme = cfg.scheme.scaled(opts.mesh_scale);
    let g = &cfg.geometry;
    let e = cfg.charge;
    let inputs = ActionInputs {
        worldline: &cfg.worldline,
        charge: e,
        external: cfg.external.clone(),
        geometry: *g,
        scheme,
        // the ratios become rows below rather than an early error
        threshold: f64::INFINITY,
        floor: cfg.checks.floor,
        field_region: None,
    };
    let mut report = ActionReport::compute(&inputs)?;
    if let Some((region, order)) = cfg.field_region {
        report.external_field_term = Some(tubeaction_core::action::external_field_term(
            &cfg.external,
            &region,
            order,
        ));
    }

    let mut rows = Rows {
        cfg,
        rows: Vec::new(),
    };
    use CheckKind::*;
    let mass = &report.mass_term;
    let mass_ref = mass.total.analytic;
    rows.compare(
        "mass_tube",
        mass.tube.value,
        mass_ref,
        mass.tube.error,
        "Eq.(12)",
        "1",
        Enforced,
    );
    let cones = &mass.cones;
    rows.compare(
        "cone_tau1",
        cones.cone1.value,
        cones.full_log,
        cones.cone1.error,
        "Eq.(13)",
        "3",
        Diagnostic,
    );
    rows.compare(
        "cone_tau2",
        cones.cone2.value,
        cones.full_log,
        cones.cone2.error,
        "Eq.(13)",
        "3",
        Diagnostic,
    );
    rows.compare_abs(
        "cone_difference",
        cones.difference.value,
        0.0,
        cones.difference.error,
        1e-10,
        "Eq.(13)",
        "3",
    );
    rows.compare(
        "mass_total",
        mass.total.numeric.value,
        mass_ref,
        mass.total.numeric.error,
        "Eq.(14)",
        "2",
        Enforced,
    );
    if let Some(h) = report.hadamard_mass {
        let tol = 1e-8 * mass_ref.abs();
        rows.compare_abs("hadamard_mass", h, mass_ref, 0.0, tol, "Eq.(10)", "4");
    }

    let constant = cfg.external.is_constant();
    let coupling = if constant { Enforced } else { Diagnostic };
    let it = &report.interaction;
    rows.compare(
        "interaction_tube",
        it.tube.term.numeric.value,
        it.tube.term.analytic,
        it.tube.term.numeric.error,
        "Eq.(17)",
        "6",
        coupling,
    );
    let cut = &report.interaction_cones_cut;
    rows.compare(
        "interaction_cones",
        cut.numeric.value,
        cut.analytic,
        cut.numeric.error,
        "Eq.(18)",
        "6",
        coupling,
    );
    rows.compare(
        "interaction_total",
        it.numeric.value,
        it.by_parts,
        it.numeric.error,
        "Eq.(19)",
        "6",
        coupling,
    );
    rows.compare(
        "interaction_usual",
        it.numeric.value,
        it.usual,
        it.numeric.error,
        "Eq.(20)",
        "6",
        coupling,
    );
    rows.push(
        "acceleration_correction",
        it.correction(),
        None,
        0.0,
        f64::INFINITY,
        "Eq.(19)",
        "6",
        Diagnostic,
    );

    for &(coordinate, ratio) in &report.condition_ratios.ratios {
        let tag = if coordinate == SLOW_COORDINATES[0] {
            "Eq.(16)"
        } else {
            "Eq.(25)"
        };
        rows.push(
            &format!("slow_ratio_{coordinate}"),
            ratio,
            None,
            0.0,
            cfg.checks.threshold,
            tag,
            "7",
            Enforced,
        );
    }

    let m = &report.assigned_mass;
    let xi2 = g.xi2;
    rows.compare_abs(
        "assigned_rest_energy",
        m.rest_energy,
        e * e / (2.0 * xi2),
        0.0,
        1e-15 * m.rest_energy.abs(),
        "Eq.(22)",
        "10",
    );
    rows.compare_abs(
        "xi2_over_re",
        m.xi2_over_re,
        0.5,
        0.0,
        1e-15,
        "Eq.(23)",
        "10",
    );
    let r_e = classical_electron_radius_m();
    // four significant figures by truncation
    let truncated = (r_e * 1e18).trunc() * 1e-18;
    rows.compare_abs(
        "r_e_metres",
        truncated,
        2.817e-15,
        0.0,
        1e-24,
        "Eq.(23)",
        "10",
    );

    if let Some(f) = report.external_field_term {
        let analytic = match cfg.external {
            ExternalField::Constant { .. } | ExternalField::PlaneWave { .. } => Some(0.0),
            _ => None,
        };
        match analytic {
            Some(a) => rows.compare(
                "external_field_term",
                f.value,
                a,
                f.error,
                "Eq.(5)",
                "-",
                Diagnostic,
            ),
            None => rows.push(
                "external_field_term",
                f.value,
                None,
                f.error,
                f64::INFINITY,
                "Eq.(5)",
                "-",
                Diagnostic,
            ),
        }
    }

    let gauss = if cfg.checks.gauss {
        let r = gauss_on_tube(cfg, &scheme.scaled(0.5))?;
        rows.compare_abs(
            "gauss_check",
            r.surface.value.re,
            r.volume.value.re,
            r.surface.error + r.volume.error,
            1e-6 * r.surface.value.norm().max(r.volume.value.norm()),
            "Eq.(11)",
            "8",
        );
        Some(r)
    } else {
        None
    };

    let mut sweep = Vec::new();
    for &eps in &cfg.epsilon_sweep {
        let field = cfg.external.with_epsilon(eps);
        let t = interaction_total(&cfg.worldline, e, &field, g, &scheme, None)?;
        sweep.push(SweepPoint {
            epsilon: eps,
            assembled: t.numeric.value,
            usual: t.usual,
            difference: (t.numeric.value - t.usual).abs(),
        });
    }
    let slope = (sweep.len() >= 2).then(|| {
        let pts: Vec<(f64, f64)> = sweep.iter().map(|p| (p.epsilon, p.difference)).collect();
        loglog_slope(&pts)
    });
    if let Some(s) = slope {
        rows.compare_abs("eps_slope", s, 1.0, 0.0, 0.1, "Eq.(15)", "7");
    }

    let mut convergence = Vec::new();
    for &level in &cfg.convergence_levels {
        let s = cfg.scheme.scaled(level * opts.mesh_scale);
        let m = mass_term(&cfg.worldline, e, g, &s)?;
        let t = interaction_total(&cfg.worldline, e, &cfg.external, g, &s, None)?;
        let mut push = |quantity, value: f64, error: f64, reference: f64| {
            convergence.push(ConvergenceRow {
                level,
                polar_order: s.polar_order,
                azimuth_order: s.azimuth_order,
                quantity,
                value: full_precision(value),
                error: full_precision(error),
                reference: full_precision(reference),
                abs_error: full_precision((value - reference).abs()),
            })
        };
        push(
            "mass_total",
            m.total.numeric.value,
            m.total.numeric.error,
            m.total.analytic,
        );
        push(
            "interaction_total",
            t.numeric.value,
            t.numeric.error,
            t.by_parts,
        );
    }

    create_dir(&opts.out_dir)?;
    let mut files = Vec::new();
    let terms_path = opts.out_dir.join(format!("{}_terms.csv", cfg.name));
    let mut w = csv::Writer::from_path(&terms_path)?;
    w.write_record([
        "term",
        "numeric",
        "analytic",
        "abs_error",
        "error_estimate",
        "tolerance",
        "eq_tag",
        "criterion",
        "check",
        "status",
    ])?;
    for r in &rows.rows {
        w.write_record([
            r.term.as_str(),
            &full_precision(r.numeric),
            &opt(r.analytic),
            &opt(r.abs_error()),
            &full_precision(r.error_estimate),
            &full_precision(r.tolerance),
            r.eq_tag,
            r.criterion,
            r.check.label(),
            if r.passed { "pass" } else { "fail" },
        ])?;
    }
    w.flush().map_err(|e| CliError::Io {
        path: terms_path.display().to_string(),
        source: e,
    })?;
    files.push(terms_path);

    let conv_path = opts.out_dir.join(format!("{}_convergence.csv", cfg.name));
    let mut w = csv::Writer::from_path(&conv_path)?;
    for r in &convergence {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| CliError::Io {
        path: conv_path.display().to_string(),
        source: e,
    })?;
    files.push(conv_path);

    if !sweep.is_empty() {
        let path = opts.out_dir.join(format!("{}_sweep.csv", cfg.name));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record([
            "epsilon",
            "assembled",
            "usual",
            "difference",
            "slope",
            "eq_tag",
        ])?;
        let slope = opt(slope);
        for p in &sweep {
            w.write_record([
                full_precision(p.epsilon),
                full_precision(p.assembled),
                full_precision(p.usual),
                full_precision(p.difference),
                slope.clone(),
                "Eq.(20)".to_string(),
            ])?;
        }
        w.flush().map_err(|e| CliError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        files.push(path);
    }

    let outcome = ScenarioOutcome {
        name: cfg.name.clone(),
        report,
        rows: rows.rows,
        sweep,
        slope,
        gauss,
        files,
    };
    if !opts.quiet {
        for r in outcome.rows.iter().filter(|r| r.failed_enforced()) {
            eprintln!(
                "{}: {} failed ({} vs {}, tolerance {:e})",
                outcome.name,
                r.term,
                r.numeric,
                opt(r.analytic),
                r.tolerance
            );
        }
    }
    Ok(outcome)
}

/// Per-criterion tally across a suite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriterionSummary {
    pub scenario: String,
    pub criterion: String,
    pub enforced: usize,
    pub failed: usize,
    pub status: &'static str,
}

#[derive(Debug)]
pub struct SuiteOutcome {
    pub summary: Vec<CriterionSummary>,
    /// Scenarios that could not be evaluated, with the reason.
    pub errors: Vec<(String, String)>,
    pub scenarios: usize,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.errors.is_empty() && self.summary.iter().all(|s| s.failed == 0)
    }
}

fn summarize(outcome: &ScenarioOutcome) -> Vec<CriterionSummary> {
    let mut criteria: Vec<&str> = outcome.rows.iter().map(|r| r.criterion).collect();
    criteria.sort_by_key(|c| (c.parse::<u32>().unwrap_or(u32::MAX), *c));
    criteria.dedup();
    criteria
        .into_iter()
        .map(|c| {
            let rows = outcome
                .rows
                .iter()
                .filter(|r| r.criterion == c && r.check == CheckKind::Enforced);
            let enforced = rows.clone().count();
            let failed = rows.filter(|r| !r.passed).count();
            CriterionSummary {
                scenario: outcome.name.clone(),
                criterion: c.to_string(),
                enforced,
                failed,
                status: if failed > 0 {
                    "fail"
                } else if enforced == 0 {
                    "diagnostic"
                } else {
                    "pass"
                },
            }
        })
        .collect()
}

/// `*.toml` files of `dir`, sorted by name.
pub fn suite_configs(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let io = |e| CliError::Io {
        path: dir.display().to_string(),
        source: e,
    };
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(io)? {
        let p = entry.map_err(io)?.path();
        if p.extension().is_some_and(|x| x == "toml") && p.is_file() {
            paths.push(p);
        }
    }
    paths.sort();
    Ok(paths)
}

/// Validates every config first (any problem is a config error), then
/// runs them in order and writes `suite_summary.csv`.
pub fn run_suite(paths: &[PathBuf], opts: &RunOptions) -> Result<SuiteOutcome, CliError> {
    let mut configs = Vec::new();
    let mut problems = Vec::new();
    for p in paths {
        match ScenarioConfig::load(p) {
            Ok(c) => configs.push(c),
            Err(CliError::Config(list)) => problems.extend(list),
            Err(e) => return Err(e),
        }
    }
    if !problems.is_empty() {
        return Err(CliError::Config(problems));
    }
    let mut names: Vec<&str> = configs.iter().map(|c| c.name.as_str()).collect();
    names.sort_unstable();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        return Err(CliError::Config(vec![format!(
            "name: duplicate scenario name {:?}",
            w[0]
        )]));
    }

    let mut summary = Vec::new();
    let mut errors = Vec::new();
    for c in &configs {
        if !opts.quiet {
            eprintln!("running {}", c.name);
        }
        match run_scenario(c, opts) {
            Ok(o) => summary.extend(summarize(&o)),
            Err(e) => {
                if !opts.quiet {
                    eprintln!("{}: {e}", c.name);
                }
                errors.push((c.name.clone(), e.to_string()));
            }
        }
    }

    create_dir(&opts.out_dir)?;
    let path = opts.out_dir.join("suite_summary.csv");
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(&path)?;
    w.write_record(["scenario", "criterion", "enforced", "failed", "status"])?;
    for s in &summary {
        w.serialize(s)?;
    }
    for (name, _) in &errors {
        w.write_record([name.as_str(), "-", "0", "1", "error"])?;
    }
    w.flush().map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    Ok(SuiteOutcome {
        summary,
        errors,
        scenarios: configs.len(),
    })
}
