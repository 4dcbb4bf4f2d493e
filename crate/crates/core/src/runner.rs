//! Experiment drivers behind the command-line interface.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cauchy::CauchyParams;
use crate::error::{Error, Result};
use crate::geometry::{
    canonical_form, conformal_factor, fisher_distance, fisher_metric, fisher_metric_quadrature, j_squared_check,
    kahler_pairing, lie_derivative_metric, lie_derivative_symplectic, symplectic_defect, symplectic_form,
    verify_conformal_pullback, KillingField,
};
use crate::orbit::{iterate_orbit, Alpha, OrbitState};
use crate::params::{complex_s_step, fixed_point, parameter_step, to_canonical, HPoint};
use crate::pf::{
    ergodic_orbit_check, pf_closed_form_check, pf_monte_carlo_trace, pf_push_forward, FitMethod, GridLayout,
    MC_TOLERANCE_SE,
};
use crate::report::{Meta, OracleResult, RunReport, Table};

/// Finite-difference step used by the geometry checks.
pub const FD_STEP: f64 = 1e-6;

const PF_SUP_LIMIT: f64 = 1e-10;
const COMPLEX_LIMIT: f64 = 1e-12;
const FISHER_LIMIT: f64 = 1e-8;
const PULLBACK_LIMIT: f64 = 1e-6;
const LIE_LIMIT: f64 = 1e-6;
const KAHLER_LIMIT: f64 = 1e-14;
const KS_LIMIT: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    IterateParams,
    VerifyPf,
    Geometry,
    Orbit,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::IterateParams => "iterate-params",
            Command::VerifyPf => "verify-pf",
            Command::Geometry => "geometry",
            Command::Orbit => "orbit",
        }
    }

    /// Steps recorded when none are requested.
    pub fn default_steps(self) -> usize {
        match self {
            Command::IterateParams => 20,
            Command::VerifyPf => 1,
            Command::Geometry => 1,
            Command::Orbit => 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub alpha: f64,
    pub nu0: f64,
    pub gamma0: f64,
    pub xi0: f64,
    pub n: usize,
    pub steps: usize,
    pub seed: u64,
    pub grid_size: usize,
    pub output_path: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            alpha: 0.5,
            nu0: 1.0,
            gamma0: 1.0,
            xi0: std::f64::consts::SQRT_2,
            n: 1_000_000,
            steps: command.default_steps(),
            seed: 42,
            grid_size: crate::pf::DEFAULT_GRID_SIZE,
            output_path: None,
            format: Format::Json,
        }
    }

    /// Checks every field; messages name the flag to change.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("--alpha must lie strictly between 0 and 1 (got {})", self.alpha));
        }
        if !self.nu0.is_finite() {
            return bad(format!("--nu0 must be finite (got {})", self.nu0));
        }
        if !(self.gamma0.is_finite() && self.gamma0 > 0.0) {
            return bad(format!("--gamma0 must be finite and positive (got {})", self.gamma0));
        }
        if !(self.xi0.is_finite() && self.xi0 != 0.0) {
            return bad(format!("--xi0 must be finite and nonzero (got {})", self.xi0));
        }
        if self.n == 0 || self.steps == 0 {
            return bad("--n and --steps must be at least 1".into());
        }
        if self.grid_size < 2 {
            return bad(format!("--grid-size must be at least 2 (got {})", self.grid_size));
        }
        match self.command {
            Command::VerifyPf if self.n < 10_000 => {
                return bad(format!("verify-pf needs --n of at least 10000 for a stable fit (got {})", self.n));
            }
            Command::Orbit if self.n < 100_000 => {
                return bad(format!("orbit needs --n of at least 100000 for the KS check (got {})", self.n));
            }
            _ => {}
        }
        if let Some(path) = &self.output_path {
            let parent = path.parent().filter(|p| !p.as_os_str().is_empty());
            if let Some(dir) = parent {
                if !dir.is_dir() {
                    return bad(format!("--out directory {} does not exist", dir.display()));
                }
            }
            if path.is_dir() {
                return bad(format!("--out {} is a directory", path.display()));
            }
        }
        Ok(())
    }

    fn alpha(&self) -> Result<Alpha> {
        Alpha::new(self.alpha)
    }

    fn start(&self) -> Result<HPoint> {
        HPoint::new(self.nu0, self.gamma0)
    }
}

/// Output of a command before the metadata is attached.
struct Outcome {
    records: Table,
    oracles: Vec<OracleResult>,
    warnings: Vec<String>,
}

/// Validates `cfg`, runs its command and fills in the metadata.
pub fn run(cfg: &RunConfig) -> Result<RunReport> {
    cfg.validate()?;
    let started = Instant::now();
    let outcome = match cfg.command {
        Command::IterateParams => iterate_params(cfg)?,
        Command::VerifyPf => verify_pf(cfg)?,
        Command::Geometry => geometry(cfg)?,
        Command::Orbit => orbit(cfg)?,
    };
    let mut report = RunReport {
        config: cfg.clone(),
        records: outcome.records,
        oracles: outcome.oracles,
        meta: Meta {
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: cfg.command.name().to_string(),
            seed: cfg.seed,
            wall_time_s: started.elapsed().as_secs_f64(),
            warnings: outcome.warnings,
            passed: false,
        },
    };
    report.meta.passed = report.passed();
    Ok(report)
}

pub fn cmd_iterate_params(cfg: &RunConfig) -> Result<RunReport> {
    run(&RunConfig {
        command: Command::IterateParams,
        ..cfg.clone()
    })
}

pub fn cmd_verify_pf(cfg: &RunConfig) -> Result<RunReport> {
    run(&RunConfig {
        command: Command::VerifyPf,
        ..cfg.clone()
    })
}

pub fn cmd_geometry(cfg: &RunConfig) -> Result<RunReport> {
    run(&RunConfig {
        command: Command::Geometry,
        ..cfg.clone()
    })
}

pub fn cmd_orbit(cfg: &RunConfig) -> Result<RunReport> {
    run(&RunConfig {
        command: Command::Orbit,
        ..cfg.clone()
    })
}

fn iterate_params(cfg: &RunConfig) -> Result<Outcome> {
    let alpha = cfg.alpha()?;
    let target = fixed_point(alpha);
    let mut records = Table::new(&[
        "n",
        "nu",
        "gamma",
        "q",
        "p",
        "conformal_factor",
        "distance_euclidean",
        "distance_fisher",
    ]);
    let mut x = cfg.start()?;
    let mut complex_dev = 0.0_f64;
    for k in 0..=cfg.steps {
        let c = to_canonical(x)?;
        records.push_values(&[
            k as f64,
            x.nu(),
            x.gamma(),
            c.q(),
            c.p(),
            conformal_factor(x)?,
            x.distance(&target),
            fisher_distance(x, target)?,
        ]);
        if k < cfg.steps {
            let next = parameter_step(alpha, x)?;
            let (s_next, _) = complex_s_step(alpha, x)?;
            let dev = (s_next.re - next.nu()).hypot(s_next.im + next.gamma());
            complex_dev = complex_dev.max(dev / next.nu().hypot(next.gamma()).max(1.0));
            x = next;
        }
    }
    let fp_next = parameter_step(alpha, target)?;
    let oracles = vec![
        OracleResult::below("complex_form_max_deviation", complex_dev, COMPLEX_LIMIT),
        OracleResult::below("fixed_point_idempotence", fp_next.distance(&target), 1e-14),
        OracleResult::info("final_distance_to_fixed_point", x.distance(&target)),
    ];
    Ok(Outcome {
        records,
        oracles,
        warnings: Vec::new(),
    })
}

fn verify_pf(cfg: &RunConfig) -> Result<Outcome> {
    let alpha = cfg.alpha()?;
    let p0 = CauchyParams::new(cfg.nu0, cfg.gamma0)?;
    let trace = pf_monte_carlo_trace(alpha, p0, cfg.n, cfg.steps, cfg.seed, FitMethod::MedianIqr)?;
    let mut records = Table::new(&[
        "n",
        "nu_predicted",
        "gamma_predicted",
        "nu_measured",
        "gamma_measured",
        "z_nu",
        "z_gamma",
        "closed_form_sup_error",
        "grid_drift",
    ]);
    let mut warnings = Vec::new();
    let (mut sup, mut drift, mut z_max) = (0.0_f64, 0.0_f64, 0.0_f64);
    for (k, r) in trace.iter().enumerate() {
        let (pred, meas) = (r.predicted, r.measured);
        let z_nu = (meas.nu() - pred.nu()).abs() / r.standard_error[0];
        let z_gamma = (meas.gamma() - pred.gamma()).abs() / r.standard_error[1];
        z_max = z_max.max(z_nu).max(z_gamma);
        // the closed-form and grid checks for the step that produced row k
        let (step_sup, step_drift) = if k == 0 {
            (None, None)
        } else {
            let prev = trace[k - 1].predicted;
            let layout = Arc::new(GridLayout::arctan(prev, cfg.grid_size)?);
            let e = pf_closed_form_check(alpha, prev, layout.nodes())?;
            let image = pf_push_forward(alpha, &prev, layout);
            if let Some(w) = image.warning() {
                warnings.push(format!("step {k}: {w}"));
            }
            sup = sup.max(e);
            drift = drift.max(image.drift());
            (Some(e), Some(image.drift()))
        };
        records.push(vec![
            Some(k as f64),
            Some(pred.nu()),
            Some(pred.gamma()),
            Some(meas.nu()),
            Some(meas.gamma()),
            Some(z_nu),
            Some(z_gamma),
            step_sup,
            step_drift,
        ]);
    }
    let last = trace.last().expect("at least one step");
    let oracles = vec![
        OracleResult::below("closed_form_sup_error", sup, PF_SUP_LIMIT),
        OracleResult::below("monte_carlo_max_z", z_max, MC_TOLERANCE_SE),
        OracleResult::info("monte_carlo_sup_error", last.sup_error),
        OracleResult::info("fitted_nu", last.measured.nu()),
        OracleResult::info("fitted_gamma", last.measured.gamma()),
        OracleResult::info("dropped_samples", last.dropped as f64),
        OracleResult::info("grid_mass_drift", drift),
    ];
    Ok(Outcome {
        records,
        oracles,
        warnings,
    })
}

/// `(nu, gamma)` in `[-2, 2] x [0.5, 4]`, five values each.
pub fn standard_lattice() -> Vec<HPoint> {
    let mut out = Vec::with_capacity(25);
    for i in 0..5 {
        for j in 0..5 {
            let nu = -2.0 + i as f64;
            let gamma = 0.5 + 0.875 * j as f64;
            out.push(HPoint::new(nu, gamma).expect("lattice is interior"));
        }
    }
    out
}

struct GeometryRow {
    cells: Vec<Option<f64>>,
    fisher: f64,
    pullback: Option<f64>,
    lie_metric: f64,
    lie_omega: f64,
    kahler: f64,
}

fn geometry_row(alpha: Alpha, x: HPoint) -> Result<GeometryRow> {
    let factor = conformal_factor(x)?;
    let fisher = fisher_metric_quadrature(x)?.max_abs_diff(&fisher_metric(x)?);
    let pullback = verify_conformal_pullback(alpha, x, FD_STEP).ok();
    let mut lie_metric = 0.0_f64;
    let mut lie_omega = 0.0_f64;
    for k in KillingField::ALL {
        lie_metric = lie_metric.max(lie_derivative_metric(k, x, FD_STEP)?.max_abs());
        lie_omega = lie_omega.max(lie_derivative_symplectic(k, x, FD_STEP)?.abs());
    }
    let (v, w) = ([1.0, 0.5], [-0.3, 2.0]);
    let kahler = (symplectic_form(x)?.evaluate(v, w) - kahler_pairing(x, v, w)?).abs();
    let defect = symplectic_defect(alpha, to_canonical(x)?, FD_STEP)?;
    let degenerate = pullback.is_none();
    Ok(GeometryRow {
        cells: vec![
            Some(x.nu()),
            Some(x.gamma()),
            Some(factor),
            Some(fisher),
            pullback,
            Some(lie_metric),
            Some(lie_omega),
            Some(kahler),
            Some(defect),
            Some(if degenerate { 1.0 } else { 0.0 }),
        ],
        fisher,
        pullback,
        lie_metric,
        lie_omega,
        kahler,
    })
}

fn geometry(cfg: &RunConfig) -> Result<Outcome> {
    let alpha = cfg.alpha()?;
    let mut records = Table::new(&[
        "nu",
        "gamma",
        "conformal_factor",
        "fisher_quadrature_error",
        "pullback_deviation",
        "lie_metric_max",
        "lie_symplectic_max",
        "kahler_error",
        "symplectic_defect",
        "degenerate",
    ]);
    let mut warnings = Vec::new();
    let point = cfg.start()?;
    let mut points = vec![point];
    points.extend(standard_lattice());
    let (mut fisher, mut pullback, mut lie_g, mut lie_w, mut kahler) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for x in points {
        let row = geometry_row(alpha, x)?;
        match row.pullback {
            Some(p) => pullback = pullback.max(p),
            None => warnings.push(format!(
                "({}, {}) is the degenerate point of the parameter map: the conformal factor vanishes and the pullback check is skipped",
                x.nu(),
                x.gamma()
            )),
        }
        fisher = fisher.max(row.fisher);
        lie_g = lie_g.max(row.lie_metric);
        lie_w = lie_w.max(row.lie_omega);
        kahler = kahler.max(row.kahler);
        records.push(row.cells);
    }
    let canonical = canonical_form(to_canonical(point)?)?;
    let oracles = vec![
        OracleResult::info("conformal_factor", conformal_factor(point)?),
        OracleResult::below("fisher_quadrature_max_error", fisher, FISHER_LIMIT),
        OracleResult::below("pullback_max_deviation", pullback, PULLBACK_LIMIT),
        OracleResult::below("lie_metric_max", lie_g, LIE_LIMIT),
        OracleResult::below("lie_symplectic_max", lie_w, LIE_LIMIT),
        OracleResult::below("kahler_max_error", kahler, KAHLER_LIMIT),
        OracleResult::below("j_squared_deviation", j_squared_check(point), f64::MIN_POSITIVE),
        OracleResult::info("canonical_dp_dq_coefficient", canonical.dp_dq()),
        OracleResult::info(
            "symplectic_defect",
            symplectic_defect(alpha, to_canonical(point)?, FD_STEP)?,
        ),
    ];
    Ok(Outcome {
        records,
        oracles,
        warnings,
    })
}

fn orbit(cfg: &RunConfig) -> Result<Outcome> {
    let alpha = cfg.alpha()?;
    let xi0 = OrbitState::new(cfg.xi0)?;
    let trace = iterate_orbit(alpha, xi0, cfg.steps);
    let mut records = Table::new(&["n", "xi"]);
    for (k, &xi) in trace.states.iter().enumerate() {
        records.push_values(&[k as f64, xi]);
    }
    let mut warnings = Vec::new();
    let mut oracles = Vec::new();
    if let Some(at) = trace.truncated_at {
        warnings.push(format!("orbit reached the pole at step {at} and was truncated"));
    }
    match ergodic_orbit_check(alpha, xi0, cfg.n) {
        Ok(r) => {
            oracles.push(OracleResult::below("ks_distance", r.ks, KS_LIMIT));
            oracles.push(OracleResult::info("distinct_values", r.distinct as f64));
            if r.degenerate {
                warnings.push("orbit revisits too few values; the seed looks eventually periodic".into());
                oracles.push(OracleResult::failed("orbit_not_degenerate"));
            }
        }
        Err(Error::Truncated { last_valid }) => {
            warnings.push(format!(
                "KS orbit reached the pole at step {last_valid}; choose a generic --xi0"
            ));
            oracles.push(OracleResult::failed("ks_distance"));
        }
        Err(e) => return Err(e),
    }
    oracles.push(OracleResult::info("invariant_scale", alpha.invariant_scale()));
    Ok(Outcome {
        records,
        oracles,
        warnings,
    })
}

/// Writes the report to `cfg.output_path`, or stdout when unset.
pub fn write_report(report: &RunReport, cfg: &RunConfig) -> Result<()> {
    let sink: Box<dyn Write> = match &cfg.output_path {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut sink = sink;
    match cfg.format {
        Format::Json => {
            sink.write_all(report.to_json()?.as_bytes())?;
            sink.write_all(b"\n")?;
        }
        Format::Csv => report.records.write_csv(&mut sink)?,
    }
    sink.flush()?;
    Ok(())
}
