//! Run configuration: JSON documents with defaults and strict key checking.

use std::path::PathBuf;
use std::sync::Arc;

use msnls_core::problems::{SpaceTimeFn, EXACT_RESIDUAL_TOL};
use msnls_core::{
    builtin_problem, BootstrapMode, Complex64, Exactness, GridSpec, PdeParams, ProblemSpec,
    SolverConfig,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SchemeChoice {
    #[default]
    Mi,
    Wang,
    Both,
}

/// A single travelling wave `amplitude * exp(i (wavenumber x - omega t + phase))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveMode {
    pub amplitude: f64,
    pub wavenumber: f64,
    pub omega: f64,
    #[serde(default)]
    pub phase: f64,
}

/// User-defined problem whose data is a finite sum of travelling waves.
/// Marked verified when the sum passes the residual check, which happens
/// for any set of modes on the linear dispersion relation when `beta = 0`
/// and for a single mode with the cubic frequency shift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineProblem {
    pub name: String,
    pub alpha: f64,
    pub gamma: f64,
    pub theta: f64,
    pub lambda: f64,
    pub beta: f64,
    pub domain: [f64; 2],
    pub t_final: f64,
    pub modes: Vec<WaveMode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProblemRef {
    Builtin(String),
    Inline(InlineProblem),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemRef,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "J")]
    pub j: usize,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default)]
    pub scheme: SchemeChoice,
    /// Unset means `taylor2` for runs and `exact` for convergence sweeps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bootstrap_mode: Option<String>,
    #[serde(default = "default_fp_tol")]
    pub fp_tol: f64,
    #[serde(default = "default_fp_max_iter")]
    pub fp_max_iter: usize,
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_fp_tol() -> f64 {
    SolverConfig::default().fp_tol
}

fn default_fp_max_iter() -> usize {
    SolverConfig::default().fp_max_iter
}

fn default_stride() -> usize {
    msnls_core::DEFAULT_SNAPSHOT_STRIDE
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// A parsed config with its problem and grid resolved.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: RunConfig,
    pub problem: ProblemSpec,
    pub grid: GridSpec,
}

impl Resolved {
    pub fn solver(&self, fallback: BootstrapMode) -> Result<SolverConfig, CliError> {
        let bootstrap = match &self.config.bootstrap_mode {
            Some(s) => s
                .parse()
                .map_err(|e: msnls_core::Error| CliError::Config(e.to_string()))?,
            None => fallback,
        };
        let cfg = SolverConfig {
            fp_tol: self.config.fp_tol,
            fp_max_iter: self.config.fp_max_iter,
            bootstrap,
        };
        cfg.validate().map_err(config_err)?;
        if bootstrap == BootstrapMode::Exact && self.problem.verified_exact().is_none() {
            return Err(CliError::Config(format!(
                "bootstrap_mode: problem `{}` has no verified exact solution",
                self.problem.name
            )));
        }
        Ok(cfg)
    }
}

fn config_err(e: msnls_core::Error) -> CliError {
    CliError::Config(e.to_string())
}

pub fn parse_config(text: &str) -> Result<Resolved, CliError> {
    let config: RunConfig = serde_json::from_str(text)
        .map_err(|e| CliError::Config(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    resolve(config)
}

pub fn resolve(config: RunConfig) -> Result<Resolved, CliError> {
    if config.snapshot_stride == 0 {
        return Err(CliError::Config(
            "snapshot_stride must be at least 1".into(),
        ));
    }
    if let Some(t) = config.t {
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError::Config(format!("T = {t} must be positive")));
        }
    }
    let problem = match &config.problem {
        ProblemRef::Builtin(name) => builtin_problem(name).map_err(config_err)?,
        ProblemRef::Inline(p) => inline_problem(p)?,
    };
    let grid = problem
        .grid(config.k, config.j, config.t)
        .map_err(|e| CliError::Config(format!("K/J/T: {e}")))?;
    let resolved = Resolved {
        config,
        problem,
        grid,
    };
    resolved.solver(BootstrapMode::Taylor2)?;
    Ok(resolved)
}

pub fn inline_problem(p: &InlineProblem) -> Result<ProblemSpec, CliError> {
    let params = PdeParams::new(p.alpha, p.gamma, p.theta, p.lambda, p.beta).map_err(config_err)?;
    if p.modes.is_empty() {
        return Err(CliError::Config(
            "modes: at least one wave is required".into(),
        ));
    }
    if p.modes.iter().any(|m| {
        ![m.amplitude, m.wavenumber, m.omega, m.phase]
            .iter()
            .all(|v| v.is_finite())
    }) {
        return Err(CliError::Config("modes: all entries must be finite".into()));
    }
    let modes = Arc::new(p.modes.clone());
    let wave = |m: &WaveMode, x: f64, t: f64| {
        Complex64::from_polar(m.amplitude, m.wavenumber * x - m.omega * t + m.phase)
    };
    let u: SpaceTimeFn = {
        let modes = modes.clone();
        Arc::new(move |x, t| modes.iter().map(|m| wave(m, x, t)).sum())
    };
    let f0 = {
        let u = u.clone();
        Arc::new(move |x| u(x, 0.0))
    };
    let f1 = {
        let modes = modes.clone();
        Arc::new(move |x| {
            modes
                .iter()
                .map(|m| Complex64::new(0.0, -m.omega) * wave(m, x, 0.0))
                .sum()
        })
    };
    let mut spec = ProblemSpec {
        name: p.name.clone(),
        params,
        domain: (p.domain[0], p.domain[1]),
        default_t: p.t_final,
        f0,
        f1,
        exact: Some(u.clone()),
        exactness: Exactness::None,
    };
    if spec.max_exact_residual(u.as_ref()) < EXACT_RESIDUAL_TOL {
        spec.exactness = Exactness::Verified;
    } else {
        spec.exact = None;
    }
    spec.validate().map_err(config_err)?;
    Ok(spec)
}
