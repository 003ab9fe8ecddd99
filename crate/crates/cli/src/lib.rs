//! Experiment driver behind the `msnls` binary.

pub mod config;
pub mod output;

use std::path::{Path, PathBuf};
use std::time::Instant;

use msnls_core::{
    convergence_order, list_problems, run_scheme, validate_identities, BootstrapMode, Exactness,
    IdentityOracleReport, SchemeKind, SolverConfig, Trajectory,
};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use config::{Resolved, SchemeChoice};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("solver failure: {0}")]
    Solver(#[from] msnls_core::Error),
    #[error("identity oracle failed: {0}")]
    Oracle(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Oracle(_) => 4,
            CliError::Io { .. } => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config_error",
            CliError::Usage(_) => "usage_error",
            CliError::Solver(_) => "solver_failure",
            CliError::Oracle(_) => "oracle_failure",
            CliError::Io { .. } => "io_error",
        }
    }

    /// Machine-readable record written as `error.json`.
    pub fn record(&self) -> Value {
        let step = match self {
            CliError::Solver(msnls_core::Error::Step { step, .. }) => Some(*step),
            _ => None,
        };
        let cause = match self {
            CliError::Solver(e) => Some(e.root().to_string()),
            _ => None,
        };
        json!({
            "status": "error",
            "kind": self.kind(),
            "exit_code": self.exit_code(),
            "step": step,
            "cause": cause,
            "message": self.to_string(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Space,
    Time,
}

impl Axis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Axis::Space => "space",
            Axis::Time => "time",
        }
    }
}

fn schemes(choice: SchemeChoice) -> Vec<SchemeKind> {
    match choice {
        SchemeChoice::Mi => vec![SchemeKind::Mi],
        SchemeChoice::Wang => vec![SchemeKind::Wang],
        SchemeChoice::Both => vec![SchemeKind::Mi, SchemeKind::Wang],
    }
}

/// Per-run output directory: the configured one, or a subdirectory per scheme when both run.
fn run_dir(base: &Path, kind: SchemeKind, several: bool) -> PathBuf {
    if several {
        base.join(kind.as_str())
    } else {
        base.to_path_buf()
    }
}

pub fn check_oracle() -> Result<IdentityOracleReport, CliError> {
    let report = validate_identities().map_err(|e| CliError::Oracle(e.to_string()))?;
    if !report.passed {
        return Err(CliError::Oracle(format!(
            "energy factor {}, mass factor {}, pairing defect {:e}",
            report.energy_factor, report.mass_factor, report.pairing_defect
        )));
    }
    Ok(report)
}

fn solver_json(cfg: &SolverConfig) -> Value {
    json!({ "fp_tol": cfg.fp_tol, "fp_max_iter": cfg.fp_max_iter, "bootstrap_mode": cfg.bootstrap.as_str() })
}

#[derive(Debug)]
pub struct RunSummary {
    pub dirs: Vec<PathBuf>,
    pub trajectories: Vec<Trajectory>,
}

/// Runs every requested scheme and writes `series.csv`, `snapshots.csv`
/// and `meta.json` into one directory per run.
pub fn run_experiment(run: &Resolved, force_both: bool) -> Result<RunSummary, CliError> {
    let start = Instant::now();
    let oracle = check_oracle()?;
    let solver = run.solver(BootstrapMode::Taylor2)?;
    let choice = if force_both {
        SchemeChoice::Both
    } else {
        run.config.scheme
    };
    let kinds = schemes(choice);
    let several = kinds.len() > 1;
    let stride = run.config.snapshot_stride;

    let results: Vec<Result<Trajectory, msnls_core::Error>> = kinds
        .par_iter()
        .map(|&kind| run_scheme(&run.problem, &run.grid, &solver, kind, stride))
        .collect();
    let trajectories = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let wall = start.elapsed().as_secs_f64();

    let base = &run.config.output_dir;
    let mut dirs = Vec::new();
    for tr in &trajectories {
        let dir = run_dir(base, tr.scheme, several);
        output::ensure_dir(&dir)?;
        output::write_series(&dir, tr)?;
        output::write_snapshots(&dir, tr, &run.grid)?;
        let meta = json!({
            "config": serde_json::to_value(&run.config).map_err(|e| CliError::Config(e.to_string()))?,
            "problem": output::problem_json(run),
            "grid": output::grid_json(&run.grid),
            "solver": solver_json(&solver),
            "identity_oracle": output::oracle_json(&oracle),
            "run": output::trajectory_json(tr),
            "wall_time_s": wall,
            "version": env!("CARGO_PKG_VERSION"),
        });
        output::write_json(&dir.join("meta.json"), &meta)?;
        dirs.push(dir);
    }
    if several {
        let summary: Vec<Value> = trajectories.iter().map(output::trajectory_json).collect();
        output::write_json(&base.join("comparison.json"), &json!({ "runs": summary }))?;
    }
    Ok(RunSummary { dirs, trajectories })
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub scheme: SchemeKind,
    /// `(mesh parameter, final max-norm error)` per level.
    pub samples: Vec<(f64, f64)>,
    pub order: f64,
}

/// Refines `axis` by halving the mesh `levels - 1` times from the configured K or J.
pub fn run_convergence(
    run: &Resolved,
    axis: Axis,
    levels: usize,
) -> Result<Vec<SweepResult>, CliError> {
    if levels < 2 {
        return Err(CliError::Usage(format!(
            "a convergence sweep needs at least 2 levels, got {levels}"
        )));
    }
    if run.problem.exactness != Exactness::Verified {
        return Err(CliError::Config(format!(
            "problem `{}` has no verified exact solution ({}); convergence sweeps need one",
            run.problem.name, run.problem.exactness
        )));
    }
    let start = Instant::now();
    let oracle = check_oracle()?;
    let solver = run.solver(BootstrapMode::Exact)?;
    let grids = (0..levels)
        .map(|i| {
            let (k, j) = match axis {
                Axis::Space => (run.grid.k << i, run.grid.j),
                Axis::Time => (run.grid.k, run.grid.j << i),
            };
            run.problem.grid(k, j, Some(run.grid.t_final))
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Config(e.to_string()))?;

    let kinds = schemes(run.config.scheme);
    let several = kinds.len() > 1;
    let mut out = Vec::new();
    for kind in kinds {
        let samples = grids
            .par_iter()
            .map(|g| {
                let tr = run_scheme(&run.problem, g, &solver, kind, usize::MAX)?;
                let err = tr.final_row().and_then(|r| r.err_max).unwrap_or(f64::NAN);
                let mesh = match axis {
                    Axis::Space => g.h,
                    Axis::Time => g.tau,
                };
                Ok((mesh, err))
            })
            .collect::<Result<Vec<_>, msnls_core::Error>>()?;
        let order = convergence_order(&samples)?;
        let dir = run_dir(&run.config.output_dir, kind, several);
        output::ensure_dir(&dir)?;
        output::write_orders(&dir, &samples)?;
        let meta = json!({
            "config": serde_json::to_value(&run.config).map_err(|e| CliError::Config(e.to_string()))?,
            "problem": output::problem_json(run),
            "axis": axis.as_str(),
            "levels": levels,
            "grids": grids.iter().map(output::grid_json).collect::<Vec<_>>(),
            "scheme": kind.as_str(),
            "solver": solver_json(&solver),
            "identity_oracle": output::oracle_json(&oracle),
            "fitted_order": order,
            "wall_time_s": start.elapsed().as_secs_f64(),
            "version": env!("CARGO_PKG_VERSION"),
        });
        output::write_json(&dir.join("meta.json"), &meta)?;
        out.push(SweepResult {
            scheme: kind,
            samples,
            order,
        });
    }
    Ok(out)
}

/// One line per built-in problem.
pub fn problem_table() -> Vec<String> {
    list_problems()
        .iter()
        .map(|p| {
            let q = &p.params;
            format!(
                "{:<16} alpha={} gamma={} theta={} lambda={} beta={} domain=[{:.4}, {:.4}] T={} exact={}",
                p.name, q.alpha, q.gamma, q.theta, q.lambda, q.beta, p.domain.0, p.domain.1, p.default_t, p.exactness
            )
        })
        .collect()
}
