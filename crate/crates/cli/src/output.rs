//! CSV and JSON report writers.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use msnls_core::{DiagnosticsRow, GridSpec, IdentityOracleReport, Trajectory, MASS_RHS_FACTOR};
use serde_json::{json, Value};

use crate::config::Resolved;
use crate::CliError;

pub const SERIES_HEADER: &str =
    "step,t,energy_mi,mass_mi,energy_gap,mass_gap,energy_wang,err_max,e_infty_sq,mod_err,fp_iters";
pub const SNAPSHOTS_HEADER: &str = "t,x,re_u,im_u,abs_u";
pub const ORDERS_HEADER: &str = "level,mesh_param,err_max,fitted_order";

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    let f = File::create(path).map_err(|e| CliError::io(path, e))?;
    Ok(BufWriter::new(f))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<(), CliError> {
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn series_line(r: &DiagnosticsRow) -> String {
    format!(
        "{},{:e},{:e},{:e},{},{},{},{},{},{},{}",
        r.step,
        r.t,
        r.energy_mi,
        r.mass_mi,
        opt(r.energy_gap),
        opt(r.mass_gap),
        opt(r.energy_wang),
        opt(r.err_max),
        opt(r.e_infty_sq),
        opt(r.mod_err),
        r.fp_iters
    )
}

pub fn write_series(dir: &Path, tr: &Trajectory) -> Result<(), CliError> {
    let path = dir.join("series.csv");
    let mut w = create(&path)?;
    let io = |e| CliError::io(&path, e);
    writeln!(w, "{SERIES_HEADER}").map_err(io)?;
    for r in &tr.rows {
        writeln!(w, "{}", series_line(r)).map_err(io)?;
    }
    finish(w, &path)
}

pub fn write_snapshots(dir: &Path, tr: &Trajectory, grid: &GridSpec) -> Result<(), CliError> {
    let path = dir.join("snapshots.csv");
    let mut w = create(&path)?;
    let io = |e| CliError::io(&path, e);
    writeln!(w, "{SNAPSHOTS_HEADER}").map_err(io)?;
    for (t, u) in &tr.snapshots {
        for (x, z) in grid.nodes().zip(u.iter()) {
            writeln!(w, "{t:e},{x:e},{:e},{:e},{:e}", z.re, z.im, z.norm()).map_err(io)?;
        }
    }
    finish(w, &path)
}

/// One row per sweep level; `fitted_order` is the least-squares fit over
/// levels up to and including the row, empty on the first.
pub fn write_orders(dir: &Path, samples: &[(f64, f64)]) -> Result<(), CliError> {
    let path = dir.join("orders.csv");
    let mut w = create(&path)?;
    let io = |e| CliError::io(&path, e);
    writeln!(w, "{ORDERS_HEADER}").map_err(io)?;
    for (level, (mesh, err)) in samples.iter().enumerate() {
        let order = if level == 0 {
            None
        } else {
            msnls_core::convergence_order(&samples[..=level]).ok()
        };
        writeln!(w, "{level},{mesh:e},{err:e},{}", opt(order)).map_err(io)?;
    }
    finish(w, &path)
}

pub fn oracle_json(r: &IdentityOracleReport) -> Value {
    json!({
        "passed": r.passed,
        "energy_factor": r.energy_factor,
        "mass_factor": r.mass_factor,
        "mass_rhs_factor_used": MASS_RHS_FACTOR,
        "pairing_defect": r.pairing_defect,
        "step_energy_gap": r.step_energy_gap,
        "step_mass_gap": r.step_mass_gap,
    })
}

pub fn problem_json(run: &Resolved) -> Value {
    let p = &run.problem;
    json!({
        "name": p.name,
        "exactness": p.exactness.as_str(),
        "alpha": p.params.alpha,
        "gamma": p.params.gamma,
        "theta": p.params.theta,
        "lambda": p.params.lambda,
        "beta": p.params.beta,
        "domain": [p.domain.0, p.domain.1],
    })
}

pub fn grid_json(g: &GridSpec) -> Value {
    json!({ "K": g.k, "J": g.j, "T": g.t_final, "h": g.h, "tau": g.tau })
}

pub fn trajectory_json(tr: &Trajectory) -> Value {
    json!({
        "scheme": tr.scheme.as_str(),
        "bootstrap_mode": tr.bootstrap.as_str(),
        "steps": tr.rows.len(),
        "snapshots": tr.snapshots.len(),
        "total_fp_iters": tr.total_fp_iters,
        "max_fp_iters": tr.max_fp_iters(),
        "energy_mi_drift": tr.energy_drift(),
        "mass_mi_drift": tr.mass_drift(),
        "energy_wang_drift": tr.energy_wang_drift(),
        "energy_wang_single_level_drift": tr.energy_wang_printed_drift(),
        "final_err_max": tr.final_row().and_then(|r| r.err_max),
        "final_e_infty_sq": tr.final_row().and_then(|r| r.e_infty_sq),
    })
}

pub fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}
