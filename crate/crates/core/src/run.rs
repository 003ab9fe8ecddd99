//! Whole-trajectory drivers with per-step diagnostics.

use crate::diagnostics::{self, DiagnosticsRow};
use crate::error::Result;
use crate::grid::{GridSpec, MeshFunction};
use crate::problems::{error_metrics, ProblemSpec};
use crate::scheme::{
    self, BootstrapMode, MiScheme, SchemeKind, SolverConfig, StateWindow, TwoStepScheme, WangScheme,
};

pub const DEFAULT_SNAPSHOT_STRIDE: usize = 100;

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub scheme: SchemeKind,
    pub bootstrap: BootstrapMode,
    pub grid: GridSpec,
    /// Levels 0 and 1, then every `stride` steps after level 1.
    pub snapshots: Vec<(f64, MeshFunction)>,
    /// One row per step, `J - 1` in total.
    pub rows: Vec<DiagnosticsRow>,
    /// Energy and mass of the bootstrap pair `(u^0, u^1)`.
    pub initial_energy: f64,
    pub initial_mass: f64,
    pub initial_energy_wang: Option<f64>,
    pub total_fp_iters: usize,
    /// Last two levels `(u^{J-1}, u^J)`.
    pub last: StateWindow,
}

fn rel_drift(initial: f64, values: impl Iterator<Item = f64>) -> f64 {
    let scale = initial.abs().max(f64::MIN_POSITIVE);
    values
        .map(|v| (v - initial).abs() / scale)
        .fold(0.0, f64::max)
}

impl Trajectory {
    pub fn energy_drift(&self) -> f64 {
        rel_drift(self.initial_energy, self.rows.iter().map(|r| r.energy_mi))
    }

    pub fn mass_drift(&self) -> f64 {
        rel_drift(self.initial_mass, self.rows.iter().map(|r| r.mass_mi))
    }

    pub fn energy_wang_drift(&self) -> Option<f64> {
        let e0 = self.initial_energy_wang?;
        Some(rel_drift(
            e0,
            self.rows.iter().filter_map(|r| r.energy_wang),
        ))
    }

    pub fn energy_wang_printed_drift(&self) -> Option<f64> {
        let first = self.rows.first()?.energy_wang_printed?;
        Some(rel_drift(
            first,
            self.rows.iter().filter_map(|r| r.energy_wang_printed),
        ))
    }

    pub fn max_fp_iters(&self) -> usize {
        self.rows.iter().map(|r| r.fp_iters).max().unwrap_or(0)
    }

    pub fn final_row(&self) -> Option<&DiagnosticsRow> {
        self.rows.last()
    }
}

/// Runs `kind` on `problem`, calling `observer(level, u)` for every level
/// including the two bootstrap levels.
pub fn run_with_observer<O>(
    problem: &ProblemSpec,
    grid: &GridSpec,
    config: &SolverConfig,
    kind: SchemeKind,
    snapshot_stride: usize,
    mut observer: O,
) -> Result<Trajectory>
where
    O: FnMut(usize, &MeshFunction),
{
    config.validate()?;
    let stride = snapshot_stride.max(1);
    let params = problem.params;
    let exact = problem.verified_exact();
    let (u0, u1) = scheme::bootstrap(
        |x| (problem.f0)(x),
        |x| (problem.f1)(x),
        &params,
        grid,
        config.bootstrap,
        exact.map(|u| u.as_ref() as &dyn Fn(f64, f64) -> num_complex::Complex64),
    )?;
    let stepper: Box<dyn TwoStepScheme> = match kind {
        SchemeKind::Mi => Box::new(MiScheme::new(params, *grid, *config)?),
        SchemeKind::Wang => Box::new(WangScheme::new(params, *grid, *config)?),
    };
    let is_wang = kind == SchemeKind::Wang;

    observer(0, &u0);
    observer(1, &u1);
    let initial_energy = diagnostics::mi_energy(&u0, &u1, &params, grid)?;
    let initial_mass = diagnostics::mi_mass(&u0, &u1, &params, grid)?;
    let initial_energy_wang = if is_wang {
        Some(scheme::energy_wang(&u0, &u1, &params, grid)?)
    } else {
        None
    };
    let mut snapshots = vec![(grid.time(0), u0.clone()), (grid.time(1), u1.clone())];
    let mut rows = Vec::with_capacity(grid.j.saturating_sub(1));
    let mut total_fp_iters = 0;
    let mut window = StateWindow::new(u0, u1, grid.time(1))?;

    for level in 2..=grid.j {
        let step = level - 1;
        let out = stepper.step(&window).map_err(|e| e.at_step(step))?;
        let t = grid.time(level);
        let next = &out.u_next;
        let row = (|| -> Result<DiagnosticsRow> {
            let (prev, cur) = (&window.u_prev, &window.u_cur);
            let energy_mi = diagnostics::mi_energy(cur, next, &params, grid)?;
            let mass_mi = diagnostics::mi_mass(cur, next, &params, grid)?;
            let gaps = if is_wang {
                None
            } else {
                Some(diagnostics::theorem_identity_gaps(
                    prev, cur, next, &params, grid,
                )?)
            };
            let (energy_wang, energy_wang_printed) = if is_wang {
                (
                    Some(scheme::energy_wang(cur, next, &params, grid)?),
                    Some(scheme::energy_wang_printed(cur, next, &params, grid)?),
                )
            } else {
                (None, None)
            };
            let metrics = match problem.exact_at(grid, t)? {
                Some(u) => Some(error_metrics(next, &u)?),
                None => None,
            };
            Ok(DiagnosticsRow {
                step: level,
                t,
                energy_mi,
                mass_mi,
                energy_gap: gaps.map(|g| g.energy_gap),
                mass_gap: gaps.map(|g| g.mass_gap),
                energy_wang,
                energy_wang_printed,
                err_max: metrics.map(|m| m.err_max),
                e_infty_sq: metrics.map(|m| m.e_infty_sq),
                mod_err: metrics.map(|m| m.mod_err),
                re_err: metrics.map(|m| m.re_err),
                fp_iters: out.fp_iters,
            })
        })()
        .map_err(|e| e.at_step(step))?;
        total_fp_iters += out.fp_iters;
        rows.push(row);
        observer(level, next);
        if (level - 1) % stride == 0 {
            snapshots.push((t, next.clone()));
        }
        window.advance(out.u_next, grid.tau);
    }

    Ok(Trajectory {
        scheme: kind,
        bootstrap: config.bootstrap,
        grid: *grid,
        snapshots,
        rows,
        initial_energy,
        initial_mass,
        initial_energy_wang,
        total_fp_iters,
        last: window,
    })
}

pub fn run_scheme(
    problem: &ProblemSpec,
    grid: &GridSpec,
    config: &SolverConfig,
    kind: SchemeKind,
    snapshot_stride: usize,
) -> Result<Trajectory> {
    run_with_observer(problem, grid, config, kind, snapshot_stride, |_, _| {})
}

pub fn run_mi(problem: &ProblemSpec, grid: &GridSpec, config: &SolverConfig) -> Result<Trajectory> {
    run_scheme(
        problem,
        grid,
        config,
        SchemeKind::Mi,
        DEFAULT_SNAPSHOT_STRIDE,
    )
}

pub fn run_wang(
    problem: &ProblemSpec,
    grid: &GridSpec,
    config: &SolverConfig,
) -> Result<Trajectory> {
    run_scheme(
        problem,
        grid,
        config,
        SchemeKind::Wang,
        DEFAULT_SNAPSHOT_STRIDE,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::builtin_problem;

    #[test]
    fn two_level_run_is_bootstrap_plus_one_step() {
        let p = builtin_problem("linear_plane").unwrap();
        let g = p.grid(32, 2, Some(0.02)).unwrap();
        let tr = run_mi(&p, &g, &SolverConfig::default()).unwrap();
        assert_eq!(tr.rows.len(), 1);
        assert_eq!(tr.rows[0].step, 2);
        assert_eq!(tr.snapshots.len(), 2);
        assert!(tr.rows[0].energy_gap.is_some());
    }

    #[test]
    fn snapshot_count_follows_stride() {
        let p = builtin_problem("plane_beta2").unwrap();
        let g = p.grid(32, 23, Some(0.23)).unwrap();
        let tr = run_scheme(&p, &g, &SolverConfig::default(), SchemeKind::Wang, 5).unwrap();
        assert_eq!(tr.rows.len(), 22);
        assert_eq!(tr.snapshots.len(), 22 / 5 + 2);
        assert!(tr.snapshots.windows(2).all(|w| w[1].0 > w[0].0));
        assert!(tr
            .rows
            .iter()
            .all(|r| r.energy_wang.is_some() && r.energy_gap.is_none()));
    }

    #[test]
    fn observer_sees_every_level() {
        let p = builtin_problem("gauss_split").unwrap();
        let g = p.grid(64, 6, Some(0.1)).unwrap();
        let mut seen = Vec::new();
        let tr = run_with_observer(
            &p,
            &g,
            &SolverConfig::default(),
            SchemeKind::Mi,
            100,
            |l, _| seen.push(l),
        )
        .unwrap();
        assert_eq!(seen, (0..=6).collect::<Vec<_>>());
        assert!(tr.rows.iter().all(|r| r.err_max.is_none()));
    }
}
