//! Two-step implicit time integrators.
//!
//! Both schemes advance `(u^{j-1}, u^j) -> u^{j+1}` by Picard iteration around
//! a constant cyclic tridiagonal linear part that is factored once per run.

pub mod mi;
pub mod wang;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{self, GridSpec, MeshFunction};
use crate::linsolve::CyclicFactorization;

pub use mi::{assemble_linear, bootstrap, step_mi, MiScheme};
pub use wang::{energy_wang, energy_wang_printed, step_wang, WangScheme};

/// Two consecutive time levels `(u^{j-1}, u^j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateWindow {
    pub u_prev: MeshFunction,
    pub u_cur: MeshFunction,
    pub t_cur: f64,
}

impl StateWindow {
    pub fn new(u_prev: MeshFunction, u_cur: MeshFunction, t_cur: f64) -> Result<Self> {
        if u_prev.len() != u_cur.len() {
            return Err(Error::Usage(format!(
                "window levels differ in length ({} vs {})",
                u_prev.len(),
                u_cur.len()
            )));
        }
        Ok(StateWindow {
            u_prev,
            u_cur,
            t_cur,
        })
    }

    /// Shifts the window forward by one level.
    pub fn advance(&mut self, u_next: MeshFunction, tau: f64) {
        let cur = std::mem::replace(&mut self.u_cur, u_next);
        self.u_prev = cur;
        self.t_cur += tau;
    }
}

/// How the second initial level `u^1` is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BootstrapMode {
    /// `u^1 = u^0 + tau f_1 + tau^2/2 u_tt(., 0)` with `u_tt` taken from the equation.
    #[default]
    Taylor2,
    /// `u^1` sampled from the exact solution at `t = tau`.
    Exact,
}

impl BootstrapMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            BootstrapMode::Taylor2 => "taylor2",
            BootstrapMode::Exact => "exact",
        }
    }
}

impl fmt::Display for BootstrapMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BootstrapMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "taylor2" => Ok(BootstrapMode::Taylor2),
            "exact" => Ok(BootstrapMode::Exact),
            other => Err(Error::Usage(format!("unknown bootstrap mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Relative max-norm tolerance on successive Picard iterates.
    pub fp_tol: f64,
    pub fp_max_iter: usize,
    pub bootstrap: BootstrapMode,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            fp_tol: 1e-13,
            fp_max_iter: 100,
            bootstrap: BootstrapMode::Taylor2,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.fp_tol > 0.0 && self.fp_tol.is_finite()) {
            return Err(Error::Config(format!(
                "fp_tol = {} must be positive",
                self.fp_tol
            )));
        }
        if self.fp_max_iter == 0 {
            return Err(Error::Config("fp_max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    /// Reduced multisymplectic midpoint (Preissman box) scheme.
    Mi,
    /// Energy-preserving comparison scheme.
    Wang,
}

impl SchemeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SchemeKind::Mi => "mi",
            SchemeKind::Wang => "wang",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Result of one accepted step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub u_next: MeshFunction,
    pub fp_iters: usize,
}

/// A two-step scheme with its linear part already factored.
pub trait TwoStepScheme {
    fn kind(&self) -> SchemeKind;
    fn grid(&self) -> &GridSpec;
    fn step(&self, window: &StateWindow) -> Result<StepOutcome>;
}

/// Picard iteration `A x_{m+1} = b(x_m)`.
///
/// `fill_rhs(x, out)` writes `b(x)`. With `linear` set the right-hand side does
/// not depend on the iterate and a single sweep is exact.
pub(crate) fn picard<F>(
    factor: &CyclicFactorization,
    guess: Vec<Complex64>,
    config: &SolverConfig,
    linear: bool,
    mut fill_rhs: F,
) -> Result<(Vec<Complex64>, usize)>
where
    F: FnMut(&[Complex64], &mut [Complex64]),
{
    let mut x = guess;
    let mut next = vec![Complex64::new(0.0, 0.0); x.len()];
    let mut last_update = f64::INFINITY;
    for sweep in 1..=config.fp_max_iter {
        fill_rhs(&x, &mut next);
        factor.solve_in_place(&mut next)?;
        if !grid::all_finite(&next) {
            return Err(Error::Divergence { iters: sweep });
        }
        last_update = x
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        std::mem::swap(&mut x, &mut next);
        if linear || last_update <= config.fp_tol * grid::max_abs(&x).max(1.0) {
            return Ok((x, sweep));
        }
    }
    Err(Error::NoConvergence {
        iters: config.fp_max_iter,
        residual: last_update,
    })
}

/// Linear extrapolation `2 u^j - u^{j-1}`.
pub(crate) fn extrapolate(window: &StateWindow) -> Vec<Complex64> {
    window
        .u_cur
        .iter()
        .zip(window.u_prev.iter())
        .map(|(c, p)| 2.0 * c - p)
        .collect()
}
