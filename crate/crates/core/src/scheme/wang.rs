//! Energy-preserving three-level comparison scheme:
//!
//! ```text
//! d_tt u^j - 1/2 d_xx (u^{j+1} + u^{j-1}) - i alpha (u^{j+1} - u^{j-1}) / (2 tau)
//!   - i theta/2 d_2x (u^{j+1} + u^{j-1}) + gamma d_2x (u^{j+1} - u^{j-1}) / (2 tau)
//!   + lambda/2 (u^{j+1} + u^{j-1})
//!   + beta/4 (|u^{j+1}|^2 + |u^{j-1}|^2)(u^{j+1} + u^{j-1}) = 0
//! ```
//!
//! Pairing with `conj(u^{j+1} - u^{j-1})` telescopes to [`energy_wang`].

use num_complex::Complex64;

use super::{
    extrapolate, picard, SchemeKind, SolverConfig, StateWindow, StepOutcome, TwoStepScheme,
};
use crate::error::Result;
use crate::grid::{self, wrap_next, wrap_prev, GridSpec, MeshFunction};
use crate::linsolve::{CyclicFactorization, CyclicTridiagonalSystem};
use crate::model::PdeParams;

pub fn assemble_linear(params: &PdeParams, grid: &GridSpec) -> CyclicTridiagonalSystem {
    let (tau, h) = (grid.tau, grid.h);
    let diag = Complex64::new(
        1.0 / (tau * tau) + 1.0 / (h * h) + 0.5 * params.lambda,
        -params.alpha / (2.0 * tau),
    );
    let off = Complex64::new(-0.5 / (h * h), 0.0);
    let skew = Complex64::new(params.gamma / (4.0 * tau * h), -params.theta / (4.0 * h));
    CyclicTridiagonalSystem::uniform(grid.k, off - skew, diag, off + skew)
        .expect("grid guarantees K >= 4")
}

/// Linear terms of the scheme at every node.
fn linear_terms(
    prev: &[Complex64],
    cur: &[Complex64],
    next: &[Complex64],
    params: &PdeParams,
    grid: &GridSpec,
) -> Vec<Complex64> {
    let n = prev.len();
    let (tau, h) = (grid.tau, grid.h);
    let i = Complex64::i();
    (0..n)
        .map(|k| {
            let (kp, km) = (wrap_next(k, n), wrap_prev(k, n));
            let a_xx = (next[kp] - 2.0 * next[k] + next[km]) / (h * h);
            let c_xx = (prev[kp] - 2.0 * prev[k] + prev[km]) / (h * h);
            let a_x = (next[kp] - next[km]) / (2.0 * h);
            let c_x = (prev[kp] - prev[km]) / (2.0 * h);
            (next[k] - 2.0 * cur[k] + prev[k]) / (tau * tau)
                - 0.5 * (a_xx + c_xx)
                - i * params.alpha * (next[k] - prev[k]) / (2.0 * tau)
                - 0.5 * i * params.theta * (a_x + c_x)
                + params.gamma * (a_x - c_x) / (2.0 * tau)
                + 0.5 * params.lambda * (next[k] + prev[k])
        })
        .collect()
}

/// Scheme residual at every node.
pub fn scheme_residual(
    u_prev: &MeshFunction,
    u_cur: &MeshFunction,
    u_next: &MeshFunction,
    params: &PdeParams,
    grid: &GridSpec,
) -> Result<Vec<Complex64>> {
    for (u, what) in [(u_prev, "u_prev"), (u_cur, "u_cur"), (u_next, "u_next")] {
        grid.check_len(u.len(), what)?;
    }
    let (a, c) = (u_next.as_slice(), u_prev.as_slice());
    let mut r = linear_terms(c, u_cur.as_slice(), a, params, grid);
    for k in 0..r.len() {
        r[k] += 0.25 * params.beta * (a[k].norm_sqr() + c[k].norm_sqr()) * (a[k] + c[k]);
    }
    Ok(r)
}

pub fn step_wang(
    window: &StateWindow,
    factor: &CyclicFactorization,
    params: &PdeParams,
    grid: &GridSpec,
    config: &SolverConfig,
) -> Result<StepOutcome> {
    grid.check_len(window.u_prev.len(), "u_prev")?;
    grid.check_len(window.u_cur.len(), "u_cur")?;
    let n = grid.k;
    let (prev, cur) = (window.u_prev.as_slice(), window.u_cur.as_slice());
    let zero = vec![Complex64::new(0.0, 0.0); n];
    let known = linear_terms(prev, cur, &zero, params, grid);
    let beta = 0.25 * params.beta;

    let (u_next, fp_iters) = picard(
        factor,
        extrapolate(window),
        config,
        params.beta == 0.0,
        |x, rhs| {
            for k in 0..n {
                rhs[k] =
                    -known[k] - beta * (x[k].norm_sqr() + prev[k].norm_sqr()) * (x[k] + prev[k]);
            }
        },
    )?;
    Ok(StepOutcome {
        u_next: MeshFunction::from_vec_unchecked(u_next),
        fp_iters,
    })
}

fn check_pair(u_cur: &MeshFunction, u_next: &MeshFunction, grid: &GridSpec) -> Result<()> {
    grid.check_len(u_cur.len(), "u_cur")?;
    grid.check_len(u_next.len(), "u_next")
}

// Terms shared by both energy variants: kinetic, gradient, theta and lambda.
fn energy_common(a: &[Complex64], b: &[Complex64], params: &PdeParams, grid: &GridSpec) -> f64 {
    let (h, tau) = (grid.h, grid.tau);
    let dt: Vec<Complex64> = a.iter().zip(b).map(|(a, b)| (a - b) / tau).collect();
    let skew = |u: &[Complex64]| grid::inner(&grid::central(u, h), u, h).im;
    grid::norm_sq(&dt, h)
        + 0.5 * (grid::norm_sq(&grid::forward(a, h), h) + grid::norm_sq(&grid::forward(b, h), h))
        + 0.5 * params.theta * (skew(a) + skew(b))
        + 0.5 * params.lambda * (grid::norm_sq(a, h) + grid::norm_sq(b, h))
}

/// Two-level energy that the scheme conserves exactly.
pub fn energy_wang(
    u_cur: &MeshFunction,
    u_next: &MeshFunction,
    params: &PdeParams,
    grid: &GridSpec,
) -> Result<f64> {
    check_pair(u_cur, u_next, grid)?;
    let (a, b) = (u_next.as_slice(), u_cur.as_slice());
    let quartic: f64 = a
        .iter()
        .zip(b)
        .map(|(a, b)| a.norm_sqr().powi(2) + b.norm_sqr().powi(2))
        .sum();
    Ok(energy_common(a, b, params, grid) + 0.25 * params.beta * grid.h * quartic)
}

/// Variant whose quartic term uses only the older level, `beta/2 h sum |u^j|^4`.
pub fn energy_wang_printed(
    u_cur: &MeshFunction,
    u_next: &MeshFunction,
    params: &PdeParams,
    grid: &GridSpec,
) -> Result<f64> {
    check_pair(u_cur, u_next, grid)?;
    let (a, b) = (u_next.as_slice(), u_cur.as_slice());
    let quartic: f64 = b.iter().map(|b| b.norm_sqr().powi(2)).sum();
    Ok(energy_common(a, b, params, grid) + 0.5 * params.beta * grid.h * quartic)
}

#[derive(Debug, Clone)]
pub struct WangScheme {
    params: PdeParams,
    grid: GridSpec,
    config: SolverConfig,
    factor: CyclicFactorization,
}

impl WangScheme {
    pub fn new(params: PdeParams, grid: GridSpec, config: SolverConfig) -> Result<Self> {
        params.validate()?;
        config.validate()?;
        let factor = assemble_linear(&params, &grid).factor()?;
        Ok(WangScheme {
            params,
            grid,
            config,
            factor,
        })
    }

    pub fn params(&self) -> &PdeParams {
        &self.params
    }
}

impl TwoStepScheme for WangScheme {
    fn kind(&self) -> SchemeKind {
        SchemeKind::Wang
    }

    fn grid(&self) -> &GridSpec {
        &self.grid
    }

    fn step(&self, window: &StateWindow) -> Result<StepOutcome> {
        step_wang(window, &self.factor, &self.params, &self.grid, &self.config)
    }
}
