//! Reduced multisymplectic midpoint scheme.
//!
//! Eliminating `v, w, f, g` from the box discretisation leaves one equation
//! per node coupling `u_{k-1}, u_k, u_{k+1}` on levels `j-1, j, j+1`:
//!
//! ```text
//! 1/2 (d_tt u^j_{k+1/2} + d_tt u^j_{k-1/2}) - 1/2 (d_xx u^{j+1/2}_k + d_xx u^{j-1/2}_k)
//!   - i alpha/2 (d_2t u^j_{k+1/2} + d_2t u^j_{k-1/2})
//!   - i theta/2 (d_2x u^{j+1/2}_k + d_2x u^{j-1/2}_k) + gamma d_2t d_2x u^j_k
//!   + lambda/4 [u^{j+1/2}_{k+1/2} + u^{j+1/2}_{k-1/2} + u^{j-1/2}_{k+1/2} + u^{j-1/2}_{k-1/2}]
//!   + beta/4  [|.|^2 . over the same four cell centres] = 0
//! ```

use num_complex::Complex64;

use super::{
    extrapolate, picard, BootstrapMode, SchemeKind, SolverConfig, StateWindow, StepOutcome,
    TwoStepScheme,
};
use crate::error::{Error, Result};
use crate::grid::{self, wrap_next, wrap_prev, GridSpec, MeshFunction};
use crate::linsolve::{CyclicFactorization, CyclicTridiagonalSystem};
use crate::model::PdeParams;

/// Builds `(u^0, u^1)` from the initial data.
pub fn bootstrap<F0, F1>(
    f0: F0,
    f1: F1,
    params: &PdeParams,
    grid: &GridSpec,
    mode: BootstrapMode,
    exact: Option<&dyn Fn(f64, f64) -> Complex64>,
) -> Result<(MeshFunction, MeshFunction)>
where
    F0: Fn(f64) -> Complex64,
    F1: Fn(f64) -> Complex64,
{
    let u0 = MeshFunction::sample(grid, &f0)?;
    let u1 = match mode {
        BootstrapMode::Exact => {
            let exact = exact.ok_or_else(|| Error::MissingExact("bootstrap".into()))?;
            MeshFunction::sample(grid, |x| exact(x, grid.tau))?
        }
        BootstrapMode::Taylor2 => {
            let v0 = MeshFunction::sample(grid, &f1)?;
            let (u, v) = (u0.as_slice(), v0.as_slice());
            let u_xx = grid::second(u, grid.h);
            let u_x = grid::central(u, grid.h);
            let u_tx = grid::central(v, grid.h);
            let i = Complex64::i();
            let tau = grid.tau;
            let vals = (0..grid.k)
                .map(|k| {
                    let u_tt = u_xx[k] - params.gamma * u_tx[k]
                        + i * params.alpha * v[k]
                        + i * params.theta * u_x[k]
                        - params.lambda * u[k]
                        - params.beta * u[k].norm_sqr() * u[k];
                    u[k] + tau * v[k] + 0.5 * tau * tau * u_tt
                })
                .collect();
            MeshFunction::new(vals)?
        }
    };
    Ok((u0, u1))
}

/// Level-`(j+1)` coefficients of every linear term; constant in time.
pub fn assemble_linear(params: &PdeParams, grid: &GridSpec) -> CyclicTridiagonalSystem {
    let (tau, h) = (grid.tau, grid.h);
    let i = Complex64::i();
    let shared = Complex64::new(
        1.0 / (4.0 * tau * tau) - 1.0 / (4.0 * h * h) + params.lambda / 16.0,
        -params.alpha / (8.0 * tau),
    );
    let skew = -i * params.theta / (8.0 * h) + params.gamma / (4.0 * tau * h);
    let diag = Complex64::new(
        1.0 / (2.0 * tau * tau) + 1.0 / (2.0 * h * h) + params.lambda / 8.0,
        -params.alpha / (4.0 * tau),
    );
    CyclicTridiagonalSystem::uniform(grid.k, shared - skew, diag, shared + skew)
        .expect("grid guarantees K >= 4")
}

/// Linear terms of the scheme at every node.
pub(crate) fn linear_terms(
    prev: &[Complex64],
    cur: &[Complex64],
    next: &[Complex64],
    params: &PdeParams,
    grid: &GridSpec,
) -> Vec<Complex64> {
    let n = prev.len();
    let (tau, h) = (grid.tau, grid.h);
    let i = Complex64::i();
    // 1-2-1 sums in space per level, and in time per node
    let s = |u: &[Complex64], k: usize| u[wrap_next(k, n)] + 2.0 * u[k] + u[wrap_prev(k, n)];
    let w: Vec<Complex64> = (0..n).map(|k| next[k] + 2.0 * cur[k] + prev[k]).collect();
    let c_tt = 1.0 / (4.0 * tau * tau);
    let c_xx = 1.0 / (4.0 * h * h);
    let c_alpha = -i * params.alpha / (8.0 * tau);
    let c_theta = -i * params.theta / (8.0 * h);
    let c_gamma = params.gamma / (4.0 * tau * h);
    let c_lambda = params.lambda / 16.0;
    (0..n)
        .map(|k| {
            let (kp, km) = (wrap_next(k, n), wrap_prev(k, n));
            let (sn, sc, sp) = (s(next, k), s(cur, k), s(prev, k));
            c_tt * (sn - 2.0 * sc + sp) - c_xx * (w[kp] - 2.0 * w[k] + w[km])
                + c_alpha * (sn - sp)
                + c_theta * (w[kp] - w[km])
                + c_gamma * (next[kp] - next[km] - prev[kp] + prev[km])
                + c_lambda * (w[kp] + 2.0 * w[k] + w[km])
        })
        .collect()
}

#[inline]
fn cube(z: Complex64) -> Complex64 {
    z.norm_sqr() * z
}

/// `|c|^2 c` summed over the two cell centres `(k+1/2, j +- 1/2)`, indexed by `k`.
fn cell_cubes(a: &[Complex64], b: &[Complex64], out: &mut [Complex64]) {
    let n = a.len();
    for k in 0..n {
        let kp = wrap_next(k, n);
        out[k] = cube(0.25 * (a[k] + a[kp] + b[k] + b[kp]));
    }
}

/// Full scheme residual at every node for three given levels.
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
    Ok(residual_slices(
        u_prev.as_slice(),
        u_cur.as_slice(),
        u_next.as_slice(),
        params,
        grid,
    ))
}

pub(crate) fn residual_slices(
    prev: &[Complex64],
    cur: &[Complex64],
    next: &[Complex64],
    params: &PdeParams,
    grid: &GridSpec,
) -> Vec<Complex64> {
    let n = prev.len();
    let mut r = linear_terms(prev, cur, next, params, grid);
    if params.beta != 0.0 {
        let mut upper = vec![Complex64::new(0.0, 0.0); n];
        let mut lower = vec![Complex64::new(0.0, 0.0); n];
        cell_cubes(cur, next, &mut upper);
        cell_cubes(prev, cur, &mut lower);
        let c = 0.25 * params.beta;
        for k in 0..n {
            let km = wrap_prev(k, n);
            r[k] += c * (upper[k] + lower[k] + upper[km] + lower[km]);
        }
    }
    r
}

/// Advances one step: Picard iteration with the factored linear part.
pub fn step_mi(
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
    let mut lower = vec![Complex64::new(0.0, 0.0); n];
    cell_cubes(prev, cur, &mut lower);
    let mut upper = vec![Complex64::new(0.0, 0.0); n];

    let (u_next, fp_iters) = picard(
        factor,
        extrapolate(window),
        config,
        params.beta == 0.0,
        |x, rhs| {
            if beta == 0.0 {
                for (r, b) in rhs.iter_mut().zip(&known) {
                    *r = -b;
                }
                return;
            }
            cell_cubes(cur, x, &mut upper);
            for k in 0..n {
                let km = wrap_prev(k, n);
                rhs[k] = -known[k] - beta * (upper[k] + lower[k] + upper[km] + lower[km]);
            }
        },
    )?;
    Ok(StepOutcome {
        u_next: MeshFunction::from_vec_unchecked(u_next),
        fp_iters,
    })
}

/// The scheme bound to one parameter set and grid, with its linear part factored.
#[derive(Debug, Clone)]
pub struct MiScheme {
    params: PdeParams,
    grid: GridSpec,
    config: SolverConfig,
    system: CyclicTridiagonalSystem,
    factor: CyclicFactorization,
}

impl MiScheme {
    pub fn new(params: PdeParams, grid: GridSpec, config: SolverConfig) -> Result<Self> {
        params.validate()?;
        config.validate()?;
        let system = assemble_linear(&params, &grid);
        let factor = system.factor()?;
        Ok(MiScheme {
            params,
            grid,
            config,
            system,
            factor,
        })
    }

    pub fn system(&self) -> &CyclicTridiagonalSystem {
        &self.system
    }

    pub fn params(&self) -> &PdeParams {
        &self.params
    }
}

impl TwoStepScheme for MiScheme {
    fn kind(&self) -> SchemeKind {
        SchemeKind::Mi
    }

    fn grid(&self) -> &GridSpec {
        &self.grid
    }

    fn step(&self, window: &StateWindow) -> Result<StepOutcome> {
        step_mi(window, &self.factor, &self.params, &self.grid, &self.config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn linear_plane() -> PdeParams {
        PdeParams::new(-1.0, 1.0, -1.0, 3.0, 0.0).unwrap()
    }

    fn wave(grid: &GridSpec, t: f64) -> MeshFunction {
        MeshFunction::sample(grid, |x| Complex64::from_polar(1.0, x - 3.0 * t)).unwrap()
    }

    #[test]
    fn diagonal_coefficient() {
        let p = PdeParams::new(0.7, 0.4, -1.3, 2.0, 1.0).unwrap();
        let g = GridSpec::new(0.0, 1.0, 16, 1.0, 50).unwrap();
        let sys = assemble_linear(&p, &g);
        let (tau, h) = (g.tau, g.h);
        let expected = Complex64::new(
            1.0 / (2.0 * tau * tau) + 1.0 / (2.0 * h * h) + p.lambda / 8.0,
            -p.alpha / (4.0 * tau),
        );
        assert!((sys.diag[3] - expected).norm() < 1e-12 * expected.norm());
    }

    #[test]
    fn symmetric_without_first_order_terms() {
        let p = PdeParams::new(0.0, 0.0, 0.0, 0.0, 1.0).unwrap();
        let g = GridSpec::new(0.0, 1.0, 16, 1.0, 50).unwrap();
        let sys = assemble_linear(&p, &g);
        let off = 1.0 / (4.0 * g.tau * g.tau) - 1.0 / (4.0 * g.h * g.h);
        assert_eq!(sys.upper, sys.lower);
        assert!((sys.upper[0].re - off).abs() < 1e-12 * off.abs());
        assert_eq!(sys.upper[0].im, 0.0);
    }

    #[test]
    fn theta_only_shifts_off_diagonals() {
        let g = GridSpec::new(0.0, 1.0, 16, 1.0, 50).unwrap();
        let base = assemble_linear(&PdeParams::new(0.0, 0.0, 0.0, 0.0, 0.0).unwrap(), &g);
        let theta = 0.9;
        let sys = assemble_linear(&PdeParams::new(0.0, 0.0, theta, 0.0, 0.0).unwrap(), &g);
        let shift = Complex64::new(0.0, theta / (8.0 * g.h));
        assert_eq!(sys.diag, base.diag);
        assert!((sys.upper[0] - base.upper[0] + shift).norm() < 1e-12);
        assert!((sys.lower[0] - base.lower[0] - shift).norm() < 1e-12);
    }

    #[test]
    fn assembled_matrix_matches_residual_dependence() {
        // residual is affine in u_next with exactly the assembled operator when beta = 0
        let p = PdeParams::new(-0.8, 1.2, 0.6, -2.0, 0.0).unwrap();
        let g = GridSpec::new(-1.0, 2.0, 12, 1.0, 40).unwrap();
        let f = |s: f64| {
            MeshFunction::sample(&g, |x| Complex64::new((x * s).sin(), (x + s).cos())).unwrap()
        };
        let (a, b, x) = (f(0.3), f(1.1), f(2.4));
        let r0 = scheme_residual(&a, &b, &MeshFunction::zeros(g.k), &p, &g).unwrap();
        let r1 = scheme_residual(&a, &b, &x, &p, &g).unwrap();
        let ax = assemble_linear(&p, &g).apply(x.as_slice());
        for k in 0..g.k {
            assert!((r1[k] - r0[k] - ax[k]).norm() < 1e-9 * ax[k].norm().max(1.0));
        }
    }

    #[test]
    fn zero_data_stays_zero() {
        let p = PdeParams::new(-1.0, 0.0, 0.0, 0.0, 2.0).unwrap();
        let g = GridSpec::new(0.0, 2.0 * PI, 32, 1.0, 100).unwrap();
        let scheme = MiScheme::new(p, g, SolverConfig::default()).unwrap();
        let w = StateWindow::new(MeshFunction::zeros(32), MeshFunction::zeros(32), g.tau).unwrap();
        let out = scheme.step(&w).unwrap();
        assert!(out.u_next.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn one_linear_step_tracks_plane_wave() {
        let g = GridSpec::new(0.0, 2.0 * PI, 256, 1.0, 200).unwrap();
        assert!((g.tau - 0.005).abs() < 1e-15);
        let scheme = MiScheme::new(linear_plane(), g, SolverConfig::default()).unwrap();
        let t = 0.5;
        let w = StateWindow::new(wave(&g, t - g.tau), wave(&g, t), t).unwrap();
        let out = scheme.step(&w).unwrap();
        assert_eq!(out.fp_iters, 1);
        let exact = wave(&g, t + g.tau);
        let err = out
            .u_next
            .iter()
            .zip(exact.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err <= 1e-6, "{err}");
    }

    #[test]
    fn taylor_bootstrap_is_third_order_locally() {
        let g = GridSpec::new(0.0, 2.0 * PI, 256, 1.0, 200).unwrap();
        let (_, u1) = bootstrap(
            |x| Complex64::from_polar(1.0, x),
            |x| Complex64::new(0.0, -3.0) * Complex64::from_polar(1.0, x),
            &linear_plane(),
            &g,
            BootstrapMode::Taylor2,
            None,
        )
        .unwrap();
        let exact = wave(&g, g.tau);
        let err = u1
            .iter()
            .zip(exact.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err <= 1e-6, "{err}");
    }

    #[test]
    fn bootstrap_without_velocity_tends_to_initial_level() {
        let p = PdeParams::new(-1.0, 0.0, 0.0, 0.0, 1.0).unwrap();
        let f0 = |x: f64| Complex64::new((-x * x).exp(), 0.0);
        let mut last = f64::INFINITY;
        for j in [10, 100, 1000] {
            let g = GridSpec::new(-5.0, 5.0, 64, 1.0, j).unwrap();
            let (u0, u1) = bootstrap(
                f0,
                |_| Complex64::new(0.0, 0.0),
                &p,
                &g,
                BootstrapMode::Taylor2,
                None,
            )
            .unwrap();
            let d = u0
                .iter()
                .zip(u1.iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(d < last);
            last = d;
        }
        assert!(last < 1e-5);
    }

    #[test]
    fn exact_bootstrap_samples_solution() {
        let p = PdeParams::new(-1.0, 1.0, -1.0, 1.0, 2.0).unwrap();
        let g = GridSpec::new(0.0, 2.0 * PI, 64, 1.0, 100).unwrap();
        let exact = |x: f64, t: f64| Complex64::from_polar(1.0, x + t);
        let (_, u1) = bootstrap(
            |x| exact(x, 0.0),
            |x| Complex64::i() * exact(x, 0.0),
            &p,
            &g,
            BootstrapMode::Exact,
            Some(&exact),
        )
        .unwrap();
        for (k, x) in g.nodes().enumerate() {
            assert_eq!(u1[k], exact(x, g.tau));
        }
        let missing = bootstrap(
            |_| Complex64::new(0.0, 0.0),
            |_| Complex64::new(0.0, 0.0),
            &p,
            &g,
            BootstrapMode::Exact,
            None,
        );
        assert!(matches!(missing, Err(Error::MissingExact(_))));
    }
}
