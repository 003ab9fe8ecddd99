//! Strategies and independent oracles shared by the property and acceptance suites.
#![allow(dead_code, clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::PI;

use msnls_core::grid::{apply_difference, inner_product, DiffKind, GridSpec, MeshFunction};
use msnls_core::model::{grad_s, hamiltonian_s, PdeParams, ZPoint};
use msnls_core::scheme::{SolverConfig, StateWindow, TwoStepScheme};
use msnls_core::{Complex64, CyclicTridiagonalSystem, MiScheme};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub const CASES: u32 = 100;

pub fn field(len: usize, amp: f64) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-amp..amp, -amp..amp), len).prop_map(|v| {
        v.into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect()
    })
}

pub fn params() -> impl Strategy<Value = PdeParams> {
    (
        -1.5..1.5f64,
        -1.5..1.5f64,
        -1.5..1.5f64,
        -1.0..3.0f64,
        0.0..2.5f64,
    )
        .prop_map(|(a, g, t, l, b)| PdeParams::new(a, g, t, l, b).unwrap())
}

pub fn mesh(v: &[Complex64]) -> MeshFunction {
    MeshFunction::new(v.to_vec()).unwrap()
}

pub fn diff(kind: DiffKind, u: &[Complex64], g: &GridSpec) -> Vec<Complex64> {
    apply_difference(kind, &mesh(u), g).unwrap().into_vec()
}

pub fn ip(u: &[Complex64], v: &[Complex64], g: &GridSpec) -> Complex64 {
    inner_product(&mesh(u), &mesh(v), g).unwrap()
}

pub fn max_dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub const K: usize = 24;

pub fn grid24() -> GridSpec {
    GridSpec::new(0.0, 2.0 * PI, K, 1.0, 100).unwrap()
}

/// Literal evaluation of every term of the reduced midpoint scheme from
/// half-point averages, sharing no code with the library. Returns the
/// residual and the largest per-node sum of term magnitudes.
pub fn midpoint_residual_oracle(
    prev: &[Complex64],
    cur: &[Complex64],
    next: &[Complex64],
    p: &PdeParams,
    g: &GridSpec,
) -> (Vec<Complex64>, f64) {
    let n = prev.len();
    let (tau, h) = (g.tau, g.h);
    let i = Complex64::i();
    let at = |u: &[Complex64], k: isize| u[k.rem_euclid(n as isize) as usize];
    let half_x = |u: &[Complex64], k: isize| 0.5 * (at(u, k) + at(u, k + 1));
    let half_t = |a: &[Complex64], b: &[Complex64], k: isize| 0.5 * (at(a, k) + at(b, k));
    let box_c = |a: &[Complex64], b: &[Complex64], k: isize| 0.5 * (half_x(a, k) + half_x(b, k));
    let mut out = Vec::with_capacity(n);
    let mut scale = 0.0f64;
    for k in 0..n as isize {
        let dtt =
            |k: isize| (half_x(next, k) - 2.0 * half_x(cur, k) + half_x(prev, k)) / (tau * tau);
        let d2t = |k: isize| (half_x(next, k) - half_x(prev, k)) / (2.0 * tau);
        let dxx = |a: &[Complex64], b: &[Complex64]| {
            (half_t(a, b, k + 1) - 2.0 * half_t(a, b, k) + half_t(a, b, k - 1)) / (h * h)
        };
        let d2x = |a: &[Complex64], b: &[Complex64]| {
            (half_t(a, b, k + 1) - half_t(a, b, k - 1)) / (2.0 * h)
        };
        let mixed = (at(next, k + 1) - at(next, k - 1) - at(prev, k + 1) + at(prev, k - 1))
            / (4.0 * tau * h);
        let corners = [
            box_c(cur, next, k),
            box_c(cur, next, k - 1),
            box_c(prev, cur, k),
            box_c(prev, cur, k - 1),
        ];
        let terms = [
            0.5 * (dtt(k) + dtt(k - 1)),
            -0.5 * (dxx(cur, next) + dxx(prev, cur)),
            -0.5 * i * p.alpha * (d2t(k) + d2t(k - 1)),
            -0.5 * i * p.theta * (d2x(cur, next) + d2x(prev, cur)),
            p.gamma * mixed,
            0.25 * p.lambda * corners.iter().sum::<Complex64>(),
            0.25 * p.beta * corners.iter().map(|c| c.norm_sqr() * c).sum::<Complex64>(),
        ];
        scale = scale.max(terms.iter().map(|t| t.norm()).sum());
        out.push(terms.iter().sum());
    }
    (out, scale)
}

/// Dense Gaussian elimination with partial pivoting.
pub fn dense_solve(mut a: Vec<Vec<Complex64>>, b: &[Complex64]) -> Vec<Complex64> {
    let n = b.len();
    for (row, v) in a.iter_mut().zip(b) {
        row.push(*v);
    }
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].norm().partial_cmp(&a[j][col].norm()).unwrap())
            .unwrap();
        a.swap(col, piv);
        let pivot_row = a[col].clone();
        for row in a.iter_mut().skip(col + 1) {
            let f = row[col] / pivot_row[col];
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(col) {
                *x -= f * p;
            }
        }
    }
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let s: Complex64 = (row + 1..n).map(|c| a[row][c] * y[c]).sum();
        y[row] = (a[row][n] - s) / a[row][row];
    }
    y
}

pub fn nonlinear_grid() -> GridSpec {
    GridSpec::new(0.0, 2.0 * PI, 16, 0.2, 20).unwrap()
}

/// Two smooth levels built from a few low modes, keeping Picard in its contraction regime.
pub fn smooth_levels(coef: &[Complex64], g: &GridSpec) -> (MeshFunction, MeshFunction) {
    let level = |shift: f64| {
        MeshFunction::sample(g, |x| {
            coef.iter()
                .enumerate()
                .map(|(m, c)| {
                    c * Complex64::from_polar(1.0, m as f64 * x - shift * (m as f64 + 1.0))
                })
                .sum()
        })
        .unwrap()
    };
    (level(0.0), level(g.tau))
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(TestCaseError::fail(format!($($fmt)+)));
        }
    };
}

/// Summation by parts, skew-adjointness of the centred and half-point
/// pairings, and the temporal second-difference identity.
pub fn check_green_identities(
    u: &[Complex64],
    v: &[Complex64],
    w: &[Complex64],
    tau: f64,
) -> Result<(), TestCaseError> {
    let g = grid24();
    let lhs = ip(&diff(DiffKind::Second, u, &g), v, &g);
    let rhs = -ip(
        &diff(DiffKind::Backward, u, &g),
        &diff(DiffKind::Backward, v, &g),
        &g,
    );
    ensure!(
        (lhs - rhs).norm() <= 1e-12 * lhs.norm().max(rhs.norm()).max(1.0),
        "green: {lhs} vs {rhs}"
    );

    let du = diff(DiffKind::Central, u, &g);
    let dv = diff(DiffKind::Central, v, &g);
    ensure!(
        (ip(&du, v, &g) + ip(u, &dv, &g)).norm() <= 1e-12,
        "central difference not skew"
    );
    ensure!(
        ip(&du, u, &g).re.abs() <= 1e-12,
        "central pairing not imaginary"
    );

    let half = ip(
        &diff(DiffKind::HalfAverage, u, &g),
        &diff(DiffKind::HalfForward, u, &g),
        &g,
    );
    ensure!(
        half.re.abs() <= 1e-12 * half.norm().max(1.0),
        "half-point pairing not imaginary: {half}"
    );

    let (a, b, c) = (u, v, w);
    let n = a.len();
    let dtt: Vec<Complex64> = (0..n)
        .map(|k| (a[k] - 2.0 * b[k] + c[k]) / (tau * tau))
        .collect();
    let d2t: Vec<Complex64> = (0..n).map(|k| (a[k] - c[k]) / (2.0 * tau)).collect();
    let up: Vec<Complex64> = (0..n).map(|k| (a[k] - b[k]) / tau).collect();
    let down: Vec<Complex64> = (0..n).map(|k| (b[k] - c[k]) / tau).collect();
    let lhs = ip(&dtt, &d2t, &g).re;
    let rhs = (ip(&up, &up, &g).re - ip(&down, &down, &g).re) / (2.0 * tau);
    let scale = ip(&up, &up, &g).re.max(ip(&down, &down, &g).re) / tau;
    ensure!(
        (lhs - rhs).abs() <= 1e-12 * scale.max(1.0),
        "temporal identity: {lhs} vs {rhs}"
    );
    Ok(())
}

pub fn check_gradient(z: &ZPoint, p: &PdeParams) -> Result<(), TestCaseError> {
    let grad = grad_s(z, p);
    for m in 0..6 {
        let d = 1e-6 * (1.0 + z[m].abs());
        let (mut zp, mut zm) = (*z, *z);
        zp[m] += d;
        zm[m] -= d;
        let fd = (hamiltonian_s(&zp, p) - hamiltonian_s(&zm, p)) / (2.0 * d);
        ensure!(
            (fd - grad[m]).abs() <= 1e-6 * grad[m].abs().max(1.0),
            "component {m}: {fd} vs {}",
            grad[m]
        );
    }
    Ok(())
}

/// `seed` supplies three bands of up to 40 entries; the diagonal is shifted to keep the system regular.
pub fn check_cyclic_vs_dense(
    n: usize,
    seed: &[Complex64],
    rhs: &[Complex64],
) -> Result<(), TestCaseError> {
    let lower = seed[..n].to_vec();
    let upper = seed[40..40 + n].to_vec();
    let diag: Vec<Complex64> = (0..n)
        .map(|k| seed[80 + k] + Complex64::new(2.5 + lower[k].norm() + upper[k].norm(), 0.0))
        .collect();
    let sys = CyclicTridiagonalSystem::new(lower.clone(), diag.clone(), upper.clone()).unwrap();
    let b = &rhs[..n];
    let x = sys.factor().unwrap().solve(b).unwrap();
    let mut a = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for k in 0..n {
        a[k][(k + n - 1) % n] += lower[k];
        a[k][k] += diag[k];
        a[k][(k + 1) % n] += upper[k];
    }
    let y = dense_solve(a, b);
    let err = max_dist(&x, &y);
    ensure!(
        err <= 1e-12 * max_abs(&y).max(1.0),
        "n = {n}: difference {err:e}"
    );
    Ok(())
}

pub fn check_gauge_covariance(
    coef: &[Complex64],
    p: PdeParams,
    phase: f64,
) -> Result<(), TestCaseError> {
    let g = nonlinear_grid();
    let scheme = MiScheme::new(p, g, SolverConfig::default()).unwrap();
    let (u0, u1) = smooth_levels(coef, &g);
    let c = Complex64::from_polar(1.0, phase);
    let plain = scheme
        .step(&StateWindow::new(u0.clone(), u1.clone(), g.tau).unwrap())
        .unwrap();
    let rotated = scheme
        .step(&StateWindow::new(u0.scale(c), u1.scale(c), g.tau).unwrap())
        .unwrap();
    let expect = plain.u_next.scale(c);
    let err = max_dist(rotated.u_next.as_slice(), expect.as_slice());
    ensure!(err <= 1e-12, "gauge defect {err:e}");
    Ok(())
}

/// Three accepted steps, each re-checked against the literal residual.
pub fn check_accepted_steps(coef: &[Complex64], p: PdeParams) -> Result<(), TestCaseError> {
    let g = nonlinear_grid();
    let config = SolverConfig::default();
    let scheme = MiScheme::new(p, g, config).unwrap();
    let (u0, u1) = smooth_levels(coef, &g);
    let mut w = StateWindow::new(u0, u1, g.tau).unwrap();
    for _ in 0..3 {
        let out = scheme.step(&w).unwrap();
        let (r, _) = midpoint_residual_oracle(
            w.u_prev.as_slice(),
            w.u_cur.as_slice(),
            out.u_next.as_slice(),
            &p,
            &g,
        );
        let scale = scheme.system().norm_inf() * out.u_next.max_abs().max(1.0);
        ensure!(
            max_abs(&r) <= 10.0 * config.fp_tol * scale,
            "residual {:e} against scale {scale:e}",
            max_abs(&r)
        );
        w.advance(out.u_next, g.tau);
    }
    Ok(())
}
