//! Equation coefficients, the first-order multisymplectic form and its local
//! conservation-law densities.
//!
//! The equation is
//!
//! ```text
//! u_tt - u_xx + gamma u_tx - i alpha u_t - i theta u_x + lambda u + beta |u|^2 u = 0
//! ```
//!
//! and the real state `z = (phi, psi, v, w, f, g)` carries `u = phi + i psi`,
//! `u_t = v + i w`, `u_x = f + i g`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{self, GridSpec, MeshFunction};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeParams {
    pub alpha: f64,
    pub gamma: f64,
    pub theta: f64,
    pub lambda: f64,
    pub beta: f64,
}

impl PdeParams {
    pub fn new(alpha: f64, gamma: f64, theta: f64, lambda: f64, beta: f64) -> Result<Self> {
        let p = PdeParams {
            alpha,
            gamma,
            theta,
            lambda,
            beta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.alpha, self.gamma, self.theta, self.lambda, self.beta];
        if all.iter().any(|c| !c.is_finite()) {
            return Err(Error::Config("equation coefficients must be finite".into()));
        }
        // eliminating (v, w, f, g) divides by 1 - gamma^2 / 4
        if (1.0 - 0.25 * self.gamma * self.gamma).abs() < 1e-12 {
            return Err(Error::Config(format!(
                "|gamma| = 2 makes the multisymplectic form degenerate (1 - gamma^2/4 = 0), got gamma = {}",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// Default differencing step for [`continuous_residual`].
pub const RESIDUAL_FD_STEP: f64 = 1e-3;

/// Left-hand side of the equation for `u` at `(x, t)`, derivatives by
/// fourth-order central differences.
pub fn continuous_residual<F>(u: F, params: &PdeParams, x: f64, t: f64) -> Complex64
where
    F: Fn(f64, f64) -> Complex64,
{
    continuous_residual_with_step(u, params, x, t, RESIDUAL_FD_STEP)
}

pub fn continuous_residual_with_step<F>(
    u: F,
    params: &PdeParams,
    x: f64,
    t: f64,
    d: f64,
) -> Complex64
where
    F: Fn(f64, f64) -> Complex64,
{
    // 4th-order weights on offsets -2..=2
    const D1: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];
    const D2: [f64; 5] = [-1.0, 16.0, -30.0, 16.0, -1.0];
    let off = |i: usize| (i as f64 - 2.0) * d;

    let mut u_t = Complex64::new(0.0, 0.0);
    let mut u_x = Complex64::new(0.0, 0.0);
    let mut u_tt = Complex64::new(0.0, 0.0);
    let mut u_xx = Complex64::new(0.0, 0.0);
    let mut u_tx = Complex64::new(0.0, 0.0);
    for i in 0..5 {
        let ut = u(x, t + off(i));
        let ux = u(x + off(i), t);
        u_t += D1[i] * ut;
        u_tt += D2[i] * ut;
        u_x += D1[i] * ux;
        u_xx += D2[i] * ux;
        for (m, dm) in D1.iter().enumerate() {
            if D1[i] != 0.0 && *dm != 0.0 {
                u_tx += D1[i] * dm * u(x + off(m), t + off(i));
            }
        }
    }
    u_t /= 12.0 * d;
    u_x /= 12.0 * d;
    u_tt /= 12.0 * d * d;
    u_xx /= 12.0 * d * d;
    u_tx /= 144.0 * d * d;

    let i = Complex64::i();
    let u0 = u(x, t);
    u_tt - u_xx + params.gamma * u_tx - i * params.alpha * u_t - i * params.theta * u_x
        + params.lambda * u0
        + params.beta * u0.norm_sqr() * u0
}

/// One point of the state `z = (phi, psi, v, w, f, g)`.
pub type ZPoint = [f64; 6];

/// `S(z) = -1/2 [lambda rho + beta/2 rho^2 + v^2 + w^2 - f^2 - g^2 + gamma (v f + w g)]`, `rho = phi^2 + psi^2`.
pub fn hamiltonian_s(z: &ZPoint, p: &PdeParams) -> f64 {
    let [phi, psi, v, w, f, g] = *z;
    let rho = phi * phi + psi * psi;
    -0.5 * (p.lambda * rho + 0.5 * p.beta * rho * rho + v * v + w * w - (f * f + g * g)
        + p.gamma * (v * f + w * g))
}

pub fn grad_s(z: &ZPoint, p: &PdeParams) -> ZPoint {
    let [phi, psi, v, w, f, g] = *z;
    let rho = phi * phi + psi * psi;
    let hg = 0.5 * p.gamma;
    [
        -p.lambda * phi - p.beta * rho * phi,
        -p.lambda * psi - p.beta * rho * psi,
        -v - hg * f,
        -w - hg * g,
        f - hg * v,
        g - hg * w,
    ]
}

pub type Matrix6 = [[f64; 6]; 6];

/// The skew-symmetric pair `(M, K)` of `M z_t + K z_x = grad S(z)`.
pub fn structure_matrices(p: &PdeParams) -> (Matrix6, Matrix6) {
    let (a, hg, th) = (p.alpha, 0.5 * p.gamma, p.theta);
    let m = [
        [0.0, a, 1.0, 0.0, hg, 0.0],
        [-a, 0.0, 0.0, 1.0, 0.0, hg],
        [-1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 0.0, 0.0, 0.0],
        [-hg, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, -hg, 0.0, 0.0, 0.0, 0.0],
    ];
    let k = [
        [0.0, th, hg, 0.0, -1.0, 0.0],
        [-th, 0.0, 0.0, hg, 0.0, -1.0],
        [-hg, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, -hg, 0.0, 0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
    ];
    (m, k)
}

/// Energy density/flux `(E, F)` and momentum density/flux `(I, G)` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalDensities {
    pub e: f64,
    pub f: f64,
    pub i: f64,
    pub g: f64,
}

/// Local densities with `dE/dt + dF/dx = 0` and `dI/dt + dG/dx = 0` along solutions.
///
/// The energy flux is `F = -(v f + w g) + gamma/2 (v^2 + w^2) - theta/2 (phi w - psi v)`,
/// which is what differentiating `E` along the equation produces.
pub fn local_densities(z: &ZPoint, p: &PdeParams) -> LocalDensities {
    let [phi, psi, v, w, f, g] = *z;
    let rho = phi * phi + psi * psi;
    let vel = v * v + w * w;
    let grad = f * f + g * g;
    let twist_x = phi * g - psi * f; // Im(conj(u) u_x)
    let twist_t = phi * w - psi * v; // Im(conj(u) u_t)
    let cross = f * v + g * w; // Re(conj(u_t) u_x)
    LocalDensities {
        e: 0.5 * (p.lambda * rho + 0.5 * p.beta * rho * rho + vel + grad + p.theta * twist_x),
        f: -cross + 0.5 * p.gamma * vel - 0.5 * p.theta * twist_t,
        i: 0.5 * p.alpha * twist_x - cross - 0.5 * p.gamma * grad,
        g: -0.5 * p.lambda * rho - 0.25 * p.beta * rho * rho + 0.5 * (vel + grad)
            - 0.5 * p.alpha * twist_t,
    }
}

/// The six real component fields of the state at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct ZField {
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

impl ZField {
    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    pub fn point(&self, k: usize) -> ZPoint {
        [
            self.phi[k],
            self.psi[k],
            self.v[k],
            self.w[k],
            self.f[k],
            self.g[k],
        ]
    }

    /// Builds the state from `u`, `u_t`, `u_x` sampled at the same points.
    pub fn from_parts(u: &[Complex64], u_t: &[Complex64], u_x: &[Complex64]) -> Self {
        ZField {
            phi: u.iter().map(|z| z.re).collect(),
            psi: u.iter().map(|z| z.im).collect(),
            v: u_t.iter().map(|z| z.re).collect(),
            w: u_t.iter().map(|z| z.im).collect(),
            f: u_x.iter().map(|z| z.re).collect(),
            g: u_x.iter().map(|z| z.im).collect(),
        }
    }
}

/// Second-order reconstruction of `z` at the middle of three consecutive levels.
pub fn reconstruct_z(
    u_prev: &MeshFunction,
    u_cur: &MeshFunction,
    u_next: &MeshFunction,
    grid: &GridSpec,
) -> Result<ZField> {
    grid.check_len(u_prev.len(), "u_prev")?;
    grid.check_len(u_cur.len(), "u_cur")?;
    grid.check_len(u_next.len(), "u_next")?;
    let u_t: Vec<Complex64> = u_next
        .iter()
        .zip(u_prev.iter())
        .map(|(a, c)| (a - c) / (2.0 * grid.tau))
        .collect();
    let u_x = grid::central(u_cur.as_slice(), grid.h);
    Ok(ZField::from_parts(u_cur.as_slice(), &u_t, &u_x))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalLawResidual {
    pub energy: Vec<f64>,
    pub momentum: Vec<f64>,
}

impl LocalLawResidual {
    pub fn max_energy(&self) -> f64 {
        self.energy.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    pub fn max_momentum(&self) -> f64 {
        self.momentum.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

/// Centred-difference divergence of `(E, F)` and `(I, G)` at the middle field.
pub fn local_law_residual(
    z_prev: &ZField,
    z_cur: &ZField,
    z_next: &ZField,
    params: &PdeParams,
    grid: &GridSpec,
) -> Result<LocalLawResidual> {
    for (z, what) in [(z_prev, "z_prev"), (z_cur, "z_cur"), (z_next, "z_next")] {
        grid.check_len(z.len(), what)?;
    }
    let n = grid.k;
    let dens = |z: &ZField| -> Vec<LocalDensities> {
        (0..n)
            .map(|k| local_densities(&z.point(k), params))
            .collect()
    };
    let (before, here, after) = (dens(z_prev), dens(z_cur), dens(z_next));
    let (two_tau, two_h) = (2.0 * grid.tau, 2.0 * grid.h);
    let mut energy = Vec::with_capacity(n);
    let mut momentum = Vec::with_capacity(n);
    for k in 0..n {
        let (kp, km) = (grid::wrap_next(k, n), grid::wrap_prev(k, n));
        energy.push((after[k].e - before[k].e) / two_tau + (here[kp].f - here[km].f) / two_h);
        momentum.push((after[k].i - before[k].i) / two_tau + (here[kp].g - here[km].g) / two_h);
    }
    Ok(LocalLawResidual { energy, momentum })
}
