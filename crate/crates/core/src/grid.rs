//! Uniform periodic grid, difference quotients, inner products and norms.
//!
//! Half-node quantities (`u_{k+1/2}`) are stored in length-`K` vectors where
//! index `k` denotes position `k + 1/2`; the last entry pairs nodes `K-1` and
//! `0` through the periodic wrap.

use std::ops::Index;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Smallest number of spatial cells; the 3-point stencil needs distinct neighbours.
pub const MIN_CELLS: usize = 4;

/// Uniform space-time mesh on `[x_l, x_r) x [0, T]` with periodic spatial indexing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_l: f64,
    pub x_r: f64,
    /// Number of spatial cells (and nodes, by periodicity).
    pub k: usize,
    /// Number of time steps.
    pub j: usize,
    pub t_final: f64,
    pub h: f64,
    pub tau: f64,
}

impl GridSpec {
    pub fn new(x_l: f64, x_r: f64, k: usize, t_final: f64, j: usize) -> Result<Self> {
        if !(x_l.is_finite() && x_r.is_finite() && t_final.is_finite()) {
            return Err(Error::Config("grid bounds must be finite".into()));
        }
        if x_r <= x_l {
            return Err(Error::Config(format!(
                "x_r ({x_r}) must exceed x_l ({x_l})"
            )));
        }
        if k < MIN_CELLS {
            return Err(Error::Config(format!(
                "K = {k} is below the stencil minimum of {MIN_CELLS}"
            )));
        }
        if j < 2 {
            return Err(Error::Config(format!(
                "J = {j}: a two-step scheme needs at least 2 time steps"
            )));
        }
        if t_final <= 0.0 {
            return Err(Error::Config(format!("T = {t_final} must be positive")));
        }
        Ok(GridSpec {
            x_l,
            x_r,
            k,
            j,
            t_final,
            h: (x_r - x_l) / k as f64,
            tau: t_final / j as f64,
        })
    }

    #[inline]
    pub fn node(&self, k: usize) -> f64 {
        self.x_l + k as f64 * self.h
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.k).map(move |k| self.node(k))
    }

    #[inline]
    pub fn time(&self, level: usize) -> f64 {
        level as f64 * self.tau
    }

    /// Same grid with a different time discretisation of the same horizon.
    pub fn with_steps(&self, j: usize) -> Result<Self> {
        GridSpec::new(self.x_l, self.x_r, self.k, self.t_final, j)
    }

    pub(crate) fn check_len(&self, len: usize, what: &str) -> Result<()> {
        if len != self.k {
            return Err(Error::Usage(format!(
                "{what} has length {len}, grid has K = {}",
                self.k
            )));
        }
        Ok(())
    }
}

/// `build_grid(x_l, x_r, K, T, J)`.
pub fn build_grid(x_l: f64, x_r: f64, k: usize, t_final: f64, j: usize) -> Result<GridSpec> {
    GridSpec::new(x_l, x_r, k, t_final, j)
}

/// Complex field on the `K` nodes of one time level. All entries are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshFunction(Vec<Complex64>);

impl MeshFunction {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values
            .iter()
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite("mesh function"));
        }
        Ok(MeshFunction(values))
    }

    pub fn zeros(k: usize) -> Self {
        MeshFunction(vec![Complex64::new(0.0, 0.0); k])
    }

    /// Samples `f` at the grid nodes.
    pub fn sample(grid: &GridSpec, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        MeshFunction::new(grid.nodes().map(f).collect())
    }

    /// Wraps values produced by an internal kernel; the caller guarantees finiteness.
    pub(crate) fn from_vec_unchecked(values: Vec<Complex64>) -> Self {
        debug_assert!(values.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        MeshFunction(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.0.iter()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        MeshFunction::from_vec_unchecked(self.0.iter().map(|z| z * c).collect())
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.0)
    }
}

impl Index<usize> for MeshFunction {
    type Output = Complex64;

    fn index(&self, k: usize) -> &Complex64 {
        &self.0[k]
    }
}

impl AsRef<[Complex64]> for MeshFunction {
    fn as_ref(&self) -> &[Complex64] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffKind {
    /// `(u_{k+1} - u_k) / h`
    Forward,
    /// `(u_k - u_{k-1}) / h`
    Backward,
    /// `(u_{k+1} - u_{k-1}) / 2h`
    Central,
    /// `(u_{k+1} - 2 u_k + u_{k-1}) / h^2`
    Second,
    /// `(u_k + u_{k+1}) / 2` at half node `k + 1/2`
    HalfAverage,
    /// `(u_{k+1} - u_k) / h` at half node `k + 1/2`
    HalfForward,
}

impl FromStr for DiffKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "forward" => DiffKind::Forward,
            "backward" => DiffKind::Backward,
            "central" => DiffKind::Central,
            "second" => DiffKind::Second,
            "half_average" => DiffKind::HalfAverage,
            "half_forward" => DiffKind::HalfForward,
            other => return Err(Error::Usage(format!("unknown difference kind `{other}`"))),
        })
    }
}

pub fn apply_difference(kind: DiffKind, u: &MeshFunction, grid: &GridSpec) -> Result<MeshFunction> {
    grid.check_len(u.len(), "field")?;
    let out = match kind {
        DiffKind::Forward | DiffKind::HalfForward => forward(u.as_slice(), grid.h),
        DiffKind::Backward => backward(u.as_slice(), grid.h),
        DiffKind::Central => central(u.as_slice(), grid.h),
        DiffKind::Second => second(u.as_slice(), grid.h),
        DiffKind::HalfAverage => half_average(u.as_slice()),
    };
    Ok(MeshFunction::from_vec_unchecked(out))
}

/// `h * sum_k u_k * conj(v_k)`
pub fn inner_product(u: &MeshFunction, v: &MeshFunction, grid: &GridSpec) -> Result<Complex64> {
    grid.check_len(u.len(), "left operand")?;
    grid.check_len(v.len(), "right operand")?;
    Ok(inner(u.as_slice(), v.as_slice(), grid.h))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    /// `sqrt(<u, u>)`
    pub l2: f64,
    /// `sqrt(h sum |u_{k+1/2}|^2)`
    pub half_l2: f64,
    pub max: f64,
    /// `h sum |u_{k+1/2}|^4`
    pub quartic_half: f64,
}

pub fn norms(u: &MeshFunction, grid: &GridSpec) -> Result<Norms> {
    grid.check_len(u.len(), "field")?;
    let u = u.as_slice();
    Ok(Norms {
        l2: norm_sq(u, grid.h).sqrt(),
        half_l2: half_norm_sq(u, grid.h).sqrt(),
        max: max_abs(u),
        quartic_half: quartic_half(u, grid.h),
    })
}

// Slice kernels shared by the schemes and diagnostics. Inputs are assumed to
// have the grid length; public wrappers above do the checking.

#[inline]
pub(crate) fn wrap_prev(k: usize, n: usize) -> usize {
    if k == 0 {
        n - 1
    } else {
        k - 1
    }
}

#[inline]
pub(crate) fn wrap_next(k: usize, n: usize) -> usize {
    if k + 1 == n {
        0
    } else {
        k + 1
    }
}

pub(crate) fn forward(u: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = u.len();
    (0..n).map(|k| (u[wrap_next(k, n)] - u[k]) / h).collect()
}

pub(crate) fn backward(u: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = u.len();
    (0..n).map(|k| (u[k] - u[wrap_prev(k, n)]) / h).collect()
}

pub(crate) fn central(u: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = u.len();
    (0..n)
        .map(|k| (u[wrap_next(k, n)] - u[wrap_prev(k, n)]) / (2.0 * h))
        .collect()
}

pub(crate) fn second(u: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = u.len();
    let h2 = h * h;
    (0..n)
        .map(|k| (u[wrap_next(k, n)] - 2.0 * u[k] + u[wrap_prev(k, n)]) / h2)
        .collect()
}

pub(crate) fn half_average(u: &[Complex64]) -> Vec<Complex64> {
    let n = u.len();
    (0..n).map(|k| 0.5 * (u[k] + u[wrap_next(k, n)])).collect()
}

pub(crate) fn inner(u: &[Complex64], v: &[Complex64], h: f64) -> Complex64 {
    let s: Complex64 = u.iter().zip(v).map(|(a, b)| a * b.conj()).sum();
    s * h
}

pub(crate) fn norm_sq(u: &[Complex64], h: f64) -> f64 {
    h * u.iter().map(|z| z.norm_sqr()).sum::<f64>()
}

pub(crate) fn half_norm_sq(u: &[Complex64], h: f64) -> f64 {
    let n = u.len();
    h * (0..n)
        .map(|k| (0.5 * (u[k] + u[wrap_next(k, n)])).norm_sqr())
        .sum::<f64>()
}

pub(crate) fn quartic_half(u: &[Complex64], h: f64) -> f64 {
    let n = u.len();
    h * (0..n)
        .map(|k| {
            let m = (0.5 * (u[k] + u[wrap_next(k, n)])).norm_sqr();
            m * m
        })
        .sum::<f64>()
}

pub(crate) fn max_abs(u: &[Complex64]) -> f64 {
    u.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn all_finite(u: &[Complex64]) -> bool {
    u.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mf(v: &[(f64, f64)]) -> MeshFunction {
        MeshFunction::new(v.iter().map(|&(a, b)| c(a, b)).collect()).unwrap()
    }

    #[test]
    fn grid_sizes() {
        let g = build_grid(0.0, 2.0 * PI, 64, 50.0, 10000).unwrap();
        assert_eq!(g.h, 2.0 * PI / 64.0);
        assert!((g.tau - 0.005).abs() < 1e-15);

        let g = build_grid(0.0, 1.0, 4, 1.0, 2).unwrap();
        assert_eq!((g.h, g.tau), (0.25, 0.5));

        let g = build_grid(-50.0, 50.0, 1000, 500.0, 10000).unwrap();
        assert!((g.h - 0.1).abs() < 1e-15);
        assert!((g.tau - 0.05).abs() < 1e-15);
        assert_eq!(g.node(3), -50.0 + 3.0 * g.h);
    }

    #[test]
    fn grid_rejects_bad_sizes() {
        assert!(matches!(
            build_grid(0.0, 1.0, 3, 1.0, 2),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            build_grid(1.0, 1.0, 8, 1.0, 2),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            build_grid(0.0, 1.0, 8, 0.0, 2),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            build_grid(0.0, 1.0, 8, 1.0, 1),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn non_finite_rejected() {
        assert!(MeshFunction::new(vec![c(f64::NAN, 0.0)]).is_err());
        assert!(MeshFunction::new(vec![c(0.0, f64::INFINITY)]).is_err());
    }

    #[test]
    fn constants_have_zero_differences() {
        let g = build_grid(0.0, 2.0, 4, 1.0, 2).unwrap();
        let u = mf(&[(1.5, -0.5); 4]);
        for kind in [
            DiffKind::Forward,
            DiffKind::Backward,
            DiffKind::Central,
            DiffKind::Second,
            DiffKind::HalfForward,
        ] {
            let d = apply_difference(kind, &u, &g).unwrap();
            assert!(d.iter().all(|z| z.norm() == 0.0), "{kind:?}");
        }
        let avg = apply_difference(DiffKind::HalfAverage, &u, &g).unwrap();
        assert_eq!(avg, u);
    }

    #[test]
    fn forward_wraps() {
        let g = build_grid(0.0, 2.0, 4, 1.0, 2).unwrap();
        let u = mf(&[(0.0, 0.0), (1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        let d = apply_difference(DiffKind::Forward, &u, &g).unwrap();
        let re: Vec<f64> = d.iter().map(|z| z.re).collect();
        assert_eq!(re, vec![2.0, -2.0, 0.0, 0.0]);
        let b = apply_difference(DiffKind::Backward, &u, &g).unwrap();
        let re: Vec<f64> = b.iter().map(|z| z.re).collect();
        assert_eq!(re, vec![0.0, 2.0, -2.0, 0.0]);
    }

    #[test]
    fn central_difference_of_plane_wave() {
        let g = build_grid(0.0, 2.0 * PI, 256, 1.0, 2).unwrap();
        let u = MeshFunction::sample(&g, |x| Complex64::from_polar(1.0, x)).unwrap();
        let d = apply_difference(DiffKind::Central, &u, &g).unwrap();
        let bound = g.h * g.h / 6.0;
        let err = d
            .iter()
            .zip(u.iter())
            .map(|(d, u)| (d - Complex64::i() * u).norm())
            .fold(0.0, f64::max);
        assert!(err <= bound, "{err} > {bound}");
        assert!(err > 0.5 * bound);
    }

    #[test]
    fn unknown_kind_is_usage_error() {
        assert!(matches!("upwind".parse::<DiffKind>(), Err(Error::Usage(_))));
        assert_eq!(
            "half_forward".parse::<DiffKind>().unwrap(),
            DiffKind::HalfForward
        );
    }

    #[test]
    fn inner_product_examples() {
        let g = build_grid(0.0, 4.0, 4, 1.0, 2).unwrap();
        let u = mf(&[(1.0, 0.0), (0.0, 1.0), (0.0, 0.0), (0.0, 0.0)]);
        assert_eq!(inner_product(&u, &u, &g).unwrap(), c(2.0, 0.0));

        let g = build_grid(0.0, 2.0, 4, 1.0, 2).unwrap();
        let u = mf(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        let v = mf(&[(0.0, 0.0), (1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        assert_eq!(inner_product(&u, &v, &g).unwrap(), c(0.0, 0.0));

        let short = mf(&[(1.0, 0.0)]);
        assert!(matches!(
            inner_product(&u, &short, &g),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn norms_of_constants() {
        let g = build_grid(0.0, 2.0, 4, 1.0, 2).unwrap();
        let n = norms(&mf(&[(1.0, 0.0); 4]), &g).unwrap();
        assert!((n.l2 * n.l2 - 2.0).abs() < 1e-15);
        assert!((n.half_l2 * n.half_l2 - 2.0).abs() < 1e-15);
        assert_eq!(n.max, 1.0);
        assert!((n.quartic_half - 2.0).abs() < 1e-15);
    }

    #[test]
    fn alternating_field_has_zero_half_norm() {
        let g = build_grid(0.0, 4.0, 4, 1.0, 2).unwrap();
        let n = norms(&mf(&[(1.0, 0.0), (-1.0, 0.0), (1.0, 0.0), (-1.0, 0.0)]), &g).unwrap();
        assert_eq!(n.half_l2, 0.0);
        assert_eq!(n.quartic_half, 0.0);
        assert_eq!(n.max, 1.0);
    }
}
