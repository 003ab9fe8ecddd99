//! Periodic (cyclic) tridiagonal complex systems.
//!
//! Row `k` reads `lower[k] x[k-1] + diag[k] x[k] + upper[k] x[k+1] = rhs[k]`
//! with indices taken modulo `K`, so `lower[0]` and `upper[K-1]` are the
//! corner couplings. Solved by the Thomas algorithm on a modified matrix plus
//! a Sherman-Morrison rank-one correction for the corners.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::MIN_CELLS;

const PIVOT_FLOOR: f64 = 1e-300;
const RANK_ONE_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct CyclicTridiagonalSystem {
    pub lower: Vec<Complex64>,
    pub diag: Vec<Complex64>,
    pub upper: Vec<Complex64>,
}

impl CyclicTridiagonalSystem {
    pub fn new(lower: Vec<Complex64>, diag: Vec<Complex64>, upper: Vec<Complex64>) -> Result<Self> {
        let n = diag.len();
        if lower.len() != n || upper.len() != n {
            return Err(Error::Usage(format!(
                "band lengths differ: lower {}, diag {n}, upper {}",
                lower.len(),
                upper.len()
            )));
        }
        if n < MIN_CELLS {
            return Err(Error::Usage(format!(
                "cyclic system of size {n} is below the minimum {MIN_CELLS}"
            )));
        }
        Ok(CyclicTridiagonalSystem { lower, diag, upper })
    }

    /// Constant-coefficient system.
    pub fn uniform(n: usize, lower: Complex64, diag: Complex64, upper: Complex64) -> Result<Self> {
        Self::new(vec![lower; n], vec![diag; n], vec![upper; n])
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.len();
        (0..n)
            .map(|k| {
                let km = (k + n - 1) % n;
                let kp = (k + 1) % n;
                self.lower[k] * x[km] + self.diag[k] * x[k] + self.upper[k] * x[kp]
            })
            .collect()
    }

    /// Max-row-sum norm.
    pub fn norm_inf(&self) -> f64 {
        (0..self.len())
            .map(|k| self.lower[k].norm() + self.diag[k].norm() + self.upper[k].norm())
            .fold(0.0, f64::max)
    }

    pub fn factor(&self) -> Result<CyclicFactorization> {
        CyclicFactorization::new(self)
    }
}

/// Reusable factorisation: one Thomas sweep per right-hand side.
#[derive(Debug, Clone)]
pub struct CyclicFactorization {
    lower: Vec<Complex64>,
    /// Reciprocal pivots of the modified tridiagonal matrix.
    inv_pivot: Vec<Complex64>,
    /// Eliminated super-diagonal `c'_k`.
    upper_mod: Vec<Complex64>,
    /// Solution of `T z = u` for the rank-one update vector `u`.
    z: Vec<Complex64>,
    /// `v[K-1]` of the update `A = T + u v^T` (`v[0]` is 1).
    v_last: Complex64,
    /// `1 / (1 + v . z)`
    inv_denom: Complex64,
}

impl CyclicFactorization {
    fn new(sys: &CyclicTridiagonalSystem) -> Result<Self> {
        let n = sys.len();
        let top = sys.lower[0]; // A[0][n-1]
        let bottom = sys.upper[n - 1]; // A[n-1][0]
        let gamma = -sys.diag[0];
        if gamma.norm() < PIVOT_FLOOR {
            return Err(Error::Singular {
                row: 0,
                pivot: gamma.norm(),
            });
        }

        let mut diag = sys.diag.clone();
        diag[0] -= gamma;
        diag[n - 1] -= top * bottom / gamma;

        let mut inv_pivot = vec![Complex64::new(0.0, 0.0); n];
        let mut upper_mod = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n {
            let pivot = if k == 0 {
                diag[0]
            } else {
                diag[k] - sys.lower[k] * upper_mod[k - 1]
            };
            if !(pivot.norm() >= PIVOT_FLOOR) {
                return Err(Error::Singular {
                    row: k,
                    pivot: pivot.norm(),
                });
            }
            inv_pivot[k] = pivot.inv();
            upper_mod[k] = sys.upper[k] * inv_pivot[k];
        }

        let mut fact = CyclicFactorization {
            lower: sys.lower.clone(),
            inv_pivot,
            upper_mod,
            z: Vec::new(),
            v_last: top / gamma,
            inv_denom: Complex64::new(0.0, 0.0),
        };
        let mut u = vec![Complex64::new(0.0, 0.0); n];
        u[0] = gamma;
        u[n - 1] = bottom;
        fact.thomas(&mut u);
        let vz = u[0] + fact.v_last * u[n - 1];
        let denom = Complex64::new(1.0, 0.0) + vz;
        // cancellation here means A itself is singular even though T is not
        if !(denom.norm() > RANK_ONE_FLOOR * (1.0 + vz.norm())) {
            return Err(Error::Singular {
                row: n - 1,
                pivot: denom.norm(),
            });
        }
        fact.inv_denom = denom.inv();
        fact.z = u;
        Ok(fact)
    }

    pub fn len(&self) -> usize {
        self.inv_pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_pivot.is_empty()
    }

    // In-place solve of the modified (non-cyclic) tridiagonal system.
    fn thomas(&self, r: &mut [Complex64]) {
        let n = r.len();
        r[0] *= self.inv_pivot[0];
        for k in 1..n {
            r[k] = (r[k] - self.lower[k] * r[k - 1]) * self.inv_pivot[k];
        }
        for k in (0..n - 1).rev() {
            let next = r[k + 1];
            r[k] -= self.upper_mod[k] * next;
        }
    }

    /// Overwrites `rhs` with the solution.
    pub fn solve_in_place(&self, rhs: &mut [Complex64]) -> Result<()> {
        let n = self.len();
        if rhs.len() != n {
            return Err(Error::Usage(format!(
                "right-hand side has length {}, system has {n}",
                rhs.len()
            )));
        }
        self.thomas(rhs);
        let coef = (rhs[0] + self.v_last * rhs[n - 1]) * self.inv_denom;
        for (x, z) in rhs.iter_mut().zip(&self.z) {
            *x -= coef * z;
        }
        Ok(())
    }

    pub fn solve(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }
}

pub fn solve_cyclic_tridiagonal(
    sys: &CyclicTridiagonalSystem,
    rhs: &[Complex64],
) -> Result<Vec<Complex64>> {
    sys.factor()?.solve(rhs)
}
