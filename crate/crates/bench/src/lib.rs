//! Shared fixtures for the solver benchmarks.

use msnls_core::{
    builtin_problem, scheme, BootstrapMode, GridSpec, ProblemSpec, SolverConfig, StateWindow,
};

/// The first two levels of `problem` on a `k`-node grid with time step `tau`.
pub fn window(problem: &str, k: usize, tau: f64) -> (ProblemSpec, GridSpec, StateWindow) {
    let p = builtin_problem(problem).unwrap();
    let g = p.grid(k, 10, Some(10.0 * tau)).unwrap();
    let (u0, u1) = scheme::bootstrap(
        |x| (p.f0)(x),
        |x| (p.f1)(x),
        &p.params,
        &g,
        BootstrapMode::Taylor2,
        None,
    )
    .unwrap();
    let w = StateWindow::new(u0, u1, tau).unwrap();
    (p, g, w)
}

pub fn config() -> SolverConfig {
    SolverConfig::default()
}
