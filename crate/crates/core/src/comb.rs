//! The comb `P₂ □_{0} P_m`.
//!
//! Only the spine coordinate matters, so the operator acts on functions of
//! one variable with weight `1 - x`:
//!
//! ```text
//! λ f(x) = ∫₀^{1-x} (1-z) f(z) dz
//! ```
//!
//! Differentiating and setting `g(x) = f(1-x)` gives a 2×2 linear system on
//! `[0, 1/2]` with `f(0) = 1`, `g(0) = 0` and the matching condition
//! `f(1/2) = g(1/2)`.

use serde::Serialize;

use crate::ode::{
    cumulative_simpson, find_roots, simpson, LinearSystem, OdeError, ShootingProblem,
    DEFAULT_ROOT_TOL,
};
use crate::series::{scaled_series, SciFloat, Term};

/// Search windows for the four eigenvalues of largest modulus.
pub const COMB_WINDOWS: [(f64, f64); 4] = [
    (0.40, 0.47),
    (-0.11, -0.08),
    (0.048, 0.060),
    (-0.042, -0.033),
];

fn comb_coeff(x: f64, lambda: f64, a: &mut [f64]) {
    a.copy_from_slice(&[0.0, -x / lambda, (1.0 - x) / lambda, 0.0]);
}

/// Shooting formulation; the residual is `f(1/2) - g(1/2)`.
pub fn comb_problem() -> ShootingProblem {
    ShootingProblem {
        name: "comb",
        system: LinearSystem {
            dim: 2,
            start: 0.0,
            end: 0.5,
            coeff: comb_coeff,
        },
        init: |_| vec![1.0, 0.0],
        residual: |y, _| y[0] - y[1],
    }
}

/// Rebuilds a function on `[0, 1]` from a trajectory on `[0, 1/2]` that
/// carries `f` and its mirror `g(x) = f(1-x)`.
pub fn glue_left_half(f: &[f64], mirror: &[f64]) -> Vec<f64> {
    let half = f.len() - 1;
    let n = 2 * half;
    (0..=n)
        .map(|i| if i <= half { f[i] } else { mirror[n - i] })
        .collect()
}

/// `∫₀¹ (1-x) a(x) b(x) dx` on a uniform grid.
pub fn w_inner(a: &[f64], b: &[f64], h: f64) -> Result<f64, OdeError> {
    let vals: Vec<f64> = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(i, (p, q))| (1.0 - i as f64 * h) * p * q)
        .collect();
    simpson(&vals, h)
}

#[derive(Debug, Clone, Serialize)]
pub struct CombEigenpair {
    pub lambda: f64,
    /// `f(1/2) - g(1/2)` at the returned `λ`.
    pub shooting_residual: f64,
    /// Grid spacing of `f`.
    pub spacing: f64,
    /// Eigenfunction on `[0, 1]`, normalized by `f(0) = 1`.
    #[serde(skip)]
    pub f: Vec<f64>,
    pub inner_1: f64,
    pub norm2: f64,
    pub c: f64,
}

impl CombEigenpair {
    pub fn term(&self) -> Term {
        Term {
            lambda: self.lambda,
            c: self.c,
        }
    }

    /// Residual of the integral equation; see [`comb_operator_residual`].
    pub fn operator_residual(&self) -> f64 {
        comb_operator_residual(self.lambda, &self.f, self.spacing)
    }
}

#[derive(Debug, Clone, Default)]
pub struct CombSpectrum {
    pub pairs: Vec<CombEigenpair>,
    /// Windows that produced no eigenvalue.
    pub empty_windows: Vec<(f64, f64)>,
    pub requested: usize,
}

impl CombSpectrum {
    pub fn terms(&self) -> Vec<Term> {
        self.pairs.iter().map(CombEigenpair::term).collect()
    }

    pub fn is_complete(&self) -> bool {
        self.pairs.len() >= self.requested
    }
}

/// Finds up to `n_roots` eigenpairs inside `windows`, largest `|λ|` first.
pub fn comb_eigen(
    windows: &[(f64, f64)],
    n_roots: usize,
    steps_per_unit: usize,
) -> Result<CombSpectrum, OdeError> {
    let prob = comb_problem();
    let steps = prob.steps_for(steps_per_unit);
    let found = find_roots(&prob, windows, n_roots, steps, DEFAULT_ROOT_TOL)?;
    let mut pairs = Vec::with_capacity(found.roots.len());
    for &lambda in &found.roots {
        let traj = prob.solve(lambda, steps)?;
        let f = glue_left_half(&traj.component(0), &traj.component(1));
        let h = traj.spacing();
        let ones = vec![1.0; f.len()];
        let inner_1 = w_inner(&f, &ones, h)?;
        let norm2 = w_inner(&f, &f, h)?;
        pairs.push(CombEigenpair {
            lambda,
            shooting_residual: (prob.residual)(traj.last(), lambda),
            spacing: h,
            f,
            inner_1,
            norm2,
            c: inner_1 * inner_1 / norm2,
        });
    }
    Ok(CombSpectrum {
        pairs,
        empty_windows: found.empty_windows,
        requested: n_roots,
    })
}

/// The four leading eigenpairs from the default windows.
pub fn comb_eigen_default(steps_per_unit: usize) -> Result<CombSpectrum, OdeError> {
    comb_eigen(&COMB_WINDOWS, COMB_WINDOWS.len(), steps_per_unit)
}

/// `(2m)! · Σ c_n λ_n^{m-1}`.
pub fn comb_approx(pairs: &[CombEigenpair], m: usize) -> SciFloat {
    let terms: Vec<Term> = pairs.iter().map(CombEigenpair::term).collect();
    scaled_series(&terms, 2, m)
}

/// `sup_x |λ f(x) - ∫₀^{1-x} (1-z) f(z) dz|` over the grid, with the integral
/// taken by running Simpson sums. This checks the eigenpair against the
/// integral equation directly rather than against the differentiated system.
pub fn comb_operator_residual(lambda: f64, f: &[f64], h: f64) -> f64 {
    let n = f.len() - 1;
    let weighted: Vec<f64> = f
        .iter()
        .enumerate()
        .map(|(i, v)| (1.0 - i as f64 * h) * v)
        .collect();
    let running = cumulative_simpson(&weighted, h);
    (0..=n)
        .map(|i| (lambda * f[i] - running[n - i]).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::DEFAULT_STEPS_PER_UNIT;

    #[test]
    fn residual_vanishes_near_known_roots() {
        let p = comb_problem();
        let steps = p.steps_for(DEFAULT_STEPS_PER_UNIT);
        assert!(p.residual_at(0.437141117, steps).unwrap().abs() < 1e-7);
        assert!(p.residual_at(-0.094330445, steps).unwrap().abs() < 1e-6);
        assert!(p.residual_at(0.25, steps).unwrap().abs() > 1e-2);
    }

    #[test]
    fn glue_mirrors_second_half() {
        let f = [1.0, 2.0, 3.0];
        let g = [10.0, 20.0, 30.0];
        assert_eq!(glue_left_half(&f, &g), vec![1.0, 2.0, 3.0, 20.0, 10.0]);
    }

    #[test]
    fn constants_are_not_eigenfunctions() {
        let n = 1024;
        let f = vec![1.0; n + 1];
        assert!(comb_operator_residual(1.0, &f, 1.0 / n as f64) > 0.1);
    }

    #[test]
    fn weighted_inner_product_of_one() {
        let n = 16;
        let ones = vec![1.0; n + 1];
        assert!((w_inner(&ones, &ones, 1.0 / n as f64).unwrap() - 0.5).abs() < 1e-15);
    }
}
