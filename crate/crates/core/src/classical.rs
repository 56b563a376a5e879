//! The single-vertex case `G = P₁`, `S = {0}`: the product is the path `P_m`
//! and the operator `T[f](x) = ∫₀^{1-x} f` has closed-form spectrum
//! `λ_k = 2/(πk)`, `k = 1, -3, 5, -7, …`, with eigenfunctions `cos(x/λ_k)`.
//!
//! Every tolerance used by the comb and grid solvers is first measured here
//! against these closed forms.

use std::f64::consts::PI;

use serde::Serialize;

use crate::comb::glue_left_half;
use crate::ode::{find_roots, simpson, LinearSystem, OdeError, ShootingProblem, DEFAULT_ROOT_TOL};
use crate::series::{log10_factorial, SciFloat};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalSpectrum {
    /// Signed odd indices `1, -3, 5, -7, …`.
    pub k_indices: Vec<i64>,
    /// `2 / (π k)`, decreasing in modulus.
    pub lambdas: Vec<f64>,
}

/// The `count` eigenvalues of largest modulus.
pub fn classical_lambdas(count: usize) -> ClassicalSpectrum {
    let k_indices: Vec<i64> = (0..count as i64)
        .map(|i| {
            let j = 2 * i + 1;
            if i % 2 == 0 {
                j
            } else {
                -j
            }
        })
        .collect();
    let lambdas = k_indices.iter().map(|&k| 2.0 / (PI * k as f64)).collect();
    ClassicalSpectrum { k_indices, lambdas }
}

/// `2 · m! · Σ_k (2/(πk))^{m+1}` over the first `terms` signed indices.
pub fn classical_approx(m: usize, terms: usize) -> SciFloat {
    let spectrum = classical_lambdas(terms);
    let power = m as i32 + 1;
    let tail: f64 = spectrum
        .k_indices
        .iter()
        .map(|&k| (1.0 / k as f64).powi(power))
        .sum();
    let log_scale = (m + 1) as f64 * (2.0 / PI).log10() + log10_factorial(m);
    SciFloat::from_f64(2.0 * tail).mul_log10(log_scale)
}

fn classical_coeff(_x: f64, lambda: f64, a: &mut [f64]) {
    a.copy_from_slice(&[0.0, -1.0 / lambda, 1.0 / lambda, 0.0]);
}

/// `(f, g)' = [[0, -1/λ], [1/λ, 0]] (f, g)` on `[0, 1/2]` with `g(x) = f(1-x)`,
/// `f(0) = 1`, `g(0) = 0`; eigenvalues are the zeros of `f(1/2) - g(1/2)`.
pub fn classical_problem() -> ShootingProblem {
    ShootingProblem {
        name: "classical",
        system: LinearSystem {
            dim: 2,
            start: 0.0,
            end: 0.5,
            coeff: classical_coeff,
        },
        init: |_| vec![1.0, 0.0],
        residual: |y, _| y[0] - y[1],
    }
}

/// Windows around `2/π`, `-2/(3π)` and `2/(5π)`.
pub const CLASSICAL_WINDOWS: [(f64, f64); 3] = [(0.55, 0.75), (-0.30, -0.15), (0.10, 0.15)];

#[derive(Debug, Clone, Serialize)]
pub struct ClassicalReport {
    pub steps_per_unit: usize,
    pub roots: Vec<f64>,
    pub expected: Vec<f64>,
    /// `sup |f(x) - cos(x/λ₁)|` over the reconstruction grid.
    pub eigenfunction_sup_err: f64,
    /// `∫₀¹ φ_k` per root (closed form: `λ_k`).
    pub inner_1: Vec<f64>,
    /// `∫₀¹ φ_k²` per root (closed form: `1/2`).
    pub norm2: Vec<f64>,
}

impl ClassicalReport {
    pub fn max_root_err(&self) -> f64 {
        self.roots
            .iter()
            .zip(&self.expected)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Runs the shooting pipeline on the closed-form problem and measures it.
pub fn classical_shoot_check(steps_per_unit: usize) -> Result<ClassicalReport, OdeError> {
    let prob = classical_problem();
    let steps = prob.steps_for(steps_per_unit);
    let found = find_roots(&prob, &CLASSICAL_WINDOWS, 3, steps, DEFAULT_ROOT_TOL)?;
    let expected = classical_lambdas(3).lambdas;
    let mut report = ClassicalReport {
        steps_per_unit,
        roots: found.roots.clone(),
        expected,
        eigenfunction_sup_err: f64::NAN,
        inner_1: Vec::new(),
        norm2: Vec::new(),
    };
    for (idx, &lambda) in found.roots.iter().enumerate() {
        let traj = prob.solve(lambda, steps)?;
        let f = glue_left_half(&traj.component(0), &traj.component(1));
        let h = traj.spacing();
        if idx == 0 {
            report.eigenfunction_sup_err = f
                .iter()
                .enumerate()
                .map(|(i, v)| (v - (i as f64 * h / lambda).cos()).abs())
                .fold(0.0, f64::max);
        }
        report.inner_1.push(simpson(&f, h)?);
        let sq: Vec<f64> = f.iter().map(|v| v * v).collect();
        report.norm2.push(simpson(&sq, h)?);
    }
    Ok(report)
}
