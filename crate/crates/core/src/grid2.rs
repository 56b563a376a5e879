//! Alternating `2 × m` arrays, `P₂ □_{0,1} P_m`.
//!
//! Functions on the triangle `x + y ≤ 1` of the form `L[g](x, y) = g(x) + g(y)`
//! are invariant under the operator, which acts on `g` by
//!
//! ```text
//! λ g(x) = (1-x) ∫₀ˣ g(s) ds + ∫ₓ^{1-x} (1-s) g(s) ds
//! ```
//!
//! With `h(x) = g(1-x)` two differentiations give a 4-D linear system for
//! `(g, h, g', h')`, integrated on `[1/2, 1]` from `g = h = λ/2`,
//! `g' = -h' = -λ - 1/4`; eigenvalues are the zeros of `h'(1)`.

use serde::Serialize;

use crate::geometry::{build_nystrom, GeometryError};
use crate::graph::BipartiteGraph;
use crate::ode::{
    cumulative_simpson, find_roots, simpson, LinearSystem, OdeError, ShootingProblem,
    DEFAULT_ROOT_TOL,
};
use crate::series::{scaled_series, SciFloat, Term};

/// Search windows for the four eigenvalues of largest modulus.
pub const GRID2_WINDOWS: [(f64, f64); 4] = [
    (0.33, 0.40),
    (0.055, 0.072),
    (-0.070, -0.054),
    (0.028, 0.038),
];

fn grid2_coeff(x: f64, lambda: f64, a: &mut [f64]) {
    let l = 1.0 / lambda;
    a.copy_from_slice(&[
        0.0,
        0.0,
        1.0,
        0.0, //
        0.0,
        0.0,
        0.0,
        1.0, //
        -l,
        -l,
        0.0,
        -x * l, //
        -l,
        -l,
        (1.0 - x) * l,
        0.0,
    ]);
}

/// Shooting formulation on `[1/2, 1]`; the residual is `h'(1)`.
pub fn grid2_problem() -> ShootingProblem {
    ShootingProblem {
        name: "grid2",
        system: LinearSystem {
            dim: 4,
            start: 0.5,
            end: 1.0,
            coeff: grid2_coeff,
        },
        init: |l| vec![l / 2.0, l / 2.0, -l - 0.25, l + 0.25],
        residual: |y, _| y[3],
    }
}

/// Rebuilds `g` on `[0, 1]` from `g` and `h = g(1 - ·)` on `[1/2, 1]`.
pub fn glue_right_half(g: &[f64], h: &[f64]) -> Vec<f64> {
    let half = g.len() - 1;
    (0..=2 * half)
        .map(|i| if i >= half { g[i - half] } else { h[half - i] })
        .collect()
}

/// `⟨a, b⟩_U = ⟨L a, L b⟩` over the triangle, reduced to one dimension:
/// `2 ∫ (1-x) a b + 2 ∫ a(x) B(1-x)` with `B(t) = ∫₀ᵗ b`.
pub fn u_inner(a: &[f64], b: &[f64], h: f64) -> Result<f64, OdeError> {
    let n = a.len() - 1;
    let cum_b = cumulative_simpson(b, h);
    let diag: Vec<f64> = (0..=n)
        .map(|i| (1.0 - i as f64 * h) * a[i] * b[i])
        .collect();
    let cross: Vec<f64> = (0..=n).map(|i| a[i] * cum_b[n - i]).collect();
    Ok(2.0 * simpson(&diag, h)? + 2.0 * simpson(&cross, h)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct GridEigenpair {
    pub lambda: f64,
    /// `h'(1)` at the returned `λ`.
    pub shooting_residual: f64,
    pub spacing: f64,
    /// Eigenfunction on `[0, 1]` with `g(1/2) = λ/2`.
    #[serde(skip)]
    pub g: Vec<f64>,
    /// `(g, h, g', h')` at `x = 1`.
    pub end_state: [f64; 4],
    /// `⟨g, 1⟩_U` as defined, for the `g(1/2) = λ/2` scaling.
    pub raw_inner_1: f64,
    /// `‖g‖²_U` for the same scaling.
    pub raw_norm2: f64,
    pub raw_c: f64,
    /// `⟨L ĝ, 1⟩` over the triangle for `ĝ = g/λ`, i.e. `ĝ(1/2) = 1/2`.
    pub inner_1: f64,
    /// `‖ĝ‖²_U`.
    pub norm2: f64,
    /// `inner_1² / norm2 = raw_c / 4`, the weight of `λ^{m-1}` in the series.
    pub c: f64,
}

impl GridEigenpair {
    pub fn term(&self) -> Term {
        Term {
            lambda: self.lambda,
            c: self.c,
        }
    }

    pub fn operator_residual(&self) -> f64 {
        grid2_operator_residual(self.lambda, &self.g, self.spacing)
    }

    /// `(|h(1) - g(0)|, |g(0) + g(1)|)`.
    pub fn terminal_defects(&self) -> (f64, f64) {
        let g0 = self.g[0];
        let g1 = *self.g.last().unwrap_or(&0.0);
        ((self.end_state[1] - g0).abs(), (g0 + g1).abs())
    }

    /// `∫₀^{1/2} g - λ²`.
    pub fn half_integral_defect(&self) -> Result<f64, OdeError> {
        let half = (self.g.len() - 1) / 2;
        Ok(simpson(&self.g[..=half], self.spacing)? - self.lambda * self.lambda)
    }

    /// `min g(x) + g(y)` over the closed triangle `x + y ≤ 1`, and the same
    /// minimum restricted to `x + y ≤ 1 - margin`.
    pub fn lifted_minimum(&self, margin: f64) -> (f64, f64) {
        let n = self.g.len() - 1;
        let mut prefix_min = self.g.clone();
        for i in 1..=n {
            prefix_min[i] = prefix_min[i].min(prefix_min[i - 1]);
        }
        let cut = (margin / self.spacing).ceil() as usize;
        let closed = (0..=n)
            .map(|i| self.g[i] + prefix_min[n - i])
            .fold(f64::INFINITY, f64::min);
        let inner = (0..=n.saturating_sub(cut))
            .map(|i| self.g[i] + prefix_min[n - cut - i])
            .fold(f64::INFINITY, f64::min);
        (closed, inner)
    }
}

#[derive(Debug, Clone, Default)]
pub struct GridSpectrum {
    pub pairs: Vec<GridEigenpair>,
    pub empty_windows: Vec<(f64, f64)>,
    pub requested: usize,
}

impl GridSpectrum {
    pub fn terms(&self) -> Vec<Term> {
        self.pairs.iter().map(GridEigenpair::term).collect()
    }

    pub fn is_complete(&self) -> bool {
        self.pairs.len() >= self.requested
    }

    /// Largest `|⟨g_i, g_j⟩_U|` over distinct pairs, for `ĝ = g/λ`.
    pub fn max_u_overlap(&self) -> Result<f64, OdeError> {
        let mut worst: f64 = 0.0;
        for (i, a) in self.pairs.iter().enumerate() {
            for b in &self.pairs[i + 1..] {
                let ga: Vec<f64> = a.g.iter().map(|v| v / a.lambda).collect();
                let gb: Vec<f64> = b.g.iter().map(|v| v / b.lambda).collect();
                worst = worst.max(u_inner(&ga, &gb, a.spacing)?.abs());
            }
        }
        Ok(worst)
    }
}

/// Finds up to `n_roots` eigenpairs inside `windows`, largest `|λ|` first.
pub fn grid2_eigen(
    windows: &[(f64, f64)],
    n_roots: usize,
    steps_per_unit: usize,
) -> Result<GridSpectrum, OdeError> {
    let prob = grid2_problem();
    let steps = prob.steps_for(steps_per_unit);
    let found = find_roots(&prob, windows, n_roots, steps, DEFAULT_ROOT_TOL)?;
    let mut pairs = Vec::with_capacity(found.roots.len());
    for &lambda in &found.roots {
        let traj = prob.solve(lambda, steps)?;
        let g = glue_right_half(&traj.component(0), &traj.component(1));
        let h = traj.spacing();
        let ones = vec![1.0; g.len()];
        let raw_inner_1 = u_inner(&g, &ones, h)?;
        let raw_norm2 = u_inner(&g, &g, h)?;
        let raw_c = raw_inner_1 * raw_inner_1 / raw_norm2;
        let weighted: Vec<f64> = g
            .iter()
            .enumerate()
            .map(|(i, v)| (1.0 - i as f64 * h) * v)
            .collect();
        let inner_1 = 2.0 * simpson(&weighted, h)? / lambda;
        let norm2 = raw_norm2 / (lambda * lambda);
        let last = traj.last();
        pairs.push(GridEigenpair {
            lambda,
            shooting_residual: (prob.residual)(last, lambda),
            spacing: h,
            end_state: [last[0], last[1], last[2], last[3]],
            g,
            raw_inner_1,
            raw_norm2,
            raw_c,
            inner_1,
            norm2,
            c: inner_1 * inner_1 / norm2,
        });
    }
    Ok(GridSpectrum {
        pairs,
        empty_windows: found.empty_windows,
        requested: n_roots,
    })
}

pub fn grid2_eigen_default(steps_per_unit: usize) -> Result<GridSpectrum, OdeError> {
    grid2_eigen(&GRID2_WINDOWS, GRID2_WINDOWS.len(), steps_per_unit)
}

/// `(2m)! · Σ c_n λ_n^{m-1}`.
pub fn grid2_approx(pairs: &[GridEigenpair], m: usize) -> SciFloat {
    let terms: Vec<Term> = pairs.iter().map(GridEigenpair::term).collect();
    scaled_series(&terms, 2, m)
}

/// `sup_x |λ g(x) - (1-x) P(x) - Q(1-x) + Q(x)|` with `P = ∫₀ˣ g` and
/// `Q = ∫₀ˣ (1-s) g(s) ds`, both by running Simpson sums.
pub fn grid2_operator_residual(lambda: f64, g: &[f64], h: f64) -> f64 {
    let n = g.len() - 1;
    let p = cumulative_simpson(g, h);
    let weighted: Vec<f64> = g
        .iter()
        .enumerate()
        .map(|(i, v)| (1.0 - i as f64 * h) * v)
        .collect();
    let q = cumulative_simpson(&weighted, h);
    (0..=n)
        .map(|i| {
            let x = i as f64 * h;
            let rhs = (1.0 - x) * p[i] + q[n - i] - q[i];
            (lambda * g[i] - rhs).abs()
        })
        .fold(0.0, f64::max)
}

/// Polynomial with coefficients in increasing degree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// Antiderivative vanishing at 0.
    pub fn integral(&self) -> Poly {
        let mut out = vec![0.0];
        out.extend(self.0.iter().enumerate().map(|(k, c)| c / (k + 1) as f64));
        Poly(out)
    }

    /// `(1 - x) · self`.
    pub fn times_one_minus_x(&self) -> Poly {
        let mut out = vec![0.0; self.0.len() + 1];
        for (k, c) in self.0.iter().enumerate() {
            out[k] += c;
            out[k + 1] -= c;
        }
        Poly(out)
    }

    /// The one-variable operator applied in closed form.
    pub fn apply_t(&self, x: f64) -> f64 {
        let p = self.integral();
        let q = self.times_one_minus_x().integral();
        (1.0 - x) * p.eval(x) + q.eval(1.0 - x) - q.eval(x)
    }
}

/// Largest polynomial degree accepted by [`commutation_check`].
pub const MAX_COMMUTATION_DEGREE: usize = 6;

#[derive(Debug, Clone, Serialize)]
pub struct CommutationReport {
    /// `‖T[L g] - L[T g]‖` in the sampled `L²` norm of the triangle.
    pub discrepancy: f64,
    /// Three standard errors of the Monte Carlo quadrature, same norm.
    pub noise_bound: f64,
    /// Discrepancy when the one-variable side drops its `(1-x) ∫₀ˣ g` term;
    /// a negative control that must exceed the noise bound.
    pub control_discrepancy: f64,
    pub n_nodes: usize,
}

impl CommutationReport {
    pub fn commutes(&self) -> bool {
        self.discrepancy <= self.noise_bound
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CommutationError {
    #[error("polynomial degree {0} exceeds {MAX_COMMUTATION_DEGREE}")]
    Degree(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Compares the two-variable operator on `L[g]` (Nyström on the triangle)
/// with `L` of the one-variable operator on `g` (closed form).
#[allow(clippy::needless_range_loop)]
pub fn commutation_check(
    coeffs: &[f64],
    n_nodes: usize,
    seed: u64,
) -> Result<CommutationReport, CommutationError> {
    if coeffs.len() > MAX_COMMUTATION_DEGREE + 1 {
        return Err(CommutationError::Degree(coeffs.len() - 1));
    }
    let g = Poly(coeffs.to_vec());
    let p2 = BipartiteGraph::path(2).expect("two-vertex path");
    let op = build_nystrom(&p2, &[0, 1], n_nodes, seed)?;
    let n = op.n_nodes();
    let lifted: Vec<f64> = (0..n)
        .map(|i| {
            let pt = op.nodes.point(i);
            g.eval(pt[0]) + g.eval(pt[1])
        })
        .collect();
    let lhs = op.apply(&lifted);
    let vol = op.volume.estimate;
    let vol_rel = op.volume.stderr / vol;
    let p = g.integral();
    let mut sq = 0.0;
    let mut control_sq = 0.0;
    let mut noise_sq = 0.0;
    for i in 0..n {
        let pt = op.nodes.point(i);
        let rhs = g.apply_t(pt[0]) + g.apply_t(pt[1]);
        let control = rhs - (1.0 - pt[0]) * p.eval(pt[0]) - (1.0 - pt[1]) * p.eval(pt[1]);
        sq += (lhs[i] - rhs).powi(2);
        control_sq += (lhs[i] - control).powi(2);
        // spread of the summands vol · χ_ij · L[g]_j behind lhs[i]
        let row = &op.matrix[i * n..(i + 1) * n];
        let (mut s1, mut s2) = (0.0, 0.0);
        for (m, f) in row.iter().zip(&lifted) {
            let term = m * n as f64 * f;
            s1 += term;
            s2 += term * term;
        }
        let mean = s1 / n as f64;
        let var = (s2 / n as f64 - mean * mean).max(0.0);
        noise_sq += var / n as f64 + (vol_rel * lhs[i]).powi(2);
    }
    let norm = |s: f64| (op.weight * s).sqrt();
    Ok(CommutationReport {
        discrepancy: norm(sq),
        noise_bound: 3.0 * norm(noise_sq),
        control_discrepancy: norm(control_sq),
        n_nodes: n,
    })
}
