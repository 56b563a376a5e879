//! Monte Carlo Nyström matrix of `T[f](x) = ∫_X χ(x, y) f(y) dy`.

use rayon::prelude::*;
use serde::Serialize;

use super::linalg::top_eigenpairs;
use super::sampling::{
    mc_volume, sample_x, stream_rng, NodeSample, Polytope, VolumeEstimate, EIGEN_STREAM,
};
use super::GeometryError;
use crate::graph::BipartiteGraph;
use crate::series::{series_sum, Term};

pub const DEFAULT_VOLUME_SAMPLES: usize = 1_000_000;
pub const DEFAULT_TOP_K: usize = 4;
/// Eigenvalues closer than this are flagged as a cluster.
pub const CLUSTER_TOL: f64 = 1e-8;
/// Allowed negative excursion of the leading eigenvector, relative to its sup.
pub const EPS_POS: f64 = 1e-2;

/// `χ(x, y) = 1` iff `x_v + y_v ≤ 1` for every `v ∈ S`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelChi {
    pub s_set: Vec<usize>,
}

impl KernelChi {
    pub fn new(s_set: &[usize]) -> Self {
        KernelChi {
            s_set: s_set.to_vec(),
        }
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        if self.s_set.iter().all(|&v| x[v] + y[v] <= 1.0) {
            1.0
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NystromConfig {
    pub n_nodes: usize,
    pub seed: u64,
    pub volume_samples: usize,
}

impl NystromConfig {
    pub fn new(n_nodes: usize, seed: u64) -> Self {
        NystromConfig {
            n_nodes,
            seed,
            volume_samples: DEFAULT_VOLUME_SAMPLES,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NystromOperator {
    pub kernel: KernelChi,
    pub nodes: NodeSample,
    /// Equal quadrature weight `vol(X) / N`.
    pub weight: f64,
    pub volume: VolumeEstimate,
    /// Row-major `N × N`.
    pub matrix: Vec<f64>,
    pub seed: u64,
}

impl NystromOperator {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        let n = self.n_nodes();
        self.matrix
            .par_chunks_exact(n)
            .map(|row| row.iter().zip(f).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `⟨1, T^{m-1} 1⟩` by repeated matrix–vector products.
    pub fn transfer_moment(&self, m: usize) -> f64 {
        assert!(m >= 1, "moment index starts at m = 1");
        let mut v = vec![1.0; self.n_nodes()];
        for _ in 1..m {
            v = self.apply(&v);
        }
        self.weight * v.iter().sum::<f64>()
    }
}

pub fn build_nystrom(
    g: &BipartiteGraph,
    s: &[usize],
    n_nodes: usize,
    seed: u64,
) -> Result<NystromOperator, GeometryError> {
    build_nystrom_with(g, s, &NystromConfig::new(n_nodes, seed))
}

pub fn build_nystrom_with(
    g: &BipartiteGraph,
    s: &[usize],
    cfg: &NystromConfig,
) -> Result<NystromOperator, GeometryError> {
    if let Some(&vertex) = s.iter().find(|&&v| v >= g.n()) {
        return Err(GeometryError::BadSubset { vertex, n: g.n() });
    }
    let nodes = sample_x(g, cfg.n_nodes, cfg.seed)?;
    let volume = mc_volume(&Polytope::x(g), cfg.volume_samples, cfg.seed)?;
    let kernel = KernelChi::new(s);
    let n = nodes.len();
    let weight = volume.estimate / n as f64;
    let mut matrix = vec![0.0; n * n];
    matrix
        .par_chunks_exact_mut(n)
        .enumerate()
        .for_each(|(i, row)| {
            let xi = nodes.point(i);
            for (j, m) in row.iter_mut().enumerate() {
                *m = weight * kernel.eval(xi, nodes.point(j));
            }
        });
    for i in 0..n {
        for j in i + 1..n {
            let avg = 0.5 * (matrix[i * n + j] + matrix[j * n + i]);
            matrix[i * n + j] = avg;
            matrix[j * n + i] = avg;
        }
    }
    Ok(NystromOperator {
        kernel,
        nodes,
        weight,
        volume,
        matrix,
        seed: cfg.seed,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumEntry {
    pub lambda: f64,
    pub c: f64,
    /// Sampling error from the eigenvector spread plus the volume error.
    pub stderr: f64,
    /// Another returned eigenvalue lies within [`CLUSTER_TOL`].
    pub clustered: bool,
    /// Unit eigenvector, signed so that its sum is non-negative.
    #[serde(skip)]
    pub phi_at_nodes: Vec<f64>,
}

impl SpectrumEntry {
    pub fn term(&self) -> Term {
        Term {
            lambda: self.lambda,
            c: self.c,
        }
    }
}

/// The `k` eigenpairs of largest modulus, sorted by `|λ|` descending.
pub fn sym_eig(op: &NystromOperator, k: usize) -> Result<Vec<SpectrumEntry>, GeometryError> {
    let n = op.n_nodes();
    let mut rng = stream_rng(op.seed, EIGEN_STREAM);
    let eig = top_eigenpairs(&op.matrix, n, k, &mut rng)?;
    let vol_rel = if op.volume.estimate > 0.0 {
        op.volume.stderr / op.volume.estimate
    } else {
        0.0
    };
    let mut entries: Vec<SpectrumEntry> = eig
        .values
        .iter()
        .zip(eig.vectors)
        .map(|(&lambda, mut phi)| {
            let sum: f64 = phi.iter().sum();
            let lead = phi
                .iter()
                .copied()
                .fold(0.0, |a: f64, b| if b.abs() > a.abs() { b } else { a });
            if sum < 0.0 || (sum.abs() < 1e-12 && lead < 0.0) {
                phi.iter_mut().for_each(|x| *x = -*x);
            }
            let inner = op.weight * phi.iter().sum::<f64>();
            let norm2 = op.weight * phi.iter().map(|x| x * x).sum::<f64>();
            let c = if norm2 > 0.0 {
                inner * inner / norm2
            } else {
                0.0
            };
            // spread of N φ_i², whose mean is 1 for a unit vector
            let nf = n as f64;
            let var = phi.iter().map(|x| (nf * x * x - 1.0).powi(2)).sum::<f64>() / nf;
            SpectrumEntry {
                lambda,
                c,
                stderr: lambda.abs() * (var / nf + vol_rel * vol_rel).sqrt(),
                clustered: false,
                phi_at_nodes: phi,
            }
        })
        .collect();
    let lambdas: Vec<f64> = entries.iter().map(|e| e.lambda).collect();
    for (i, e) in entries.iter_mut().enumerate() {
        e.clustered = lambdas
            .iter()
            .enumerate()
            .any(|(j, l)| j != i && (l - lambdas[i]).abs() < CLUSTER_TOL);
    }
    Ok(entries)
}

/// `Σ c_k λ_k^{m-1}` over the supplied entries.
pub fn spectral_series(entries: &[SpectrumEntry], m: usize) -> f64 {
    let terms: Vec<Term> = entries.iter().map(SpectrumEntry::term).collect();
    series_sum(&terms, m)
}

/// Checks on the leading eigenpair: positive, strictly dominant, and with a
/// non-negative eigenvector up to sampling noise.
#[derive(Debug, Clone, Serialize)]
pub struct PositivityReport {
    pub lambda1: f64,
    pub lambda2_abs: f64,
    pub gap: f64,
    pub gap_tol: f64,
    /// `min φ₁ / max |φ₁|` over the nodes.
    pub min_phi1_scaled: f64,
    pub lambda1_positive: bool,
    pub simple: bool,
    pub phi1_nonnegative: bool,
}

impl PositivityReport {
    pub fn passed(&self) -> bool {
        self.lambda1_positive && self.simple && self.phi1_nonnegative
    }
}

pub fn positivity_checks(entries: &[SpectrumEntry]) -> Result<PositivityReport, GeometryError> {
    if entries.len() < 2 {
        return Err(GeometryError::ShortSpectrum { need: 2 });
    }
    let (first, second) = (&entries[0], &entries[1]);
    let gap = first.lambda - second.lambda.abs();
    let gap_tol = 10.0 * first.stderr;
    let sup = first
        .phi_at_nodes
        .iter()
        .fold(0.0, |a: f64, b| a.max(b.abs()));
    let min = first
        .phi_at_nodes
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let min_phi1_scaled = if sup > 0.0 { min / sup } else { 0.0 };
    Ok(PositivityReport {
        lambda1: first.lambda,
        lambda2_abs: second.lambda.abs(),
        gap,
        gap_tol,
        min_phi1_scaled,
        lambda1_positive: first.lambda > 0.0,
        simple: gap > gap_tol,
        phi1_nonnegative: min_phi1_scaled >= -EPS_POS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn p(n: usize) -> BipartiteGraph {
        BipartiteGraph::path(n).unwrap()
    }

    #[test]
    fn kernel_is_symmetric_bitwise() {
        let g = BipartiteGraph::cycle(4).unwrap();
        let s = sample_x(&g, 2 * 10_000, 17).unwrap();
        let k = KernelChi::new(&[0, 2, 3]);
        for i in 0..10_000 {
            let (x, y) = (s.point(2 * i), s.point(2 * i + 1));
            assert_eq!(k.eval(x, y).to_bits(), k.eval(y, x).to_bits());
        }
    }

    #[test]
    fn empty_subset_gives_rank_one() {
        let op = build_nystrom(&p(1), &[], 200, 1).unwrap();
        assert_eq!(op.volume.estimate, 1.0);
        assert!(op.matrix.iter().all(|&m| m == 1.0 / 200.0));
        let spec = sym_eig(&op, 4).unwrap();
        assert!((spec[0].lambda - 1.0).abs() < 1e-12);
        assert!((spec[0].c - 1.0).abs() < 1e-12);
        assert!(spec[1..].iter().all(|e| e.lambda.abs() < 1e-12));
        let rep = positivity_checks(&spec).unwrap();
        assert!(rep.passed());
        assert!((rep.min_phi1_scaled - 1.0).abs() < 1e-9);
    }

    #[test]
    fn single_vertex_spectrum() {
        let op = build_nystrom(&p(1), &[0], 1000, 5).unwrap();
        let spec = sym_eig(&op, 4).unwrap();
        assert!((spec[0].lambda - 2.0 / PI).abs() < 2e-2);
        assert!((spec[1].lambda + 2.0 / (3.0 * PI)).abs() < 2e-2);
        for e in &spec {
            assert!(e.lambda.abs() <= op.volume.estimate + 3.0 * op.volume.stderr);
            assert!(e.c >= 0.0);
        }
        assert!(positivity_checks(&spec).unwrap().passed());
    }

    #[test]
    fn image_depends_only_on_spine_coordinate() {
        // with S = {0}, every eigenvector with non-negligible λ is λ⁻¹ M φ, a
        // function of x₀ alone; nodes whose x₀ nearly agree must carry close values
        let op = build_nystrom(&p(2), &[0], 2000, 2).unwrap();
        let spec = sym_eig(&op, 4).unwrap();
        let mut order: Vec<usize> = (0..op.n_nodes()).collect();
        order.sort_by(|&a, &b| op.nodes.point(a)[0].total_cmp(&op.nodes.point(b)[0]));
        for e in spec.iter().filter(|e| e.lambda.abs() > 0.01) {
            let sup = e.phi_at_nodes.iter().fold(0.0, |a: f64, b| a.max(b.abs()));
            let worst = order
                .windows(2)
                .filter(|w| op.nodes.point(w[1])[0] - op.nodes.point(w[0])[0] < 1e-3)
                .map(|w| (e.phi_at_nodes[w[0]] - e.phi_at_nodes[w[1]]).abs() / sup)
                .fold(0.0, f64::max);
            assert!(worst <= 0.1, "λ = {}, variation {worst}", e.lambda);
        }
        assert!((spec[0].lambda - 0.437_141).abs() < 2e-2);
    }

    #[test]
    fn series_of_single_entry() {
        let e = SpectrumEntry {
            lambda: 1.0,
            c: 0.3,
            stderr: 0.0,
            clustered: false,
            phi_at_nodes: vec![],
        };
        assert_eq!(spectral_series(&[e], 9), 0.3);
    }

    #[test]
    fn rejects_out_of_range_subset() {
        assert!(matches!(
            build_nystrom(&p(2), &[2], 10, 0),
            Err(GeometryError::BadSubset { vertex: 2, n: 2 })
        ));
    }

    #[test]
    fn positivity_needs_two_entries() {
        assert!(positivity_checks(&[]).is_err());
    }
}
