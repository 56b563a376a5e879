//! The polytopes `X` and `Y` and Monte Carlo sampling on them.
//!
//! Random numbers come from ChaCha8 with one stream per purpose, so node
//! placement, volume estimation and the eigensolver start never share draws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::GeometryError;
use crate::graph::{BipartiteGraph, Part};

pub const NODE_STREAM: u64 = 0;
pub const VOLUME_STREAM: u64 = 1;
pub const EIGEN_STREAM: u64 = 2;

/// Rejection sampling gives up below this acceptance rate.
pub const MIN_ACCEPTANCE: f64 = 1e-4;

/// Smallest sample count accepted by [`mc_volume`].
pub const MIN_VOLUME_SAMPLES: usize = 1000;

/// Attempts made before the acceptance rate is judged.
const ACCEPTANCE_PROBE: u64 = 100_000;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PolytopeKind {
    /// `x_u + x_v ≤ 1` on every edge.
    X,
    /// `x_u ≤ x_v` on every edge with `u` in the lower part.
    Y,
}

/// A subset of the unit cube cut out by one linear constraint per edge.
#[derive(Debug, Clone, Serialize)]
pub struct Polytope {
    pub kind: PolytopeKind,
    pub dim: usize,
    /// `(u, v)` pairs; for `Y`, `u` is the lower endpoint.
    pub constraints: Vec<(usize, usize)>,
    /// Vertices in the upper part; reflecting them maps `Y` onto `X`.
    pub upper: Vec<usize>,
}

impl Polytope {
    pub fn x(g: &BipartiteGraph) -> Self {
        Self::build(g, PolytopeKind::X)
    }

    pub fn y(g: &BipartiteGraph) -> Self {
        Self::build(g, PolytopeKind::Y)
    }

    fn build(g: &BipartiteGraph, kind: PolytopeKind) -> Self {
        let constraints = g
            .edges()
            .iter()
            .map(|&(a, b)| {
                if g.part(a) == Part::Lower {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect();
        let upper = (0..g.n()).filter(|&v| g.part(v) == Part::Upper).collect();
        Polytope {
            kind,
            dim: g.n(),
            constraints,
            upper,
        }
    }

    /// Membership for a point of the unit cube.
    pub fn contains(&self, x: &[f64]) -> bool {
        match self.kind {
            PolytopeKind::X => self.constraints.iter().all(|&(u, v)| x[u] + x[v] <= 1.0),
            PolytopeKind::Y => self.constraints.iter().all(|&(u, v)| x[u] <= x[v]),
        }
    }

    /// `x_v ↦ 1 - x_v` on the upper part, a bijection between `Y` and `X`.
    pub fn reflect(&self, x: &mut [f64]) {
        for &v in &self.upper {
            x[v] = 1.0 - x[v];
        }
    }
}

/// Uniform points of a polytope, stored row after row.
#[derive(Debug, Clone)]
pub struct NodeSample {
    pub dim: usize,
    pub points: Vec<f64>,
    pub attempts: u64,
}

impl NodeSample {
    pub fn len(&self) -> usize {
        self.points.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn acceptance(&self) -> f64 {
        self.len() as f64 / self.attempts.max(1) as f64
    }
}

/// Rejection sampling from the unit cube.
pub fn sample_polytope(
    p: &Polytope,
    n_samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<NodeSample, GeometryError> {
    if n_samples == 0 {
        return Err(GeometryError::NoSamples);
    }
    if p.dim == 0 {
        return Err(GeometryError::EmptyGraph);
    }
    let mut points = Vec::with_capacity(n_samples * p.dim);
    let mut candidate = vec![0.0; p.dim];
    let mut accepted = 0usize;
    let mut attempts = 0u64;
    while accepted < n_samples {
        candidate.iter_mut().for_each(|c| *c = rng.random::<f64>());
        attempts += 1;
        if p.contains(&candidate) {
            points.extend_from_slice(&candidate);
            accepted += 1;
        }
        if attempts >= ACCEPTANCE_PROBE && (accepted as f64) < MIN_ACCEPTANCE * attempts as f64 {
            return Err(GeometryError::LowAcceptance {
                rate: accepted as f64 / attempts as f64,
            });
        }
    }
    Ok(NodeSample {
        dim: p.dim,
        points,
        attempts,
    })
}

/// `n_samples` uniform points of `X` from the node stream of `seed`.
pub fn sample_x(
    g: &BipartiteGraph,
    n_samples: usize,
    seed: u64,
) -> Result<NodeSample, GeometryError> {
    sample_polytope(
        &Polytope::x(g),
        n_samples,
        &mut stream_rng(seed, NODE_STREAM),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumeEstimate {
    pub estimate: f64,
    /// Binomial standard error `sqrt(p(1-p)/n)`.
    pub stderr: f64,
    pub samples: usize,
}

impl VolumeEstimate {
    pub fn within_sigmas(&self, value: f64, k: f64) -> bool {
        (self.estimate - value).abs() <= k * self.stderr
    }
}

/// Hit-or-miss volume estimate from the volume stream of `seed`.
pub fn mc_volume(
    p: &Polytope,
    n_samples: usize,
    seed: u64,
) -> Result<VolumeEstimate, GeometryError> {
    if n_samples < MIN_VOLUME_SAMPLES {
        return Err(GeometryError::TooFewSamples {
            got: n_samples,
            min: MIN_VOLUME_SAMPLES,
        });
    }
    let mut rng = stream_rng(seed, VOLUME_STREAM);
    let mut x = vec![0.0; p.dim];
    let mut hits = 0usize;
    for _ in 0..n_samples {
        x.iter_mut().for_each(|c| *c = rng.random::<f64>());
        if p.contains(&x) {
            hits += 1;
        }
    }
    let q = hits as f64 / n_samples as f64;
    Ok(VolumeEstimate {
        estimate: q,
        stderr: (q * (1.0 - q) / n_samples as f64).sqrt(),
        samples: n_samples,
    })
}
