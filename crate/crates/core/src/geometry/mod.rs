//! Generic discretization of the transfer operator for any graph `G` and
//! vertex subset `S`.

mod linalg;
mod nystrom;
mod sampling;

use thiserror::Error;

pub use linalg::{
    check_symmetric, jacobi_eigen, top_eigenpairs, EigenError, SymEigen, DENSE_LIMIT, JACOBI_TOL,
};
pub use nystrom::{
    build_nystrom, build_nystrom_with, positivity_checks, spectral_series, sym_eig, KernelChi,
    NystromConfig, NystromOperator, PositivityReport, SpectrumEntry, CLUSTER_TOL, DEFAULT_TOP_K,
    DEFAULT_VOLUME_SAMPLES, EPS_POS,
};
pub use sampling::{
    mc_volume, sample_polytope, sample_x, stream_rng, NodeSample, Polytope, PolytopeKind,
    VolumeEstimate, EIGEN_STREAM, MIN_ACCEPTANCE, MIN_VOLUME_SAMPLES, NODE_STREAM, VOLUME_STREAM,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("at least one sample is required")]
    NoSamples,
    #[error("{got} volume samples requested, at least {min} required")]
    TooFewSamples { got: usize, min: usize },
    #[error("rejection sampling acceptance {rate:.2e} is below the floor")]
    LowAcceptance { rate: f64 },
    #[error("vertex {vertex} in S is out of range for {n} vertices")]
    BadSubset { vertex: usize, n: usize },
    #[error("at least {need} spectrum entries required")]
    ShortSpectrum { need: usize },
    #[error(transparent)]
    Eigen(#[from] EigenError),
}
