//! Euler numbers of bipartite graphs, computed exactly and from the spectrum
//! of the associated transfer operator.

pub mod classical;
pub mod comb;
pub mod compare;
pub mod exact;
pub mod geometry;
pub mod graph;
pub mod grid2;
pub mod ode;
pub mod series;
