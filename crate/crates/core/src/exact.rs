//! Exact Euler numbers.
//!
//! An alternating labeling of a bipartite graph is a linear extension of the
//! height-one poset with `u < v` for every edge `u ∈ V₁`, `v ∈ V₂`. Counting
//! is done by dynamic programming over down-sets, one popcount layer at a
//! time. A brute-force enumerator is kept as an oracle for small graphs.

use std::collections::{BTreeMap, HashMap};
use std::ops::AddAssign;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::graph::{
    product_with_cycle, product_with_path, BipartiteGraph, Digraph, GraphError, Part, ProductSpec,
};

/// Arbitrary-precision count.
pub type BigCount = BigUint;

/// Largest graph the brute-force enumerator accepts.
pub const BRUTE_FORCE_LIMIT: usize = 10;

/// Default cap on the number of down-sets held in one DP layer.
pub const DEFAULT_STATE_BUDGET: usize = 20_000_000;

/// Largest tree size accepted by [`tree_conjecture_scan`].
pub const TREE_SCAN_LIMIT: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("graph has {n} vertices, limit for this method is {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("down-set layer grew past {budget} states")]
    StateBudget { budget: usize },
    #[error("ratio undefined: path product has Euler number 0")]
    ZeroDenominator,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// `n!` as a big integer.
pub fn factorial(n: usize) -> BigCount {
    (1..=n as u64).fold(BigCount::one(), |acc, k| acc * k)
}

/// `C(n, k)` as a big integer.
pub fn binomial(n: usize, k: usize) -> BigCount {
    if k > n {
        return BigCount::zero();
    }
    num_integer::binomial(BigCount::from(n), BigCount::from(k))
}

/// Counts alternating labelings by trying all `n!` bijections.
pub fn euler_brute(g: &BipartiteGraph) -> Result<BigCount, ExactError> {
    let n = g.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(ExactError::TooLarge {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    if !g.is_bipartite() {
        return Ok(BigCount::zero());
    }
    // (lower, upper) orientation of every edge
    let oriented: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            if g.part(u) == Part::Lower {
                (u, v)
            } else {
                (v, u)
            }
        })
        .collect();
    let mut label: Vec<usize> = (0..n).collect();
    let check = |label: &[usize]| oriented.iter().all(|&(lo, hi)| label[lo] < label[hi]);
    let mut count: u64 = u64::from(check(&label));
    // Heap's algorithm, iterative form
    let mut c = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                label.swap(0, i);
            } else {
                label.swap(c[i], i);
            }
            count += u64::from(check(&label));
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(BigCount::from(count))
}

/// Number of linear extensions of the poset given by predecessor masks.
///
/// Returns 0 if the relation has a cycle (the full set is never reached).
pub fn linear_extensions(pred: &[u64], budget: usize) -> Result<BigCount, ExactError> {
    let n = pred.len();
    if n > 64 {
        return Err(ExactError::TooLarge { n, limit: 64 });
    }
    // Every count is at most n!, which fits u128 up to n = 34.
    if n <= 34 {
        Ok(BigCount::from(layered_count::<u128>(pred, budget)?))
    } else {
        layered_count::<BigCount>(pred, budget)
    }
}

fn layered_count<T>(pred: &[u64], budget: usize) -> Result<T, ExactError>
where
    T: Clone + Zero + One + for<'a> AddAssign<&'a T>,
{
    let n = pred.len();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut layer: HashMap<u64, T> = HashMap::from([(0u64, T::one())]);
    for _ in 0..n {
        let mut next: HashMap<u64, T> = HashMap::with_capacity(layer.len() * 2);
        for (&down, count) in &layer {
            let mut free = full & !down;
            while free != 0 {
                let x = free.trailing_zeros() as usize;
                free &= free - 1;
                if pred[x] & !down == 0 {
                    next.entry(down | (1 << x))
                        .and_modify(|c| *c += count)
                        .or_insert_with(|| count.clone());
                }
            }
            if next.len() > budget {
                return Err(ExactError::StateBudget { budget });
            }
        }
        layer = next;
    }
    Ok(layer.remove(&full).unwrap_or_else(T::zero))
}

/// Predecessor masks of the alternating-labeling poset: each `V₂` vertex sits
/// above all its neighbors.
pub fn alternating_poset(g: &BipartiteGraph) -> Vec<u64> {
    let adj = g.adjacency();
    (0..g.n())
        .map(|v| if g.part(v) == Part::Upper { adj[v] } else { 0 })
        .collect()
}

/// Euler number by down-set DP with the default state budget.
pub fn euler_exact(g: &BipartiteGraph) -> Result<BigCount, ExactError> {
    euler_exact_with_budget(g, DEFAULT_STATE_BUDGET)
}

pub fn euler_exact_with_budget(g: &BipartiteGraph, budget: usize) -> Result<BigCount, ExactError> {
    if !g.is_bipartite() {
        return Ok(BigCount::zero());
    }
    linear_extensions(&alternating_poset(g), budget)
}

/// Both sides of the multiplication identity for a disjoint union:
/// `(E(g ⊔ h), C(|g|+|h|, |h|) · E(g) · E(h))`.
pub fn macmahon_check(
    g: &BipartiteGraph,
    h: &BipartiteGraph,
) -> Result<(BigCount, BigCount), ExactError> {
    let union = crate::graph::disjoint_union(g, h)?;
    let lhs = euler_exact(&union)?;
    let rhs = binomial(g.n() + h.n(), h.n()) * euler_exact(g)? * euler_exact(h)?;
    Ok((lhs, rhs))
}

/// Labelings increasing along every arc; 0 when the digraph has a directed cycle.
pub fn descent_count(d: &Digraph) -> Result<BigCount, ExactError> {
    if !d.is_acyclic() {
        return Ok(BigCount::zero());
    }
    linear_extensions(&d.predecessors(), DEFAULT_STATE_BUDGET)
}

/// Euler numbers of `G □_S P_m` for `m = 1..=max_m`.
pub fn product_counts(
    base: &BipartiteGraph,
    s_set: &[usize],
    max_m: usize,
) -> Result<Vec<BigCount>, ExactError> {
    (1..=max_m)
        .map(|m| {
            let g = product_with_path(&ProductSpec::new(base.clone(), s_set, m)?)?;
            euler_exact(&g)
        })
        .collect()
}

/// Exact ratios `E(G □_S C_{2m}) / E(G □_S P_{2m})` for `m = 1..=max_m`.
///
/// `C_2` is the single edge, so the first ratio is always 1.
pub fn cycle_product_ratio(
    base: &BipartiteGraph,
    s_set: &[usize],
    max_m: usize,
) -> Result<Vec<BigRational>, ExactError> {
    (1..=max_m)
        .map(|m| {
            let len = 2 * m;
            let cyc = euler_exact(&product_with_cycle(base, s_set, len)?)?;
            let path = euler_exact(&product_with_path(&ProductSpec::new(
                base.clone(),
                s_set,
                len,
            )?)?)?;
            if path.is_zero() {
                return Err(ExactError::ZeroDenominator);
            }
            Ok(BigRational::new(BigInt::from(cyc), BigInt::from(path)))
        })
        .collect()
}

/// One tree of the conjecture scan.
#[derive(Debug, Clone)]
pub struct TreeRow {
    pub tree: BipartiteGraph,
    pub euler: BigCount,
    /// Classical Euler number `E_n` for the same vertex count.
    pub path_euler: BigCount,
    pub is_path: bool,
}

impl TreeRow {
    pub fn violates(&self) -> bool {
        self.euler < self.path_euler
    }

    /// Equality with `E_n` on a tree that is not a path.
    pub fn non_path_equality(&self) -> bool {
        !self.is_path && self.euler == self.path_euler
    }
}

#[derive(Debug, Clone, Default)]
pub struct TreeScan {
    pub rows: Vec<TreeRow>,
}

impl TreeScan {
    pub fn violations(&self) -> impl Iterator<Item = &TreeRow> {
        self.rows.iter().filter(|r| r.violates())
    }

    pub fn non_path_equalities(&self) -> impl Iterator<Item = &TreeRow> {
        self.rows.iter().filter(|r| r.non_path_equality())
    }

    /// Number of trees with the given vertex count.
    pub fn count_with(&self, n: usize) -> usize {
        self.rows.iter().filter(|r| r.tree.n() == n).count()
    }
}

/// Checks `E(T) >= E_n` over every unlabeled tree with `1..=max_n` vertices.
///
/// Trees are grown by attaching a leaf to each vertex of every tree one size
/// smaller and deduplicated by a center-rooted canonical encoding.
pub fn tree_conjecture_scan(max_n: usize) -> Result<TreeScan, ExactError> {
    if max_n > TREE_SCAN_LIMIT {
        return Err(ExactError::TooLarge {
            n: max_n,
            limit: TREE_SCAN_LIMIT,
        });
    }
    let mut scan = TreeScan::default();
    let mut current: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    for n in 1..=max_n {
        if n > 1 {
            let mut grown: BTreeMap<String, Vec<(usize, usize)>> = BTreeMap::new();
            for edges in &current {
                for v in 0..n - 1 {
                    let mut e = edges.clone();
                    e.push((v, n - 1));
                    grown.entry(canonical_tree(n, &e)).or_insert(e);
                }
            }
            current = grown.into_values().collect();
        }
        let path_euler = euler_exact(&BipartiteGraph::path(n)?)?;
        for edges in &current {
            let tree = BipartiteGraph::new(n, edges)?;
            let is_path = n <= 2 || tree.adjacency().iter().all(|a| a.count_ones() <= 2);
            scan.rows.push(TreeRow {
                euler: euler_exact(&tree)?,
                path_euler: path_euler.clone(),
                tree,
                is_path,
            });
        }
    }
    Ok(scan)
}

/// Canonical string of an unlabeled tree (AHU encoding rooted at the center,
/// minimum over the two centers when there are two).
fn canonical_tree(n: usize, edges: &[(usize, usize)]) -> String {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    // peel leaves to find the center(s)
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut leaves: Vec<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
    let mut removed = vec![false; n];
    let mut remaining = n;
    while remaining > 2 {
        remaining -= leaves.len();
        for &leaf in &leaves {
            removed[leaf] = true;
        }
        let mut next = Vec::new();
        for &leaf in &leaves {
            for &w in adj[leaf].iter().filter(|&&w| !removed[w]) {
                degree[w] -= 1;
                if degree[w] == 1 {
                    next.push(w);
                }
            }
        }
        leaves = next;
    }
    leaves
        .iter()
        .map(|&root| encode(&adj, root, usize::MAX))
        .min()
        .unwrap_or_default()
}

fn encode(adj: &[Vec<usize>], v: usize, parent: usize) -> String {
    let mut children: Vec<String> = adj[v]
        .iter()
        .filter(|&&w| w != parent)
        .map(|&w| encode(adj, w, v))
        .collect();
    children.sort();
    format!("({})", children.concat())
}
