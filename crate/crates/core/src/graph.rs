//! Bipartite graphs, the `G □_S P_m` product and small digraphs.
//!
//! Vertices are `0..n` with `n <= 64`, so every vertex subset fits in a
//! `u64` mask. Product vertex `(v, i)` gets index `i * n + v`.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::path::Path;

use thiserror::Error;

/// Hard cap on vertex count; vertex subsets are single `u64` masks.
pub const MAX_VERTICES: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph has {0} vertices, at most {MAX_VERTICES} are supported")]
    TooManyVertices(usize),
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    OutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("path length must be at least 1")]
    EmptyPath,
    #[error("cycle length must be even and at least 2, got {0}")]
    BadCycle(usize),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

/// Which side of the bipartition a vertex is on.
///
/// `Lower` vertices (`V₁`) are local minima of an alternating labeling,
/// `Upper` vertices (`V₂`) are local maxima.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Part {
    Lower,
    Upper,
}

impl Part {
    pub fn flip(self) -> Self {
        match self {
            Part::Lower => Part::Upper,
            Part::Upper => Part::Lower,
        }
    }

    /// 1 for `Lower`, 2 for `Upper`.
    pub fn label(self) -> u8 {
        match self {
            Part::Lower => 1,
            Part::Upper => 2,
        }
    }
}

/// Simple undirected graph with a computed 2-coloring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    part: Vec<Part>,
    bipartite_ok: bool,
}

impl BipartiteGraph {
    /// Builds a graph and 2-colors it by BFS. The lowest-index vertex of
    /// every component lands in `Part::Lower`. Odd cycles are not an error:
    /// they clear `bipartite_ok`.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if n > MAX_VERTICES {
            return Err(GraphError::TooManyVertices(n));
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut normalized = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::OutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge(key.0, key.1));
            }
            normalized.push(key);
        }
        let (part, bipartite_ok) = two_color(n, &normalized);
        Ok(Self {
            n,
            edges: normalized,
            part,
            bipartite_ok,
        })
    }

    /// Graph with `n` vertices and no edges.
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        Self::new(n, &[])
    }

    /// The path `P_n`.
    pub fn path(n: usize) -> Result<Self, GraphError> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(n, &edges)
    }

    /// The cycle `C_n` for `n >= 3`.
    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        if n < 3 {
            return Err(GraphError::BadCycle(n));
        }
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        edges.push((n - 1, 0));
        Self::new(n, &edges)
    }

    /// Complete bipartite graph `K_{a,b}`; vertices `0..a` on one side.
    pub fn complete_bipartite(a: usize, b: usize) -> Result<Self, GraphError> {
        let mut edges = Vec::with_capacity(a * b);
        for u in 0..a {
            for v in a..a + b {
                edges.push((u, v));
            }
        }
        Self::new(a + b, &edges)
    }

    /// Reads the plain-text format: first non-comment line is `n`, then one
    /// `u v` pair per line. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut n = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| GraphError::Parse {
                line: idx + 1,
                msg: msg.to_string(),
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            match n {
                None => {
                    if fields.len() != 1 {
                        return Err(bad("expected vertex count"));
                    }
                    n = Some(
                        fields[0]
                            .parse::<usize>()
                            .map_err(|e| bad(&e.to_string()))?,
                    );
                }
                Some(_) => {
                    if fields.len() != 2 {
                        return Err(bad("expected `u v`"));
                    }
                    let u = fields[0]
                        .parse::<usize>()
                        .map_err(|e| bad(&e.to_string()))?;
                    let v = fields[1]
                        .parse::<usize>()
                        .map_err(|e| bad(&e.to_string()))?;
                    edges.push((u, v));
                }
            }
        }
        let n = n.ok_or(GraphError::Parse {
            line: 0,
            msg: "missing vertex count".into(),
        })?;
        Self::new(n, &edges)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, GraphError> {
        let text = std::fs::read_to_string(path).map_err(|e| GraphError::Io(e.to_string()))?;
        Self::parse(&text)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges as `(min, max)` pairs in insertion order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn part(&self, v: usize) -> Part {
        self.part[v]
    }

    pub fn parts(&self) -> &[Part] {
        &self.part
    }

    pub fn is_bipartite(&self) -> bool {
        self.bipartite_ok
    }

    /// Sizes `(|V₁|, |V₂|)`.
    pub fn part_sizes(&self) -> (usize, usize) {
        let lower = self.part.iter().filter(|&&p| p == Part::Lower).count();
        (lower, self.n - lower)
    }

    /// Neighbor masks, one per vertex.
    pub fn adjacency(&self) -> Vec<u64> {
        let mut adj = vec![0u64; self.n];
        for &(u, v) in &self.edges {
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
        adj
    }

    /// Same graph with the roles of `V₁` and `V₂` exchanged.
    pub fn with_parts_swapped(&self) -> Self {
        Self {
            part: self.part.iter().map(|p| p.flip()).collect(),
            ..self.clone()
        }
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut reached = 1u64;
        let mut frontier = 1u64;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let fresh = adj[v] & !reached;
            reached |= fresh;
            frontier |= fresh;
        }
        reached.count_ones() as usize == self.n
    }

    /// True iff every `V₁`–`V₂` pair is an edge.
    pub fn is_complete_bipartite(&self) -> bool {
        let (a, b) = self.part_sizes();
        self.bipartite_ok && self.edges.len() == a * b
    }
}

impl fmt::Display for BipartiteGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        for &(u, v) in &self.edges {
            writeln!(f, "{u} {v}")?;
        }
        Ok(())
    }
}

fn two_color(n: usize, edges: &[(usize, usize)]) -> (Vec<Part>, bool) {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut part: Vec<Option<Part>> = vec![None; n];
    let mut ok = true;
    let mut queue = VecDeque::new();
    for start in 0..n {
        if part[start].is_some() {
            continue;
        }
        part[start] = Some(Part::Lower);
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            let pu = part[u].expect("queued vertices are colored");
            for &w in &adj[u] {
                match part[w] {
                    None => {
                        part[w] = Some(pu.flip());
                        queue.push_back(w);
                    }
                    Some(pw) if pw == pu => ok = false,
                    Some(_) => {}
                }
            }
        }
    }
    (
        part.into_iter().map(|p| p.unwrap_or(Part::Lower)).collect(),
        ok,
    )
}

/// Input to [`product_with_path`]: the base graph `G`, the subset `S` and
/// the path length `m`.
#[derive(Debug, Clone)]
pub struct ProductSpec {
    base: BipartiteGraph,
    s_set: Vec<usize>,
    path_len: usize,
}

impl ProductSpec {
    pub fn new(base: BipartiteGraph, s_set: &[usize], path_len: usize) -> Result<Self, GraphError> {
        if path_len == 0 {
            return Err(GraphError::EmptyPath);
        }
        let mut s: Vec<usize> = s_set.to_vec();
        s.sort_unstable();
        s.dedup();
        if let Some(&v) = s.iter().find(|&&v| v >= base.n()) {
            return Err(GraphError::OutOfRange {
                vertex: v,
                n: base.n(),
            });
        }
        if base.n() * path_len > MAX_VERTICES {
            return Err(GraphError::TooManyVertices(base.n() * path_len));
        }
        Ok(Self {
            base,
            s_set: s,
            path_len,
        })
    }

    pub fn base(&self) -> &BipartiteGraph {
        &self.base
    }

    pub fn s_set(&self) -> &[usize] {
        &self.s_set
    }

    pub fn path_len(&self) -> usize {
        self.path_len
    }
}

/// `G □_S P_m`: layer edges copied from `G`, and `(v, i) ~ (v, i+1)` for `v ∈ S`.
pub fn product_with_path(spec: &ProductSpec) -> Result<BipartiteGraph, GraphError> {
    let n = spec.base.n();
    let m = spec.path_len;
    let mut edges = Vec::with_capacity(m * spec.base.edges().len() + (m - 1) * spec.s_set.len());
    for i in 0..m {
        edges.extend(
            spec.base
                .edges()
                .iter()
                .map(|&(u, v)| (i * n + u, i * n + v)),
        );
        if i + 1 < m {
            edges.extend(spec.s_set.iter().map(|&v| (i * n + v, (i + 1) * n + v)));
        }
    }
    BipartiteGraph::new(n * m, &edges)
}

/// `G □_S C_len` for even `len`. `C_2` is taken as the simple graph `P_2`,
/// so `len = 2` coincides with the path product.
pub fn product_with_cycle(
    base: &BipartiteGraph,
    s_set: &[usize],
    len: usize,
) -> Result<BipartiteGraph, GraphError> {
    if len < 2 || len % 2 == 1 {
        return Err(GraphError::BadCycle(len));
    }
    let spec = ProductSpec::new(base.clone(), s_set, len)?;
    let path = product_with_path(&spec)?;
    if len == 2 {
        return Ok(path);
    }
    let n = base.n();
    let mut edges = path.edges().to_vec();
    edges.extend(spec.s_set().iter().map(|&v| (v, (len - 1) * n + v)));
    BipartiteGraph::new(n * len, &edges)
}

/// Vertex-relabeled union: `h`'s vertices are shifted by `g.n()`.
pub fn disjoint_union(
    g: &BipartiteGraph,
    h: &BipartiteGraph,
) -> Result<BipartiteGraph, GraphError> {
    let shift = g.n();
    let mut edges = g.edges().to_vec();
    edges.extend(h.edges().iter().map(|&(u, v)| (u + shift, v + shift)));
    BipartiteGraph::new(g.n() + h.n(), &edges)
}

/// The comb `P₂ □_{0} P_m`: spine on vertices `0, 2, 4, …`, teeth on the odd ones.
pub fn comb(m: usize) -> Result<BipartiteGraph, GraphError> {
    product_with_path(&ProductSpec::new(BipartiteGraph::path(2)?, &[0], m)?)
}

/// The `2 × m` grid `P₂ □ P_m`.
pub fn grid2(m: usize) -> Result<BipartiteGraph, GraphError> {
    product_with_path(&ProductSpec::new(BipartiteGraph::path(2)?, &[0, 1], m)?)
}

/// Directed graph on at most 64 vertices, without self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    arcs: Vec<(usize, usize)>,
}

impl Digraph {
    pub fn new(n: usize, arcs: &[(usize, usize)]) -> Result<Self, GraphError> {
        if n > MAX_VERTICES {
            return Err(GraphError::TooManyVertices(n));
        }
        for &(u, v) in arcs {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::OutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
        }
        Ok(Self {
            n,
            arcs: arcs.to_vec(),
        })
    }

    /// Same text format as [`BipartiteGraph::parse`], lines read as arcs `u -> v`.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut n = None;
        let mut arcs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|e| GraphError::Parse {
                    line: idx + 1,
                    msg: e.to_string(),
                })?;
            match (n, fields.as_slice()) {
                (None, [k]) => n = Some(*k),
                (Some(_), [u, v]) => arcs.push((*u, *v)),
                _ => {
                    return Err(GraphError::Parse {
                        line: idx + 1,
                        msg: "malformed line".into(),
                    })
                }
            }
        }
        let n = n.ok_or(GraphError::Parse {
            line: 0,
            msg: "missing vertex count".into(),
        })?;
        Self::new(n, &arcs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    /// Predecessor masks: bit `u` of entry `v` is set for every arc `u -> v`.
    pub fn predecessors(&self) -> Vec<u64> {
        let mut pred = vec![0u64; self.n];
        for &(u, v) in &self.arcs {
            pred[v] |= 1 << u;
        }
        pred
    }

    pub fn is_acyclic(&self) -> bool {
        let pred = self.predecessors();
        let full = if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        };
        let mut placed = 0u64;
        loop {
            let mut ready = 0u64;
            for (v, &p) in pred.iter().enumerate() {
                if placed & (1 << v) == 0 && p & !placed == 0 {
                    ready |= 1 << v;
                }
            }
            if ready == 0 {
                return placed == full;
            }
            placed |= ready;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge() {
        let g = BipartiteGraph::new(2, &[(0, 1)]).unwrap();
        assert!(g.is_bipartite());
        assert_eq!(g.part(0).label(), 1);
        assert_eq!(g.part(1).label(), 2);
    }

    #[test]
    fn triangle_is_not_bipartite() {
        let g = BipartiteGraph::new(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(!g.is_bipartite());
    }

    #[test]
    fn even_cycle_alternates() {
        let g = BipartiteGraph::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert!(g.is_bipartite());
        let labels: Vec<u8> = g.parts().iter().map(|p| p.label()).collect();
        assert_eq!(labels, vec![1, 2, 1, 2]);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            BipartiteGraph::new(2, &[(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge(0, 1))
        );
        assert_eq!(
            BipartiteGraph::new(2, &[(0, 2)]),
            Err(GraphError::OutOfRange { vertex: 2, n: 2 })
        );
        assert_eq!(
            BipartiteGraph::new(2, &[(1, 1)]),
            Err(GraphError::SelfLoop(1))
        );
        assert_eq!(
            BipartiteGraph::empty(65),
            Err(GraphError::TooManyVertices(65))
        );
    }

    #[test]
    fn lowest_vertex_of_each_component_is_lower() {
        let g = BipartiteGraph::new(5, &[(3, 1), (4, 2)]).unwrap();
        assert_eq!(g.part(0), Part::Lower);
        assert_eq!(g.part(1), Part::Lower);
        assert_eq!(g.part(3), Part::Upper);
        assert_eq!(g.part(2), Part::Lower);
        assert_eq!(g.part(4), Part::Upper);
    }

    #[test]
    fn comb_five() {
        let g = comb(5).unwrap();
        assert_eq!(g.n(), 10);
        assert_eq!(g.edges().len(), 9);
        assert!(g.is_bipartite());
        assert!(g.is_connected());
    }

    #[test]
    fn grid_two_by_three() {
        let g = grid2(3).unwrap();
        assert_eq!(g.n(), 6);
        assert_eq!(g.edges().len(), 7);
    }

    #[test]
    fn empty_s_gives_disjoint_copies() {
        let spec = ProductSpec::new(BipartiteGraph::path(2).unwrap(), &[], 3).unwrap();
        let g = product_with_path(&spec).unwrap();
        assert_eq!(g.n(), 6);
        assert_eq!(g.edges(), &[(0, 1), (2, 3), (4, 5)]);
        assert!(!g.is_connected());
    }

    #[test]
    fn product_spec_validation() {
        let p2 = BipartiteGraph::path(2).unwrap();
        assert_eq!(
            ProductSpec::new(p2.clone(), &[0], 0).unwrap_err(),
            GraphError::EmptyPath
        );
        assert_eq!(
            ProductSpec::new(p2.clone(), &[2], 3).unwrap_err(),
            GraphError::OutOfRange { vertex: 2, n: 2 }
        );
        assert_eq!(
            ProductSpec::new(p2, &[0], 33).unwrap_err(),
            GraphError::TooManyVertices(66)
        );
    }

    #[test]
    fn vertex_naming_in_products() {
        let g = comb(3).unwrap();
        // spine vertex (0, i) is i*2, tooth (1, i) is i*2 + 1
        assert!(g.edges().contains(&(0, 2)));
        assert!(g.edges().contains(&(2, 4)));
        assert!(g.edges().contains(&(4, 5)));
        assert!(!g.edges().contains(&(1, 3)));
    }

    #[test]
    fn disjoint_unions() {
        let p1 = BipartiteGraph::path(1).unwrap();
        let p2 = BipartiteGraph::path(2).unwrap();
        let p3 = BipartiteGraph::path(3).unwrap();
        let c4 = BipartiteGraph::cycle(4).unwrap();
        let u = disjoint_union(&p2, &p2).unwrap();
        assert_eq!((u.n(), u.edges().len()), (4, 2));
        let u = disjoint_union(&p1, &p1).unwrap();
        assert_eq!((u.n(), u.edges().len()), (2, 0));
        let u = disjoint_union(&c4, &p3).unwrap();
        assert_eq!((u.n(), u.edges().len()), (7, 6));
        assert!(u.is_bipartite());
    }

    #[test]
    fn cycle_products() {
        let p1 = BipartiteGraph::path(1).unwrap();
        let c6 = product_with_cycle(&p1, &[0], 6).unwrap();
        assert_eq!(c6.edges().len(), 6);
        assert!(c6.is_bipartite());
        let c2 = product_with_cycle(&p1, &[0], 2).unwrap();
        assert_eq!(c2.edges().len(), 1);
        assert!(product_with_cycle(&p1, &[0], 5).is_err());
    }

    #[test]
    fn parse_text_format() {
        let g = BipartiteGraph::parse("# square\n4\n0 1\n1 2\n\n2 3 # last side\n3 0\n").unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.edges().len(), 4);
        assert_eq!(BipartiteGraph::parse(&g.to_string()).unwrap(), g);
        assert!(matches!(
            BipartiteGraph::parse("3\n0 1 2\n"),
            Err(GraphError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            BipartiteGraph::parse(""),
            Err(GraphError::Parse { .. })
        ));
    }

    #[test]
    fn digraph_cycles() {
        let d = Digraph::new(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(!d.is_acyclic());
        let d = Digraph::new(4, &[(0, 1), (2, 1), (2, 3)]).unwrap();
        assert!(d.is_acyclic());
        assert_eq!(Digraph::new(2, &[(1, 1)]), Err(GraphError::SelfLoop(1)));
        let d = Digraph::parse("3\n0 1\n1 0\n").unwrap();
        assert!(!d.is_acyclic());
    }
}
