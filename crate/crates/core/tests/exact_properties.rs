use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Pow;
use proptest::prelude::*;

use euler_core::exact::{
    euler_brute, euler_exact, factorial, macmahon_check, tree_conjecture_scan,
};
use euler_core::graph::{product_with_path, BipartiteGraph, ProductSpec};

/// A random bipartite graph: each vertex gets a side, each cross pair an edge coin.
fn bipartite(max_n: usize) -> impl Strategy<Value = BipartiteGraph> {
    (1..=max_n)
        .prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::vec(any::<bool>(), n),
                proptest::collection::vec(any::<bool>(), n * n),
            )
        })
        .prop_map(|(n, side, coin)| {
            let edges: Vec<(usize, usize)> = (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .filter(|&(u, v)| side[u] != side[v] && coin[u * n + v])
                .collect();
            BipartiteGraph::new(n, &edges).unwrap()
        })
}

fn to_rational(x: &num_bigint::BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(x.clone()))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn dp_agrees_with_brute_force(g in bipartite(8)) {
        prop_assert_eq!(euler_exact(&g).unwrap(), euler_brute(&g).unwrap());
    }

    #[test]
    fn swapping_parts_preserves_the_count(g in bipartite(9)) {
        prop_assert_eq!(euler_exact(&g).unwrap(), euler_exact(&g.with_parts_swapped()).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, ..ProptestConfig::default() })]

    #[test]
    fn disjoint_unions_multiply(g in bipartite(7), h in bipartite(7)) {
        let (lhs, rhs) = macmahon_check(&g, &h).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn empty_subset_products_are_powers(g in bipartite(4), m in 1usize..=3) {
        // E(G □_∅ P_m) / (mn)! = (E(G) / n!)^m
        let n = g.n();
        let prod = product_with_path(&ProductSpec::new(g.clone(), &[], m).unwrap()).unwrap();
        let lhs = to_rational(&euler_exact(&prod).unwrap()) / to_rational(&factorial(m * n));
        let base = to_rational(&euler_exact(&g).unwrap()) / to_rational(&factorial(n));
        prop_assert_eq!(lhs, Pow::pow(base, m as u32));
    }
}

/// Every connected bipartite graph on `n` labelled vertices.
fn connected_bipartite(n: usize) -> Vec<BipartiteGraph> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    (0u32..1 << pairs.len())
        .filter_map(|mask| {
            let edges: Vec<_> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, e)| *e)
                .collect();
            let g = BipartiteGraph::new(n, &edges).ok()?;
            (g.is_bipartite() && g.is_connected()).then_some(g)
        })
        .collect()
}

#[test]
fn bounds_with_equality_exactly_on_complete_bipartite() {
    for n in 1..=6 {
        let graphs = connected_bipartite(n);
        assert!(!graphs.is_empty());
        for g in graphs {
            let e = euler_exact(&g).unwrap();
            let (a, b) = g.part_sizes();
            let lower = factorial(a) * factorial(b);
            assert!(lower <= e && e <= factorial(n), "{g}");
            assert_eq!(lower == e, g.is_complete_bipartite(), "{g}");
        }
    }
}

#[test]
fn even_cycles_relate_to_odd_paths() {
    for k in 2..=7 {
        let cycle = euler_exact(&BipartiteGraph::cycle(2 * k).unwrap()).unwrap();
        let path = euler_exact(&BipartiteGraph::path(2 * k - 1).unwrap()).unwrap();
        assert_eq!(cycle, path * k as u32, "k = {k}");
    }
}

#[test]
fn trees_are_at_least_paths() {
    let scan = tree_conjecture_scan(9).unwrap();
    let violations: Vec<_> = scan.violations().map(|r| r.tree.to_string()).collect();
    let equalities: Vec<_> = scan
        .non_path_equalities()
        .map(|r| r.tree.to_string())
        .collect();
    assert!(
        violations.is_empty(),
        "trees below the path count: {violations:?}"
    );
    assert!(
        equalities.is_empty(),
        "non-path trees matching the path count: {equalities:?}"
    );
    assert!(scan.rows.iter().any(|r| r.is_path));
}
