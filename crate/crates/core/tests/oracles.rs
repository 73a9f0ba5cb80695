//! Values computed independently of the library and frozen here.

use std::collections::BTreeSet;

use scott_core::coding::{encode, DistinguishingPair, Sort};
use scott_core::morozov::build_structure;
use scott_core::structure::FiniteStructure;
use scott_core::tree::{enumerate_trees, Tree};

/// Rooted unlabeled trees by node count and height bound, from the Euler
/// transform `A_h(x) = x * prod_k (1 - x^k)^(-a_{h-1,k})`.
fn tree_counts(max_nodes: usize, max_depth: usize) -> Vec<u64> {
    let mut a = vec![0u64; max_nodes + 1];
    a[1] = 1;
    for _ in 0..max_depth {
        // b = prod_k (1 - x^k)^(-a_k), truncated.
        let mut b = vec![0u64; max_nodes + 1];
        b[0] = 1;
        for k in 1..max_nodes {
            for _ in 0..a[k] {
                for n in k..=max_nodes {
                    b[n] += b[n - k];
                }
            }
        }
        let mut next = vec![0u64; max_nodes + 1];
        next[1..=max_nodes].copy_from_slice(&b[..max_nodes]);
        a = next;
    }
    a
}

#[test]
fn rooted_tree_counts() {
    // Unbounded height: 1, 1, 2, 4, 9, 20, 48, 115.
    let counts = tree_counts(8, 8);
    assert_eq!(&counts[1..], &[1, 1, 2, 4, 9, 20, 48, 115]);
    let trees = enumerate_trees(8, 8);
    for (n, &count) in counts.iter().enumerate().skip(1) {
        assert_eq!(trees.iter().filter(|t| t.len() == n).count() as u64, count, "{n} nodes");
    }
}

#[test]
fn height_bounded_tree_counts() {
    for depth in 0..=4 {
        let counts = tree_counts(8, depth);
        let trees = enumerate_trees(8, depth);
        assert_eq!(trees.len() as u64, counts.iter().sum::<u64>(), "depth {depth}");
        assert!(trees.iter().all(|t| t.height() <= depth));
    }
    assert_eq!(tree_counts(8, 3).iter().sum::<u64>(), 113);
}

#[test]
fn two_leaf_view_matches_set_evaluation() {
    // Level-1 elements as subsets of {x, y}; level 0 is the identity.
    let t = Tree::from_brackets("(()())").unwrap();
    let m = build_structure(&t, 1).unwrap();
    assert_eq!(m.level_range(1).len(), 4);
    let as_set = |i: usize| -> Option<BTreeSet<usize>> {
        (m.level_of(i) == 1).then(|| m.element(i).members().iter().copied().collect())
    };
    for a in 0..m.len() {
        for b in 0..m.len() {
            let expected = match (as_set(a), as_set(b)) {
                (Some(x), Some(y)) => Some(x.symmetric_difference(&y).copied().collect::<BTreeSet<_>>()),
                _ => None,
            };
            assert_eq!(as_set(m.f(a, b)), expected, "f({a}, {b})");
        }
    }
}

fn fixture() -> FiniteStructure {
    let mut a = FiniteStructure::new(3);
    a.add_relation("P", 1, [vec![0]]);
    a.add_relation("R", 2, [vec![0, 1], vec![1, 2]]);
    a
}

#[test]
fn coding_sort_sizes() {
    // Pair (2, 3): false atoms get 2 points, true atoms 3.
    // L: 2 symbols. L*: cycles of length 2 and 3.
    // U: 3 one-tuples plus 9 two-tuples of length 2.
    // T: P gives 3 + 2 + 2, R gives 2 * 3 + 7 * 2.
    let s = encode(&fixture(), DistinguishingPair::new(2, 3).unwrap()).unwrap();
    let sizes: Vec<usize> = [Sort::L, Sort::LStar, Sort::A, Sort::U, Sort::T].iter().map(|&x| s.sort_count(x)).collect();
    assert_eq!(sizes, vec![2, 5, 3, 21, 27]);
    assert_eq!(s.len(), 58);
}

#[test]
fn tuples_share_cycles_across_symbols() {
    let mut a = FiniteStructure::new(4);
    a.add_relation("P", 1, [vec![0]]);
    a.add_relation("Q", 1, [vec![1], vec![2]]);
    let s = encode(&a, DistinguishingPair::default()).unwrap();
    assert_eq!(s.sort_count(Sort::U), 4);
    assert_eq!(s.sort_count(Sort::LStar), 5);
}
