//! Worked examples for each module, with values checked by hand.

use scott_core::backforth::Analyzer;
use scott_core::morozov::{
    automorphism_to_path, build_structure, derived_rank, f_apply, level_membership, path_to_automorphism, pred,
    sym_diff, GroupElement,
};
use scott_core::notation::{notation_from_ordinal, notation_value};
use scott_core::ordinal::Ordinal;
use scott_core::rankgame::{rank_criterion, reduction_check};
use scott_core::structure::linear_order;
use scott_core::thintree::{build_thin_tree, check_level_description, check_thin};
use scott_core::tree::{
    canonical_ranked_tree, find_path, labeled_tree_from_notation, symbolic_label_rank, tree_rank, ExplorationBudget,
    Rank, Tree,
};

fn o(s: &str) -> Ordinal {
    s.parse().unwrap()
}

#[test]
fn single_node_has_rank_zero() {
    assert_eq!(tree_rank(&Tree::new()), vec![0]);
}

#[test]
fn omega_tree_children_carry_finite_labels() {
    let t = labeled_tree_from_notation(&notation_from_ordinal(&o("w")), ExplorationBudget::new(1, 4));
    assert_eq!(t.len(), 5);
    let labels: Vec<Ordinal> = t.children(0).iter().map(|&c| notation_value(t.node(c).label.as_ref().unwrap())).collect();
    assert_eq!(labels, vec![o("0"), o("1"), o("2"), o("3")]);
}

#[test]
fn root_label_rank_of_omega_squared() {
    let t = labeled_tree_from_notation(&notation_from_ordinal(&o("w^2")), ExplorationBudget::new(2, 3));
    assert_eq!(symbolic_label_rank(&t, 0), Some(o("w^2")));
}

#[test]
fn omega_attachment_gains_one_child_per_stage() {
    for stages in 1..=6 {
        let b = build_thin_tree(&notation_from_ordinal(&o("w")), stages);
        assert_eq!(b.expansions().len(), 1);
        assert_eq!(b.expansions()[0].tau, 0);
        assert_eq!(b.tree().children(0).len(), stages);
    }
}

#[test]
fn omega_squared_starts_one_expansion_per_stage_with_a_queue() {
    let b = build_thin_tree(&notation_from_ordinal(&o("w^2")), 12);
    let trace = b.trace();
    let mut waiting = 1;
    for s in &trace.stages {
        assert_eq!(s.started.is_some(), waiting > 0, "stage {}", s.stage);
        waiting = s.queue.len();
    }
    assert_eq!(b.expansions().len(), 11);
}

#[test]
fn attachment_of_omega_label_has_rank_omega() {
    let b = build_thin_tree(&notation_from_ordinal(&o("w^2")), 10);
    let ranks = b.symbolic_ranks().unwrap();
    let omega = o("w");
    let mut seen = 0;
    for e in b.expansions() {
        if notation_value(&b.labeled()[e.sigma].label) == omega {
            assert_eq!(ranks[e.tau], omega);
            seen += 1;
        }
    }
    assert!(seen > 0);
}

#[test]
fn node_ranks_sit_within_omega_of_labels() {
    for alpha in ["w+3", "w*2", "w^2+w"] {
        let b = build_thin_tree(&notation_from_ordinal(&o(alpha)), 15);
        let ranks = b.symbolic_ranks().unwrap();
        for l in b.labeled() {
            let v = notation_value(&l.label);
            let r = &ranks[l.image];
            assert!(&v <= r && r.differs_finitely(&v), "{alpha}: label {v}, rank {r}");
        }
    }
}

#[test]
fn level_below_omega_expansion_has_one_tail() {
    let b = build_thin_tree(&notation_from_ordinal(&o("w")), 4);
    let d = b.level_rank_description(1).unwrap();
    assert_eq!(d.tails.len(), 1);
    assert_eq!(d.tails[0].limit, o("w"));
    for (n, r) in &d.tails[0].sample {
        assert!(r.differs_finitely(&Ordinal::from(*n)));
    }
}

#[test]
fn omega_levels_have_small_order_type() {
    let b = build_thin_tree(&notation_from_ordinal(&o("w")), 8);
    for m in 1..=6 {
        let d = b.level_rank_description(m).unwrap();
        assert!(check_level_description(&d, m).is_ok());
    }
}

#[test]
fn omega_squared_is_thin_to_level_ten() {
    let b = build_thin_tree(&notation_from_ordinal(&o("w^2")), 12);
    assert!(check_thin(&b, 10).unwrap().passed());
    assert_eq!(b.level_rank_bound(0).unwrap(), o("w^2+1"));
}

#[test]
fn group_examples() {
    let t = Tree::from_brackets("((()())())").unwrap();
    let (x, y) = (t.get(&[0, 0]).unwrap(), t.get(&[0, 1]).unwrap());
    let a = GroupElement::from_nodes(&t, 2, [x]).unwrap();
    assert!(sym_diff(&a, &a).unwrap().is_identity());
    assert_eq!(pred(&t, &GroupElement::identity(2)).unwrap(), GroupElement::identity(1));
    assert!(pred(&t, &GroupElement::from_nodes(&t, 2, [x, y]).unwrap()).unwrap().is_identity());
    assert_eq!(f_apply(&t, &a, &GroupElement::identity(2)), a);
}

#[test]
fn levels_are_recovered_from_the_operations() {
    let t = Tree::from_brackets("((()())(()))").unwrap();
    for bound in [2, 3] {
        let m = build_structure(&t, bound).unwrap();
        for x in 0..m.len() {
            assert_eq!(level_membership(&m, x), m.level_of(x));
        }
    }
}

#[test]
fn path_shift_moves_identities_onto_path_nodes() {
    let t = canonical_ranked_tree(&Rank::Infinite, ExplorationBudget::new(3, 2));
    let path = find_path(&t, 4).unwrap();
    let g = path_to_automorphism(&t, &path).unwrap();
    for (n, &node) in path.iter().enumerate().skip(1) {
        assert_eq!(g.apply(&GroupElement::identity(n)).unwrap(), GroupElement::singleton(&t, node));
    }
    let m = build_structure(&t, 3).unwrap();
    let perm = g.to_permutation(&m).unwrap();
    assert_eq!(automorphism_to_path(&m, &perm, 3).unwrap(), path);
}

#[test]
fn shifts_commute_with_unary_operations_only() {
    let t = Tree::from_brackets("((())(()))").unwrap();
    let m = build_structure(&t, 2).unwrap();
    let path = vec![0, t.get(&[0]).unwrap(), t.get(&[0, 0]).unwrap()];
    let g = path_to_automorphism(&t, &path).unwrap().to_permutation(&m).unwrap();
    let mut unary = true;
    let mut binary = true;
    for a in 0..m.len() {
        for b in 0..m.len() {
            unary &= g[m.f(a, b)] == m.f(a, g[b]);
            binary &= g[m.f(a, b)] == m.f(g[a], g[b]);
        }
    }
    assert!(unary);
    assert!(!binary);
}

#[test]
fn rank_of_leaf_and_rank_one_node() {
    let t = Tree::from_brackets("(()(()))").unwrap();
    let ranks = tree_rank(&t);
    let a = GroupElement::from_nodes(&t, 1, t.children(0).to_vec()).unwrap();
    assert_eq!(derived_rank(&a, &ranks).unwrap(), 0);
    let high = Tree::from_brackets("((())((())))").unwrap();
    let r = tree_rank(&high);
    let b = GroupElement::from_nodes(&high, 1, high.children(0).to_vec()).unwrap();
    assert_eq!(derived_rank(&b, &r).unwrap(), 1);
}

#[test]
fn two_element_order() {
    let s = linear_order(2);
    let mut an = Analyzer::new(&s).unwrap();
    assert!(an.equivalent(0, &[0], &[1]));
    assert!(!an.equivalent(1, &[0], &[1]));
    assert_eq!(an.scott_rank_tuple(&[0]).unwrap(), 1);
    assert_eq!(an.scott_rank_tuple(&[0, 0]).unwrap(), 1);
    assert_eq!(an.scott_rank_structure(2).unwrap(), 2);
}

#[test]
fn leaf_orbits_in_both_views() {
    let t = Tree::from_brackets("(()())").unwrap();
    let x = GroupElement::singleton(&t, 1);

    let rigid = build_structure(&t, 2).unwrap();
    let s = rigid.to_finite_structure();
    let an = Analyzer::new(&s).unwrap();
    let i = rigid.index_of(&x).unwrap();
    assert_eq!(an.orbit(&[i]).len(), 1);

    let top = build_structure(&t, 1).unwrap();
    let s = top.to_finite_structure();
    let an = Analyzer::new(&s).unwrap();
    let i = top.index_of(&x).unwrap();
    let orbit: Vec<usize> = an.orbit(&[i]).into_iter().map(|v| v[0]).collect();
    assert_eq!(orbit, top.level_range(1).collect::<Vec<_>>());
}

#[test]
fn reduction_on_two_leaves() {
    let t = Tree::from_brackets("(()())").unwrap();
    for bound in [1, 2] {
        let m = build_structure(&t, bound).unwrap();
        let s = m.to_finite_structure();
        let mut an = Analyzer::new(&s).unwrap();
        let r = reduction_check(&m, &mut an, 2).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.pairs > 0);
    }
}

#[test]
fn rank_criterion_examples() {
    let t = Tree::from_brackets("(())").unwrap();
    let a = GroupElement::singleton(&t, 1);
    let finite = vec![Rank::finite(4), Rank::finite(3)];
    assert!(rank_criterion(&a, &o("0"), &finite));
    assert!(!rank_criterion(&a, &o("1"), &finite));
    let high = vec![Rank::Ordinal(o("w*2+1")), Rank::Ordinal(o("w*2"))];
    assert!(rank_criterion(&a, &o("2"), &high));
}
