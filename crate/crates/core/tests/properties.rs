use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use scott_core::coding::{decode, encode, random_relational, verify_star, DistinguishingPair};
use scott_core::morozov::{build_structure, f_apply, level_membership, MorozovStructure};
use scott_core::notation::{fundamental_seq, notation_from_ordinal, notation_value};
use scott_core::ordinal::Ordinal;
use scott_core::tree::random_tree;

fn ordinal() -> impl Strategy<Value = Ordinal> {
    let exps = ["0", "1", "2", "3", "w", "w+1"];
    prop::collection::vec((0..exps.len(), 1u32..4), 0..4).prop_map(move |terms| {
        terms
            .into_iter()
            .fold(Ordinal::zero(), |acc, (e, c)| acc + Ordinal::monomial(exps[e].parse().unwrap(), c))
    })
}

fn view() -> impl Strategy<Value = MorozovStructure> {
    (any::<u64>(), any::<bool>()).prop_map(|(seed, top)| {
        let t = random_tree(&mut ChaCha8Rng::seed_from_u64(seed), 3, 2, 4);
        let bound = if top { t.height() } else { t.height() + 1 };
        build_structure(&t, bound).unwrap()
    })
}

proptest! {
    #[test]
    fn addition_is_associative(a in ordinal(), b in ordinal(), c in ordinal()) {
        prop_assert_eq!((&a + &b) + c.clone(), a + (b + c));
    }

    #[test]
    fn multiplication_is_associative(a in ordinal(), b in ordinal(), c in ordinal()) {
        prop_assert_eq!((&a * &b) * c.clone(), a * (b * c));
    }

    #[test]
    fn multiplication_distributes_on_the_left(a in ordinal(), b in ordinal(), c in ordinal()) {
        prop_assert_eq!(&a * &(&b + &c), (&a * &b) + (&a * &c));
    }

    #[test]
    fn units_and_monotonicity(a in ordinal(), b in ordinal()) {
        prop_assert_eq!(&a + &Ordinal::zero(), a.clone());
        prop_assert_eq!(&Ordinal::zero() + &a, a.clone());
        prop_assert_eq!(&a * &Ordinal::one(), a.clone());
        prop_assert_eq!(&Ordinal::one() * &a, a.clone());
        prop_assert!(&b + &a >= a);
        if !b.is_zero() {
            prop_assert!(&a + &b > a);
        }
    }

    #[test]
    fn text_and_json_round_trip(a in ordinal()) {
        prop_assert_eq!(a.to_string().parse::<Ordinal>().unwrap(), a.clone());
        let json = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<Ordinal>(&json).unwrap(), a.clone());
        prop_assert_eq!(notation_value(&notation_from_ordinal(&a)), a);
    }

    #[test]
    fn fundamental_sequences_increase_to_the_limit(a in ordinal()) {
        prop_assume!(a.is_limit());
        let nota = notation_from_ordinal(&a);
        let seq: Vec<Ordinal> = (0..6).map(|n| notation_value(&fundamental_seq(&nota, n).unwrap())).collect();
        for w in seq.windows(2) {
            prop_assert!(w[0] < w[1]);
        }
        prop_assert!(seq.iter().all(|x| x < &a));
        prop_assert_eq!(seq, (0..6).map(|n| a.fundamental(n).unwrap()).collect::<Vec<_>>());
    }

    #[test]
    fn symmetric_difference_is_a_group_on_each_level(m in view()) {
        for n in 0..=m.bound() {
            let id = m.identity(n);
            for a in m.level_range(n) {
                prop_assert_eq!(m.sym_diff_index(a, id), a);
                prop_assert_eq!(m.sym_diff_index(a, a), id);
                for b in m.level_range(n) {
                    prop_assert_eq!(m.sym_diff_index(a, b), m.sym_diff_index(b, a));
                    for c in m.level_range(n).take(8) {
                        prop_assert_eq!(
                            m.sym_diff_index(m.sym_diff_index(a, b), c),
                            m.sym_diff_index(a, m.sym_diff_index(b, c))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn predecessor_is_a_homomorphism(m in view()) {
        for n in 1..=m.bound() {
            prop_assert_eq!(m.pred_index(m.identity(n)), m.identity(n - 1));
            for a in m.level_range(n) {
                for b in m.level_range(n) {
                    prop_assert_eq!(
                        m.pred_index(m.sym_diff_index(a, b)),
                        m.sym_diff_index(m.pred_index(a), m.pred_index(b))
                    );
                }
            }
        }
    }

    #[test]
    fn f_is_symmetric_and_lands_on_the_lower_level(m in view()) {
        let t = m.tree();
        for a in 0..m.len() {
            prop_assert_eq!(m.f(a, m.identity(m.level_of(a))), a);
            prop_assert_eq!(level_membership(&m, a), m.level_of(a));
            for b in 0..m.len() {
                let v = m.f(a, b);
                prop_assert_eq!(v, m.f(b, a));
                prop_assert_eq!(m.level_of(v), m.level_of(a).min(m.level_of(b)));
                prop_assert_eq!(m.element(v), f_apply(t, &m.element(a), &m.element(b)));
            }
        }
    }

    #[test]
    fn coding_round_trips(seed in any::<u64>(), c1 in 1usize..4, extra in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_relational(&mut rng, 4, 3, 2);
        let pair = DistinguishingPair::new(c1, c1 + extra).unwrap();
        let star = encode(&a, pair).unwrap();
        prop_assert!(verify_star(&star).passed());
        let back = decode(&star, pair).unwrap();
        prop_assert!(a.find_isomorphism(&back).is_some());
    }
}
