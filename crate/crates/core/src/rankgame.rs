//! Deciding `a ≡^β id_n` in the structure of a ranked tree from node
//! ranks, a referee that replays both players' strategies on a truncation
//! to confirm the decision, and the reduction of arbitrary tuples to
//! identities on finite views.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::backforth::Analyzer;
use crate::error::Result;
use crate::morozov::{derived_rank, project, sym_diff, GroupElement, MorozovStructure};
use crate::ordinal::Ordinal;
use crate::tree::{Rank, Tree};

/// `rk(a) >= w*beta`, with `rk(a)` the least member rank. An identity is
/// trivially equivalent to itself.
pub fn rank_criterion(a: &GroupElement, beta: &Ordinal, ranks: &[Rank]) -> bool {
    match derived_rank(a, ranks) {
        Ok(r) => r >= Rank::Ordinal(Ordinal::omega() * beta.clone()),
        Err(_) => true,
    }
}

/// Splits `r` as `w*gamma + j`.
pub fn split_omega(r: &Ordinal) -> (Ordinal, u64) {
    let mut gamma = Ordinal::zero();
    for (e, c) in r.infinite_part().terms() {
        let e = if e.is_finite() { e.sub_finite(1).expect("positive exponent") } else { e.clone() };
        gamma = gamma + Ordinal::monomial(e, c.clone());
    }
    let j = r.finite_part().try_into().unwrap_or(u64::MAX);
    (gamma, j)
}

/// Candidate challenges per level.
#[derive(Clone, Debug, Default)]
pub struct WitnessPools {
    pub levels: BTreeMap<usize, Vec<GroupElement>>,
}

impl WitnessPools {
    pub fn get(&self, level: usize) -> &[GroupElement] {
        self.levels.get(&level).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn max_level(&self) -> usize {
        self.levels.keys().next_back().copied().unwrap_or(0)
    }
}

/// Levels `from..=to` of the truncation: every subset when a level has at
/// most 10 nodes, otherwise subsets of size at most 2.
pub fn default_pools(tree: &Tree, from: usize, to: usize) -> WitnessPools {
    let levels = tree.levels();
    let mut pools = WitnessPools::default();
    for (m, nodes) in levels.iter().enumerate().take(to.min(tree.height()) + 1).skip(from) {
        let mut els = Vec::new();
        if nodes.len() <= 10 {
            for mask in 0u32..1 << nodes.len() {
                let members = nodes.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &n)| n);
                els.push(GroupElement::from_nodes(tree, m, members).expect("same level"));
            }
        } else {
            els.push(GroupElement::identity(m));
            for (i, &x) in nodes.iter().enumerate() {
                els.push(GroupElement::from_nodes(tree, m, [x]).expect("same level"));
                for &y in &nodes[i + 1..] {
                    els.push(GroupElement::from_nodes(tree, m, [x, y]).expect("same level"));
                }
            }
        }
        pools.levels.insert(m, els);
    }
    pools
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "lowercase")]
pub enum GameOutcome {
    /// The replay agrees with the rank criterion; `verdict` is its value.
    Consistent { verdict: bool, detail: String },
    Counterexample { detail: String },
    Inconclusive { detail: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Verdict {
    Holds,
    Fails(String),
    Inconclusive(String),
    Contradiction(String),
}

/// Replays the game for `a ≡^beta id_n` on a ranked truncation.
pub struct GameReferee<'t> {
    tree: &'t Tree,
    ranks: Vec<Rank>,
    pools: WitnessPools,
    memo: HashMap<(GroupElement, usize), Verdict>,
    known_depth: usize,
}

impl<'t> GameReferee<'t> {
    /// `ranks` are the ranks of the full tree, indexed by node.
    pub fn new(tree: &'t Tree, ranks: Vec<Rank>, pools: WitnessPools) -> Self {
        let known_depth = tree
            .nodes()
            .iter()
            .filter(|n| !n.complete && n.children.is_empty())
            .map(|n| n.level())
            .min()
            .unwrap_or(usize::MAX);
        GameReferee { tree, ranks, pools, memo: HashMap::new(), known_depth }
    }

    /// Uses node anchors as ranks.
    pub fn from_anchors(tree: &'t Tree, pools: WitnessPools) -> Option<Self> {
        let ranks = tree.nodes().iter().map(|n| n.anchor.clone()).collect::<Option<Vec<_>>>()?;
        Some(Self::new(tree, ranks, pools))
    }

    pub fn check(&mut self, a: &GroupElement, beta: usize) -> GameOutcome {
        let expected = rank_criterion(a, &Ordinal::from(beta as u64), &self.ranks);
        match self.verdict(a, beta) {
            Verdict::Holds if expected => GameOutcome::Consistent {
                verdict: true,
                detail: "defender answered every challenge".into(),
            },
            Verdict::Fails(why) if !expected => GameOutcome::Consistent { verdict: false, detail: why },
            Verdict::Holds | Verdict::Fails(_) => GameOutcome::Counterexample {
                detail: format!("replay disagrees with the rank criterion ({expected})"),
            },
            Verdict::Inconclusive(why) => GameOutcome::Inconclusive { detail: why },
            Verdict::Contradiction(why) => GameOutcome::Counterexample { detail: why },
        }
    }

    fn verdict(&mut self, a: &GroupElement, beta: usize) -> Verdict {
        if beta == 0 || a.is_identity() {
            return Verdict::Holds;
        }
        let key = (a.clone(), beta);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let v = if rank_criterion(a, &Ordinal::from(beta as u64), &self.ranks) {
            self.defend(a, beta)
        } else {
            self.challenge(a, beta)
        };
        self.memo.insert(key, v.clone());
        v
    }

    /// Descendants `k` levels down, one per member, each step taking the
    /// child of largest rank.
    fn high_successor(&self, a: &GroupElement, k: usize) -> Option<GroupElement> {
        let mut ends = Vec::new();
        for &t in a.members() {
            let mut cur = t;
            for _ in 0..k {
                cur = *self.tree.children(cur).iter().max_by(|&&x, &&y| {
                    self.ranks[x].cmp(&self.ranks[y]).then(y.cmp(&x))
                })?;
            }
            ends.push(cur);
        }
        GroupElement::from_nodes(self.tree, a.level + k, ends).ok()
    }

    fn defend(&mut self, a: &GroupElement, beta: usize) -> Verdict {
        let gamma = beta - 1;
        let n = a.level;
        for m in n + 1..=n + beta + 2 {
            let k = m - n;
            if m > self.known_depth {
                return Verdict::Inconclusive(format!("truncation ends before level {m}"));
            }
            let Some(star) = self.high_successor(a, k) else {
                return Verdict::Inconclusive(format!("no {k}-th successor of {} in truncation", self.name(a)));
            };
            if !rank_criterion(&star, &Ordinal::from(gamma as u64), &self.ranks) {
                return Verdict::Inconclusive(format!(
                    "truncation too narrow for a high-rank {k}-th successor of {}",
                    self.name(a)
                ));
            }
            match self.verdict(&star, gamma) {
                Verdict::Holds => {}
                Verdict::Fails(why) => {
                    return Verdict::Contradiction(format!(
                        "high-rank successor {} fails at {gamma}: {why}",
                        self.name(&star)
                    ))
                }
                other => return other,
            }
            for b in self.pools.get(m).to_vec() {
                let c = sym_diff(&b, &star).expect("same level");
                let back = sym_diff(&c, &b).expect("same level");
                if project(self.tree, &back, n) != *a {
                    return Verdict::Contradiction(format!(
                        "response {} to {} does not project onto {}",
                        self.name(&c),
                        self.name(&b),
                        self.name(a)
                    ));
                }
            }
        }
        Verdict::Holds
    }

    fn challenge(&mut self, a: &GroupElement, beta: usize) -> Verdict {
        let Ok(Rank::Ordinal(r)) = derived_rank(a, &self.ranks) else {
            return Verdict::Contradiction("infinite rank below the criterion".into());
        };
        let (gamma, j) = split_omega(&r);
        let Some(gamma) = gamma.as_u64().map(|g| g as usize) else {
            return Verdict::Inconclusive(format!("rank {r} out of range"));
        };
        if gamma + 1 < beta {
            return match self.verdict(a, gamma + 1) {
                Verdict::Fails(why) => Verdict::Fails(why),
                Verdict::Holds => Verdict::Contradiction(format!("{} holds at {}", self.name(a), gamma + 1)),
                other => other,
            };
        }
        let k = j as usize + 1;
        let m = a.level + k;
        if m > self.known_depth {
            return Verdict::Inconclusive(format!("truncation ends before level {m}"));
        }
        let mut candidates: Vec<GroupElement> = self
            .pools
            .get(m)
            .iter()
            .filter(|c| project(self.tree, c, a.level) == *a)
            .cloned()
            .collect();
        if let Some(star) = self.high_successor(a, k) {
            if !candidates.contains(&star) {
                candidates.push(star);
            }
        }
        for c in candidates {
            if gamma == 0 {
                return Verdict::Contradiction(format!(
                    "{} answers the challenge id{m} against {}",
                    self.name(&c),
                    self.name(a)
                ));
            }
            match self.verdict(&c, gamma) {
                Verdict::Fails(_) => {}
                Verdict::Holds => {
                    return Verdict::Contradiction(format!("{} answers the challenge id{m}", self.name(&c)))
                }
                other => return other,
            }
        }
        Verdict::Fails(format!("challenge id{m} (k = {k}) against {} has no answer", self.name(a)))
    }

    fn name(&self, a: &GroupElement) -> String {
        a.display(self.tree).to_string()
    }
}

/// Plays the game for `a ≡^beta id_level(a)` on a truncation with anchors,
/// with the default pools from the level of `a` to `level + beta + 2`.
pub fn bounded_game_check(tree: &Tree, a: &GroupElement, beta: usize) -> Option<GameOutcome> {
    let pools = default_pools(tree, a.level + 1, a.level + beta + 2);
    let mut r = GameReferee::from_anchors(tree, pools)?;
    Some(r.check(a, beta))
}

/// Result of comparing, for tuple pairs `a ≡^0 b`, the three statements
/// `a ≡^β b`, `a,id_n ≡^β b,g` and `id_n ≡^β g`, where `n` is the top level
/// among the coordinates of `a` and `g = a_i △ b_i` for the first coordinate
/// on that level.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ReductionReport {
    pub pairs: usize,
    pub comparisons: usize,
    pub disagreements: Vec<String>,
    pub rank_mismatches: Vec<String>,
}

impl ReductionReport {
    pub fn passed(&self) -> bool {
        self.disagreements.is_empty() && self.rank_mismatches.is_empty()
    }
}

pub fn reduction_check(m: &MorozovStructure, an: &mut Analyzer, length_bound: usize) -> Result<ReductionReport> {
    let c = an.classify(length_bound)?;
    let ranks = crate::backforth::tuple_ranks(&c);
    let index: HashMap<&[usize], usize> = c.tuples.iter().enumerate().map(|(i, t)| (t.as_slice(), i)).collect();
    let mut report = ReductionReport::default();
    let top = |t: &[usize]| {
        let n = t.iter().map(|&x| m.level_of(x)).max().expect("nonempty");
        (n, t.iter().position(|&x| m.level_of(x) == n).expect("attained"))
    };
    for (i, a) in c.tuples.iter().enumerate() {
        let (n, pos) = top(a);
        let id = m.identity(n);
        let rank_id = ranks[index[&[id][..]]];
        if ranks[i] != rank_id {
            report.rank_mismatches.push(format!("rank of {a:?} is {} but rank of id{n} is {rank_id}", ranks[i]));
        }
        for (j, b) in c.tuples.iter().enumerate().skip(i) {
            if c.classes[0][i] != c.classes[0][j] {
                continue;
            }
            report.pairs += 1;
            let g = m.sym_diff_index(a[pos], b[pos]);
            let mut a2 = a.clone();
            a2.push(id);
            let mut b2 = b.clone();
            b2.push(g);
            for beta in 0..c.classes.len() {
                let s1 = c.classes[beta][i] == c.classes[beta][j];
                let s2 = an.equivalent(beta, &a2, &b2);
                let s3 = an.equivalent(beta, &[id], &[g]);
                report.comparisons += 1;
                if !(s1 == s2 && s2 == s3) {
                    report.disagreements.push(format!("{a:?} vs {b:?} at {beta}: {s1} {s2} {s3}"));
                }
            }
        }
    }
    Ok(report)
}

/// For every element `a` of a finite view, the orbit of `a` against the
/// image of the orbit of `id_level(a)` under `u ↦ f_a(u)`.
pub fn orbit_formula_check(m: &MorozovStructure, an: &Analyzer) -> Vec<String> {
    let mut failures = Vec::new();
    let orbit = |x: usize| -> std::collections::BTreeSet<usize> {
        an.orbit(&[x]).into_iter().map(|t| t[0]).collect()
    };
    for a in 0..m.len() {
        let id_orbit = orbit(m.identity(m.level_of(a)));
        let image: std::collections::BTreeSet<usize> = id_orbit.iter().map(|&u| m.f(a, u)).collect();
        let direct = orbit(a);
        if direct != image {
            failures.push(format!("orbit of {} is {:?}, transported orbit is {:?}", m.name(a), direct, image));
        }
    }
    failures
}

/// Every element of a level below `a`'s is `f_b(f_a(a))`.
pub fn definability_check(m: &MorozovStructure) -> Vec<String> {
    let mut failures = Vec::new();
    for a in 0..m.len() {
        for b in (0..m.len()).filter(|&b| m.level_of(b) <= m.level_of(a)) {
            if m.f(b, m.f(a, a)) != b {
                failures.push(format!("{} is not f_b(f_a(a)) for a = {}", m.name(b), m.name(a)));
            }
        }
    }
    failures
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morozov::build_structure;
    use crate::tree::{canonical_ranked_tree, ExplorationBudget};

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn criterion_examples() {
        let t = Tree::from_brackets("(())").unwrap();
        let ranks = vec![Rank::finite(3), Rank::finite(3)];
        let a = GroupElement::singleton(&t, 1);
        assert!(rank_criterion(&a, &o("0"), &ranks));
        assert!(!rank_criterion(&a, &o("1"), &ranks));
        let ranks = vec![Rank::Ordinal(o("w*2+1")), Rank::Ordinal(o("w*2"))];
        assert!(rank_criterion(&a, &o("2"), &ranks));
        assert!(!rank_criterion(&a, &o("3"), &ranks));
    }

    #[test]
    fn omega_split() {
        assert_eq!(split_omega(&o("w*2+3")), (o("2"), 3));
        assert_eq!(split_omega(&o("w^2+w+1")), (o("w+1"), 1));
        assert_eq!(split_omega(&o("4")), (o("0"), 4));
    }

    #[test]
    fn finite_rank_is_challenged() {
        let t = canonical_ranked_tree(&Rank::Ordinal(o("w")), ExplorationBudget::new(8, 5));
        for &c in t.children(0) {
            let a = GroupElement::singleton(&t, c);
            let out = bounded_game_check(&t, &a, 1).unwrap();
            assert!(matches!(out, GameOutcome::Consistent { verdict: false, .. }), "{out:?}");
            assert!(matches!(bounded_game_check(&t, &a, 0).unwrap(), GameOutcome::Consistent { verdict: true, .. }));
        }
    }

    #[test]
    fn omega_node_is_defended() {
        let t = canonical_ranked_tree(&Rank::Ordinal(o("w+1")), ExplorationBudget::new(8, 5));
        let a = GroupElement::singleton(&t, t.children(0)[0]);
        let out = bounded_game_check(&t, &a, 1).unwrap();
        assert!(matches!(out, GameOutcome::Consistent { verdict: true, .. }), "{out:?}");
    }

    #[test]
    fn views_reduce_to_identities() {
        let t = Tree::from_brackets("((())())").unwrap();
        for bound in [2, 3] {
            let m = build_structure(&t, bound).unwrap();
            let s = m.to_finite_structure();
            let mut an = Analyzer::new(&s).unwrap();
            let r = reduction_check(&m, &mut an, 2).unwrap();
            assert!(r.passed(), "{r:?}");
            assert!(orbit_formula_check(&m, &an).is_empty());
            assert!(definability_check(&m).is_empty());
        }
    }
}
