//! Staged construction of a thin tree from an ordinal notation by delaying
//! the expansion of limit-labeled nodes, with exact ranks of the limit tree
//! and per-level descriptions of the rank sets.
//!
//! Stage `s + 1` runs three steps:
//! 1. the head `σ` of the expansion queue starts expanding: its attachment
//!    node `τ` is the level-`s` end of the chain below `t(σ)`, and `t(σ_0)`
//!    becomes a child of `τ`;
//! 2. every other open node at level `s` gets one child, either the image of
//!    its successor label or a padding node;
//! 3. every earlier expansion adds the image of its next `σ_n` under its
//!    attachment node, extended down to level `s + 1`.
//!
//! A limit-labeled node joins the queue when its image is created.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::notation::{notation_value, Notation};
use crate::ordinal::{order_type_of_finite_described_set, Ordinal, RankSetDescription, RankTail};
use crate::tree::{tree_rank, LazyNode, NodeId, Tree};

/// A node of the explored part of the labeled tree `T_a`.
#[derive(Clone, Debug)]
pub struct LabeledNode {
    pub address: Vec<u64>,
    pub label: Notation,
    pub parent: Option<usize>,
    pub image: NodeId,
}

/// What a node of the built tree is: the image of a labeled node, or a
/// padding node on the delay chain of a limit-labeled node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Image(usize),
    Pad(usize),
}

#[derive(Clone, Debug)]
pub struct Expansion {
    pub sigma: usize,
    pub tau: NodeId,
    pub start_stage: usize,
    pub next: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StartRecord {
    pub sigma: Vec<u64>,
    pub label: String,
    pub tau: Vec<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StageRecord {
    pub stage: usize,
    pub started: Option<StartRecord>,
    pub queue: Vec<Vec<u64>>,
    pub images: Vec<(Vec<u64>, Vec<u64>)>,
    pub pads: usize,
    pub nodes: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BuildTrace {
    pub alpha: String,
    pub stages: Vec<StageRecord>,
}

#[derive(Clone, Debug)]
pub struct ThinBuild {
    root_label: Notation,
    stage: usize,
    tree: Tree,
    kinds: Vec<NodeKind>,
    by_level: Vec<Vec<NodeId>>,
    labeled: Vec<LabeledNode>,
    queue: VecDeque<usize>,
    expansions: Vec<Expansion>,
    attachment: HashMap<NodeId, usize>,
    trace: Vec<StageRecord>,
    record: Option<StageRecord>,
}

/// Runs `stages` stages of the construction for `a`.
pub fn build_thin_tree(a: &Notation, stages: usize) -> ThinBuild {
    let mut b = ThinBuild::new(a);
    for _ in 0..stages {
        b.step();
    }
    b
}

impl ThinBuild {
    pub fn new(a: &Notation) -> Self {
        let mut b = ThinBuild {
            root_label: a.clone(),
            stage: 0,
            tree: Tree::new(),
            kinds: vec![NodeKind::Image(0)],
            by_level: vec![vec![0]],
            labeled: vec![LabeledNode { address: Vec::new(), label: a.clone(), parent: None, image: 0 }],
            queue: VecDeque::new(),
            expansions: Vec::new(),
            attachment: HashMap::new(),
            trace: Vec::new(),
            record: None,
        };
        if a.is_limit() {
            b.queue.push_back(0);
        }
        b
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn kind(&self, node: NodeId) -> NodeKind {
        self.kinds[node]
    }

    pub fn labeled(&self) -> &[LabeledNode] {
        &self.labeled
    }

    pub fn expansions(&self) -> &[Expansion] {
        &self.expansions
    }

    pub fn trace(&self) -> BuildTrace {
        BuildTrace { alpha: notation_value(&self.root_label).to_string(), stages: self.trace.clone() }
    }

    /// The labeled node whose image is `node`, if any.
    pub fn preimage(&self, node: NodeId) -> Option<usize> {
        match self.kinds[node] {
            NodeKind::Image(s) => Some(s),
            NodeKind::Pad(_) => None,
        }
    }

    pub fn is_attachment(&self, node: NodeId) -> bool {
        self.attachment.contains_key(&node)
    }

    /// Runs one stage.
    pub fn step(&mut self) {
        let s = self.stage;
        self.record = Some(StageRecord {
            stage: s + 1,
            started: None,
            queue: Vec::new(),
            images: Vec::new(),
            pads: 0,
            nodes: 0,
        });
        let earlier = self.expansions.len();

        if let Some(sigma) = self.queue.pop_front() {
            let tau = self.chain_end(self.labeled[sigma].image);
            debug_assert_eq!(self.tree.level(tau), s);
            let first = self.explore_child(sigma, 0);
            self.add_image(tau, first);
            self.attachment.insert(tau, self.expansions.len());
            self.expansions.push(Expansion { sigma, tau, start_stage: s + 1, next: 1 });
            let rec = self.record.as_mut().expect("recording");
            rec.started = Some(StartRecord {
                sigma: self.labeled[sigma].address.clone(),
                label: notation_value(&self.labeled[sigma].label).to_string(),
                tau: self.tree.node(tau).address.clone(),
            });
        }

        let open: Vec<NodeId> = self
            .by_level
            .get(s)
            .into_iter()
            .flatten()
            .copied()
            .filter(|&y| self.tree.children(y).is_empty())
            .collect();
        for y in open {
            match self.kinds[y] {
                NodeKind::Image(rho) => match &self.labeled[rho].label {
                    Notation::Zero => {}
                    Notation::Succ(_) => {
                        let c = self.explore_child(rho, 0);
                        self.add_image(y, c);
                    }
                    Notation::Lim(_) => {
                        self.add_pad(y, rho);
                    }
                },
                NodeKind::Pad(owner) => {
                    self.add_pad(y, owner);
                }
            }
        }

        for e in 0..earlier {
            let Expansion { sigma, tau, next, .. } = self.expansions[e];
            self.expansions[e].next += 1;
            let c = self.explore_child(sigma, next);
            let node = self.add_image(tau, c);
            self.catch_up(node, s + 1);
        }

        self.stage = s + 1;
        let mut rec = self.record.take().expect("recording");
        rec.queue = self.queue.iter().map(|&q| self.labeled[q].address.clone()).collect();
        rec.nodes = self.tree.len();
        self.trace.push(rec);
    }

    fn chain_end(&self, mut x: NodeId) -> NodeId {
        while let Some(&c) = self.tree.children(x).first() {
            x = c;
        }
        x
    }

    fn explore_child(&mut self, parent: usize, n: u64) -> usize {
        let label = self.labeled[parent].label.child(n).expect("child exists");
        let mut address = self.labeled[parent].address.clone();
        address.push(n);
        self.labeled.push(LabeledNode { address, label, parent: Some(parent), image: usize::MAX });
        self.labeled.len() - 1
    }

    fn push_node(&mut self, parent: NodeId, kind: NodeKind) -> NodeId {
        let id = self.tree.add_child(parent);
        self.kinds.push(kind);
        let level = self.tree.level(id);
        if self.by_level.len() <= level {
            self.by_level.resize(level + 1, Vec::new());
        }
        self.by_level[level].push(id);
        id
    }

    fn add_image(&mut self, parent: NodeId, sigma: usize) -> NodeId {
        let id = self.push_node(parent, NodeKind::Image(sigma));
        self.labeled[sigma].image = id;
        if self.labeled[sigma].label.is_limit() {
            self.queue.push_back(sigma);
        }
        if let Some(rec) = self.record.as_mut() {
            rec.images.push((self.labeled[sigma].address.clone(), self.tree.node(id).address.clone()));
        }
        id
    }

    fn add_pad(&mut self, parent: NodeId, owner: usize) -> NodeId {
        if let Some(rec) = self.record.as_mut() {
            rec.pads += 1;
        }
        self.push_node(parent, NodeKind::Pad(owner))
    }

    fn catch_up(&mut self, mut cur: NodeId, target: usize) {
        while self.tree.level(cur) < target {
            cur = match self.kinds[cur] {
                NodeKind::Image(rho) => match &self.labeled[rho].label {
                    Notation::Zero => return,
                    Notation::Succ(_) => {
                        let c = self.explore_child(rho, 0);
                        self.add_image(cur, c)
                    }
                    Notation::Lim(_) => self.add_pad(cur, rho),
                },
                NodeKind::Pad(owner) => self.add_pad(cur, owner),
            };
        }
    }

    /// Checks the invariants that hold after every stage.
    pub fn check_invariants(&self) -> Result<()> {
        let fail = |invariant: &str, detail: String| {
            Err(Error::Invariant { invariant: invariant.to_string(), detail })
        };
        for (id, node) in self.tree.nodes().iter().enumerate() {
            let zero_image = matches!(self.kinds[id], NodeKind::Image(r) if self.labeled[r].label.is_zero());
            if node.children.is_empty() && node.level() != self.stage && !zero_image {
                return fail("terminal nodes", format!("{:?} ends at level {}", node.address, node.level()));
            }
        }
        let mut seen = BTreeSet::new();
        for (i, l) in self.labeled.iter().enumerate() {
            if !seen.insert(l.image) {
                return fail("injective embedding", format!("{:?} shares its image", l.address));
            }
            if self.kinds[l.image] != NodeKind::Image(i) {
                return fail("injective embedding", format!("{:?} has a stale image", l.address));
            }
            if l.address.len() <= 1 && self.tree.node(l.image).address != l.address {
                return fail("low levels copied", format!("{:?} is not fixed", l.address));
            }
            if let Some(p) = l.parent {
                let pi = self.labeled[p].image;
                let ci = l.image;
                if self.tree.level(ci) <= self.tree.level(pi) || self.tree.ancestor_at(ci, self.tree.level(pi)) != pi {
                    return fail("parent compatibility", format!("{:?} is not below its parent's image", l.address));
                }
            }
        }
        let mut levels = BTreeSet::new();
        for e in &self.expansions {
            if !levels.insert(self.tree.level(e.tau)) {
                return fail("attachment levels", format!("two attachments at level {}", self.tree.level(e.tau)));
            }
        }
        for (level, nodes) in self.by_level.iter().enumerate() {
            if nodes.iter().filter(|&&n| self.tree.children(n).len() > 1).count() > 1 {
                return fail("branching", format!("several branching nodes at level {level}"));
            }
        }
        Ok(())
    }

    /// Ranks of every node of this build in the tree obtained by running the
    /// construction forever.
    ///
    /// Below any node there is a single chain until an attachment node (rank
    /// equal to the value of the expanded label), the image of a zero label,
    /// or a frontier node waiting for a queued limit; the latter is expanded
    /// `q` stages later where `q` is its queue position. Extra stages are run
    /// on a copy until every chain ends in one of these.
    pub fn symbolic_ranks(&self) -> Result<Vec<Ordinal>> {
        let mut ext = self.clone();
        ext.trace.clear();
        for _ in 0..=10_000 {
            let ranks = ext.partial_ranks()?;
            if ranks[..self.tree.len()].iter().all(Option::is_some) {
                let ranks: Vec<Ordinal> = ranks.into_iter().take(self.tree.len()).map(Option::unwrap).collect();
                self.check_rank_consistency(&ranks)?;
                return Ok(ranks);
            }
            ext.step();
        }
        Err(Error::Inconsistent("ranks did not resolve".into()))
    }

    fn partial_ranks(&self) -> Result<Vec<Option<Ordinal>>> {
        let queue_pos: HashMap<usize, u64> = self.queue.iter().enumerate().map(|(i, &q)| (q, i as u64)).collect();
        let mut rank: Vec<Option<Ordinal>> = vec![None; self.tree.len()];
        for id in (0..self.tree.len()).rev() {
            if let Some(&e) = self.attachment.get(&id) {
                rank[id] = Some(notation_value(&self.labeled[self.expansions[e].sigma].label));
                continue;
            }
            let children = self.tree.children(id);
            rank[id] = match children {
                [] => {
                    let owner = match self.kinds[id] {
                        NodeKind::Image(r) if self.labeled[r].label.is_zero() => {
                            rank[id] = Some(Ordinal::zero());
                            continue;
                        }
                        NodeKind::Image(r) | NodeKind::Pad(r) => r,
                    };
                    queue_pos
                        .get(&owner)
                        .map(|&q| notation_value(&self.labeled[owner].label) + Ordinal::from(q))
                }
                [c] => rank[*c].as_ref().map(Ordinal::succ),
                _ => {
                    return Err(Error::Inconsistent(format!(
                        "{:?} branches without being an attachment",
                        self.tree.node(id).address
                    )))
                }
            };
        }
        Ok(rank)
    }

    fn check_rank_consistency(&self, ranks: &[Ordinal]) -> Result<()> {
        for &tau in self.attachment.keys() {
            for &c in self.tree.children(tau) {
                if ranks[c] >= ranks[tau] {
                    return Err(Error::Inconsistent(format!(
                        "child {:?} of attachment {:?} has rank {} not below {}",
                        self.tree.node(c).address,
                        self.tree.node(tau).address,
                        ranks[c],
                        ranks[tau]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Nodes whose subtree in the limit tree is already fully built: no
    /// attachment below and every leaf below is the image of a zero label.
    pub fn finished_subtrees(&self) -> Vec<bool> {
        let mut done = vec![false; self.tree.len()];
        for id in (0..self.tree.len()).rev() {
            let children = self.tree.children(id);
            done[id] = !self.is_attachment(id)
                && if children.is_empty() {
                    matches!(self.kinds[id], NodeKind::Image(r) if self.labeled[r].label.is_zero())
                } else {
                    children.iter().all(|&c| done[c])
                };
        }
        done
    }

    /// Exact ranks of the truncation at the current stage.
    pub fn truncation_ranks(&self) -> Vec<u64> {
        tree_rank(&self.tree)
    }

    /// The set of ranks of level-`m` nodes of the limit tree: the ranks of
    /// nodes present once stage `m` is reached, plus one tail for every
    /// attachment node above level `m`, sampled along the children's chains.
    pub fn level_rank_description(&self, m: usize) -> Result<RankSetDescription> {
        let mut b = self.clone();
        b.trace.clear();
        while b.stage < m + 2 {
            b.step();
        }
        let ranks = b.symbolic_ranks()?;
        let explicit = b.by_level.get(m).into_iter().flatten().map(|&n| ranks[n].clone()).collect();
        let mut tails = Vec::new();
        for e in &b.expansions {
            let tau_level = b.tree.level(e.tau);
            if tau_level >= m {
                continue;
            }
            let mut sample = Vec::new();
            for (n, &child) in b.tree.children(e.tau).iter().enumerate() {
                let mut cur = child;
                while b.tree.level(cur) < m && !b.is_attachment(cur) {
                    match b.tree.children(cur) {
                        [c] => cur = *c,
                        _ => break,
                    }
                }
                if b.tree.level(cur) == m {
                    sample.push((n as u64, ranks[cur].clone()));
                }
            }
            tails.push(RankTail { limit: ranks[e.tau].clone(), sample });
        }
        Ok(RankSetDescription { explicit, tails })
    }

    /// A strict upper bound on the ranks at level `n`.
    pub fn level_rank_bound(&self, n: usize) -> Result<Ordinal> {
        let d = self.level_rank_description(n)?;
        Ok(d.supremum().map(|s| s.succ()).unwrap_or_else(Ordinal::zero))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelReport {
    pub level: usize,
    pub order_type: Ordinal,
    pub bound: Ordinal,
    pub description: RankSetDescription,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThinReport {
    pub levels: Vec<LevelReport>,
    pub violations: Vec<String>,
}

impl ThinReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Order type of a level description, rejecting it when it exceeds `w*n`.
pub fn check_level_description(d: &RankSetDescription, n: usize) -> Result<Ordinal> {
    let ot = order_type_of_finite_described_set(d)?;
    let limit = Ordinal::omega() * Ordinal::from(n as u64);
    if ot > limit {
        return Err(Error::Invariant {
            invariant: "thinness".into(),
            detail: format!("level {n} has order type {ot} > {limit}"),
        });
    }
    Ok(ot)
}

/// Checks that each level `1..=max_level` has rank order type at most `w*n`.
pub fn check_thin(build: &ThinBuild, max_level: usize) -> Result<ThinReport> {
    let mut report = ThinReport { levels: Vec::new(), violations: Vec::new() };
    for n in 1..=max_level {
        let description = build.level_rank_description(n)?;
        let bound = description.supremum().map(|s| s.succ()).unwrap_or_else(Ordinal::zero);
        match check_level_description(&description, n) {
            Ok(order_type) => report.levels.push(LevelReport { level: n, order_type, bound, description }),
            Err(e) => report.violations.push(format!("level {n}: {e}")),
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notation::notation_from_ordinal;

    fn nota(s: &str) -> Notation {
        notation_from_ordinal(&s.parse().unwrap())
    }

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn finite_notation_gives_a_chain() {
        let b = build_thin_tree(&nota("2"), 5);
        assert_eq!(b.tree().len(), 3);
        assert!(b.labeled().iter().all(|l| l.image < 3));
        let ranks = b.symbolic_ranks().unwrap();
        assert_eq!(ranks, vec![o("2"), o("1"), o("0")]);
        b.check_invariants().unwrap();
    }

    #[test]
    fn omega_attaches_at_the_root() {
        let b = build_thin_tree(&nota("w"), 6);
        b.check_invariants().unwrap();
        assert_eq!(b.expansions().len(), 1);
        assert_eq!(b.expansions()[0].tau, 0);
        assert_eq!(b.tree().children(0).len(), 6);
        for (n, &c) in b.tree().children(0).iter().enumerate() {
            assert_eq!(b.tree().node(c).address, vec![n as u64]);
        }
        let ranks = b.symbolic_ranks().unwrap();
        assert_eq!(ranks[0], o("w"));
        for (n, &c) in b.tree().children(0).iter().enumerate() {
            assert_eq!(ranks[c], Ordinal::from(n as u64));
        }
    }

    #[test]
    fn rank_sandwich_and_root_bound() {
        for alpha in ["w*2", "w^2", "w^2+w*3", "w+5"] {
            let b = build_thin_tree(&nota(alpha), 14);
            b.check_invariants().unwrap();
            let ranks = b.symbolic_ranks().unwrap();
            assert!(ranks[0] >= o(alpha));
            for l in b.labeled() {
                let v = notation_value(&l.label);
                let r = &ranks[l.image];
                assert!(*r >= v && r.infinite_part() == v.infinite_part(), "{alpha}: {r} vs {v}");
            }
        }
    }

    #[test]
    fn truncation_ranks_are_dominated() {
        let b = build_thin_tree(&nota("w*2+1"), 10);
        let ranks = b.symbolic_ranks().unwrap();
        let finite = b.truncation_ranks();
        let done = b.finished_subtrees();
        for id in 0..b.tree().len() {
            assert!(Ordinal::from(finite[id]) <= ranks[id]);
            if done[id] {
                assert_eq!(Ordinal::from(finite[id]), ranks[id]);
            }
        }
    }

    #[test]
    fn levels_are_thin() {
        let b = build_thin_tree(&nota("w^2"), 8);
        let r = check_thin(&b, 6).unwrap();
        assert!(r.passed(), "{:?}", r.violations);
        let b = build_thin_tree(&nota("5"), 3);
        let r = check_thin(&b, 4).unwrap();
        assert!(r.levels.iter().all(|l| l.order_type.is_finite()));
    }

    #[test]
    fn level_descriptions() {
        let b = build_thin_tree(&nota("2"), 4);
        let d = b.level_rank_description(1).unwrap();
        assert_eq!(d.explicit, BTreeSet::from([o("1")]));
        assert!(d.tails.is_empty());
        let b = build_thin_tree(&nota("w"), 4);
        let d = b.level_rank_description(1).unwrap();
        assert_eq!(d.tails.len(), 1);
        assert_eq!(d.tails[0].limit, o("w"));
        assert_eq!(b.level_rank_bound(0).unwrap(), o("w+1"));
    }

    #[test]
    fn interleaved_tails_are_not_thin() {
        let d = RankSetDescription {
            explicit: BTreeSet::new(),
            tails: vec![
                RankTail { limit: o("w"), sample: vec![(0, o("1"))] },
                RankTail { limit: o("w*2"), sample: vec![(0, o("w+1"))] },
            ],
        };
        assert!(check_level_description(&d, 1).is_err());
        assert!(check_level_description(&d, 2).is_ok());
    }
}
