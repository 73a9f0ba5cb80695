//! The structure built from a tree: groups `G_n` of finite subsets of the
//! level-`n` nodes under symmetric difference, the predecessor map, the
//! transport operations `f_a`, and the correspondence between paths and
//! nontrivial automorphisms.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::structure::FiniteStructure;
use crate::tree::{NodeId, Tree};

/// Default limit on the number of universe elements of a finite view.
pub const DEFAULT_UNIVERSE_CAP: usize = 4096;

/// A finite subset of the level-`level` nodes; the empty set is `id_level`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub level: usize,
    members: Vec<NodeId>,
}

impl GroupElement {
    pub fn identity(level: usize) -> Self {
        GroupElement { level, members: Vec::new() }
    }

    pub fn singleton(tree: &Tree, node: NodeId) -> Self {
        GroupElement { level: tree.level(node), members: vec![node] }
    }

    /// Builds an element from level-`level` nodes; repeated nodes cancel.
    pub fn from_nodes<I: IntoIterator<Item = NodeId>>(tree: &Tree, level: usize, nodes: I) -> Result<Self> {
        let mut members: Vec<NodeId> = Vec::new();
        for n in nodes {
            if tree.level(n) != level {
                return Err(Error::LevelMismatch(tree.level(n), level));
            }
            members.push(n);
        }
        Ok(GroupElement { level, members: parity(members) })
    }

    pub fn members(&self) -> &[NodeId] {
        &self.members
    }

    pub fn is_identity(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.members.binary_search(&node).is_ok()
    }

    pub fn display<'a>(&'a self, tree: &'a Tree) -> impl fmt::Display + 'a {
        ElementName { el: self, tree }
    }
}

struct ElementName<'a> {
    el: &'a GroupElement,
    tree: &'a Tree,
}

impl fmt::Display for ElementName<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.el.is_identity() {
            return write!(f, "id{}", self.el.level);
        }
        let parts: Vec<String> = self
            .el
            .members
            .iter()
            .map(|&m| {
                let a = &self.tree.node(m).address;
                a.iter().map(u64::to_string).collect::<Vec<_>>().join(".")
            })
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Sorted list of the nodes occurring an odd number of times.
fn parity(mut nodes: Vec<NodeId>) -> Vec<NodeId> {
    nodes.sort_unstable();
    let mut out: Vec<NodeId> = Vec::with_capacity(nodes.len());
    for n in nodes {
        if out.last() == Some(&n) {
            out.pop();
        } else {
            out.push(n);
        }
    }
    out
}

pub fn sym_diff(a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
    if a.level != b.level {
        return Err(Error::LevelMismatch(a.level, b.level));
    }
    let mut all = a.members.clone();
    all.extend_from_slice(&b.members);
    Ok(GroupElement { level: a.level, members: parity(all) })
}

/// The sum of the parents of the members. Every level-1 element maps to
/// `id_0`, the only element of `G_0`.
pub fn pred(tree: &Tree, a: &GroupElement) -> Result<GroupElement> {
    match a.level {
        0 => Err(Error::LevelZero),
        1 => Ok(GroupElement::identity(0)),
        l => Ok(GroupElement {
            level: l - 1,
            members: parity(a.members.iter().map(|&m| tree.parent(m).expect("non-root")).collect()),
        }),
    }
}

/// Iterates `pred` down to `level`.
pub fn project(tree: &Tree, a: &GroupElement, level: usize) -> GroupElement {
    let mut cur = a.clone();
    while cur.level > level {
        cur = pred(tree, &cur).expect("positive level");
    }
    cur
}

/// `f_a(b)`: both arguments projected to the lower of their levels, then added.
pub fn f_apply(tree: &Tree, a: &GroupElement, b: &GroupElement) -> GroupElement {
    let k = a.level.min(b.level);
    sym_diff(&project(tree, a, k), &project(tree, b, k)).expect("same level")
}

/// `G_0 ∪ ... ∪ G_bound` for a finite tree, with elements indexed level by
/// level and, within a level, by the bitmask of members over the level's
/// nodes in id order. Index `level_start[n]` is `id_n`.
#[derive(Clone, Debug)]
pub struct MorozovStructure {
    tree: Tree,
    bound: usize,
    level_nodes: Vec<Vec<NodeId>>,
    level_start: Vec<usize>,
    pred_idx: Vec<usize>,
    len: usize,
}

pub fn build_structure(tree: &Tree, level_bound: usize) -> Result<MorozovStructure> {
    build_structure_capped(tree, level_bound, DEFAULT_UNIVERSE_CAP)
}

pub fn build_structure_capped(tree: &Tree, level_bound: usize, cap: usize) -> Result<MorozovStructure> {
    let levels = tree.levels();
    let mut level_nodes = Vec::with_capacity(level_bound + 1);
    let mut level_start = Vec::with_capacity(level_bound + 1);
    let mut len = 0usize;
    for n in 0..=level_bound {
        let nodes = if n == 0 { Vec::new() } else { levels.get(n).cloned().unwrap_or_default() };
        let size = if nodes.len() >= usize::BITS as usize - 1 { usize::MAX } else { 1usize << nodes.len() };
        level_start.push(len);
        len = len.saturating_add(size);
        if len > cap {
            return Err(Error::CapExceeded { what: "universe", size: len, cap });
        }
        level_nodes.push(nodes);
    }
    let mut s = MorozovStructure {
        tree: tree.clone(),
        bound: level_bound,
        level_nodes,
        level_start,
        pred_idx: Vec::new(),
        len,
    };
    s.pred_idx = (0..len)
        .map(|i| {
            let el = s.element(i);
            if el.level == 0 {
                i
            } else {
                s.index_of(&pred(tree, &el).expect("positive level")).expect("lower level present")
            }
        })
        .collect();
    Ok(s)
}

impl MorozovStructure {
    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of `id_n`.
    pub fn identity(&self, n: usize) -> usize {
        self.level_start[n]
    }

    /// Indices of `G_n`.
    pub fn level_range(&self, n: usize) -> std::ops::Range<usize> {
        let end = self.level_start.get(n + 1).copied().unwrap_or(self.len);
        self.level_start[n]..end
    }

    /// The level of element `i`, read off the representation.
    pub fn level_of(&self, i: usize) -> usize {
        self.level_start.partition_point(|&s| s <= i) - 1
    }

    pub fn element(&self, i: usize) -> GroupElement {
        let level = self.level_of(i);
        let mask = i - self.level_start[level];
        let members = self.level_nodes[level]
            .iter()
            .enumerate()
            .filter(|(b, _)| mask >> b & 1 == 1)
            .map(|(_, &n)| n)
            .collect();
        GroupElement { level, members }
    }

    pub fn index_of(&self, a: &GroupElement) -> Option<usize> {
        let nodes = self.level_nodes.get(a.level)?;
        let mut mask = 0usize;
        for m in &a.members {
            mask |= 1 << nodes.iter().position(|n| n == m)?;
        }
        Some(self.level_start[a.level] + mask)
    }

    pub fn pred_index(&self, i: usize) -> usize {
        self.pred_idx[i]
    }

    /// Index of `pred^(level(i) - level)(i)`.
    pub fn project_index(&self, mut i: usize, level: usize) -> usize {
        while self.level_of(i) > level {
            i = self.pred_idx[i];
        }
        i
    }

    /// `f_a(b)` on indices.
    pub fn f(&self, a: usize, b: usize) -> usize {
        let k = self.level_of(a).min(self.level_of(b));
        let x = self.project_index(a, k) - self.level_start[k];
        let y = self.project_index(b, k) - self.level_start[k];
        self.level_start[k] + (x ^ y)
    }

    /// `a △ b` on indices of the same level.
    pub fn sym_diff_index(&self, a: usize, b: usize) -> usize {
        let n = self.level_of(a);
        debug_assert_eq!(n, self.level_of(b));
        self.level_start[n] + ((a - self.level_start[n]) ^ (b - self.level_start[n]))
    }

    pub fn name(&self, i: usize) -> String {
        self.element(i).display(&self.tree).to_string()
    }

    /// The signature-level view: one unary operation `f_a` per element `a`.
    pub fn to_finite_structure(&self) -> FiniteStructure {
        let n = self.len;
        let mut s = FiniteStructure {
            universe: (0..n).map(|i| self.name(i)).collect(),
            functions: Vec::with_capacity(n),
            relations: Vec::new(),
        };
        for a in 0..n {
            s.add_function(&format!("f{a}"), 1, (0..n).map(|b| self.f(a, b)).collect());
        }
        s
    }
}

/// The level of element `x`, recovered from the operations alone: the
/// identities are the values `f_y(y)`, they are ordered by `f_u(v) = u`,
/// and `x ∈ G_n` iff `f_{id_n}(x) = x` with `n` least.
pub fn level_membership(s: &MorozovStructure, x: usize) -> usize {
    let mut ids: Vec<usize> = (0..s.len()).map(|y| s.f(y, y)).collect();
    ids.sort_unstable();
    ids.dedup();
    let below = |u: usize| ids.iter().filter(|&&v| v != u && s.f(v, u) == v).count();
    let mut ranked: Vec<(usize, usize)> = ids.iter().map(|&u| (below(u), u)).collect();
    ranked.sort_unstable();
    ranked
        .iter()
        .find(|&&(_, id)| s.f(id, x) == x)
        .map(|&(n, _)| n)
        .expect("x is fixed by its own identity")
}

/// An automorphism given by one element per level: `g(a) = a △ shifts[level(a)]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelShift {
    pub shifts: Vec<GroupElement>,
}

impl LevelShift {
    pub fn apply(&self, a: &GroupElement) -> Result<GroupElement> {
        let shift = self
            .shifts
            .get(a.level)
            .ok_or(Error::LevelMismatch(a.level, self.shifts.len().saturating_sub(1)))?;
        sym_diff(a, shift)
    }

    /// The induced permutation of the universe of `s`.
    pub fn to_permutation(&self, s: &MorozovStructure) -> Result<Vec<usize>> {
        (0..s.len())
            .map(|i| {
                let image = self.apply(&s.element(i))?;
                s.index_of(&image)
                    .ok_or_else(|| Error::InvalidStructure(format!("image of {} outside view", s.name(i))))
            })
            .collect()
    }
}

/// The automorphism sending `id_n` to `{t_n}` for a path `t_0, t_1, ...`
/// starting at the root. Level 0 is fixed since `G_0` is trivial.
pub fn path_to_automorphism(tree: &Tree, path: &[NodeId]) -> Result<LevelShift> {
    if path.first() != Some(&tree.root()) {
        return Err(Error::NotAPath("path must start at the root".into()));
    }
    for w in path.windows(2) {
        if tree.parent(w[1]) != Some(w[0]) {
            return Err(Error::NotAPath(format!(
                "{:?} is not a child of {:?}",
                tree.node(w[1]).address,
                tree.node(w[0]).address
            )));
        }
    }
    let mut shifts = vec![GroupElement::identity(0)];
    shifts.extend(path.iter().skip(1).map(|&t| GroupElement::singleton(tree, t)));
    Ok(LevelShift { shifts })
}

/// Reads a path prefix `t_0, ..., t_depth` off an automorphism given as a
/// permutation of the universe: pick a member of the first nontrivial
/// `g(id_n)`, close downward by parents, and extend upward through members
/// of `g(id_m)`, choosing the first child in id order.
pub fn automorphism_to_path(s: &MorozovStructure, g: &[usize], depth: usize) -> Result<Vec<NodeId>> {
    let depth = depth.min(s.bound());
    let tree = s.tree();
    let image = |n: usize| s.element(g[s.identity(n)]);
    let n = (1..=depth).find(|&n| !image(n).is_identity()).ok_or(Error::TrivialAutomorphism)?;
    let mut path = vec![image(n).members()[0]];
    while let Some(p) = tree.parent(*path.last().expect("nonempty")) {
        path.push(p);
    }
    path.reverse();
    for m in n + 1..=depth {
        let g_m = image(m);
        let prev = *path.last().expect("nonempty");
        let next = tree
            .children(prev)
            .iter()
            .copied()
            .find(|&c| g_m.contains(c))
            .ok_or_else(|| Error::NotAPath(format!("no child of {:?} in g(id{m})", tree.node(prev).address)))?;
        path.push(next);
    }
    Ok(path)
}

/// Whether the permutation `g` commutes with every `f_a`: `g(f_a(b)) = f_a(g(b))`.
pub fn commutes_with_operations(s: &MorozovStructure, g: &[usize]) -> bool {
    (0..s.len()).all(|a| (0..s.len()).all(|b| g[s.f(a, b)] == s.f(a, g[b])))
}

/// The rank of a non-identity element as the least rank of its members.
pub fn derived_rank<R: Ord + Clone>(a: &GroupElement, ranks: &[R]) -> Result<R> {
    a.members
        .iter()
        .map(|&m| ranks[m].clone())
        .min()
        .ok_or(Error::IdentityElement)
}

/// Ranks of all elements of `G_1 ∪ ... ∪ G_height` in the tree on `G` whose
/// successors of `a` are the `b` one level up with `pred(b) = a`, computed
/// by brute force. Exact for non-identity elements.
pub fn g_tree_ranks(tree: &Tree, cap: usize) -> Result<HashMap<GroupElement, u64>> {
    let s = build_structure_capped(tree, tree.height(), cap)?;
    let mut rank = vec![0u64; s.len()];
    for i in (0..s.len()).rev() {
        if s.level_of(i) > 0 {
            let p = s.pred_index(i);
            rank[p] = rank[p].max(rank[i] + 1);
        }
    }
    Ok((0..s.len()).map(|i| (s.element(i), rank[i])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::tree_rank;

    fn cherry() -> Tree {
        Tree::from_brackets("(()())").unwrap()
    }

    #[test]
    fn group_operations() {
        let t = Tree::from_brackets("(()()())").unwrap();
        let a = GroupElement::from_nodes(&t, 1, [1, 2]).unwrap();
        assert!(sym_diff(&a, &a).unwrap().is_identity());
        assert_eq!(sym_diff(&a, &GroupElement::identity(1)).unwrap(), a);
        let b = GroupElement::from_nodes(&t, 1, [1]).unwrap();
        assert_eq!(sym_diff(&b, &a).unwrap().members(), &[2]);
        assert!(matches!(sym_diff(&a, &GroupElement::identity(0)), Err(Error::LevelMismatch(1, 0))));
    }

    #[test]
    fn predecessor() {
        let t = Tree::from_brackets("((()())())").unwrap();
        let x = t.get(&[0]).unwrap();
        let (c0, c1) = (t.get(&[0, 0]).unwrap(), t.get(&[0, 1]).unwrap());
        assert!(pred(&t, &GroupElement::identity(2)).unwrap().is_identity());
        assert!(pred(&t, &GroupElement::from_nodes(&t, 2, [c0, c1]).unwrap()).unwrap().is_identity());
        assert_eq!(pred(&t, &GroupElement::singleton(&t, c0)).unwrap(), GroupElement::singleton(&t, x));
        assert!(matches!(pred(&t, &GroupElement::identity(0)), Err(Error::LevelZero)));
    }

    #[test]
    fn transport() {
        let t = Tree::from_brackets("(()(()))").unwrap();
        let x = GroupElement::singleton(&t, t.get(&[0]).unwrap());
        let y = t.get(&[1]).unwrap();
        let z = GroupElement::singleton(&t, t.get(&[1, 0]).unwrap());
        assert_eq!(f_apply(&t, &x, &GroupElement::identity(1)), x);
        assert!(f_apply(&t, &x, &x).is_identity());
        let xy = GroupElement::from_nodes(&t, 1, [t.get(&[0]).unwrap(), y]).unwrap();
        assert_eq!(f_apply(&t, &x, &z), xy);
        assert_eq!(f_apply(&t, &z, &x), xy);
    }

    #[test]
    fn small_universes() {
        let s = build_structure(&Tree::new(), 0).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.f(0, 0), 0);
        let s = build_structure(&Tree::from_brackets("(())").unwrap(), 1).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.name(2), "{0}");
        assert_eq!(s.f(2, 2), 1);
        assert_eq!(s.f(0, 2), 0);
        let s = build_structure(&cherry(), 1).unwrap();
        assert_eq!(s.level_range(1).len(), 4);
        let t = Tree::from_brackets(&format!("({})", "()".repeat(13))).unwrap();
        assert!(matches!(build_structure(&t, 1), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn indexed_operations_match_sets() {
        let t = Tree::from_brackets("((()())(()))").unwrap();
        let s = build_structure(&t, 3).unwrap();
        for a in 0..s.len() {
            assert_eq!(s.index_of(&s.element(a)), Some(a));
            for b in 0..s.len() {
                let direct = f_apply(&t, &s.element(a), &s.element(b));
                assert_eq!(s.element(s.f(a, b)), direct);
            }
        }
    }

    #[test]
    fn levels_from_operations() {
        let t = Tree::from_brackets("((()())(()))").unwrap();
        let s = build_structure(&t, 3).unwrap();
        for i in 0..s.len() {
            assert_eq!(level_membership(&s, i), s.level_of(i));
        }
    }

    #[test]
    fn path_automorphisms() {
        let t = Tree::from_brackets("((())())").unwrap();
        let path = vec![0, t.get(&[0]).unwrap(), t.get(&[0, 0]).unwrap()];
        let g = path_to_automorphism(&t, &path).unwrap();
        let s = build_structure(&t, 2).unwrap();
        let perm = g.to_permutation(&s).unwrap();
        assert!(commutes_with_operations(&s, &perm));
        assert!((0..s.len()).all(|i| perm[perm[i]] == i));
        assert_eq!(s.element(perm[s.identity(2)]), GroupElement::singleton(&t, path[2]));
        assert_eq!(automorphism_to_path(&s, &perm, 2).unwrap(), path);
        let id: Vec<usize> = (0..s.len()).collect();
        assert!(matches!(automorphism_to_path(&s, &id, 2), Err(Error::TrivialAutomorphism)));
        let bad = vec![0, t.get(&[1]).unwrap(), t.get(&[0, 0]).unwrap()];
        assert!(matches!(path_to_automorphism(&t, &bad), Err(Error::NotAPath(_))));
    }

    #[test]
    fn derived_rank_is_least_member_rank() {
        // Root with a leaf x and a rank-1 node y.
        let t = Tree::from_brackets("(()(()))").unwrap();
        let ranks = tree_rank(&t);
        let (x, y) = (t.get(&[0]).unwrap(), t.get(&[1]).unwrap());
        let a = GroupElement::from_nodes(&t, 1, [x, y]).unwrap();
        assert_eq!(derived_rank(&a, &ranks).unwrap(), 0);
        assert_eq!(derived_rank(&GroupElement::singleton(&t, y), &ranks).unwrap(), 1);
        assert!(derived_rank(&GroupElement::identity(1), &ranks).is_err());
        let brute = g_tree_ranks(&t, 4096).unwrap();
        assert_eq!(brute[&a], 0);
        assert_eq!(brute[&GroupElement::singleton(&t, y)], 1);
    }
}
