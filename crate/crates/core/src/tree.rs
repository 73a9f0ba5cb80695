//! Rooted trees over finite sequences of naturals: explicit finite trees,
//! lazily generated trees materialized under a budget, tree rank, and the
//! usual import/export formats.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::notation::{fundamental_seq, notation_value, Notation};
use crate::ordinal::Ordinal;

pub type NodeId = usize;

/// An ordinal rank or the rank of a node lying on a path.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rank {
    Ordinal(Ordinal),
    Infinite,
}

impl Rank {
    pub fn finite(n: u64) -> Self {
        Rank::Ordinal(Ordinal::from(n))
    }

    pub fn as_ordinal(&self) -> Option<&Ordinal> {
        match self {
            Rank::Ordinal(o) => Some(o),
            Rank::Infinite => None,
        }
    }
}

impl Ord for Rank {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Rank::Infinite, Rank::Infinite) => Ordering::Equal,
            (Rank::Infinite, _) => Ordering::Greater,
            (_, Rank::Infinite) => Ordering::Less,
            (Rank::Ordinal(a), Rank::Ordinal(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Rank {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rank::Ordinal(o) => write!(f, "{o}"),
            Rank::Infinite => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for Rank {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "∞" => Ok(Rank::Infinite),
            other => Ok(Rank::Ordinal(other.parse()?)),
        }
    }
}

impl Serialize for Rank {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rank {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug)]
pub struct Node {
    pub address: Vec<u64>,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    pub label: Option<Notation>,
    pub anchor: Option<Rank>,
    /// All children of the node are present.
    pub complete: bool,
}

impl Node {
    pub fn level(&self) -> usize {
        self.address.len()
    }
}

/// A finite materialized tree. Children always have larger ids than their
/// parents.
#[derive(Clone, Debug)]
pub struct Tree {
    nodes: Vec<Node>,
    by_address: HashMap<Vec<u64>, NodeId>,
}

impl Default for Tree {
    fn default() -> Self {
        Self::new()
    }
}

impl Tree {
    /// A tree consisting of the root alone.
    pub fn new() -> Self {
        let root = Node {
            address: Vec::new(),
            parent: None,
            children: Vec::new(),
            label: None,
            anchor: None,
            complete: true,
        };
        Tree { nodes: vec![root], by_address: HashMap::from([(Vec::new(), 0)]) }
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn node_mut(&mut self, id: NodeId) -> &mut Node {
        &mut self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id].parent
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id].children
    }

    pub fn level(&self, id: NodeId) -> usize {
        self.nodes[id].level()
    }

    pub fn get(&self, address: &[u64]) -> Option<NodeId> {
        self.by_address.get(address).copied()
    }

    /// Appends a new child; its address extends the parent's by the next index.
    pub fn add_child(&mut self, parent: NodeId) -> NodeId {
        let idx = self.nodes[parent].children.len() as u64;
        let mut address = self.nodes[parent].address.clone();
        address.push(idx);
        let id = self.nodes.len();
        self.nodes.push(Node {
            address: address.clone(),
            parent: Some(parent),
            children: Vec::new(),
            label: None,
            anchor: None,
            complete: true,
        });
        self.nodes[parent].children.push(id);
        self.by_address.insert(address, id);
        id
    }

    /// Builds a tree from a prefix-closed set of addresses.
    pub fn from_addresses<I: IntoIterator<Item = Vec<u64>>>(addresses: I) -> Result<Self> {
        let mut sorted: Vec<Vec<u64>> = addresses.into_iter().collect();
        sorted.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        sorted.dedup();
        if sorted.first().is_none_or(|a| !a.is_empty()) {
            return Err(Error::InvalidTree("missing root".into()));
        }
        let mut tree = Tree::new();
        for addr in sorted.into_iter().skip(1) {
            let parent = tree
                .get(&addr[..addr.len() - 1])
                .ok_or_else(|| Error::InvalidTree(format!("parent of {addr:?} missing")))?;
            let id = tree.nodes.len();
            tree.nodes.push(Node {
                address: addr.clone(),
                parent: Some(parent),
                children: Vec::new(),
                label: None,
                anchor: None,
                complete: true,
            });
            tree.nodes[parent].children.push(id);
            tree.by_address.insert(addr, id);
        }
        Ok(tree)
    }

    /// Largest node level.
    pub fn height(&self) -> usize {
        self.nodes.iter().map(Node::level).max().unwrap_or(0)
    }

    /// Nodes grouped by level, in id order within each level.
    pub fn levels(&self) -> Vec<Vec<NodeId>> {
        let mut out = vec![Vec::new(); self.height() + 1];
        for (id, n) in self.nodes.iter().enumerate() {
            out[n.level()].push(id);
        }
        out
    }

    /// True when no node was cut off during materialization.
    pub fn is_complete(&self) -> bool {
        self.nodes.iter().all(|n| n.complete)
    }

    /// Ancestor of `id` at `level` (which must not exceed the node's level).
    pub fn ancestor_at(&self, mut id: NodeId, level: usize) -> NodeId {
        while self.level(id) > level {
            id = self.parent(id).expect("non-root");
        }
        id
    }

    pub fn to_json(&self) -> TreeJson {
        TreeJson {
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeJson {
                    address: n.address.clone(),
                    label: n.label.clone(),
                    anchor: n.anchor.clone(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &TreeJson) -> Result<Self> {
        let mut tree = Tree::from_addresses(json.nodes.iter().map(|n| n.address.clone()))?;
        for n in &json.nodes {
            let id = tree.get(&n.address).expect("inserted");
            tree.nodes[id].label = n.label.clone();
            tree.nodes[id].anchor = n.anchor.clone();
        }
        Ok(tree)
    }

    /// Parses the bracket form `(()(()))`: each pair of parentheses is a node.
    pub fn from_brackets(s: &str) -> Result<Self> {
        let mut tree = Tree::new();
        let mut stack: Vec<NodeId> = Vec::new();
        for (i, c) in s.chars().enumerate() {
            match c {
                '(' if i == 0 => stack.push(0),
                '(' => {
                    let parent = *stack
                        .last()
                        .ok_or_else(|| Error::InvalidTree(format!("unbalanced `{s}`")))?;
                    stack.push(tree.add_child(parent));
                }
                ')' => {
                    stack.pop().ok_or_else(|| Error::InvalidTree(format!("unbalanced `{s}`")))?;
                }
                _ => return Err(Error::InvalidTree(format!("bad character in `{s}`"))),
            }
        }
        if !stack.is_empty() || !s.starts_with('(') {
            return Err(Error::InvalidTree(format!("unbalanced `{s}`")));
        }
        Ok(tree)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NodeJson {
    pub address: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Notation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<Rank>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TreeJson {
    pub nodes: Vec<NodeJson>,
}

/// Exact ranks of a finite tree, computed bottom-up.
pub fn tree_rank(tree: &Tree) -> Vec<u64> {
    let mut rank = vec![0u64; tree.len()];
    for id in (0..tree.len()).rev() {
        rank[id] = tree.children(id).iter().map(|&c| rank[c] + 1).max().unwrap_or(0);
    }
    rank
}

/// Exact ranks for the nodes whose whole subtree was materialized.
pub fn complete_subtree_ranks(tree: &Tree) -> Vec<Option<u64>> {
    let mut rank: Vec<Option<u64>> = vec![None; tree.len()];
    for id in (0..tree.len()).rev() {
        if !tree.node(id).complete {
            continue;
        }
        let mut r = Some(0);
        for &c in tree.children(id) {
            r = match (r, rank[c]) {
                (Some(a), Some(b)) => Some(a.max(b + 1)),
                _ => None,
            };
        }
        rank[id] = r;
    }
    rank
}

/// Limits on materializing a lazy tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExplorationBudget {
    pub max_depth: usize,
    pub max_children: usize,
    pub max_nodes: usize,
}

impl ExplorationBudget {
    pub fn new(max_depth: usize, max_children: usize) -> Self {
        ExplorationBudget { max_depth, max_children, max_nodes: 1 << 20 }
    }
}

/// A node of a lazily generated tree.
pub trait LazyNode: Clone {
    /// The `n`-th child, `None` past the last one.
    fn child(&self, n: u64) -> Option<Self>;

    fn label(&self) -> Option<Notation> {
        None
    }

    fn anchor(&self) -> Option<Rank> {
        None
    }
}

/// Labels of the tree `T_a`: zero has no children, a successor has one
/// child carrying its predecessor, a limit has its fundamental sequence.
impl LazyNode for Notation {
    fn child(&self, n: u64) -> Option<Self> {
        match self {
            Notation::Zero => None,
            Notation::Succ(c) => (n == 0).then(|| (**c).clone()),
            Notation::Lim(_) => Some(fundamental_seq(self, n).expect("limit")),
        }
    }

    fn label(&self) -> Option<Notation> {
        Some(self.clone())
    }
}

/// Canonical ranked trees: a successor anchor has one child anchored at its
/// predecessor, a limit anchor has children along its fundamental sequence,
/// and an infinite anchor has an infinite first child followed by children
/// anchored 0, 1, 2, ...
impl LazyNode for Rank {
    fn child(&self, n: u64) -> Option<Self> {
        match self {
            Rank::Infinite if n == 0 => Some(Rank::Infinite),
            Rank::Infinite => Some(Rank::finite(n - 1)),
            Rank::Ordinal(o) if o.is_zero() => None,
            Rank::Ordinal(o) if o.is_successor() => {
                (n == 0).then(|| Rank::Ordinal(o.predecessor().expect("successor")))
            }
            Rank::Ordinal(o) => Some(Rank::Ordinal(o.fundamental(n).expect("limit"))),
        }
    }

    fn anchor(&self) -> Option<Rank> {
        Some(self.clone())
    }
}

/// Breadth-first materialization of a lazy tree under `budget`.
pub fn materialize<P: LazyNode>(root: P, budget: ExplorationBudget) -> Tree {
    let mut tree = Tree::new();
    tree.nodes[0].label = root.label();
    tree.nodes[0].anchor = root.anchor();
    let mut payloads = vec![root];
    let mut next = 0;
    while next < tree.len() {
        let id = next;
        next += 1;
        let at_depth_limit = tree.level(id) >= budget.max_depth;
        let mut n = 0u64;
        loop {
            let Some(child) = payloads[id].child(n) else { break };
            if at_depth_limit || n as usize >= budget.max_children || tree.len() >= budget.max_nodes {
                tree.nodes[id].complete = false;
                break;
            }
            let c = tree.add_child(id);
            tree.nodes[c].label = child.label();
            tree.nodes[c].anchor = child.anchor();
            payloads.push(child);
            n += 1;
        }
    }
    tree
}

/// The labeled tree `T_a` for the notation `a`, materialized under `budget`.
pub fn labeled_tree_from_notation(a: &Notation, budget: ExplorationBudget) -> Tree {
    materialize(a.clone(), budget)
}

/// A lazily generated tree whose root has rank `rho`, materialized under `budget`.
pub fn canonical_ranked_tree(rho: &Rank, budget: ExplorationBudget) -> Tree {
    materialize(rho.clone(), budget)
}

/// The rank a labeled node has in `T_a`: the value of its label.
pub fn symbolic_label_rank(tree: &Tree, id: NodeId) -> Option<Ordinal> {
    tree.node(id).label.as_ref().map(notation_value)
}

#[derive(Clone, Debug, Serialize)]
pub struct AnchorViolation {
    pub address: Vec<u64>,
    pub anchor: Rank,
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct AnchorReport {
    pub checked: usize,
    pub exact: usize,
    pub violations: Vec<AnchorViolation>,
}

impl AnchorReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Materializes the canonical tree for `rho` at `(depth, width)` and checks
/// its anchors.
pub fn verify_rank_anchors(rho: &Rank, depth: usize, width: usize) -> AnchorReport {
    check_anchors(&canonical_ranked_tree(rho, ExplorationBudget::new(depth, width)))
}

/// Checks anchors on a materialized tree. Nodes whose subtree is fully
/// present must carry their exact rank; other nodes are checked against
/// the one-step characterization using their children's anchors.
pub fn check_anchors(tree: &Tree) -> AnchorReport {
    let exact = complete_subtree_ranks(tree);
    let mut report = AnchorReport::default();
    for (id, node) in tree.nodes().iter().enumerate() {
        let Some(anchor) = &node.anchor else { continue };
        report.checked += 1;
        let mut fail = |detail: String| {
            report.violations.push(AnchorViolation {
                address: node.address.clone(),
                anchor: anchor.clone(),
                detail,
            })
        };
        if let Some(r) = exact[id] {
            if *anchor != Rank::finite(r) {
                fail(format!("exact rank is {r}"));
            }
            continue;
        }
        let child_ranks: Vec<Option<Rank>> = node
            .children
            .iter()
            .map(|&c| {
                tree.node(c).anchor.clone().or_else(|| exact[c].map(Rank::finite))
            })
            .collect();
        match anchor {
            Rank::Infinite => {
                if !node.children.is_empty()
                    && !child_ranks.iter().any(|r| r == &Some(Rank::Infinite))
                {
                    fail("no child of infinite rank".into());
                }
            }
            Rank::Ordinal(a) => {
                if let Some(bad) = child_ranks.iter().flatten().find(|r| *r >= anchor) {
                    fail(format!("child of rank {bad} is not below the anchor"));
                    continue;
                }
                let known: Vec<&Ordinal> =
                    child_ranks.iter().flatten().filter_map(Rank::as_ordinal).collect();
                if a.is_successor() {
                    let pred = a.predecessor().expect("successor");
                    let complete = node.complete && known.len() == node.children.len();
                    let hit = known.iter().any(|r| **r == pred);
                    if (complete || !known.is_empty()) && !hit {
                        fail(format!("no child of rank {pred}"));
                    }
                } else if a.is_zero() {
                    if !node.children.is_empty() {
                        fail("rank 0 node has children".into());
                    }
                } else if node.complete {
                    fail("finitely many children cannot reach a limit rank".into());
                }
            }
        }
    }
    report.exact = exact.iter().flatten().count();
    report
}

/// A branch of `depth` nodes through infinitely-anchored nodes, starting at
/// the root. Trees without such anchors (in particular all finite
/// explicit trees) have none.
pub fn find_path(tree: &Tree, depth: usize) -> Option<Vec<NodeId>> {
    let mut cur = tree.root();
    if tree.node(cur).anchor != Some(Rank::Infinite) || depth == 0 {
        return None;
    }
    let mut path = vec![cur];
    while path.len() < depth {
        cur = *tree
            .children(cur)
            .iter()
            .find(|&&c| tree.node(c).anchor == Some(Rank::Infinite))?;
        path.push(cur);
    }
    Some(path)
}

/// Graphviz rendering with optional per-node annotations.
pub fn to_dot(tree: &Tree, annotations: Option<&[String]>) -> String {
    let mut out = String::from("digraph tree {\n  node [shape=box, fontsize=10];\n");
    for (id, n) in tree.nodes().iter().enumerate() {
        let mut label = format!("{:?}", n.address);
        if let Some(l) = &n.label {
            let _ = write!(label, "\\nlabel {}", notation_value(l));
        }
        if let Some(a) = &n.anchor {
            let _ = write!(label, "\\nanchor {a}");
        }
        if let Some(ann) = annotations.and_then(|a| a.get(id)) {
            let _ = write!(label, "\\n{ann}");
        }
        let _ = writeln!(out, "  n{id} [label=\"{label}\"];");
    }
    for (id, n) in tree.nodes().iter().enumerate() {
        for c in &n.children {
            let _ = writeln!(out, "  n{id} -> n{c};");
        }
    }
    out.push_str("}\n");
    out
}

/// Every rooted tree (up to isomorphism) with at most `max_nodes` nodes and
/// height at most `max_depth`.
pub fn enumerate_trees(max_nodes: usize, max_depth: usize) -> Vec<Tree> {
    let mut codes = BTreeSet::new();
    for n in 1..=max_nodes {
        codes.extend(canonical_codes(n, max_depth));
    }
    codes.iter().map(|c| Tree::from_brackets(c).expect("well-formed")).collect()
}

fn canonical_codes(n: usize, depth: usize) -> BTreeSet<String> {
    fn forests(n: usize, depth: usize, max_first: Option<&str>) -> Vec<Vec<String>> {
        if n == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for size in 1..=n {
            for code in canonical_codes(size, depth) {
                if max_first.is_some_and(|m| code.as_str() > m) {
                    continue;
                }
                for mut rest in forests(n - size, depth, Some(&code)) {
                    rest.insert(0, code.clone());
                    out.push(rest);
                }
            }
        }
        out
    }
    if n == 0 {
        return BTreeSet::new();
    }
    if depth == 0 {
        return if n == 1 { BTreeSet::from(["()".to_string()]) } else { BTreeSet::new() };
    }
    forests(n - 1, depth - 1, None)
        .into_iter()
        .map(|f| format!("({})", f.concat()))
        .collect()
}

/// A random tree of height at most `max_depth`, branching at most
/// `max_branch`, and at most `max_width` nodes on any level.
pub fn random_tree<R: Rng>(rng: &mut R, max_depth: usize, max_branch: usize, max_width: usize) -> Tree {
    loop {
        let mut tree = Tree::new();
        let mut frontier = vec![tree.root()];
        let mut ok = true;
        for _ in 0..max_depth {
            let mut next = Vec::new();
            for &p in &frontier {
                for _ in 0..rng.gen_range(0..=max_branch) {
                    next.push(tree.add_child(p));
                }
            }
            if next.len() > max_width {
                ok = false;
                break;
            }
            frontier = next;
        }
        if ok {
            return tree;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notation::notation_from_ordinal;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn ranks_of_small_trees() {
        assert_eq!(tree_rank(&Tree::new()), vec![0]);
        let chain = Tree::from_brackets("((()))").unwrap();
        assert_eq!(tree_rank(&chain), vec![2, 1, 0]);
        let t = Tree::from_brackets("(()(()))").unwrap();
        assert_eq!(tree_rank(&t)[0], 2);
    }

    #[test]
    fn labeled_trees() {
        let t = labeled_tree_from_notation(&notation_from_ordinal(&o("2")), ExplorationBudget::new(10, 10));
        assert_eq!(t.len(), 3);
        let values: Vec<Ordinal> = (0..3).map(|i| symbolic_label_rank(&t, i).unwrap()).collect();
        assert_eq!(values, vec![o("2"), o("1"), o("0")]);

        let t = labeled_tree_from_notation(&notation_from_ordinal(&o("w")), ExplorationBudget::new(1, 4));
        assert_eq!(t.children(0).len(), 4);
        for (i, &c) in t.children(0).iter().enumerate() {
            assert_eq!(symbolic_label_rank(&t, c).unwrap(), Ordinal::from(i as u64));
        }
        let t = labeled_tree_from_notation(&notation_from_ordinal(&o("w^2")), ExplorationBudget::new(2, 3));
        assert_eq!(symbolic_label_rank(&t, 0).unwrap(), o("w^2"));
    }

    #[test]
    fn canonical_trees() {
        let t = canonical_ranked_tree(&Rank::finite(0), ExplorationBudget::new(5, 5));
        assert_eq!(t.len(), 1);
        let t = canonical_ranked_tree(&Rank::Ordinal(o("w")), ExplorationBudget::new(1, 4));
        let anchors: Vec<Rank> = t.children(0).iter().map(|&c| t.node(c).anchor.clone().unwrap()).collect();
        assert_eq!(anchors, (0..4).map(Rank::finite).collect::<Vec<_>>());
        let t = canonical_ranked_tree(&Rank::Infinite, ExplorationBudget::new(4, 2));
        assert_eq!(find_path(&t, 5).unwrap().len(), 5);
    }

    #[test]
    fn anchor_verification() {
        let r = verify_rank_anchors(&Rank::finite(3), 10, 10);
        assert!(r.passed());
        assert_eq!(r.exact, 4);
        assert!(verify_rank_anchors(&Rank::Ordinal(o("w")), 6, 5).passed());
        assert!(verify_rank_anchors(&Rank::Ordinal(o("w*2+1")), 8, 4).passed());
        assert!(verify_rank_anchors(&Rank::Infinite, 5, 3).passed());

        let mut bad = Tree::from_brackets("(())").unwrap();
        bad.node_mut(0).anchor = Some(Rank::finite(2));
        let r = check_anchors(&bad);
        assert_eq!(r.violations.len(), 1);
        assert!(r.violations[0].address.is_empty());
    }

    #[test]
    fn paths() {
        assert!(find_path(&Tree::from_brackets("((()))").unwrap(), 2).is_none());
        let t = canonical_ranked_tree(&Rank::Infinite, ExplorationBudget::new(8, 3));
        let p = find_path(&t, 6).unwrap();
        assert_eq!(p.len(), 6);
        assert!(p.iter().all(|&n| t.node(n).anchor == Some(Rank::Infinite)));
        let t = canonical_ranked_tree(&Rank::Ordinal(o("w*2")), ExplorationBudget::new(12, 4));
        assert!(find_path(&t, 10).is_none());
    }

    #[test]
    fn enumeration_counts() {
        // Rooted unlabeled trees: 1, 1, 2, 4, 9, 20, 48, 115 for n = 1..8.
        let counts: Vec<usize> = (1..=8).map(|n| canonical_codes(n, 8).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 4, 9, 20, 48, 115]);
        assert!(enumerate_trees(8, 3).iter().all(|t| t.height() <= 3));
    }

    #[test]
    fn json_round_trip() {
        let t = canonical_ranked_tree(&Rank::Ordinal(o("w+1")), ExplorationBudget::new(3, 2));
        let s = serde_json::to_string(&t.to_json()).unwrap();
        let back = Tree::from_json(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(back.len(), t.len());
        assert_eq!(back.node(1).anchor, Some(Rank::Ordinal(o("w"))));
        assert!(to_dot(&t, None).contains("n0 -> n1"));
    }
}
