//! Encoding a finite relational structure as a five-sorted graph with
//! block orderings, and decoding it back.
//!
//! Symbol `i` (counting from 1) is an `L` node joined to every node of an
//! `L*` cycle of length `i + 1`. Each tuple over the carrier whose length is
//! the arity of some symbol gets a `U` cycle; a 1-cycle is a self-loop. For
//! each symbol `R` and tuple `ā` the block `T(R, ā)` is joined to the `L`
//! node of `R` and to the first node of the cycle of `ā`, and carries a
//! linear order whose size says whether `R(ā)` holds.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structure::{all_tuples, FiniteStructure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sort {
    L,
    #[serde(rename = "Lstar")]
    LStar,
    A,
    U,
    T,
}

/// Sizes of the two block orderings: `c1` for false atoms, `c2` for true.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistinguishingPair {
    pub c1_size: usize,
    pub c2_size: usize,
}

impl DistinguishingPair {
    pub fn new(c1_size: usize, c2_size: usize) -> Result<Self> {
        if c1_size == 0 || c2_size == 0 || c1_size == c2_size {
            return Err(Error::Parse(format!(
                "block sizes must be positive and distinct, got {c1_size},{c2_size}"
            )));
        }
        Ok(DistinguishingPair { c1_size, c2_size })
    }

    fn size_for(&self, truth: bool) -> usize {
        if truth {
            self.c2_size
        } else {
            self.c1_size
        }
    }

    fn classify(&self, size: usize) -> Option<bool> {
        if size == self.c2_size {
            Some(true)
        } else if size == self.c1_size {
            Some(false)
        } else {
            None
        }
    }
}

impl Default for DistinguishingPair {
    fn default() -> Self {
        DistinguishingPair { c1_size: 2, c2_size: 3 }
    }
}

impl FromStr for DistinguishingPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected two sizes `c1,c2`, got `{s}`")))?;
        let parse = |x: &str| {
            x.trim().parse::<usize>().map_err(|e| Error::Parse(format!("bad block size `{x}`: {e}")))
        };
        DistinguishingPair::new(parse(a)?, parse(b)?)
    }
}

impl fmt::Display for DistinguishingPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.c1_size, self.c2_size)
    }
}

/// Where a block came from. Only used to cross-check the graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockMeta {
    pub symbol: usize,
    pub tuple: Vec<usize>,
    pub members: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarStructure {
    pub universe: Vec<String>,
    pub sorts: Vec<Sort>,
    /// Undirected edges, stored with the smaller endpoint first.
    pub edges: BTreeSet<(usize, usize)>,
    /// Strict order pairs `x < y` inside the blocks.
    pub order: BTreeSet<(usize, usize)>,
    #[serde(default)]
    pub blocks: Vec<BlockMeta>,
}

impl StarStructure {
    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        self.edges.insert((a.min(b), a.max(b)));
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn sort_count(&self, sort: Sort) -> usize {
        self.sorts.iter().filter(|&&s| s == sort).count()
    }

    /// Relabels element `i` as `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> StarStructure {
        let n = self.len();
        let mut universe = vec![String::new(); n];
        let mut sorts = vec![Sort::A; n];
        for i in 0..n {
            universe[perm[i]].clone_from(&self.universe[i]);
            sorts[perm[i]] = self.sorts[i];
        }
        let mut out = StarStructure {
            universe,
            sorts,
            edges: BTreeSet::new(),
            order: self.order.iter().map(|&(a, b)| (perm[a], perm[b])).collect(),
            blocks: self
                .blocks
                .iter()
                .map(|b| BlockMeta {
                    symbol: b.symbol,
                    tuple: b.tuple.clone(),
                    members: b.members.iter().map(|&m| perm[m]).collect(),
                })
                .collect(),
        };
        for &(a, b) in &self.edges {
            out.add_edge(perm[a], perm[b]);
        }
        out
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    fn push(&mut self, name: String, sort: Sort) -> usize {
        self.universe.push(name);
        self.sorts.push(sort);
        self.universe.len() - 1
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.len()];
        for &(a, b) in &self.edges {
            if a < self.len() && b < self.len() {
                adj[a].push(b);
                if a != b {
                    adj[b].push(a);
                }
            }
        }
        adj
    }
}

/// Checks that `a` uses only relation symbols of arity 1 or 2.
///
/// Longer tuples would need an oriented cycle: with a symmetric `E` the
/// cycle `u0 u1 u2` cannot be told apart from `u0 u2 u1`.
pub fn check_encodable(a: &FiniteStructure) -> Result<()> {
    a.validate()?;
    if !a.functions.is_empty() {
        return Err(Error::InvalidStructure("the language must be relational".into()));
    }
    if let Some(r) = a.relations.iter().find(|r| r.arity == 0 || r.arity > 2) {
        return Err(Error::InvalidStructure(format!(
            "relation {} has arity {}; only arities 1 and 2 are encodable",
            r.name, r.arity
        )));
    }
    Ok(())
}

pub fn encode(a: &FiniteStructure, pair: DistinguishingPair) -> Result<StarStructure> {
    check_encodable(a)?;
    let n = a.len();
    let mut s = StarStructure {
        universe: Vec::new(),
        sorts: Vec::new(),
        edges: BTreeSet::new(),
        order: BTreeSet::new(),
        blocks: Vec::new(),
    };

    let mut l_nodes = Vec::new();
    for (i, r) in a.relations.iter().enumerate() {
        let l = s.push(format!("L:{}", r.name), Sort::L);
        l_nodes.push(l);
        let cycle: Vec<usize> =
            (0..i + 2).map(|j| s.push(format!("L*:{}.{j}", r.name), Sort::LStar)).collect();
        for (j, &c) in cycle.iter().enumerate() {
            s.add_edge(l, c);
            s.add_edge(c, cycle[(j + 1) % cycle.len()]);
        }
    }

    let a_nodes: Vec<usize> = a.universe.iter().map(|x| s.push(format!("A:{x}"), Sort::A)).collect();

    let arities: BTreeSet<usize> = a.relations.iter().map(|r| r.arity).collect();
    let mut heads: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for &k in &arities {
        for t in all_tuples(n, k) {
            let label = t.iter().map(|&x| a.universe[x].as_str()).collect::<Vec<_>>().join(",");
            let cycle: Vec<usize> =
                (0..k).map(|j| s.push(format!("U:({label}).{j}"), Sort::U)).collect();
            for (j, &u) in cycle.iter().enumerate() {
                s.add_edge(u, a_nodes[t[j]]);
                s.add_edge(u, cycle[(j + 1) % k]);
            }
            heads.insert(t, cycle[0]);
        }
    }

    for (i, r) in a.relations.iter().enumerate() {
        for t in all_tuples(n, r.arity) {
            let size = pair.size_for(r.tuples.contains(&t));
            let label = t.iter().map(|&x| a.universe[x].as_str()).collect::<Vec<_>>().join(",");
            let members: Vec<usize> =
                (0..size).map(|j| s.push(format!("T:{}({label}).{j}", r.name), Sort::T)).collect();
            let u0 = heads[&t];
            for (j, &m) in members.iter().enumerate() {
                s.add_edge(m, l_nodes[i]);
                s.add_edge(m, u0);
                for &later in &members[j + 1..] {
                    s.order.insert((m, later));
                }
            }
            s.blocks.push(BlockMeta { symbol: i, tuple: t, members });
        }
    }
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantCheck {
    pub invariant: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct StarReport {
    pub checks: Vec<InvariantCheck>,
}

impl StarReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&InvariantCheck> {
        self.checks.iter().find(|c| !c.passed)
    }

    fn record(&mut self, invariant: &'static str, failures: Vec<String>) {
        let passed = failures.is_empty();
        let detail = if passed { "ok".to_string() } else { failures.join("; ") };
        self.checks.push(InvariantCheck { invariant, passed, detail });
    }
}

/// The graph read back from a star structure: symbols in order, the
/// carrier, and each block's symbol, tuple and size.
struct Reading {
    symbols: Vec<(usize, usize)>,
    carrier: Vec<usize>,
    blocks: Vec<(usize, Vec<usize>, Vec<usize>)>,
}

/// Connected components of `E` restricted to one sort.
fn components(s: &StarStructure, adj: &[Vec<usize>], sort: Sort) -> Vec<Vec<usize>> {
    let mut seen = vec![false; s.len()];
    let mut out = Vec::new();
    for start in 0..s.len() {
        if s.sorts[start] != sort || seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if s.sorts[y] == sort && !seen[y] {
                    seen[y] = true;
                    comp.push(y);
                    queue.push_back(y);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Orders a component as a cycle starting at `start`, or explains why it
/// is not one.
fn walk_cycle(s: &StarStructure, adj: &[Vec<usize>], comp: &[usize], start: usize) -> std::result::Result<Vec<usize>, String> {
    let sort = s.sorts[start];
    let inner = |x: usize| adj[x].iter().copied().filter(|&y| s.sorts[y] == sort).collect::<Vec<_>>();
    match comp.len() {
        1 => {
            if s.has_edge(start, start) {
                Ok(vec![start])
            } else {
                Err(format!("node {start} forms a 1-cycle without a self-loop"))
            }
        }
        2 => {
            for &x in comp {
                if s.has_edge(x, x) || inner(x).len() != 1 {
                    return Err(format!("component {comp:?} is not a 2-cycle"));
                }
            }
            let other = if comp[0] == start { comp[1] } else { comp[0] };
            Ok(vec![start, other])
        }
        m => {
            if let Some(&x) = comp.iter().find(|&&x| s.has_edge(x, x) || inner(x).len() != 2) {
                return Err(format!("node {x} has the wrong degree for a cycle of length {m}"));
            }
            let mut order = vec![start];
            let mut prev = start;
            let mut cur = inner(start)[0];
            while cur != start {
                order.push(cur);
                let next = inner(cur).into_iter().find(|&y| y != prev).unwrap_or(prev);
                prev = cur;
                cur = next;
            }
            if order.len() == m {
                Ok(order)
            } else {
                Err(format!("component {comp:?} is not a single cycle"))
            }
        }
    }
}

fn neighbours_of_sort(s: &StarStructure, adj: &[Vec<usize>], x: usize, sort: Sort) -> Vec<usize> {
    adj[x].iter().copied().filter(|&y| s.sorts[y] == sort).collect()
}

fn read_star(s: &StarStructure, report: &mut StarReport) -> Option<Reading> {
    let n = s.len();

    let mut fails = Vec::new();
    if s.sorts.len() != n {
        fails.push(format!("{} sort tags for {n} elements", s.sorts.len()));
    }
    report.record("sorts_partition", fails);
    if !report.passed() {
        return None;
    }

    let mut fails = Vec::new();
    for &(a, b) in &s.edges {
        if a >= n || b >= n {
            fails.push(format!("edge ({a},{b}) leaves the universe"));
            continue;
        }
        if a == b && s.sorts[a] != Sort::U {
            fails.push(format!("self-loop on non-U node {a}"));
        }
        let pair = (s.sorts[a].min(s.sorts[b]), s.sorts[a].max(s.sorts[b]));
        let allowed = matches!(
            pair,
            (Sort::L, Sort::LStar)
                | (Sort::LStar, Sort::LStar)
                | (Sort::A, Sort::U)
                | (Sort::U, Sort::U)
                | (Sort::L, Sort::T)
                | (Sort::U, Sort::T)
        );
        if !allowed {
            fails.push(format!("edge ({a},{b}) joins sorts {:?} and {:?}", s.sorts[a], s.sorts[b]));
        }
    }
    report.record("edge_sorts", fails);
    let adj = s.adjacency();

    // Symbols.
    let mut fails = Vec::new();
    let mut cycle_owner: BTreeMap<usize, usize> = BTreeMap::new();
    let mut symbols = Vec::new();
    for comp in components(s, &adj, Sort::LStar) {
        if comp.len() < 2 {
            fails.push(format!("L* component {comp:?} is shorter than 2"));
            continue;
        }
        if let Err(e) = walk_cycle(s, &adj, &comp, comp[0]) {
            fails.push(e);
            continue;
        }
        let owners: BTreeSet<usize> =
            comp.iter().flat_map(|&c| neighbours_of_sort(s, &adj, c, Sort::L)).collect();
        if owners.len() != 1 {
            fails.push(format!("L* cycle {comp:?} is joined to {} L nodes", owners.len()));
            continue;
        }
        let r = *owners.iter().next().unwrap();
        if comp.iter().any(|&c| !s.has_edge(r, c)) {
            fails.push(format!("L node {r} misses part of its cycle {comp:?}"));
        }
        if cycle_owner.insert(r, comp.len()).is_some() {
            fails.push(format!("L node {r} is joined to two L* cycles"));
        }
    }
    for r in (0..n).filter(|&x| s.sorts[x] == Sort::L) {
        match cycle_owner.get(&r) {
            None => fails.push(format!("L node {r} has no L* cycle")),
            Some(&len) => symbols.push((len - 1, r)),
        }
    }
    symbols.sort_unstable();
    let lengths: BTreeSet<usize> = symbols.iter().map(|&(i, _)| i).collect();
    if lengths.len() != symbols.len() {
        fails.push("two symbols share a cycle length".into());
    }
    report.record("lstar_cycles", fails);

    // Tuples.
    let carrier: Vec<usize> = (0..n).filter(|&x| s.sorts[x] == Sort::A).collect();
    let mut fails = Vec::new();
    let mut tuple_of_head: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for comp in components(s, &adj, Sort::U) {
        for &u in &comp {
            let a_nb = neighbours_of_sort(s, &adj, u, Sort::A);
            if a_nb.len() != 1 {
                fails.push(format!("U node {u} has {} A-neighbours", a_nb.len()));
            }
        }
        let heads: Vec<usize> =
            comp.iter().copied().filter(|&u| !neighbours_of_sort(s, &adj, u, Sort::T).is_empty()).collect();
        if heads.len() != 1 {
            fails.push(format!("U cycle {comp:?} has {} nodes joined to T", heads.len()));
            continue;
        }
        if comp.len() > 2 {
            fails.push(format!("U cycle {comp:?} is longer than 2"));
            continue;
        }
        match walk_cycle(s, &adj, &comp, heads[0]) {
            Ok(order) => {
                let tuple: Option<Vec<usize>> = order
                    .iter()
                    .map(|&u| neighbours_of_sort(s, &adj, u, Sort::A).first().copied())
                    .collect();
                if let Some(t) = tuple {
                    tuple_of_head.insert(heads[0], t);
                }
            }
            Err(e) => fails.push(e),
        }
    }
    let distinct: BTreeSet<&Vec<usize>> = tuple_of_head.values().collect();
    if distinct.len() != tuple_of_head.len() {
        fails.push("two U cycles encode the same tuple".into());
    }
    report.record("u_cycles", fails);

    // Blocks.
    let mut fails = Vec::new();
    let mut blocks: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for t in (0..n).filter(|&x| s.sorts[x] == Sort::T) {
        let ls = neighbours_of_sort(s, &adj, t, Sort::L);
        let us = neighbours_of_sort(s, &adj, t, Sort::U);
        if ls.len() != 1 || us.len() != 1 {
            fails.push(format!("T node {t} is joined to {} L nodes and {} U nodes", ls.len(), us.len()));
            continue;
        }
        blocks.entry((ls[0], us[0])).or_default().push(t);
    }
    let index_of_l: BTreeMap<usize, usize> = symbols.iter().enumerate().map(|(k, &(_, r))| (r, k)).collect();
    let mut arity: BTreeMap<usize, usize> = BTreeMap::new();
    let mut per_symbol: BTreeMap<usize, usize> = BTreeMap::new();
    let mut read_blocks = Vec::new();
    for (&(r, u0), members) in &blocks {
        let (Some(&k), Some(tuple)) = (index_of_l.get(&r), tuple_of_head.get(&u0)) else {
            continue;
        };
        if *arity.entry(k).or_insert(tuple.len()) != tuple.len() {
            fails.push(format!("symbol {} has blocks of two arities", k + 1));
        }
        *per_symbol.entry(k).or_default() += 1;
        read_blocks.push((k, tuple.clone(), members.clone()));
    }
    for k in 0..symbols.len() {
        match arity.get(&k) {
            None => fails.push(format!("symbol {} has no blocks", k + 1)),
            Some(&ar) => {
                let expected = carrier.len().checked_pow(ar as u32).unwrap_or(usize::MAX);
                if per_symbol[&k] != expected {
                    fails.push(format!("symbol {} has {} blocks, expected {expected}", k + 1, per_symbol[&k]));
                }
            }
        }
    }
    report.record("t_blocks", fails);

    // Orders.
    let mut fails = Vec::new();
    let mut block_of = vec![usize::MAX; n];
    for (b, (_, _, members)) in read_blocks.iter().enumerate() {
        for &m in members {
            block_of[m] = b;
        }
    }
    for &(x, y) in &s.order {
        if x >= n || y >= n || block_of[x] == usize::MAX || block_of[x] != block_of[y] {
            fails.push(format!("order pair ({x},{y}) is not inside one block"));
        }
    }
    for (_, _, members) in &read_blocks {
        let below = |x: usize| members.iter().filter(|&&y| s.order.contains(&(y, x))).count();
        let mut counts: Vec<usize> = members.iter().map(|&x| below(x)).collect();
        counts.sort_unstable();
        let linear = counts.iter().enumerate().all(|(i, &c)| i == c)
            && members.iter().all(|&x| !s.order.contains(&(x, x)))
            && members.iter().all(|&x| {
                members.iter().all(|&y| x == y || s.order.contains(&(x, y)) != s.order.contains(&(y, x)))
            });
        if !linear {
            fails.push(format!("block {members:?} is not linearly ordered"));
        }
    }
    report.record("block_order", fails);

    let mut fails = Vec::new();
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    for (b, meta) in s.blocks.iter().enumerate() {
        for &m in &meta.members {
            if let Some(prev) = owner.insert(m, b) {
                fails.push(format!("element {m} lies in blocks {prev} and {b}"));
            }
        }
    }
    report.record("t_blocks_disjoint", fails);

    if !s.blocks.is_empty() {
        let mut fails = Vec::new();
        let found: BTreeSet<Vec<usize>> = read_blocks
            .iter()
            .map(|(_, _, m)| {
                let mut m = m.clone();
                m.sort_unstable();
                m
            })
            .collect();
        for meta in &s.blocks {
            let mut m = meta.members.clone();
            m.sort_unstable();
            if !found.contains(&m) {
                fails.push(format!("recorded block {:?} does not match the graph", meta.members));
            }
        }
        report.record("block_metadata", fails);
    }

    report.passed().then_some(Reading { symbols, carrier, blocks: read_blocks })
}

/// Checks every structural invariant of `s`.
pub fn verify_star(s: &StarStructure) -> StarReport {
    let mut report = StarReport::default();
    read_star(s, &mut report);
    report
}

/// Rebuilds the relational structure coded by `s`. Symbols come back in
/// order as `R1, R2, ...`; element names are taken from the `A` nodes.
pub fn decode(s: &StarStructure, pair: DistinguishingPair) -> Result<FiniteStructure> {
    let mut report = StarReport::default();
    let reading = read_star(s, &mut report);
    let Some(reading) = reading else {
        let f = report.first_failure().expect("failed report has a failure");
        return Err(Error::Invariant { invariant: f.invariant.to_string(), detail: f.detail.clone() });
    };
    let pos: BTreeMap<usize, usize> = reading.carrier.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut out = FiniteStructure {
        universe: reading
            .carrier
            .iter()
            .map(|&x| s.universe[x].strip_prefix("A:").unwrap_or(&s.universe[x]).to_string())
            .collect(),
        functions: Vec::new(),
        relations: Vec::new(),
    };
    let mut tables: Vec<(usize, BTreeSet<Vec<usize>>)> = vec![(0, BTreeSet::new()); reading.symbols.len()];
    for (k, tuple, members) in &reading.blocks {
        let truth = pair.classify(members.len()).ok_or_else(|| Error::Invariant {
            invariant: "block_size".into(),
            detail: format!("block of size {} is neither {} nor {}", members.len(), pair.c1_size, pair.c2_size),
        })?;
        tables[*k].0 = tuple.len();
        if truth {
            tables[*k].1.insert(tuple.iter().map(|x| pos[x]).collect());
        }
    }
    for (k, (arity, tuples)) in tables.into_iter().enumerate() {
        out.add_relation(&format!("R{}", k + 1), arity, tuples);
    }
    Ok(out)
}

/// A random relational structure with `1..=max_elems` elements,
/// `1..=max_symbols` symbols and arities in `1..=max_arity`.
pub fn random_relational<R: Rng>(rng: &mut R, max_elems: usize, max_symbols: usize, max_arity: usize) -> FiniteStructure {
    let n = rng.gen_range(1..=max_elems.max(1));
    let mut a = FiniteStructure::new(n);
    for i in 0..rng.gen_range(1..=max_symbols.max(1)) {
        let arity = rng.gen_range(1..=max_arity.clamp(1, 2));
        let tuples: Vec<Vec<usize>> = all_tuples(n, arity).filter(|_| rng.gen_bool(0.5)).collect();
        a.add_relation(&format!("P{i}"), arity, tuples);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unary(n: usize, holds: &[usize]) -> FiniteStructure {
        let mut a = FiniteStructure::new(n);
        a.add_relation("P", 1, holds.iter().map(|&x| vec![x]));
        a
    }

    #[test]
    fn smallest_case() {
        let pair = DistinguishingPair::new(3, 5).unwrap();
        let s = encode(&unary(1, &[]), pair).unwrap();
        assert_eq!(s.sort_count(Sort::L), 1);
        assert_eq!(s.sort_count(Sort::LStar), 2);
        assert_eq!(s.sort_count(Sort::U), 1);
        assert_eq!(s.blocks.len(), 1);
        assert_eq!(s.blocks[0].members.len(), 3);
        assert!(verify_star(&s).passed());
    }

    #[test]
    fn unary_blocks_by_truth() {
        let pair = DistinguishingPair::new(3, 5).unwrap();
        let s = encode(&unary(2, &[0]), pair).unwrap();
        let sizes: Vec<(Vec<usize>, usize)> = s.blocks.iter().map(|b| (b.tuple.clone(), b.members.len())).collect();
        assert_eq!(sizes, vec![(vec![0], 5), (vec![1], 3)]);
        let back = decode(&s, pair).unwrap();
        assert!(back.find_isomorphism(&unary(2, &[0])).is_some());
    }

    #[test]
    fn pair_parsing() {
        assert_eq!("3,5".parse::<DistinguishingPair>().unwrap(), DistinguishingPair { c1_size: 3, c2_size: 5 });
        assert!("4,4".parse::<DistinguishingPair>().is_err());
        assert!("0,1".parse::<DistinguishingPair>().is_err());
        assert!("7".parse::<DistinguishingPair>().is_err());
    }

    #[test]
    fn rejects_long_arity() {
        let mut a = FiniteStructure::new(2);
        a.add_relation("R", 3, []);
        assert!(encode(&a, DistinguishingPair::default()).is_err());
    }

    #[test]
    fn wrong_pair_fails_to_decode() {
        let s = encode(&unary(2, &[1]), DistinguishingPair::new(3, 5).unwrap()).unwrap();
        let err = decode(&s, DistinguishingPair::new(3, 4).unwrap()).unwrap_err();
        assert!(err.to_string().contains("block_size"));
    }

    #[test]
    fn missing_a_edge_is_named() {
        let mut s = encode(&unary(2, &[1]), DistinguishingPair::default()).unwrap();
        let u = s.sorts.iter().position(|&x| x == Sort::U).unwrap();
        let a = s.sorts.iter().position(|&x| x == Sort::A).unwrap();
        s.edges.remove(&(a.min(u), a.max(u)));
        let report = verify_star(&s);
        assert_eq!(report.first_failure().unwrap().invariant, "u_cycles");
    }

    #[test]
    fn shared_block_member_is_named() {
        let mut s = encode(&unary(2, &[1]), DistinguishingPair::default()).unwrap();
        let stolen = s.blocks[0].members[0];
        s.blocks[1].members.push(stolen);
        let report = verify_star(&s);
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.invariant).collect();
        assert!(failed.contains(&"t_blocks_disjoint"));
    }
}
