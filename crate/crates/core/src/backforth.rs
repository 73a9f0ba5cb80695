//! Back-and-forth relations `≡^β` and Scott ranks on finite structures,
//! with an automorphism search as the orbit oracle.
//!
//! Quantifier-free types are compared through a canonical description of
//! the substructure generated by a tuple. Coordinates that are values of
//! terms in the other coordinates are dropped before recursing, and
//! challenges are only taken outside the generated substructure; the
//! responses to challenges inside it are forced.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::rc::Rc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::structure::{all_tuples, FiniteStructure};

/// Default limit on the number of automorphisms enumerated.
pub const DEFAULT_AUTOMORPHISM_CAP: usize = 100_000;
/// Default limit on the number of tuples classified.
pub const DEFAULT_TUPLE_CAP: usize = 200_000;

struct Closure {
    key: u32,
    member: Vec<bool>,
}

/// Memoized `≡^β` on one structure.
pub struct Engine<'s> {
    s: &'s FiniteStructure,
    interner: HashMap<Vec<u32>, u32>,
    closures: HashMap<Vec<usize>, Rc<Closure>>,
    memo: HashMap<(usize, Vec<usize>, Vec<usize>), bool>,
}

impl<'s> Engine<'s> {
    pub fn new(s: &'s FiniteStructure) -> Self {
        Engine { s, interner: HashMap::new(), closures: HashMap::new(), memo: HashMap::new() }
    }

    pub fn structure(&self) -> &'s FiniteStructure {
        self.s
    }

    fn closure(&mut self, t: &[usize]) -> Rc<Closure> {
        if let Some(c) = self.closures.get(t) {
            return c.clone();
        }
        let s = self.s;
        let n = s.len();
        let mut elems: Vec<usize> = Vec::new();
        let mut pos: Vec<u32> = vec![u32::MAX; n];
        let mut desc: Vec<u32> = vec![t.len() as u32];
        let intern = |x: usize, elems: &mut Vec<usize>, pos: &mut Vec<u32>| -> u32 {
            if pos[x] == u32::MAX {
                pos[x] = elems.len() as u32;
                elems.push(x);
            }
            pos[x]
        };
        for &x in t {
            let i = intern(x, &mut elems, &mut pos);
            desc.push(i);
        }
        let mut prev = 0usize;
        let mut first_round = true;
        loop {
            let cur = elems.len();
            for fi in 0..s.functions.len() {
                let f = &s.functions[fi];
                match f.arity {
                    0 => {
                        if first_round {
                            let i = intern(f.table[0], &mut elems, &mut pos);
                            desc.push(i);
                        }
                    }
                    1 => {
                        for a in prev..cur {
                            let i = intern(f.table[elems[a]], &mut elems, &mut pos);
                            desc.push(i);
                        }
                    }
                    arity => {
                        for args in all_tuples(cur, arity) {
                            if args.iter().all(|&a| a < prev) {
                                continue;
                            }
                            let real: Vec<usize> = args.iter().map(|&a| elems[a]).collect();
                            let i = intern(s.apply(fi, &real), &mut elems, &mut pos);
                            desc.push(i);
                        }
                    }
                }
            }
            first_round = false;
            if elems.len() == cur {
                break;
            }
            prev = cur;
        }
        desc.push(u32::MAX);
        desc.push(elems.len() as u32);
        for r in 0..s.relations.len() {
            for args in all_tuples(elems.len(), s.relations[r].arity) {
                let real: Vec<usize> = args.iter().map(|&a| elems[a]).collect();
                desc.push(u32::from(s.holds(r, &real)));
            }
        }
        let next = self.interner.len() as u32;
        let key = *self.interner.entry(desc).or_insert(next);
        let mut member = vec![false; n];
        for &e in &elems {
            member[e] = true;
        }
        let c = Rc::new(Closure { key, member });
        self.closures.insert(t.to_vec(), c.clone());
        c
    }

    /// Identifier of the quantifier-free type of `t`.
    pub fn qf_key(&mut self, t: &[usize]) -> u32 {
        self.closure(t).key
    }

    /// Whether `x` is the value of a term in `t`.
    pub fn generated(&mut self, t: &[usize], x: usize) -> bool {
        self.closure(t).member[x]
    }

    /// Drops coordinates that are values of terms in the others. Assumes
    /// both tuples have the same quantifier-free type.
    fn reduce(&mut self, mut a: Vec<usize>, mut b: Vec<usize>) -> (Vec<usize>, Vec<usize>) {
        let mut i = 0;
        while i < a.len() {
            let mut rest = a.clone();
            let x = rest.remove(i);
            if self.generated(&rest, x) {
                a = rest;
                b.remove(i);
                i = 0;
            } else {
                i += 1;
            }
        }
        (a, b)
    }

    fn memo_key(beta: usize, a: &[usize], b: &[usize]) -> (usize, Vec<usize>, Vec<usize>) {
        let mut p: Vec<(usize, usize)> = a.iter().copied().zip(b.iter().copied()).collect();
        p.sort_unstable();
        let mut q: Vec<(usize, usize)> = p.iter().map(|&(x, y)| (y, x)).collect();
        q.sort_unstable();
        let pick = p.min(q);
        (beta, pick.iter().map(|x| x.0).collect(), pick.iter().map(|x| x.1).collect())
    }

    /// `a ≡^beta b`.
    pub fn equivalent(&mut self, beta: usize, a: &[usize], b: &[usize]) -> bool {
        if a.len() != b.len() || self.qf_key(a) != self.qf_key(b) {
            return false;
        }
        if beta == 0 {
            return true;
        }
        let (a, b) = self.reduce(a.to_vec(), b.to_vec());
        if a == b {
            return true;
        }
        let key = Self::memo_key(beta, &a, &b);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let v = self.equivalent(beta - 1, &a, &b) && self.extensions_match(beta - 1, &a, &b);
        self.memo.insert(key, v);
        v
    }

    fn extensions_match(&mut self, gamma: usize, a: &[usize], b: &[usize]) -> bool {
        let n = self.s.len();
        let mut ext_a: HashMap<u32, Vec<usize>> = HashMap::new();
        let mut ext_b: HashMap<u32, Vec<usize>> = HashMap::new();
        for (t, ext) in [(a, &mut ext_a), (b, &mut ext_b)] {
            let cl = self.closure(t);
            for c in (0..n).filter(|&c| !cl.member[c]) {
                let mut tc = t.to_vec();
                tc.push(c);
                ext.entry(self.qf_key(&tc)).or_default().push(c);
            }
        }
        if ext_a.len() != ext_b.len() || ext_a.keys().any(|k| !ext_b.contains_key(k)) {
            return false;
        }
        for (k, cs) in &ext_a {
            let ds = &ext_b[k];
            let mut answered = vec![false; ds.len()];
            for &c in cs {
                let mut ac = a.to_vec();
                ac.push(c);
                let mut found = false;
                for (j, &d) in ds.iter().enumerate() {
                    let mut bd = b.to_vec();
                    bd.push(d);
                    if self.equivalent(gamma, &ac, &bd) {
                        found = true;
                        answered[j] = true;
                        break;
                    }
                }
                if !found {
                    return false;
                }
            }
            for (j, &d) in ds.iter().enumerate() {
                if answered[j] {
                    continue;
                }
                let mut bd = b.to_vec();
                bd.push(d);
                let ok = cs.iter().any(|&c| {
                    let mut ac = a.to_vec();
                    ac.push(c);
                    self.equivalent(gamma, &ac, &bd)
                });
                if !ok {
                    return false;
                }
            }
        }
        true
    }
}

/// All automorphisms, as permutations of the carrier, found by
/// backtracking with propagation through the function tables. Elements
/// are only mapped within their quantifier-free type, and the element with
/// the fewest candidate images is mapped first.
pub fn automorphisms(s: &FiniteStructure, cap: usize) -> Result<Vec<Vec<usize>>> {
    let mut engine = Engine::new(s);
    let colour: Vec<u32> = (0..s.len()).map(|x| engine.qf_key(&[x])).collect();
    let mut search = AutSearch {
        s,
        colour,
        map: vec![usize::MAX; s.len()],
        used: vec![false; s.len()],
        out: Vec::new(),
        cap,
    };
    let mut trail = Vec::new();
    let constants: Vec<(usize, usize)> = (0..s.functions.len())
        .filter(|&f| s.functions[f].arity == 0)
        .map(|f| (s.apply(f, &[]), s.apply(f, &[])))
        .collect();
    if search.propagate(constants, &mut trail) {
        search.run()?;
    }
    Ok(search.out)
}

struct AutSearch<'s> {
    s: &'s FiniteStructure,
    colour: Vec<u32>,
    map: Vec<usize>,
    used: Vec<bool>,
    out: Vec<Vec<usize>>,
    cap: usize,
}

impl AutSearch<'_> {
    fn run(&mut self) -> Result<()> {
        let mut open: HashMap<u32, usize> = HashMap::new();
        for (u, &m) in self.map.iter().enumerate() {
            if m == usize::MAX {
                *open.entry(self.colour[u]).or_default() += 1;
            }
        }
        let next = (0..self.map.len())
            .filter(|&u| self.map[u] == usize::MAX)
            .min_by_key(|&u| (open[&self.colour[u]], u));
        let Some(x) = next else {
            if self.out.len() >= self.cap {
                return Err(Error::CapExceeded { what: "automorphisms", size: self.out.len() + 1, cap: self.cap });
            }
            self.out.push(self.map.clone());
            return Ok(());
        };
        for y in 0..self.s.len() {
            if self.used[y] || self.colour[y] != self.colour[x] {
                continue;
            }
            let mut trail = Vec::new();
            if self.propagate(vec![(x, y)], &mut trail) {
                self.run()?;
            }
            for u in trail {
                self.used[self.map[u]] = false;
                self.map[u] = usize::MAX;
            }
        }
        Ok(())
    }

    fn propagate(&mut self, mut pending: Vec<(usize, usize)>, trail: &mut Vec<usize>) -> bool {
        let s = self.s;
        let n = s.len();
        while let Some((u, v)) = pending.pop() {
            if self.map[u] == v {
                continue;
            }
            if self.map[u] != usize::MAX || self.used[v] || self.colour[u] != self.colour[v] {
                return false;
            }
            self.map[u] = v;
            self.used[v] = true;
            trail.push(u);
            for (fi, f) in s.functions.iter().enumerate() {
                match f.arity {
                    0 => {}
                    1 => pending.push((s.apply(fi, &[u]), s.apply(fi, &[v]))),
                    k => {
                        for args in all_tuples(n, k) {
                            if !args.contains(&u) || args.iter().any(|&a| self.map[a] == usize::MAX) {
                                continue;
                            }
                            let image: Vec<usize> = args.iter().map(|&a| self.map[a]).collect();
                            pending.push((s.apply(fi, &args), s.apply(fi, &image)));
                        }
                    }
                }
            }
            for (ri, r) in s.relations.iter().enumerate() {
                for args in all_tuples(n, r.arity) {
                    if !args.contains(&u) || args.iter().any(|&a| self.map[a] == usize::MAX) {
                        continue;
                    }
                    let image: Vec<usize> = args.iter().map(|&a| self.map[a]).collect();
                    if s.holds(ri, &args) != s.holds(ri, &image) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Assigns class numbers in order of first appearance.
fn canonical_classes<K: std::hash::Hash + Eq>(labels: impl IntoIterator<Item = K>) -> Vec<usize> {
    let mut ids: HashMap<K, usize> = HashMap::new();
    labels
        .into_iter()
        .map(|k| {
            let next = ids.len();
            *ids.entry(k).or_insert(next)
        })
        .collect()
}

/// Partitions of all tuples of length `1..=length_bound` by `≡^β` for
/// `β = 0..=beta_star + 1`, where `beta_star` is the least `β` at which
/// the partition equals the orbit partition; from there on it is constant.
#[derive(Clone, Debug, Serialize)]
pub struct EqvClassification {
    pub length_bound: usize,
    pub tuples: Vec<Vec<usize>>,
    pub classes: Vec<Vec<usize>>,
    pub orbits: Vec<usize>,
    pub beta_star: usize,
}

impl EqvClassification {
    pub fn tuple_index(&self, t: &[usize]) -> Option<usize> {
        self.tuples.iter().position(|u| u == t)
    }
}

/// A structure together with its automorphism group and a memoized engine.
pub struct Analyzer<'s> {
    pub engine: Engine<'s>,
    auts: Vec<Vec<usize>>,
}

impl<'s> Analyzer<'s> {
    pub fn new(s: &'s FiniteStructure) -> Result<Self> {
        Self::with_cap(s, DEFAULT_AUTOMORPHISM_CAP)
    }

    pub fn with_cap(s: &'s FiniteStructure, cap: usize) -> Result<Self> {
        s.validate()?;
        Ok(Analyzer { engine: Engine::new(s), auts: automorphisms(s, cap)? })
    }

    pub fn structure(&self) -> &'s FiniteStructure {
        self.engine.structure()
    }

    pub fn automorphisms(&self) -> &[Vec<usize>] {
        &self.auts
    }

    pub fn equivalent(&mut self, beta: usize, a: &[usize], b: &[usize]) -> bool {
        self.engine.equivalent(beta, a, b)
    }

    pub fn orbit(&self, a: &[usize]) -> BTreeSet<Vec<usize>> {
        self.auts.iter().map(|g| a.iter().map(|&x| g[x]).collect()).collect()
    }

    /// Orbit numbers of `tuples` under the automorphism group.
    pub fn orbit_classes(&self, tuples: &[Vec<usize>]) -> Vec<usize> {
        let index: HashMap<&[usize], usize> = tuples.iter().enumerate().map(|(i, t)| (t.as_slice(), i)).collect();
        let mut label = vec![usize::MAX; tuples.len()];
        for (i, t) in tuples.iter().enumerate() {
            if label[i] != usize::MAX {
                continue;
            }
            for img in self.orbit(t) {
                if let Some(&j) = index.get(img.as_slice()) {
                    label[j] = i;
                }
            }
        }
        canonical_classes(label)
    }

    fn partition(&mut self, beta: usize, tuples: &[Vec<usize>], coarser: &[usize]) -> Vec<usize> {
        let mut reps: Vec<(usize, usize)> = Vec::new();
        let mut label = Vec::with_capacity(tuples.len());
        for (i, t) in tuples.iter().enumerate() {
            let found = reps
                .iter()
                .find(|&&(r, _)| coarser[r] == coarser[i] && self.engine.equivalent(beta, t, &tuples[r]))
                .map(|&(_, c)| c);
            let c = found.unwrap_or_else(|| {
                reps.push((i, reps.len()));
                reps.len() - 1
            });
            label.push(c);
        }
        canonical_classes(label)
    }

    pub fn classify(&mut self, length_bound: usize) -> Result<EqvClassification> {
        self.classify_tuples(all_tuples_up_to(self.structure().len(), length_bound)?, length_bound)
    }

    /// Classification restricted to the given tuples.
    pub fn classify_tuples(&mut self, tuples: Vec<Vec<usize>>, length_bound: usize) -> Result<EqvClassification> {
        let orbits = self.orbit_classes(&tuples);
        let keys: Vec<(usize, u32)> = tuples.iter().map(|t| (t.len(), self.engine.qf_key(t))).collect();
        let mut classes = vec![canonical_classes(keys)];
        let limit = self.structure().len() + length_bound + 2;
        let mut beta = 0;
        while classes[beta] != orbits {
            if beta > limit {
                return Err(Error::Inconsistent("back-and-forth classes never reached the orbits".into()));
            }
            let next = self.partition(beta + 1, &tuples, &classes[beta]);
            classes.push(next);
            beta += 1;
        }
        let again = self.partition(beta + 1, &tuples, &classes[beta]);
        classes.push(again);
        Ok(EqvClassification { length_bound, tuples, classes, orbits, beta_star: beta })
    }

    /// Least `β` such that every tuple `≡^β`-equivalent to `a` is in its orbit.
    pub fn scott_rank_tuple(&mut self, a: &[usize]) -> Result<usize> {
        let orbit = self.orbit(a);
        let key = self.engine.qf_key(a);
        let n = self.structure().len();
        let mut candidates: Vec<Vec<usize>> = Vec::new();
        for b in all_tuples(n, a.len()) {
            if !orbit.contains(&b) && self.engine.qf_key(&b) == key {
                candidates.push(b);
            }
        }
        for beta in 0..=n + a.len() + 2 {
            candidates.retain(|b| self.engine.equivalent(beta, a, b));
            if candidates.is_empty() {
                return Ok(beta);
            }
        }
        Err(Error::Inconsistent(format!("tuple {a:?} never separated from its non-orbit")))
    }

    /// Least ordinal above the ranks of all tuples of distinct elements of
    /// length at most `length_bound`; order and repetition do not change a
    /// tuple's rank.
    pub fn scott_rank_structure(&mut self, length_bound: usize) -> Result<usize> {
        let n = self.structure().len();
        let mut best = 0;
        for t in combinations_up_to(n, length_bound) {
            best = best.max(self.scott_rank_tuple(&t)? + 1);
        }
        Ok(best.max(1))
    }
}

/// Tuple ranks read off a classification: the least `β` at which the
/// tuple's class is contained in its orbit.
pub fn tuple_ranks(c: &EqvClassification) -> Vec<usize> {
    (0..c.tuples.len())
        .map(|i| {
            (0..c.classes.len())
                .find(|&b| {
                    let cls = c.classes[b][i];
                    (0..c.tuples.len()).all(|j| c.classes[b][j] != cls || c.orbits[j] == c.orbits[i])
                })
                .expect("last partition equals the orbits")
        })
        .collect()
}

pub fn all_tuples_up_to(n: usize, length_bound: usize) -> Result<Vec<Vec<usize>>> {
    let total: usize = (1..=length_bound).map(|l| n.saturating_pow(l as u32)).fold(0, usize::saturating_add);
    if total > DEFAULT_TUPLE_CAP {
        return Err(Error::CapExceeded { what: "tuples", size: total, cap: DEFAULT_TUPLE_CAP });
    }
    Ok((1..=length_bound).flat_map(|l| all_tuples(n, l)).collect())
}

/// Increasing tuples of distinct elements with length `1..=k`.
pub fn combinations_up_to(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == k {
            return;
        }
        for x in start..n {
            cur.push(x);
            go(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Orbit numbers of the one-element tuples.
pub fn element_orbits(s: &FiniteStructure) -> Result<Vec<usize>> {
    let a = Analyzer::new(s)?;
    let singles: Vec<Vec<usize>> = (0..s.len()).map(|x| vec![x]).collect();
    Ok(a.orbit_classes(&singles))
}

/// Orbit of a single element as a set.
pub fn orbit_of(auts: &[Vec<usize>], x: usize) -> HashSet<usize> {
    auts.iter().map(|g| g[x]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::linear_order;

    #[test]
    fn one_element_structure() {
        let s = FiniteStructure::new(1);
        let mut a = Analyzer::new(&s).unwrap();
        let c = a.classify(2).unwrap();
        assert_eq!(c.beta_star, 0);
        assert!(c.classes.iter().all(|p| p == &vec![0, 1]));
        assert_eq!(a.scott_rank_structure(1).unwrap(), 1);
    }

    #[test]
    fn two_element_order() {
        let s = linear_order(2);
        let mut a = Analyzer::new(&s).unwrap();
        assert!(a.equivalent(0, &[0], &[1]));
        assert!(!a.equivalent(1, &[0], &[1]));
        assert_eq!(a.automorphisms().len(), 1);
        assert_eq!(a.scott_rank_tuple(&[0]).unwrap(), 1);
        assert_eq!(a.scott_rank_tuple(&[0, 0]).unwrap(), 1);
        assert_eq!(a.scott_rank_structure(2).unwrap(), 2);
        let c = a.classify(1).unwrap();
        assert_eq!(c.beta_star, 1);
        assert_eq!(c.classes[0], vec![0, 0]);
        assert_eq!(c.classes[1], vec![0, 1]);
    }

    #[test]
    fn empty_signature_is_homogeneous() {
        let s = FiniteStructure::new(4);
        let a = Analyzer::new(&s).unwrap();
        assert_eq!(a.automorphisms().len(), 24);
        let singles: Vec<Vec<usize>> = (0..4).map(|x| vec![x]).collect();
        assert_eq!(a.orbit_classes(&singles), vec![0; 4]);
    }

    #[test]
    fn classes_refine_and_contain_orbits() {
        let mut s = linear_order(3);
        s.add_relation("p", 1, [vec![1]]);
        let mut a = Analyzer::new(&s).unwrap();
        let c = a.classify(2).unwrap();
        for w in c.classes.windows(2) {
            for i in 0..c.tuples.len() {
                for j in 0..c.tuples.len() {
                    if w[1][i] == w[1][j] {
                        assert_eq!(w[0][i], w[0][j]);
                    }
                }
            }
        }
        assert_eq!(c.classes[c.beta_star], c.classes[c.beta_star + 1]);
    }

    #[test]
    fn functions_are_respected() {
        let mut s = FiniteStructure::new(4);
        s.add_function("s", 1, vec![1, 0, 3, 3]);
        let a = Analyzer::new(&s).unwrap();
        assert_eq!(a.automorphisms().len(), 2);
        let mut s = FiniteStructure::new(3);
        s.add_function("c", 0, vec![2]);
        let a = Analyzer::new(&s).unwrap();
        assert!(a.automorphisms().iter().all(|g| g[2] == 2));
        assert_eq!(a.automorphisms().len(), 2);
    }

    #[test]
    fn combination_counts() {
        assert_eq!(combinations_up_to(4, 4).len(), 15);
        assert_eq!(combinations_up_to(4, 2).len(), 10);
    }
}
