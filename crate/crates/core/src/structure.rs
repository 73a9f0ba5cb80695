//! Finite structures: a carrier `0..n` with named relation and function
//! tables.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub name: String,
    pub arity: usize,
    pub tuples: BTreeSet<Vec<usize>>,
}

/// A total function; `table` is indexed by the arguments in row-major order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Function {
    pub name: String,
    pub arity: usize,
    pub table: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteStructure {
    pub universe: Vec<String>,
    #[serde(default)]
    pub functions: Vec<Function>,
    #[serde(default)]
    pub relations: Vec<Relation>,
}

impl FiniteStructure {
    /// A structure on `n` elements named `0..n` with empty signature.
    pub fn new(n: usize) -> Self {
        FiniteStructure {
            universe: (0..n).map(|i| i.to_string()).collect(),
            functions: Vec::new(),
            relations: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    pub fn add_relation<I>(&mut self, name: &str, arity: usize, tuples: I) -> &mut Self
    where
        I: IntoIterator<Item = Vec<usize>>,
    {
        self.relations.push(Relation {
            name: name.to_string(),
            arity,
            tuples: tuples.into_iter().collect(),
        });
        self
    }

    pub fn add_function(&mut self, name: &str, arity: usize, table: Vec<usize>) -> &mut Self {
        self.functions.push(Function { name: name.to_string(), arity, table });
        self
    }

    /// Checks carrier nonemptiness and that every table matches its arity.
    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        if n == 0 {
            return Err(Error::InvalidStructure("empty universe".into()));
        }
        for f in &self.functions {
            let expected = n.checked_pow(f.arity as u32).ok_or_else(|| {
                Error::InvalidStructure(format!("function {} table too large", f.name))
            })?;
            if f.table.len() != expected {
                return Err(Error::InvalidStructure(format!(
                    "function {} has {} entries, expected {expected}",
                    f.name,
                    f.table.len()
                )));
            }
            if let Some(v) = f.table.iter().find(|&&v| v >= n) {
                return Err(Error::InvalidStructure(format!("function {} maps to {v}", f.name)));
            }
        }
        for r in &self.relations {
            for t in &r.tuples {
                if t.len() != r.arity || t.iter().any(|&x| x >= n) {
                    return Err(Error::InvalidStructure(format!(
                        "relation {} has bad tuple {t:?}",
                        r.name
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn apply(&self, f: usize, args: &[usize]) -> usize {
        let n = self.len();
        let idx = args.iter().fold(0, |acc, &a| acc * n + a);
        self.functions[f].table[idx]
    }

    pub fn holds(&self, r: usize, args: &[usize]) -> bool {
        self.relations[r].tuples.contains(args)
    }

    /// The copy obtained by sending element `i` to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> FiniteStructure {
        let n = self.len();
        let mut universe = vec![String::new(); n];
        for (i, name) in self.universe.iter().enumerate() {
            universe[perm[i]].clone_from(name);
        }
        let functions = self
            .functions
            .iter()
            .map(|f| {
                let mut table = vec![0; f.table.len()];
                for args in all_tuples(n, f.arity) {
                    let image: Vec<usize> = args.iter().map(|&a| perm[a]).collect();
                    let idx = image.iter().fold(0, |acc, &a| acc * n + a);
                    let src = args.iter().fold(0, |acc, &a| acc * n + a);
                    table[idx] = perm[f.table[src]];
                }
                Function { name: f.name.clone(), arity: f.arity, table }
            })
            .collect();
        let relations = self
            .relations
            .iter()
            .map(|r| Relation {
                name: r.name.clone(),
                arity: r.arity,
                tuples: r.tuples.iter().map(|t| t.iter().map(|&a| perm[a]).collect()).collect(),
            })
            .collect();
        FiniteStructure { universe, functions, relations }
    }

    /// Whether `map` is an isomorphism onto `other`, matching symbols by position.
    pub fn is_isomorphism(&self, other: &FiniteStructure, map: &[usize]) -> bool {
        let n = self.len();
        if other.len() != n
            || map.len() != n
            || self.functions.len() != other.functions.len()
            || self.relations.len() != other.relations.len()
        {
            return false;
        }
        let mut seen = vec![false; n];
        for &m in map {
            if m >= n || std::mem::replace(&mut seen[m], true) {
                return false;
            }
        }
        for (fi, (f, g)) in self.functions.iter().zip(&other.functions).enumerate() {
            if f.arity != g.arity {
                return false;
            }
            for args in all_tuples(n, f.arity) {
                let image: Vec<usize> = args.iter().map(|&a| map[a]).collect();
                if map[self.apply(fi, &args)] != other.apply(fi, &image) {
                    return false;
                }
            }
        }
        self.relations.iter().zip(&other.relations).all(|(r, s)| {
            r.arity == s.arity
                && r.tuples.len() == s.tuples.len()
                && r.tuples.iter().all(|t| s.tuples.contains(&t.iter().map(|&a| map[a]).collect::<Vec<_>>()))
        })
    }

    /// Searches for an isomorphism onto `other` by brute force over
    /// permutations; intended for small carriers.
    pub fn find_isomorphism(&self, other: &FiniteStructure) -> Option<Vec<usize>> {
        let n = self.len();
        if other.len() != n {
            return None;
        }
        let mut perm: Vec<usize> = (0..n).collect();
        let mut c = vec![0usize; n];
        if self.is_isomorphism(other, &perm) {
            return Some(perm);
        }
        // Heap's algorithm.
        let mut i = 0;
        while i < n {
            if c[i] < i {
                if i % 2 == 0 {
                    perm.swap(0, i);
                } else {
                    perm.swap(c[i], i);
                }
                if self.is_isomorphism(other, &perm) {
                    return Some(perm);
                }
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        None
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let st: FiniteStructure = serde_json::from_str(s)?;
        st.validate()?;
        Ok(st)
    }
}

/// All tuples over `0..n` of length `k`, in lexicographic order.
pub fn all_tuples(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n.checked_pow(k as u32).unwrap_or(usize::MAX);
    (0..total).map(move |mut idx| {
        let mut t = vec![0; k];
        for slot in t.iter_mut().rev() {
            *slot = idx % n;
            idx /= n;
        }
        t
    })
}

/// The `n`-element linear order `0 < 1 < ... < n-1`.
pub fn linear_order(n: usize) -> FiniteStructure {
    let mut s = FiniteStructure::new(n);
    s.add_relation("lt", 2, (0..n).flat_map(|i| (i + 1..n).map(move |j| vec![i, j])));
    s
}
