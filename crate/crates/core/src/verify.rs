//! Property suites over generated instances, each with its own runtime
//! limit. Used by the `verify` command and the acceptance tests.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::backforth::{combinations_up_to, Analyzer};
use crate::coding::{decode, encode, random_relational, verify_star, DistinguishingPair, Sort};
use crate::error::{Error, Result};
use crate::morozov::{
    automorphism_to_path, build_structure_capped, commutes_with_operations, derived_rank, g_tree_ranks,
    path_to_automorphism, GroupElement, MorozovStructure,
};
use crate::notation::{notation_from_ordinal, notation_value};
use crate::ordinal::Ordinal;
use crate::rankgame::{bounded_game_check, default_pools, orbit_formula_check, rank_criterion, reduction_check, GameOutcome};
use crate::structure::{all_tuples, linear_order, FiniteStructure};
use crate::thintree::{build_thin_tree, check_thin};
use crate::tree::{
    canonical_ranked_tree, enumerate_trees, find_path, random_tree, tree_rank, ExplorationBudget, Rank, Tree,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    DerivedRank,
    Reduction,
    Game,
    Paths,
    Thin,
    Witnesses,
    Coding,
    Engine,
    Orbits,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::DerivedRank,
        Suite::Reduction,
        Suite::Game,
        Suite::Paths,
        Suite::Thin,
        Suite::Witnesses,
        Suite::Coding,
        Suite::Engine,
        Suite::Orbits,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::DerivedRank => "derived-rank",
            Suite::Reduction => "reduction",
            Suite::Game => "game",
            Suite::Paths => "paths",
            Suite::Thin => "thin",
            Suite::Witnesses => "witnesses",
            Suite::Coding => "coding",
            Suite::Engine => "engine",
            Suite::Orbits => "orbits",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Suite::DerivedRank => "element rank equals the least member rank",
            Suite::Reduction => "tuples reduce to identities, with equal tuple ranks",
            Suite::Game => "game replay agrees with the rank criterion",
            Suite::Paths => "paths and automorphisms round trip",
            Suite::Thin => "thin-tree stages, rank sandwich and level order types",
            Suite::Witnesses => "high-rank elements outside the identity orbit",
            Suite::Coding => "encode and decode round trip",
            Suite::Engine => "back-and-forth engine against a naive oracle",
            Suite::Orbits => "orbits are translates of identity orbits",
        }
    }

    /// The runtime the suite must finish within.
    pub fn limit(self) -> Duration {
        match self {
            Suite::Reduction | Suite::Game | Suite::Thin => Duration::from_secs(120),
            _ => Duration::from_secs(60),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Suites still running at this point are reported as skipped.
    pub time_limit: Option<Duration>,
    pub exhaustive_nodes: usize,
    pub random_trees: usize,
    pub random_structures: usize,
    /// Corrupts one encoded structure so the coding suite must fail.
    pub inject_fault: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 0,
            time_limit: None,
            exhaustive_nodes: 8,
            random_trees: 500,
            random_structures: 200,
            inject_fault: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub description: &'static str,
    pub status: Status,
    pub checked: usize,
    pub failure_count: usize,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn summary_line(&self) -> String {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        };
        let mut line = format!(
            "[{tag}] {}: {} ({} checks, {:.1}s, limit {}s)",
            self.suite,
            self.description,
            self.checked,
            self.elapsed.as_secs_f64(),
            self.suite.limit().as_secs()
        );
        if let Some(f) = self.failures.first() {
            line.push_str(&format!("; first failure: {f}"));
        }
        line
    }
}

const KEPT_FAILURES: usize = 20;

struct Ctx {
    deadline: Option<Instant>,
    checked: usize,
    failure_count: usize,
    failures: Vec<String>,
    notes: Vec<String>,
    expired: bool,
}

impl Ctx {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.fail(msg());
        }
    }

    fn fail(&mut self, msg: String) {
        self.failure_count += 1;
        if self.failures.len() < KEPT_FAILURES {
            self.failures.push(msg);
        }
    }

    fn out_of_time(&mut self) -> bool {
        if self.deadline.is_some_and(|d| Instant::now() > d) {
            self.expired = true;
        }
        self.expired
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> SuiteReport {
    let start = Instant::now();
    let mut ctx = Ctx {
        deadline: opts.time_limit.map(|t| start + t),
        checked: 0,
        failure_count: 0,
        failures: Vec::new(),
        notes: Vec::new(),
        expired: false,
    };
    let result = match suite {
        Suite::DerivedRank => derived_rank_suite(&mut ctx, opts),
        Suite::Reduction => reduction_suite(&mut ctx),
        Suite::Game => game_suite(&mut ctx),
        Suite::Paths => paths_suite(&mut ctx),
        Suite::Thin => thin_suite(&mut ctx),
        Suite::Witnesses => witnesses_suite(&mut ctx),
        Suite::Coding => coding_suite(&mut ctx, opts),
        Suite::Engine => engine_suite(&mut ctx, opts),
        Suite::Orbits => orbits_suite(&mut ctx),
    };
    if let Err(e) = result {
        ctx.fail(format!("error: {e}"));
    }
    let elapsed = start.elapsed();
    if elapsed > suite.limit() {
        ctx.fail(format!("took {:.1}s, limit {}s", elapsed.as_secs_f64(), suite.limit().as_secs()));
    }
    let status = if ctx.failure_count > 0 {
        Status::Fail
    } else if ctx.expired {
        ctx.notes.push(format!("time limit reached after {} checks", ctx.checked));
        Status::Skipped
    } else {
        Status::Pass
    };
    SuiteReport {
        suite,
        description: suite.description(),
        status,
        checked: ctx.checked,
        failure_count: ctx.failure_count,
        failures: ctx.failures,
        notes: ctx.notes,
        elapsed,
    }
}

pub fn run_all(opts: &VerifyOptions) -> Vec<SuiteReport> {
    Suite::ALL.iter().map(|&s| run_suite(s, opts)).collect()
}

fn derived_rank_suite(ctx: &mut Ctx, opts: &VerifyOptions) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut trees = enumerate_trees(opts.exhaustive_nodes, 3);
    let exhaustive = trees.len();
    trees.extend((0..opts.random_trees).map(|_| random_tree(&mut rng, 4, 3, 10)));
    ctx.notes.push(format!("{exhaustive} enumerated and {} random trees", opts.random_trees));
    for t in &trees {
        if ctx.out_of_time() {
            break;
        }
        let ranks = tree_rank(t);
        let brute = g_tree_ranks(t, 1 << 16)?;
        for (a, &r) in &brute {
            if a.is_identity() {
                continue;
            }
            let d = derived_rank(a, &ranks)?;
            ctx.check(d == r, || format!("{}: derived {d}, brute force {r}", a.display(t)));
        }
    }
    Ok(())
}

/// Views of at most 64 elements over small trees, in both the rigid and
/// the top-truncated form.
fn small_views() -> Vec<MorozovStructure> {
    let mut views = Vec::new();
    for t in enumerate_trees(6, 3) {
        for bound in [t.height(), t.height() + 1] {
            if let Ok(m) = build_structure_capped(&t, bound, 64) {
                views.push(m);
            }
        }
    }
    views
}

fn reduction_suite(ctx: &mut Ctx) -> Result<()> {
    let views = small_views();
    ctx.notes.push(format!("{} views", views.len()));
    for m in &views {
        if ctx.out_of_time() {
            break;
        }
        let s = m.to_finite_structure();
        let mut an = Analyzer::new(&s)?;
        let r = reduction_check(m, &mut an, 2)?;
        ctx.checked += r.comparisons;
        for d in r.disagreements.iter().chain(&r.rank_mismatches) {
            ctx.fail(format!("view of {} elements: {d}", m.len()));
        }
    }
    Ok(())
}

fn game_anchors() -> Vec<Ordinal> {
    ["0", "1", "2", "3", "w", "w+1", "w*2", "w*3"].iter().map(|s| s.parse().expect("valid ordinal")).collect()
}

fn game_suite(ctx: &mut Ctx) -> Result<()> {
    let mut total = 0usize;
    let mut inconclusive = 0usize;
    for rho in game_anchors() {
        let t = canonical_ranked_tree(&Rank::Ordinal(rho.clone()), ExplorationBudget::new(12, 4));
        let pools = default_pools(&t, 1, 2);
        for level in 1..=2 {
            for a in pools.get(level).iter().filter(|a| !a.is_identity()) {
                for beta in 0..=3 {
                    if ctx.out_of_time() {
                        return Ok(());
                    }
                    let out = bounded_game_check(&t, a, beta).ok_or(Error::InvalidTree("missing anchors".into()))?;
                    total += 1;
                    let name = || format!("{} in the tree of rank {rho}, beta {beta}", a.display(&t));
                    match out {
                        GameOutcome::Consistent { verdict: false, detail } => {
                            ctx.check(detail.starts_with("challenge"), || format!("{}: uncertified failure", name()))
                        }
                        GameOutcome::Consistent { verdict: true, .. } => ctx.checked += 1,
                        GameOutcome::Counterexample { detail } => ctx.fail(format!("{}: {detail}", name())),
                        GameOutcome::Inconclusive { .. } => inconclusive += 1,
                    }
                }
            }
        }
    }
    ctx.notes.push(format!("{inconclusive} of {total} replays inconclusive"));
    ctx.check(inconclusive * 20 < total.max(1), || format!("{inconclusive} of {total} replays inconclusive"));
    Ok(())
}

fn paths_suite(ctx: &mut Ctx) -> Result<()> {
    const DEPTH: usize = 6;
    let mut chosen = None;
    for width in (2..=8).rev() {
        let t = canonical_ranked_tree(&Rank::Infinite, ExplorationBudget::new(DEPTH, width));
        if let Ok(m) = build_structure_capped(&t, DEPTH, 4096) {
            chosen = Some((width, m));
            break;
        }
    }
    let (width, m) = chosen.ok_or(Error::CapExceeded { what: "view", size: 0, cap: 4096 })?;
    ctx.notes.push(format!("width {width}, {} elements", m.len()));
    let t = m.tree();
    let path = find_path(t, DEPTH + 1).ok_or_else(|| Error::NotAPath("no infinite branch".into()))?;
    let g = path_to_automorphism(t, &path)?.to_permutation(&m)?;
    ctx.check(commutes_with_operations(&m, &g), || "shift along the infinite branch does not commute".into());
    for depth in 1..=DEPTH {
        let back = automorphism_to_path(&m, &g, depth)?;
        let prefix = &path[..=depth];
        ctx.check(back == prefix, || format!("recovered {back:?}, expected {prefix:?}"));
        ctx.check(back.iter().all(|&n| t.node(n).anchor == Some(Rank::Infinite)), || {
            format!("recovered path {back:?} leaves the infinite nodes")
        });
    }
    Ok(())
}

fn thin_alphas() -> Vec<Ordinal> {
    ["w", "w*2", "w^2", "w^2+w*3"].iter().map(|s| s.parse().expect("valid ordinal")).collect()
}

fn thin_suite(ctx: &mut Ctx) -> Result<()> {
    const STAGES: usize = 40;
    for alpha in thin_alphas() {
        let mut b = crate::thintree::ThinBuild::new(&notation_from_ordinal(&alpha));
        for stage in 1..=STAGES {
            if ctx.out_of_time() {
                return Ok(());
            }
            b.step();
            let inv = b.check_invariants();
            ctx.check(inv.is_ok(), || format!("{alpha}, stage {stage}: {}", inv.unwrap_err()));
            if stage % 10 != 0 {
                continue;
            }
            let ranks = b.symbolic_ranks()?;
            ctx.check(ranks[0] >= alpha, || format!("{alpha}, stage {stage}: root rank {} below", ranks[0]));
            for l in b.labeled() {
                let v = notation_value(&l.label);
                let r = &ranks[l.image];
                let ok = &v <= r && r.differs_finitely(&v);
                ctx.check(ok, || format!("{alpha}, stage {stage}: label {v} but rank {r} at {:?}", l.address));
            }
        }
        let report = check_thin(&b, 10)?;
        ctx.checked += report.levels.len();
        for v in &report.violations {
            ctx.fail(format!("{alpha}: {v}"));
        }
    }
    Ok(())
}

fn witnesses_suite(ctx: &mut Ctx) -> Result<()> {
    let alpha: Ordinal = "w^2".parse().expect("valid ordinal");
    let b = build_thin_tree(&notation_from_ordinal(&alpha), 8);
    let tree = b.tree();
    let ranks = b.symbolic_ranks()?;
    for beta in 1..=3u64 {
        let target = Ordinal::omega() * Ordinal::from(beta);
        let Some(t) = (1..tree.len()).filter(|&n| ranks[n] >= target).min_by_key(|&n| (tree.level(n), n)) else {
            ctx.fail(format!("no node of rank at least {target}"));
            continue;
        };
        let n = tree.level(t);
        let view_tree = truncate(tree, n + 1)?;
        let view_ranks: Vec<Rank> = view_tree
            .nodes()
            .iter()
            .map(|v| Rank::Ordinal(ranks[tree.get(&v.address).expect("same addresses")].clone()))
            .collect();
        let m = build_structure_capped(&view_tree, view_tree.height() + 1, 4096)?;
        let a_el = GroupElement::singleton(&view_tree, view_tree.get(&tree.node(t).address).expect("kept"));
        let a = m.index_of(&a_el).expect("in view");
        let s = m.to_finite_structure();
        let an = Analyzer::new(&s)?;
        let in_orbit = an.orbit(&[m.identity(n)]).contains(&vec![a]);
        ctx.check(!in_orbit, || format!("beta {beta}: {} is in the orbit of id{n}", m.name(a)));
        ctx.check(rank_criterion(&a_el, &Ordinal::from(beta), &view_ranks), || {
            format!("beta {beta}: rank criterion fails for {}", m.name(a))
        });
        ctx.notes.push(format!("beta {beta}: {} at level {n} with rank {}", m.name(a), ranks[t]));
    }
    Ok(())
}

/// The subtree of nodes at level at most `depth`.
fn truncate(tree: &Tree, depth: usize) -> Result<Tree> {
    Tree::from_addresses(tree.nodes().iter().filter(|n| n.level() <= depth).map(|n| n.address.clone()))
}

fn coding_suite(ctx: &mut Ctx, opts: &VerifyOptions) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let pair = DistinguishingPair::default();
    for i in 0..opts.random_structures {
        if ctx.out_of_time() {
            break;
        }
        let a = random_relational(&mut rng, 5, 3, 2);
        let mut star = encode(&a, pair)?;
        if opts.inject_fault && i == 0 {
            corrupt(&mut star);
        }
        let report = verify_star(&star);
        ctx.check(report.passed(), || {
            let f = report.first_failure().expect("failed");
            format!("structure {i}: invariant `{}` violated: {}", f.invariant, f.detail)
        });
        if !report.passed() {
            continue;
        }
        let back = decode(&star, pair)?;
        ctx.check(a.find_isomorphism(&back).is_some(), || format!("structure {i}: decoded copy not isomorphic"));
        let mut perm: Vec<usize> = (0..star.len()).collect();
        perm.shuffle(&mut rng);
        let back = decode(&star.permuted(&perm), pair)?;
        ctx.check(a.find_isomorphism(&back).is_some(), || {
            format!("structure {i}: decoded relabelled copy not isomorphic")
        });
    }
    Ok(())
}

/// Drops the edge from the first `U` node to its `A` node.
fn corrupt(star: &mut crate::coding::StarStructure) {
    let edge = star
        .edges
        .iter()
        .copied()
        .find(|&(x, y)| (star.sorts[x], star.sorts[y]) == (Sort::A, Sort::U));
    if let Some(e) = edge {
        star.edges.remove(&e);
    }
}

/// `≡^β` classes of all tuples of length at most `max_len`, computed
/// directly from the quantifier clauses: `ā ≡^0 b̄` when they satisfy the
/// same atomic formulas, and `ā ≡^(β+1) b̄` when they are `≡^β` and every
/// one-element extension of either side matches some extension of the
/// other. Entries for tuples of length `l` are exact up to `β = max_len - l`.
/// Relational structures only.
pub struct NaiveClasses {
    pub tuples: Vec<Vec<usize>>,
    pub classes: Vec<Vec<usize>>,
}

pub fn naive_classes(s: &FiniteStructure, max_len: usize, max_beta: usize) -> NaiveClasses {
    let n = s.len();
    let tuples: Vec<Vec<usize>> = (0..=max_len).flat_map(|l| all_tuples(n, l)).collect();
    let index: HashMap<&[usize], usize> = tuples.iter().enumerate().map(|(i, t)| (t.as_slice(), i)).collect();
    let atomic = |t: &[usize]| {
        let mut facts = Vec::new();
        for i in 0..t.len() {
            for j in 0..t.len() {
                facts.push(t[i] == t[j]);
            }
        }
        for (r, rel) in s.relations.iter().enumerate() {
            for pos in all_tuples(t.len(), rel.arity) {
                let args: Vec<usize> = pos.iter().map(|&p| t[p]).collect();
                facts.push(s.holds(r, &args));
            }
        }
        (t.len(), facts)
    };
    let mut classes = vec![number(tuples.iter().map(|t| atomic(t)).collect())];
    for beta in 0..max_beta {
        let prev = &classes[beta];
        let sigs: Vec<(usize, BTreeSet<usize>)> = tuples
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let ext = if t.len() < max_len {
                    (0..n)
                        .map(|c| {
                            let mut u = t.clone();
                            u.push(c);
                            prev[index[u.as_slice()]]
                        })
                        .collect()
                } else {
                    BTreeSet::new()
                };
                (prev[i], ext)
            })
            .collect();
        classes.push(number(sigs));
    }
    NaiveClasses { tuples, classes }
}

fn number<K: Ord + Clone>(keys: Vec<K>) -> Vec<usize> {
    let mut ids = std::collections::BTreeMap::new();
    keys.into_iter()
        .map(|k| {
            let next = ids.len();
            *ids.entry(k).or_insert(next)
        })
        .collect()
}

/// All automorphisms by trying every permutation.
pub fn naive_automorphisms(s: &FiniteStructure) -> Vec<Vec<usize>> {
    let n = s.len();
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    permute(&mut perm, 0, &mut |p| {
        if s.is_isomorphism(s, p) {
            out.push(p.to_vec());
        }
    });
    out
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}

/// Tuple ranks from the naive classes: the least `β` at which the class
/// of the tuple lies inside its orbit, or `None` if that is above `exact`.
pub fn naive_tuple_rank(nc: &NaiveClasses, auts: &[Vec<usize>], a: &[usize], exact: usize) -> Option<usize> {
    let i = nc.tuples.iter().position(|t| t == a)?;
    let orbit: BTreeSet<Vec<usize>> = auts.iter().map(|g| a.iter().map(|&x| g[x]).collect()).collect();
    (0..=exact).find(|&beta| {
        nc.tuples
            .iter()
            .enumerate()
            .all(|(j, t)| t.len() != a.len() || nc.classes[beta][j] != nc.classes[beta][i] || orbit.contains(t))
    })
}

fn engine_suite(ctx: &mut Ctx, opts: &VerifyOptions) -> Result<()> {
    let two = linear_order(2);
    let sr = Analyzer::new(&two)?.scott_rank_structure(2)?;
    ctx.check(sr == 2, || format!("two-element order has rank {sr}"));
    let one = FiniteStructure::new(1);
    let sr = Analyzer::new(&one)?.scott_rank_structure(1)?;
    ctx.check(sr == 1, || format!("one-element structure has rank {sr}"));

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed);
    let mut structures: Vec<FiniteStructure> = (1..=5).map(linear_order).collect();
    structures.push(one);
    structures.extend((0..40).map(|_| random_relational(&mut rng, 5, 3, 2)));
    const MAX_LEN: usize = 5;
    for s in &structures {
        if ctx.out_of_time() {
            break;
        }
        let max_len = MAX_LEN.min(s.len() + 2);
        let nc = naive_classes(s, max_len, 3);
        let auts = naive_automorphisms(s);
        let mut an = Analyzer::new(s)?;
        for (i, a) in nc.tuples.iter().enumerate().filter(|(_, t)| !t.is_empty() && t.len() <= 2) {
            for (j, b) in nc.tuples.iter().enumerate().filter(|(_, t)| t.len() == a.len()) {
                for beta in 0..=(max_len - a.len()).min(3) {
                    let naive = nc.classes[beta][i] == nc.classes[beta][j];
                    let fast = an.equivalent(beta, a, b);
                    ctx.check(naive == fast, || format!("{a:?} vs {b:?} at {beta}: naive {naive}, engine {fast}"));
                }
            }
        }
        let mut sr_naive = Some(1);
        for t in combinations_up_to(s.len(), 2) {
            let fast = an.scott_rank_tuple(&t)?;
            let exact = (max_len - t.len()).min(3);
            let naive = naive_tuple_rank(&nc, &auts, &t, exact);
            match naive {
                Some(r) => ctx.check(r == fast, || format!("rank of {t:?}: naive {r}, engine {fast}")),
                None => ctx.check(fast > exact, || format!("rank of {t:?}: naive above {exact}, engine {fast}")),
            }
            sr_naive = sr_naive.zip(naive).map(|(x, r)| x.max(r + 1));
        }
        if let Some(sr) = sr_naive {
            let fast = an.scott_rank_structure(2)?;
            ctx.check(sr == fast, || format!("structure rank: naive {sr}, engine {fast}"));
        }
    }
    Ok(())
}

fn orbits_suite(ctx: &mut Ctx) -> Result<()> {
    let views = small_views();
    for m in &views {
        if ctx.out_of_time() {
            break;
        }
        let s = m.to_finite_structure();
        let an = Analyzer::new(&s)?;
        ctx.checked += m.len();
        for f in orbit_formula_check(m, &an) {
            ctx.fail(f);
        }
    }
    Ok(())
}
