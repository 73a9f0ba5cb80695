use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use scott_core::backforth::{tuple_ranks, Analyzer};
use scott_core::coding::{decode, encode, verify_star, DistinguishingPair, StarStructure};
use scott_core::morozov::{build_structure_capped, GroupElement, DEFAULT_UNIVERSE_CAP};
use scott_core::notation::{fundamental_seq, notation_from_ordinal, Notation};
use scott_core::ordinal::Ordinal;
use scott_core::rankgame::{rank_criterion, GameOutcome, GameReferee};
use scott_core::structure::FiniteStructure;
use scott_core::thintree::{build_thin_tree, check_thin};
use scott_core::tree::{canonical_ranked_tree, to_dot, tree_rank, ExplorationBudget, Rank, Tree, TreeJson};
use scott_core::verify::{run_suite, Status, Suite, VerifyOptions};

#[derive(Parser)]
#[command(name = "scott", version, about = "Back-and-forth relations, Scott rank and tree constructions")]
struct Cli {
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ordinal arithmetic below epsilon_0.
    #[command(subcommand)]
    Ordinal(OrdinalCmd),
    /// Staged thin-tree construction.
    #[command(subcommand)]
    Thin(ThinCmd),
    /// Structures built from trees.
    #[command(subcommand)]
    Morozov(MorozovCmd),
    /// Back-and-forth classification, Scott rank and rank games.
    #[command(subcommand)]
    Bf(BfCmd),
    /// Coding relational structures as graphs with orderings.
    #[command(subcommand)]
    Code(CodeCmd),
    /// Run a property suite, or `all`.
    Verify(VerifyArgs),
    /// Graphviz export.
    #[command(subcommand)]
    Export(ExportCmd),
}

#[derive(Subcommand)]
enum OrdinalCmd {
    /// Normalize an ordinal such as `w^2+w*3+1`.
    Eval {
        expr: String,
        /// Also list this many terms of the fundamental sequence.
        #[arg(long, default_value_t = 0)]
        fundamental: u64,
    },
}

#[derive(Args)]
struct ThinArgs {
    #[arg(long)]
    alpha: String,
    #[arg(long, default_value_t = 10)]
    stages: usize,
}

#[derive(Subcommand)]
enum ThinCmd {
    /// Run the construction, optionally writing the stage trace and a dot file.
    Build {
        #[command(flatten)]
        thin: ThinArgs,
        /// Write the stage trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the tree with its ranks as Graphviz.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Check the stage invariants and the order type of each level.
    Check {
        #[command(flatten)]
        thin: ThinArgs,
        #[arg(long, default_value_t = 5)]
        levels: usize,
    },
}

#[derive(Args)]
struct TreeSource {
    /// Tree JSON file.
    #[arg(long, conflicts_with_all = ["brackets", "rank"])]
    tree: Option<PathBuf>,
    /// Tree in bracket notation, e.g. `(()())`.
    #[arg(long, conflicts_with = "rank")]
    brackets: Option<String>,
    /// Canonical ranked tree with this root rank (`inf` for infinite).
    #[arg(long)]
    rank: Option<String>,
    #[arg(long, default_value_t = 6)]
    depth: usize,
    #[arg(long, default_value_t = 3)]
    width: usize,
}

impl TreeSource {
    fn load(&self) -> Result<Tree> {
        if let Some(path) = &self.tree {
            let json: TreeJson = serde_json::from_str(&read(path)?)?;
            return Ok(Tree::from_json(&json)?);
        }
        if let Some(b) = &self.brackets {
            return Ok(Tree::from_brackets(b)?);
        }
        if let Some(r) = &self.rank {
            let rank = parse_rank(r)?;
            return Ok(canonical_ranked_tree(&rank, ExplorationBudget::new(self.depth, self.width)));
        }
        bail!("one of --tree, --brackets or --rank is required")
    }
}

#[derive(Subcommand)]
enum MorozovCmd {
    /// Write the finite view of levels `0..=levels` as a structure.
    Build {
        #[command(flatten)]
        source: TreeSource,
        /// Highest level in the view; defaults to the tree height.
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_UNIVERSE_CAP)]
        cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum BfCmd {
    /// Partition tuples by each relation up to the orbit partition.
    Classify {
        #[arg(long = "struct")]
        structure: PathBuf,
        #[arg(long, default_value_t = 1)]
        length: usize,
    },
    /// Scott rank of a structure, from tuples up to the given length.
    ScottRank {
        #[arg(long = "struct")]
        structure: PathBuf,
        /// Longest tuple considered; defaults to the carrier size, at most 3.
        #[arg(long)]
        length: Option<usize>,
    },
    /// Replay the game for `a` against the identity of its level.
    Game {
        #[command(flatten)]
        source: TreeSource,
        /// Member node addresses, e.g. `0.2,3.0`.
        #[arg(long)]
        element: String,
        #[arg(long)]
        beta: usize,
    },
}

#[derive(Subcommand)]
enum CodeCmd {
    /// Code a relational structure as a sorted graph with orderings.
    Encode {
        #[arg(long = "struct")]
        structure: PathBuf,
        #[arg(long, default_value = "2,3")]
        pair: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover the relational structure from a coded graph.
    Decode {
        #[arg(long)]
        star: PathBuf,
        #[arg(long, default_value = "2,3")]
        pair: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the structural invariants of a coded graph.
    Verify {
        #[arg(long)]
        star: PathBuf,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// One of derived-rank, reduction, game, paths, thin, witnesses,
    /// coding, engine, orbits, or `all`.
    suite: String,
    #[arg(long, default_value_t = 8)]
    exhaustive_nodes: usize,
    #[arg(long, default_value_t = 500)]
    random_trees: usize,
    #[arg(long, default_value_t = 200)]
    random_structures: usize,
    /// Seconds per suite before it is reported as skipped.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Corrupt an encoded structure so the coding suite fails.
    #[arg(long)]
    inject_fault: bool,
}

#[derive(Subcommand)]
enum ExportCmd {
    /// A tree with node ranks, or a thin tree with its symbolic ranks.
    Dot {
        #[command(flatten)]
        source: TreeSource,
        #[arg(long, conflicts_with_all = ["tree", "brackets", "rank"])]
        alpha: Option<String>,
        #[arg(long, default_value_t = 10)]
        stages: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn parse_ordinal(s: &str) -> Result<Ordinal> {
    Ok(s.parse::<Ordinal>()?)
}

fn parse_rank(s: &str) -> Result<Rank> {
    if s == "inf" {
        Ok(Rank::Infinite)
    } else {
        Ok(Rank::Ordinal(parse_ordinal(s)?))
    }
}

fn load_structure(path: &Path) -> Result<FiniteStructure> {
    Ok(FiniteStructure::from_json_str(&read(path)?)?)
}

fn parse_element(tree: &Tree, spec: &str) -> Result<GroupElement> {
    let addresses: Vec<Vec<u64>> = spec
        .trim_matches(|c| c == '{' || c == '}')
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|a| a.split('.').map(str::parse).collect::<std::result::Result<Vec<u64>, _>>())
        .collect::<std::result::Result<_, _>>()
        .context("element members must be dot-separated addresses")?;
    let Some(level) = addresses.first().map(Vec::len) else {
        bail!("element needs at least one member");
    };
    let nodes = addresses
        .iter()
        .map(|a| tree.get(a).with_context(|| format!("no node at {a:?}")))
        .collect::<Result<Vec<_>>>()?;
    Ok(GroupElement::from_nodes(tree, level, nodes)?)
}

/// Exit code 1 signals a failed verification.
struct Failed;

fn run(cli: Cli) -> Result<std::result::Result<(), Failed>> {
    match cli.command {
        Command::Ordinal(OrdinalCmd::Eval { expr, fundamental }) => {
            let a = parse_ordinal(&expr)?;
            let kind = if a.is_zero() {
                "zero"
            } else if a.is_successor() {
                "successor"
            } else {
                "limit"
            };
            let seq: Vec<String> = if a.is_limit() {
                let nota = notation_from_ordinal(&a);
                (0..fundamental)
                    .map(|n| fundamental_seq(&nota, n).map(|b| scott_core::notation::notation_value(&b).to_string()))
                    .collect::<scott_core::Result<_>>()?
            } else {
                Vec::new()
            };
            if cli.json {
                println!("{}", json!({"ordinal": a.to_string(), "kind": kind, "fundamental": seq}));
            } else {
                println!("{a} ({kind})");
                if !seq.is_empty() {
                    println!("fundamental sequence: {}", seq.join(", "));
                }
            }
        }
        Command::Thin(ThinCmd::Build { thin, trace, dot }) => {
            let alpha = parse_ordinal(&thin.alpha)?;
            let b = build_thin_tree(&notation_from_ordinal(&alpha), thin.stages);
            b.check_invariants()?;
            if let Some(p) = &trace {
                emit(Some(p), &serde_json::to_string_pretty(&b.trace())?)?;
            }
            if let Some(p) = &dot {
                let ranks: Vec<String> = b.symbolic_ranks()?.iter().map(ToString::to_string).collect();
                emit(Some(p), &to_dot(b.tree(), Some(&ranks)))?;
            }
            let summary = json!({
                "alpha": alpha.to_string(),
                "stages": thin.stages,
                "nodes": b.tree().len(),
                "height": b.tree().height(),
                "expansions": b.expansions().len(),
            });
            if cli.json {
                println!("{summary}");
            } else {
                println!(
                    "thin tree for {alpha}: {} stages, {} nodes, height {}, {} expansions",
                    thin.stages,
                    b.tree().len(),
                    b.tree().height(),
                    b.expansions().len()
                );
            }
        }
        Command::Thin(ThinCmd::Check { thin, levels }) => {
            let alpha = parse_ordinal(&thin.alpha)?;
            let b = build_thin_tree(&notation_from_ordinal(&alpha), thin.stages);
            let invariants = b.check_invariants().err().map(|e| e.to_string());
            let ranks = b.symbolic_ranks()?;
            let report = check_thin(&b, levels)?;
            let root_ok = ranks[0] >= alpha;
            let passed = invariants.is_none() && report.passed() && root_ok;
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "passed": passed,
                        "invariants": invariants,
                        "root_rank": ranks[0].to_string(),
                        "levels": report.levels,
                        "violations": report.violations,
                    })
                );
            } else {
                println!("invariants: {}", invariants.as_deref().unwrap_or("ok"));
                println!("root rank {} (alpha {alpha})", ranks[0]);
                for l in &report.levels {
                    println!("level {}: order type {}, ranks below {}", l.level, l.order_type, l.bound);
                }
                for v in &report.violations {
                    println!("violation: {v}");
                }
            }
            if !passed {
                return Ok(Err(Failed));
            }
        }
        Command::Morozov(MorozovCmd::Build { source, levels, cap, out }) => {
            let tree = source.load()?;
            let bound = levels.unwrap_or(tree.height());
            let m = build_structure_capped(&tree, bound, cap)?;
            let s = m.to_finite_structure();
            emit(out.as_ref(), &serde_json::to_string(&s)?)?;
            if out.is_some() && !cli.json {
                println!("{} elements on levels 0..={bound}", m.len());
            }
        }
        Command::Bf(BfCmd::Classify { structure, length }) => {
            let s = load_structure(&structure)?;
            let mut an = Analyzer::new(&s)?;
            let c = an.classify(length)?;
            if cli.json {
                let ranks = tuple_ranks(&c);
                println!(
                    "{}",
                    json!({"classification": c, "tuple_ranks": ranks, "automorphisms": an.automorphisms().len()})
                );
            } else {
                println!("{} tuples, {} automorphisms, orbits reached at {}", c.tuples.len(), an.automorphisms().len(), c.beta_star);
                for (beta, classes) in c.classes.iter().enumerate() {
                    let count = classes.iter().max().map_or(0, |m| m + 1);
                    println!("beta {beta}: {count} classes");
                }
            }
        }
        Command::Bf(BfCmd::ScottRank { structure, length }) => {
            let s = load_structure(&structure)?;
            let length = length.unwrap_or(s.len().min(3));
            let sr = Analyzer::new(&s)?.scott_rank_structure(length)?;
            if cli.json {
                println!("{}", json!({"scott_rank": sr, "length_bound": length}));
            } else {
                println!("{sr}");
            }
        }
        Command::Bf(BfCmd::Game { source, element, beta }) => {
            let tree = source.load()?;
            let a = parse_element(&tree, &element)?;
            let pools = scott_core::rankgame::default_pools(&tree, a.level + 1, a.level + beta + 2);
            let ranks: Vec<Rank> = tree
                .nodes()
                .iter()
                .map(|n| n.anchor.clone())
                .collect::<Option<Vec<_>>>()
                .unwrap_or_else(|| tree_rank(&tree).into_iter().map(Rank::finite).collect());
            let criterion = rank_criterion(&a, &Ordinal::from(beta as u64), &ranks);
            let outcome = GameReferee::new(&tree, ranks, pools).check(&a, beta);
            if cli.json {
                println!("{}", json!({"element": a.display(&tree).to_string(), "beta": beta, "criterion": criterion, "game": outcome}));
            } else {
                println!("rank criterion for {} at {beta}: {criterion}", a.display(&tree));
                println!("game: {outcome:?}");
            }
            if matches!(outcome, GameOutcome::Counterexample { .. }) {
                return Ok(Err(Failed));
            }
        }
        Command::Code(CodeCmd::Encode { structure, pair, out }) => {
            let a = load_structure(&structure)?;
            let pair: DistinguishingPair = pair.parse()?;
            let star = encode(&a, pair)?;
            emit(out.as_ref(), &serde_json::to_string(&star)?)?;
        }
        Command::Code(CodeCmd::Decode { star, pair, out }) => {
            let star = StarStructure::from_json_str(&read(&star)?)?;
            let pair: DistinguishingPair = pair.parse()?;
            match decode(&star, pair) {
                Ok(a) => emit(out.as_ref(), &serde_json::to_string(&a)?)?,
                Err(e @ scott_core::Error::Invariant { .. }) => {
                    eprintln!("{e}");
                    return Ok(Err(Failed));
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::Code(CodeCmd::Verify { star }) => {
            let star = StarStructure::from_json_str(&read(&star)?)?;
            let report = verify_star(&star);
            if cli.json {
                println!("{}", serde_json::to_string(&report)?);
            } else {
                for c in &report.checks {
                    println!("[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.invariant, c.detail);
                }
            }
            if !report.passed() {
                return Ok(Err(Failed));
            }
        }
        Command::Verify(args) => {
            let suites: Vec<Suite> = if args.suite == "all" { Suite::ALL.to_vec() } else { vec![args.suite.parse()?] };
            let opts = VerifyOptions {
                seed: cli.seed,
                time_limit: args.time_limit.map(Duration::from_secs_f64),
                exhaustive_nodes: args.exhaustive_nodes,
                random_trees: args.random_trees,
                random_structures: args.random_structures,
                inject_fault: args.inject_fault,
            };
            let reports: Vec<_> = suites.iter().map(|&s| run_suite(s, &opts)).collect();
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&reports)?);
            } else {
                for r in &reports {
                    println!("{}", r.summary_line());
                    for note in &r.notes {
                        println!("    {note}");
                    }
                }
            }
            if reports.iter().any(|r| r.status == Status::Fail) {
                return Ok(Err(Failed));
            }
        }
        Command::Export(ExportCmd::Dot { source, alpha, stages, out }) => {
            let dot = if let Some(alpha) = alpha {
                let nota: Notation = notation_from_ordinal(&parse_ordinal(&alpha)?);
                let b = build_thin_tree(&nota, stages);
                let ranks: Vec<String> = b.symbolic_ranks()?.iter().map(ToString::to_string).collect();
                to_dot(b.tree(), Some(&ranks))
            } else {
                let tree = source.load()?;
                let ranks: Vec<String> = match tree.nodes().iter().map(|n| n.anchor.clone()).collect::<Option<Vec<_>>>() {
                    Some(r) => r.iter().map(ToString::to_string).collect(),
                    None => tree_rank(&tree).iter().map(ToString::to_string).collect(),
                };
                to_dot(&tree, Some(&ranks))
            };
            emit(out.as_ref(), &dot)?;
        }
    }
    Ok(Ok(()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Failed)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
