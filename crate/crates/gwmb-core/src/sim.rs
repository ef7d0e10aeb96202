//! Monte Carlo verification layer and exact small-scale game oracles.
//!
//! Everything here is an independent check on the analytic solvers: walk
//! simulations with auditable truncation bias, literal game play on lazily
//! revealed trees, the depth-iteration recursion for the full-information
//! regime, and an exhaustive minimax solver over enumerated small trees.
//!
//! Determinism contract: every trial derives its generator from the master
//! seed by stream splitting, so estimates are bit-identical regardless of
//! how trials are chunked across workers; range functions expose the
//! fan-out building blocks and their counts merge by summation.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analytic::{self, Regime, SolverConfig};
use crate::dist::{IncrementDistribution, OffspringDistribution};
use crate::numeric::wilson_interval;
use crate::{Error, Result};

/// Which player moves first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Starter {
    Breaker,
    Maker,
}

/// Numeric knobs for a simulation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameConfig {
    pub trials: u64,
    pub master_seed: u64,
    /// Walk level at which Maker is declared the winner.
    pub success_threshold: u32,
    /// Per-trial step cap; trials still open at the cap count as undecided.
    pub max_rounds: u64,
    /// Probability bound on declaring Maker the winner wrongly at the
    /// threshold, carried into every estimate.
    pub bias_bound: f64,
}

impl GameConfig {
    pub fn new(trials: u64, master_seed: u64, success_threshold: u32) -> Self {
        GameConfig {
            trials,
            master_seed,
            success_threshold,
            max_rounds: 10_000_000,
            bias_bound: 0.0,
        }
    }

    /// Configuration for absorption estimates of a walk whose largest
    /// characteristic root magnitude is `x_max`: the success threshold is
    /// the smallest level `M` with `2 x_max^M < 1e-6`, since the chance of
    /// absorption from level `M` is at most `x_max^M`.
    pub fn for_walk(x_max: f64, trials: u64, master_seed: u64) -> Self {
        let x = x_max.min(1.0 - 1e-9).max(0.0);
        let mut m: u32 = 1;
        let mut pow = x;
        while 2.0 * pow >= 1e-6 && m < 200_000 {
            pow *= x;
            m += 1;
        }
        GameConfig {
            trials,
            master_seed,
            success_threshold: m,
            max_rounds: 10_000_000,
            bias_bound: 2.0 * pow,
        }
    }
}

/// A Monte Carlo estimate with its Wilson 95% interval and the truncation
/// bias bound inherited from the configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimEstimate {
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub bias_bound: f64,
    pub seed: u64,
}

fn estimate_from_counts(successes: u64, cfg: &GameConfig) -> SimEstimate {
    let (p_hat, ci_lo, ci_hi) = wilson_interval(successes, cfg.trials);
    SimEstimate {
        trials: cfg.trials,
        successes,
        p_hat,
        ci_lo,
        ci_hi,
        bias_bound: cfg.bias_bound,
        seed: cfg.master_seed,
    }
}

/// Raw tallies from a range of walk trials.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WalkCounts {
    /// Trials absorbed at or below 0 (Breaker wins).
    pub successes: u64,
    /// Among the successes, trials that landed exactly on -1.
    pub hit_minus1: u64,
    /// Trials still open at the round cap.
    pub undecided: u64,
}

impl WalkCounts {
    pub fn merge(self, other: WalkCounts) -> WalkCounts {
        WalkCounts {
            successes: self.successes + other.successes,
            hit_minus1: self.hit_minus1 + other.hit_minus1,
            undecided: self.undecided + other.undecided,
        }
    }
}

fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// Run walk trials `lo..hi` (global indices) and tally outcomes; the
/// deterministic fan-out unit behind [`simulate_walk_hit`].
pub fn walk_hit_counts(
    inc: &IncrementDistribution,
    start: u32,
    cfg: &GameConfig,
    lo: u64,
    hi: u64,
) -> Result<WalkCounts> {
    if !(start == 1 || start == 2) {
        return Err(Error::InvalidParameter("walk start level must be 1 or 2".into()));
    }
    if inc.mean() <= 0.0 {
        return Err(Error::InvalidParameter(
            "threshold termination needs positive drift".into(),
        ));
    }
    let m = cfg.success_threshold as i64;
    let mut counts = WalkCounts::default();
    for trial in lo..hi {
        let mut rng = trial_rng(cfg.master_seed, trial);
        let mut s = start as i64;
        let mut open = true;
        for _ in 0..cfg.max_rounds {
            s += inc.sample(&mut rng);
            if s <= 0 {
                counts.successes += 1;
                if s == -1 {
                    counts.hit_minus1 += 1;
                }
                open = false;
                break;
            }
            if s >= m {
                open = false;
                break;
            }
        }
        if open {
            counts.undecided += 1;
        }
    }
    Ok(counts)
}

/// Estimate Breaker's winning probability from the embedded walk: each
/// trial runs the walk from level `start` (1 when Breaker begins, 2 when
/// Maker begins) until it leaves `(0, M)`.
pub fn simulate_walk_hit(
    inc: &IncrementDistribution,
    start: u32,
    cfg: &GameConfig,
) -> Result<SimEstimate> {
    let counts = walk_hit_counts(inc, start, cfg, 0, cfg.trials)?;
    if counts.undecided > 0 {
        return Err(Error::UndecidedTrials(counts.undecided));
    }
    Ok(estimate_from_counts(counts.successes, cfg))
}

/// Raw tallies from a range of game trials.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GameCounts {
    pub successes: u64,
    pub undecided: u64,
}

impl GameCounts {
    pub fn merge(self, other: GameCounts) -> GameCounts {
        GameCounts {
            successes: self.successes + other.successes,
            undecided: self.undecided + other.undecided,
        }
    }
}

/// Number of playable children revealed behind a fixated edge: all of them
/// in the no-information game, and in the size-information game only the
/// children with infinite progeny, resampled by rejection so that at least
/// one survives (every playable node is infinite-marked there).
fn reveal<R: Rng + ?Sized>(
    d: &OffspringDistribution,
    regime: Regime,
    q: f64,
    rng: &mut R,
) -> Result<u64> {
    match regime {
        Regime::NoInfo => Ok(d.sample(rng)),
        Regime::SizeInfo => {
            for _ in 0..1_000_000u32 {
                let k = d.sample(rng);
                let mut survivors = 0u64;
                for _ in 0..k {
                    if rng.gen::<f64>() < 1.0 - q {
                        survivors += 1;
                    }
                }
                if survivors >= 1 {
                    return Ok(survivors);
                }
            }
            Err(Error::IterationLimit { what: "size-conditioned reveal" })
        }
        Regime::FullInfo => Err(Error::InvalidParameter(
            "game simulation covers the no- and size-information regimes".into(),
        )),
    }
}

/// Run game trials `lo..hi`; `q` must be the extinction probability when
/// the regime is size-information (pass 0 otherwise). The deterministic
/// fan-out unit behind [`simulate_game`].
pub fn game_counts(
    d: &OffspringDistribution,
    regime: Regime,
    starter: Starter,
    cfg: &GameConfig,
    q: f64,
    lo: u64,
    hi: u64,
) -> Result<GameCounts> {
    let m = cfg.success_threshold as u64;
    let mut counts = GameCounts::default();
    for trial in lo..hi {
        let mut rng = trial_rng(cfg.master_seed, trial);
        // The root is revealed up front; its playable edges form the pool.
        let mut edges = reveal(d, regime, q, &mut rng)?;
        let mut turn = starter;
        let mut open = true;
        for _ in 0..cfg.max_rounds {
            if edges == 0 {
                // no playable edge at this turn: the fixated component is
                // complete and finite
                counts.successes += 1;
                open = false;
                break;
            }
            if edges >= m {
                open = false;
                break;
            }
            match turn {
                Starter::Breaker => {
                    edges -= 1;
                    turn = Starter::Maker;
                }
                Starter::Maker => {
                    edges -= 1;
                    edges += reveal(d, regime, q, &mut rng)?;
                    turn = Starter::Breaker;
                }
            }
        }
        if open {
            counts.undecided += 1;
        }
    }
    Ok(counts)
}

/// Play the literal game on lazily revealed trees and estimate Breaker's
/// winning probability.
///
/// All playable edges are exchangeable under totally random play, so the
/// multiset state reduces to its count; the count is exactly the embedded
/// walk, which the estimates must (and do, see the tests) agree with. In
/// the size-information regime trees are generated conditioned on
/// survival and the estimate is the conditional probability; neither
/// player ever plays into a finite-marked subtree, mirroring the symmetry
/// argument that makes such moves irrelevant.
pub fn simulate_game(
    d: &OffspringDistribution,
    regime: Regime,
    starter: Starter,
    cfg: &GameConfig,
) -> Result<SimEstimate> {
    let q = match regime {
        Regime::SizeInfo => {
            let q = analytic::extinction_q(d, &SolverConfig::default());
            if q >= 1.0 {
                return Err(Error::Domain(
                    "tree dies out almost surely; size conditioning undefined".into(),
                ));
            }
            q
        }
        _ => 0.0,
    };
    let counts = game_counts(d, regime, starter, cfg, q, 0, cfg.trials)?;
    if counts.undecided > 0 {
        return Err(Error::UndecidedTrials(counts.undecided));
    }
    Ok(estimate_from_counts(counts.successes, cfg))
}

/// Probability that the tree contains no complete binary tree of depth
/// `depth` rooted at the origin, by the exact recursion `p_0 = 0`,
/// `p_{d+1} = g(p_d) + (1 - p_d) g'(p_d)`.
///
/// Nondecreasing in `depth`; converges to the full-information probability.
pub fn depth_iterate_p(d: &OffspringDistribution, depth: u32) -> f64 {
    let mut p = 0.0;
    for _ in 0..depth {
        p = d.pgf_unchecked(p, 0) + (1.0 - p) * d.pgf_unchecked(p, 1);
    }
    p
}

fn rooted_binary_absent<R: Rng + ?Sized>(
    d: &OffspringDistribution,
    level: u32,
    rng: &mut R,
) -> bool {
    if level == 0 {
        return false;
    }
    let k = d.sample(rng);
    let mut found = 0u32;
    for _ in 0..k {
        if !rooted_binary_absent(d, level - 1, rng) {
            found += 1;
            if found == 2 {
                return false;
            }
        }
    }
    true
}

/// Count, over trials `lo..hi`, how many sampled trees do not contain a
/// complete binary tree of depth `depth` at the root. Fan-out unit behind
/// [`estimate_binary_subtree_prob`].
pub fn binary_subtree_miss_counts(
    d: &OffspringDistribution,
    depth: u32,
    cfg: &GameConfig,
    lo: u64,
    hi: u64,
) -> Result<u64> {
    if depth > 12 {
        return Err(Error::InvalidParameter(
            "binary-subtree sampling is limited to depth 12".into(),
        ));
    }
    let mut misses = 0u64;
    for trial in lo..hi {
        let mut rng = trial_rng(cfg.master_seed, trial);
        if rooted_binary_absent(d, depth, &mut rng) {
            misses += 1;
        }
    }
    Ok(misses)
}

/// Monte Carlo estimate of the non-containment probability that
/// [`depth_iterate_p`] computes exactly; sampling explores only as much of
/// each tree as the verdict needs.
pub fn estimate_binary_subtree_prob(
    d: &OffspringDistribution,
    depth: u32,
    cfg: &GameConfig,
) -> Result<SimEstimate> {
    let misses = binary_subtree_miss_counts(d, depth, cfg, 0, cfg.trials)?;
    Ok(estimate_from_counts(misses, cfg))
}

/// One node of a finite rooted tree arena.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub depth: u32,
}

/// Finite rooted tree in arena form; node 0 is the root and every node's
/// parent precedes it in the arena.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteTree {
    nodes: Vec<TreeNode>,
}

impl FiniteTree {
    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a tree always has its root
    }

    pub fn edge_count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn depth(&self) -> u32 {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// Parse a canonical parenthesis encoding: a node is `(` followed by
    /// its children's encodings and `)`.
    pub fn from_encoding(s: &str) -> Result<FiniteTree> {
        let mut nodes: Vec<TreeNode> = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        for c in s.chars() {
            match c {
                '(' => {
                    let parent = stack.last().copied();
                    let depth = parent.map(|p| nodes[p].depth + 1).unwrap_or(0);
                    let idx = nodes.len();
                    if let Some(p) = parent {
                        nodes[p].children.push(idx);
                    } else if idx > 0 {
                        return Err(Error::Parse("multiple roots in tree encoding".into()));
                    }
                    nodes.push(TreeNode { parent, children: Vec::new(), depth });
                    stack.push(idx);
                }
                ')' => {
                    if stack.pop().is_none() {
                        return Err(Error::Parse("unbalanced tree encoding".into()));
                    }
                }
                c if c.is_whitespace() => {}
                c => return Err(Error::Parse(format!("unexpected character {c:?} in tree encoding"))),
            }
        }
        if !stack.is_empty() {
            return Err(Error::Parse("unbalanced tree encoding".into()));
        }
        if nodes.is_empty() {
            return Err(Error::Parse("empty tree encoding".into()));
        }
        Ok(FiniteTree { nodes })
    }

    /// Canonical encoding: children encodings sorted lexicographically.
    pub fn encoding(&self) -> String {
        self.encode_node(0)
    }

    fn encode_node(&self, v: usize) -> String {
        let mut parts: Vec<String> =
            self.nodes[v].children.iter().map(|&c| self.encode_node(c)).collect();
        parts.sort();
        let mut out = String::from("(");
        for p in parts {
            out.push_str(&p);
        }
        out.push(')');
        out
    }

    /// Check arena consistency: root at 0, parents precede children, the
    /// parent/child lists agree, and depths increase by one per edge.
    pub fn validate(&self) -> Result<()> {
        let claim = |ok: bool, msg: &str| -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::Domain(format!("malformed tree: {msg}")))
            }
        };
        claim(self.nodes[0].parent.is_none(), "root has a parent")?;
        claim(self.nodes[0].depth == 0, "root depth nonzero")?;
        for (i, n) in self.nodes.iter().enumerate().skip(1) {
            let p = match n.parent {
                Some(p) => p,
                None => return claim(false, "non-root without parent"),
            };
            claim(p < i, "parent does not precede child")?;
            claim(self.nodes[p].children.contains(&i), "parent missing child link")?;
            claim(n.depth == self.nodes[p].depth + 1, "depth not parent depth + 1")?;
        }
        for (i, n) in self.nodes.iter().enumerate() {
            for &c in &n.children {
                claim(c < self.nodes.len() && self.nodes[c].parent == Some(i), "dangling child link")?;
            }
        }
        Ok(())
    }
}

/// Exhaustively enumerate canonical rooted trees with the given depth and
/// branching bounds, keeping those with at most 14 edges (the minimax
/// solver's state budget). Duplicate-free by construction: children
/// encodings are combined in sorted order.
pub fn enumerate_small_trees(max_depth: u32, max_branching: u32) -> Result<Vec<FiniteTree>> {
    if max_depth > 3 || max_branching > 3 {
        return Err(Error::InvalidParameter(
            "enumeration is bounded by depth 3 and branching 3".into(),
        ));
    }
    let mut shapes: Vec<String> = vec![String::from("()")];
    for _ in 0..max_depth {
        shapes.sort();
        let mut next: Vec<String> = Vec::new();
        // multisets of at most max_branching children drawn from `shapes`,
        // encoded with children in sorted order (indices nondecreasing)
        let mut pick = vec![0usize; max_branching as usize];
        fn rec(
            shapes: &[String],
            pick: &mut Vec<usize>,
            used: usize,
            min_idx: usize,
            max_branching: usize,
            out: &mut Vec<String>,
        ) {
            let mut enc = String::from("(");
            for &i in pick.iter().take(used) {
                enc.push_str(&shapes[i]);
            }
            enc.push(')');
            out.push(enc);
            if used == max_branching {
                return;
            }
            for i in min_idx..shapes.len() {
                pick[used] = i;
                rec(shapes, pick, used + 1, i, max_branching, out);
            }
        }
        rec(&shapes, &mut pick, 0, 0, max_branching as usize, &mut next);
        shapes = next;
    }
    shapes.sort();
    shapes.dedup();
    let mut trees = Vec::new();
    for enc in shapes {
        // each node contributes one "()" pair
        let edges = enc.len() / 2 - 1;
        if edges <= 14 {
            trees.push(FiniteTree::from_encoding(&enc)?);
        }
    }
    Ok(trees)
}

/// Does the subtree rooted at `node` contain a complete binary tree of the
/// given depth, with `node` as its root?
pub fn contains_binary_tree(t: &FiniteTree, node: usize, depth: u32) -> bool {
    if depth == 0 {
        return true;
    }
    let mut found = 0;
    for &c in &t.nodes()[node].children {
        if contains_binary_tree(t, c, depth - 1) {
            found += 1;
            if found == 2 {
                return true;
            }
        }
    }
    false
}

/// Outcome of the exact finite game.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Winner {
    MakerWins,
    BreakerWins,
}

impl fmt::Display for Winner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Winner::MakerWins => write!(f, "maker_wins"),
            Winner::BreakerWins => write!(f, "breaker_wins"),
        }
    }
}

struct MinimaxSolver<'a> {
    tree: &'a FiniteTree,
    /// Edges ordered shallow-first for better cutoffs; edge i connects
    /// node i+1 to its parent.
    order: Vec<usize>,
    all_edges: u16,
    deep_nodes: u16,
    maker_first: bool,
    memo: HashMap<u32, bool>,
}

impl<'a> MinimaxSolver<'a> {
    fn new(tree: &'a FiniteTree, reach: u32, starter: Starter) -> Self {
        let n_edges = tree.edge_count();
        let mut order: Vec<usize> = (0..n_edges).collect();
        order.sort_by_key(|&e| tree.nodes()[e + 1].depth);
        let mut deep_nodes = 0u16;
        for (i, n) in tree.nodes().iter().enumerate() {
            if n.depth >= reach {
                deep_nodes |= 1 << i;
            }
        }
        MinimaxSolver {
            tree,
            order,
            all_edges: if n_edges == 0 { 0 } else { (1u32 << n_edges) as u16 - 1 },
            deep_nodes,
            maker_first: starter == Starter::Maker,
            memo: HashMap::new(),
        }
    }

    /// Nodes reachable from the root across edges allowed by `ok`.
    fn reach_mask(&self, ok: impl Fn(usize) -> bool) -> u16 {
        let mut visited: u16 = 1;
        let mut stack = [0usize; 16];
        let mut sp = 1;
        stack[0] = 0;
        while sp > 0 {
            sp -= 1;
            let v = stack[sp];
            for &c in &self.tree.nodes()[v].children {
                let e = c - 1;
                if ok(e) && visited & (1 << c) == 0 {
                    visited |= 1 << c;
                    stack[sp] = c;
                    sp += 1;
                }
            }
        }
        visited
    }

    fn maker_won(&self, fixed: u16) -> bool {
        self.reach_mask(|e| fixed & (1 << e) != 0) & self.deep_nodes != 0
    }

    fn breaker_won(&self, deleted: u16) -> bool {
        self.reach_mask(|e| deleted & (1 << e) == 0) & self.deep_nodes == 0
    }

    fn value(&mut self, fixed: u16, deleted: u16) -> bool {
        if self.maker_won(fixed) {
            return true;
        }
        if self.breaker_won(deleted) {
            return false;
        }
        let key = fixed as u32 | (deleted as u32) << 14;
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let moves = (fixed | deleted).count_ones();
        let maker_turn = (moves % 2 == 0) == self.maker_first;
        let free = self.all_edges & !(fixed | deleted);
        let mut result = !maker_turn;
        for i in 0..self.order.len() {
            let e = self.order[i];
            let bit = 1u16 << e;
            if free & bit == 0 {
                continue;
            }
            let v = if maker_turn {
                self.value(fixed | bit, deleted)
            } else {
                self.value(fixed, deleted | bit)
            };
            if v == maker_turn {
                result = v;
                break;
            }
        }
        self.memo.insert(key, result);
        result
    }
}

/// Exact value of the finite reach game on a tree: players alternately
/// resolve any remaining edge (Maker fixates, Breaker deletes, wasted
/// moves allowed, so the oracle makes no strategy assumptions); Maker wins
/// if the root's fixated component ever contains a node at depth `reach`.
pub fn minimax_depth_game(t: &FiniteTree, reach: u32, starter: Starter) -> Result<Winner> {
    if t.edge_count() > 14 {
        return Err(Error::InvalidParameter(
            "minimax solver is limited to 14 edges".into(),
        ));
    }
    if reach == 0 {
        return Ok(Winner::MakerWins);
    }
    let mut solver = MinimaxSolver::new(t, reach, starter);
    if solver.deep_nodes == 0 {
        return Ok(Winner::BreakerWins);
    }
    Ok(if solver.value(0, 0) { Winner::MakerWins } else { Winner::BreakerWins })
}
