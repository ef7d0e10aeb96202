//! Command-line front door for the root-cutting game toolkit.
//!
//! Seven subcommands cover the library surface: `solve` (one law, one
//! information regime), `scan` (parameter sweeps as CSV), `critical`
//! (transition points of parametric families), `bounds` (certificates and
//! sandwich intervals), `simulate` (Monte Carlo in three forms),
//! `walk-quantities` (renewal and parity constants of the embedded half
//! walk), and `oracle` (exhaustive finite minimax check).
//!
//! Exit codes: 0 success, 2 argument or spec parse failure, 3 numeric or
//! domain failure, 4 oracle counterexample. Stdout carries data only;
//! logs go to stderr. All floating output is printed with 12 significant
//! digits so published reference values round-trip.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use gwmb_core::analytic::{
    self, bounds_by_coupling, critical_parameter, dekking_bounds, solve_regime, BoundsReport,
    Regime, RegimeSolution, SolverConfig, Verdict,
};
use gwmb_core::dist::{OffspringDistribution, ParametricFamily};
use gwmb_core::sim::{
    self, contains_binary_tree, enumerate_small_trees, minimax_depth_game, FiniteTree,
    GameConfig, SimEstimate, Starter, Winner,
};
use gwmb_core::walk;
use gwmb_core::Error;

const EXIT_PARSE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_COUNTEREXAMPLE: u8 = 4;

/// A failed command: the message goes to stderr, the code to the shell.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn parse(message: impl Into<String>) -> Self {
        Failure { code: EXIT_PARSE, message: message.into() }
    }

    fn numeric(message: impl Into<String>) -> Self {
        Failure { code: EXIT_NUMERIC, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::numeric(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

#[derive(Parser)]
#[command(
    name = "gwmb",
    version,
    about = "Maker-Breaker root-cutting games on Galton-Watson trees",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one offspring law in one information regime.
    Solve(SolveArgs),
    /// Sweep a parametric family and emit one CSV row per grid point.
    Scan(ScanArgs),
    /// Locate the parameter where the game stops being competitive.
    Critical(CriticalArgs),
    /// Certificates and sandwich intervals for one offspring law.
    Bounds(BoundsArgs),
    /// Monte Carlo estimates: the literal game, its embedded walk, or
    /// binary-subtree containment.
    Simulate(SimulateArgs),
    /// Renewal and parity quantities of the embedded half walk.
    WalkQuantities(WalkQuantitiesArgs),
    /// Exhaustively compare finite minimax play against the containment
    /// criterion.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RegimeArg {
    Full,
    None,
    Size,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Regime {
        match r {
            RegimeArg::Full => Regime::FullInfo,
            RegimeArg::None => Regime::NoInfo,
            RegimeArg::Size => Regime::SizeInfo,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StarterArg {
    Breaker,
    Maker,
}

impl From<StarterArg> for Starter {
    fn from(s: StarterArg) -> Starter {
        match s {
            StarterArg::Breaker => Starter::Breaker,
            StarterArg::Maker => Starter::Maker,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormArg {
    /// Play the revealed tree move by move.
    Game,
    /// Run the embedded count walk directly.
    Walk,
    /// Sample trees and test binary-subtree containment to a fixed depth.
    Subtree,
}

#[derive(Args)]
struct SolveArgs {
    /// Offspring law, e.g. geo-n:0.25, poisson:3, binomial:3,0.8,
    /// pmf:0,0.2,0.3,0.5.
    #[arg(long)]
    dist: String,
    #[arg(long, value_enum, default_value_t = RegimeArg::None)]
    regime: RegimeArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Absolute tolerance for root finding.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Write the output to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    /// Parametric family: poisson | geo-n | geo-n0 | binomial:N |
    /// one-or-many:N | none-or-many:N.
    #[arg(long)]
    dist: String,
    /// Grid as lo:hi:steps with inclusive endpoints, e.g. 0:1:101.
    #[arg(long)]
    param: String,
    #[arg(long, value_enum, default_value_t = RegimeArg::None)]
    regime: RegimeArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Re-validate each row: solution invariants and equation residuals.
    #[arg(long)]
    verify: bool,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CriticalArgs {
    /// Parametric family (see `scan`).
    #[arg(long)]
    dist: String,
    /// Search bracket as lo:hi.
    #[arg(long)]
    param: String,
    #[arg(long, value_enum, default_value_t = RegimeArg::Full)]
    regime: RegimeArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Offspring law (see `solve`).
    #[arg(long)]
    dist: String,
    #[arg(long, value_enum, default_value_t = RegimeArg::None)]
    regime: RegimeArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Offspring law (see `solve`).
    #[arg(long)]
    dist: String,
    /// Information regime; `full` is exact and not simulated (use
    /// `--form subtree` for its depth-truncated probabilities).
    #[arg(long, value_enum, default_value_t = RegimeArg::None)]
    regime: RegimeArg,
    #[arg(long, value_enum, default_value_t = StarterArg::Breaker)]
    starter: StarterArg,
    #[arg(long, value_enum, default_value_t = FormArg::Game)]
    form: FormArg,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    /// Master seed; trial i draws from stream i, so results do not depend
    /// on how trials are chunked across workers.
    #[arg(long, default_value_t = 20260814)]
    seed: u64,
    /// Binary-subtree depth (required for --form subtree, at most 12).
    #[arg(long)]
    depth: Option<u32>,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WalkQuantitiesArgs {
    /// Offspring law whose half walk is analyzed (must split into two
    /// independent identical halves).
    #[arg(long)]
    dist: String,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Enumerate trees up to this depth (at most 3).
    #[arg(long, default_value_t = 3)]
    max_depth: u32,
    /// Enumerate trees up to this branching factor (at most 3).
    #[arg(long, default_value_t = 3)]
    max_branching: u32,
    /// Depth Maker must reach to win.
    #[arg(long, default_value_t = 3)]
    reach: u32,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parse the arguments, run the selected command, and translate the
/// outcome into the documented exit-code scheme.
pub fn run() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code().clamp(0, 255) as u8;
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(f) = apply_thread_cap() {
        eprintln!("gwmb: {}", f.message);
        return ExitCode::from(f.code);
    }
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Critical(a) => cmd_critical(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::WalkQuantities(a) => cmd_walk_quantities(a),
        Command::Oracle(a) => cmd_oracle(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("gwmb: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

/// GWMB_THREADS caps the rayon pool; unset means the rayon default.
fn apply_thread_cap() -> CmdResult {
    let Ok(raw) = std::env::var("GWMB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Failure::parse(format!("GWMB_THREADS must be a positive integer, got '{raw}'")))?;
    if n == 0 {
        return Err(Failure::parse("GWMB_THREADS must be a positive integer, got '0'"));
    }
    // A second build_global is harmless here: only the first wins, and any
    // later call happens with the same value in one process run.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn parse_dist(spec: &str) -> Result<OffspringDistribution, Failure> {
    OffspringDistribution::from_spec(spec).map_err(|e| Failure::parse(e.to_string()))
}

fn parse_family(spec: &str) -> Result<ParametricFamily, Failure> {
    ParametricFamily::from_spec(spec).map_err(|e| Failure::parse(e.to_string()))
}

fn parse_grid(raw: &str) -> Result<(f64, f64, usize), Failure> {
    let bad = || Failure::parse(format!("--param must be lo:hi:steps with steps >= 2, got '{raw}'"));
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let steps: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if !lo.is_finite() || !hi.is_finite() || lo > hi || steps < 2 {
        return Err(bad());
    }
    Ok((lo, hi, steps))
}

fn parse_bracket(raw: &str) -> Result<(f64, f64), Failure> {
    let bad = || Failure::parse(format!("--param must be lo:hi, got '{raw}'"));
    let (a, b) = raw.split_once(':').ok_or_else(bad)?;
    let lo: f64 = a.trim().parse().map_err(|_| bad())?;
    let hi: f64 = b.trim().parse().map_err(|_| bad())?;
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn solver_config(tol: f64) -> Result<SolverConfig, Failure> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Failure::parse(format!("--tol must be a positive real, got {tol}")));
    }
    Ok(SolverConfig { abs_tol: tol, ..SolverConfig::default() })
}

/// Render with 12 significant digits in plain decimal notation.
fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    let prec = (11 - exp).max(0) as usize;
    let mut s = format!("{x:.prec$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

/// Round every number in a JSON tree to 12 significant digits so the
/// serialized form never carries more.
fn round_json(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(x) = n.as_f64() {
                if n.is_f64() && x != 0.0 && x.is_finite() {
                    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
                    if let Some(num) = serde_json::Number::from_f64(rounded) {
                        *v = serde_json::Value::Number(num);
                    }
                }
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(round_json),
        serde_json::Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

fn to_json(value: &impl serde::Serialize) -> Result<String, Failure> {
    let mut v = serde_json::to_value(value)
        .map_err(|e| Failure::numeric(format!("serialization failed: {e}")))?;
    round_json(&mut v);
    serde_json::to_string_pretty(&v)
        .map(|s| s + "\n")
        .map_err(|e| Failure::numeric(format!("serialization failed: {e}")))
}

fn emit(payload: String, out: Option<&Path>) -> CmdResult {
    match out {
        Some(path) => std::fs::write(path, payload)
            .map_err(|e| Failure::numeric(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{payload}");
            Ok(())
        }
    }
}

fn case_label(case: analytic::Case) -> &'static str {
    match case {
        analytic::Case::Trivial0 => "trivial0",
        analytic::Case::Trivial1 => "trivial1",
        analytic::Case::Interior => "interior",
    }
}

fn verdict_label(v: Verdict) -> &'static str {
    match v {
        Verdict::Yes => "yes",
        Verdict::No => "no",
        Verdict::Inconclusive => "inconclusive",
    }
}

/// Split `trials` into chunks, run them across the rayon pool, and merge.
/// Per-trial RNG streams make the result independent of the chunking.
fn fan_out<T>(
    trials: u64,
    run: impl Fn(u64, u64) -> gwmb_core::Result<T> + Sync,
    merge: impl Fn(T, T) -> T + Sync + Send,
) -> Result<T, Failure>
where
    T: Send + Default,
{
    let workers = rayon::current_num_threads().max(1) as u64;
    let chunks = (workers * 8).min(trials.max(1));
    let size = trials.div_ceil(chunks);
    (0..chunks)
        .into_par_iter()
        .map(|i| {
            let lo = i * size;
            let hi = ((i + 1) * size).min(trials);
            run(lo, hi.max(lo))
        })
        .try_reduce(T::default, |a, b| Ok(merge(a, b)))
        .map_err(Failure::from)
}

fn estimate_from(successes: u64, cfg: &GameConfig) -> SimEstimate {
    let (p_hat, ci_lo, ci_hi) = gwmb_core::numeric::wilson_interval(successes, cfg.trials);
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

/// Magnitude bound on the characteristic roots of the embedded full-round
/// walk; drives the success threshold and truncation bias bound.
fn walk_root_bound(base: &OffspringDistribution, cfg: &SolverConfig) -> Result<f64, Failure> {
    if base.pmf(0) == 0.0 {
        let inc = base.to_increment(-2)?;
        return walk::hitting_rho(&inc, cfg).map_err(Failure::from);
    }
    if base.mean() > 2.0 {
        let tb = walk::two_boundary_hit(base, 1, cfg)?;
        return Ok(tb.x1.max(tb.x2.abs()));
    }
    // Mean at most 2: absorption is almost sure and no geometric escape
    // bound exists; the bias bound degrades to a vacuous constant.
    Ok(1.0)
}

fn cmd_solve(a: SolveArgs) -> CmdResult {
    let d = parse_dist(&a.dist)?;
    let cfg = solver_config(a.tol)?;
    let regime = Regime::from(a.regime);
    let sol = solve_regime(&d, regime, &cfg)?;
    let payload = match a.format {
        FormatArg::Json => to_json(&sol)?,
        FormatArg::Csv => {
            let q = analytic::extinction_q(&d, &cfg);
            let mut s = String::from("p,p_bar,q,case\n");
            let _ = writeln!(
                s,
                "{},{},{},{}",
                fmt_sig(sol.p_unconditional),
                fmt_sig(sol.p_bar),
                fmt_sig(q),
                case_label(sol.case)
            );
            s
        }
    };
    emit(payload, a.out.as_deref())
}

/// Invariant check behind `scan --verify`: the reported values must obey
/// the probabilistic orderings and sit on their defining equations.
fn verify_row(param: f64, sol: &RegimeSolution, q: f64, tol: f64) -> CmdResult {
    let fail = |what: &str| {
        Err(Failure::numeric(format!("verification failed at param {}: {what}", fmt_sig(param))))
    };
    let within = |x: f64| (-1e-12..=1.0 + 1e-12).contains(&x);
    if !(within(sol.p_unconditional) && within(sol.p_bar) && within(sol.p_conditional)) {
        return fail("probability out of [0,1]");
    }
    if sol.p_bar > sol.p_conditional + 1e-12 {
        return fail("p_bar exceeds p");
    }
    if sol.p_unconditional < q - 1e-12 {
        return fail("p below the extinction probability");
    }
    if sol.case == analytic::Case::Trivial1 && sol.p_unconditional < 1.0 - 1e-12 {
        return fail("trivial1 case with p below 1");
    }
    if sol.case == analytic::Case::Trivial0 && sol.p_unconditional > 1e-12 {
        return fail("trivial0 case with p above 0");
    }
    if !sol.via_simulation && sol.residual > (100.0 * tol).max(1e-9) {
        return fail("equation residual above tolerance");
    }
    Ok(())
}

fn cmd_scan(a: ScanArgs) -> CmdResult {
    let family = parse_family(&a.dist)?;
    let (lo, hi, steps) = parse_grid(&a.param)?;
    let cfg = solver_config(a.tol)?;
    let regime = Regime::from(a.regime);
    if a.format == FormatArg::Json {
        return Err(Failure::parse("scan emits CSV; use --format csv"));
    }
    let mut out = String::from("param,p,p_bar,q,case\n");
    let mut kept = 0usize;
    for i in 0..steps {
        let param = lo + (hi - lo) * (i as f64) / ((steps - 1) as f64);
        let d = match family.instantiate(param) {
            Ok(d) => d,
            Err(e) => {
                eprintln!("gwmb: skipping param {}: {e}", fmt_sig(param));
                continue;
            }
        };
        let sol = match solve_regime(&d, regime, &cfg) {
            Ok(sol) => sol,
            Err(e) => {
                eprintln!("gwmb: skipping param {}: {e}", fmt_sig(param));
                continue;
            }
        };
        let q = analytic::extinction_q(&d, &cfg);
        if a.verify {
            verify_row(param, &sol, q, a.tol)?;
        }
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_sig(param),
            fmt_sig(sol.p_unconditional),
            fmt_sig(sol.p_bar),
            fmt_sig(q),
            case_label(sol.case)
        );
        kept += 1;
    }
    if kept == 0 {
        return Err(Failure::numeric("no grid point produced a solution"));
    }
    emit(out, a.out.as_deref())
}

fn cmd_critical(a: CriticalArgs) -> CmdResult {
    let family = parse_family(&a.dist)?;
    let bracket = parse_bracket(&a.param)?;
    let cfg = solver_config(a.tol)?;
    let result = critical_parameter(&family, Regime::from(a.regime), bracket, &cfg)?;
    let payload = match a.format {
        FormatArg::Json => to_json(&result)?,
        FormatArg::Csv => {
            let mut s = String::from("param_c,p_at_critical\n");
            let _ = writeln!(s, "{},{}", fmt_sig(result.param_c), fmt_sig(result.p_at_critical));
            s
        }
    };
    emit(payload, a.out.as_deref())
}

fn merge_verdict(primary: Verdict, secondary: Verdict) -> Verdict {
    if primary == Verdict::Inconclusive {
        secondary
    } else {
        primary
    }
}

fn cmd_bounds(a: BoundsArgs) -> CmdResult {
    let d = parse_dist(&a.dist)?;
    let cfg = solver_config(a.tol)?;
    let regime = Regime::from(a.regime);
    let mut report: BoundsReport = dekking_bounds(&d, &cfg)?;
    if regime == Regime::NoInfo {
        // Sandwich intervals exist only for odd binomial orders; quietly
        // absent elsewhere.
        if let Ok(coupled) = bounds_by_coupling(&d, regime, &cfg) {
            report.maker_has_chance =
                merge_verdict(report.maker_has_chance, coupled.maker_has_chance);
            report.breaker_sure = merge_verdict(report.breaker_sure, coupled.breaker_sure);
            report.coupling = coupled.coupling;
        }
    }
    let payload = match a.format {
        FormatArg::Json => to_json(&report)?,
        FormatArg::Csv => {
            let mut s = String::from(
                "maker_has_chance,breaker_sure,maker_lhs,maker_rhs,breaker_lhs,breaker_rhs,\
                 p_lo,p_hi,p_bar_lo,p_bar_hi\n",
            );
            let dk = report
                .dekking
                .map(|d| {
                    [d.maker_lhs, d.maker_rhs, d.breaker_lhs, d.breaker_rhs].map(fmt_sig)
                })
                .unwrap_or_default();
            let cp = report
                .coupling
                .as_ref()
                .map(|c| [c.p_lo, c.p_hi, c.p_bar_lo, c.p_bar_hi].map(fmt_sig))
                .unwrap_or_default();
            let _ = writeln!(
                s,
                "{},{},{},{}",
                verdict_label(report.maker_has_chance),
                verdict_label(report.breaker_sure),
                dk.join(","),
                cp.join(",")
            );
            s
        }
    };
    emit(payload, a.out.as_deref())
}

fn cmd_simulate(a: SimulateArgs) -> CmdResult {
    let d = parse_dist(&a.dist)?;
    let cfg = solver_config(a.tol)?;
    if a.trials == 0 {
        return Err(Failure::parse("--trials must be positive"));
    }
    let regime = Regime::from(a.regime);
    let starter = Starter::from(a.starter);

    let estimate = match a.form {
        FormArg::Subtree => {
            let depth = a
                .depth
                .ok_or_else(|| Failure::parse("--form subtree requires --depth"))?;
            let game_cfg = GameConfig::new(a.trials, a.seed, 1);
            let misses = fan_out(
                a.trials,
                |lo, hi| sim::binary_subtree_miss_counts(&d, depth, &game_cfg, lo, hi),
                |x, y| x + y,
            )?;
            estimate_from(misses, &game_cfg)
        }
        FormArg::Walk | FormArg::Game => {
            if regime == Regime::FullInfo {
                return Err(Failure::parse(
                    "full-information play is solved exactly; simulate covers \
                     --regime none|size (or --form subtree)",
                ));
            }
            // Size information conditions the tree on survival; the
            // embedded walk then runs on the skeleton law.
            let q = match regime {
                Regime::SizeInfo => {
                    let q = analytic::extinction_q(&d, &cfg);
                    if q >= 1.0 {
                        return Err(Failure::numeric(
                            "tree dies out almost surely; size conditioning undefined",
                        ));
                    }
                    q
                }
                _ => 0.0,
            };
            let base = if regime == Regime::SizeInfo {
                OffspringDistribution::finite(d.skew(q)?.weights().to_vec())?
            } else {
                d.clone()
            };
            let game_cfg =
                GameConfig::for_walk(walk_root_bound(&base, &cfg)?, a.trials, a.seed);
            eprintln!(
                "gwmb: success threshold {} levels, truncation bias bound {}",
                game_cfg.success_threshold,
                fmt_sig(game_cfg.bias_bound)
            );
            let counts = match a.form {
                FormArg::Walk => {
                    let inc = base.to_increment(-2)?;
                    let start = match starter {
                        Starter::Breaker => 1,
                        Starter::Maker => 2,
                    };
                    let w = fan_out(
                        a.trials,
                        |lo, hi| sim::walk_hit_counts(&inc, start, &game_cfg, lo, hi),
                        sim::WalkCounts::merge,
                    )?;
                    sim::GameCounts { successes: w.successes, undecided: w.undecided }
                }
                _ => fan_out(
                    a.trials,
                    |lo, hi| sim::game_counts(&d, regime, starter, &game_cfg, q, lo, hi),
                    sim::GameCounts::merge,
                )?,
            };
            if counts.undecided > 0 {
                return Err(Failure::from(Error::UndecidedTrials(counts.undecided)));
            }
            estimate_from(counts.successes, &game_cfg)
        }
    };

    let payload = match a.format {
        FormatArg::Json => to_json(&estimate)?,
        FormatArg::Csv => {
            let mut s = String::from("trials,successes,p_hat,ci_lo,ci_hi,bias_bound,seed\n");
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                estimate.trials,
                estimate.successes,
                fmt_sig(estimate.p_hat),
                fmt_sig(estimate.ci_lo),
                fmt_sig(estimate.ci_hi),
                fmt_sig(estimate.bias_bound),
                estimate.seed
            );
            s
        }
    };
    emit(payload, a.out.as_deref())
}

fn cmd_walk_quantities(a: WalkQuantitiesArgs) -> CmdResult {
    let d = parse_dist(&a.dist)?;
    let cfg = solver_config(a.tol)?;
    let half = d.split_half()?;
    eprintln!("gwmb: half-walk offspring law {half}");
    let inc = half.to_increment(-1)?;
    let wq = walk::conditioned_quantities(&inc, &cfg)?;
    let payload = match a.format {
        FormatArg::Json => to_json(&wq)?,
        FormatArg::Csv => {
            let mut s = String::from("rho,sigma,theta,rho_odd,theta_odd,pi_minus1\n");
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                fmt_sig(wq.rho),
                fmt_sig(wq.sigma),
                fmt_sig(wq.theta),
                fmt_sig(wq.rho_odd),
                fmt_sig(wq.theta_odd),
                fmt_sig(wq.pi_minus1)
            );
            s
        }
    };
    emit(payload, a.out.as_deref())
}

/// The reachability criterion the minimax values must reproduce: with
/// Breaker starting, Maker wins exactly when a full binary tree of the
/// reach depth sits at the root; with Maker starting, exactly when some
/// child of the root carries one of depth `reach - 1`.
fn criterion_winner(t: &FiniteTree, reach: u32, starter: Starter) -> Winner {
    let maker_wins = match starter {
        Starter::Breaker => contains_binary_tree(t, 0, reach),
        Starter::Maker => {
            reach == 0
                || t.nodes()[0]
                    .children
                    .iter()
                    .any(|&v| contains_binary_tree(t, v, reach - 1))
        }
    };
    if maker_wins {
        Winner::MakerWins
    } else {
        Winner::BreakerWins
    }
}

#[derive(serde::Serialize)]
struct Counterexample {
    encoding: String,
    starter: Starter,
    minimax: String,
    criterion: String,
}

#[derive(serde::Serialize)]
struct OracleReport {
    max_depth: u32,
    max_branching: u32,
    reach: u32,
    trees: usize,
    games: usize,
    counterexamples: Vec<Counterexample>,
    summary: String,
}

fn cmd_oracle(a: OracleArgs) -> CmdResult {
    let trees = enumerate_small_trees(a.max_depth, a.max_branching)?;
    let mut counterexamples: Vec<Counterexample> = trees
        .par_iter()
        .map(|t| -> gwmb_core::Result<Vec<Counterexample>> {
            let mut bad = Vec::new();
            for starter in [Starter::Breaker, Starter::Maker] {
                let got = minimax_depth_game(t, a.reach, starter)?;
                let want = criterion_winner(t, a.reach, starter);
                if got != want {
                    bad.push(Counterexample {
                        encoding: t.encoding(),
                        starter,
                        minimax: got.to_string(),
                        criterion: want.to_string(),
                    });
                }
            }
            Ok(bad)
        })
        .try_reduce(Vec::new, |mut acc, mut item| {
            acc.append(&mut item);
            Ok(acc)
        })
        .map_err(Failure::from)?;
    counterexamples.sort_by(|a, b| (&a.encoding, a.starter as u8).cmp(&(&b.encoding, b.starter as u8)));

    let report = OracleReport {
        max_depth: a.max_depth,
        max_branching: a.max_branching,
        reach: a.reach,
        trees: trees.len(),
        games: trees.len() * 2,
        summary: format!(
            "{} counterexample{} in {} games over {} trees",
            counterexamples.len(),
            if counterexamples.len() == 1 { "" } else { "s" },
            trees.len() * 2,
            trees.len()
        ),
        counterexamples,
    };
    let failed = !report.counterexamples.is_empty();
    let payload = match a.format {
        FormatArg::Json => to_json(&report)?,
        FormatArg::Csv => {
            let mut s = String::from("encoding,starter,minimax,criterion\n");
            for c in &report.counterexamples {
                let starter = match c.starter {
                    Starter::Breaker => "breaker",
                    Starter::Maker => "maker",
                };
                let _ = writeln!(s, "{},{},{},{}", c.encoding, starter, c.minimax, c.criterion);
            }
            s
        }
    };
    eprintln!("gwmb: {}", report.summary);
    emit(payload, a.out.as_deref())?;
    if failed {
        return Err(Failure { code: EXIT_COUNTEREXAMPLE, message: report.summary });
    }
    Ok(())
}
