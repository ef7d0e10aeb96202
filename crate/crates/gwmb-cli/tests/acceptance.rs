//! Acceptance gate: one test per shipping criterion, numbered 01 through
//! 14. Reference constants were frozen from 40-digit arbitrary-precision
//! evaluations of the defining equations before the implementation
//! existed; tests compare against those, never against the code's own
//! output.

use std::process::Command;
use std::time::Instant;

use rayon::prelude::*;

use gwmb_core::analytic::{
    bounds_by_coupling, critical_parameter, dekking_threshold, extinction_q, solve_empty,
    solve_full_info, solve_regime, solve_size_info, Case, DekkingSide, Regime, SolverConfig,
};
use gwmb_core::dist::{OffspringDistribution as Dist, ParametricFamily};
use gwmb_core::numeric::wilson_interval;
use gwmb_core::sim::{
    self, contains_binary_tree, depth_iterate_p, enumerate_small_trees, minimax_depth_game,
    FiniteTree, GameConfig, Starter, Winner,
};
use gwmb_core::walk::{
    alpha_verdict, conditioned_quantities, enumeration_brackets, separable_solution,
    thinning_upper_bound, two_boundary_hit, AlphaConvention,
};

fn cfg() -> SolverConfig {
    SolverConfig::default()
}

fn d(spec: &str) -> Dist {
    Dist::from_spec(spec).unwrap()
}

/// Deterministic 64-bit mixer for seeded test data.
struct SplitMix(u64);

impl SplitMix {
    fn next_unit(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z = z ^ (z >> 31);
        (z >> 11) as f64 / (1u64 << 53) as f64
    }
}

#[test]
fn criterion_01_full_info_geometric_closed_forms() {
    let start = Instant::now();
    for i in 1..=5 {
        let s = 0.05 * i as f64;
        let sol = solve_full_info(&d(&format!("geo-n:{s}")), &cfg());
        let p = (1.0 - (1.0 - 4.0 * s).sqrt()) / (2.0 * (1.0 - s));
        let p_bar = p - s / (1.0 - s);
        assert!(
            (sol.p_unconditional - p).abs() < 1e-10,
            "s = {s}: p = {}, closed form {p}",
            sol.p_unconditional
        );
        assert!(
            (sol.p_bar - p_bar).abs() < 1e-10,
            "s = {s}: p_bar = {}, closed form {p_bar}",
            sol.p_bar
        );
    }
    assert!(start.elapsed().as_secs_f64() < 1.0, "budget exceeded: {:?}", start.elapsed());
}

#[test]
fn criterion_02_full_info_poisson_criticality() {
    let result =
        critical_parameter(&ParametricFamily::Poisson, Regime::FullInfo, (3.0, 4.0), &cfg())
            .unwrap();
    assert!(
        (result.param_c - 3.3509188715).abs() < 1e-7,
        "critical parameter {} vs reference 3.3509188715",
        result.param_c
    );
    assert!(
        (result.p_at_critical - 0.46483869).abs() < 1e-6,
        "p at criticality {} vs reference 0.46483869",
        result.p_at_critical
    );
}

#[test]
fn criterion_03_binomial_critical_table() {
    // (n, r_c, p_c); n = 3 is exact algebra, the rest round to four
    // decimals.
    let n3 = critical_parameter(
        &ParametricFamily::Binomial { n: 3 },
        Regime::FullInfo,
        (0.05, 0.999),
        &cfg(),
    )
    .unwrap();
    assert!((n3.param_c - 8.0 / 9.0).abs() < 1e-8, "n=3 r_c = {}", n3.param_c);
    assert!((n3.p_at_critical - 5.0 / 32.0).abs() < 1e-8, "n=3 p_c = {}", n3.p_at_critical);

    let table = [
        (4u32, 0.7248, 0.2584),
        (5, 0.6028, 0.3105),
        (6, 0.5137, 0.3418),
        (7, 0.4468, 0.3625),
        (8, 0.3949, 0.3773),
        (9, 0.3537, 0.3883),
        (10, 0.3202, 0.3969),
    ];
    for (n, r_ref, p_ref) in table {
        let result = critical_parameter(
            &ParametricFamily::Binomial { n },
            Regime::FullInfo,
            (0.05, 0.999),
            &cfg(),
        )
        .unwrap();
        assert!(
            (result.param_c - r_ref).abs() <= 5e-5,
            "n={n}: r_c = {:.10} does not round to {r_ref}",
            result.param_c
        );
        assert!(
            (result.p_at_critical - p_ref).abs() <= 5e-5,
            "n={n}: p_c = {:.10} does not round to {p_ref}",
            result.p_at_critical
        );
    }
}

#[test]
fn criterion_04_dekking_threshold_quotes() {
    // Each quote is compared at one ulp of its printed precision, since a
    // printed value may be truncated rather than rounded at the last
    // digit.
    let checks = [
        (ParametricFamily::GeometricN, DekkingSide::Maker, (0.15, 0.30), 0.21332, 1e-5),
        (ParametricFamily::GeometricN, DekkingSide::Breaker, (0.25, 0.35), 0.29629, 1e-5),
        (ParametricFamily::GeometricN0, DekkingSide::Maker, (0.12, 0.22), 0.16401, 1e-5),
        (ParametricFamily::GeometricN0, DekkingSide::Breaker, (0.18, 0.28), 0.22857, 1e-5),
        (ParametricFamily::Poisson, DekkingSide::Maker, (3.2, 4.0), 3.654328, 1e-6),
        (
            ParametricFamily::Poisson,
            DekkingSide::Breaker,
            (2.2, 3.2),
            std::f64::consts::E,
            1e-8,
        ),
    ];
    for (family, side, bracket, quote, tol) in checks {
        let t = dekking_threshold(&family, side, bracket, &cfg()).unwrap();
        assert!(
            (t - quote).abs() <= tol,
            "{family:?} {side:?}: threshold {t:.10} vs quote {quote} (tol {tol})"
        );
    }
}

#[test]
fn criterion_05_no_info_closed_forms() {
    for i in 2..=9 {
        let s = 0.05 * i as f64;
        let sol = solve_empty(&d(&format!("geo-n:{s}")), &cfg()).unwrap();
        assert!(
            (sol.p_unconditional - s / (1.0 - s)).abs() < 1e-10,
            "s = {s}: p = {} vs closed form {}",
            sol.p_unconditional,
            s / (1.0 - s)
        );
    }

    // Random laws on {1,2,3} with p_1 < p_3: the cubic factors and the
    // interior root is exactly p_1/p_3.
    let mut rng = SplitMix(0x6a09e667f3bcc908);
    for case in 0..20 {
        let w1 = 0.1 + 0.8 * rng.next_unit();
        let w2 = 0.1 + 0.8 * rng.next_unit();
        let w3 = w1 + 0.05 + 0.95 * rng.next_unit();
        let total = w1 + w2 + w3;
        let (p1, p3) = (w1 / total, w3 / total);
        let law = Dist::finite(vec![0.0, w1 / total, w2 / total, w3 / total]).unwrap();
        let sol = solve_empty(&law, &cfg()).unwrap();
        assert!(
            (sol.p_unconditional - p1 / p3).abs() < 1e-10,
            "case {case} ({law}): p = {} vs p1/p3 = {}",
            sol.p_unconditional,
            p1 / p3
        );
    }
}

#[test]
fn criterion_06_separable_engine_reference_values() {
    // Exact closed forms for the offspring law whose half walk has
    // characteristic root (1 + sqrt(13))/6.
    let (p, p_bar) = separable_solution(&d("geo-n0:0.25"), &cfg()).unwrap();
    assert!((p - 2.0 / 3.0).abs() < 1e-10, "geo-n0:0.25 p = {p}");
    assert!((p_bar - 5.0 / 9.0).abs() < 1e-10, "geo-n0:0.25 p_bar = {p_bar}");

    let sqrt13 = 13f64.sqrt();
    let half = d("geo-n0:0.25").split_half().unwrap();
    let wq = conditioned_quantities(&half.to_increment(-1).unwrap(), &cfg()).unwrap();
    assert!((wq.rho - (1.0 + sqrt13) / 6.0).abs() < 1e-9, "rho = {}", wq.rho);
    assert!((wq.sigma - (sqrt13 - 3.0) / 4.0).abs() < 1e-9, "sigma = {}", wq.sigma);
    assert!((wq.theta - (5.0 - sqrt13) / 4.0).abs() < 1e-9, "theta = {}", wq.theta);
    assert!((wq.rho_odd - (13.0 - sqrt13) / 12.0).abs() < 1e-9, "rho_odd = {}", wq.rho_odd);
    assert!((wq.theta_odd - (5.0 + sqrt13) / 12.0).abs() < 1e-9, "theta_odd = {}", wq.theta_odd);

    // Poisson(3) intermediates of the half walk, frozen to ten digits.
    let half = d("poisson:3").split_half().unwrap();
    let wq = conditioned_quantities(&half.to_increment(-1).unwrap(), &cfg()).unwrap();
    for (name, got, frozen) in [
        ("rho", wq.rho, 0.4171883561342),
        ("sigma", wq.sigma, 0.3117125717749),
        ("theta", wq.theta, 0.4651572680477),
        ("rho_odd", wq.rho_odd, 0.7065126296395),
        ("theta_odd", wq.theta_odd, 0.8170320478680),
    ] {
        assert!((got - frozen).abs() < 1e-9, "poisson:3 half-walk {name} = {got} vs {frozen}");
    }

    // The published display values for Poisson(3). High-precision
    // evaluation of the same equations gives (0.3167644729, 0.1494544217),
    // which two independent solvers and the Monte Carlo engine reproduce;
    // the quoted pair differs from it by about 2.3e-4, far outside both
    // solvers' residuals, so this clause fails and is kept failing rather
    // than widened.
    let (p, p_bar) = separable_solution(&d("poisson:3"), &cfg()).unwrap();
    eprintln!("separable_solution(poisson:3) = ({p:.12}, {p_bar:.12}); quoted (0.31699, 0.14967)");
    assert!(
        (p - 0.31699).abs() <= 1e-5 && (p_bar - 0.14967).abs() <= 1e-5,
        "computed ({p:.12}, {p_bar:.12}) vs quoted (0.31699, 0.14967): \
         |dp| = {:.3e}, |dp_bar| = {:.3e} exceed the 1e-5 gate",
        (p - 0.31699).abs(),
        (p_bar - 0.14967).abs()
    );
}

fn walk_battery_laws() -> Vec<Dist> {
    let mut laws = Vec::new();
    for i in 0..14 {
        laws.push(Dist::from_spec(&format!("poisson:{}", 1.05 + 0.15 * i as f64)).unwrap());
    }
    for s in [0.10, 0.15, 0.20, 0.25, 0.30] {
        laws.push(Dist::from_spec(&format!("nb:0.5,{s}")).unwrap());
    }
    laws.push(d("nb:1.5,0.5"));
    for (n, r) in [
        (2, 0.6),
        (2, 0.8),
        (2, 0.9),
        (3, 0.4),
        (3, 0.5),
        (3, 0.6),
        (3, 0.8),
        (5, 0.25),
        (5, 0.3),
        (5, 0.5),
    ] {
        laws.push(Dist::from_spec(&format!("binomial:{n},{r}")).unwrap());
    }
    for w in [
        "pmf:0.3,0.2,0.2,0.3",
        "pmf:0.25,0.25,0.25,0.25",
        "pmf:0.2,0.3,0.1,0.4",
        "pmf:0.35,0.05,0.25,0.35",
        "pmf:0.4,0.1,0.2,0.3",
        "pmf:0.3,0.3,0.1,0.3",
    ] {
        laws.push(d(w));
    }
    laws
}

#[test]
fn criterion_07_walk_identity_suite() {
    let laws = walk_battery_laws();
    assert!(laws.len() >= 30, "battery needs at least 30 laws");
    for law in &laws {
        let inc = law.to_increment(-1).unwrap();
        let wq = conditioned_quantities(&inc, &cfg()).unwrap();

        let split = wq.pi_minus1 + wq.theta + wq.sigma;
        assert!((split - 1.0).abs() < 1e-10, "first-step split fails for {law}");
        assert!(
            (wq.sigma - wq.pi_minus1 * (1.0 - wq.rho) / wq.rho).abs() < 1e-10,
            "renewal form of sigma fails for {law}"
        );
        assert!(
            (wq.theta - (1.0 - wq.pi_minus1 / wq.rho)).abs() < 1e-10,
            "renewal form of theta fails for {law}"
        );
        let z = wq.rho * (1.0 - 2.0 * wq.rho_odd);
        assert!((inc.gamma(z).unwrap() + 1.0).abs() < 1e-9, "parity root fails for {law}");
        let product = wq.pi_minus1 * (1.0 - wq.rho_odd) / (wq.rho * (2.0 * wq.rho_odd - 1.0));
        assert!(
            (wq.theta * wq.theta_odd - product).abs() < 1e-9,
            "product identity fails for {law}"
        );

        // Exhaustive path enumeration over 18 steps must bracket every
        // analytic value for laws with bounded support.
        if law.max_support().is_some() {
            let br = enumeration_brackets(&inc, 18, wq.rho).unwrap();
            assert!(br.rho.contains(wq.rho), "rho bracket misses for {law}");
            assert!(br.sigma.contains(wq.sigma), "sigma bracket misses for {law}");
            assert!(br.theta.contains(wq.theta), "theta bracket misses for {law}");
            assert!(br.rho_odd.contains(wq.rho_odd), "rho_odd bracket misses for {law}");
        }
    }
}

#[test]
fn criterion_08_two_root_separable_agreement() {
    let mut specs: Vec<String> = (0..10).map(|i| format!("poisson:{}", 2.2 + 0.2 * i as f64)).collect();
    specs.extend([0.10, 0.15, 0.20, 0.25, 0.30].iter().map(|s| format!("geo-n0:{s}")));
    for spec in specs {
        let law = d(&spec);
        let (p, p_bar) = separable_solution(&law, &cfg()).unwrap();
        let tb1 = two_boundary_hit(&law, 1, &cfg()).unwrap();
        let tb2 = two_boundary_hit(&law, 2, &cfg()).unwrap();
        assert!((p - tb1.h).abs() < 1e-8, "{spec}: separable p {p} vs two-boundary {}", tb1.h);
        assert!(
            (p_bar - tb2.h).abs() < 1e-8,
            "{spec}: separable p_bar {p_bar} vs two-boundary {}",
            tb2.h
        );
    }
}

#[test]
fn criterion_09_coupling_sandwich() {
    let report = bounds_by_coupling(&d("binomial:13,0.25"), Regime::NoInfo, &cfg()).unwrap();
    let c = report.coupling.expect("odd binomial has a coupling interval");
    eprintln!(
        "coupling(binomial:13,0.25): p in ({:.10}, {:.10}), p_bar in ({:.10}, {:.10}); \
         quoted (0.1367, 0.2482) and (0.0383, 0.0957)",
        c.p_lo, c.p_hi, c.p_bar_lo, c.p_bar_hi
    );
    // Three of the four endpoints agree to four decimals. The upper p
    // endpoint is the no-information solution of binomial:12,0.25, which
    // high-precision evaluation puts at 0.2478160740; the quoted 0.2482
    // does not round from it, so that clause fails and stays failing.
    for (name, got, quoted) in [
        ("p_lo", c.p_lo, 0.1367),
        ("p_hi", c.p_hi, 0.2482),
        ("p_bar_lo", c.p_bar_lo, 0.0383),
        ("p_bar_hi", c.p_bar_hi, 0.0957),
    ] {
        assert!(
            (got - quoted).abs() <= 5e-5,
            "{name} = {got:.10} does not round to the quoted {quoted}"
        );
    }
}

#[test]
fn criterion_10_size_info_regime() {
    // Conditional curve for the three-child binomial family, frozen to
    // ten digits.
    let curve = [
        (0.70, 0.6876128604),
        (0.75, 0.3850454583),
        (0.80, 0.2046823929),
        (0.85, 0.0979610254),
        (0.90, 0.0378032347),
        (0.95, 0.0083521574),
        (0.99, 0.0003061525),
    ];
    for (r, frozen) in curve {
        let sol = solve_size_info(&d(&format!("binomial:3,{r}")), &cfg()).unwrap();
        assert!(
            (sol.p_conditional - frozen).abs() < 1e-9,
            "r = {r}: p = {:.12} vs frozen {frozen}",
            sol.p_conditional
        );
    }

    // At or below mean 2 the game is never competitive.
    for r in [0.3, 0.5, 0.6, 2.0 / 3.0] {
        let sol = solve_size_info(&d(&format!("binomial:3,{r}")), &cfg()).unwrap();
        assert_eq!(sol.case, Case::Trivial1, "r = {r}");
        assert_eq!(sol.p_conditional, 1.0, "r = {r}");
    }

    // Leafless laws carry no size information: the solver must reproduce
    // the no-information solution exactly, not merely approximately.
    for spec in ["pmf:0,0.2,0.3,0.5", "pmf:0,0.5,0.2,0.3", "geo-n:0.3"] {
        let law = d(spec);
        let size = solve_size_info(&law, &cfg()).unwrap();
        let none = solve_empty(&law, &cfg()).unwrap();
        assert_eq!(size.p_conditional, none.p_conditional, "{spec}");
        assert_eq!(size.p_unconditional, none.p_unconditional, "{spec}");
        assert_eq!(size.p_bar, none.p_bar, "{spec}");
    }
}

/// Chunked deterministic fan-out mirroring the CLI's concurrency model.
fn chunked<T: Send + Default>(
    trials: u64,
    run: impl Fn(u64, u64) -> gwmb_core::Result<T> + Sync,
    merge: impl Fn(T, T) -> T + Sync + Send,
) -> T {
    let chunks = 16u64;
    let size = trials.div_ceil(chunks);
    (0..chunks)
        .into_par_iter()
        .map(|i| run(i * size, ((i + 1) * size).min(trials).max(i * size)))
        .try_reduce(T::default, |a, b| Ok(merge(a, b)))
        .unwrap()
}

/// Largest characteristic-root magnitude of the full-round walk, used to
/// size the success threshold.
fn root_bound(base: &Dist) -> f64 {
    if base.pmf(0) == 0.0 {
        gwmb_core::walk::hitting_rho(&base.to_increment(-2).unwrap(), &cfg()).unwrap()
    } else {
        let tb = two_boundary_hit(base, 1, &cfg()).unwrap();
        tb.x1.max(tb.x2.abs())
    }
}

struct Concordance {
    label: String,
    p_hat: f64,
    truth: f64,
    contained: bool,
    gross_error: f64,
}

fn record(label: String, successes: u64, truth: f64, game_cfg: &GameConfig) -> Concordance {
    let (p_hat, lo, hi) = wilson_interval(successes, game_cfg.trials);
    let slack = game_cfg.bias_bound;
    let se = (truth * (1.0 - truth) / game_cfg.trials as f64).sqrt();
    Concordance {
        label,
        p_hat,
        truth,
        contained: lo - slack <= truth && truth <= hi + slack,
        gross_error: (p_hat - truth).abs() / (3.3 * se + slack).max(1e-12),
    }
}

#[test]
fn criterion_11_monte_carlo_concordance() {
    let start = Instant::now();
    let trials = 1_000_000u64;
    let mut seed = 20260814u64;
    let mut next_seed = || {
        seed += 1;
        seed
    };
    let mut checks: Vec<Concordance> = Vec::new();

    // No information: the embedded walk and the literal game must both
    // bracket the exact solution.
    let no_info = ["poisson:3", "geo-n:0.3", "geo-n0:0.25", "binomial:5,0.55", "pmf:0,0.2,0.3,0.5", "nb:1.5,0.3"];
    for spec in no_info {
        let law = d(spec);
        let sol = solve_empty(&law, &cfg()).unwrap();
        let game_cfg = GameConfig::for_walk(root_bound(&law), trials, next_seed());
        let inc = law.to_increment(-2).unwrap();
        let w = chunked(
            trials,
            |lo, hi| sim::walk_hit_counts(&inc, 1, &game_cfg, lo, hi),
            sim::WalkCounts::merge,
        );
        assert_eq!(w.undecided, 0, "{spec} walk undecided");
        checks.push(record(
            format!("none/walk {spec}"),
            w.successes,
            sol.p_unconditional,
            &game_cfg,
        ));
        let game_cfg = GameConfig::for_walk(root_bound(&law), trials, next_seed());
        let g = chunked(
            trials,
            |lo, hi| sim::game_counts(&law, Regime::NoInfo, Starter::Breaker, &game_cfg, 0.0, lo, hi),
            sim::GameCounts::merge,
        );
        assert_eq!(g.undecided, 0, "{spec} game undecided");
        checks.push(record(
            format!("none/game {spec}"),
            g.successes,
            sol.p_unconditional,
            &game_cfg,
        ));
    }
    // Maker-start targets for two of the laws, in both forms.
    for spec in ["poisson:3", "geo-n:0.3"] {
        let law = d(spec);
        let sol = solve_empty(&law, &cfg()).unwrap();
        let game_cfg = GameConfig::for_walk(root_bound(&law), trials, next_seed());
        let inc = law.to_increment(-2).unwrap();
        let w = chunked(
            trials,
            |lo, hi| sim::walk_hit_counts(&inc, 2, &game_cfg, lo, hi),
            sim::WalkCounts::merge,
        );
        checks.push(record(format!("none/walk2 {spec}"), w.successes, sol.p_bar, &game_cfg));
        let game_cfg = GameConfig::for_walk(root_bound(&law), trials, next_seed());
        let g = chunked(
            trials,
            |lo, hi| sim::game_counts(&law, Regime::NoInfo, Starter::Maker, &game_cfg, 0.0, lo, hi),
            sim::GameCounts::merge,
        );
        checks.push(record(format!("none/game-maker {spec}"), g.successes, sol.p_bar, &game_cfg));
    }

    // Size information: the game conditions trees on survival by
    // rejection; the equivalent walk runs on the survival skeleton.
    let size_info = [
        "poisson:3",
        "poisson:2.5",
        "binomial:3,0.8",
        "binomial:4,0.65",
        "geo-n0:0.25",
        "pmf:0.1,0.1,0.2,0.6",
    ];
    for spec in size_info {
        let law = d(spec);
        let sol = solve_size_info(&law, &cfg()).unwrap();
        let q = extinction_q(&law, &cfg());
        let skeleton = Dist::finite(law.skew(q).unwrap().weights().to_vec()).unwrap();
        let game_cfg = GameConfig::for_walk(root_bound(&skeleton), trials, next_seed());
        let g = chunked(
            trials,
            |lo, hi| sim::game_counts(&law, Regime::SizeInfo, Starter::Breaker, &game_cfg, q, lo, hi),
            sim::GameCounts::merge,
        );
        assert_eq!(g.undecided, 0, "{spec} size game undecided");
        checks.push(record(format!("size/game {spec}"), g.successes, sol.p_conditional, &game_cfg));
        let game_cfg = GameConfig::for_walk(root_bound(&skeleton), trials, next_seed());
        let inc = skeleton.to_increment(-2).unwrap();
        let w = chunked(
            trials,
            |lo, hi| sim::walk_hit_counts(&inc, 1, &game_cfg, lo, hi),
            sim::WalkCounts::merge,
        );
        assert_eq!(w.undecided, 0, "{spec} skeleton walk undecided");
        checks.push(record(format!("size/walk {spec}"), w.successes, sol.p_conditional, &game_cfg));
    }
    // One Maker-start size check; conditioned on survival the Maker-start
    // probability is (p_bar - q) / (1 - q).
    {
        let law = d("binomial:3,0.8");
        let sol = solve_size_info(&law, &cfg()).unwrap();
        let q = extinction_q(&law, &cfg());
        let skeleton = Dist::finite(law.skew(q).unwrap().weights().to_vec()).unwrap();
        let game_cfg = GameConfig::for_walk(root_bound(&skeleton), trials, next_seed());
        let g = chunked(
            trials,
            |lo, hi| sim::game_counts(&law, Regime::SizeInfo, Starter::Maker, &game_cfg, q, lo, hi),
            sim::GameCounts::merge,
        );
        let truth = (sol.p_bar - q) / (1.0 - q);
        checks.push(record("size/game-maker binomial:3,0.8".into(), g.successes, truth, &game_cfg));
    }

    // Full information: sample binary-subtree containment to depth 6 and
    // compare with the exact depth recursion at the same depth.
    let full_info = [
        "poisson:3",
        "geo-n:0.3",
        "geo-n0:0.25",
        "binomial:3,0.8",
        "binomial:5,0.5",
        "pmf:0,0.2,0.3,0.5",
    ];
    for spec in full_info {
        let law = d(spec);
        let depth = 6;
        let truth = depth_iterate_p(&law, depth);
        let game_cfg = GameConfig::new(trials, next_seed(), 1);
        let misses = chunked(
            trials,
            |lo, hi| sim::binary_subtree_miss_counts(&law, depth, &game_cfg, lo, hi),
            |a, b| a + b,
        );
        checks.push(record(format!("full/subtree {spec}"), misses, truth, &game_cfg));
    }

    let contained = checks.iter().filter(|c| c.contained).count();
    for c in &checks {
        eprintln!(
            "{:32} p_hat {:.6} truth {:.6} contained {} gross {:.2}",
            c.label, c.p_hat, c.truth, c.contained, c.gross_error
        );
    }
    // Every estimate must sit within 3.3 standard errors (plus the bias
    // bound); the nominal 95% intervals are allowed the occasional miss a
    // correct sampler produces, but not more than a few.
    for c in &checks {
        assert!(
            c.gross_error <= 1.0,
            "{}: p_hat {:.6} is {:.2}x the 3.3-sigma allowance from truth {:.6}",
            c.label,
            c.p_hat,
            c.gross_error,
            c.truth
        );
    }
    assert!(
        contained * 100 >= checks.len() * 85,
        "only {contained} of {} checks contained the analytic value",
        checks.len()
    );
    assert!(
        start.elapsed().as_secs_f64() < 300.0,
        "budget exceeded: {:?}",
        start.elapsed()
    );
}

fn reach_criterion(t: &FiniteTree, reach: u32, starter: Starter) -> Winner {
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

#[test]
fn criterion_12_exhaustive_minimax_oracle() {
    let start = Instant::now();
    let trees = enumerate_small_trees(3, 3).unwrap();
    assert_eq!(trees.len(), 1154, "enumeration size changed");
    let mismatches: Vec<String> = trees
        .par_iter()
        .flat_map_iter(|t| {
            [Starter::Breaker, Starter::Maker].into_iter().filter_map(move |starter| {
                let got = minimax_depth_game(t, 3, starter).unwrap();
                let want = reach_criterion(t, 3, starter);
                (got != want).then(|| format!("{} {starter:?}: {got} vs {want}", t.encoding()))
            })
        })
        .collect();
    assert!(mismatches.is_empty(), "counterexamples: {mismatches:?}");

    // The CLI front end must report the same result with exit code 0.
    let out = Command::new(env!("CARGO_BIN_EXE_gwmb"))
        .args(["oracle", "--max-depth", "3", "--max-branching", "3", "--reach", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["summary"].as_str().unwrap().starts_with("0 counterexamples"));
    assert_eq!(v["trees"].as_u64(), Some(1154));

    assert!(
        start.elapsed().as_secs_f64() < 120.0,
        "budget exceeded: {:?}",
        start.elapsed()
    );
}

#[test]
fn criterion_13_property_suites() {
    // Ordering invariants across a mixed battery.
    let battery = [
        "poisson:2.5",
        "poisson:3",
        "poisson:3.5",
        "geo-n:0.3",
        "geo-n0:0.25",
        "geo-n0:0.3",
        "binomial:3,0.8",
        "binomial:5,0.55",
        "pmf:0,0.2,0.3,0.5",
        "pmf:0.25,0.25,0.25,0.25",
    ];
    for spec in battery {
        let law = d(spec);
        let q = extinction_q(&law, &cfg());
        let none = solve_regime(&law, Regime::NoInfo, &cfg()).unwrap();
        let size = solve_regime(&law, Regime::SizeInfo, &cfg()).unwrap();
        let full = solve_regime(&law, Regime::FullInfo, &cfg()).unwrap();
        assert!(none.p_bar <= none.p_unconditional + 1e-12, "{spec}: maker start helps Maker");
        assert!(size.p_bar <= size.p_unconditional + 1e-12, "{spec}");
        assert!(none.p_unconditional >= q - 1e-12, "{spec}: finite trees are Breaker wins");
        assert!(
            size.p_conditional <= none.p_unconditional + 1e-9,
            "{spec}: size information helps Maker"
        );
        assert!(
            full.p_unconditional >= none.p_unconditional - 1e-9,
            "{spec}: full information helps Breaker"
        );
    }

    // Survival-skeleton equivalence: conditioning on survival first and
    // playing without information is the same game.
    for spec in ["poisson:3", "binomial:3,0.75", "geo-n0:0.3"] {
        let law = d(spec);
        let q = extinction_q(&law, &cfg());
        let skeleton = Dist::finite(law.skew(q).unwrap().weights().to_vec()).unwrap();
        let size = solve_size_info(&law, &cfg()).unwrap();
        let none = solve_empty(&skeleton, &cfg()).unwrap();
        assert!(
            (size.p_conditional - none.p_unconditional).abs() < 1e-7,
            "{spec}: skeleton equivalence for p"
        );
        assert!(
            (none.p_bar - (size.p_bar - q) / (1.0 - q)).abs() < 1e-7,
            "{spec}: skeleton equivalence for p_bar"
        );
    }

    // Strict inequality at Poisson(3): starting second helps Maker more
    // than a naive two-independent-subgames argument suggests, so the
    // exact Maker-start probability strictly exceeds g(p), and the
    // thinning formula inherits the same strict gap.
    let law = d("poisson:3");
    let exact = solve_empty(&law, &cfg()).unwrap();
    let g_of_p = law.pgf(exact.p_unconditional, 0).unwrap();
    assert!(
        exact.p_bar > g_of_p + 1e-6,
        "p_bar {} vs g(p) {g_of_p} not strictly separated",
        exact.p_bar
    );
    for convention in [AlphaConvention::StartAt1, AlphaConvention::StartAt2] {
        let bound = thinning_upper_bound(&law, convention, &cfg()).unwrap();
        assert!(bound > g_of_p + 1e-6, "{convention:?}: bound {bound} vs g(p) {g_of_p}");
        assert!(bound < 1.0, "{convention:?}");
    }

    // Survival skewing at the law's own extinction probability preserves
    // the mean; with no extinction mass the law is unchanged.
    for spec in
        ["poisson:3", "binomial:3,0.75", "geo-n0:0.3", "pmf:0.3,0.2,0.2,0.3", "pmf:0,0.2,0.3,0.5"]
    {
        let law = d(spec);
        let q = extinction_q(&law, &cfg());
        let skew = law.skew(q).unwrap();
        let mean: f64 = skew.weights().iter().enumerate().map(|(k, w)| k as f64 * w).sum();
        assert!(
            (mean - law.mean()).abs() < 1e-9,
            "{spec} at q = {q}: skew mean {mean} vs {}",
            law.mean()
        );
    }
}

#[test]
fn criterion_14_alpha_convention_verdict() {
    // The full report is printed so both the winning and the losing
    // conventions are on record.
    let verdict = alpha_verdict(&d("poisson:3"), &cfg()).unwrap();
    eprintln!("{verdict}");
    let best = &verdict.candidates[verdict.best];
    // Quoted target 0.14967 with a 2e-3 reproduction gate. The exact
    // Maker-start probability is 0.1494544217 (within the gate of the
    // quote), but the closest thinning-formula reproduction lands about
    // 4.6e-3 above it, so the gate fails; the verdict artifact documents
    // this rather than hiding it.
    assert!(
        verdict.best_within_2e3 && (best.p_bar - 0.14967).abs() <= 2e-3,
        "best convention (start {:?}, {:?} normalization) reproduces p_bar = {:.10}; \
         exact = {:.10}, quoted = 0.14967; error {:.3e} exceeds the 2e-3 gate",
        best.convention,
        best.normalization,
        best.p_bar,
        verdict.exact_p_bar,
        best.abs_err
    );
}
