//! Closed-form and root-finding solvers for the three information regimes
//! of the root-cutting game on a Galton-Watson tree.
//!
//! Breaker deletes one edge per round, Maker then fixates one; Breaker wins
//! if the root's fixated component becomes finite. `p` denotes Breaker's
//! winning probability when Breaker moves first, `p_bar` when Maker moves
//! first. The regimes differ in what Breaker observes:
//!
//! * full information: the whole tree ([`solve_full_info`]),
//! * no information: only the shape explored so far ([`solve_empty`]),
//! * size information: whether the tree is infinite ([`solve_size_info`]).

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::dist::{OffspringDistribution, ParametricFamily};
use crate::numeric::{bisect, golden_min, smallest_root};
use crate::walk;
use crate::{Error, Result};

/// Information regime of the game.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Regime {
    FullInfo,
    NoInfo,
    SizeInfo,
}

/// How a solution was determined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Case {
    /// Breaker never wins (the tree contains a binary tree from the root).
    Trivial0,
    /// Breaker always wins.
    Trivial1,
    /// Competitive: `p` solves the regime's fixed-point equation in (0,1).
    Interior,
}

/// One-sided certificate outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Verdict {
    Yes,
    No,
    Inconclusive,
}

/// Numerical controls shared by the solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Absolute tolerance for root brackets and fixed-point iteration.
    pub abs_tol: f64,
    /// Iteration cap for the extinction fixed point.
    pub max_iter: u32,
    /// Grid resolution for sign-change scans.
    pub bracket_grid: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { abs_tol: 1e-12, max_iter: 1_000_000, bracket_grid: 4096 }
    }
}

/// Solved winning probabilities for one regime.
///
/// `p_conditional` equals `p_unconditional` except in the size-information
/// regime, where it is Breaker's probability given the tree is infinite.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegimeSolution {
    pub regime: Regime,
    pub p_conditional: f64,
    pub p_unconditional: f64,
    pub p_bar: f64,
    pub case: Case,
    /// Worst defect of the reported values in their defining equations (for
    /// simulation fallbacks, the confidence halfwidth plus bias bound).
    pub residual: f64,
    /// Set when the law sits within numerical reach of a regime transition.
    #[cfg_attr(feature = "serde", serde(skip))]
    pub near_critical: bool,
    /// Set when the values come from the Monte Carlo fallback.
    #[cfg_attr(feature = "serde", serde(skip))]
    pub via_simulation: bool,
}

impl RegimeSolution {
    fn trivial(regime: Regime, case: Case) -> Self {
        let p = match case {
            Case::Trivial0 => 0.0,
            _ => 1.0,
        };
        RegimeSolution {
            regime,
            p_conditional: p,
            p_unconditional: p,
            p_bar: p,
            case,
            residual: 0.0,
            near_critical: false,
            via_simulation: false,
        }
    }
}

/// Result of locating a parametric phase transition.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CriticalResult {
    /// Parameter value at which the game stops being competitive.
    pub param_c: f64,
    /// Breaker's probability approached from the competitive side.
    pub p_at_critical: f64,
    /// Full solution at the competitive bracket endpoint.
    pub solution: RegimeSolution,
}

/// The two certificate inequalities, reported with both sides evaluated.
///
/// Maker is certified to win with positive probability when `maker_lhs <
/// maker_rhs` (mean inverse family size below the quarter form); Breaker is
/// certified to win surely when `breaker_lhs > breaker_rhs` (the gap
/// `1/(1-x) - g''(x)` stays positive on [0,1)).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DekkingInequalities {
    pub maker_lhs: f64,
    pub maker_rhs: f64,
    pub breaker_lhs: f64,
    pub breaker_rhs: f64,
}

/// Sandwich bounds obtained from stochastic coupling with neighbor laws.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CouplingInterval {
    pub p_lo: f64,
    pub p_hi: f64,
    pub p_bar_lo: f64,
    pub p_bar_hi: f64,
    /// Law whose solution gives the lower bounds (stochastically larger).
    pub lower_neighbor: String,
    /// Law whose solution gives the upper bounds (stochastically smaller).
    pub upper_neighbor: String,
}

/// Combined verdicts from whichever certificates apply to a law.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundsReport {
    pub maker_has_chance: Verdict,
    pub breaker_sure: Verdict,
    pub dekking: Option<DekkingInequalities>,
    pub coupling: Option<CouplingInterval>,
}

/// Which certificate inequality to track for threshold location.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DekkingSide {
    Maker,
    Breaker,
}

/// Seed for the deterministic Monte Carlo fallback inside [`solve_empty`].
const FALLBACK_SEED: u64 = 0x6777_6d62;

/// Extinction probability of the Galton-Watson process: the smallest
/// nonnegative fixed point of the generating function.
///
/// Monotone iteration from 0 followed by a bisection polish, so slow
/// near-critical convergence cannot leave a biased answer.
pub fn extinction_q(d: &OffspringDistribution, cfg: &SolverConfig) -> f64 {
    if d.pmf(0) == 0.0 {
        return 0.0;
    }
    if d.mean() <= 1.0 {
        return 1.0;
    }
    let g = |x: f64| d.pgf_unchecked(x, 0);
    let mut x = 0.0;
    for _ in 0..cfg.max_iter {
        let next = g(x);
        if next - x <= cfg.abs_tol {
            x = next;
            break;
        }
        x = next;
    }
    // The iterate sits below q, so g(x) - x >= 0 there; expand to the right
    // until the sign flips, then polish.
    let f = |t: f64| g(t) - t;
    let mut lo = x;
    let mut hi = x;
    let mut step = cfg.abs_tol.max(1e-15);
    loop {
        hi += step;
        if hi >= 1.0 {
            return 1.0;
        }
        if f(hi) < 0.0 {
            break;
        }
        lo = hi;
        step *= 2.0;
    }
    let tol = (cfg.abs_tol * 1e-3).max(1e-15);
    bisect(f, lo, hi, tol, 200).unwrap_or(x)
}

/// Local minima of `h(x) = g(x) + (1-x) g'(x) - x` on (0,1), located by
/// scanning its derivative and refined by bisection; returned in ascending
/// abscissa order as `(x, h(x))`.
///
/// Because `h(1) = 0` and `h'(1) = -1` identically, every stretch where
/// `h < 0` must end in such a minimum, and the stretch where `h'` is
/// positive after a dip has unit-scale width, so a moderate grid cannot
/// miss one even when the dip itself is far narrower than the grid.
fn full_info_minima(d: &OffspringDistribution, cfg: &SolverConfig) -> Vec<(f64, f64)> {
    let h = |x: f64| {
        d.pgf_unchecked(x, 0) + (1.0 - x) * d.pgf_unchecked(x, 1) - x
    };
    let hp = |x: f64| (1.0 - x) * d.pgf_unchecked(x, 2) - 1.0;
    let n = cfg.bracket_grid;
    let mut minima = Vec::new();
    let mut prev_x = 0.0;
    let mut prev = hp(0.0);
    for i in 1..=n {
        let x = i as f64 / n as f64;
        let cur = hp(x);
        if prev < 0.0 && cur >= 0.0 {
            if let Ok(z) = bisect(hp, prev_x, x, cfg.abs_tol, 200) {
                minima.push((z, h(z)));
            }
        }
        prev = cur;
        prev_x = x;
    }
    minima
}

/// Breaker's winning probability with full knowledge of the tree.
///
/// `p` is the smallest root of `h(x) = g(x) + (1-x) g'(x) - x` in (0,1);
/// `h` always has the trivial root 1, so the game is competitive exactly
/// when `h` dips to zero earlier. Within a band of `1e-12` around a
/// tangent dip the abscissa of the dip is reported and the solution is
/// flagged `near_critical`.
pub fn solve_full_info(d: &OffspringDistribution, cfg: &SolverConfig) -> RegimeSolution {
    if d.pmf(0) == 0.0 && d.pmf(1) == 0.0 {
        return RegimeSolution::trivial(Regime::FullInfo, Case::Trivial0);
    }
    let h = |x: f64| {
        d.pgf_unchecked(x, 0) + (1.0 - x) * d.pgf_unchecked(x, 1) - x
    };
    const BAND: f64 = 1e-12;
    let minima = full_info_minima(d, cfg);
    let mut left = 0.0; // last abscissa known to have h > 0
    let mut shallowest = f64::INFINITY;
    for &(xm, hm) in &minima {
        shallowest = shallowest.min(hm);
        if hm < -BAND {
            // genuine crossing before this dip bottom
            let p = bisect(h, left, xm, cfg.abs_tol, 200).unwrap_or(xm);
            return RegimeSolution {
                regime: Regime::FullInfo,
                p_conditional: p,
                p_unconditional: p,
                p_bar: d.pgf_unchecked(p, 0),
                case: Case::Interior,
                residual: libm::fabs(h(p)),
                near_critical: libm::fabs(hm) <= 1e-10,
                via_simulation: false,
            };
        }
        if hm <= BAND {
            // tangent dip: report its abscissa
            return RegimeSolution {
                regime: Regime::FullInfo,
                p_conditional: xm,
                p_unconditional: xm,
                p_bar: d.pgf_unchecked(xm, 0),
                case: Case::Interior,
                residual: libm::fabs(hm),
                near_critical: true,
                via_simulation: false,
            };
        }
        left = xm;
    }
    let mut sol = RegimeSolution::trivial(Regime::FullInfo, Case::Trivial1);
    sol.near_critical = shallowest <= 1e-10;
    sol
}

/// Breaker's winning probabilities `(p, p_bar)` when Breaker sees only the
/// explored shape of the tree.
///
/// With `p_0 = 0` the answer solves `g(x) = x^2`; with `p_0 > 0` the
/// separable product formulas and the exact two-boundary walk solution are
/// both computed when available and cross-checked against each other (the
/// residual records their distance). If neither analytic route applies,
/// a deterministic Monte Carlo estimate is returned with
/// `via_simulation` set and the confidence halfwidth as the residual.
pub fn solve_empty(d: &OffspringDistribution, cfg: &SolverConfig) -> Result<RegimeSolution> {
    let p0 = d.pmf(0);
    if p0 == 0.0 {
        if d.pmf(1) == 0.0 {
            return Ok(RegimeSolution::trivial(Regime::NoInfo, Case::Trivial0));
        }
        if d.mean() <= 2.0 {
            return Ok(RegimeSolution::trivial(Regime::NoInfo, Case::Trivial1));
        }
        let f = |x: f64| d.pgf_unchecked(x, 0) - x * x;
        let p = smallest_root(f, 1e-9, 1.0 - 1e-9, cfg.bracket_grid, cfg.abs_tol)?;
        return Ok(RegimeSolution {
            regime: Regime::NoInfo,
            p_conditional: p,
            p_unconditional: p,
            p_bar: p * p,
            case: Case::Interior,
            residual: libm::fabs(f(p)),
            near_critical: false,
            via_simulation: false,
        });
    }
    if d.mean() <= 2.0 {
        return Ok(RegimeSolution::trivial(Regime::NoInfo, Case::Trivial1));
    }
    match walk::separable_solution(d, cfg) {
        Ok((p, p_bar)) => {
            let tb = walk::two_boundary_hit(d, 1, cfg)?;
            let residual = libm::fabs(p - tb.h1).max(libm::fabs(p_bar - tb.h2));
            Ok(RegimeSolution {
                regime: Regime::NoInfo,
                p_conditional: p,
                p_unconditional: p,
                p_bar,
                case: Case::Interior,
                residual,
                near_critical: false,
                via_simulation: false,
            })
        }
        Err(Error::NotSeparable(_)) => match walk::two_boundary_hit(d, 1, cfg) {
            Ok(tb) => Ok(RegimeSolution {
                regime: Regime::NoInfo,
                p_conditional: tb.h1,
                p_unconditional: tb.h1,
                p_bar: tb.h2,
                case: Case::Interior,
                residual: tb.boundary_residual.max(tb.root_residual),
                near_critical: false,
                via_simulation: false,
            }),
            Err(Error::NoNegativeRoot) | Err(Error::RootMultiplicity) => {
                simulate_empty(d, cfg)
            }
            Err(e) => Err(e),
        },
        Err(e) => Err(e),
    }
}

/// Deterministic Monte Carlo fallback for the no-information regime.
fn simulate_empty(d: &OffspringDistribution, cfg: &SolverConfig) -> Result<RegimeSolution> {
    let f = |x: f64| d.pgf_unchecked(x, 0) - x * x;
    let x1 = smallest_root(f, 1e-12, 1.0 - 1e-9, cfg.bracket_grid, cfg.abs_tol)?;
    let inc = d.to_increment(-2)?;
    let gcfg = crate::sim::GameConfig::for_walk(x1, 400_000, FALLBACK_SEED);
    let gcfg2 = crate::sim::GameConfig { master_seed: FALLBACK_SEED + 1, ..gcfg };
    let e1 = crate::sim::simulate_walk_hit(&inc, 1, &gcfg)?;
    let e2 = crate::sim::simulate_walk_hit(&inc, 2, &gcfg2)?;
    let halfwidth =
        0.5 * (e1.ci_hi - e1.ci_lo).max(e2.ci_hi - e2.ci_lo) + gcfg.bias_bound;
    Ok(RegimeSolution {
        regime: Regime::NoInfo,
        p_conditional: e1.p_hat,
        p_unconditional: e1.p_hat,
        p_bar: e2.p_hat,
        case: Case::Interior,
        residual: halfwidth,
        near_critical: false,
        via_simulation: true,
    })
}

/// Breaker's winning probabilities when Breaker is told only whether the
/// tree is infinite.
///
/// On survival the tree is re-rooted on its infinite skeleton; the
/// conditional probability solves `g(x(1-q) + q) = (1-q) x^2 + q` with `q`
/// the extinction probability, and the unconditional values follow from
/// `p = q + (1-q) p_cond` and `p_bar = g(p)`.
pub fn solve_size_info(d: &OffspringDistribution, cfg: &SolverConfig) -> Result<RegimeSolution> {
    let p0 = d.pmf(0);
    if p0 == 0.0 {
        let mut sol = solve_empty(d, cfg)?;
        sol.regime = Regime::SizeInfo;
        return Ok(sol);
    }
    if d.mean() <= 2.0 {
        return Ok(RegimeSolution::trivial(Regime::SizeInfo, Case::Trivial1));
    }
    let q = extinction_q(d, cfg);
    let h = |x: f64| {
        d.pgf_unchecked(x * (1.0 - q) + q, 0) - (1.0 - q) * x * x - q
    };
    let p_cond = smallest_root(h, 1e-9, 1.0 - 1e-9, cfg.bracket_grid, cfg.abs_tol)?;
    let p_unc = q + (1.0 - q) * p_cond;
    let p_bar = d.pgf_unchecked(p_unc, 0);
    debug_assert!(
        libm::fabs(q + (1.0 - q) * p_cond * p_cond - p_bar) <= 1e-10,
        "size-information fixed point violated"
    );
    Ok(RegimeSolution {
        regime: Regime::SizeInfo,
        p_conditional: p_cond,
        p_unconditional: p_unc,
        p_bar,
        case: Case::Interior,
        residual: libm::fabs(h(p_cond)),
        near_critical: false,
        via_simulation: false,
    })
}

/// Solve one regime.
pub fn solve_regime(
    d: &OffspringDistribution,
    regime: Regime,
    cfg: &SolverConfig,
) -> Result<RegimeSolution> {
    match regime {
        Regime::FullInfo => Ok(solve_full_info(d, cfg)),
        Regime::NoInfo => solve_empty(d, cfg),
        Regime::SizeInfo => solve_size_info(d, cfg),
    }
}

/// Locate the parameter at which a family's game stops being competitive
/// in the given regime, by bisection on the case of the solution.
///
/// The bracket endpoints must disagree about competitiveness. For the full
/// information regime `p_at_critical` is the abscissa of the deepest dip
/// of `h` at the competitive endpoint, which converges at the same rate as
/// the parameter itself; for the other regimes it is the unconditional
/// probability there.
pub fn critical_parameter(
    family: &ParametricFamily,
    regime: Regime,
    bracket: (f64, f64),
    cfg: &SolverConfig,
) -> Result<CriticalResult> {
    if matches!(family, ParametricFamily::NoneOrMany { .. }) {
        return Err(Error::InvalidParameter(
            "family has no competitive transition in its parameter".into(),
        ));
    }
    let competitive = |param: f64| -> Result<bool> {
        let d = family.instantiate(param)?;
        Ok(solve_regime(&d, regime, cfg)?.case == Case::Interior)
    };
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) {
        return Err(Error::InvalidParameter("bracket must satisfy lo < hi".into()));
    }
    let c_lo = competitive(lo)?;
    let c_hi = competitive(hi)?;
    if c_lo == c_hi {
        return Err(Error::NoTransitionInBracket);
    }
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if competitive(mid)? == c_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let param_c = 0.5 * (lo + hi);
    let comp_param = if c_lo { lo } else { hi };
    let d = family.instantiate(comp_param)?;
    let solution = solve_regime(&d, regime, cfg)?;
    let p_at_critical = match regime {
        Regime::FullInfo => full_info_minima(&d, cfg)
            .into_iter()
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .map(|(x, _)| x)
            .unwrap_or(solution.p_unconditional),
        _ => solution.p_unconditional,
    };
    Ok(CriticalResult { param_c, p_at_critical, solution })
}

/// Mean inverse family size `E[1/(xi+1)]`, which equals the integral of
/// the generating function over [0,1]; evaluated in closed form per family
/// with `log1p`/`expm1` to avoid cancellation near parameter boundaries.
pub fn integral_g_01(d: &OffspringDistribution) -> f64 {
    use OffspringDistribution as D;
    match *d {
        D::GeometricN { s } => {
            let a = 1.0 - s;
            if a == 0.0 {
                0.5
            } else {
                (s / (a * a)) * (-a - libm::log1p(-a))
            }
        }
        D::GeometricN0 { s } => {
            let a = 1.0 - s;
            if a == 0.0 {
                1.0
            } else {
                -(s / a) * libm::log1p(-a)
            }
        }
        D::Poisson { lambda } => -libm::expm1(-lambda) / lambda,
        D::Binomial { n, r } => {
            if r == 0.0 {
                1.0
            } else {
                -libm::expm1((n as f64 + 1.0) * libm::log1p(-r)) / (r * (n as f64 + 1.0))
            }
        }
        D::NegBinomial { r, s } => {
            let f = if r == 1.0 {
                -libm::log(s)
            } else {
                -libm::expm1((r - 1.0) * libm::log(s)) / (r - 1.0)
            };
            s / (1.0 - s) * f
        }
        D::OneOrMany { n, r } => (1.0 - r) / 2.0 + r / (n as f64 + 1.0),
        D::NoneOrMany { n, r } => (1.0 - r) + r / (n as f64 + 1.0),
        D::FinitePmf(ref pmf) => pmf
            .weights()
            .iter()
            .enumerate()
            .map(|(k, &w)| w / (k as f64 + 1.0))
            .sum(),
    }
}

fn dekking_maker(d: &OffspringDistribution) -> (f64, f64) {
    let p0 = d.pmf(0);
    let p1 = d.pmf(1);
    let lhs = integral_g_01(d);
    let rhs = 0.25 + 0.5 * p0 + 0.25 * (p0 + p1) * (p0 + p1);
    (lhs, rhs)
}

fn dekking_breaker(d: &OffspringDistribution) -> f64 {
    let m = |x: f64| 1.0 / (1.0 - x) - d.pgf_unchecked(x, 2);
    const GRID: usize = 100_000;
    let hi = 1.0 - 1e-9;
    let mut best_i = 0usize;
    let mut best = f64::INFINITY;
    for i in 0..=GRID {
        let x = hi * i as f64 / GRID as f64;
        let v = m(x);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let a = hi * best_i.saturating_sub(1) as f64 / GRID as f64;
    let b = hi * (best_i + 1).min(GRID) as f64 / GRID as f64;
    let (_, refined) = golden_min(m, a, b, 1e-13);
    refined.min(best)
}

/// Evaluate both certificate inequalities for a law.
///
/// The two certificates are mutually exclusive for any genuine law; if
/// rounding ever made both fire the report would be meaningless, so that
/// case is an error.
pub fn dekking_bounds(d: &OffspringDistribution, _cfg: &SolverConfig) -> Result<BoundsReport> {
    let (maker_lhs, maker_rhs) = dekking_maker(d);
    let breaker_lhs = dekking_breaker(d);
    let maker_fires = maker_lhs < maker_rhs;
    let breaker_fires = breaker_lhs > 0.0;
    let (maker_has_chance, breaker_sure) = match (maker_fires, breaker_fires) {
        (true, true) => return Err(Error::Contradiction("both certificates fired")),
        (true, false) => (Verdict::Yes, Verdict::No),
        (false, true) => (Verdict::No, Verdict::Yes),
        (false, false) => (Verdict::Inconclusive, Verdict::Inconclusive),
    };
    Ok(BoundsReport {
        maker_has_chance,
        breaker_sure,
        dekking: Some(DekkingInequalities {
            maker_lhs,
            maker_rhs,
            breaker_lhs,
            breaker_rhs: 0.0,
        }),
        coupling: None,
    })
}

/// Locate the parameter at which one certificate starts or stops firing.
pub fn dekking_threshold(
    family: &ParametricFamily,
    side: DekkingSide,
    bracket: (f64, f64),
    _cfg: &SolverConfig,
) -> Result<f64> {
    let fires = |param: f64| -> Result<bool> {
        let d = family.instantiate(param)?;
        Ok(match side {
            DekkingSide::Maker => {
                let (lhs, rhs) = dekking_maker(&d);
                lhs < rhs
            }
            DekkingSide::Breaker => dekking_breaker(&d) > 0.0,
        })
    };
    let (mut lo, mut hi) = bracket;
    let f_lo = fires(lo)?;
    if f_lo == fires(hi)? {
        return Err(Error::NoTransitionInBracket);
    }
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if fires(mid)? == f_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Sandwich the no-information solution of an odd binomial law between its
/// even neighbors, which are separable: `Binomial(n+1, r)` dominates the
/// law (so its solution is the lower bound) and `Binomial(n-1, r)` is
/// dominated (upper bound).
pub fn bounds_by_coupling(
    d: &OffspringDistribution,
    regime: Regime,
    cfg: &SolverConfig,
) -> Result<BoundsReport> {
    if regime != Regime::NoInfo {
        return Err(Error::InvalidParameter(
            "coupling bounds are defined for the no-information regime".into(),
        ));
    }
    let (n, r) = match *d {
        OffspringDistribution::Binomial { n, r } => (n, r),
        _ => {
            return Err(Error::InvalidParameter(
                "coupling bounds apply to binomial laws".into(),
            ))
        }
    };
    if n % 2 == 0 || n < 3 {
        return Err(Error::InvalidParameter(
            "coupling bounds apply to odd binomial orders of at least 3".into(),
        ));
    }
    let upper_law = OffspringDistribution::binomial(n + 1, r)?;
    let lower_law = OffspringDistribution::binomial(n - 1, r)?;
    let from_upper = solve_empty(&upper_law, cfg)?;
    let from_lower = solve_empty(&lower_law, cfg)?;
    let interval = CouplingInterval {
        p_lo: from_upper.p_unconditional,
        p_hi: from_lower.p_unconditional,
        p_bar_lo: from_upper.p_bar,
        p_bar_hi: from_lower.p_bar,
        lower_neighbor: upper_law.to_string(),
        upper_neighbor: lower_law.to_string(),
    };
    let maker_has_chance = if interval.p_hi < 1.0 - 1e-12 {
        Verdict::Yes
    } else {
        Verdict::Inconclusive
    };
    let breaker_sure = if interval.p_lo == 1.0 { Verdict::Yes } else { Verdict::Inconclusive };
    Ok(BoundsReport { maker_has_chance, breaker_sure, dekking: None, coupling: Some(interval) })
}
