//! Random-walk analytics for integer walks with i.i.d. steps bounded below
//! by -1 (skip-free to the left) or -2.
//!
//! The embedded walks of the game are: offspring minus 2 (one full round:
//! Breaker deletes an edge, Maker fixates one and reveals its children) and
//! half-law minus 1 (half rounds for separable offspring laws). This module
//! computes hitting and parity-conditioned probabilities, evaluates the
//! separable product formulas for the no-information game, and solves the
//! two-absorbing-boundary problem exactly for down-steps of size at most 2.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::analytic::{self, SolverConfig};
use crate::dist::{powi, IncrementDistribution, OffspringDistribution};
use crate::numeric::{bisect, sign_change_cells, smallest_root};
use crate::{Error, Result};

/// Probabilities of the walk started at 0:
/// `rho` = P(hit -1 eventually), `sigma` = P(stay strictly positive from
/// step 1 on), `theta` = P(return to 0 before hitting -1), `rho_odd` =
/// P(hitting time of -1 is odd | finite), `theta_odd` = P(return time is
/// odd | returns before -1), `pi_minus1` = P(single step = -1).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WalkQuantities {
    pub rho: f64,
    pub sigma: f64,
    pub theta: f64,
    pub rho_odd: f64,
    pub theta_odd: f64,
    pub pi_minus1: f64,
}

/// Exact solution of the two-absorbing-boundary problem for a walk with
/// steps `>= -2`: absorption means entering `{0, -1}` (level 0 is reachable
/// only exactly, level -1 only by a -2 step from level 1).
///
/// `u(m) = a x1^m + b x2^m` is the absorption probability from level `m`,
/// where `x1 in (0,1)` and `x2 in (-1,0)` solve `g(x) = x^2` and the
/// coefficients fit the boundary values `u(0) = u(-1) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoBoundarySolution {
    pub x1: f64,
    pub x2: f64,
    pub a: f64,
    pub b: f64,
    /// Absorption probabilities from levels 1 and 2.
    pub h1: f64,
    pub h2: f64,
    /// The start level this solution was requested for, and `u(start)`.
    pub start: u32,
    pub h: f64,
    /// P(absorb at level -1) from start levels 1 and 2 (unconditional:
    /// the walk may also escape to infinity).
    pub split_minus1_raw: [f64; 2],
    /// Worst deviation of the fitted `u(0)`, `u(-1)` from 1.
    pub boundary_residual: f64,
    /// Worst `|g(x_i) - x_i^2|` over the two roots.
    pub root_residual: f64,
}

/// Which start level defines the absorption split used as the thinning
/// parameter in the Maker-start bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaConvention {
    StartAt1,
    StartAt2,
}

/// Whether the split is reported as the raw probability of absorbing at -1
/// or conditioned on absorption happening at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitNormalization {
    Raw,
    Conditional,
}

impl TwoBoundarySolution {
    /// Absorption probability from integer level `m >= -1`.
    pub fn level(&self, m: i32) -> f64 {
        if m >= 0 {
            self.a * powi(self.x1, m as u64) + self.b * powi(self.x2, m as u64)
        } else {
            self.a / powi(self.x1, (-m) as u64) + self.b / powi(self.x2, (-m) as u64)
        }
    }

    /// The absorption split used as a thinning parameter: P(absorbed at -1)
    /// from the convention's start level, raw or conditioned on absorption.
    pub fn alpha(&self, convention: AlphaConvention, normalization: SplitNormalization) -> f64 {
        let (raw, total) = match convention {
            AlphaConvention::StartAt1 => (self.split_minus1_raw[0], self.h1),
            AlphaConvention::StartAt2 => (self.split_minus1_raw[1], self.h2),
        };
        match normalization {
            SplitNormalization::Raw => raw,
            SplitNormalization::Conditional => raw / total,
        }
    }
}

/// P(the walk ever hits -1), for skip-free walks (`k_min = -1`).
///
/// By the branching duality `gamma(x) = 1` reduces to `g_X(x) = x` for the
/// `+1`-shifted step law `X`, so this is the extinction probability of a
/// Galton-Watson process — 1 whenever the drift is nonpositive.
pub fn hitting_rho(inc: &IncrementDistribution, cfg: &SolverConfig) -> Result<f64> {
    if inc.k_min() < -1 {
        return Err(Error::InvalidParameter(
            "hitting_rho needs a skip-free walk (no steps below -1)".into(),
        ));
    }
    let src = inc.source();
    match inc.shift() {
        -1 => Ok(analytic::extinction_q(src, cfg)),
        _ => {
            // shift -2 with source support starting at 1: factoring one x out
            // of g turns gamma(x) = 1 into g(x) = x^2 with the same dispatch
            // structure as extinction.
            if src.pmf(1) == 0.0 {
                return Ok(0.0);
            }
            if src.mean() <= 2.0 {
                return Ok(1.0);
            }
            let f = |x: f64| src.pgf_unchecked(x, 0) - x * x;
            smallest_root(f, 1e-9, 1.0 - 1e-9, cfg.bracket_grid, cfg.abs_tol)
        }
    }
}

/// The renewal and parity quantities of a positive-drift skip-free walk.
///
/// `rho` comes from [`hitting_rho`]; `sigma` and `theta` follow from the
/// renewal identities `sigma = pi_{-1}(1-rho)/rho`, `theta = 1 -
/// pi_{-1}/rho`; the parity split solves `gamma(z) = -1` on `(-rho, 0)`
/// (one sign change required) via `z = rho(1 - 2 rho_odd)`; `theta_odd`
/// uses the product identity `theta*theta_odd =
/// pi_{-1}(1-rho_odd)/(rho(2 rho_odd - 1))`, avoiding division by a small
/// `theta`.
pub fn conditioned_quantities(
    inc: &IncrementDistribution,
    cfg: &SolverConfig,
) -> Result<WalkQuantities> {
    if inc.k_min() != -1 {
        return Err(Error::InvalidParameter(
            "conditioned quantities need steps with minimum exactly -1".into(),
        ));
    }
    let pi = inc.pi_minus1();
    if pi <= 0.0 {
        return Err(Error::InvalidParameter("walk needs positive mass on the -1 step".into()));
    }
    if inc.mean() <= 0.0 {
        return Err(Error::InvalidParameter("conditioned quantities need positive drift".into()));
    }
    let rho = hitting_rho(inc, cfg)?;
    let sigma = pi * (1.0 - rho) / rho;
    let theta = 1.0 - pi / rho;

    // Parity of the hitting time: gamma(z) = -1 for one z in (-rho, 0).
    let f = |z: f64| inc.gamma(z).unwrap_or(f64::INFINITY) + 1.0;
    let (zlo, zhi) = (-rho + 1e-12, -1e-12);
    let cells = sign_change_cells(f, zlo, zhi, 2048);
    let z = match cells.len() {
        0 => return Err(Error::DegenerateParity),
        1 => {
            let (a, b) = cells[0];
            if a == b {
                a
            } else {
                // tolerance scales with rho: dividing by 2 rho below would
                // otherwise amplify an absolute tolerance badly when the
                // descent probability is small
                bisect(f, a, b, (rho * 1e-15).min(cfg.abs_tol), 200)?
            }
        }
        n => return Err(Error::MultipleRoots { count: n }),
    };
    let rho_odd = 0.5 * (1.0 - z / rho);
    let product = pi * (1.0 - rho_odd) / (rho * (2.0 * rho_odd - 1.0));
    if theta < 1e-12 {
        return Err(Error::Domain("theta vanishes; parity conditioning undefined".into()));
    }
    let theta_odd = product / theta;
    Ok(WalkQuantities { rho, sigma, theta, rho_odd, theta_odd, pi_minus1: pi })
}

/// Breaker's winning probabilities `(p, p_bar)` in the no-information game
/// for a separable offspring law with mean above 2, via the half-walk
/// product formulas:
///
/// `p = rho (1 - sigma rho_odd / D)` and
/// `p_bar = rho^2 (1 - 2 sigma rho_odd (1 - rho_odd) / D)` with
/// `D = 1 - theta (1 - theta_odd)`.
pub fn separable_solution(d: &OffspringDistribution, cfg: &SolverConfig) -> Result<(f64, f64)> {
    if d.mean() <= 2.0 {
        return Err(Error::InvalidParameter(
            "separable formulas apply to offspring mean above 2".into(),
        ));
    }
    let x = d.split_half()?;
    if x.pmf(0) == 0.0 {
        // The half-walk never steps down: d puts no mass below 2, the tree
        // contains a binary tree almost surely, and Breaker never wins.
        return Ok((0.0, 0.0));
    }
    let inc = x.to_increment(-1)?;
    let wq = conditioned_quantities(&inc, cfg)?;
    let denom = 1.0 - wq.theta * (1.0 - wq.theta_odd);
    let p = wq.rho * (1.0 - wq.sigma * wq.rho_odd / denom);
    let p_bar =
        wq.rho * wq.rho * (1.0 - 2.0 * wq.sigma * wq.rho_odd * (1.0 - wq.rho_odd) / denom);
    Ok((p, p_bar))
}

/// Exact two-boundary absorption solver for the full-round walk (steps
/// `xi - 2 >= -2`) of a law with `p_0 > 0` and mean above 2.
pub fn two_boundary_hit(
    d: &OffspringDistribution,
    start: u32,
    cfg: &SolverConfig,
) -> Result<TwoBoundarySolution> {
    if !(start == 1 || start == 2) {
        return Err(Error::InvalidParameter("start level must be 1 or 2".into()));
    }
    if d.pmf(0) <= 0.0 || d.mean() <= 2.0 {
        return Err(Error::InvalidParameter(
            "two-boundary method needs p_0 > 0 and mean above 2".into(),
        ));
    }
    let f = |x: f64| d.pgf_unchecked(x, 0) - x * x;
    let x1 = smallest_root(f, 1e-12, 1.0 - 1e-9, cfg.bracket_grid, cfg.abs_tol)?;
    let neg_cells = sign_change_cells(f, -1.0 + 1e-12, -1e-12, cfg.bracket_grid);
    let x2 = match neg_cells.first() {
        None => return Err(Error::NoNegativeRoot),
        Some(&(a, b)) if a == b => a,
        Some(&(a, b)) => bisect(f, a, b, cfg.abs_tol, 200)?,
    };
    // The basis {x1^m, x2^m} degenerates at a double characteristic root.
    let fp = |x: f64| d.pgf_unchecked(x, 1) - 2.0 * x;
    if libm::fabs(fp(x1)) < 1e-10 || libm::fabs(fp(x2)) < 1e-10 {
        return Err(Error::RootMultiplicity);
    }

    // u(0) = a + b = 1, u(-1) = a/x1 + b/x2 = 1.
    let a = (1.0 - 1.0 / x2) / (1.0 / x1 - 1.0 / x2);
    let b = 1.0 - a;
    // Split v(m): boundary values v(0) = 0, v(-1) = 1 isolate absorption at
    // level -1; v(m) = a' (x1^m - x2^m) with a' = x1 x2/(x2 - x1).
    let v1 = -x1 * x2;
    let v2 = -x1 * x2 * (x1 + x2);

    let mut sol = TwoBoundarySolution {
        x1,
        x2,
        a,
        b,
        h1: 0.0,
        h2: 0.0,
        start,
        h: 0.0,
        split_minus1_raw: [v1, v2],
        boundary_residual: 0.0,
        root_residual: libm::fabs(f(x1)).max(libm::fabs(f(x2))),
    };
    sol.h1 = sol.level(1);
    sol.h2 = sol.level(2);
    sol.h = sol.level(start as i32);
    sol.boundary_residual =
        libm::fabs(sol.level(0) - 1.0).max(libm::fabs(sol.level(-1) - 1.0));
    Ok(sol)
}

/// Maker-start bound from the geometric thinning formula:
/// `p_bar_bound = p_0 + sum_{k>=1} p_k p (alpha + (1-alpha) p)^{k-1}`,
/// with `alpha` the probability (under the chosen start convention, raw
/// normalization) that the full-round walk is absorbed at level -1.
///
/// For `p_0 = 0` the split collapses (`alpha = 0`) and the value is
/// `g(p) = p^2`.
pub fn thinning_upper_bound(
    d: &OffspringDistribution,
    convention: AlphaConvention,
    cfg: &SolverConfig,
) -> Result<f64> {
    thinning_upper_bound_with(d, convention, SplitNormalization::Raw, cfg)
}

/// [`thinning_upper_bound`] with an explicit choice of split normalization.
pub fn thinning_upper_bound_with(
    d: &OffspringDistribution,
    convention: AlphaConvention,
    normalization: SplitNormalization,
    cfg: &SolverConfig,
) -> Result<f64> {
    let sol = analytic::solve_empty(d, cfg)?;
    let p = sol.p_unconditional;
    let p0 = d.pmf(0);
    if p0 == 0.0 {
        return Ok(d.pgf_unchecked(p, 0));
    }
    if d.mean() <= 2.0 {
        return Err(Error::InvalidParameter("thinning bound needs mean above 2".into()));
    }
    let tb = two_boundary_hit(d, 1, cfg)?;
    let alpha = tb.alpha(convention, normalization);
    let t = d.truncate(1e-15)?;
    let base = alpha + (1.0 - alpha) * p;
    let mut sum = t.weights().first().copied().unwrap_or(0.0);
    let mut pow = 1.0; // base^{k-1}
    for &w in t.weights().iter().skip(1) {
        sum += w * p * pow;
        pow *= base;
    }
    Ok(sum)
}

/// One evaluated candidate for the thinning parameter convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaCandidate {
    pub convention: AlphaConvention,
    pub normalization: SplitNormalization,
    pub alpha: f64,
    pub p_bar: f64,
    pub abs_err: f64,
}

/// Comparison of every start/normalization convention for the thinning
/// formula against the exact Maker-start probability.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaVerdict {
    pub exact_p_bar: f64,
    pub candidates: Vec<AlphaCandidate>,
    /// Index into `candidates` of the closest reproduction.
    pub best: usize,
    pub best_within_2e3: bool,
}

/// Evaluate the thinning formula under all four conventions and compare
/// with the exact Maker-start probability `u(2)`.
///
/// The exact Breaker-start absorption values obey the second-order
/// recursion `u(k) = (x1+x2) u(k-1) - x1 x2 u(k-2)`, which no single-alpha
/// geometric form `p(alpha + (1-alpha)p)^{k-1}` can reproduce, so the
/// thinning formula is an upper-bound device rather than an identity; this
/// report records how close each convention lands.
pub fn alpha_verdict(d: &OffspringDistribution, cfg: &SolverConfig) -> Result<AlphaVerdict> {
    let exact = analytic::solve_empty(d, cfg)?.p_bar;
    let mut candidates = Vec::with_capacity(4);
    for convention in [AlphaConvention::StartAt1, AlphaConvention::StartAt2] {
        for normalization in [SplitNormalization::Raw, SplitNormalization::Conditional] {
            let tb = two_boundary_hit(d, 1, cfg)?;
            let alpha = tb.alpha(convention, normalization);
            let p_bar = thinning_upper_bound_with(d, convention, normalization, cfg)?;
            candidates.push(AlphaCandidate {
                convention,
                normalization,
                alpha,
                p_bar,
                abs_err: libm::fabs(p_bar - exact),
            });
        }
    }
    let best = candidates
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.abs_err.partial_cmp(&b.abs_err).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let best_within_2e3 = candidates[best].abs_err <= 2e-3;
    Ok(AlphaVerdict { exact_p_bar: exact, candidates, best, best_within_2e3 })
}

impl fmt::Display for AlphaVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "exact Maker-start probability u(2) = {:.10}", self.exact_p_bar)?;
        for (i, c) in self.candidates.iter().enumerate() {
            let mark = if i == self.best { " <- closest" } else { "" };
            writeln!(
                f,
                "start {} {:<12} alpha = {:.10}  p_bar = {:.10}  |err| = {:.3e}{}",
                match c.convention {
                    AlphaConvention::StartAt1 => 1,
                    AlphaConvention::StartAt2 => 2,
                },
                match c.normalization {
                    SplitNormalization::Raw => "raw",
                    SplitNormalization::Conditional => "conditional",
                },
                c.alpha,
                c.p_bar,
                c.abs_err,
                mark
            )?;
        }
        write!(
            f,
            "exact values satisfy u(k) = (x1+x2) u(k-1) - x1 x2 u(k-2); no single-alpha \
             geometric form matches all k, so the thinning formula stays a bound"
        )
    }
}

/// Closed interval `[lo, hi]` produced by the enumeration oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn contains(&self, x: f64) -> bool {
        self.lo - 1e-12 <= x && x <= self.hi + 1e-12
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Brackets for `rho`, `sigma`, `theta`, `rho_odd` from exact path
/// enumeration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkBrackets {
    pub rho: Bracket,
    pub sigma: Bracket,
    pub theta: Bracket,
    pub rho_odd: Bracket,
}

/// Enumerate all length-`steps` paths of a finitely supported skip-free
/// walk exactly (a level-indexed distribution recursion, so cost is
/// polynomial, not `support^steps`), closing the still-alive mass with the
/// tail law `P(descend a level eventually) = rho` per level.
///
/// The returned brackets are exact up to that tail closure; the analytic
/// quantities must land inside them.
pub fn enumeration_brackets(
    inc: &IncrementDistribution,
    steps: u32,
    rho: f64,
) -> Result<WalkBrackets> {
    if inc.k_min() != -1 {
        return Err(Error::InvalidParameter("enumeration oracle needs skip-free steps".into()));
    }
    let (k_min, weights, eps_tail) = inc.materialize(1e-15)?;
    if eps_tail > 0.0 {
        return Err(Error::InvalidParameter(
            "enumeration oracle needs finitely supported steps".into(),
        ));
    }
    let pi = |j: i64| -> f64 {
        let idx = j - k_min;
        if idx < 0 {
            0.0
        } else {
            weights.get(idx as usize).copied().unwrap_or(0.0)
        }
    };
    let k_max = k_min + weights.len() as i64 - 1;
    let top = (steps as i64 * k_max.max(1)) as usize;

    // --- rho: absorb at -1 (reachable only by the -1 step from level 0).
    let mut cur = vec![0.0; top + 2];
    cur[0] = 1.0;
    let mut rho_lo = 0.0;
    let mut rho_odd_lo = 0.0;
    for t in 1..=steps {
        let mut next = vec![0.0; top + 2];
        for (m, &mass) in cur.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            for (i, &w) in weights.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let to = m as i64 + k_min + i as i64;
                if to < 0 {
                    rho_lo += mass * w;
                    if t % 2 == 1 {
                        rho_odd_lo += mass * w;
                    }
                } else if (to as usize) < next.len() {
                    next[to as usize] += mass * w;
                }
            }
        }
        cur = next;
    }
    let rho_tail: f64 = cur
        .iter()
        .enumerate()
        .map(|(m, &mass)| mass * powi(rho, m as u64 + 1))
        .sum();
    let rho_bracket = Bracket { lo: rho_lo, hi: rho_lo + rho_tail };
    let rho_odd_bracket = Bracket {
        lo: rho_odd_lo / rho_bracket.hi,
        hi: ((rho_odd_lo + rho_tail) / rho_bracket.lo).min(1.0),
    };

    // --- theta: return to 0 before hitting -1 (walk restarted at 0).
    let mut cur = vec![0.0; top + 2];
    let mut theta_lo = 0.0;
    let mut absorbed_minus1 = pi(-1);
    // first step
    {
        theta_lo += pi(0);
        for j in 1..=k_max {
            if (j as usize) < cur.len() {
                cur[j as usize] = pi(j);
            }
        }
    }
    for _ in 2..=steps {
        let mut next = vec![0.0; top + 2];
        for (m, &mass) in cur.iter().enumerate() {
            if mass == 0.0 || m == 0 {
                continue;
            }
            for (i, &w) in weights.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let to = m as i64 + k_min + i as i64;
                if to == 0 {
                    theta_lo += mass * w;
                } else if to < 0 {
                    absorbed_minus1 += mass * w;
                } else if (to as usize) < next.len() {
                    next[to as usize] += mass * w;
                }
            }
        }
        cur = next;
    }
    let _ = absorbed_minus1;
    // From level m >= 1 the walk reaches 0 before -1 with probability at
    // most rho^m (it must descend m levels, and each descent succeeds with
    // probability rho).
    let theta_tail: f64 = cur
        .iter()
        .enumerate()
        .skip(1)
        .map(|(m, &mass)| mass * powi(rho, m as u64))
        .sum();
    let theta_bracket = Bracket { lo: theta_lo, hi: theta_lo + theta_tail };

    let pi1 = pi(-1);
    let sigma_bracket =
        Bracket { lo: 1.0 - pi1 - theta_bracket.hi, hi: 1.0 - pi1 - theta_bracket.lo };

    Ok(WalkBrackets {
        rho: rho_bracket,
        sigma: sigma_bracket,
        theta: theta_bracket,
        rho_odd: rho_odd_bracket,
    })
}
