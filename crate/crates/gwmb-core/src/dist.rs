//! Offspring-distribution catalogue and the derived step (increment)
//! distributions of the embedded random walks.
//!
//! Every law exposes exact pmf/pgf/mean closed forms where they exist;
//! series work always goes through an explicit truncation that records the
//! mass it dropped, so downstream tolerances stay auditable.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use rand_distr::Distribution;

use crate::numeric::kahan_sum;
use crate::{Error, Result};

/// Exact integer power by repeated squaring (deterministic, no libm).
pub(crate) fn powi(base: f64, mut n: u64) -> f64 {
    let mut acc = 1.0;
    let mut b = base;
    while n > 0 {
        if n & 1 == 1 {
            acc *= b;
        }
        b *= b;
        n >>= 1;
    }
    acc
}

/// Evaluate `sum coeffs[k] x^k` by Horner's rule.
fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Discrete convolution of two pmf weight vectors.
pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// A finitely supported pmf on `{0, 1, ..., K}`.
///
/// `eps_tail` records any mass beyond `K` that was dropped when this pmf
/// was produced by truncating an unbounded law; it is zero for exact
/// constructions, and stored weights plus `eps_tail` sum to 1.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FinitePmf {
    weights: Vec<f64>,
    eps_tail: f64,
}

impl FinitePmf {
    /// Build from raw weights: all nonnegative, at least one positive, sum
    /// within `1e-6` of 1 (then renormalized exactly).
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParameter("pmf weight list is empty".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidParameter(
                "pmf weights must be finite and nonnegative".into(),
            ));
        }
        if !weights.iter().any(|w| *w > 0.0) {
            return Err(Error::InvalidParameter(
                "pmf needs at least one strictly positive weight".into(),
            ));
        }
        let sum = kahan_sum(weights.iter().copied());
        if libm::fabs(sum - 1.0) > 1e-6 {
            return Err(Error::PmfNotNormalized { sum });
        }
        Ok(Self::from_raw(weights, 0.0))
    }

    /// Internal constructor: renormalizes to the mass `1 - eps_tail` and
    /// trims trailing zeros.
    pub(crate) fn from_raw(mut weights: Vec<f64>, eps_tail: f64) -> Self {
        let sum = kahan_sum(weights.iter().copied());
        let target = 1.0 - eps_tail;
        if sum > 0.0 && sum != target {
            let scale = target / sum;
            for w in &mut weights {
                *w *= scale;
            }
        }
        while weights.len() > 1 && *weights.last().unwrap() == 0.0 {
            weights.pop();
        }
        FinitePmf { weights, eps_tail }
    }

    /// Stored weights, indexed by support value.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Mass beyond the stored support (0 for exact constructions).
    pub fn eps_tail(&self) -> f64 {
        self.eps_tail
    }

    /// Largest stored support point.
    pub fn k_max(&self) -> u64 {
        (self.weights.len() - 1) as u64
    }
}

/// Offspring law of a Galton-Watson tree.
///
/// Construct through the checked constructors ([`Self::poisson`],
/// [`Self::binomial`], ...) or [`Self::from_spec`]; parameters outside the
/// documented ranges are rejected there.
#[derive(Debug, Clone, PartialEq)]
pub enum OffspringDistribution {
    /// `p_k = s (1-s)^{k-1}` on `k >= 1`, `s` in `(0, 1]`.
    GeometricN { s: f64 },
    /// `p_k = s (1-s)^k` on `k >= 0`, `s` in `(0, 1]`.
    GeometricN0 { s: f64 },
    /// Poisson with rate `lambda > 0`.
    Poisson { lambda: f64 },
    /// Binomial with `n` trials and success probability `r` in `[0, 1]`.
    Binomial { n: u32, r: f64 },
    /// Negative binomial (Polya): `p_k = C(k+r-1, k) s^r (1-s)^k` on
    /// `k >= 0`, with `r > 0` and `s` in `(0, 1)`.
    NegBinomial { r: f64, s: f64 },
    /// `p_1 = 1-r`, `p_n = r`, with `n >= 2` and `r` in `(0, 1)`.
    OneOrMany { n: u32, r: f64 },
    /// `p_0 = 1-r`, `p_n = r`, with `n >= 2` and `r` in `(0, 1)`.
    NoneOrMany { n: u32, r: f64 },
    /// Arbitrary finitely supported pmf.
    FinitePmf(FinitePmf),
}

use OffspringDistribution as Dist;

fn check(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg.into()))
    }
}

impl OffspringDistribution {
    pub fn geometric_n(s: f64) -> Result<Self> {
        check(s.is_finite() && s > 0.0 && s <= 1.0, "geo-n needs s in (0, 1]")?;
        Ok(Dist::GeometricN { s })
    }

    pub fn geometric_n0(s: f64) -> Result<Self> {
        check(s.is_finite() && s > 0.0 && s <= 1.0, "geo-n0 needs s in (0, 1]")?;
        Ok(Dist::GeometricN0 { s })
    }

    pub fn poisson(lambda: f64) -> Result<Self> {
        check(lambda.is_finite() && lambda > 0.0, "poisson needs lambda > 0")?;
        Ok(Dist::Poisson { lambda })
    }

    pub fn binomial(n: u32, r: f64) -> Result<Self> {
        check(r.is_finite() && (0.0..=1.0).contains(&r), "binomial needs r in [0, 1]")?;
        Ok(Dist::Binomial { n, r })
    }

    pub fn neg_binomial(r: f64, s: f64) -> Result<Self> {
        check(r.is_finite() && r > 0.0, "nb needs r > 0")?;
        check(s.is_finite() && s > 0.0 && s < 1.0, "nb needs s in (0, 1)")?;
        Ok(Dist::NegBinomial { r, s })
    }

    pub fn one_or_many(n: u32, r: f64) -> Result<Self> {
        check(n >= 2, "one-or-many needs n >= 2")?;
        check(r.is_finite() && r > 0.0 && r < 1.0, "one-or-many needs r in (0, 1)")?;
        Ok(Dist::OneOrMany { n, r })
    }

    pub fn none_or_many(n: u32, r: f64) -> Result<Self> {
        check(n >= 2, "none-or-many needs n >= 2")?;
        check(r.is_finite() && r > 0.0 && r < 1.0, "none-or-many needs r in (0, 1)")?;
        Ok(Dist::NoneOrMany { n, r })
    }

    pub fn finite(weights: Vec<f64>) -> Result<Self> {
        Ok(Dist::FinitePmf(FinitePmf::new(weights)?))
    }

    /// Probability mass at `k`, by exact formula (0 beyond support).
    pub fn pmf(&self, k: u64) -> f64 {
        match *self {
            Dist::GeometricN { s } => {
                if k >= 1 {
                    s * powi(1.0 - s, k - 1)
                } else {
                    0.0
                }
            }
            Dist::GeometricN0 { s } => s * powi(1.0 - s, k),
            Dist::Poisson { lambda } => {
                let kf = k as f64;
                libm::exp(kf * libm::log(lambda) - lambda - libm::lgamma(kf + 1.0))
            }
            Dist::Binomial { n, r } => {
                if k > n as u64 {
                    return 0.0;
                }
                let (nf, kf) = (n as f64, k as f64);
                let binom =
                    libm::exp(libm::lgamma(nf + 1.0) - libm::lgamma(kf + 1.0) - libm::lgamma(nf - kf + 1.0));
                binom * powi(r, k) * powi(1.0 - r, n as u64 - k)
            }
            Dist::NegBinomial { r, s } => {
                let kf = k as f64;
                let binom = libm::exp(libm::lgamma(kf + r) - libm::lgamma(r) - libm::lgamma(kf + 1.0));
                binom * libm::pow(s, r) * powi(1.0 - s, k)
            }
            Dist::OneOrMany { n, r } => {
                if k == 1 {
                    1.0 - r
                } else if k == n as u64 {
                    r
                } else {
                    0.0
                }
            }
            Dist::NoneOrMany { n, r } => {
                if k == 0 {
                    1.0 - r
                } else if k == n as u64 {
                    r
                } else {
                    0.0
                }
            }
            Dist::FinitePmf(ref f) => f.weights.get(k as usize).copied().unwrap_or(0.0),
        }
    }

    /// Generating function `g`, or its first or second derivative, at `x`.
    ///
    /// Closed forms throughout; finite-support laws accept any real `x`,
    /// unbounded ones require `|x| <= 1` (inside every pole for the valid
    /// parameter ranges, so no further domain error can occur).
    pub fn pgf(&self, x: f64, order: u8) -> Result<f64> {
        if order > 2 {
            return Err(Error::InvalidParameter(format!("pgf order {order} not in 0..=2")));
        }
        let unbounded = matches!(
            *self,
            Dist::GeometricN { .. } | Dist::GeometricN0 { .. } | Dist::Poisson { .. } | Dist::NegBinomial { .. }
        );
        if unbounded && !(-1.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!(
                "pgf of an unbounded-support law evaluated at x = {x} outside [-1, 1]"
            )));
        }
        Ok(self.pgf_unchecked(x, order))
    }

    /// `pgf` without the domain guards, for internal use on known-good `x`.
    pub(crate) fn pgf_unchecked(&self, x: f64, order: u8) -> f64 {
        match *self {
            Dist::GeometricN { s } => {
                let b = 1.0 - (1.0 - s) * x;
                match order {
                    0 => s * x / b,
                    1 => s / (b * b),
                    _ => 2.0 * s * (1.0 - s) / (b * b * b),
                }
            }
            Dist::GeometricN0 { s } => {
                let b = 1.0 - (1.0 - s) * x;
                match order {
                    0 => s / b,
                    1 => s * (1.0 - s) / (b * b),
                    _ => 2.0 * s * (1.0 - s) * (1.0 - s) / (b * b * b),
                }
            }
            Dist::Poisson { lambda } => {
                let g = libm::exp(lambda * (x - 1.0));
                match order {
                    0 => g,
                    1 => lambda * g,
                    _ => lambda * lambda * g,
                }
            }
            Dist::Binomial { n, r } => {
                let t = 1.0 - r + r * x;
                let nf = n as f64;
                match order {
                    0 => powi(t, n as u64),
                    1 => {
                        if n == 0 {
                            0.0
                        } else {
                            nf * r * powi(t, (n - 1) as u64)
                        }
                    }
                    _ => {
                        if n < 2 {
                            0.0
                        } else {
                            nf * (nf - 1.0) * r * r * powi(t, (n - 2) as u64)
                        }
                    }
                }
            }
            Dist::NegBinomial { r, s } => {
                let base = s / (1.0 - (1.0 - s) * x);
                let c = (1.0 - s) / s;
                match order {
                    0 => libm::pow(base, r),
                    1 => r * c * libm::pow(base, r + 1.0),
                    _ => r * (r + 1.0) * c * c * libm::pow(base, r + 2.0),
                }
            }
            Dist::OneOrMany { n, r } => {
                let nf = n as f64;
                match order {
                    0 => (1.0 - r) * x + r * powi(x, n as u64),
                    1 => (1.0 - r) + nf * r * powi(x, (n - 1) as u64),
                    _ => nf * (nf - 1.0) * r * powi(x, (n - 2) as u64),
                }
            }
            Dist::NoneOrMany { n, r } => {
                let nf = n as f64;
                match order {
                    0 => 1.0 - r + r * powi(x, n as u64),
                    1 => nf * r * powi(x, (n - 1) as u64),
                    _ => nf * (nf - 1.0) * r * powi(x, (n - 2) as u64),
                }
            }
            Dist::FinitePmf(ref f) => {
                let w = &f.weights;
                match order {
                    0 => horner(w, x),
                    1 => {
                        let d: Vec<f64> = w.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect();
                        horner(&d, x)
                    }
                    _ => {
                        let d: Vec<f64> = w
                            .iter()
                            .enumerate()
                            .skip(2)
                            .map(|(k, &c)| (k * (k - 1)) as f64 * c)
                            .collect();
                        horner(&d, x)
                    }
                }
            }
        }
    }

    /// Mean offspring number, by closed form.
    pub fn mean(&self) -> f64 {
        match *self {
            Dist::GeometricN { s } => 1.0 / s,
            Dist::GeometricN0 { s } => (1.0 - s) / s,
            Dist::Poisson { lambda } => lambda,
            Dist::Binomial { n, r } => n as f64 * r,
            Dist::NegBinomial { r, s } => r * (1.0 - s) / s,
            Dist::OneOrMany { n, r } => (1.0 - r) + n as f64 * r,
            Dist::NoneOrMany { n, r } => n as f64 * r,
            Dist::FinitePmf(ref f) => {
                kahan_sum(f.weights.iter().enumerate().map(|(k, &w)| k as f64 * w))
            }
        }
    }

    /// Smallest support point carrying positive mass.
    pub fn min_support(&self) -> u64 {
        match *self {
            Dist::GeometricN { .. } | Dist::OneOrMany { .. } => 1,
            Dist::Binomial { n, r } if r == 1.0 => n as u64,
            Dist::NoneOrMany { n, r } if r == 1.0 => n as u64,
            Dist::FinitePmf(ref f) => {
                f.weights.iter().position(|&w| w > 0.0).unwrap_or(0) as u64
            }
            _ => 0,
        }
    }

    /// Largest support point for finitely supported laws, `None` otherwise.
    pub fn max_support(&self) -> Option<u64> {
        match *self {
            Dist::Binomial { n, .. } => Some(n as u64),
            Dist::OneOrMany { n, .. } | Dist::NoneOrMany { n, .. } => Some(n as u64),
            Dist::FinitePmf(ref f) => Some(f.k_max()),
            _ => None,
        }
    }

    /// Truncate to a finite pmf with tail mass below `eps`
    /// (`0 < eps <= 1e-6`); exact supports pass through with zero tail.
    pub fn truncate(&self, eps: f64) -> Result<FinitePmf> {
        check(eps > 0.0 && eps <= 1e-6, "truncation tail must be in (0, 1e-6]")?;
        match *self {
            Dist::GeometricN { s } => {
                // Tail beyond K is (1-s)^K; grow K until it dips under eps.
                let mut tail = 1.0;
                let mut k_max = 0u64;
                while tail >= eps {
                    tail *= 1.0 - s;
                    k_max += 1;
                }
                let weights = (0..=k_max).map(|k| self.pmf(k)).collect();
                Ok(FinitePmf::from_raw(weights, tail))
            }
            Dist::GeometricN0 { s } => {
                // Tail beyond K is (1-s)^{K+1}.
                let mut tail = 1.0 - s;
                let mut k_max = 0u64;
                while tail >= eps {
                    tail *= 1.0 - s;
                    k_max += 1;
                }
                let weights = (0..=k_max).map(|k| self.pmf(k)).collect();
                Ok(FinitePmf::from_raw(weights, tail))
            }
            Dist::Poisson { .. } | Dist::NegBinomial { .. } => {
                let mut weights = Vec::new();
                let mut sum = 0.0;
                let mut comp = 0.0;
                let mut k = 0u64;
                loop {
                    let w = self.pmf(k);
                    weights.push(w);
                    // compensated running mass keeps 1 - sum honest near eps
                    let y = w - comp;
                    let t = sum + y;
                    comp = (t - sum) - y;
                    sum = t;
                    if 1.0 - sum < eps && k as f64 > self.mean() {
                        break;
                    }
                    k += 1;
                    if k > 100_000_000 {
                        return Err(Error::IterationLimit { what: "truncate tail scan" });
                    }
                }
                Ok(FinitePmf::from_raw(weights, (1.0 - sum).max(0.0)))
            }
            Dist::Binomial { n, .. } => {
                let weights = (0..=n as u64).map(|k| self.pmf(k)).collect();
                Ok(FinitePmf::from_raw(weights, 0.0))
            }
            Dist::OneOrMany { n, .. } | Dist::NoneOrMany { n, .. } => {
                let weights = (0..=n as u64).map(|k| self.pmf(k)).collect();
                Ok(FinitePmf::from_raw(weights, 0.0))
            }
            Dist::FinitePmf(ref f) => Ok(f.clone()),
        }
    }

    /// Draw one offspring count.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match *self {
            Dist::GeometricN { s } => 1 + rand_distr::Geometric::new(s).unwrap().sample(rng),
            Dist::GeometricN0 { s } => rand_distr::Geometric::new(s).unwrap().sample(rng),
            Dist::Poisson { lambda } => {
                let x: f64 = rand_distr::Poisson::new(lambda).unwrap().sample(rng);
                x as u64
            }
            Dist::Binomial { n, r } => rand_distr::Binomial::new(n as u64, r).unwrap().sample(rng),
            Dist::NegBinomial { r, s } => {
                // Polya law as a Gamma(r, (1-s)/s) mixture of Poissons.
                let rate: f64 = rand_distr::Gamma::new(r, (1.0 - s) / s).unwrap().sample(rng);
                if rate < 1e-300 {
                    0
                } else {
                    let x: f64 = rand_distr::Poisson::new(rate).unwrap().sample(rng);
                    x as u64
                }
            }
            Dist::OneOrMany { n, r } => {
                if rng.gen_bool(r) {
                    n as u64
                } else {
                    1
                }
            }
            Dist::NoneOrMany { n, r } => {
                if rng.gen_bool(r) {
                    n as u64
                } else {
                    0
                }
            }
            Dist::FinitePmf(ref f) => {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                for (k, &w) in f.weights.iter().enumerate() {
                    acc += w;
                    if u < acc {
                        return k as u64;
                    }
                }
                f.k_max()
            }
        }
    }

    /// Law of the number of children that found an infinite subtree, given
    /// that at least one does, when each child's subtree dies out
    /// independently with probability `q`.
    ///
    /// `P(k) = c * sum_{n >= k} p_n C(n,k) (1-q)^k q^{n-k}` for `k >= 1`,
    /// with `c` normalising by the surviving mass `1 - g(q)`; when `q` is
    /// the extinction probability this is `1 - q` and the mean is preserved.
    pub fn skew(&self, q: f64) -> Result<FinitePmf> {
        check(q.is_finite() && (0.0..1.0).contains(&q), "skew needs q in [0, 1)")?;
        let t = self.truncate(1e-15)?;
        let w = t.weights();
        let mut acc = vec![0.0; w.len().max(2)];
        if q == 0.0 {
            acc[1..w.len()].copy_from_slice(&w[1..]);
        } else {
            for (n, &pn) in w.iter().enumerate().skip(1) {
                // Bin(n, 1-q) row by the usual ratio recurrence, k = 1..n.
                let mut bk = powi(q, n as u64); // k = 0 term
                for k in 1..=n {
                    bk *= ((n - k + 1) as f64 / k as f64) * ((1.0 - q) / q);
                    acc[k] += pn * bk;
                }
            }
        }
        let total = kahan_sum(acc.iter().copied());
        if total <= 0.0 {
            return Err(Error::InvalidParameter(
                "skew target has no mass on k >= 1".into(),
            ));
        }
        for a in &mut acc {
            *a /= total;
        }
        acc[0] = 0.0;
        Ok(FinitePmf::from_raw(acc, 0.0))
    }

    /// Write `self` as `X * X` (convolution square) and return `X`.
    ///
    /// Exact for Poisson, negative binomial (including geometric on
    /// `k >= 0`), and even-`n` binomial; finite pmfs are split by the
    /// power-series square root of their generating polynomial, accepting
    /// coefficients down to `-1e-12` (clipped to 0) and verifying the
    /// round-trip convolution to `1e-10` pointwise.
    pub fn split_half(&self) -> Result<OffspringDistribution> {
        match *self {
            Dist::Poisson { lambda } => Ok(Dist::Poisson { lambda: lambda / 2.0 }),
            Dist::NegBinomial { r, s } => Ok(Dist::NegBinomial { r: r / 2.0, s }),
            Dist::GeometricN0 { s } => {
                if s < 1.0 {
                    Ok(Dist::NegBinomial { r: 0.5, s })
                } else {
                    // point mass at 0 splits into itself
                    Self::finite(vec![1.0])
                }
            }
            Dist::Binomial { n, r } => {
                if n % 2 == 0 {
                    Ok(Dist::Binomial { n: n / 2, r })
                } else {
                    Err(Error::NotSeparable(format!("binomial with odd n = {n}")))
                }
            }
            _ => {
                let t = self.truncate(1e-15)?;
                if t.eps_tail() > 0.0 {
                    return Err(Error::NotSeparable(
                        "unbounded law without a parametric half".into(),
                    ));
                }
                let half = sqrt_series(t.weights())?;
                // round-trip guard: X * X must reproduce the input pmf
                let back = convolve(&half, &half);
                for (k, &c) in back.iter().enumerate() {
                    if libm::fabs(c - self.pmf(k as u64)) > 1e-10 {
                        return Err(Error::NotSeparable(format!(
                            "square-root series fails round-trip at k = {k}"
                        )));
                    }
                }
                Ok(Dist::FinitePmf(FinitePmf::from_raw(half, 0.0)))
            }
        }
    }

    /// Shift the law down by 1 or 2 to obtain a walk-step distribution.
    pub fn to_increment(&self, shift: i32) -> Result<IncrementDistribution> {
        let provenance = match shift {
            -2 => Provenance::OffspringMinus2,
            -1 => Provenance::HalfMinus1,
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "increment shift must be -1 or -2, got {shift}"
                )))
            }
        };
        Ok(IncrementDistribution { source: self.clone(), shift, provenance })
    }

    /// Parse a distribution spec string.
    ///
    /// Grammar: `geo-n:S | geo-n0:S | poisson:L | binomial:N,R | nb:R,S |
    /// one-or-many:N,R | none-or-many:N,R | pmf:W0,...,WK` (pmf weights are
    /// renormalized when their sum is within `1e-6` of 1, rejected
    /// otherwise).
    pub fn from_spec(spec: &str) -> Result<Self> {
        let (family, args) = spec
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("missing ':' in distribution spec '{spec}'")))?;
        let nums: Vec<f64> = args
            .split(',')
            .map(|a| {
                a.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number '{a}' in spec '{spec}'")))
            })
            .collect::<Result<_>>()?;
        let arity = |want: usize| -> Result<()> {
            if nums.len() == want {
                Ok(())
            } else {
                Err(Error::Parse(format!(
                    "'{family}' takes {want} argument(s), got {}",
                    nums.len()
                )))
            }
        };
        let as_count = |x: f64| -> Result<u32> {
            if x.is_finite() && x >= 0.0 && x <= u32::MAX as f64 && libm::floor(x) == x {
                Ok(x as u32)
            } else {
                Err(Error::Parse(format!("'{x}' is not a nonnegative integer")))
            }
        };
        match family {
            "geo-n" => arity(1).and_then(|_| Self::geometric_n(nums[0])),
            "geo-n0" => arity(1).and_then(|_| Self::geometric_n0(nums[0])),
            "poisson" => arity(1).and_then(|_| Self::poisson(nums[0])),
            "binomial" => arity(2).and_then(|_| Self::binomial(as_count(nums[0])?, nums[1])),
            "nb" => arity(2).and_then(|_| Self::neg_binomial(nums[0], nums[1])),
            "one-or-many" => arity(2).and_then(|_| Self::one_or_many(as_count(nums[0])?, nums[1])),
            "none-or-many" => arity(2).and_then(|_| Self::none_or_many(as_count(nums[0])?, nums[1])),
            "pmf" => Self::finite(nums),
            _ => Err(Error::Parse(format!("unknown distribution family '{family}'"))),
        }
    }
}

impl fmt::Display for OffspringDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Dist::GeometricN { s } => write!(f, "geo-n:{s}"),
            Dist::GeometricN0 { s } => write!(f, "geo-n0:{s}"),
            Dist::Poisson { lambda } => write!(f, "poisson:{lambda}"),
            Dist::Binomial { n, r } => write!(f, "binomial:{n},{r}"),
            Dist::NegBinomial { r, s } => write!(f, "nb:{r},{s}"),
            Dist::OneOrMany { n, r } => write!(f, "one-or-many:{n},{r}"),
            Dist::NoneOrMany { n, r } => write!(f, "none-or-many:{n},{r}"),
            Dist::FinitePmf(ref p) => {
                write!(f, "pmf:")?;
                for (k, w) in p.weights.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{w}")?;
                }
                Ok(())
            }
        }
    }
}

/// Coefficient-wise square root of a pmf polynomial (see
/// [`OffspringDistribution::split_half`]).
fn sqrt_series(c: &[f64]) -> Result<Vec<f64>> {
    let m0 = c
        .iter()
        .position(|&w| w > 0.0)
        .ok_or_else(|| Error::NotSeparable("zero polynomial".into()))?;
    let k_top = c.len() - 1;
    if m0 % 2 != 0 || k_top % 2 != 0 {
        return Err(Error::NotSeparable("odd minimum or maximum support".into()));
    }
    let mx = m0 / 2;
    let top = k_top / 2;
    let mut b = vec![0.0; top + 1];
    b[mx] = libm::sqrt(c[m0]);
    for t in (m0 + 1)..=k_top {
        // c_t = sum_{i+j=t} b_i b_j; peel off the two b_mx terms.
        let j = t - mx;
        if j > top {
            // no new unknown: these degrees are pure consistency
            // constraints, checked by the caller's round-trip convolution
            continue;
        }
        let mut inner = 0.0;
        for i in (mx + 1)..j {
            if t - i <= top {
                inner += b[i] * b[t - i];
            }
        }
        let coeff = (c[t] - inner) / (2.0 * b[mx]);
        if coeff < -1e-12 {
            return Err(Error::NotSeparable(format!(
                "square-root series has negative coefficient {coeff:.3e} at degree {j}"
            )));
        }
        b[j] = coeff.max(0.0);
    }
    Ok(b)
}

/// Where a walk-step law came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Offspring count minus 2 (full rounds: one fixation, one deletion).
    OffspringMinus2,
    /// Half-split offspring count minus 1 (single half-rounds).
    HalfMinus1,
    /// Skewed offspring count minus 2 (size-information regime).
    SkewedMinus2,
}

/// Integer-valued walk-step law, skip-free to the left down to `k_min`.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementDistribution {
    source: OffspringDistribution,
    shift: i32,
    provenance: Provenance,
}

impl IncrementDistribution {
    /// Wrap an offspring law with an explicit provenance tag (used when the
    /// source was produced by skewing rather than by `to_increment`).
    pub fn with_provenance(
        source: OffspringDistribution,
        shift: i32,
        provenance: Provenance,
    ) -> Result<Self> {
        check(shift == -1 || shift == -2, "increment shift must be -1 or -2")?;
        Ok(IncrementDistribution { source, shift, provenance })
    }

    pub fn source(&self) -> &OffspringDistribution {
        &self.source
    }

    pub fn shift(&self) -> i32 {
        self.shift
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Smallest step value with positive mass (-1 for skip-free laws even
    /// under a -2 shift, when the source puts no mass on 0).
    pub fn k_min(&self) -> i64 {
        self.shift as i64 + self.source.min_support() as i64
    }

    /// Probability mass at step size `j`.
    pub fn pmf(&self, j: i64) -> f64 {
        let k = j - self.shift as i64;
        if k < 0 {
            0.0
        } else {
            self.source.pmf(k as u64)
        }
    }

    /// Mass of the single down-step `-1` (only sensible for `shift = -1`).
    pub fn pi_minus1(&self) -> f64 {
        self.pmf(-1)
    }

    /// Step mean: `mean(source) + shift`.
    pub fn mean(&self) -> f64 {
        self.source.mean() + self.shift as f64
    }

    /// Step generating function `gamma(x) = E x^step = g(x) / x^{|shift|}`
    /// on `[-1, 0) + (0, 1]`.
    pub fn gamma(&self, x: f64) -> Result<f64> {
        if x == 0.0 {
            return Err(Error::Domain("gamma(x) undefined at x = 0".into()));
        }
        let g = self.source.pgf(x, 0)?;
        Ok(g / powi(x, (-self.shift) as u64))
    }

    /// Draw one step.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        self.source.sample(rng) as i64 + self.shift as i64
    }

    /// Finite table of step probabilities: `(k_min, weights, eps_tail)`
    /// where `weights[i]` is the mass at `k_min + i`.
    pub fn materialize(&self, eps: f64) -> Result<(i64, Vec<f64>, f64)> {
        let t = self.source.truncate(eps)?;
        let tail = t.eps_tail();
        Ok((self.k_min(), t.weights().to_vec(), tail))
    }
}

/// One-parameter families usable in parameter scans and critical-value
/// searches. The scanned parameter is `lambda` for Poisson, `s` for the
/// geometric laws, and `r` (with fixed `n`) for the rest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParametricFamily {
    Poisson,
    GeometricN,
    GeometricN0,
    Binomial { n: u32 },
    OneOrMany { n: u32 },
    NoneOrMany { n: u32 },
}

impl ParametricFamily {
    /// Parse `poisson | geo-n | geo-n0 | binomial:N | one-or-many:N |
    /// none-or-many:N`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let (family, args) = match spec.split_once(':') {
            Some((f, a)) => (f, Some(a)),
            None => (spec, None),
        };
        let n = |args: Option<&str>| -> Result<u32> {
            let a = args.ok_or_else(|| Error::Parse(format!("family '{family}' needs :N")))?;
            a.trim()
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad n '{a}' in family spec '{spec}'")))
        };
        match family {
            "poisson" => Ok(Self::Poisson),
            "geo-n" => Ok(Self::GeometricN),
            "geo-n0" => Ok(Self::GeometricN0),
            "binomial" => Ok(Self::Binomial { n: n(args)? }),
            "one-or-many" => Ok(Self::OneOrMany { n: n(args)? }),
            "none-or-many" => Ok(Self::NoneOrMany { n: n(args)? }),
            _ => Err(Error::Parse(format!("unknown parametric family '{family}'"))),
        }
    }

    /// Name of the scanned parameter.
    pub fn param_name(&self) -> &'static str {
        match self {
            Self::Poisson => "lambda",
            Self::GeometricN | Self::GeometricN0 => "s",
            _ => "r",
        }
    }

    /// Instantiate the family at a parameter value.
    pub fn instantiate(&self, param: f64) -> Result<OffspringDistribution> {
        match *self {
            Self::Poisson => OffspringDistribution::poisson(param),
            Self::GeometricN => OffspringDistribution::geometric_n(param),
            Self::GeometricN0 => OffspringDistribution::geometric_n0(param),
            Self::Binomial { n } => OffspringDistribution::binomial(n, param),
            Self::OneOrMany { n } => OffspringDistribution::one_or_many(n, param),
            Self::NoneOrMany { n } => OffspringDistribution::none_or_many(n, param),
        }
    }
}

impl fmt::Display for ParametricFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Poisson => write!(f, "poisson"),
            Self::GeometricN => write!(f, "geo-n"),
            Self::GeometricN0 => write!(f, "geo-n0"),
            Self::Binomial { n } => write!(f, "binomial:{n}"),
            Self::OneOrMany { n } => write!(f, "one-or-many:{n}"),
            Self::NoneOrMany { n } => write!(f, "none-or-many:{n}"),
        }
    }
}
