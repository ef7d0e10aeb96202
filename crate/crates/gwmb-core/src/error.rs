//! Error type shared by every module in the crate.

use alloc::string::String;
use core::fmt;

/// Everything that can go wrong while constructing distributions, running
/// the solvers, or simulating.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A distribution or solver parameter is outside its admissible range.
    InvalidParameter(String),
    /// A function was evaluated outside its domain (e.g. a pgf of an
    /// unbounded-support law outside `[-1, 1]`).
    Domain(String),
    /// A finite pmf whose weights do not sum close enough to one.
    PmfNotNormalized { sum: f64 },
    /// The offspring law cannot be written as the sum of two iid copies.
    NotSeparable(String),
    /// A bracketing root search found no sign change over the given interval.
    NoSignChange { lo: f64, hi: f64 },
    /// An iterative scheme hit its iteration cap before converging.
    IterationLimit { what: &'static str },
    /// A root search expected to isolate one root found several.
    MultipleRoots { count: usize },
    /// The negative-argument fixed-point equation has no usable root
    /// because the law puts no mass on odd offspring counts.
    DegenerateParity,
    /// `g(x) = x^2` has no root in `(-1, 0)`; the two-boundary method
    /// does not apply (caller should fall back to simulation).
    NoNegativeRoot,
    /// The two characteristic roots are too close to separate reliably.
    RootMultiplicity,
    /// Both endpoints of a critical-parameter bracket are on the same
    /// side of the competitive/trivial transition.
    NoTransitionInBracket,
    /// Two results that must agree with each other do not.
    Contradiction(&'static str),
    /// A Monte-Carlo run left trials unresolved at the round cap.
    UndecidedTrials(u64),
    /// A distribution or family spec string could not be parsed.
    Parse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::PmfNotNormalized { sum } => {
                write!(f, "pmf weights sum to {sum:.17}, not 1 within 1e-6")
            }
            Error::NotSeparable(msg) => write!(f, "not separable: {msg}"),
            Error::NoSignChange { lo, hi } => {
                write!(f, "no sign change found on [{lo}, {hi}]")
            }
            Error::IterationLimit { what } => write!(f, "iteration limit reached in {what}"),
            Error::MultipleRoots { count } => {
                write!(f, "expected a single root, found {count} candidates")
            }
            Error::DegenerateParity => {
                write!(f, "no odd-offspring mass: parity split is degenerate")
            }
            Error::NoNegativeRoot => {
                write!(f, "g(x) = x^2 has no root in (-1, 0)")
            }
            Error::RootMultiplicity => {
                write!(f, "characteristic roots too close to separate")
            }
            Error::NoTransitionInBracket => {
                write!(f, "no competitive/trivial transition inside the bracket")
            }
            Error::Contradiction(msg) => write!(f, "internal contradiction: {msg}"),
            Error::UndecidedTrials(n) => {
                write!(f, "{n} simulation trials undecided at the round cap")
            }
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
