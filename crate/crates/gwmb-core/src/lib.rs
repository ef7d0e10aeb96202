//! Analytic solvers and Monte-Carlo simulators for the (1,1) Maker-Breaker
//! "cut off the root" game played on Galton-Watson trees.
//!
//! Breaker deletes one edge per round, Maker fixates one; Breaker wins if the
//! root's component is eventually cut off (finite), Maker wins if it grows
//! forever. The crate computes Breaker's winning probability `p` (Breaker
//! starts) and `p_bar` (Maker starts) in three information regimes:
//!
//! - full information: the whole tree is revealed up front ([`analytic::solve_full_info`]),
//! - no information: nothing beyond already-revealed nodes ([`analytic::solve_empty`]),
//! - size information: each subtree's finiteness is revealed ([`analytic::solve_size_info`]),
//!
//! together with extinction probabilities, critical parameters, sufficient /
//! necessary bounds, random-walk analytics for the embedded walks
//! ([`walk`]), and independent verification layers ([`sim`]): Monte-Carlo
//! game and walk simulation, depth-iteration, and an exhaustive minimax
//! oracle on enumerated small trees.
//!
//! The crate is `no_std + alloc` compatible (the `std` feature, on by
//! default, only adds `std::error::Error` impls); all float math goes
//! through `libm` so results are bit-stable across platforms.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod analytic;
pub mod dist;
pub mod error;
pub mod numeric;
pub mod sim;
pub mod walk;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
