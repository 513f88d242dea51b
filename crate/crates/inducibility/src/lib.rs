//! Exact combinatorics of induced subtrees in rooted binary trees, with an
//! extremal-search layer and tanglegram crossing-number experiments.
//!
//! The crate is organised in four layers plus a command-line front end:
//!
//! * [`tree`] — canonical tree shapes ([`tree::TreeShape`]), ordered plane
//!   trees ([`tree::PlaneTree`]), shape enumeration, named families, leaf
//!   subsets and the induced-subtree operation.
//! * [`counting`] — exact counts `c(B, T)` of leaf subsets of a host `T`
//!   inducing a pattern `B`, densities `gamma(B, T)` as exact rationals, a
//!   brute-force oracle, and the closed-form quantities attached to
//!   caterpillars, complete trees and even trees.
//! * [`extremal`] — maximisation of `gamma(B, ·)` over hosts of a given size,
//!   exact for small sizes and beam-plus-local-search otherwise.
//! * [`tanglegram`] — plane-tree pairs with a leaf matching: layout crossing
//!   counts, exact tangle crossing numbers at small size, the quadruple
//!   lower bound, enumeration of small tanglegrams, and seeded Monte Carlo
//!   experiments.
//!
//! All counts are arbitrary-precision integers and all densities are exact
//! rationals; floating point appears only in Monte Carlo summaries and in the
//! numeric grid checks of [`counting::verify_lemma_functions`].

use thiserror::Error;

pub mod cli;
pub mod counting;
pub mod extremal;
pub mod rng;
pub mod tanglegram;
pub mod tree;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Text input could not be parsed; `pos` is a byte offset into the input.
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// A size-capped operation was asked to exceed its cap. `hint` names the
    /// flag that raises the cap when one exists.
    #[error("{what} is capped at {limit}, got {n}{hint}")]
    SizeLimit {
        what: &'static str,
        n: u64,
        limit: u64,
        hint: &'static str,
    },

    /// The brute-force oracle would have to visit more subsets than allowed.
    #[error("oracle budget exceeded: {subsets} subsets needed, budget is {budget}")]
    BudgetExceeded { subsets: u128, budget: u64 },

    /// `gamma(B, T)` requires the host to be at least as large as the pattern.
    #[error("host has {host} leaves, fewer than the pattern's {pattern}")]
    HostSmallerThanPattern { host: u64, pattern: u64 },

    /// A leaf rank fell outside the host's `1..=n` range.
    #[error("leaf rank {rank} outside 1..={n}")]
    InvalidRank { rank: u32, n: u32 },

    /// Any other malformed argument.
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
