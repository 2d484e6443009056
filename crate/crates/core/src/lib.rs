//! Solvers for the two-player Lottery Colonel Blotto game.
//!
//! Two players split fixed budgets across `n` battlefields and each
//! battlefield's value is shared in proportion to the resources invested.
//! The crate computes
//!
//! * the follower's unique best response to a leader allocation
//!   ([`best_response`]),
//! * the leader's optimal Stackelberg commitment ([`commitment`]),
//! * the pure Nash equilibrium of the simultaneous game ([`nash`]),
//! * comparisons between the two equilibria ([`analysis`]),
//!
//! together with brute-force grid [`oracle`]s used to cross-check the
//! closed forms and a small command-line front end ([`cli`]).
//!
//! ```
//! use lottery_blotto::{commitment, nash, GameInstance};
//!
//! let game = GameInstance::new(2.0, 1.0, vec![1.0, 5.0], vec![1.0, 0.5]).unwrap();
//! let se = commitment::optimal_commitment(&game).unwrap();
//! let ne = nash::solve_nash(&game).unwrap();
//! assert!(se.leader_utility >= ne.leader_utility);
//! ```

// `!(x > 0.0)` is how NaN gets rejected alongside non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod best_response;
pub mod cli;
pub mod commitment;
mod error;
pub mod game;
pub mod nash;
pub mod oracle;
mod search;

pub use analysis::{CoincidenceReport, ComparisonReport, LeaderAdvantageBounds, SweepRow};
pub use best_response::{best_response, BestResponseResult};
pub use commitment::{optimal_commitment, CaseTag, CommitmentSolution};
pub use error::{Error, Result};
pub use game::{Allocation, BattlefieldOrdering, GameInstance, InstanceFile, Player};
pub use nash::{solve_nash, NashSolution};
pub use oracle::GridSpec;

/// Relative tolerance used when deciding whether two value ratios are equal.
pub const RATIO_TOL: f64 = 1e-9;

/// `a == b` within a relative tolerance.
pub(crate) fn rel_eq(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}
