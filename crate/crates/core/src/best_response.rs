//! The follower's unique best response to a strictly positive leader
//! allocation.
//!
//! The follower's utility on battlefield `j` is concave in its own stake,
//! with marginal utility `x_aj v_bj / (x_aj + x_bj)^2`. Filling budget into
//! the battlefields with the highest marginal utility first ("water
//! filling") produces a support that is a prefix of the battlefields sorted
//! by descending `v_bj / x_aj`; on the support the stake is
//!
//! ```text
//! x_bj = sqrt(x_aj v_bj) (x_b + X_K) / S_K - x_aj,
//! S_K = sum_{l in K} sqrt(x_al v_bl),  X_K = sum_{l in K} x_al,
//! ```
//!
//! and every supported battlefield sits at the common water level
//! `S_K^2 / (x_b + X_K)^2`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{Allocation, GameInstance, Player};

/// Battlefields whose zero-stake marginal utility exceeds the water level by
/// less than this relative margin are treated as ties and left out of the
/// support.
pub const SUPPORT_TIE_REL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestResponseResult {
    /// The responder's allocation, in the caller's battlefield order.
    pub allocation: Allocation,
    /// Battlefields with a positive stake, in descending `v_bj / x_aj` order.
    pub support: Vec<usize>,
    /// Common marginal utility on the support.
    pub water_level: f64,
}

impl BestResponseResult {
    pub fn in_support(&self, j: usize) -> bool {
        self.support.contains(&j)
    }
}

/// Best response of a player with valuations `values` and budget `budget`
/// against the opponent's stakes `opponent`. Works for either role.
pub fn water_fill(values: &[f64], budget: f64, opponent: &[f64]) -> Result<BestResponseResult> {
    if values.len() != opponent.len() || values.is_empty() {
        return Err(Error::InvalidInput(format!(
            "{} valuations but {} opponent stakes",
            values.len(),
            opponent.len()
        )));
    }
    if let Some(j) = opponent.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::Unsupported(format!(
            "opponent stake on battlefield {j} is {}; the closed-form best response needs every \
             stake positive (floor zero entries at a small fraction of the budget first)",
            opponent[j]
        )));
    }
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    // Descending v/x; sort_by is stable so ties keep index order.
    order.sort_by(|&i, &j| (values[j] / opponent[j]).total_cmp(&(values[i] / opponent[i])));

    let mut root_sum = 0.0;
    let mut stake_sum = 0.0;
    let mut k = 0;
    let mut level = 0.0;
    for (m, &j) in order.iter().enumerate() {
        let next_root = root_sum + (opponent[j] * values[j]).sqrt();
        let next_stake = stake_sum + opponent[j];
        let next_level = (next_root / (budget + next_stake)).powi(2);
        let marginal = values[j] / opponent[j];
        if m > 0 && marginal <= next_level * (1.0 + SUPPORT_TIE_REL) {
            break;
        }
        root_sum = next_root;
        stake_sum = next_stake;
        level = next_level;
        k = m + 1;
    }

    let scale = (budget + stake_sum) / root_sum;
    let mut amounts = vec![0.0; n];
    for &j in &order[..k] {
        amounts[j] = ((opponent[j] * values[j]).sqrt() * scale - opponent[j]).max(0.0);
    }
    // Each entry is a difference of two terms of size x_aj; when the
    // opponent's stakes dwarf the budget that difference loses digits.
    let total: f64 = amounts.iter().sum();
    if total > 0.0 && total != budget {
        amounts.iter_mut().for_each(|x| *x *= budget / total);
    }
    Ok(BestResponseResult {
        allocation: Allocation::new(amounts, budget)?,
        support: order[..k].to_vec(),
        water_level: level,
    })
}

/// The follower's best response to `leader_alloc`.
pub fn best_response(instance: &GameInstance, leader_alloc: &Allocation) -> Result<BestResponseResult> {
    if leader_alloc.len() != instance.n() {
        return Err(Error::InvalidInput(format!(
            "leader allocation has {} entries, instance has {} battlefields",
            leader_alloc.len(),
            instance.n()
        )));
    }
    water_fill(instance.values_b(), instance.budget_b(), leader_alloc.amounts())
}

/// Best response of `player` to the other player's allocation.
pub fn best_response_of(instance: &GameInstance, player: Player, opponent: &Allocation) -> Result<BestResponseResult> {
    if opponent.len() != instance.n() {
        return Err(Error::InvalidInput("opponent allocation has the wrong length".into()));
    }
    water_fill(instance.values(player), instance.budget(player), opponent.amounts())
}

/// `d u_bj / d x_bj = x_aj v_bj / (x_aj + x_bj)^2`.
pub fn follower_marginal_utility(instance: &GameInstance, j: usize, x_aj: f64, x_bj: f64) -> Result<f64> {
    instance.check_index(j)?;
    if x_aj < 0.0 || x_bj < 0.0 {
        return Err(Error::InvalidInput(format!("stakes must be nonnegative, got {x_aj} and {x_bj}")));
    }
    let total = x_aj + x_bj;
    if total == 0.0 {
        return Err(Error::InvalidInput(format!(
            "marginal utility on battlefield {j} is unbounded when both stakes are zero"
        )));
    }
    Ok(x_aj * instance.values_b()[j] / (total * total))
}

/// Battlefields the follower contests against `leader_alloc`, in descending
/// `v_bj / x_aj` order. Never empty.
pub fn support_prefix(instance: &GameInstance, leader_alloc: &Allocation) -> Result<Vec<usize>> {
    Ok(best_response(instance, leader_alloc)?.support)
}
