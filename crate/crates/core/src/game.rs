//! Game instances, allocations and utilities.
//!
//! A battlefield `j` with leader stake `x_aj` and follower stake `x_bj` pays
//! player `i` the share `x_ij / (x_aj + x_bj)` of its own valuation `v_ij`.
//! A battlefield nobody contests goes to the follower.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{rel_eq, RATIO_TOL};

/// Entries down to this (scaled) value are treated as rounding noise and
/// clamped to zero.
const NEG_CLAMP: f64 = 1e-12;
/// Relative tolerance on an allocation's sum.
const SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    /// Player `a`, who commits first in the Stackelberg game.
    Leader,
    /// Player `b`.
    Follower,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::Leader => Player::Follower,
            Player::Follower => Player::Leader,
        }
    }
}

/// Budgets and valuations of both players.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameInstance {
    budget_a: f64,
    budget_b: f64,
    values_a: Vec<f64>,
    values_b: Vec<f64>,
}

fn check_positive(what: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{what} must be a positive finite number, got {x}")))
    }
}

impl GameInstance {
    pub fn new(budget_a: f64, budget_b: f64, values_a: Vec<f64>, values_b: Vec<f64>) -> Result<Self> {
        check_positive("budget_a", budget_a)?;
        check_positive("budget_b", budget_b)?;
        if values_a.is_empty() {
            return Err(Error::InvalidInput("at least one battlefield is required".into()));
        }
        if values_a.len() != values_b.len() {
            return Err(Error::InvalidInput(format!(
                "values_a has {} entries but values_b has {}",
                values_a.len(),
                values_b.len()
            )));
        }
        for (j, (&a, &b)) in values_a.iter().zip(&values_b).enumerate() {
            check_positive(&format!("values_a[{j}]"), a)?;
            check_positive(&format!("values_b[{j}]"), b)?;
        }
        Ok(GameInstance { budget_a, budget_b, values_a, values_b })
    }

    /// Number of battlefields.
    pub fn n(&self) -> usize {
        self.values_a.len()
    }

    pub fn budget_a(&self) -> f64 {
        self.budget_a
    }

    pub fn budget_b(&self) -> f64 {
        self.budget_b
    }

    pub fn values_a(&self) -> &[f64] {
        &self.values_a
    }

    pub fn values_b(&self) -> &[f64] {
        &self.values_b
    }

    pub fn budget(&self, player: Player) -> f64 {
        match player {
            Player::Leader => self.budget_a,
            Player::Follower => self.budget_b,
        }
    }

    pub fn values(&self, player: Player) -> &[f64] {
        match player {
            Player::Leader => &self.values_a,
            Player::Follower => &self.values_b,
        }
    }

    /// Relative value ratio `v_aj / v_bj`.
    pub fn ratio(&self, j: usize) -> f64 {
        self.values_a[j] / self.values_b[j]
    }

    pub fn ratios(&self) -> Vec<f64> {
        (0..self.n()).map(|j| self.ratio(j)).collect()
    }

    /// Same valuations, different budgets.
    pub fn with_budgets(&self, budget_a: f64, budget_b: f64) -> Result<Self> {
        GameInstance::new(budget_a, budget_b, self.values_a.clone(), self.values_b.clone())
    }

    /// The game with the two players' roles exchanged.
    pub fn swapped(&self) -> Self {
        GameInstance {
            budget_a: self.budget_b,
            budget_b: self.budget_a,
            values_a: self.values_b.clone(),
            values_b: self.values_a.clone(),
        }
    }

    pub(crate) fn check_index(&self, j: usize) -> Result<()> {
        if j < self.n() {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("battlefield index {j} out of range for n = {}", self.n())))
        }
    }

    fn check_allocation(&self, alloc: &Allocation, player: Player) -> Result<()> {
        if alloc.len() != self.n() {
            return Err(Error::InvalidInput(format!(
                "{player:?} allocation has {} entries, instance has {} battlefields",
                alloc.len(),
                self.n()
            )));
        }
        if !rel_eq(alloc.budget(), self.budget(player), SUM_TOL) {
            return Err(Error::InvalidInput(format!(
                "{player:?} allocation budget {} does not match the instance budget {}",
                alloc.budget(),
                self.budget(player)
            )));
        }
        Ok(())
    }
}

/// One player's split of its budget across the battlefields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    amounts: Vec<f64>,
    budget: f64,
}

impl Allocation {
    /// Validates `amounts` against `budget`. Entries within rounding noise
    /// of zero are clamped to zero.
    pub fn new(mut amounts: Vec<f64>, budget: f64) -> Result<Self> {
        check_positive("allocation budget", budget)?;
        let floor = -NEG_CLAMP * budget.max(1.0);
        for (j, x) in amounts.iter_mut().enumerate() {
            if !x.is_finite() || *x < floor {
                return Err(Error::InvalidInput(format!("allocation entry {j} is {x}, expected >= 0")));
            }
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        let total: f64 = amounts.iter().sum();
        if !rel_eq(total, budget, SUM_TOL) {
            return Err(Error::InvalidInput(format!(
                "allocation sums to {total}, expected the budget {budget}"
            )));
        }
        Ok(Allocation { amounts, budget })
    }

    /// An allocation whose budget is the sum of its entries.
    pub fn from_amounts(amounts: Vec<f64>) -> Result<Self> {
        let budget = amounts.iter().sum();
        Allocation::new(amounts, budget)
    }

    /// `budget` split in proportion to `weights`.
    pub fn proportional(weights: &[f64], budget: f64) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidInput("proportional weights must have a positive sum".into()));
        }
        Allocation::new(weights.iter().map(|w| budget * w / total).collect(), budget)
    }

    pub fn amounts(&self) -> &[f64] {
        &self.amounts
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn len(&self) -> usize {
        self.amounts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amounts.is_empty()
    }

    pub fn into_amounts(self) -> Vec<f64> {
        self.amounts
    }

    /// Multiply every entry and the budget by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Allocation::new(self.amounts.iter().map(|x| x * c).collect(), self.budget * c)
    }
}

impl std::ops::Index<usize> for Allocation {
    type Output = f64;

    fn index(&self, j: usize) -> &f64 {
        &self.amounts[j]
    }
}

/// Share of battlefield `j` won by `player`, given both stakes.
pub(crate) fn battlefield_share(player: Player, x_a: f64, x_b: f64, value: f64) -> f64 {
    let total = x_a + x_b;
    if total == 0.0 {
        return match player {
            Player::Leader => 0.0,
            Player::Follower => value,
        };
    }
    let own = match player {
        Player::Leader => x_a,
        Player::Follower => x_b,
    };
    own * value / total
}

/// Utility `player` derives from battlefield `j`.
pub fn utility_per_battlefield(
    instance: &GameInstance,
    player: Player,
    j: usize,
    alloc_a: &Allocation,
    alloc_b: &Allocation,
) -> Result<f64> {
    instance.check_index(j)?;
    instance.check_allocation(alloc_a, Player::Leader)?;
    instance.check_allocation(alloc_b, Player::Follower)?;
    Ok(battlefield_share(player, alloc_a[j], alloc_b[j], instance.values(player)[j]))
}

/// Aggregate utility of `player`: the sum over battlefields.
pub fn total_utility(
    instance: &GameInstance,
    player: Player,
    alloc_a: &Allocation,
    alloc_b: &Allocation,
) -> Result<f64> {
    instance.check_allocation(alloc_a, Player::Leader)?;
    instance.check_allocation(alloc_b, Player::Follower)?;
    Ok(utility_unchecked(instance, player, alloc_a.amounts(), alloc_b.amounts()))
}

pub(crate) fn utility_unchecked(instance: &GameInstance, player: Player, x_a: &[f64], x_b: &[f64]) -> f64 {
    let values = instance.values(player);
    (0..instance.n())
        .map(|j| battlefield_share(player, x_a[j], x_b[j], values[j]))
        .sum()
}

/// Permutation sorting battlefields by ascending `v_aj / v_bj`.
///
/// `permutation[k]` is the original index of the battlefield placed at
/// position `k` of the canonical order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BattlefieldOrdering {
    pub permutation: Vec<usize>,
    pub ratios: Vec<f64>,
}

impl BattlefieldOrdering {
    /// Reorder a vector given in original indexing into canonical order.
    pub fn to_canonical<T: Clone>(&self, original: &[T]) -> Vec<T> {
        self.permutation.iter().map(|&j| original[j].clone()).collect()
    }

    /// Map a vector given in canonical order back to original indexing.
    pub fn to_original<T: Clone + Default>(&self, canonical: &[T]) -> Vec<T> {
        let mut out = vec![T::default(); canonical.len()];
        for (k, &j) in self.permutation.iter().enumerate() {
            out[j] = canonical[k].clone();
        }
        out
    }

    /// Original index of canonical position `k`.
    pub fn original_index(&self, k: usize) -> usize {
        self.permutation[k]
    }

    pub fn is_identity(&self) -> bool {
        self.permutation.iter().enumerate().all(|(k, &j)| k == j)
    }
}

/// Sort battlefields by ascending relative value ratio. Ties keep their
/// original relative order.
pub fn canonical_ordering(instance: &GameInstance) -> (GameInstance, BattlefieldOrdering) {
    let ratios = instance.ratios();
    let mut permutation: Vec<usize> = (0..instance.n()).collect();
    permutation.sort_by(|&i, &j| ratios[i].total_cmp(&ratios[j]));
    let ordering = BattlefieldOrdering {
        ratios: permutation.iter().map(|&j| ratios[j]).collect(),
        permutation,
    };
    let sorted = GameInstance {
        budget_a: instance.budget_a,
        budget_b: instance.budget_b,
        values_a: ordering.to_canonical(&instance.values_a),
        values_b: ordering.to_canonical(&instance.values_b),
    };
    (sorted, ordering)
}

/// Replace battlefield `j` by `t` identical sub-battlefields carrying `1/t`
/// of its values and of both players' stakes. The sub-battlefields are
/// appended after the remaining battlefields.
pub fn split_battlefield(
    instance: &GameInstance,
    j: usize,
    t: usize,
    alloc_a: &Allocation,
    alloc_b: &Allocation,
) -> Result<(GameInstance, Allocation, Allocation)> {
    instance.check_index(j)?;
    instance.check_allocation(alloc_a, Player::Leader)?;
    instance.check_allocation(alloc_b, Player::Follower)?;
    if t == 0 {
        return Err(Error::InvalidInput("split count t must be at least 1".into()));
    }
    let tf = t as f64;
    let split = |v: &[f64]| -> Vec<f64> {
        let mut out: Vec<f64> = v.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &x)| x).collect();
        out.extend(std::iter::repeat_n(v[j] / tf, t));
        out
    };
    let inst = GameInstance {
        budget_a: instance.budget_a,
        budget_b: instance.budget_b,
        values_a: split(&instance.values_a),
        values_b: split(&instance.values_b),
    };
    let a = Allocation { amounts: split(alloc_a.amounts()), budget: alloc_a.budget };
    let b = Allocation { amounts: split(alloc_b.amounts()), budget: alloc_b.budget };
    Ok((inst, a, b))
}

/// Merge a group of battlefields that share the leader's valuation and both
/// players' stakes into one battlefield whose values and stakes are the
/// group sums. The merged battlefield takes the position of the smallest
/// index in the group.
pub fn merge_battlefields(
    instance: &GameInstance,
    group: &BTreeSet<usize>,
    alloc_a: &Allocation,
    alloc_b: &Allocation,
) -> Result<(GameInstance, Allocation, Allocation)> {
    instance.check_allocation(alloc_a, Player::Leader)?;
    instance.check_allocation(alloc_b, Player::Follower)?;
    let Some(&first) = group.iter().next() else {
        return Err(Error::InvalidInput("merge group is empty".into()));
    };
    for &j in group {
        instance.check_index(j)?;
    }
    for &j in group.iter().skip(1) {
        let same = |x: f64, y: f64| rel_eq(x, y, RATIO_TOL) || (x == 0.0 && y == 0.0);
        let checks = [
            ("leader value", instance.values_a[first], instance.values_a[j]),
            ("leader stake", alloc_a[first], alloc_a[j]),
            ("follower stake", alloc_b[first], alloc_b[j]),
        ];
        for (what, x, y) in checks {
            if !same(x, y) {
                return Err(Error::Precondition(format!(
                    "battlefields {first} and {j} differ in {what} ({x} vs {y})"
                )));
            }
        }
    }
    let merge = |v: &[f64]| -> Vec<f64> {
        let mut out = Vec::with_capacity(v.len() + 1 - group.len());
        for (i, &x) in v.iter().enumerate() {
            if i == first {
                out.push(group.iter().map(|&g| v[g]).sum());
            } else if !group.contains(&i) {
                out.push(x);
            }
        }
        out
    };
    let inst = GameInstance {
        budget_a: instance.budget_a,
        budget_b: instance.budget_b,
        values_a: merge(&instance.values_a),
        values_b: merge(&instance.values_b),
    };
    let a = Allocation { amounts: merge(alloc_a.amounts()), budget: alloc_a.budget };
    let b = Allocation { amounts: merge(alloc_b.amounts()), budget: alloc_b.budget };
    Ok((inst, a, b))
}

/// On-disk instance format. `n` is inferred from the array lengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub budget_a: f64,
    pub budget_b: f64,
    pub values_a: Vec<f64>,
    pub values_b: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub commit_a: Option<Vec<f64>>,
}

impl InstanceFile {
    /// Parse and validate. Error messages carry the line number of the
    /// offending field.
    pub fn parse(text: &str) -> Result<(InstanceFile, GameInstance)> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))?;
        let at = |key: &str, err: Error| -> Error {
            let msg = match err {
                Error::InvalidInput(m) => m,
                other => other.to_string(),
            };
            match line_of_key(text, key) {
                Some(line) => Error::InvalidInput(format!("line {line}: {msg}")),
                None => Error::InvalidInput(msg),
            }
        };
        if file.values_a.len() != file.values_b.len() {
            return Err(at(
                "values_b",
                Error::InvalidInput(format!(
                    "values_a has {} entries but values_b has {}",
                    file.values_a.len(),
                    file.values_b.len()
                )),
            ));
        }
        let fields: [(&str, &[f64]); 4] = [
            ("budget_a", std::slice::from_ref(&file.budget_a)),
            ("budget_b", std::slice::from_ref(&file.budget_b)),
            ("values_a", &file.values_a),
            ("values_b", &file.values_b),
        ];
        for (key, xs) in fields {
            if xs.is_empty() {
                return Err(at(key, Error::InvalidInput(format!("{key} must not be empty"))));
            }
            if let Some(x) = xs.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
                return Err(at(key, Error::InvalidInput(format!("{key} entries must be strictly positive, got {x}"))));
            }
        }
        let game = GameInstance::new(file.budget_a, file.budget_b, file.values_a.clone(), file.values_b.clone())?;
        if let Some(commit) = &file.commit_a {
            if commit.len() != game.n() {
                return Err(at(
                    "commit_a",
                    Error::InvalidInput(format!("commit_a has {} entries, expected {}", commit.len(), game.n())),
                ));
            }
            Allocation::new(commit.clone(), game.budget_a()).map_err(|e| at("commit_a", e))?;
        }
        Ok((file, game))
    }

    pub fn from_instance(game: &GameInstance) -> Self {
        InstanceFile {
            budget_a: game.budget_a,
            budget_b: game.budget_b,
            values_a: game.values_a.clone(),
            values_b: game.values_b.clone(),
            commit_a: None,
        }
    }
}

fn line_of_key(text: &str, key: &str) -> Option<usize> {
    let quoted = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&quoted)).map(|i| i + 1)
}
