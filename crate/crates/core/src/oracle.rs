//! Brute-force grid searches used to cross-check the closed-form solvers.
//!
//! Both searches enumerate every composition of the budget into `n` parts
//! at a fixed resolution, then polish the incumbent with local searches on
//! successively finer grids (each a quarter of the previous step).
//! Enumeration order is lexicographic and only strict improvements replace
//! the incumbent, so ties resolve to the lexicographically smallest point.

use serde::Serialize;

use crate::best_response::best_response;
use crate::error::{Error, Result};
use crate::game::{utility_unchecked, Allocation, GameInstance, Player};
use crate::{rel_eq, RATIO_TOL};

pub const DEFAULT_POINT_CAP: u64 = 10_000_000;
/// Each refinement round searches `+-LOCAL_RADIUS` fine steps per coordinate.
const LOCAL_RADIUS: i64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GridSpec {
    pub resolution: u64,
    pub refinement_rounds: u32,
    pub point_cap: u64,
}

impl GridSpec {
    pub fn new(resolution: u64, refinement_rounds: u32) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::InvalidInput(format!("grid resolution must be at least 2, got {resolution}")));
        }
        Ok(GridSpec { resolution, refinement_rounds, point_cap: DEFAULT_POINT_CAP })
    }

    pub fn with_point_cap(self, point_cap: u64) -> Self {
        GridSpec { point_cap, ..self }
    }

    fn check(&self) -> Result<()> {
        if self.resolution < 2 {
            return Err(Error::InvalidInput(format!("grid resolution must be at least 2, got {}", self.resolution)));
        }
        Ok(())
    }
}

pub(crate) fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n.saturating_sub(k));
    (0..k as u128).fold(1u128, |acc, i| acc * (n as u128 - i) / (i + 1))
}

fn local_points(n: usize) -> u128 {
    ((2 * LOCAL_RADIUS + 1) as u128).pow(n.saturating_sub(1) as u32)
}

fn check_cap(grid: &GridSpec, n: usize, exhaustive: u128) -> Result<()> {
    let required = exhaustive + grid.refinement_rounds as u128 * local_points(n);
    if required > grid.point_cap as u128 {
        return Err(Error::GridOverflow { required, cap: grid.point_cap });
    }
    Ok(())
}

/// Visit every composition of `total` into `parts` nonnegative integers in
/// lexicographic order.
fn for_each_composition(parts: usize, total: u64, visit: &mut dyn FnMut(&[u64])) {
    fn rec(point: &mut Vec<u64>, parts: usize, remaining: u64, visit: &mut dyn FnMut(&[u64])) {
        if point.len() + 1 == parts {
            point.push(remaining);
            visit(point);
            point.pop();
            return;
        }
        for k in 0..=remaining {
            point.push(k);
            rec(point, parts, remaining - k, visit);
            point.pop();
        }
    }
    rec(&mut Vec::with_capacity(parts), parts, total, visit);
}

/// Offsets `d` with `|d_i| <= LOCAL_RADIUS` on the first `n - 1`
/// coordinates and the last one closing the sum to zero.
fn for_each_offset(n: usize, visit: &mut dyn FnMut(&[i64])) {
    let mut d = vec![-LOCAL_RADIUS; n];
    if n == 1 {
        d[0] = 0;
        visit(&d);
        return;
    }
    loop {
        d[n - 1] = -d[..n - 1].iter().sum::<i64>();
        visit(&d);
        let mut i = n - 1;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if d[i] < LOCAL_RADIUS {
                d[i] += 1;
                break;
            }
            d[i] = -LOCAL_RADIUS;
        }
    }
}

/// Local polishing of `incumbent` under `value`; entries stay `>= floor`
/// times the current step.
fn refine(
    incumbent: &mut [f64],
    best: &mut f64,
    mut step: f64,
    rounds: u32,
    floor_steps: f64,
    value: &mut dyn FnMut(&[f64]) -> f64,
) {
    let n = incumbent.len();
    let mut trial = vec![0.0; n];
    for _ in 0..rounds {
        step /= 4.0;
        let center = incumbent.to_vec();
        for_each_offset(n, &mut |d| {
            for j in 0..n {
                trial[j] = center[j] + d[j] as f64 * step;
            }
            if trial.iter().any(|&x| x < floor_steps * step - 1e-15 * step) {
                return;
            }
            let v = value(&trial);
            if v > *best {
                *best = v;
                incumbent.copy_from_slice(&trial);
            }
        });
    }
}

/// Rescale to the exact budget after floating-point offsets.
fn close_budget(x: &[f64], budget: f64) -> Vec<f64> {
    let total: f64 = x.iter().sum();
    x.iter().map(|v| (v * budget / total).max(0.0)).collect()
}

/// Grid search for the follower's best response to `leader_alloc`.
pub fn oracle_best_response(
    instance: &GameInstance,
    leader_alloc: &Allocation,
    grid: &GridSpec,
) -> Result<(Allocation, f64)> {
    grid.check()?;
    let n = instance.n();
    if leader_alloc.len() != n {
        return Err(Error::InvalidInput("leader allocation has the wrong length".into()));
    }
    let res = grid.resolution;
    check_cap(grid, n, binomial(res + n as u64 - 1, n as u64 - 1))?;

    let xa = leader_alloc.amounts();
    let vb = instance.values_b();
    let step = instance.budget_b() / res as f64;
    let share = |j: usize, x: f64| if xa[j] + x == 0.0 { vb[j] } else { vb[j] * x / (xa[j] + x) };
    let tables: Vec<Vec<f64>> = (0..n).map(|j| (0..=res).map(|k| share(j, k as f64 * step)).collect()).collect();

    let mut best = f64::NEG_INFINITY;
    let mut best_point = vec![0u64; n];
    if n == 1 {
        best = tables[0][res as usize];
        best_point[0] = res;
    } else {
        // Innermost two coordinates are summed directly; the rest go
        // through the composition walk.
        let head = n - 2;
        let mut visit_head = |prefix: &[u64], remaining: u64| {
            let acc: f64 = prefix.iter().enumerate().map(|(j, &k)| tables[j][k as usize]).sum();
            let (t1, t2) = (&tables[head], &tables[head + 1]);
            for k in 0..=remaining {
                let v = acc + t1[k as usize] + t2[(remaining - k) as usize];
                if v > best {
                    best = v;
                    best_point[..head].copy_from_slice(prefix);
                    best_point[head] = k;
                    best_point[head + 1] = remaining - k;
                }
            }
        };
        if head == 0 {
            visit_head(&[], res);
        } else {
            for_each_composition(head + 1, res, &mut |p| visit_head(&p[..head], p[head]));
        }
    }

    let mut incumbent: Vec<f64> = best_point.iter().map(|&k| k as f64 * step).collect();
    let mut value = |x: &[f64]| (0..n).map(|j| share(j, x[j])).sum::<f64>();
    refine(&mut incumbent, &mut best, step, grid.refinement_rounds, 0.0, &mut value);
    let alloc = Allocation::new(close_budget(&incumbent, instance.budget_b()), instance.budget_b())?;
    let utility = utility_unchecked(instance, Player::Follower, xa, alloc.amounts());
    Ok((alloc, utility))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCommitment {
    pub allocation: Allocation,
    pub utility: f64,
    /// Follower support induced by `allocation`.
    pub support: Vec<usize>,
}

/// Grid search for the leader's optimal commitment. Every leader entry is
/// at least one grid step; the follower plays its exact best response.
pub fn oracle_commitment(instance: &GameInstance, grid: &GridSpec) -> Result<OracleCommitment> {
    grid.check()?;
    let n = instance.n();
    let res = grid.resolution;
    if res < n as u64 {
        return Err(Error::InvalidInput(format!("resolution {res} cannot give {n} battlefields one step each")));
    }
    check_cap(grid, n, binomial(res - 1, n as u64 - 1))?;
    let budget = instance.budget_a();
    let step = budget / res as f64;

    let mut value = |x: &[f64]| -> f64 {
        let Ok(leader) = Allocation::new(x.to_vec(), budget) else {
            return f64::NEG_INFINITY;
        };
        match best_response(instance, &leader) {
            Ok(br) => utility_unchecked(instance, Player::Leader, x, br.allocation.amounts()),
            Err(_) => f64::NEG_INFINITY,
        }
    };

    let mut best = f64::NEG_INFINITY;
    let mut incumbent = vec![0.0; n];
    let mut point = vec![0.0; n];
    // Compositions of res - n shifted up by one step per part.
    for_each_composition(n, res - n as u64, &mut |p| {
        for j in 0..n {
            point[j] = (p[j] + 1) as f64 * step;
        }
        let v = value(&point);
        if v > best {
            best = v;
            incumbent.copy_from_slice(&point);
        }
    });
    refine(&mut incumbent, &mut best, step, grid.refinement_rounds, 1.0, &mut value);

    let allocation = Allocation::new(close_budget(&incumbent, budget), budget)?;
    let br = best_response(instance, &allocation)?;
    let utility = utility_unchecked(instance, Player::Leader, allocation.amounts(), br.allocation.amounts());
    Ok(OracleCommitment { allocation, utility, support: br.support })
}

/// Whether `support` is a prefix of the ascending ratio order: no battlefield
/// outside it has a strictly smaller ratio than one inside. Ties at the
/// boundary count as prefixes in either order.
pub fn is_prefix_support(instance: &GameInstance, support: &[usize]) -> bool {
    let inside = support.iter().map(|&j| instance.ratio(j)).fold(f64::NEG_INFINITY, f64::max);
    let outside = (0..instance.n())
        .filter(|j| !support.contains(j))
        .map(|j| instance.ratio(j))
        .fold(f64::INFINITY, f64::min);
    inside <= outside || rel_eq(inside, outside, RATIO_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::total_utility;

    fn worked_example(r: f64) -> GameInstance {
        GameInstance::new(r, 1.0, vec![1.0, 5.0], vec![1.0, 0.5]).unwrap()
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(1003, 3), 167_668_501);
        assert_eq!(binomial(7, 0), 1);
    }

    #[test]
    fn compositions_are_lexicographic_and_complete() {
        let mut seen = Vec::new();
        for_each_composition(3, 2, &mut |p| seen.push(p.to_vec()));
        assert_eq!(seen.len() as u128, binomial(4, 2));
        assert_eq!(seen[0], vec![0, 0, 2]);
        assert_eq!(seen.last().unwrap(), &vec![2, 0, 0]);
        assert!(seen.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn offsets_sum_to_zero() {
        let mut count = 0;
        for_each_offset(3, &mut |d| {
            assert_eq!(d.iter().sum::<i64>(), 0);
            count += 1;
        });
        assert_eq!(count as u128, local_points(3));
    }

    #[test]
    fn single_battlefield_takes_everything() {
        let g = GameInstance::new(1.0, 2.0, vec![1.0], vec![3.0]).unwrap();
        let a = Allocation::new(vec![1.0], 1.0).unwrap();
        let (b, _) = oracle_best_response(&g, &a, &GridSpec::new(10, 1).unwrap()).unwrap();
        assert_eq!(b.amounts(), &[2.0]);
    }

    #[test]
    fn best_response_matches_worked_example() {
        let g = worked_example(2.0);
        let a = Allocation::new(vec![0.543, 1.457], 2.0).unwrap();
        let (b, u) = oracle_best_response(&g, &a, &GridSpec::new(1000, 2).unwrap()).unwrap();
        assert!((b[0] - 0.847).abs() < 1e-3 && (b[1] - 0.153).abs() < 1e-3);
        let exact = best_response(&g, &a).unwrap();
        let exact_u = total_utility(&g, Player::Follower, &a, &exact.allocation).unwrap();
        assert!((u - exact_u).abs() < 1e-4);
        assert!(u <= exact_u + 1e-6);
    }

    #[test]
    fn commitment_matches_worked_example() {
        let sol = oracle_commitment(&worked_example(0.5), &GridSpec::new(500, 2).unwrap()).unwrap();
        assert!((sol.utility - 2.458).abs() < 1e-3);
        assert!(is_prefix_support(&worked_example(0.5), &sol.support));
    }

    #[test]
    fn uniform_ratio_commitment_is_proportional() {
        let g = GameInstance::new(1.0, 1.0, vec![1.0, 3.0], vec![2.0, 6.0]).unwrap();
        let grid = GridSpec::new(200, 0).unwrap();
        let sol = oracle_commitment(&g, &grid).unwrap();
        assert!((sol.allocation[0] - 0.25).abs() <= 1.0 / 200.0 + 1e-12);
    }

    #[test]
    fn overflow_is_reported() {
        let g = GameInstance::new(1.0, 1.0, vec![1.0; 5], vec![1.0; 5]).unwrap();
        let a = Allocation::proportional(&[1.0; 5], 1.0).unwrap();
        let grid = GridSpec::new(1000, 0).unwrap();
        match oracle_best_response(&g, &a, &grid) {
            Err(Error::GridOverflow { required, cap }) => {
                assert_eq!(required, binomial(1004, 4));
                assert_eq!(cap, DEFAULT_POINT_CAP);
            }
            other => panic!("{other:?}"),
        }
        assert!(GridSpec::new(1, 0).is_err());
    }

    #[test]
    fn deterministic() {
        let g = GameInstance::new(1.3, 0.7, vec![1.0, 2.0, 0.5], vec![0.4, 2.0, 1.0]).unwrap();
        let grid = GridSpec::new(60, 2).unwrap();
        assert_eq!(oracle_commitment(&g, &grid).unwrap(), oracle_commitment(&g, &grid).unwrap());
    }

    #[test]
    fn prefix_check() {
        let g = GameInstance::new(1.0, 1.0, vec![1.0, 3.0, 2.0], vec![1.0, 1.0, 1.0]).unwrap();
        assert!(is_prefix_support(&g, &[0, 2]));
        assert!(!is_prefix_support(&g, &[0, 1]));
        assert!(is_prefix_support(&g, &[0, 1, 2]));
    }
}
