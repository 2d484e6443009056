//! Pure Nash equilibrium of the simultaneous game.
//!
//! Write `rho_h = v_bh / v_ah` and `z = x_a / x_b`. At the equilibrium both
//! players stake positively everywhere and the ratio of their water levels
//! `mu` solves
//!
//! `f(mu) = sum_h v_bh mu (mu - rho_h z) prod_{j != h} (mu + rho_j)^2 = 0`
//!
//! with the root in `[min rho_h z, max rho_h z]`. Given `mu`,
//! `x_bh` is proportional to `v_bh rho_h mu / (mu + rho_h)^2` and
//! `x_ah = (mu / rho_h) x_bh`.

use serde::Serialize;

use crate::best_response::best_response_of;
use crate::error::{Error, Result};
use crate::game::{utility_unchecked, Allocation, GameInstance, Player};
use crate::rel_eq;

/// Sign-change scan resolution on the root interval.
pub const ROOT_SCAN_CELLS: usize = 4096;
/// Relative bisection width for `mu`.
pub const ROOT_TOL: f64 = 1e-12;
/// Each equilibrium allocation must match the best response to the other
/// within this fraction of the budget.
pub const EQUILIBRIUM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NashSolution {
    pub mu_star: f64,
    pub alloc_a: Allocation,
    pub alloc_b: Allocation,
    pub leader_utility: f64,
    pub follower_utility: f64,
    /// Every root of `f` found on the interval that passed the equilibrium
    /// check.
    pub roots: Vec<f64>,
}

fn rhos(instance: &GameInstance) -> Vec<f64> {
    instance.values_b().iter().zip(instance.values_a()).map(|(b, a)| b / a).collect()
}

/// The equilibrium polynomial `f(mu)` in product form.
pub fn nash_poly(instance: &GameInstance, mu: f64) -> f64 {
    let rho = rhos(instance);
    let z = instance.budget_a() / instance.budget_b();
    let vb = instance.values_b();
    (0..instance.n())
        .map(|h| {
            let others: f64 = (0..instance.n()).filter(|&j| j != h).map(|j| (mu + rho[j]).powi(2)).product();
            vb[h] * mu * (mu - rho[h] * z) * others
        })
        .sum()
}

/// `f(mu) / prod_j (mu + rho_j)^2`: same sign as `f` on `mu > 0`, without
/// the overflow-prone product.
fn reduced_poly(vb: &[f64], rho: &[f64], z: f64, mu: f64) -> f64 {
    vb.iter().zip(rho).map(|(&v, &r)| v * mu * (mu - r * z) / (mu + r).powi(2)).sum()
}

/// `[min rho_h z, max rho_h z]`.
pub fn root_interval(instance: &GameInstance) -> (f64, f64) {
    let z = instance.budget_a() / instance.budget_b();
    let rho = rhos(instance);
    let lo = rho.iter().copied().fold(f64::INFINITY, f64::min) * z;
    let hi = rho.iter().copied().fold(f64::NEG_INFINITY, f64::max) * z;
    (lo, hi)
}

/// Both allocations for a given `mu`.
pub fn allocations_for_mu(instance: &GameInstance, mu: f64) -> Result<(Allocation, Allocation)> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidInput(format!("mu must be positive, got {mu}")));
    }
    let rho = rhos(instance);
    let vb = instance.values_b();
    let weights: Vec<f64> = (0..instance.n()).map(|h| vb[h] * rho[h] * mu / (mu + rho[h]).powi(2)).collect();
    let total: f64 = weights.iter().sum();
    let x_b: Vec<f64> = weights.iter().map(|w| w * instance.budget_b() / total).collect();
    let x_a: Vec<f64> = x_b.iter().zip(&rho).map(|(x, r)| mu / r * x).collect();
    // At a root the leader's stakes already sum to x_a; rescale away the
    // residual from the finite bisection width.
    let sum_a: f64 = x_a.iter().sum();
    let x_a = x_a.iter().map(|x| x * instance.budget_a() / sum_a).collect();
    Ok((Allocation::new(x_a, instance.budget_a())?, Allocation::new(x_b, instance.budget_b())?))
}

fn bisect(g: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut g_lo = g(lo);
    for _ in 0..200 {
        if hi - lo <= ROOT_TOL * hi.abs().max(lo.abs()) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let g_mid = g(mid);
        if g_mid == 0.0 {
            return mid;
        }
        if (g_mid > 0.0) == (g_lo > 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All sign changes of `f` on the root interval, refined by bisection.
pub fn poly_roots(instance: &GameInstance) -> Vec<f64> {
    let (lo, hi) = root_interval(instance);
    if rel_eq(lo, hi, ROOT_TOL) {
        return vec![lo];
    }
    let rho = rhos(instance);
    let z = instance.budget_a() / instance.budget_b();
    let vb = instance.values_b().to_vec();
    let g = move |mu: f64| reduced_poly(&vb, &rho, z, mu);
    let grid = |i: usize| lo + (hi - lo) * i as f64 / ROOT_SCAN_CELLS as f64;
    let mut roots = Vec::new();
    let mut prev = (grid(0), g(grid(0)));
    if prev.1 == 0.0 {
        roots.push(prev.0);
    }
    for i in 1..=ROOT_SCAN_CELLS {
        let x = if i == ROOT_SCAN_CELLS { hi } else { grid(i) };
        let gx = g(x);
        if gx == 0.0 {
            roots.push(x);
        } else if prev.1 != 0.0 && (gx > 0.0) != (prev.1 > 0.0) {
            roots.push(bisect(&g, prev.0, x));
        }
        prev = (x, gx);
    }
    roots
}

fn is_equilibrium(instance: &GameInstance, a: &Allocation, b: &Allocation) -> Result<bool> {
    let br_b = best_response_of(instance, Player::Follower, a)?;
    let br_a = best_response_of(instance, Player::Leader, b)?;
    let close = |x: &Allocation, y: &Allocation, budget: f64| {
        x.amounts().iter().zip(y.amounts()).all(|(p, q)| (p - q).abs() <= EQUILIBRIUM_TOL * budget)
    };
    Ok(close(&br_b.allocation, b, instance.budget_b()) && close(&br_a.allocation, a, instance.budget_a()))
}

/// The pure Nash equilibrium.
pub fn solve_nash(instance: &GameInstance) -> Result<NashSolution> {
    let mut best: Option<NashSolution> = None;
    let mut accepted = Vec::new();
    let candidates = poly_roots(instance);
    for &mu in &candidates {
        let (a, b) = allocations_for_mu(instance, mu)?;
        if !is_equilibrium(instance, &a, &b)? {
            continue;
        }
        accepted.push(mu);
        let leader_utility = utility_unchecked(instance, Player::Leader, a.amounts(), b.amounts());
        if best.as_ref().is_none_or(|s| leader_utility > s.leader_utility) {
            best = Some(NashSolution {
                mu_star: mu,
                follower_utility: utility_unchecked(instance, Player::Follower, a.amounts(), b.amounts()),
                alloc_a: a,
                alloc_b: b,
                leader_utility,
                roots: Vec::new(),
            });
        }
    }
    let mut sol = best.ok_or_else(|| {
        if candidates.is_empty() {
            let (lo, hi) = root_interval(instance);
            let samples: Vec<String> = (0..=8)
                .map(|i| lo + (hi - lo) * i as f64 / 8.0)
                .map(|mu| format!("f({mu:.6e}) = {:.6e}", nash_poly(instance, mu)))
                .collect();
            Error::Invariant(format!("no sign change of f on [{lo}, {hi}]: {}", samples.join(", ")))
        } else {
            Error::Invariant(format!(
                "no root of f passed the mutual best-response check (roots {candidates:?})"
            ))
        }
    })?;
    sol.roots = accepted;
    Ok(sol)
}
