//! The leader's optimal Stackelberg commitment.
//!
//! Sort battlefields by ascending `v_aj / v_bj`. Under an optimal
//! commitment the follower contests a prefix `K` of that order, so there
//! are only `n` candidate supports. For each prefix the leader's problem
//! reduces to one of three cases:
//!
//! * **Case 1**: every battlefield in `K` has the same ratio (or `|K| = 1`).
//!   The leader splits `x_aK` over `K` in proportion to `v_aj` and `x_aK`
//!   is the larger root of a quadratic.
//! * **Case 2.1**: `K = [n]` with at least two ratios. Closed form with
//!   `alpha = -sqrt(c_K / v_bK)`.
//! * **Case 2.2**: `K` a proper prefix with at least two ratios. On `K` the
//!   commitment satisfies `sqrt(x_aj) = (v_aj / sqrt(v_bj) - alpha sqrt(v_bj)) / sqrt(y)`,
//!   `y` is eliminated through the budget identity and the leader's utility
//!   becomes a univariate function of `alpha`, maximized numerically.
//!
//! Off the support the leader stakes exactly the amount that makes the
//! follower indifferent to entering (see
//! [`threshold_allocation_outside_support`]). Every candidate is checked
//! by recomputing the follower's best response; candidates whose realized
//! support differs from `K` are discarded.

use serde::Serialize;

use crate::best_response::best_response;
use crate::error::{Error, Result};
use crate::game::{canonical_ordering, utility_unchecked, Allocation, GameInstance, Player};
use crate::search::scan_then_refine;
use crate::{rel_eq, RATIO_TOL};

/// Scan density of the Case 2.2 alpha search, per feasible interval.
pub const ALPHA_SCAN_SAMPLES: usize = 1024;
/// The alpha search stops at `-ALPHA_TRUNCATION * max_j(v_aj / v_bj)`.
pub const ALPHA_TRUNCATION: f64 = 1e3;
/// Golden-section stopping width for alpha.
pub const ALPHA_TOL: f64 = 1e-10;
/// Smallest admissible leader stake, relative to the leader budget.
pub const MIN_STAKE_REL: f64 = 1e-12;
/// Candidates whose utilities differ by at most this are tied; the larger
/// support wins.
pub const TIE_UTILITY: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CaseTag {
    #[serde(rename = "CASE_1")]
    Case1,
    #[serde(rename = "CASE_2_1")]
    Case2_1,
    #[serde(rename = "CASE_2_2")]
    Case2_2,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommitmentSolution {
    /// The leader's commitment.
    pub allocation: Allocation,
    /// The follower's best response to it.
    pub follower_allocation: Allocation,
    /// Battlefields the follower contests.
    pub support: Vec<usize>,
    pub case_tag: CaseTag,
    /// Shape parameter of the commitment on the support; absent in Case 1.
    pub alpha: Option<f64>,
    /// Squared scale parameter; present only in Case 2.2.
    pub y: Option<f64>,
    pub leader_utility: f64,
    pub follower_utility: f64,
    /// Case 2.2 only: the alpha search found no interior maximum and the
    /// commitment is the limit `alpha -> -inf` (stakes proportional to
    /// `v_bj` on the support).
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub alpha_unbounded: bool,
}

/// Outcome of a single case solver.
#[derive(Debug, Clone, PartialEq)]
pub enum Candidate {
    /// The commitment induces exactly the assumed support.
    Valid(CommitmentSolution),
    /// No commitment with the assumed support exists.
    Infeasible { reason: String },
    /// The formulas produced a commitment, but the follower's best response
    /// to it contests a different set of battlefields.
    Invalid { solution: CommitmentSolution, realized_support: Vec<usize> },
}

impl Candidate {
    pub fn valid(&self) -> Option<&CommitmentSolution> {
        match self {
            Candidate::Valid(s) => Some(s),
            _ => None,
        }
    }

    pub fn into_valid(self) -> Option<CommitmentSolution> {
        match self {
            Candidate::Valid(s) => Some(s),
            _ => None,
        }
    }
}

/// Value sums and polynomial coefficients for a support `K`.
///
/// `phi1(t) = b1 t^2 + b2 t + b3` and `phi2(t) = b4 t^2 + b5 t + b6`.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseCoefficients {
    pub v_a_k: f64,
    pub v_b_k: f64,
    pub v_a_kbar: f64,
    pub v_b_kbar: f64,
    /// `sum_{j in K} v_aj^2 / v_bj`.
    pub c_k: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub b4: f64,
    pub b5: f64,
    pub b6: f64,
    budget_a: f64,
    budget_b: f64,
    // (v_aj, v_bj) on K
    on_k: Vec<(f64, f64)>,
}

impl CaseCoefficients {
    pub fn new(instance: &GameInstance, support: &[usize]) -> Result<Self> {
        check_support(instance, support)?;
        let (va, vb) = (instance.values_a(), instance.values_b());
        let in_k = membership(instance.n(), support);
        let mut c = CaseCoefficients {
            v_a_k: 0.0,
            v_b_k: 0.0,
            v_a_kbar: 0.0,
            v_b_kbar: 0.0,
            c_k: 0.0,
            b1: 0.0,
            b2: 0.0,
            b3: 0.0,
            b4: 0.0,
            b5: 0.0,
            b6: 0.0,
            budget_a: instance.budget_a(),
            budget_b: instance.budget_b(),
            on_k: support.iter().map(|&j| (va[j], vb[j])).collect(),
        };
        for j in 0..instance.n() {
            if in_k[j] {
                c.v_a_k += va[j];
                c.v_b_k += vb[j];
                c.c_k += va[j] * va[j] / vb[j];
            } else {
                c.v_a_kbar += va[j];
                c.v_b_kbar += vb[j];
            }
        }
        let (xa, xb) = (c.budget_a, c.budget_b);
        let (vak, vbk, vbkb, ck) = (c.v_a_k, c.v_b_k, c.v_b_kbar, c.c_k);
        c.b1 = xa * vbk * vbk - 2.0 * xb * vbk * vbkb;
        c.b2 = 4.0 * xb * vak * vbkb - 2.0 * xa * vak * vbk;
        c.b3 = xa * vak * vak - 2.0 * xb * vbkb * ck;
        c.b4 = xa * xa * vbk * vbk - 4.0 * xb * (xa + xb) * vbk * vbkb;
        c.b5 = 8.0 * xb * (xa + xb) * vak * vbkb - 2.0 * xa * xa * vak * vbk;
        c.b6 = xa * xa * vak * vak - 4.0 * xb * (xa + xb) * ck * vbkb;
        Ok(c)
    }

    pub fn phi1(&self, theta: f64) -> f64 {
        (self.b1 * theta + self.b2) * theta + self.b3
    }

    pub fn phi2(&self, theta: f64) -> f64 {
        (self.b4 * theta + self.b5) * theta + self.b6
    }

    /// `sum_{j in K} (v_aj / sqrt(v_bj) - theta sqrt(v_bj))^2`.
    pub fn shape_mass(&self, theta: f64) -> f64 {
        self.on_k.iter().map(|&(a, b)| (a / b.sqrt() - theta * b.sqrt()).powi(2)).sum()
    }

    /// `(phi1, phi2)` recomputed from the shape mass and value sums rather
    /// than from the expanded coefficients.
    pub fn phi_from_sums(&self, theta: f64) -> (f64, f64) {
        let s = self.v_a_k - theta * self.v_b_k;
        let mass = self.shape_mass(theta);
        let (xa, xb) = (self.budget_a, self.budget_b);
        (
            xa * s * s - 2.0 * mass * self.v_b_kbar * xb,
            xa * xa * s * s - 4.0 * mass * self.v_b_kbar * xb * (xa + xb),
        )
    }

    /// The smaller root `y` of the budget identity for a given `alpha`, or
    /// `None` where it is not real and positive.
    ///
    /// Evaluated as `2 (A S^2 + v_bKbar A^2) / (phi1 + S sqrt(phi2))` with
    /// `A` the shape mass and `S = v_aK - alpha v_bK`, which equals
    /// `(phi1 - S sqrt(phi2)) / (2 x_b^2 v_bKbar)` without its cancellation.
    /// In this form `y > 0` exactly when `phi1 > 0`.
    pub fn y_hat(&self, alpha: f64) -> Option<f64> {
        if self.v_b_kbar <= 0.0 {
            return None;
        }
        let (p1, p2) = self.phi_from_sums(alpha);
        let s = self.v_a_k - self.v_b_k * alpha;
        if !(p2 >= 0.0 && p1 > 0.0 && s > 0.0) {
            return None;
        }
        let mass = self.shape_mass(alpha);
        let y = 2.0 * mass * (s * s + self.v_b_kbar * mass) / (p1 + s * p2.sqrt());
        (y > 0.0 && y.is_finite()).then_some(y)
    }

    /// `sum_j x_aj - x_a` for the commitment with parameters `(alpha, y)`,
    /// counting the threshold stakes off `K`.
    pub fn budget_residual(&self, alpha: f64, y: f64) -> f64 {
        let (w, s) = self.mass_and_root_sum(alpha);
        let stake = self.budget_b * y + w;
        w / y + self.v_b_kbar * stake * stake / (y * s * s) - self.budget_a
    }

    fn mass_and_root_sum(&self, alpha: f64) -> (f64, f64) {
        self.on_k.iter().fold((0.0, 0.0), |(w, s), &(a, b)| {
            let t = a / b.sqrt() - alpha * b.sqrt();
            (w + t * t, s + t * b.sqrt())
        })
    }

    /// Leader utility on `K` (the uncontested battlefields excluded) as a
    /// function of `alpha`, for `alpha` below every ratio in `K`.
    pub fn reduced_objective(&self, alpha: f64) -> Option<f64> {
        if self.on_k.iter().any(|&(a, b)| a / b - alpha <= 0.0) {
            return None;
        }
        let y = self.y_hat(alpha)?;
        let num_l: f64 = self.on_k.iter().map(|&(a, b)| (a / b - alpha) * a).sum();
        let num_r = self.v_a_k - alpha * self.v_b_k;
        let val = num_l * num_r / (y * self.budget_b + self.shape_mass(alpha));
        val.is_finite().then_some(val)
    }
}

fn check_support(instance: &GameInstance, support: &[usize]) -> Result<()> {
    if support.is_empty() {
        return Err(Error::InvalidInput("support must not be empty".into()));
    }
    let mut seen = vec![false; instance.n()];
    for &j in support {
        instance.check_index(j)?;
        if std::mem::replace(&mut seen[j], true) {
            return Err(Error::InvalidInput(format!("battlefield {j} repeated in support")));
        }
    }
    Ok(())
}

fn membership(n: usize, support: &[usize]) -> Vec<bool> {
    let mut in_k = vec![false; n];
    for &j in support {
        in_k[j] = true;
    }
    in_k
}

fn ratios_all_equal(instance: &GameInstance, support: &[usize]) -> bool {
    let first = instance.ratio(support[0]);
    support.iter().all(|&j| rel_eq(instance.ratio(j), first, RATIO_TOL))
}

/// Leader stakes off the support that make each abandoned battlefield's
/// zero-stake marginal utility for the follower equal the water level:
///
/// `x_aj = v_bj (x_b + sum_K x_al)^2 / (sum_K sqrt(x_al v_bl))^2`.
///
/// `leader_on_support[i]` is the stake on `support[i]`. Returns
/// `(battlefield, stake)` pairs in index order.
pub fn threshold_allocation_outside_support(
    instance: &GameInstance,
    support: &[usize],
    leader_on_support: &[f64],
) -> Result<Vec<(usize, f64)>> {
    check_support(instance, support)?;
    if leader_on_support.len() != support.len() {
        return Err(Error::InvalidInput("one stake per supported battlefield expected".into()));
    }
    if let Some(x) = leader_on_support.iter().find(|x| !(**x > 0.0)) {
        return Err(Error::InvalidInput(format!("stakes on the support must be positive, got {x}")));
    }
    let vb = instance.values_b();
    let stake: f64 = leader_on_support.iter().sum();
    let roots: f64 = support.iter().zip(leader_on_support).map(|(&j, &x)| (x * vb[j]).sqrt()).sum();
    let factor = ((instance.budget_b() + stake) / roots).powi(2);
    let in_k = membership(instance.n(), support);
    Ok((0..instance.n()).filter(|&j| !in_k[j]).map(|j| (j, vb[j] * factor)).collect())
}

/// Fill the off-support entries of `x` (indexed like the instance) and
/// package the commitment, verifying the support by best response.
fn finish(
    instance: &GameInstance,
    support: &[usize],
    mut x: Vec<f64>,
    case_tag: CaseTag,
    alpha: Option<f64>,
    y: Option<f64>,
) -> Result<Candidate> {
    let on_k: Vec<f64> = support.iter().map(|&j| x[j]).collect();
    for (j, v) in threshold_allocation_outside_support(instance, support, &on_k)? {
        x[j] = v;
    }
    let floor = MIN_STAKE_REL * instance.budget_a();
    if let Some(j) = x.iter().position(|&v| !(v >= floor)) {
        return Ok(Candidate::Infeasible {
            reason: format!("stake on battlefield {j} is {}, below the positivity floor", x[j]),
        });
    }
    let allocation = match Allocation::new(x, instance.budget_a()) {
        Ok(a) => a,
        Err(e) => return Ok(Candidate::Infeasible { reason: e.to_string() }),
    };
    let response = best_response(instance, &allocation)?;
    let leader_utility = utility_unchecked(instance, Player::Leader, allocation.amounts(), response.allocation.amounts());
    let follower_utility =
        utility_unchecked(instance, Player::Follower, allocation.amounts(), response.allocation.amounts());
    let realized = response.support.clone();
    let solution = CommitmentSolution {
        allocation,
        follower_allocation: response.allocation,
        support: support.to_vec(),
        case_tag,
        alpha,
        y,
        leader_utility,
        follower_utility,
        alpha_unbounded: false,
    };
    let mut expected = support.to_vec();
    let mut got = realized.clone();
    expected.sort_unstable();
    got.sort_unstable();
    if expected == got {
        Ok(Candidate::Valid(solution))
    } else {
        Ok(Candidate::Invalid { solution, realized_support: realized })
    }
}

/// Larger root of `(v_bKbar + v_bK) X^2 + (2 x_b v_bKbar - x_a v_bK) X + x_b^2 v_bKbar = 0`,
/// the leader's total stake on `K` when its stakes there are proportional
/// to a fixed profile.
fn case1_total(instance: &GameInstance, v_b_k: f64, v_b_kbar: f64) -> std::result::Result<f64, String> {
    let (xa, xb) = (instance.budget_a(), instance.budget_b());
    let disc = xa * xa * v_b_k * v_b_k - 4.0 * xa * xb * v_b_k * v_b_kbar - 4.0 * xb * xb * v_b_k * v_b_kbar;
    if disc < 0.0 {
        return Err(format!("discriminant {disc} < 0: the leader cannot cover the abandoned battlefields"));
    }
    Ok((xa * v_b_k - 2.0 * xb * v_b_kbar + disc.sqrt()) / (2.0 * (v_b_kbar + v_b_k)))
}

/// Case 1: all ratios in `support` equal, or a single battlefield.
pub fn solve_case1(instance: &GameInstance, support: &[usize]) -> Result<Candidate> {
    check_support(instance, support)?;
    if support.len() > 1 && !ratios_all_equal(instance, support) {
        return Err(Error::Precondition("Case 1 needs equal value ratios on the support".into()));
    }
    let coeffs = CaseCoefficients::new(instance, support)?;
    let total = match case1_total(instance, coeffs.v_b_k, coeffs.v_b_kbar) {
        Ok(t) => t,
        Err(reason) => return Ok(Candidate::Infeasible { reason }),
    };
    let mut x = vec![0.0; instance.n()];
    for &j in support {
        x[j] = total * instance.values_a()[j] / coeffs.v_a_k;
    }
    finish(instance, support, x, CaseTag::Case1, None, None)
}

/// Case 2.1: the follower contests every battlefield and the ratios are not
/// all equal.
pub fn solve_case2_full_support(instance: &GameInstance) -> Result<Candidate> {
    let support: Vec<usize> = (0..instance.n()).collect();
    if ratios_all_equal(instance, &support) {
        return Err(Error::Precondition("Case 2.1 needs at least two distinct value ratios".into()));
    }
    let coeffs = CaseCoefficients::new(instance, &support)?;
    let alpha = -(coeffs.c_k / coeffs.v_b_k).sqrt();
    let weights: Vec<f64> = instance
        .values_a()
        .iter()
        .zip(instance.values_b())
        .map(|(&a, &b)| (a / b.sqrt() - alpha * b.sqrt()).powi(2))
        .collect();
    let mass: f64 = weights.iter().sum();
    let x = weights.iter().map(|w| w * instance.budget_a() / mass).collect();
    finish(instance, &support, x, CaseTag::Case2_1, Some(alpha), None)
}

/// Roots of `a t^2 + b t + c`, ascending.
fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    if a.abs() <= 1e-14 * scale {
        return if b != 0.0 { vec![-c / b] } else { Vec::new() };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let mut roots = if q == 0.0 { vec![0.0] } else { vec![q / a, c / q] };
    roots.sort_by(f64::total_cmp);
    roots
}

/// Feasible alpha intervals for Case 2.2: below the smallest ratio in `K`,
/// above the truncation point, and where `phi2 >= 0`.
pub fn feasible_alpha_intervals(coeffs: &CaseCoefficients, lower: f64, upper: f64) -> Vec<(f64, f64)> {
    let mut cuts = vec![lower];
    cuts.extend(
        quadratic_roots(coeffs.b4, coeffs.b5, coeffs.b6)
            .into_iter()
            .filter(|&r| r > lower && r < upper),
    );
    cuts.push(upper);
    cuts.windows(2)
        .filter(|w| w[1] > w[0] && coeffs.phi2(0.5 * (w[0] + w[1])) >= 0.0)
        .map(|w| (w[0], w[1]))
        .collect()
}

/// Reduced objective of a commitment, `sum_K sqrt(x_aj / v_bj) v_aj * sum_K sqrt(x_aj v_bj) / (x_b + sum_K x_aj)`.
fn reduced_utility(instance: &GameInstance, support: &[usize], x: &[f64]) -> f64 {
    let (va, vb) = (instance.values_a(), instance.values_b());
    let left: f64 = support.iter().map(|&j| (x[j] / vb[j]).sqrt() * va[j]).sum();
    let right: f64 = support.iter().map(|&j| (x[j] * vb[j]).sqrt()).sum();
    let stake: f64 = support.iter().map(|&j| x[j]).sum();
    left * right / (instance.budget_b() + stake)
}

/// Case 2.2: `support` is a proper prefix of the ratio order containing at
/// least two distinct ratios.
pub fn solve_case2_partial_support(instance: &GameInstance, support: &[usize]) -> Result<Candidate> {
    check_support(instance, support)?;
    let n = instance.n();
    if support.len() >= n {
        return Err(Error::Precondition("Case 2.2 needs a proper subset of the battlefields".into()));
    }
    if ratios_all_equal(instance, support) {
        return Err(Error::Precondition("Case 2.2 needs at least two distinct value ratios on the support".into()));
    }
    let in_k = membership(n, support);
    let max_in = support.iter().map(|&j| instance.ratio(j)).fold(f64::MIN, f64::max);
    let min_out = (0..n).filter(|&j| !in_k[j]).map(|j| instance.ratio(j)).fold(f64::MAX, f64::min);
    if max_in > min_out && !rel_eq(max_in, min_out, RATIO_TOL) {
        return Err(Error::Precondition("Case 2.2 support must be a prefix of the ascending ratio order".into()));
    }

    let coeffs = CaseCoefficients::new(instance, support)?;
    let r_min = support.iter().map(|&j| instance.ratio(j)).fold(f64::MAX, f64::min);
    let r_max = instance.ratios().into_iter().fold(f64::MIN, f64::max);
    let lower = -ALPHA_TRUNCATION * r_max;
    let objective = |alpha: f64| coeffs.reduced_objective(alpha);

    let mut best: Option<(f64, f64)> = None;
    let mut best_at_truncation = false;
    for (lo, hi) in feasible_alpha_intervals(&coeffs, lower, r_min) {
        // Sample by distance from r_min on a log scale so the region just
        // below the smallest ratio is resolved as finely as the far tail.
        let d_near = (r_min - hi).max(1e-12 * r_max);
        let d_far = r_min - lo;
        if !(d_far > d_near) {
            continue;
        }
        let last = ALPHA_SCAN_SAMPLES - 1;
        let grid = |i: usize| {
            if i == last {
                lo
            } else {
                r_min - d_near * (d_far / d_near).powf(i as f64 / last as f64)
            }
        };
        let tol = |a: f64| ALPHA_TOL.max(4.0 * f64::EPSILON * a.abs());
        if let Some((alpha, val, idx)) = scan_then_refine(grid, ALPHA_SCAN_SAMPLES, &objective, tol(lower)) {
            if best.is_none_or(|(_, b)| val > b) {
                best = Some((alpha, val));
                best_at_truncation = lo == lower && idx == last;
            }
        }
    }

    let Some((mut alpha, _)) = best else {
        return Ok(Candidate::Infeasible { reason: "no alpha satisfies phi2 >= 0 with a positive y".into() });
    };
    let mut alpha_unbounded = false;
    let mut x = vec![0.0; n];

    let limit_better = best_at_truncation
        && objective(2.0 * lower).is_some_and(|far| far >= objective(lower).unwrap_or(f64::NEG_INFINITY));
    if limit_better {
        // The objective is still rising at the truncation point: compare
        // against the limit alpha -> -inf, where stakes on K become
        // proportional to v_bj.
        if let Ok(total) = case1_total(instance, coeffs.v_b_k, coeffs.v_b_kbar) {
            let mut lim = vec![0.0; n];
            for &j in support {
                lim[j] = total * instance.values_b()[j] / coeffs.v_b_k;
            }
            let y = coeffs.y_hat(alpha).unwrap_or(f64::NAN);
            let mut at_alpha = vec![0.0; n];
            for &j in support {
                let (a, b) = (instance.values_a()[j], instance.values_b()[j]);
                at_alpha[j] = (a / b.sqrt() - alpha * b.sqrt()).powi(2) / y;
            }
            if reduced_utility(instance, support, &lim) > reduced_utility(instance, support, &at_alpha) {
                alpha_unbounded = true;
                x = lim;
            }
        }
    }

    let y = if alpha_unbounded {
        None
    } else {
        let y = coeffs.y_hat(alpha).expect("alpha chosen from feasible samples");
        for &j in support {
            let (a, b) = (instance.values_a()[j], instance.values_b()[j]);
            x[j] = (a / b.sqrt() - alpha * b.sqrt()).powi(2) / y;
        }
        Some(y)
    };
    if alpha_unbounded {
        alpha = f64::NEG_INFINITY;
    }
    let alpha = (!alpha_unbounded).then_some(alpha);
    let mut candidate = finish(instance, support, x, CaseTag::Case2_2, alpha, y)?;
    if let Candidate::Valid(s) | Candidate::Invalid { solution: s, .. } = &mut candidate {
        s.alpha_unbounded = alpha_unbounded;
    }
    Ok(candidate)
}

/// Which solver applies to a support: Case 1 for uniform ratios (or one
/// battlefield), Case 2.1 for the full set, Case 2.2 otherwise.
pub fn solve_for_support(instance: &GameInstance, support: &[usize]) -> Result<Candidate> {
    check_support(instance, support)?;
    if support.len() == 1 || ratios_all_equal(instance, support) {
        solve_case1(instance, support)
    } else if support.len() == instance.n() {
        solve_case2_full_support(instance)
    } else {
        solve_case2_partial_support(instance, support)
    }
}

/// One candidate per prefix support, in original battlefield indexing.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateReport {
    pub support: Vec<usize>,
    pub outcome: Candidate,
}

fn to_original(solution: CommitmentSolution, perm: &[usize], unsort: &dyn Fn(&[f64]) -> Vec<f64>) -> Result<CommitmentSolution> {
    Ok(CommitmentSolution {
        allocation: Allocation::new(unsort(solution.allocation.amounts()), solution.allocation.budget())?,
        follower_allocation: Allocation::new(
            unsort(solution.follower_allocation.amounts()),
            solution.follower_allocation.budget(),
        )?,
        support: solution.support.iter().map(|&k| perm[k]).collect(),
        ..solution
    })
}

/// Solve every prefix support of the ascending ratio order.
pub fn commitment_candidates(instance: &GameInstance) -> Result<Vec<CandidateReport>> {
    let (sorted, ordering) = canonical_ordering(instance);
    let perm = ordering.permutation.clone();
    let unsort = |v: &[f64]| ordering.to_original(v);
    let mut out = Vec::with_capacity(instance.n());
    for k in 1..=instance.n() {
        let prefix: Vec<usize> = (0..k).collect();
        let outcome = match solve_for_support(&sorted, &prefix)? {
            Candidate::Valid(s) => Candidate::Valid(to_original(s, &perm, &unsort)?),
            Candidate::Invalid { solution, realized_support } => Candidate::Invalid {
                solution: to_original(solution, &perm, &unsort)?,
                realized_support: realized_support.iter().map(|&j| perm[j]).collect(),
            },
            other => other,
        };
        out.push(CandidateReport { support: prefix.iter().map(|&j| perm[j]).collect(), outcome });
    }
    Ok(out)
}

/// The leader's utility-maximizing commitment over all prefix supports.
pub fn optimal_commitment(instance: &GameInstance) -> Result<CommitmentSolution> {
    let candidates = commitment_candidates(instance)?;
    let mut best: Option<&CommitmentSolution> = None;
    for c in &candidates {
        if let Some(s) = c.outcome.valid() {
            // Later candidates have larger supports and win ties.
            if best.is_none_or(|b| s.leader_utility >= b.leader_utility - TIE_UTILITY) {
                best = Some(s);
            }
        }
    }
    match best {
        Some(s) => Ok(s.clone()),
        None => {
            let detail: Vec<String> = candidates
                .iter()
                .map(|c| match &c.outcome {
                    Candidate::Valid(_) => format!("{:?}: valid", c.support),
                    Candidate::Infeasible { reason } => format!("{:?}: infeasible ({reason})", c.support),
                    Candidate::Invalid { realized_support, .. } => {
                        format!("{:?}: follower contests {:?} instead", c.support, realized_support)
                    }
                })
                .collect();
            Err(Error::Invariant(format!("no valid commitment candidate: {}", detail.join("; "))))
        }
    }
}
