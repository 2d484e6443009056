//! Stackelberg versus Nash: when the two equilibria coincide, how much the
//! leader gains by committing, and budget-ratio sweeps.

use serde::Serialize;

use crate::commitment::{optimal_commitment, CommitmentSolution};
use crate::error::{Error, Result};
use crate::game::{canonical_ordering, GameInstance};
use crate::nash::{solve_nash, NashSolution};
use crate::{rel_eq, RATIO_TOL};

/// Budget ratios within this relative distance of the threshold count as
/// coinciding.
pub const COINCIDENCE_TOL: f64 = 1e-9;

fn psi1(x1: f64, x2: f64, x3: f64, x4: f64) -> f64 {
    let root = ((x1 * x1 / x3 + x2 * x2 / x4) / (x3 + x4)).sqrt();
    (x1 / x3.sqrt() + root * x3.sqrt()).powi(2)
}

fn psi2(x1: f64, x2: f64, x3: f64, x4: f64, x5: f64, x6: f64) -> f64 {
    let (p, q) = ((x5 * x3).sqrt(), (x6 * x4).sqrt());
    (x6 * x4 * x1 * p - x5 * x3 * x2 * q) / (p + q)
}

fn psi3(x1: f64, x2: f64, x3: f64, x4: f64, x5: f64, x6: f64) -> f64 {
    (x1 * x4 - x3 * x2) * x5 * x6 / (x5 + x6)
}

/// Budget ratio `x_a / x_b` at which the Stackelberg and Nash equilibria of
/// a game with two ratio classes coincide. Arguments are the value sums of
/// one class `M` and of its complement.
pub fn coincidence_threshold(v_a_m: f64, v_b_m: f64, v_a_mbar: f64, v_b_mbar: f64) -> Result<f64> {
    for (name, v) in [("v_aM", v_a_m), ("v_bM", v_b_m), ("v_aMbar", v_a_mbar), ("v_bMbar", v_b_mbar)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Precondition(format!("{name} must be positive, got {v}")));
        }
    }
    if rel_eq(v_a_m / v_b_m, v_a_mbar / v_b_mbar, RATIO_TOL) {
        return Err(Error::Precondition(
            "the two classes share a value ratio; the equilibria coincide at every budget".into(),
        ));
    }
    let t1 = psi1(v_a_m, v_a_mbar, v_b_m, v_b_mbar);
    let t2 = psi1(v_a_mbar, v_a_m, v_b_mbar, v_b_m);
    let t3 = psi2(v_a_mbar, v_a_m, v_b_mbar, v_b_m, t2, t1) + psi3(v_a_m, v_a_mbar, v_b_m, v_b_mbar, t1, t2);
    let t4 = psi2(v_a_m, v_a_mbar, v_b_m, v_b_mbar, t1, t2);
    if t3 == 0.0 {
        return Err(Error::Invariant(format!(
            "t3 vanished for distinct ratios (t1 = {t1}, t2 = {t2}, t4 = {t4})"
        )));
    }
    Ok(t4 / t3)
}

/// Battlefields grouped by value ratio, classes in ascending ratio order.
pub fn ratio_classes(instance: &GameInstance) -> Vec<Vec<usize>> {
    let (_, ordering) = canonical_ordering(instance);
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut anchor = f64::NAN;
    for (&j, &r) in ordering.permutation.iter().zip(&ordering.ratios) {
        match classes.last_mut() {
            Some(class) if rel_eq(r, anchor, RATIO_TOL) => class.push(j),
            _ => {
                anchor = r;
                classes.push(vec![j]);
            }
        }
    }
    classes
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoincidenceReport {
    /// Battlefields grouped by value ratio, ascending.
    pub ratio_classes: Vec<Vec<usize>>,
    pub coincides: bool,
    /// Present only with exactly two classes.
    pub threshold: Option<f64>,
}

/// Whether the Stackelberg and Nash equilibria coincide at the instance's
/// budgets.
pub fn check_coincidence(instance: &GameInstance) -> CoincidenceReport {
    let classes = ratio_classes(instance);
    let (coincides, threshold) = match classes.len() {
        1 => (true, None),
        2 => {
            let sum = |class: &[usize], v: &[f64]| class.iter().map(|&j| v[j]).sum::<f64>();
            let (va, vb) = (instance.values_a(), instance.values_b());
            let t = coincidence_threshold(
                sum(&classes[0], va),
                sum(&classes[0], vb),
                sum(&classes[1], va),
                sum(&classes[1], vb),
            )
            .ok();
            let r = instance.budget_a() / instance.budget_b();
            (t.is_some_and(|t| rel_eq(r, t, COINCIDENCE_TOL)), t)
        }
        _ => (false, None),
    };
    CoincidenceReport { ratio_classes: classes, coincides, threshold }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub se: CommitmentSolution,
    pub ne: NashSolution,
    /// Leader utility under commitment over leader utility at Nash.
    pub leader_ratio: f64,
    pub follower_ratio: f64,
    /// `(x_a + x_b) / x_a`, the cap on `leader_ratio`.
    pub cor1_upper: f64,
}

pub fn compare(instance: &GameInstance) -> Result<ComparisonReport> {
    let se = optimal_commitment(instance)?;
    let ne = solve_nash(instance)?;
    Ok(ComparisonReport {
        leader_ratio: se.leader_utility / ne.leader_utility,
        follower_ratio: se.follower_utility / ne.follower_utility,
        cor1_upper: (instance.budget_a() + instance.budget_b()) / instance.budget_a(),
        se,
        ne,
    })
}

/// Two-battlefield bounds, evaluated in the normalized frame: battlefields
/// in ascending ratio order, both value vectors divided by the second
/// battlefield's values and both budgets divided by `x_b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoBattlefieldBounds {
    /// Normalized leader budget.
    pub x_a: f64,
    /// Normalized values of the first battlefield.
    pub v_a1: f64,
    pub v_b1: f64,
    /// Lower bound on the normalized game's leader ratio.
    pub lower: f64,
    /// Upper bound on the normalized game's leader ratio.
    pub upper: f64,
    /// The normalized game's actual leader ratio, if both solvers succeed.
    pub normalized_leader_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeaderAdvantageBounds {
    /// `x_a / (x_a + x_b) * sum_j v_aj`, a floor on the leader's Nash utility.
    pub ne_lower_bound: f64,
    /// `(x_a + x_b) / x_a`, a cap on the leader's commitment gain.
    pub cor1_upper: f64,
    pub two_battlefield: Option<TwoBattlefieldBounds>,
}

/// Lower bound on the leader's commitment gain in the normalized
/// two-battlefield game (`x_b = 1`, `v_a2 = v_b2 = 1`, `v_a1 <= v_b1`).
pub fn two_battlefield_lower(x_a: f64, v_a1: f64, v_b1: f64) -> f64 {
    (v_a1 + 1.0) / (v_a1 + v_b1 * (x_a + 1.0) / (v_b1 * x_a + v_a1))
}

/// Upper bound on the same ratio.
pub fn two_battlefield_upper(x_a: f64, v_a1: f64, v_b1: f64) -> f64 {
    (v_a1 + 1.0) / (x_a * v_a1 * v_a1 / (x_a * v_a1 + v_b1) + x_a / (x_a + 1.0))
}

/// The normalized two-battlefield game for a two-battlefield instance.
pub fn normalize_two_battlefield(instance: &GameInstance) -> Result<GameInstance> {
    if instance.n() != 2 {
        return Err(Error::Precondition(format!("need two battlefields, got {}", instance.n())));
    }
    let (sorted, _) = canonical_ordering(instance);
    let (va, vb) = (sorted.values_a(), sorted.values_b());
    GameInstance::new(
        sorted.budget_a() / sorted.budget_b(),
        1.0,
        vec![va[0] / va[1], 1.0],
        vec![vb[0] / vb[1], 1.0],
    )
}

pub fn leader_advantage_bounds(instance: &GameInstance) -> LeaderAdvantageBounds {
    let (xa, xb) = (instance.budget_a(), instance.budget_b());
    let two_battlefield = normalize_two_battlefield(instance).ok().map(|g| {
        let (x_a, v_a1, v_b1) = (g.budget_a(), g.values_a()[0], g.values_b()[0]);
        let normalized_leader_ratio = match (optimal_commitment(&g), solve_nash(&g)) {
            (Ok(se), Ok(ne)) => Some(se.leader_utility / ne.leader_utility),
            _ => None,
        };
        TwoBattlefieldBounds {
            x_a,
            v_a1,
            v_b1,
            lower: two_battlefield_lower(x_a, v_a1, v_b1),
            upper: two_battlefield_upper(x_a, v_a1, v_b1),
            normalized_leader_ratio,
        }
    });
    LeaderAdvantageBounds {
        ne_lower_bound: xa / (xa + xb) * instance.values_a().iter().sum::<f64>(),
        cor1_upper: (xa + xb) / xa,
        two_battlefield,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    /// `x_a / x_b`.
    pub r: f64,
    pub se_u_a: f64,
    pub se_u_b: f64,
    pub ne_u_a: f64,
    pub ne_u_b: f64,
    pub coincides: bool,
    /// Solver failures for this row; the utilities are NaN when set.
    pub diagnostic: Option<String>,
}

fn sweep_row(instance: &GameInstance, r: f64) -> SweepRow {
    let mut row = SweepRow {
        r,
        se_u_a: f64::NAN,
        se_u_b: f64::NAN,
        ne_u_a: f64::NAN,
        ne_u_b: f64::NAN,
        coincides: false,
        diagnostic: None,
    };
    let game = match instance.with_budgets(r * instance.budget_b(), instance.budget_b()) {
        Ok(g) => g,
        Err(e) => {
            row.diagnostic = Some(e.to_string());
            return row;
        }
    };
    row.coincides = check_coincidence(&game).coincides;
    let mut errors = Vec::new();
    match optimal_commitment(&game) {
        Ok(se) => (row.se_u_a, row.se_u_b) = (se.leader_utility, se.follower_utility),
        Err(e) => errors.push(format!("commitment: {e}")),
    }
    match solve_nash(&game) {
        Ok(ne) => (row.ne_u_a, row.ne_u_b) = (ne.leader_utility, ne.follower_utility),
        Err(e) => errors.push(format!("nash: {e}")),
    }
    if !errors.is_empty() {
        row.diagnostic = Some(errors.join("; "));
    }
    row
}

/// Solve both equilibria at `x_a = r * x_b` for each `r`, keeping `x_b`.
/// Rows come back sorted by `r`.
pub fn budget_sweep(instance: &GameInstance, r_values: &[f64]) -> Vec<SweepRow> {
    let mut rs = r_values.to_vec();
    rs.sort_by(f64::total_cmp);
    rs.into_iter().map(|r| sweep_row(instance, r)).collect()
}

pub const SWEEP_CSV_HEADER: &str = "r,se_u_a,se_u_b,ne_u_a,ne_u_b,coincides";

/// `x` with 9 significant digits, in the style of C's `%.9g`.
pub fn format_g9(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-4..9).contains(&exp) {
        trim(&format!("{:.*}", (8 - exp) as usize, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    }
}

/// The sweep as CSV, header included, one line per row.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in rows {
        let reals = [row.r, row.se_u_a, row.se_u_b, row.ne_u_a, row.ne_u_b].map(format_g9);
        out.push_str(&reals.join(","));
        out.push_str(if row.coincides { ",true\n" } else { ",false\n" });
    }
    out
}
