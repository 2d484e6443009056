//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so every line is printed even when all
//! criteria pass. Exits nonzero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{close, random_allocation, random_instance, rng, worked_example};
use lottery_blotto::analysis::coincidence_threshold;
use lottery_blotto::commitment::threshold_allocation_outside_support;
use lottery_blotto::game::{merge_battlefields, split_battlefield, total_utility};
use lottery_blotto::oracle::{is_prefix_support, oracle_best_response, oracle_commitment};
use lottery_blotto::{
    best_response, optimal_commitment, solve_nash, CaseTag, CommitmentSolution, GameInstance, GridSpec, Player,
};
use rand::Rng;

// Tolerances, pinned.
const PAPER_TOL: f64 = 1e-3;
const CROSSING_ALLOC_REL: f64 = 1e-6;
const CROSSING_UTIL: f64 = 1e-8;
const BR_ORACLE_TOL: f64 = 1e-4;
const SE_ORACLE_TOL: f64 = 1e-3;
const BOUND_SLACK: f64 = 1e-9;
const DIVERGENCE_TARGET: f64 = 10.0;
const REDUCTION_TOL: f64 = 1e-12;
const LEMMA2_REL: f64 = 1e-9;
const LEMMA3_REL: f64 = 1e-6;

const BR_INSTANCES: usize = 200;
const BR_RESOLUTION: u64 = 1000;
const BR_ROUNDS: u32 = 3;
const SE_INSTANCES: usize = 50;
const SE_RESOLUTION: u64 = 500;
const SE_ROUNDS: u32 = 2;
const BOUND_INSTANCES: usize = 500;
const REDUCTION_TRIPLES: usize = 200;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Commitments produced by criteria 1-6, for the residual checks of 10.
#[derive(Default)]
struct Emitted {
    solutions: Vec<(GameInstance, CommitmentSolution)>,
    /// Instances and oracle results of criterion 5, reused by 6.
    oracle_supports: Vec<(GameInstance, Vec<usize>)>,
}

fn c1(emitted: &mut Emitted) -> Outcome {
    let g = worked_example(0.5);
    let ne = solve_nash(&g).unwrap();
    let se = optimal_commitment(&g).unwrap();
    let checks = [
        close(ne.alloc_a.amounts(), &[0.025, 0.475], PAPER_TOL),
        close(ne.alloc_b.amounts(), &[0.340, 0.660], PAPER_TOL),
        close(&[ne.leader_utility, ne.follower_utility], &[2.161, 1.223], PAPER_TOL),
        close(se.allocation.amounts(), &[0.136, 0.364], PAPER_TOL),
        close(se.follower_allocation.amounts(), &[0.559, 0.441], PAPER_TOL),
        close(&[se.leader_utility, se.follower_utility], &[2.458, 1.079], PAPER_TOL),
    ];
    let detail = format!(
        "NE {:.4?}/{:.4?} u=({:.4}, {:.4}); SE {:.4?}/{:.4?} u=({:.4}, {:.4})",
        ne.alloc_a.amounts(),
        ne.alloc_b.amounts(),
        ne.leader_utility,
        ne.follower_utility,
        se.allocation.amounts(),
        se.follower_allocation.amounts(),
        se.leader_utility,
        se.follower_utility
    );
    emitted.solutions.push((g, se));
    outcome(checks.iter().all(|&c| c), detail)
}

fn c2(emitted: &mut Emitted) -> Outcome {
    let g = worked_example(2.0);
    let ne = solve_nash(&g).unwrap();
    let se = optimal_commitment(&g).unwrap();
    let checks = [
        close(ne.alloc_a.amounts(), &[0.667, 1.333], PAPER_TOL),
        close(ne.alloc_b.amounts(), &[0.833, 0.167], PAPER_TOL),
        close(&[ne.leader_utility, ne.follower_utility], &[4.889, 0.611], PAPER_TOL),
        close(se.allocation.amounts(), &[0.543, 1.457], PAPER_TOL),
        close(se.follower_allocation.amounts(), &[0.847, 0.153], PAPER_TOL),
        close(&[se.leader_utility, se.follower_utility], &[4.915, 0.657], PAPER_TOL),
    ];
    let detail = format!(
        "NE u=({:.4}, {:.4}); SE {:.4?} u=({:.4}, {:.4})",
        ne.leader_utility,
        ne.follower_utility,
        se.allocation.amounts(),
        se.leader_utility,
        se.follower_utility
    );
    emitted.solutions.push((g, se));
    outcome(checks.iter().all(|&c| c), detail)
}

fn c3(emitted: &mut Emitted) -> Outcome {
    let f = coincidence_threshold(1.0, 1.0, 5.0, 0.5).unwrap();
    let g = worked_example(f);
    let ne = solve_nash(&g).unwrap();
    let se = optimal_commitment(&g).unwrap();
    let rel = |a: &[f64], b: &[f64]| {
        a.iter().zip(b).map(|(x, y)| (x - y).abs() / x.abs().max(y.abs())).fold(0.0, f64::max)
    };
    let da = rel(se.allocation.amounts(), ne.alloc_a.amounts());
    let db = rel(se.follower_allocation.amounts(), ne.alloc_b.amounts());
    let du = (se.leader_utility - ne.leader_utility).abs().max((se.follower_utility - ne.follower_utility).abs());
    emitted.solutions.push((g, se));
    outcome(
        da <= CROSSING_ALLOC_REL && db <= CROSSING_ALLOC_REL && du <= CROSSING_UTIL,
        format!("r = {f:.10}: alloc rel diff {da:.2e}/{db:.2e}, utility diff {du:.2e}"),
    )
}

fn c4() -> Outcome {
    let mut r = rng(4);
    let grid = GridSpec::new(BR_RESOLUTION, BR_ROUNDS).unwrap().with_point_cap(200_000_000);
    let (mut worst_gap, mut worst_excess) = (0.0f64, f64::NEG_INFINITY);
    let mut failures = 0;
    for i in 0..BR_INSTANCES {
        let n = 2 + i % 3;
        let g = random_instance(&mut r, n);
        let a = random_allocation(&mut r, n, g.budget_a());
        let br = best_response(&g, &a).unwrap();
        let exact = total_utility(&g, Player::Follower, &a, &br.allocation).unwrap();
        let (_, oracle) = oracle_best_response(&g, &a, &grid).unwrap();
        let excess = oracle - exact;
        worst_excess = worst_excess.max(excess);
        worst_gap = worst_gap.max(excess.abs());
        if excess.abs() > BR_ORACLE_TOL {
            failures += 1;
        }
    }
    outcome(
        failures == 0,
        format!("{BR_INSTANCES} instances, max |oracle - closed| {worst_gap:.2e}, max oracle excess {worst_excess:.2e}"),
    )
}

fn c5(emitted: &mut Emitted) -> Outcome {
    let mut r = rng(5);
    let grid = GridSpec::new(SE_RESOLUTION, SE_ROUNDS).unwrap();
    let mut worst = f64::NEG_INFINITY;
    let mut failures = 0;
    for i in 0..SE_INSTANCES {
        let n = 2 + i % 2;
        let g = random_instance(&mut r, n);
        let se = optimal_commitment(&g).unwrap();
        let oracle = oracle_commitment(&g, &grid).unwrap();
        let excess = oracle.utility - se.leader_utility;
        worst = worst.max(excess);
        if excess > SE_ORACLE_TOL {
            failures += 1;
        }
        emitted.oracle_supports.push((g.clone(), oracle.support));
        emitted.solutions.push((g, se));
    }
    outcome(failures == 0, format!("{SE_INSTANCES} instances, max oracle excess {worst:.2e}, {failures} breaches"))
}

fn c6(emitted: &mut Emitted) -> Outcome {
    let violations = emitted.oracle_supports.iter().filter(|(g, s)| !is_prefix_support(g, s)).count();
    outcome(
        violations == 0 && !emitted.oracle_supports.is_empty(),
        format!("{} oracle optima, {violations} non-prefix supports", emitted.oracle_supports.len()),
    )
}

fn c7() -> Outcome {
    let mut r = rng(7);
    let (mut thm4, mut cor1) = (f64::INFINITY, f64::INFINITY);
    for i in 0..BOUND_INSTANCES {
        let n = 1 + i % 5;
        let g = random_instance(&mut r, n);
        let ne = solve_nash(&g).unwrap();
        let se = optimal_commitment(&g).unwrap();
        let (xa, xb) = (g.budget_a(), g.budget_b());
        let floor = xa / (xa + xb) * g.values_a().iter().sum::<f64>();
        thm4 = thm4.min(ne.leader_utility - floor);
        cor1 = cor1.min((xa + xb) / xa - se.leader_utility / ne.leader_utility);
    }
    outcome(
        thm4 >= -BOUND_SLACK && cor1 >= -BOUND_SLACK,
        format!("{BOUND_INSTANCES} instances, min NE-floor slack {thm4:.3e}, min cap slack {cor1:.3e}"),
    )
}

fn c8() -> Outcome {
    let ratios: Vec<f64> = [1e-1, 1e-2, 1e-3]
        .iter()
        .map(|&e| {
            let g = GameInstance::new(e, 1.0, vec![e, 1.0], vec![e * e, 1.0]).unwrap();
            optimal_commitment(&g).unwrap().leader_utility / solve_nash(&g).unwrap().leader_utility
        })
        .collect();
    let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
    outcome(
        increasing && ratios[2] > DIVERGENCE_TARGET,
        format!("SE/NE at eps = 1e-1, 1e-2, 1e-3: {ratios:.6?} (increasing: {increasing}, target > {DIVERGENCE_TARGET})"),
    )
}

fn c9() -> Outcome {
    let mut r = rng(9);
    let mut worst = 0.0f64;
    let mut identity_failures = 0;
    for _ in 0..REDUCTION_TRIPLES {
        let n = r.gen_range(1..=4);
        let g = random_instance(&mut r, n);
        let a = random_allocation(&mut r, n, g.budget_a());
        let b = random_allocation(&mut r, n, g.budget_b());
        let j = r.gen_range(0..n);
        let t = r.gen_range(2..=4);
        let (gs, as_, bs) = split_battlefield(&g, j, t, &a, &b).unwrap();
        let group: BTreeSet<usize> = (n - 1..n - 1 + t).collect();
        let (gm, am, bm) = merge_battlefields(&gs, &group, &as_, &bs).unwrap();
        for p in [Player::Leader, Player::Follower] {
            let u = total_utility(&g, p, &a, &b).unwrap();
            worst = worst.max((total_utility(&gs, p, &as_, &bs).unwrap() - u).abs());
            worst = worst.max((total_utility(&gm, p, &am, &bm).unwrap() - u).abs());
        }
        // Splitting moves battlefield j to the end; merging keeps it there.
        let moved = |v: &[f64]| {
            let mut out: Vec<f64> = v.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &x)| x).collect();
            out.push(v[j]);
            out
        };
        let same = close(gm.values_a(), &moved(g.values_a()), REDUCTION_TOL)
            && close(gm.values_b(), &moved(g.values_b()), REDUCTION_TOL)
            && close(am.amounts(), &moved(a.amounts()), REDUCTION_TOL)
            && close(bm.amounts(), &moved(b.amounts()), REDUCTION_TOL);
        if !same {
            identity_failures += 1;
        }
    }
    outcome(
        worst <= REDUCTION_TOL && identity_failures == 0,
        format!("{REDUCTION_TRIPLES} triples, max utility drift {worst:.2e}, {identity_failures} split-merge mismatches"),
    )
}

fn c10(emitted: &Emitted) -> Outcome {
    let (mut lemma2, mut lemma3) = (0.0f64, 0.0f64);
    let (mut case22, mut unbounded) = (0, 0);
    for (g, s) in &emitted.solutions {
        let x = s.allocation.amounts();
        let on_k: Vec<f64> = s.support.iter().map(|&j| x[j]).collect();
        for (j, want) in threshold_allocation_outside_support(g, &s.support, &on_k).unwrap() {
            lemma2 = lemma2.max((x[j] - want).abs() / want);
        }
        if s.case_tag == CaseTag::Case2_2 {
            case22 += 1;
            match (s.alpha, s.y) {
                (Some(alpha), Some(y)) => {
                    for &j in &s.support {
                        let (va, vb) = (g.values_a()[j], g.values_b()[j]);
                        let lhs = va / vb.sqrt() - alpha * vb.sqrt();
                        lemma3 = lemma3.max((lhs - (x[j] * y).sqrt()).abs() / (va / vb.sqrt()));
                    }
                }
                _ => unbounded += 1,
            }
        }
    }
    outcome(
        lemma2 <= LEMMA2_REL && lemma3 <= LEMMA3_REL,
        format!(
            "{} commitments ({case22} CASE_2_2, {unbounded} at the alpha limit): off-support residual {lemma2:.2e}, alpha-beta residual {lemma3:.2e}",
            emitted.solutions.len()
        ),
    )
}

fn main() {
    let mut emitted = Emitted::default();
    type Criterion<'a> = (&'a str, Duration, Box<dyn FnOnce(&mut Emitted) -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("worked example, r = 0.5", Duration::from_secs(1), Box::new(c1)),
        ("worked example, r = 2", Duration::from_secs(1), Box::new(c2)),
        ("coincidence crossing", Duration::from_secs(1), Box::new(c3)),
        ("best-response oracle equivalence", Duration::from_secs(120), Box::new(|_: &mut Emitted| c4())),
        ("commitment oracle equivalence", Duration::from_secs(600), Box::new(c5)),
        ("prefix-support property", Duration::from_secs(1), Box::new(|e: &mut Emitted| c6(e))),
        ("NE floor and commitment cap", Duration::from_secs(120), Box::new(|_: &mut Emitted| c7())),
        ("two-battlefield divergence", Duration::from_secs(1), Box::new(|_: &mut Emitted| c8())),
        ("split/merge invariance", Duration::from_secs(10), Box::new(|_: &mut Emitted| c9())),
        ("off-support and alpha-beta residuals", Duration::from_secs(1), Box::new(|e: &mut Emitted| c10(e))),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(|| run(&mut emitted)));
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass && elapsed <= budget, o.detail),
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panicked: {msg}"))
            }
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} {:>2}. {name}: {detail} [{:.2}s of {}s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
