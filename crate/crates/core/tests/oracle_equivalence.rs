//! Closed-form solvers against the brute-force grid searches.

mod common;

use common::{random_allocation, random_instance, rng};
use lottery_blotto::commitment::{commitment_candidates, Candidate};
use lottery_blotto::game::total_utility;
use lottery_blotto::oracle::{is_prefix_support, oracle_best_response, oracle_commitment};
use lottery_blotto::{best_response, optimal_commitment, CaseTag, GameInstance, GridSpec, Player};
use rand::Rng;

#[test]
fn oracle_never_beats_best_response() {
    let mut r = rng(11);
    let grid = GridSpec::new(300, 2).unwrap();
    for _ in 0..60 {
        let n = r.gen_range(1..=3);
        let g = random_instance(&mut r, n);
        let a = random_allocation(&mut r, n, g.budget_a());
        let br = best_response(&g, &a).unwrap();
        let exact = total_utility(&g, Player::Follower, &a, &br.allocation).unwrap();
        let (_, oracle) = oracle_best_response(&g, &a, &grid).unwrap();
        assert!(oracle <= exact + 1e-6, "{oracle} > {exact}");
        assert!(exact - oracle < 1e-4, "{exact} vs {oracle}");
    }
}

#[test]
fn random_follower_allocations_never_win() {
    let mut r = rng(12);
    let g = random_instance(&mut r, 3);
    let a = random_allocation(&mut r, 3, g.budget_a());
    let br = best_response(&g, &a).unwrap();
    let exact = total_utility(&g, Player::Follower, &a, &br.allocation).unwrap();
    for _ in 0..200_000 {
        let b = random_allocation(&mut r, 3, g.budget_b());
        assert!(total_utility(&g, Player::Follower, &a, &b).unwrap() <= exact + 1e-12);
    }
}

#[test]
fn commitment_beats_oracle_on_random_instances() {
    let mut r = rng(13);
    let grid = GridSpec::new(150, 3).unwrap();
    for _ in 0..120 {
        let n = r.gen_range(2..=4);
        let g = random_instance(&mut r, n);
        let se = optimal_commitment(&g).unwrap();
        let oracle = oracle_commitment(&g, &grid).unwrap();
        assert!(se.leader_utility >= oracle.utility - 1e-3, "{g:?}: {} vs {}", se.leader_utility, oracle.utility);
        assert!(is_prefix_support(&g, &oracle.support), "{g:?}: {:?}", oracle.support);
    }
}

/// The follower abandons the battlefield the leader values most relative to
/// it and contests two battlefields of distinct ratios.
fn two_of_three() -> GameInstance {
    GameInstance::new(3.0, 1.0, vec![1.0, 2.0, 9.0], vec![2.0, 1.0, 1.0]).unwrap()
}

#[test]
fn partial_support_case_matches_oracle() {
    let g = two_of_three();
    let oracle = oracle_commitment(&g, &GridSpec::new(500, 3).unwrap()).unwrap();
    let mut support = oracle.support.clone();
    support.sort_unstable();
    assert_eq!(support, vec![0, 1]);
    let se = optimal_commitment(&g).unwrap();
    assert_eq!(se.case_tag, CaseTag::Case2_2);
    let mut chosen = se.support.clone();
    chosen.sort_unstable();
    assert_eq!(chosen, vec![0, 1]);
    assert!((se.leader_utility - oracle.utility).abs() < 1e-3);
    assert!(se.leader_utility >= oracle.utility - 1e-9);
}

#[test]
fn every_candidate_round_trip_is_reported() {
    let g = two_of_three();
    let cands = commitment_candidates(&g).unwrap();
    assert_eq!(cands.len(), 3);
    for c in &cands {
        if let Candidate::Valid(s) = &c.outcome {
            let br = best_response(&g, &s.allocation).unwrap();
            let mut a = br.support.clone();
            let mut b = c.support.clone();
            a.sort_unstable();
            b.sort_unstable();
            assert_eq!(a, b);
        }
    }
}

#[test]
fn worked_example_oracle_points() {
    let g = GameInstance::new(0.5, 1.0, vec![1.0, 5.0], vec![1.0, 0.5]).unwrap();
    let oracle = oracle_commitment(&g, &GridSpec::new(500, 2).unwrap()).unwrap();
    assert!((oracle.utility - 2.458).abs() < 1e-3);
}
