//! Cross-check the closed forms against brute-force grid search.
//!
//!     cargo run --release --example oracle_verify

use lottery_blotto::oracle::{oracle_best_response, oracle_commitment};
use lottery_blotto::{best_response, optimal_commitment, Allocation, GameInstance, GridSpec};

fn main() -> lottery_blotto::Result<()> {
    let game = GameInstance::new(3.0, 1.0, vec![1.0, 2.0, 9.0], vec![2.0, 1.0, 1.0])?;
    let grid = GridSpec::new(300, 3)?;

    let a = Allocation::new(vec![1.0, 1.0, 1.0], game.budget_a())?;
    let exact = best_response(&game, &a)?;
    let (grid_b, grid_u) = oracle_best_response(&game, &a, &grid)?;
    println!("best response: exact {:.5?}  grid {:.5?} (u_b {:.6})",
        exact.allocation.amounts(), grid_b.amounts(), grid_u);

    let se = optimal_commitment(&game)?;
    let oc = oracle_commitment(&game, &grid)?;
    println!("commitment: closed form u_a {:.6} support {:?}", se.leader_utility, se.support);
    println!("            grid        u_a {:.6} support {:?}", oc.utility, oc.support);
    println!("            gap {:.2e}", se.leader_utility - oc.utility);
    Ok(())
}
