//! Pure Nash equilibrium of the simultaneous game.
//!
//!     cargo run --example nash

use lottery_blotto::best_response::best_response_of;
use lottery_blotto::{solve_nash, GameInstance, Player};

fn main() -> lottery_blotto::Result<()> {
    let game = GameInstance::new(2.0, 1.0, vec![1.0, 5.0], vec![1.0, 0.5])?;
    let ne = solve_nash(&game)?;
    println!("mu* = {:.9}  (roots found: {:?})", ne.mu_star, ne.roots);
    println!("leader   {:.6?}  u_a {:.6}", ne.alloc_a.amounts(), ne.leader_utility);
    println!("follower {:.6?}  u_b {:.6}", ne.alloc_b.amounts(), ne.follower_utility);

    // Each side is already best-responding to the other.
    let br_b = best_response_of(&game, Player::Follower, &ne.alloc_a)?;
    let br_a = best_response_of(&game, Player::Leader, &ne.alloc_b)?;
    let gap = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    println!("max deviation from own best response: a {:.2e}  b {:.2e}",
        gap(br_a.allocation.amounts(), ne.alloc_a.amounts()),
        gap(br_b.allocation.amounts(), ne.alloc_b.amounts()));
    Ok(())
}
