//! The follower's water-filling response to a fixed leader allocation.
//!
//!     cargo run --example best_response

use lottery_blotto::best_response::support_prefix;
use lottery_blotto::game::total_utility;
use lottery_blotto::{best_response, Allocation, GameInstance, Player};

fn main() -> lottery_blotto::Result<()> {
    let game = GameInstance::new(2.0, 1.0, vec![1.0, 5.0], vec![1.0, 0.5])?;

    for split in [[0.543, 1.457], [1.0, 1.0], [0.1, 1.9]] {
        let a = Allocation::new(split.to_vec(), game.budget_a())?;
        let br = best_response(&game, &a)?;
        let u_a = total_utility(&game, Player::Leader, &a, &br.allocation)?;
        let u_b = total_utility(&game, Player::Follower, &a, &br.allocation)?;
        println!(
            "leader {:?} -> follower {:.4?}  support {:?}  level {:.4}  u_a {:.4}  u_b {:.4}",
            split,
            br.allocation.amounts(),
            br.support,
            br.water_level,
            u_a,
            u_b
        );
        // In ascending-ratio order the support is always a prefix.
        println!("  prefix form: {:?}", support_prefix(&game, &a)?);
    }
    Ok(())
}
