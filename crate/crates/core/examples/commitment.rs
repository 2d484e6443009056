//! Optimal leader commitment, with every prefix-support candidate shown.
//!
//!     cargo run --example commitment

use lottery_blotto::commitment::{commitment_candidates, Candidate};
use lottery_blotto::{optimal_commitment, GameInstance};

fn show(name: &str, game: &GameInstance) -> lottery_blotto::Result<()> {
    println!("== {name}");
    for c in commitment_candidates(game)? {
        match &c.outcome {
            Candidate::Valid(s) => println!(
                "  K = {:?}: {:?}  alpha {:?}  u_a {:.6}",
                c.support, s.case_tag, s.alpha, s.leader_utility
            ),
            Candidate::Infeasible { reason } => println!("  K = {:?}: infeasible ({reason})", c.support),
            Candidate::Invalid { realized_support, .. } => {
                println!("  K = {:?}: follower actually contests {:?}", c.support, realized_support)
            }
        }
    }
    let best = optimal_commitment(game)?;
    println!(
        "  best: {:?} commit {:.4?}  follower {:.4?}  u_a {:.6}  u_b {:.6}",
        best.case_tag,
        best.allocation.amounts(),
        best.follower_allocation.amounts(),
        best.leader_utility,
        best.follower_utility
    );
    Ok(())
}

fn main() -> lottery_blotto::Result<()> {
    show("two battlefields", &GameInstance::new(2.0, 1.0, vec![1.0, 5.0], vec![1.0, 0.5])?)?;
    // The follower abandons the battlefield the leader values most.
    show("partial support", &GameInstance::new(3.0, 1.0, vec![1.0, 2.0, 9.0], vec![2.0, 1.0, 1.0])?)?;
    // Equal ratios everywhere: the leader just spreads in proportion to value.
    show("uniform ratio", &GameInstance::new(1.0, 1.0, vec![2.0, 4.0, 6.0], vec![1.0, 2.0, 3.0])?)?;
    Ok(())
}
