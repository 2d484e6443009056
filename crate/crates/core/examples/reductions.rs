//! Splitting a battlefield into equal-ratio pieces and merging it back.
//!
//!     cargo run --example reductions

use std::collections::BTreeSet;

use lottery_blotto::game::{merge_battlefields, split_battlefield, total_utility};
use lottery_blotto::{optimal_commitment, GameInstance, Player};

fn main() -> lottery_blotto::Result<()> {
    let game = GameInstance::new(2.0, 1.0, vec![1.0, 5.0], vec![1.0, 0.5])?;
    let se = optimal_commitment(&game)?;

    let (split, a, b) = split_battlefield(&game, 1, 4, &se.allocation, &se.follower_allocation)?;
    println!("split instance: {split:?}");
    println!("u_a before {:.9}  after {:.9}",
        se.leader_utility, total_utility(&split, Player::Leader, &a, &b)?);
    println!("re-solved u_a {:.9}", optimal_commitment(&split)?.leader_utility);

    let group: BTreeSet<usize> = (1..5).collect();
    let (merged, am, bm) = merge_battlefields(&split, &group, &a, &b)?;
    println!("merged back: {merged:?}  a {:.6?}  b {:.6?}", am.amounts(), bm.amounts());
    Ok(())
}
