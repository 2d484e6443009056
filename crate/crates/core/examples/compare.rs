//! Leader advantage from commitment, with the known bounds.
//!
//!     cargo run --example compare

use lottery_blotto::analysis::{compare, leader_advantage_bounds};
use lottery_blotto::GameInstance;

fn main() -> lottery_blotto::Result<()> {
    for (xa, xb, va, vb) in [
        (2.0, 1.0, vec![1.0, 5.0], vec![1.0, 0.5]),
        (1.0, 1.0, vec![0.01, 1.0], vec![0.1, 1.0]),
        (0.5, 2.0, vec![3.0, 1.0, 2.0], vec![1.0, 2.0, 2.0]),
    ] {
        let game = GameInstance::new(xa, xb, va, vb)?;
        let c = compare(&game)?;
        let b = leader_advantage_bounds(&game);
        println!("{game:?}");
        println!("  SE u_a {:.6} u_b {:.6}   NE u_a {:.6} u_b {:.6}",
            c.se.leader_utility, c.se.follower_utility, c.ne.leader_utility, c.ne.follower_utility);
        println!("  SE/NE {:.6}  <= {:.6}   NE u_a >= {:.6}", c.leader_ratio, c.cor1_upper, b.ne_lower_bound);
        if let Some(t) = b.two_battlefield {
            println!("  normalized two-battlefield: lower {:.6} upper {:.6} actual {:?}",
                t.lower, t.upper, t.normalized_leader_ratio);
        }
    }
    Ok(())
}
