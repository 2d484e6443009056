//! Budget ratios at which commitment brings the leader nothing.
//!
//!     cargo run --example coincidence

use lottery_blotto::analysis::{check_coincidence, coincidence_threshold, compare};
use lottery_blotto::GameInstance;

fn main() -> lottery_blotto::Result<()> {
    // Two ratio classes: {battlefield 0} with ratio 1, {battlefield 1} with ratio 10.
    let (va, vb) = (vec![1.0, 5.0], vec![1.0, 0.5]);
    let t = coincidence_threshold(1.0, 1.0, 5.0, 0.5)?;
    println!("threshold x_a/x_b = {t:.12}");

    for r in [0.5 * t, t, 2.0 * t] {
        let game = GameInstance::new(r, 1.0, va.clone(), vb.clone())?;
        let rep = check_coincidence(&game);
        let c = compare(&game)?;
        println!("r = {r:.6}: predicted coincide {}  SE u_a {:.9}  NE u_a {:.9}",
            rep.coincides, c.se.leader_utility, c.ne.leader_utility);
    }

    // Three distinct ratios never coincide.
    let three = GameInstance::new(1.0, 1.0, vec![1.0, 2.0, 3.0], vec![3.0, 2.0, 1.0])?;
    println!("three classes: {:?}", check_coincidence(&three));
    Ok(())
}
