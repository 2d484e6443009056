//! Sweep the budget ratio and print the CSV the CLI writes.
//!
//!     cargo run --example sweep

use lottery_blotto::analysis::{budget_sweep, sweep_csv};
use lottery_blotto::GameInstance;

fn main() -> lottery_blotto::Result<()> {
    let game = GameInstance::new(2.0, 1.0, vec![1.0, 5.0], vec![1.0, 0.5])?;
    let rs: Vec<f64> = (0..12).map(|i| 0.25 + 0.25 * i as f64).collect();
    let rows = budget_sweep(&game, &rs);
    print!("{}", sweep_csv(&rows));
    Ok(())
}
