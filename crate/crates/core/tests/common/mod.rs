#![allow(dead_code)]

use lottery_blotto::{Allocation, GameInstance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Values and budgets uniform in [0.1, 10].
pub fn random_instance(rng: &mut ChaCha8Rng, n: usize) -> GameInstance {
    let mut draw = || rng.gen_range(0.1..=10.0);
    let (xa, xb) = (draw(), draw());
    let va = (0..n).map(|_| draw()).collect();
    let vb = (0..n).map(|_| draw()).collect();
    GameInstance::new(xa, xb, va, vb).unwrap()
}

/// Strictly positive split of `budget`.
pub fn random_allocation(rng: &mut ChaCha8Rng, n: usize, budget: f64) -> Allocation {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    Allocation::proportional(&w, budget).unwrap()
}

pub fn worked_example(r: f64) -> GameInstance {
    GameInstance::new(r, 1.0, vec![1.0, 5.0], vec![1.0, 0.5]).unwrap()
}

pub fn close(got: &[f64], want: &[f64], tol: f64) -> bool {
    got.len() == want.len() && got.iter().zip(want).all(|(g, w)| (g - w).abs() <= tol)
}
