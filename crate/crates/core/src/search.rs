//! Univariate maximization: dense scan, then golden-section refinement
//! around the best sample.

const INV_PHI: f64 = 0.618_033_988_749_894_9; // (sqrt(5) - 1) / 2

/// Maximize `f` on `[lo, hi]` by golden-section search. `f` may return
/// `None` for infeasible points, which compare below every feasible value.
/// Returns the best point seen together with its value.
pub(crate) fn golden_max<F>(f: &F, mut lo: f64, mut hi: f64, tol: f64) -> Option<(f64, f64)>
where
    F: Fn(f64) -> Option<f64>,
{
    let val = |x: f64| f(x).unwrap_or(f64::NEG_INFINITY);
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = val(c);
    let mut fd = val(d);
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    for _ in 0..300 {
        if (hi - lo).abs() <= tol {
            break;
        }
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = val(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = val(d);
        }
        for (x, v) in [(c, fc), (d, fd)] {
            if v > best.1 {
                best = (x, v);
            }
        }
    }
    best.1.is_finite().then_some(best)
}

/// Scan `samples` points of `grid` and refine around the best one with
/// golden-section search on the bracket formed by its neighbours.
///
/// `grid(i)` maps a sample index to the search coordinate; `f` is evaluated
/// on the coordinate. Returns `(coordinate, value, sample index of the scan
/// winner)`.
pub(crate) fn scan_then_refine<G, F>(grid: G, samples: usize, f: &F, tol: f64) -> Option<(f64, f64, usize)>
where
    G: Fn(usize) -> f64,
    F: Fn(f64) -> Option<f64>,
{
    let mut best: Option<(usize, f64)> = None;
    for i in 0..samples {
        if let Some(v) = f(grid(i)) {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((i, v));
            }
        }
    }
    let (i, v) = best?;
    let lo = grid(i.saturating_sub(1));
    let hi = grid((i + 1).min(samples - 1));
    let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let x0 = grid(i);
    match golden_max(f, lo, hi, tol) {
        Some((x, fx)) if fx >= v => Some((x, fx, i)),
        _ => Some((x0, v, i)),
    }
}
