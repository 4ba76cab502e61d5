//! One-dimensional search helpers shared by the potential and bound modules.

/// 1/φ, the golden-section shrink factor.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a minimum of `f` on `[a, b]`.
///
/// Stops once the bracket is narrower than `xtol` and returns `(x_min, f(x_min))`.
/// Only a local minimum is guaranteed; callers bracket with a grid scan first.
pub fn golden_section_min<F>(f: F, mut a: f64, mut b: f64, xtol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);

    // 200 iterations shrink any finite bracket below f64 resolution.
    for _ in 0..200 {
        if (b - a).abs() <= xtol {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }

    let mid = 0.5 * (a + b);
    let fm = f(mid);
    // Return the best point seen in the final bracket.
    [(mid, fm), (x1, f1), (x2, f2)]
        .into_iter()
        .fold((mid, fm), |best, cand| if cand.1 < best.1 { cand } else { best })
}

/// Dense grid scan followed by golden-section refinement between the
/// neighbours of the best grid point.
pub fn grid_then_golden_min<F>(f: F, grid: &[f64], xtol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    assert!(!grid.is_empty(), "grid must not be empty");
    let (best, best_val) = grid
        .iter()
        .map(|&x| f(x))
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, y)| if y < acc.1 { (i, y) } else { acc });
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    let (x, y) = golden_section_min(&f, lo, hi, xtol);
    if y <= best_val {
        (x, y)
    } else {
        (grid[best], best_val)
    }
}

/// `n` points spaced evenly in `[lo, hi]`, endpoints included.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

/// `n` log-spaced points in `[lo, hi]`, both positive, endpoints included.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (lo.ln(), hi.ln());
    linspace(la, lb, n)
        .into_iter()
        .enumerate()
        .map(|(i, t)| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => t.exp(),
        })
        .collect()
}
