//! One-dimensional maximisation of unimodal profiles.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the maximum of `f` on `[a, b]`.
///
/// Stops when the bracket is narrower than `x_tol`. Returns the best point
/// seen together with its value, so endpoints of a monotone profile are
/// approached rather than missed.
pub fn golden_section_max(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, x_tol: f64) -> (f64, f64) {
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    let mut iters = 0;
    while hi - lo > x_tol && iters < 200 {
        iters += 1;
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
            if f1 > best.1 {
                best = (x1, f1);
            }
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
            if f2 > best.1 {
                best = (x2, f2);
            }
        }
    }
    best
}

/// Coarse grid of `samples` points on `[a, b]` (endpoints included) followed
/// by golden-section refinement around the best grid point.
///
/// Returns `(samples, argmax, max)`.
pub fn grid_refine_max(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    samples: usize,
    x_tol: f64,
) -> (Vec<(f64, f64)>, f64, f64) {
    let samples = samples.max(2);
    let grid: Vec<(f64, f64)> = (0..samples)
        .map(|i| {
            let t = a + (b - a) * i as f64 / (samples - 1) as f64;
            (t, f(t))
        })
        .collect();
    let (ib, &(tb, fb)) = grid
        .iter()
        .enumerate()
        .max_by(|x, y| x.1 .1.total_cmp(&y.1 .1))
        .expect("non-empty grid");
    let lo = grid[ib.saturating_sub(1)].0;
    let hi = grid[(ib + 1).min(samples - 1)].0;
    let (tr, fr) = golden_section_max(&mut f, lo, hi, x_tol);
    if fr > fb {
        (grid, tr, fr)
    } else {
        (grid, tb, fb)
    }
}
