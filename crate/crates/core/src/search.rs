//! One-dimensional root finding and maximization.

/// Golden-section maximization of a unimodal function on `[lo, hi]`.
///
/// Runs `iterations` interval reductions and returns the best point seen
/// together with its value.
pub fn golden_section_max<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    iterations: usize,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let (mut best_x, mut best_f) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    for _ in 0..iterations {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
            if f1 > best_f {
                best_x = x1;
                best_f = f1;
            }
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
            if f2 > best_f {
                best_x = x2;
                best_f = f2;
            }
        }
    }
    (best_x, best_f)
}

/// Outcome of [`bisect_sign_change`].
#[derive(Debug, Clone, Copy)]
pub struct Bisection {
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl Bisection {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Bisection for the point where `positive(x)` switches from `true` to
/// `false` on `[lo, hi]`, assuming `positive(lo)` and `!positive(hi)`.
///
/// Stops once `hi - lo <= rel_tol * hi + abs_tol` or after `max_iter` steps.
pub fn bisect_sign_change<F: FnMut(f64) -> bool>(
    mut positive: F,
    mut lo: f64,
    mut hi: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_iter: usize,
) -> Bisection {
    let mut iterations = 0;
    while iterations < max_iter {
        if hi - lo <= rel_tol * hi.abs() + abs_tol {
            return Bisection {
                lo,
                hi,
                iterations,
                converged: true,
            };
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Adjacent floats.
            return Bisection {
                lo,
                hi,
                iterations,
                converged: true,
            };
        }
        if positive(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Bisection {
        lo,
        hi,
        iterations,
        converged: hi - lo <= rel_tol * hi.abs() + abs_tol,
    }
}
