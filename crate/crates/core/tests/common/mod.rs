//! Shared oracles for the integration and acceptance suites. Everything
//! here is brute force by design and independent of the library's
//! search-based implementations.

use ultradiff::weights::Weight;

/// Brute-force grid evaluation of `φ*(y) = max(0, sup_{t≥0}(yt − ω(e^t)))`.
///
/// The window grows to the right until the discrete maximizer is interior
/// (a maximizer at the domain boundary `t = 0` is accepted as-is), then
/// the grid step is halved until the value stabilizes.
pub fn conjugate_grid_oracle(w: &Weight, y: f64) -> f64 {
    let g = |t: f64| y * t - w.phi(t);
    let mut window = 4.0f64;
    let mut step = 1e-3;
    let mut best_t;
    loop {
        best_t = argmax_on_grid(&g, window, step);
        if best_t < window - step || window > 600.0 {
            break;
        }
        window *= 2.0;
    }
    let mut prev = g(best_t);
    for _ in 0..40 {
        step /= 2.0;
        let lo = (best_t - 4.0 * step).max(0.0);
        let hi = (best_t + 4.0 * step).min(window);
        let mut best_v = f64::NEG_INFINITY;
        let mut t = lo;
        while t <= hi {
            let v = g(t);
            if v > best_v {
                best_v = v;
                best_t = t;
            }
            t += step;
        }
        if (best_v - prev).abs() <= 1e-13 * (1.0 + best_v.abs()) {
            prev = best_v;
            break;
        }
        prev = best_v;
    }
    prev.max(0.0)
}

fn argmax_on_grid(g: &impl Fn(f64) -> f64, window: f64, step: f64) -> f64 {
    let n = (window / step) as usize;
    let mut best_t = 0.0;
    let mut best_v = g(0.0);
    for i in 1..=n {
        let t = i as f64 * step;
        let v = g(t);
        if v > best_v {
            best_v = v;
            best_t = t;
        }
    }
    best_t
}

pub fn assert_rel(got: f64, want: f64, tol: f64, what: &str) {
    let err = (got - want).abs() / (1.0 + want.abs());
    assert!(err <= tol, "{what}: got {got}, want {want}, rel err {err:.3e} > {tol:.1e}");
}
