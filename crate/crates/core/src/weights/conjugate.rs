//! Young conjugate `φ*(y) = max(0, sup_{t≥0} { yt − φ(t) })` with `φ = ω∘exp`.
//!
//! Convexity of `φ` (axiom (δ)) makes `t ↦ yt − φ(t)` concave, so the
//! supremum is located by bracket expansion followed by ternary search; no
//! derivatives are needed. Values are clamped at 0 so that `φ*(0) = 0`
//! holds exactly for normalized weights.

use super::Weight;
use crate::error::ConjugateError;
use std::collections::HashMap;
use std::sync::Mutex;

/// Expansion cap: `φ` evaluates `ω(e^t)`, whose argument overflows past
/// t ≈ 700, so the cap keeps `2t` inside that range. A bracket that grows
/// this far means `yt − φ(t)` is still increasing at astronomical `t`,
/// i.e. the supremum is numerically +∞.
const T_CAP: f64 = 340.0;

/// Memoizing evaluator for the Young conjugate of one weight.
///
/// Thread-safe; the memo table behaves as if access were serialized.
#[derive(Debug)]
pub struct YoungConjugate {
    weight: Weight,
    rel_tol: f64,
    memo: Mutex<HashMap<u64, f64>>,
}

impl YoungConjugate {
    pub fn new(weight: Weight, rel_tol: f64) -> Self {
        Self { weight, rel_tol, memo: Mutex::new(HashMap::new()) }
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    /// `φ*(y)` for `y ≥ 0`.
    pub fn eval(&self, y: f64) -> Result<f64, ConjugateError> {
        debug_assert!(y >= 0.0);
        if y == 0.0 {
            return Ok(0.0);
        }
        let key = y.to_bits();
        if let Some(&v) = self.memo.lock().unwrap().get(&key) {
            return Ok(v);
        }
        let v = self.search(y)?;
        self.memo.lock().unwrap().insert(key, v);
        Ok(v)
    }

    /// `λ φ*(y/λ)`, the scaled conjugate that appears in every growth bound.
    pub fn scaled(&self, y: f64, lambda: f64) -> Result<f64, ConjugateError> {
        debug_assert!(lambda > 0.0);
        Ok(lambda * self.eval(y / lambda)?)
    }

    fn search(&self, y: f64) -> Result<f64, ConjugateError> {
        let g = |t: f64| y * t - self.weight.phi(t);
        // Expand until the objective is decreasing at the right edge; by
        // concavity the maximizer then lies in [0, 2T].
        let mut t_hi = 1.0;
        loop {
            if t_hi > T_CAP {
                return Err(ConjugateError::Divergent { y, t_reached: t_hi });
            }
            if g(2.0 * t_hi) < g(t_hi) {
                break;
            }
            t_hi *= 2.0;
        }
        let (mut lo, mut hi) = (0.0f64, 2.0 * t_hi);
        let mut iter = 0usize;
        while hi - lo > self.rel_tol * (1.0 + 0.5 * (hi + lo)) && iter < 300 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if g(m1) < g(m2) {
                lo = m1;
            } else {
                hi = m2;
            }
            iter += 1;
        }
        let t_star = 0.5 * (lo + hi);
        Ok(g(t_star).max(g(0.0)).max(0.0))
    }
}

/// Exact conjugate of the normalized Gevrey weight `max(0, t^{1/s} − 1)`.
///
/// The stationary point of `yt − (e^{t/s} − 1)` is `t* = s·log(sy)`, which
/// lies in the domain `t ≥ 0` only for `y ≥ 1/s`; there the value is
/// `sy(log(sy) − 1) + 1`. For `y < 1/s` the supremum sits at `t = 0` and
/// the conjugate is 0.
pub fn gevrey_conjugate_closed_form(s: f64, y: f64) -> f64 {
    if y <= 1.0 / s {
        0.0
    } else {
        (s * y * ((s * y).ln() - 1.0) + 1.0).max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gevrey_matches_closed_form_on_sample() {
        let c = Weight::gevrey(2.0).unwrap().conjugate();
        for &y in &[0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0] {
            let got = c.eval(y).unwrap();
            let want = gevrey_conjugate_closed_form(2.0, y);
            assert!(
                (got - want).abs() <= 1e-9 * (1.0 + want.abs()),
                "y={y}: got {got}, want {want}"
            );
        }
    }

    #[test]
    fn pinned_gevrey_values() {
        let c = Weight::gevrey(2.0).unwrap().conjugate();
        assert_eq!(c.eval(0.0).unwrap(), 0.0);
        assert!((c.eval(1.0).unwrap() - 0.3862943611198906).abs() < 1e-9);
        assert!((c.eval(2.0).unwrap() - 2.5451774444795623).abs() < 1e-9);
    }

    #[test]
    fn conjugate_is_monotone_and_convex_on_grid() {
        for w in Weight::catalog_defaults() {
            let c = w.conjugate();
            let ys: Vec<f64> = (0..=80).map(|i| 0.25 * i as f64).collect();
            let vals: Vec<f64> = ys.iter().map(|&y| c.eval(y).unwrap()).collect();
            for i in 1..vals.len() {
                assert!(vals[i] >= vals[i - 1] - 1e-9, "{} monotone at {}", w.label(), ys[i]);
            }
            for i in 1..vals.len() - 1 {
                let second = vals[i + 1] - 2.0 * vals[i] + vals[i - 1];
                assert!(second >= -1e-7, "{} convex at {}", w.label(), ys[i]);
            }
            // φ*(y)/y non-decreasing for y > 0
            for i in 5..vals.len() - 1 {
                let r0 = vals[i] / ys[i];
                let r1 = vals[i + 1] / ys[i + 1];
                assert!(r1 >= r0 - 1e-9, "{} ratio at {}", w.label(), ys[i]);
            }
        }
    }

    #[test]
    fn divergence_detected_for_bounded_weight() {
        // A bounded ω fails (γ); φ = ω∘exp is bounded, so yt − φ(t) grows
        // without limit and the bracket expansion must cap out.
        let table =
            super::super::WeightTable::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 1.0]).unwrap();
        let c = Weight::custom(table, false).conjugate();
        assert!(matches!(c.eval(4.0), Err(ConjugateError::Divergent { .. })));
        // the identity-table weight ω(t) = t has a finite conjugate
        let ident =
            super::super::WeightTable::new(vec![0.0, 1e9], vec![0.0, 1e9]).unwrap();
        let c = Weight::custom(ident, false).conjugate();
        assert!(c.eval(4.0).is_ok());
    }
}
