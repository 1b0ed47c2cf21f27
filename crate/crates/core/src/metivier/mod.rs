//! The explicit function separating the iterate class of a non-elliptic
//! operator from the derivative class.
//!
//! For a constant-coefficient operator `P` of order `m` whose principal
//! symbol vanishes at a unit direction `ξ₀`, the oscillatory integral
//!
//! ```text
//! u(x) = ∫₁^∞ φ(ρ^ε (x − x₀)) e^{−ρ^η} e^{iρ⟨x−x₀, ξ₀⟩} dρ,
//! η = (m − ε)/(ms)
//! ```
//!
//! has directional derivatives at `x₀` growing like `Γ((α+1)/η)` — Gevrey
//! order `1/η > s` — while its `P`-iterate L² norms only grow with Gevrey
//! order below `s`. The symbol zero removes the top `ρ^{qm}` power from
//! the iterated integrand, and that is the entire mechanism.
//!
//! The spatial cutoff `φ` here is a tensor product of one-dimensional
//! plateau profiles built from `cutexp`: identically 1 near the origin,
//! supported in a box inside `B(0, 2δ)`, of Gevrey class σ. The plateau
//! makes every Leibniz term that differentiates `φ` vanish at `x₀`, so
//! the directional derivatives there reduce exactly to
//! `(1/η)·Γ_upper((α+1)/η, 1)` and the incomplete-gamma oracle is exact
//! rather than asymptotic.

mod oscillatory;
mod params;
mod report;

pub use oscillatory::{adaptive_oscillatory, OscIntegrandSpec};
pub use params::MetivierParams;
pub use report::{
    apply_iterate_under_integral, counterexample_report, directional_derivative_u, eval_u,
    iterate_norm_table, CounterexampleConfig, CounterexampleReport, DirectionalDerivative,
    ExponentFit, IterateEvaluator, PsiDerivTables, SideReport, GAP_MARGIN,
};

use crate::error::MetivierError;
use crate::symbolic::{simplify, Expr};
use num_complex::Complex64;

/// Radial Gevrey-σ bump profile normalized to 1 at the origin:
/// `g(x) = exp(1 − (1 − |x/(2δ)|²)^{−1/(σ−1)})` for `|x| < 2δ`, else 0.
///
/// Returned as an expression in `n` variables through the squared-radius
/// primitive, so it is smooth everywhere including the origin.
pub fn bump(sigma: f64, delta: f64, n: usize) -> Result<Expr, MetivierError> {
    if sigma <= 1.0 {
        return Err(MetivierError::Constraint(format!("bump needs σ > 1, got {sigma}")));
    }
    if delta <= 0.0 {
        return Err(MetivierError::Constraint(format!("bump needs δ > 0, got {delta}")));
    }
    let q = Expr::Sum(
        (0..n)
            .map(|k| {
                Expr::Prod(vec![
                    Expr::real(1.0 / (2.0 * delta * (2.0 * delta))),
                    Expr::var(k).powi(2),
                ])
            })
            .collect(),
    );
    Ok(simplify(&Expr::Bump { sigma, arg: Box::new(q) }))
}

/// One-dimensional plateau profile `ψ`: 1 on `|v| ≤ v₀`, 0 on `|v| ≥ 1`,
/// Gevrey-σ in between via the quotient step
/// `S(w) = E(1−w) / (E(w) + E(1−w))`, `E(w) = cutexp(1/(σ−1), w)`,
/// evaluated at `w = (v² − v₀²)/(1 − v₀²)`.
///
/// The denominator never vanishes (the two cutoffs cannot both be zero),
/// so evaluation is total, and `exp(−w^{−a})` with `a = 1/(σ−1)` is flat
/// of Gevrey class `1 + 1/a = σ` at the junctions.
pub fn plateau_profile(sigma: f64, v0: f64, v: &Expr) -> Result<Expr, MetivierError> {
    if sigma <= 1.0 || !(0.0 < v0 && v0 < 1.0) {
        return Err(MetivierError::Constraint(format!(
            "plateau needs σ > 1 and 0 < v₀ < 1, got σ={sigma}, v₀={v0}"
        )));
    }
    let a = 1.0 / (sigma - 1.0);
    let scale = 1.0 / (1.0 - v0 * v0);
    // w = (v² − v₀²)/(1 − v₀²)
    let w = Expr::Sum(vec![
        Expr::Prod(vec![Expr::real(scale), v.clone().powi(2)]),
        Expr::real(-v0 * v0 * scale),
    ]);
    let e_w = Expr::CutExp { a, arg: Box::new(w.clone()) };
    let one_minus_w = Expr::Sum(vec![Expr::one(), Expr::Prod(vec![Expr::real(-1.0), w])]);
    let e_1mw = Expr::CutExp { a, arg: Box::new(one_minus_w) };
    let den = Expr::Sum(vec![e_w, e_1mw.clone()]);
    Ok(simplify(&Expr::Prod(vec![e_1mw, den.powi(-1)])))
}

/// `Γ_upper(a, 1) = ∫₁^∞ t^{a−1} e^{−t} dt`, the exact leading constant
/// of the directional derivatives at the center.
pub fn gamma_upper_at_one(a: f64) -> f64 {
    statrs::function::gamma::gamma_ur(a, 1.0) * statrs::function::gamma::gamma(a)
}

/// `ln Γ_upper(a, 1)`, safe for large `a`.
pub fn ln_gamma_upper_at_one(a: f64) -> f64 {
    statrs::function::gamma::gamma_ur(a, 1.0).ln() + statrs::function::gamma::ln_gamma(a)
}

/// Closed-form leading term `(1/η)·Γ_upper((α+1)/η, 1)` of
/// `D_{ξ₀}^α u(x₀)`.
pub fn directional_derivative_closed_form(eta: f64, alpha: u32) -> f64 {
    (1.0 / eta) * gamma_upper_at_one((alpha as f64 + 1.0) / eta)
}

/// Its logarithm, for the slope fits at large α.
pub fn ln_directional_derivative_closed_form(eta: f64, alpha: u32) -> f64 {
    -eta.ln() + ln_gamma_upper_at_one((alpha as f64 + 1.0) / eta)
}

pub(crate) fn complex_zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_examples() {
        let g = bump(1.5, 0.5, 2).unwrap();
        // g(0) = 1
        assert!((g.eval_real_point(&[0.0, 0.0]).unwrap().re - 1.0).abs() < 1e-15);
        // |x| = 0.5 with 2δ = 1: |x/(2δ)|² = 0.25 → e^{−7/9}
        let v = g.eval_real_point(&[0.5, 0.0]).unwrap().re;
        assert!((v - (-7.0f64 / 9.0).exp()).abs() < 1e-12, "{v}");
        let v = g.eval_real_point(&[0.3, 0.4]).unwrap().re;
        assert!((v - (-7.0f64 / 9.0).exp()).abs() < 1e-12, "radial: {v}");
        // support
        assert_eq!(g.eval_real_point(&[1.0, 0.0]).unwrap().re, 0.0);
        assert_eq!(g.eval_real_point(&[0.8, 0.8]).unwrap().re, 0.0);
        assert!(bump(1.0, 0.5, 2).is_err());
    }

    #[test]
    fn plateau_is_flat_then_decays() {
        let psi = plateau_profile(1.5, 0.5, &Expr::var(0)).unwrap();
        for &v in &[0.0, 0.2, 0.5] {
            assert!((psi.eval_real_point(&[v]).unwrap().re - 1.0).abs() < 1e-15, "v={v}");
        }
        for &v in &[0.8, 0.85, 0.9] {
            let val = psi.eval_real_point(&[v]).unwrap().re;
            assert!(val > 0.0 && val < 1.0, "v={v}: {val}");
        }
        for &v in &[1.0, 1.5, -2.0] {
            assert_eq!(psi.eval_real_point(&[v]).unwrap().re, 0.0, "v={v}");
        }
        // derivatives vanish on the plateau; the quotient-rule terms
        // cancel exactly in real arithmetic and to roundoff in floats
        let d = crate::symbolic::derivative(&psi, crate::symbolic::DiffVar::Var(0));
        for &v in &[0.0, 0.3, 0.49] {
            assert!(d.eval_real_point(&[v]).unwrap().norm() < 1e-14, "v={v}");
        }
        let d2 = crate::symbolic::derivative(&d, crate::symbolic::DiffVar::Var(0));
        assert!(d2.eval_real_point(&[0.25]).unwrap().norm() < 1e-13);
        assert!(d2.eval_real_point(&[0.85]).unwrap().norm() > 0.0);
    }

    #[test]
    fn gamma_upper_oracle_values() {
        // frozen against an independent high-precision computation
        assert!((gamma_upper_at_one(1.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert!(
            (gamma_upper_at_one(2.1052631578947367) - 8.012526253439655e-01).abs() < 1e-12
        );
        assert!(
            (gamma_upper_at_one(23.157894736842106) / 1.838716373426377e21 - 1.0).abs() < 1e-12
        );
    }
}
