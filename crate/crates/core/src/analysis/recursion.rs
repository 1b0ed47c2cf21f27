//! Empirical constants for the shrinking-seminorm recursion
//! `N^{pm}(u) ≤ C₀ { N^{(p−1)m}(Pu) + Σ_{q<p} [e^{(1/k)φ*(pmk)} /
//! e^{(1/k)φ*(qmk)}] N^{qm}(u) }`.
//!
//! The constant is existential with unknown size, so everything here is
//! report-valued: each row carries the smallest `C₀` making the displayed
//! inequality true for the computed seminorms, never an assertion.

use super::{npm_seminorm, BoxDomain, DeltaGrid, QuadratureGrid};
use crate::error::AnalysisError;
use crate::pdo::{ellipticity_check, LinearPDO};
use crate::symbolic::Expr;
use crate::weights::YoungConjugate;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct RecursionRow {
    pub p: u32,
    pub lhs: f64,
    pub rhs_bracket: f64,
    /// `lhs / rhs`; `None` marks a degenerate 0/0 row.
    pub c0: Option<f64>,
}

/// Compute the minimal `C₀` per `p ≤ p_max` for an elliptic operator.
///
/// The ellipticity precondition is enforced by the sampled verdict on the
/// domain; a non-elliptic operator is rejected.
#[allow(clippy::too_many_arguments)]
pub fn empirical_recursion_constant(
    u: &Expr,
    op: &LinearPDO,
    p_max: u32,
    k: f64,
    conj: &YoungConjugate,
    domain: &BoxDomain,
    delta_grid: &DeltaGrid,
    grid: &QuadratureGrid,
) -> Result<Vec<RecursionRow>, AnalysisError> {
    let verdict = ellipticity_check(op, domain.bounds(), 5, 64, 1e-9, 0)?;
    if !verdict.is_elliptic() {
        return Err(AnalysisError::Input(
            "recursion constants are defined for (sampled) elliptic operators only".into(),
        ));
    }
    let m = op.order();
    if m == 0 {
        return Err(AnalysisError::Input("operator order must be ≥ 1".into()));
    }
    let pu = op.apply(u)?;
    // N^{qm}(u) for q ≤ p_max and N^{qm}(Pu) for q ≤ p_max − 1
    let mut n_u = Vec::with_capacity(p_max as usize + 1);
    for q in 0..=p_max {
        n_u.push(npm_seminorm(u, q, m, domain, delta_grid, grid)?);
    }
    let mut n_pu = Vec::with_capacity(p_max as usize);
    for q in 0..p_max {
        n_pu.push(npm_seminorm(&pu, q, m, domain, delta_grid, grid)?);
    }
    let mut rows = Vec::with_capacity(p_max as usize);
    for p in 1..=p_max {
        let lhs = n_u[p as usize];
        let gauge_p = conj.scaled((p * m) as f64, 1.0 / k)?;
        let mut bracket = n_pu[(p - 1) as usize];
        for q in 0..p {
            let gauge_q = conj.scaled((q * m) as f64, 1.0 / k)?;
            bracket += (gauge_p - gauge_q).exp() * n_u[q as usize];
        }
        let c0 = if lhs == 0.0 && bracket == 0.0 {
            None
        } else {
            Some(lhs / bracket)
        };
        rows.push(RecursionRow { p, lhs, rhs_bracket: bracket, c0 });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pdo::parse_operator;
    use crate::symbolic::parse;
    use crate::weights::Weight;

    #[test]
    fn constant_input_is_degenerate() {
        let lap = parse_operator("1*D[2,0] + 1*D[0,2]", 2).unwrap();
        let u = parse("5", 2).unwrap();
        let conj = Weight::gevrey(2.0).unwrap().conjugate();
        let domain = BoxDomain::new(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let rows = empirical_recursion_constant(
            &u,
            &lap,
            3,
            1.0,
            &conj,
            &domain,
            &DeltaGrid::geometric(1e-2, 8).unwrap(),
            &QuadratureGrid::uniform(2, 17).unwrap(),
        )
        .unwrap();
        for row in &rows {
            // N^{pm}(u) = 0 for p ≥ 1 while the bracket keeps the
            // positive N⁰(u) term, so the minimal constant is 0
            assert_eq!(row.c0, Some(0.0), "p={}", row.p);
        }
        // the all-zero input is the genuinely degenerate case
        let zero = parse("0", 2).unwrap();
        let rows = empirical_recursion_constant(
            &zero,
            &lap,
            2,
            1.0,
            &conj,
            &domain,
            &DeltaGrid::geometric(1e-2, 8).unwrap(),
            &QuadratureGrid::uniform(2, 17).unwrap(),
        )
        .unwrap();
        for row in &rows {
            assert!(row.c0.is_none(), "p={}", row.p);
        }
    }

    #[test]
    fn non_elliptic_operator_rejected() {
        let p = parse_operator("1*D[2,0]", 2).unwrap();
        let u = parse("x1*x2", 2).unwrap();
        let conj = Weight::gevrey(2.0).unwrap().conjugate();
        let domain = BoxDomain::new(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let err = empirical_recursion_constant(
            &u,
            &p,
            2,
            1.0,
            &conj,
            &domain,
            &DeltaGrid::geometric(1e-2, 8).unwrap(),
            &QuadratureGrid::uniform(2, 17).unwrap(),
        )
        .unwrap_err();
        assert!(matches!(err, AnalysisError::Input(_)));
    }

    #[test]
    fn eigenfunction_rows_are_finite() {
        let lap = parse_operator("1*D[2,0] + 1*D[0,2]", 2).unwrap();
        let u = parse("sin(pi*x1)*sin(pi*x2)", 2).unwrap();
        let conj = Weight::gevrey(2.0).unwrap().conjugate();
        let domain = BoxDomain::new(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let rows = empirical_recursion_constant(
            &u,
            &lap,
            3,
            1.0,
            &conj,
            &domain,
            &DeltaGrid::geometric(1e-2, 12).unwrap(),
            &QuadratureGrid::uniform(2, 33).unwrap(),
        )
        .unwrap();
        assert_eq!(rows.len(), 3);
        for row in rows {
            let c0 = row.c0.expect("nondegenerate");
            assert!(c0.is_finite() && c0 > 0.0, "p={} c0={c0}", row.p);
        }
    }
}
