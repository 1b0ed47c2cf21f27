//! L² norms, derivative seminorms and iterate norm tables.

use super::{BoxDomain, DeltaGrid, QuadratureGrid};
use crate::error::AnalysisError;
use crate::pdo::{LinearPDO, DEFAULT_TERM_BUDGET};
use crate::symbolic::{derivative, DiffVar, Expr, MultiIndex};
use serde::Serialize;
use std::collections::BTreeMap;

/// `‖f‖_{L²(K)}` by composite Simpson of `|f|²`.
pub fn l2_norm(f: &Expr, domain: &BoxDomain, grid: &QuadratureGrid) -> Result<f64, AnalysisError> {
    let sq = grid.integrate(domain, |x| Ok(f.eval_real_point(x)?.norm_sqr()))?;
    Ok(sq.max(0.0).sqrt())
}

/// All derivatives `D^α f` for `|α| ≤ order`, built one axis step at a
/// time with simplification between steps.
pub fn derivative_table(
    f: &Expr,
    dim: usize,
    order: u32,
) -> BTreeMap<MultiIndex, Expr> {
    let mut table = BTreeMap::new();
    table.insert(MultiIndex::zeros(dim), f.clone());
    for q in 1..=order {
        for alpha in MultiIndex::with_order(dim, q) {
            let axis = alpha.0.iter().position(|&a| a > 0).expect("order ≥ 1");
            let mut below = alpha.clone();
            below.0[axis] -= 1;
            let prev = table.get(&below).expect("built level by level").clone();
            table.insert(alpha, derivative(&prev, DiffVar::Var(axis)));
        }
    }
    table
}

/// `‖∇^q f‖_δ = Σ_{|α|=q} ‖∂^α f‖_{L²(G_δ)}`, 0 on an empty shrunk domain.
pub fn nabla_norm(
    f: &Expr,
    q: u32,
    delta: f64,
    domain: &BoxDomain,
    grid: &QuadratureGrid,
) -> Result<f64, AnalysisError> {
    let Some(shrunk) = domain.shrink(delta) else {
        return Ok(0.0);
    };
    let table = derivative_table(f, domain.dim(), q);
    let mut acc = 0.0;
    for alpha in MultiIndex::with_order(domain.dim(), q) {
        acc += l2_norm(&table[&alpha], &shrunk, grid)?;
    }
    Ok(acc)
}

/// `N^{pm}(u) = sup_{0<δ≤1} δ^{pm} ‖∇^{pm}u‖_δ`, maximized over the grid.
pub fn npm_seminorm(
    u: &Expr,
    p: u32,
    m: u32,
    domain: &BoxDomain,
    delta_grid: &DeltaGrid,
    grid: &QuadratureGrid,
) -> Result<f64, AnalysisError> {
    let order = p * m;
    let table = derivative_table(u, domain.dim(), order);
    let indices = MultiIndex::with_order(domain.dim(), order);
    let mut best = 0.0f64;
    for &delta in delta_grid.points() {
        let Some(shrunk) = domain.shrink(delta) else {
            continue;
        };
        let mut s = 0.0;
        for alpha in &indices {
            s += l2_norm(&table[alpha], &shrunk, grid)?;
        }
        best = best.max(delta.powi(order as i32) * s);
    }
    Ok(best)
}

/// Table of iterate norms `j ↦ ‖P^j u‖_{L²(K)}`.
#[derive(Debug, Clone, Serialize)]
pub struct NormTable {
    pub values: Vec<f64>,
    /// Set when the expression size crossed the term budget: the table
    /// holds the rows computed up to (excluding) this index.
    pub truncated_at: Option<usize>,
}

impl NormTable {
    pub fn complete(&self) -> bool {
        self.truncated_at.is_none()
    }
}

/// Compute `j ↦ ‖P^j u‖` for `j ≤ jmax` by successive application of `P`
/// (never by expanding `P^j` symbolically).
pub fn iterate_norms(
    op: &LinearPDO,
    u: &Expr,
    domain: &BoxDomain,
    jmax: u32,
    grid: &QuadratureGrid,
) -> Result<NormTable, AnalysisError> {
    let mut values = Vec::with_capacity(jmax as usize + 1);
    let mut cur = u.clone();
    for j in 0..=jmax {
        values.push(l2_norm(&cur, domain, grid)?);
        if j < jmax {
            if cur.node_count() > DEFAULT_TERM_BUDGET {
                return Ok(NormTable { values, truncated_at: Some(j as usize + 1) });
            }
            cur = op.apply(&cur)?;
        }
    }
    Ok(NormTable { values, truncated_at: None })
}
