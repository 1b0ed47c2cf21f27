//! Linear partial differential operators with variable coefficients.
//!
//! An operator is a finite map `multi-index → coefficient expression`.
//! Internally coefficients are stored in ∂-form (plain partial
//! derivatives); the `D`-form with `D = (1/i)∂` is a presentation-layer
//! convention used by the text format `coef * D[α]`, converted on the way
//! in and out via `D^α = (−i)^{|α|} ∂^α`.

mod symbol;
mod text;

pub use symbol::{ellipticity_check, principal_symbol, EllipticityVerdict};
pub use text::{format_operator, parse_operator};

use crate::error::PdoError;
use crate::symbolic::{derivative, simplify_expanded, DiffVar, Expr, MultiIndex};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Which convention the operator was authored in. Semantics are always
/// internal ∂-form; this only steers round-trip formatting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    Partial,
    DForm,
}

/// Default cap on total stored expression nodes across coefficients;
/// compositions abort loudly instead of thrashing when iterate blowup
/// crosses it.
pub const DEFAULT_TERM_BUDGET: usize = 1_000_000;

/// A linear partial differential operator `Σ_α c_α(x) ∂^α`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearPDO {
    dim: usize,
    coeffs: BTreeMap<MultiIndex, Expr>,
    convention: Convention,
}

impl LinearPDO {
    /// Build from ∂-form coefficients. Zero coefficients are dropped.
    pub fn from_partial_coeffs(
        dim: usize,
        coeffs: impl IntoIterator<Item = (MultiIndex, Expr)>,
    ) -> Result<Self, PdoError> {
        let mut map = BTreeMap::new();
        for (alpha, expr) in coeffs {
            if alpha.dim() != dim {
                return Err(PdoError::DimensionMismatch(alpha.dim(), dim));
            }
            if let Some(maxv) = expr.max_var() {
                if maxv >= dim {
                    return Err(PdoError::DimensionMismatch(maxv + 1, dim));
                }
            }
            let expr = simplify_expanded(&expr);
            if !expr.is_const(0.0) {
                match map.entry(alpha) {
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(expr);
                    }
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        let merged =
                            simplify_expanded(&Expr::Sum(vec![o.get().clone(), expr]));
                        if merged.is_const(0.0) {
                            o.remove();
                        } else {
                            *o.get_mut() = merged;
                        }
                    }
                }
            }
        }
        Ok(Self { dim, coeffs: map, convention: Convention::Partial })
    }

    /// Build from D-form coefficients `a_α`, converting via
    /// `a_α D^α = a_α (−i)^{|α|} ∂^α`.
    pub fn from_d_coeffs(
        dim: usize,
        coeffs: impl IntoIterator<Item = (MultiIndex, Expr)>,
    ) -> Result<Self, PdoError> {
        let converted = coeffs.into_iter().map(|(alpha, expr)| {
            let phase = minus_i_pow(alpha.order());
            (alpha, expr.scale(phase))
        });
        let mut op = Self::from_partial_coeffs(dim, converted)?;
        op.convention = Convention::DForm;
        Ok(op)
    }

    /// The identity operator (order 0, coefficient 1).
    pub fn identity(dim: usize) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(MultiIndex::zeros(dim), Expr::one());
        Self { dim, coeffs, convention: Convention::Partial }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// Order `m`: maximal `|α|` with a nonzero coefficient. The zero
    /// operator has order 0.
    pub fn order(&self) -> u32 {
        self.coeffs.keys().map(MultiIndex::order).max().unwrap_or(0)
    }

    /// ∂-form coefficients in lexicographic multi-index order.
    pub fn partial_coeffs(&self) -> impl Iterator<Item = (&MultiIndex, &Expr)> {
        self.coeffs.iter()
    }

    /// D-form coefficient of `∂^α`-slot `α`: `a_α = c_α · i^{|α|}`.
    pub fn d_coeff(&self, alpha: &MultiIndex) -> Option<Expr> {
        self.coeffs.get(alpha).map(|c| {
            simplify_expanded(&c.clone().scale(i_pow(alpha.order())))
        })
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.values().map(Expr::node_count).sum()
    }

    /// Apply to a function: `Σ_α c_α(x) ∂^α f`, simplified.
    pub fn apply(&self, f: &Expr) -> Result<Expr, PdoError> {
        if let Some(maxv) = f.max_var() {
            if maxv >= self.dim {
                return Err(PdoError::DimensionMismatch(maxv + 1, self.dim));
            }
        }
        // derivative cache over the Leibniz lattice
        let mut cache: BTreeMap<MultiIndex, Expr> = BTreeMap::new();
        cache.insert(MultiIndex::zeros(self.dim), f.clone());
        let mut terms = Vec::with_capacity(self.coeffs.len());
        for (alpha, coeff) in &self.coeffs {
            let df = self.derivative_cached(&mut cache, alpha);
            terms.push(Expr::Prod(vec![coeff.clone(), df]));
        }
        Ok(simplify_expanded(&Expr::Sum(terms)))
    }

    fn derivative_cached(&self, cache: &mut BTreeMap<MultiIndex, Expr>, alpha: &MultiIndex) -> Expr {
        if let Some(e) = cache.get(alpha) {
            return e.clone();
        }
        // step down one derivative along the first nonzero axis
        let axis = alpha.0.iter().position(|&a| a > 0).expect("nonzero index");
        let mut below = alpha.clone();
        below.0[axis] -= 1;
        let prev = self.derivative_cached(cache, &below);
        let d = derivative(&prev, DiffVar::Var(axis));
        cache.insert(alpha.clone(), d.clone());
        d
    }

    /// Leibniz composition: `(self ∘ other)`.
    ///
    /// `c_α ∂^α (d_β ∂^β f) = Σ_{γ≤α} C(α,γ) c_α (∂^{α−γ} d_β) ∂^{γ+β} f`
    pub fn compose(&self, other: &LinearPDO) -> Result<LinearPDO, PdoError> {
        self.compose_with_budget(other, DEFAULT_TERM_BUDGET)
    }

    pub fn compose_with_budget(
        &self,
        other: &LinearPDO,
        budget: usize,
    ) -> Result<LinearPDO, PdoError> {
        if self.dim != other.dim {
            return Err(PdoError::DimensionMismatch(self.dim, other.dim));
        }
        let mut acc: BTreeMap<MultiIndex, Vec<Expr>> = BTreeMap::new();
        for (alpha, c_a) in &self.coeffs {
            for (beta, d_b) in &other.coeffs {
                // derivatives of d_b over the sub-lattice of alpha
                let mut cache: BTreeMap<MultiIndex, Expr> = BTreeMap::new();
                cache.insert(MultiIndex::zeros(self.dim), d_b.clone());
                for gamma in alpha.sub_indices() {
                    let da_minus_g = alpha.sub(&gamma);
                    let deriv = self.derivative_cached_for(&mut cache, &da_minus_g, d_b);
                    if deriv.is_const(0.0) {
                        continue;
                    }
                    let coeff = Expr::Prod(vec![
                        Expr::real(alpha.binomial(&gamma)),
                        c_a.clone(),
                        deriv,
                    ]);
                    acc.entry(gamma.add(beta)).or_default().push(coeff);
                }
            }
        }
        let mut total_nodes = 0usize;
        let mut coeffs = Vec::with_capacity(acc.len());
        for (idx, terms) in acc {
            let merged = simplify_expanded(&Expr::Sum(terms));
            total_nodes += merged.node_count();
            if total_nodes > budget {
                return Err(PdoError::TermBudget { budget, context: "compose".into() });
            }
            coeffs.push((idx, merged));
        }
        let mut op = LinearPDO::from_partial_coeffs(self.dim, coeffs)?;
        op.convention = self.convention;
        Ok(op)
    }

    fn derivative_cached_for(
        &self,
        cache: &mut BTreeMap<MultiIndex, Expr>,
        alpha: &MultiIndex,
        base: &Expr,
    ) -> Expr {
        if alpha.order() == 0 {
            return base.clone();
        }
        if let Some(e) = cache.get(alpha) {
            return e.clone();
        }
        let axis = alpha.0.iter().position(|&a| a > 0).expect("nonzero index");
        let mut below = alpha.clone();
        below.0[axis] -= 1;
        let prev = self.derivative_cached_for(cache, &below, base);
        let d = derivative(&prev, DiffVar::Var(axis));
        cache.insert(alpha.clone(), d.clone());
        d
    }

    /// `q`-th iterate by repeated composition; `q = 0` is the identity.
    pub fn iterate(&self, q: u32) -> Result<LinearPDO, PdoError> {
        self.iterate_with_budget(q, DEFAULT_TERM_BUDGET)
    }

    pub fn iterate_with_budget(&self, q: u32, budget: usize) -> Result<LinearPDO, PdoError> {
        let mut acc = LinearPDO::identity(self.dim);
        acc.convention = self.convention;
        for step in 0..q {
            acc = self.compose_with_budget(&acc, budget).map_err(|e| match e {
                PdoError::TermBudget { budget, .. } => PdoError::TermBudget {
                    budget,
                    context: format!("iterate step {}/{q}", step + 1),
                },
                other => other,
            })?;
        }
        Ok(acc)
    }

    /// Coefficient-wise difference, used to state operator identities.
    pub fn sub(&self, other: &LinearPDO) -> Result<LinearPDO, PdoError> {
        if self.dim != other.dim {
            return Err(PdoError::DimensionMismatch(self.dim, other.dim));
        }
        let mut coeffs: Vec<(MultiIndex, Expr)> =
            self.coeffs.iter().map(|(a, e)| (a.clone(), e.clone())).collect();
        for (a, e) in &other.coeffs {
            coeffs.push((a.clone(), e.clone().scale(Complex64::new(-1.0, 0.0))));
        }
        LinearPDO::from_partial_coeffs(self.dim, coeffs)
    }

    /// Is this exactly the zero operator after simplification?
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// `(−i)^k`
fn minus_i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// `i^k`
fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}
