//! Exact-differentiation expression engine.
//!
//! Expressions are trees over complex constants, the variables `x1..xn`,
//! an auxiliary integration variable `rho`, sums, products, integer and
//! real powers, `exp`, `log`, `sin`, `cos`, and two compactly supported
//! smooth primitives with exact derivative rewrite rules:
//!
//! - `gbumpsq(σ, u)` — the Gevrey-σ bump profile in the squared radial
//!   variable: `exp(1 − (1−u)^{−1/(σ−1)})` for `u < 1`, `0` otherwise.
//!   The grammar also accepts `gbump(σ, r)` as sugar for
//!   `gbumpsq(σ, r²)`, the even profile in the radial coordinate.
//! - `cutexp(a, u)` — the one-sided flat cutoff `exp(−u^{−a})` for
//!   `u > 0`, `0` otherwise; flat to infinite order at `u = 0` and of
//!   Gevrey class `1 + 1/a` there.
//!
//! Expressions are immutable; all operations are pure.

mod calculus;
mod parser;
mod printer;
mod simplify;

pub use calculus::{derivative, differentiate, DiffVar};
pub use parser::parse;
pub use simplify::{simplify, simplify_expanded};

use crate::error::EvalError;
use num_complex::Complex64;

/// Power exponent: integer powers keep their full domain, real powers
/// require a nonnegative real base.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Int(i32),
    Real(f64),
}

impl Exponent {
    pub fn as_f64(&self) -> f64 {
        match *self {
            Exponent::Int(n) => n as f64,
            Exponent::Real(p) => p,
        }
    }
}

/// Expression tree. See the module docs for the primitive semantics.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Complex64),
    /// `x_{k+1}` — zero-based index into the evaluation point.
    Var(usize),
    /// The auxiliary integration variable `rho`.
    Rho,
    Sum(Vec<Expr>),
    Prod(Vec<Expr>),
    Pow(Box<Expr>, Exponent),
    Exp(Box<Expr>),
    Log(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Bump { sigma: f64, arg: Box<Expr> },
    CutExp { a: f64, arg: Box<Expr> },
}

impl Expr {
    pub fn zero() -> Self {
        Expr::Const(Complex64::new(0.0, 0.0))
    }
    pub fn one() -> Self {
        Expr::Const(Complex64::new(1.0, 0.0))
    }
    pub fn real(v: f64) -> Self {
        Expr::Const(Complex64::new(v, 0.0))
    }
    pub fn imag_unit() -> Self {
        Expr::Const(Complex64::new(0.0, 1.0))
    }
    pub fn var(k: usize) -> Self {
        Expr::Var(k)
    }
    pub fn add(terms: Vec<Expr>) -> Self {
        Expr::Sum(terms)
    }
    pub fn mul(factors: Vec<Expr>) -> Self {
        Expr::Prod(factors)
    }
    pub fn powi(self, n: i32) -> Self {
        Expr::Pow(Box::new(self), Exponent::Int(n))
    }
    pub fn powf(self, p: f64) -> Self {
        Expr::Pow(Box::new(self), Exponent::Real(p))
    }
    pub fn scale(self, c: Complex64) -> Self {
        Expr::Prod(vec![Expr::Const(c), self])
    }

    /// Is this exactly the constant `c`?
    pub fn is_const(&self, c: f64) -> bool {
        matches!(self, Expr::Const(v) if v.re == c && v.im == 0.0)
    }

    /// Largest variable index mentioned, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Var(k) => Some(*k),
            Expr::Const(_) | Expr::Rho => None,
            Expr::Sum(es) | Expr::Prod(es) => es.iter().filter_map(|e| e.max_var()).max(),
            Expr::Pow(b, _) => b.max_var(),
            Expr::Exp(e) | Expr::Log(e) | Expr::Sin(e) | Expr::Cos(e) => e.max_var(),
            Expr::Bump { arg, .. } | Expr::CutExp { arg, .. } => arg.max_var(),
        }
    }

    /// Does the expression mention `rho`?
    pub fn uses_rho(&self) -> bool {
        match self {
            Expr::Rho => true,
            Expr::Const(_) | Expr::Var(_) => false,
            Expr::Sum(es) | Expr::Prod(es) => es.iter().any(|e| e.uses_rho()),
            Expr::Pow(b, _) => b.uses_rho(),
            Expr::Exp(e) | Expr::Log(e) | Expr::Sin(e) | Expr::Cos(e) => e.uses_rho(),
            Expr::Bump { arg, .. } | Expr::CutExp { arg, .. } => arg.uses_rho(),
        }
    }

    /// Number of nodes, used by the operator term budget.
    pub fn node_count(&self) -> usize {
        1 + match self {
            Expr::Const(_) | Expr::Var(_) | Expr::Rho => 0,
            Expr::Sum(es) | Expr::Prod(es) => es.iter().map(Expr::node_count).sum(),
            Expr::Pow(b, _) => b.node_count(),
            Expr::Exp(e) | Expr::Log(e) | Expr::Sin(e) | Expr::Cos(e) => e.node_count(),
            Expr::Bump { arg, .. } | Expr::CutExp { arg, .. } => arg.node_count(),
        }
    }

    /// Evaluate at a point given by coordinates `x` and a value for `rho`.
    ///
    /// A product with a factor that is exactly zero evaluates to zero
    /// without requiring the remaining factors to be evaluable; together
    /// with the support conventions of `gbumpsq`/`cutexp` this makes the
    /// derivative rewrite products total at the support boundary.
    pub fn eval(&self, x: &[f64], rho: f64) -> Result<Complex64, EvalError> {
        let v = self.eval_inner(x, rho)?;
        if v.re.is_nan() || v.im.is_nan() {
            return Err(self.domain_err("evaluation produced NaN"));
        }
        Ok(v)
    }

    /// Evaluate an expression of `n` real variables (no `rho`).
    pub fn eval_real_point(&self, x: &[f64]) -> Result<Complex64, EvalError> {
        self.eval(x, f64::NAN)
    }

    fn domain_err(&self, message: &str) -> EvalError {
        let mut s = self.to_string();
        if s.len() > 80 {
            s.truncate(77);
            s.push_str("...");
        }
        EvalError::Domain { subexpr: s, message: message.into() }
    }

    fn eval_inner(&self, x: &[f64], rho: f64) -> Result<Complex64, EvalError> {
        let zero = Complex64::new(0.0, 0.0);
        match self {
            Expr::Const(c) => Ok(*c),
            Expr::Var(k) => {
                if *k >= x.len() {
                    return Err(EvalError::Dimension { got: x.len(), needed: *k + 1 });
                }
                Ok(Complex64::new(x[*k], 0.0))
            }
            Expr::Rho => {
                if rho.is_nan() {
                    return Err(self.domain_err("expression uses rho but no rho value given"));
                }
                Ok(Complex64::new(rho, 0.0))
            }
            Expr::Sum(es) => {
                let mut acc = zero;
                for e in es {
                    acc += e.eval_inner(x, rho)?;
                }
                Ok(acc)
            }
            Expr::Prod(es) => {
                let mut acc = Complex64::new(1.0, 0.0);
                let mut pending: Option<EvalError> = None;
                for e in es {
                    match e.eval_inner(x, rho) {
                        Ok(v) if v == zero => return Ok(zero),
                        Ok(v) => acc *= v,
                        Err(err) => pending = Some(pending.unwrap_or(err)),
                    }
                }
                match pending {
                    Some(err) => Err(err),
                    None => Ok(acc),
                }
            }
            Expr::Pow(b, ex) => {
                let base = b.eval_inner(x, rho)?;
                match *ex {
                    Exponent::Int(n) => {
                        if base == zero && n < 0 {
                            return Err(self.domain_err("zero base with negative power"));
                        }
                        Ok(base.powi(n))
                    }
                    Exponent::Real(p) => {
                        if base.im != 0.0 {
                            return Err(self.domain_err("real power of a non-real base"));
                        }
                        if base.re < 0.0 || (base.re == 0.0 && p < 0.0) {
                            return Err(self.domain_err("real power outside [0, ∞) domain"));
                        }
                        Ok(Complex64::new(base.re.powf(p), 0.0))
                    }
                }
            }
            Expr::Exp(e) => Ok(e.eval_inner(x, rho)?.exp()),
            Expr::Log(e) => {
                let v = e.eval_inner(x, rho)?;
                if v.im != 0.0 || v.re <= 0.0 {
                    return Err(self.domain_err("log of a non-positive argument"));
                }
                Ok(Complex64::new(v.re.ln(), 0.0))
            }
            Expr::Sin(e) => Ok(e.eval_inner(x, rho)?.sin()),
            Expr::Cos(e) => Ok(e.eval_inner(x, rho)?.cos()),
            Expr::Bump { sigma, arg } => {
                let v = arg.eval_inner(x, rho)?;
                if v.im != 0.0 {
                    return Err(self.domain_err("bump argument must be real"));
                }
                Ok(Complex64::new(bump_profile(*sigma, v.re), 0.0))
            }
            Expr::CutExp { a, arg } => {
                let v = arg.eval_inner(x, rho)?;
                if v.im != 0.0 {
                    return Err(self.domain_err("cutexp argument must be real"));
                }
                Ok(Complex64::new(cutexp_profile(*a, v.re), 0.0))
            }
        }
    }

    /// Replace a variable by an expression. Replacing `x_k` leaves all
    /// other variable indices untouched.
    pub fn substitute(&self, var: DiffVar, replacement: &Expr) -> Expr {
        let recurse = |e: &Expr| e.substitute(var, replacement);
        match self {
            Expr::Var(k) if var == DiffVar::Var(*k) => replacement.clone(),
            Expr::Rho if var == DiffVar::Rho => replacement.clone(),
            Expr::Const(_) | Expr::Var(_) | Expr::Rho => self.clone(),
            Expr::Sum(es) => Expr::Sum(es.iter().map(recurse).collect()),
            Expr::Prod(es) => Expr::Prod(es.iter().map(recurse).collect()),
            Expr::Pow(b, ex) => Expr::Pow(Box::new(recurse(b)), *ex),
            Expr::Exp(e) => Expr::Exp(Box::new(recurse(e))),
            Expr::Log(e) => Expr::Log(Box::new(recurse(e))),
            Expr::Sin(e) => Expr::Sin(Box::new(recurse(e))),
            Expr::Cos(e) => Expr::Cos(Box::new(recurse(e))),
            Expr::Bump { sigma, arg } => {
                Expr::Bump { sigma: *sigma, arg: Box::new(recurse(arg)) }
            }
            Expr::CutExp { a, arg } => Expr::CutExp { a: *a, arg: Box::new(recurse(arg)) },
        }
    }
}

/// `exp(1 − (1−u)^{−1/(σ−1)})` for `u < 1`, else 0.
pub fn bump_profile(sigma: f64, u: f64) -> f64 {
    if u >= 1.0 {
        0.0
    } else {
        (1.0 - (1.0 - u).powf(-1.0 / (sigma - 1.0))).exp()
    }
}

/// `exp(−u^{−a})` for `u > 0`, else 0.
pub fn cutexp_profile(a: f64, u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        (-u.powf(-a)).exp()
    }
}

/// A multi-index `α ∈ ℕ₀ⁿ`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zeros(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|α| = Σ αᵢ`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Componentwise `self ≤ other`.
    pub fn leq(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise difference; requires `other ≤ self`.
    pub fn sub(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// `Π C(αᵢ, γᵢ)` as f64.
    pub fn binomial(&self, gamma: &MultiIndex) -> f64 {
        self.0.iter().zip(&gamma.0).map(|(&a, &g)| binom(a, g)).product()
    }

    /// All multi-indices of the given dimension and exact order, in
    /// lexicographic order.
    pub fn with_order(dim: usize, order: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; dim];
        fn rec(dim: usize, pos: usize, remaining: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if pos == dim - 1 {
                cur[pos] = remaining;
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for v in 0..=remaining {
                cur[pos] = v;
                rec(dim, pos + 1, remaining - v, cur, out);
            }
        }
        if dim == 0 {
            if order == 0 {
                out.push(MultiIndex(vec![]));
            }
            return out;
        }
        rec(dim, 0, order, &mut cur, &mut out);
        out.sort();
        out
    }

    /// All `γ ≤ self` componentwise (the Leibniz lattice).
    pub fn sub_indices(&self) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex::zeros(self.dim())];
        for (axis, &amax) in self.0.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * (amax as usize + 1));
            for base in &out {
                for v in 0..=amax {
                    let mut b = base.clone();
                    b.0[axis] = v;
                    next.push(b);
                }
            }
            out = next;
        }
        out
    }
}

fn binom(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_polynomial() {
        let e = parse("x1^2 + x2^2", 2).unwrap();
        assert_eq!(e.eval_real_point(&[3.0, 4.0]).unwrap().re, 25.0);
    }

    #[test]
    fn eval_gaussian() {
        let e = parse("exp(-x1^2-x2^2)", 2).unwrap();
        let v = e.eval_real_point(&[1.0, 0.0]).unwrap();
        assert!((v.re - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn eval_sin_at_half_pi() {
        let e = parse("sin(pi*x1)", 1).unwrap();
        let v = e.eval_real_point(&[0.5]).unwrap();
        assert!((v.re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn log_domain_error() {
        let e = parse("log(x1)", 1).unwrap();
        assert!(matches!(e.eval_real_point(&[-1.0]), Err(EvalError::Domain { .. })));
        assert!(e.eval_real_point(&[2.0]).is_ok());
    }

    #[test]
    fn constant_is_constant() {
        let e = Expr::real(7.0);
        assert_eq!(e.eval_real_point(&[1.0, 2.0]).unwrap().re, 7.0);
    }

    #[test]
    fn product_zero_short_circuits_bump_boundary() {
        // (1-u)^{-3} * gbumpsq(1.5, u) at u = 4: the power alone would be
        // fine but at u = 1 it diverges; the bump factor is 0 there and
        // the product must evaluate to 0 at both points.
        let u = Expr::var(0);
        let e = Expr::Prod(vec![
            Expr::Sum(vec![Expr::one(), u.clone().scale(Complex64::new(-1.0, 0.0))]).powf(-3.0),
            Expr::Bump { sigma: 1.5, arg: Box::new(u) },
        ]);
        assert_eq!(e.eval_real_point(&[4.0]).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(e.eval_real_point(&[1.0]).unwrap(), Complex64::new(0.0, 0.0));
        assert!(e.eval_real_point(&[0.5]).unwrap().re > 0.0);
    }

    #[test]
    fn bump_profile_values() {
        // σ=1.5, u = 0.25: exp(1 − (0.75)^{-2}) = e^{-7/9}
        assert!((bump_profile(1.5, 0.25) - (-7.0f64 / 9.0).exp()).abs() < 1e-15);
        assert_eq!(bump_profile(1.5, 1.0), 0.0);
        assert_eq!(bump_profile(1.5, 0.0), 1.0);
    }

    #[test]
    fn multi_index_enumeration() {
        let v = MultiIndex::with_order(2, 3);
        assert_eq!(v.len(), 4);
        assert!(v.contains(&MultiIndex(vec![0, 3])));
        assert!(v.contains(&MultiIndex(vec![3, 0])));
        let alpha = MultiIndex(vec![2, 1]);
        assert_eq!(alpha.sub_indices().len(), 6);
        assert_eq!(alpha.binomial(&MultiIndex(vec![1, 1])), 2.0);
        assert_eq!(alpha.order(), 3);
    }

    #[test]
    fn substitute_folds_under_simplify() {
        let e = parse("x1^2 + rho*x2", 2).unwrap();
        let s = e.substitute(DiffVar::Var(0), &Expr::real(3.0));
        let s = simplify(&s);
        assert_eq!(s.eval(&[0.0, 2.0], 5.0).unwrap().re, 19.0);
    }
}
