//! Exact rule-based differentiation.

use super::{simplify, Expr, Exponent};

/// Which variable to differentiate with respect to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffVar {
    Var(usize),
    Rho,
}

/// Raw derivative, no simplification.
pub fn differentiate(e: &Expr, var: DiffVar) -> Expr {
    let d = |e: &Expr| differentiate(e, var);
    match e {
        Expr::Const(_) => Expr::zero(),
        Expr::Var(k) => {
            if var == DiffVar::Var(*k) {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Expr::Rho => {
            if var == DiffVar::Rho {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Expr::Sum(terms) => Expr::Sum(terms.iter().map(d).collect()),
        Expr::Prod(factors) => {
            // Leibniz rule
            let mut terms = Vec::with_capacity(factors.len());
            for i in 0..factors.len() {
                let mut fs = factors.clone();
                fs[i] = d(&factors[i]);
                terms.push(Expr::Prod(fs));
            }
            Expr::Sum(terms)
        }
        Expr::Pow(base, ex) => {
            let down = match *ex {
                Exponent::Int(n) => Exponent::Int(n - 1),
                Exponent::Real(p) => Exponent::Real(p - 1.0),
            };
            Expr::Prod(vec![
                Expr::real(ex.as_f64()),
                Expr::Pow(base.clone(), down),
                d(base),
            ])
        }
        Expr::Exp(a) => Expr::Prod(vec![d(a), Expr::Exp(a.clone())]),
        Expr::Log(a) => Expr::Prod(vec![d(a), Expr::Pow(a.clone(), Exponent::Int(-1))]),
        Expr::Sin(a) => Expr::Prod(vec![d(a), Expr::Cos(a.clone())]),
        Expr::Cos(a) => {
            Expr::Prod(vec![Expr::real(-1.0), d(a), Expr::Sin(a.clone())])
        }
        // d/dw gbumpsq(σ, w) = −1/(σ−1) · (1−w)^{−σ/(σ−1)} · gbumpsq(σ, w)
        Expr::Bump { sigma, arg } => {
            let one_minus = Expr::Sum(vec![
                Expr::one(),
                Expr::Prod(vec![Expr::real(-1.0), (**arg).clone()]),
            ]);
            Expr::Prod(vec![
                Expr::real(-1.0 / (sigma - 1.0)),
                Expr::Pow(Box::new(one_minus), Exponent::Real(-sigma / (sigma - 1.0))),
                e.clone(),
                d(arg),
            ])
        }
        // d/dw cutexp(a, w) = a · w^{−a−1} · cutexp(a, w)
        Expr::CutExp { a, arg } => Expr::Prod(vec![
            Expr::real(*a),
            Expr::Pow(arg.clone(), Exponent::Real(-a - 1.0)),
            e.clone(),
            d(arg),
        ]),
    }
}

/// Simplified derivative.
pub fn derivative(e: &Expr, var: DiffVar) -> Expr {
    simplify(&differentiate(e, var))
}
