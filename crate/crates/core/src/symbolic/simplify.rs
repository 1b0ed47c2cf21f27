//! Normalization: constant folding, flattening, like-term collection.
//!
//! `simplify` runs a bottom-up pass to a fixed point, which makes it
//! idempotent by construction. `simplify_expanded` additionally
//! distributes products over sums, which the operator algebra needs to
//! collect coefficients of composed operators.

use super::{Expr, Exponent};
use num_complex::Complex64;
use std::cmp::Ordering;

/// Canonical total order on expressions, used to sort the children of
/// sums and products so that structurally equal inputs normalize to
/// identical trees.
pub(crate) fn canon_cmp(a: &Expr, b: &Expr) -> Ordering {
    fn rank(e: &Expr) -> u8 {
        match e {
            Expr::Const(_) => 0,
            Expr::Var(_) => 1,
            Expr::Rho => 2,
            Expr::Pow(..) => 3,
            Expr::Prod(_) => 4,
            Expr::Sum(_) => 5,
            Expr::Exp(_) => 6,
            Expr::Log(_) => 7,
            Expr::Sin(_) => 8,
            Expr::Cos(_) => 9,
            Expr::Bump { .. } => 10,
            Expr::CutExp { .. } => 11,
        }
    }
    rank(a).cmp(&rank(b)).then_with(|| match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => {
            x.re.total_cmp(&y.re).then_with(|| x.im.total_cmp(&y.im))
        }
        (Expr::Var(x), Expr::Var(y)) => x.cmp(y),
        (Expr::Rho, Expr::Rho) => Ordering::Equal,
        (Expr::Pow(b1, e1), Expr::Pow(b2, e2)) => {
            canon_cmp(b1, b2).then_with(|| e1.as_f64().total_cmp(&e2.as_f64()))
        }
        (Expr::Sum(x), Expr::Sum(y)) | (Expr::Prod(x), Expr::Prod(y)) => {
            for (l, r) in x.iter().zip(y.iter()) {
                let c = canon_cmp(l, r);
                if c != Ordering::Equal {
                    return c;
                }
            }
            x.len().cmp(&y.len())
        }
        (Expr::Exp(x), Expr::Exp(y))
        | (Expr::Log(x), Expr::Log(y))
        | (Expr::Sin(x), Expr::Sin(y))
        | (Expr::Cos(x), Expr::Cos(y)) => canon_cmp(x, y),
        (Expr::Bump { sigma: s1, arg: a1 }, Expr::Bump { sigma: s2, arg: a2 }) => {
            s1.total_cmp(s2).then_with(|| canon_cmp(a1, a2))
        }
        (Expr::CutExp { a: s1, arg: a1 }, Expr::CutExp { a: s2, arg: a2 }) => {
            s1.total_cmp(s2).then_with(|| canon_cmp(a1, a2))
        }
        _ => Ordering::Equal,
    })
}

/// Normalize without distributing products over sums.
pub fn simplify(e: &Expr) -> Expr {
    fixpoint(e, false)
}

/// Normalize and expand products of sums (polynomial expansion).
pub fn simplify_expanded(e: &Expr) -> Expr {
    fixpoint(e, true)
}

fn fixpoint(e: &Expr, expand: bool) -> Expr {
    let mut cur = pass(e, expand);
    for _ in 0..8 {
        let next = pass(&cur, expand);
        if next == cur {
            return cur;
        }
        cur = next;
    }
    cur
}

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pass(e: &Expr, expand: bool) -> Expr {
    match e {
        Expr::Const(_) | Expr::Var(_) | Expr::Rho => e.clone(),
        Expr::Sum(terms) => simplify_sum(terms, expand),
        Expr::Prod(factors) => simplify_prod(factors, expand),
        Expr::Pow(base, ex) => simplify_pow(pass(base, expand), normalize_exponent(*ex)),
        Expr::Exp(a) => {
            let a = pass(a, expand);
            match &a {
                Expr::Const(c) => Expr::Const(c.exp()),
                _ => Expr::Exp(Box::new(a)),
            }
        }
        Expr::Log(a) => {
            let a = pass(a, expand);
            match &a {
                Expr::Const(c) if c.im == 0.0 && c.re > 0.0 => Expr::real(c.re.ln()),
                _ => Expr::Log(Box::new(a)),
            }
        }
        Expr::Sin(a) => {
            let a = pass(a, expand);
            match &a {
                Expr::Const(c) => Expr::Const(c.sin()),
                _ => Expr::Sin(Box::new(a)),
            }
        }
        Expr::Cos(a) => {
            let a = pass(a, expand);
            match &a {
                Expr::Const(c) => Expr::Const(c.cos()),
                _ => Expr::Cos(Box::new(a)),
            }
        }
        Expr::Bump { sigma, arg } => {
            let a = pass(arg, expand);
            match &a {
                Expr::Const(c) if c.im == 0.0 => Expr::real(super::bump_profile(*sigma, c.re)),
                _ => Expr::Bump { sigma: *sigma, arg: Box::new(a) },
            }
        }
        Expr::CutExp { a, arg } => {
            let arg = pass(arg, expand);
            match &arg {
                Expr::Const(c) if c.im == 0.0 => Expr::real(super::cutexp_profile(*a, c.re)),
                _ => Expr::CutExp { a: *a, arg: Box::new(arg) },
            }
        }
    }
}

fn normalize_exponent(ex: Exponent) -> Exponent {
    match ex {
        Exponent::Real(p) if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 => {
            Exponent::Int(p as i32)
        }
        other => other,
    }
}

fn simplify_pow(base: Expr, ex: Exponent) -> Expr {
    match ex {
        Exponent::Int(0) => Expr::one(),
        Exponent::Int(1) => base,
        Exponent::Int(n) => match base {
            Expr::Const(c) => Expr::Const(c.powi(n)),
            Expr::Pow(inner, Exponent::Int(m)) => simplify_pow(*inner, Exponent::Int(n * m)),
            // (b^p)^n = b^{pn} for integer n: the real inner power already
            // restricts the base to [0, ∞), where this is an identity
            Expr::Pow(inner, Exponent::Real(p)) => {
                simplify_pow(*inner, normalize_exponent(Exponent::Real(p * n as f64)))
            }
            // (a·b)^n = a^n · b^n, safe for integer powers
            Expr::Prod(fs) => Expr::Prod(
                fs.into_iter().map(|f| simplify_pow(f, Exponent::Int(n))).collect(),
            ),
            b => Expr::Pow(Box::new(b), Exponent::Int(n)),
        },
        Exponent::Real(p) => match base {
            Expr::Const(c) if c.im == 0.0 && c.re >= 0.0 && !(c.re == 0.0 && p < 0.0) => {
                Expr::real(c.re.powf(p))
            }
            b => Expr::Pow(Box::new(b), Exponent::Real(p)),
        },
    }
}

fn simplify_sum(terms: &[Expr], expand: bool) -> Expr {
    // flatten and simplify children
    let mut flat = Vec::with_capacity(terms.len());
    for t in terms {
        match pass(t, expand) {
            Expr::Sum(inner) => flat.extend(inner),
            other => flat.push(other),
        }
    }
    // split each term into coefficient × core
    let mut constant = cx(0.0, 0.0);
    let mut cores: Vec<(Expr, Complex64)> = Vec::with_capacity(flat.len());
    for t in flat {
        match t {
            Expr::Const(c) => constant += c,
            Expr::Prod(fs) => {
                let mut coeff = cx(1.0, 0.0);
                let mut rest = Vec::with_capacity(fs.len());
                for f in fs {
                    match f {
                        Expr::Const(c) => coeff *= c,
                        other => rest.push(other),
                    }
                }
                if rest.is_empty() {
                    constant += coeff;
                } else {
                    let core = if rest.len() == 1 {
                        rest.into_iter().next().unwrap()
                    } else {
                        Expr::Prod(rest)
                    };
                    cores.push((core, coeff));
                }
            }
            other => cores.push((other, cx(1.0, 0.0))),
        }
    }
    // collect like cores
    cores.sort_by(|a, b| canon_cmp(&a.0, &b.0));
    let mut out: Vec<Expr> = Vec::with_capacity(cores.len() + 1);
    let mut it = cores.into_iter();
    if let Some((mut core, mut coeff)) = it.next() {
        for (c2, k2) in it {
            if c2 == core {
                coeff += k2;
            } else {
                push_term(&mut out, core, coeff);
                core = c2;
                coeff = k2;
            }
        }
        push_term(&mut out, core, coeff);
    }
    if constant != cx(0.0, 0.0) || out.is_empty() {
        out.push(Expr::Const(constant));
    }
    if out.len() == 1 {
        out.pop().unwrap()
    } else {
        out.sort_by(canon_cmp);
        Expr::Sum(out)
    }
}

fn push_term(out: &mut Vec<Expr>, core: Expr, coeff: Complex64) {
    if coeff == cx(0.0, 0.0) {
        return;
    }
    if coeff == cx(1.0, 0.0) {
        out.push(core);
    } else {
        match core {
            Expr::Prod(mut fs) => {
                fs.insert(0, Expr::Const(coeff));
                out.push(Expr::Prod(fs));
            }
            other => out.push(Expr::Prod(vec![Expr::Const(coeff), other])),
        }
    }
}

fn simplify_prod(factors: &[Expr], expand: bool) -> Expr {
    // flatten and simplify children
    let mut flat = Vec::with_capacity(factors.len());
    for f in factors {
        match pass(f, expand) {
            Expr::Prod(inner) => flat.extend(inner),
            other => flat.push(other),
        }
    }
    // distribute over sums when expansion is on
    if expand {
        if let Some(pos) = flat.iter().position(|f| matches!(f, Expr::Sum(_))) {
            let Expr::Sum(terms) = flat.remove(pos) else { unreachable!() };
            let expanded: Vec<Expr> = terms
                .into_iter()
                .map(|t| {
                    let mut fs = flat.clone();
                    fs.push(t);
                    Expr::Prod(fs)
                })
                .collect();
            return simplify_sum(&expanded, expand);
        }
    }
    // fold constants, group bases
    let mut constant = cx(1.0, 0.0);
    let mut bases: Vec<(Expr, Exponent)> = Vec::with_capacity(flat.len());
    for f in flat {
        match f {
            Expr::Const(c) => {
                constant *= c;
                if constant == cx(0.0, 0.0) {
                    return Expr::zero();
                }
            }
            Expr::Pow(b, ex) => bases.push((*b, normalize_exponent(ex))),
            other => bases.push((other, Exponent::Int(1))),
        }
    }
    bases.sort_by(|a, b| canon_cmp(&a.0, &b.0));
    let mut out: Vec<Expr> = Vec::with_capacity(bases.len() + 1);
    let mut it = bases.into_iter();
    if let Some((mut base, mut ex)) = it.next() {
        for (b2, e2) in it {
            if b2 == base {
                ex = add_exponents(ex, e2);
            } else {
                push_factor(&mut out, base, ex);
                base = b2;
                ex = e2;
            }
        }
        push_factor(&mut out, base, ex);
    }
    if constant != cx(1.0, 0.0) || out.is_empty() {
        out.insert(0, Expr::Const(constant));
    }
    if out.len() == 1 {
        out.pop().unwrap()
    } else {
        Expr::Prod(out)
    }
}

fn add_exponents(a: Exponent, b: Exponent) -> Exponent {
    match (a, b) {
        (Exponent::Int(x), Exponent::Int(y)) => Exponent::Int(x + y),
        _ => normalize_exponent(Exponent::Real(a.as_f64() + b.as_f64())),
    }
}

fn push_factor(out: &mut Vec<Expr>, base: Expr, ex: Exponent) {
    let f = simplify_pow(base, ex);
    if !f.is_const(1.0) {
        out.push(f);
    }
}
