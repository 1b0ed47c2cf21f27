//! Canonical text form; `parse(print(e))` evaluates identically to `e`.

use super::{Expr, Exponent};
use num_complex::Complex64;
use std::fmt;

// precedence levels: sum 0, product 1, unary 2, power 3, atom 4
fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Sum(_) => 0,
        Expr::Prod(_) => 1,
        Expr::Pow(..) => 3,
        Expr::Const(c) => {
            if c.im == 0.0 && c.re >= 0.0 {
                4
            } else {
                0 // negative or complex constants print with structure
            }
        }
        _ => 4,
    }
}

fn fmt_const(c: Complex64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c.im == 0.0 {
        write!(f, "{}", c.re)
    } else if c.re == 0.0 {
        if c.im == 1.0 {
            write!(f, "i")
        } else {
            write!(f, "{}*i", c.im)
        }
    } else {
        write!(f, "({}+{}*i)", c.re, c.im)
    }
}

fn fmt_prec(e: &Expr, min_prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let p = prec(e);
    let need_parens = p < min_prec;
    if need_parens {
        write!(f, "(")?;
    }
    match e {
        Expr::Const(c) => fmt_const(*c, f)?,
        Expr::Var(k) => write!(f, "x{}", k + 1)?,
        Expr::Rho => write!(f, "rho")?,
        Expr::Sum(terms) => {
            for (i, t) in terms.iter().enumerate() {
                if i > 0 {
                    write!(f, " + ")?;
                }
                fmt_prec(t, 1, f)?;
            }
        }
        Expr::Prod(factors) => {
            for (i, t) in factors.iter().enumerate() {
                if i > 0 {
                    write!(f, "*")?;
                }
                fmt_prec(t, 2, f)?;
            }
        }
        Expr::Pow(base, ex) => {
            fmt_prec(base, 4, f)?;
            match ex {
                Exponent::Int(n) if *n >= 0 => write!(f, "^{n}")?,
                Exponent::Int(n) => write!(f, "^({n})")?,
                Exponent::Real(p) if *p >= 0.0 => write!(f, "^{p}")?,
                Exponent::Real(p) => write!(f, "^({p})")?,
            }
        }
        Expr::Exp(a) => {
            write!(f, "exp(")?;
            fmt_prec(a, 0, f)?;
            write!(f, ")")?;
        }
        Expr::Log(a) => {
            write!(f, "log(")?;
            fmt_prec(a, 0, f)?;
            write!(f, ")")?;
        }
        Expr::Sin(a) => {
            write!(f, "sin(")?;
            fmt_prec(a, 0, f)?;
            write!(f, ")")?;
        }
        Expr::Cos(a) => {
            write!(f, "cos(")?;
            fmt_prec(a, 0, f)?;
            write!(f, ")")?;
        }
        Expr::Bump { sigma, arg } => {
            write!(f, "gbumpsq({sigma}, ")?;
            fmt_prec(arg, 0, f)?;
            write!(f, ")")?;
        }
        Expr::CutExp { a, arg } => {
            write!(f, "cutexp({a}, ")?;
            fmt_prec(arg, 0, f)?;
            write!(f, ")")?;
        }
    }
    if need_parens {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_prec(self, 0, f)
    }
}
