//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr    := term (('+'|'-') term)*
//! term    := unary (('*'|'/') unary)*
//! unary   := ('-'|'+') unary | power
//! power   := atom ('^' unary)?            // right associative
//! atom    := number | call | name | '(' expr ')'
//! call    := name '(' expr (',' expr)* ')'
//! name    := 'x'<digits> | 'rho' | 'pi' | 'e' | 'i'
//!          | 'exp' | 'log' | 'sin' | 'cos' | 'sqrt'
//!          | 'gbump' | 'gbumpsq' | 'cutexp'
//! ```
//!
//! Division desugars to a product with a `^-1` power and `sqrt` to `^0.5`.
//! `gbump(σ, e)` desugars to `gbumpsq(σ, e^2)`; the first argument of
//! `gbump`/`gbumpsq` (and of `cutexp`) must be a constant expression.

use super::{Expr, Exponent};
use crate::error::ParseError;
use num_complex::Complex64;

pub fn parse(text: &str, dim: usize) -> Result<Expr, ParseError> {
    let mut p = Parser { text, bytes: text.as_bytes(), pos: 0, dim };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
    dim: usize,
}

impl<'a> Parser<'a> {
    fn syntax(&self, message: &str) -> ParseError {
        ParseError::Syntax { offset: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            self.skip_ws();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat(b'+') {
                terms.push(self.term()?);
            } else if self.eat(b'-') {
                let t = self.term()?;
                terms.push(match t {
                    Expr::Const(c) => Expr::Const(-c),
                    t => Expr::Prod(vec![Expr::real(-1.0), t]),
                });
            } else {
                break;
            }
        }
        if terms.len() == 1 {
            return Ok(terms.pop().unwrap());
        }
        // keep constant arithmetic folded so complex literals like 2+3*i
        // stay a single constant
        if terms.iter().all(|t| matches!(t, Expr::Const(_))) {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in &terms {
                if let Expr::Const(c) = t {
                    acc += c;
                }
            }
            return Ok(Expr::Const(acc));
        }
        Ok(Expr::Sum(terms))
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.unary()?];
        loop {
            if self.eat(b'*') {
                factors.push(self.unary()?);
            } else if self.eat(b'/') {
                let f = self.unary()?;
                factors.push(Expr::Pow(Box::new(f), Exponent::Int(-1)));
            } else {
                break;
            }
        }
        if factors.len() == 1 {
            return Ok(factors.pop().unwrap());
        }
        if factors.iter().all(|t| matches!(t, Expr::Const(_))) {
            let mut acc = Complex64::new(1.0, 0.0);
            for t in &factors {
                if let Expr::Const(c) = t {
                    acc *= c;
                }
            }
            return Ok(Expr::Const(acc));
        }
        Ok(Expr::Prod(factors))
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            let e = self.unary()?;
            return Ok(match e {
                Expr::Const(c) => Expr::Const(-c),
                e => Expr::Prod(vec![Expr::real(-1.0), e]),
            });
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let ex = self.unary()?;
            let exponent = match constant_value(&ex) {
                Some(c) if c.im == 0.0 => {
                    if c.re.fract() == 0.0 && c.re.abs() <= i32::MAX as f64 {
                        Exponent::Int(c.re as i32)
                    } else {
                        Exponent::Real(c.re)
                    }
                }
                _ => return Err(self.syntax("exponent must be a real constant")),
            };
            return Ok(Expr::Pow(Box::new(base), exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.syntax("expected expression")),
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.syntax("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.name(),
            Some(_) => Err(self.syntax("expected expression")),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() || c == b'.' {
                self.pos += 1;
            } else if (c == b'e' || c == b'E') && self.pos > start {
                // exponent part must be followed by digits or a sign
                let next = self.bytes.get(self.pos + 1).copied();
                let next2 = self.bytes.get(self.pos + 2).copied();
                match next {
                    Some(d) if d.is_ascii_digit() => self.pos += 2,
                    Some(b'+') | Some(b'-')
                        if next2.map(|d| d.is_ascii_digit()).unwrap_or(false) =>
                    {
                        self.pos += 3
                    }
                    _ => break,
                }
                while self.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
                    self.pos += 1;
                }
                break;
            } else {
                break;
            }
        }
        let s = &self.text[start..self.pos];
        let v: f64 = s.parse().map_err(|_| ParseError::Syntax {
            offset: start,
            message: format!("bad number `{s}`"),
        })?;
        self.skip_ws();
        Ok(Expr::real(v))
    }

    fn name(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == b'_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        let name = &self.text[start..self.pos];
        self.skip_ws();
        if self.peek() == Some(b'(') {
            return self.call(name, start);
        }
        match name {
            "rho" => Ok(Expr::Rho),
            "pi" => Ok(Expr::real(std::f64::consts::PI)),
            "e" => Ok(Expr::real(std::f64::consts::E)),
            "i" => Ok(Expr::imag_unit()),
            _ => {
                if let Some(idx) = name.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
                    if idx == 0 || idx > self.dim {
                        return Err(ParseError::VariableOutOfRange {
                            name: name.into(),
                            dim: self.dim,
                        });
                    }
                    return Ok(Expr::Var(idx - 1));
                }
                Err(ParseError::UnknownIdentifier { name: name.into(), offset: start })
            }
        }
    }

    fn call(&mut self, name: &str, name_start: usize) -> Result<Expr, ParseError> {
        self.pos += 1; // '('
        self.skip_ws();
        let mut args = vec![self.expr()?];
        while self.eat(b',') {
            args.push(self.expr()?);
        }
        if !self.eat(b')') {
            return Err(self.syntax("expected `)` after arguments"));
        }
        let arity = |n: usize| -> Result<(), ParseError> {
            if args.len() != n {
                Err(ParseError::Syntax {
                    offset: name_start,
                    message: format!("`{name}` takes {n} argument(s), got {}", args.len()),
                })
            } else {
                Ok(())
            }
        };
        let const_param = |e: &Expr, what: &str| -> Result<f64, ParseError> {
            match constant_value(e) {
                Some(c) if c.im == 0.0 => Ok(c.re),
                _ => Err(ParseError::Syntax {
                    offset: name_start,
                    message: format!("{what} of `{name}` must be a real constant"),
                }),
            }
        };
        match name {
            "exp" => {
                arity(1)?;
                Ok(Expr::Exp(Box::new(args.pop().unwrap())))
            }
            "log" => {
                arity(1)?;
                Ok(Expr::Log(Box::new(args.pop().unwrap())))
            }
            "sin" => {
                arity(1)?;
                Ok(Expr::Sin(Box::new(args.pop().unwrap())))
            }
            "cos" => {
                arity(1)?;
                Ok(Expr::Cos(Box::new(args.pop().unwrap())))
            }
            "sqrt" => {
                arity(1)?;
                Ok(Expr::Pow(Box::new(args.pop().unwrap()), Exponent::Real(0.5)))
            }
            "gbump" => {
                arity(2)?;
                let r = args.pop().unwrap();
                let sigma = const_param(&args[0], "the order parameter")?;
                if sigma <= 1.0 {
                    return Err(ParseError::Syntax {
                        offset: name_start,
                        message: format!("gbump needs σ > 1, got {sigma}"),
                    });
                }
                Ok(Expr::Bump {
                    sigma,
                    arg: Box::new(Expr::Pow(Box::new(r), Exponent::Int(2))),
                })
            }
            "gbumpsq" => {
                arity(2)?;
                let u = args.pop().unwrap();
                let sigma = const_param(&args[0], "the order parameter")?;
                if sigma <= 1.0 {
                    return Err(ParseError::Syntax {
                        offset: name_start,
                        message: format!("gbumpsq needs σ > 1, got {sigma}"),
                    });
                }
                Ok(Expr::Bump { sigma, arg: Box::new(u) })
            }
            "cutexp" => {
                arity(2)?;
                let u = args.pop().unwrap();
                let a = const_param(&args[0], "the flatness parameter")?;
                if a <= 0.0 {
                    return Err(ParseError::Syntax {
                        offset: name_start,
                        message: format!("cutexp needs a > 0, got {a}"),
                    });
                }
                Ok(Expr::CutExp { a, arg: Box::new(u) })
            }
            _ => Err(ParseError::UnknownIdentifier { name: name.into(), offset: name_start }),
        }
    }
}

/// Fold an expression made only of constants to its value.
fn constant_value(e: &Expr) -> Option<Complex64> {
    match e {
        Expr::Const(c) => Some(*c),
        Expr::Prod(fs) => fs.iter().map(constant_value).try_fold(
            Complex64::new(1.0, 0.0),
            |acc, v| v.map(|v| acc * v),
        ),
        Expr::Sum(ts) => ts.iter().map(constant_value).try_fold(
            Complex64::new(0.0, 0.0),
            |acc, v| v.map(|v| acc + v),
        ),
        Expr::Pow(b, ex) => constant_value(b).map(|v| match ex {
            Exponent::Int(n) => v.powi(*n),
            Exponent::Real(p) => v.powf(*p),
        }),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn malformed_input_positions() {
        match parse("x1*", 1) {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("expected syntax error, got {other:?}"),
        }
        assert!(matches!(parse("foo(x1)", 1), Err(ParseError::UnknownIdentifier { .. })));
        assert!(matches!(parse("x3", 2), Err(ParseError::VariableOutOfRange { .. })));
    }

    #[test]
    fn division_and_sqrt_desugar() {
        let e = parse("x1 / x2", 2).unwrap();
        let v = e.eval_real_point(&[6.0, 3.0]).unwrap();
        assert_eq!(v.re, 2.0);
        let e = parse("sqrt(x1)", 1).unwrap();
        assert_eq!(e.eval_real_point(&[9.0]).unwrap().re, 3.0);
    }

    #[test]
    fn scientific_notation() {
        let e = parse("1e-3 + 2.5E2", 1).unwrap();
        assert!((e.eval_real_point(&[0.0]).unwrap().re - 250.001).abs() < 1e-12);
        // `e` alone is Euler's constant
        let e = parse("e^2", 1).unwrap();
        assert!((e.eval_real_point(&[0.0]).unwrap().re - std::f64::consts::E.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn complex_unit() {
        let e = parse("i*i", 1).unwrap();
        let v = crate::symbolic::simplify(&e);
        assert!(v.is_const(-1.0));
    }

    #[test]
    fn power_is_right_associative_with_unary() {
        let e = parse("x1^-2", 1).unwrap();
        assert_eq!(e.eval_real_point(&[2.0]).unwrap().re, 0.25);
        let e = parse("2^0.5", 1).unwrap();
        assert!((e.eval_real_point(&[0.0]).unwrap().re - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn gbump_requires_constant_sigma() {
        assert!(parse("gbump(x1, x1)", 1).is_err());
        assert!(parse("gbump(0.5, x1)", 1).is_err());
        assert!(parse("gbump(1.5, x1)", 1).is_ok());
    }
}
