//! Operator text format: a sum of `coef_expr * D[α]` terms with `α` a
//! comma-separated multi-index, e.g. `1*D[2,0] + 1*D[0,2]` (Laplacian) or
//! `x1*D[1]`. A term without a `D[...]` factor is an order-0
//! (multiplication) term. Coefficients use the expression grammar and the
//! `D`-form convention `D = (1/i)∂`.

use super::LinearPDO;
use crate::error::PdoError;
use crate::symbolic::{parse, Expr, MultiIndex};

pub fn parse_operator(text: &str, dim: usize) -> Result<LinearPDO, PdoError> {
    let mut terms: Vec<(MultiIndex, Expr)> = Vec::new();
    for (piece, sign) in split_top_level(text) {
        let piece = piece.trim();
        if piece.is_empty() {
            return Err(PdoError::Format("empty operator term".into()));
        }
        let (coeff_src, alpha) = match find_d_factor(piece)? {
            Some((before, after, alpha)) => {
                let mut src = String::new();
                let before = before.trim().trim_end_matches('*').trim();
                let after = after.trim().trim_start_matches('*').trim();
                if !before.is_empty() {
                    src.push_str(before);
                }
                if !after.is_empty() {
                    if !src.is_empty() {
                        src.push('*');
                    }
                    src.push_str(after);
                }
                if src.is_empty() {
                    src.push('1');
                }
                (src, alpha)
            }
            None => (piece.to_string(), MultiIndex::zeros(dim)),
        };
        if alpha.dim() != dim {
            return Err(PdoError::Format(format!(
                "multi-index {:?} has dimension {}, operator has {}",
                alpha.0,
                alpha.dim(),
                dim
            )));
        }
        let mut coeff = parse(&coeff_src, dim)
            .map_err(|e| PdoError::Format(format!("coefficient `{coeff_src}`: {e}")))?;
        if sign < 0 {
            coeff = coeff.scale(num_complex::Complex64::new(-1.0, 0.0));
        }
        terms.push((alpha, coeff));
    }
    LinearPDO::from_d_coeffs(dim, terms)
}

/// Render in the text format (D-form coefficients).
pub fn format_operator(op: &LinearPDO) -> String {
    let mut parts = Vec::new();
    for (alpha, _) in op.partial_coeffs() {
        let coeff = op.d_coeff(alpha).expect("present");
        if alpha.order() == 0 {
            parts.push(format!("({coeff})"));
        } else {
            let idx: Vec<String> = alpha.0.iter().map(u32::to_string).collect();
            parts.push(format!("({coeff})*D[{}]", idx.join(",")));
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

/// Split a sum at top-level `+`/`-` (not inside parentheses or brackets),
/// returning each piece with its sign.
fn split_top_level(text: &str) -> Vec<(String, i32)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut sign = 1i32;
    let mut prev_is_operand = false;
    for c in text.chars() {
        match c {
            '(' | '[' => {
                depth += 1;
                cur.push(c);
                prev_is_operand = false;
            }
            ')' | ']' => {
                depth -= 1;
                cur.push(c);
                prev_is_operand = true;
            }
            '+' | '-' if depth == 0 && prev_is_operand => {
                out.push((std::mem::take(&mut cur), sign));
                sign = if c == '-' { -1 } else { 1 };
                prev_is_operand = false;
            }
            '-' if depth == 0 && cur.trim().is_empty() && !prev_is_operand => {
                sign = -sign;
            }
            _ => {
                if !c.is_whitespace() {
                    prev_is_operand = !matches!(c, '*' | '/' | '^' | ',');
                }
                cur.push(c);
            }
        }
    }
    if !cur.trim().is_empty() {
        out.push((cur, sign));
    }
    out
}

/// Locate a `D[...]` factor; returns (before, after, multi-index).
fn find_d_factor(piece: &str) -> Result<Option<(&str, &str, MultiIndex)>, PdoError> {
    let bytes = piece.as_bytes();
    let mut depth = 0;
    for i in 0..bytes.len() {
        match bytes[i] {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'D' if depth == 0 => {
                // must not be part of a longer identifier
                let prev_alnum = i > 0 && (bytes[i - 1].is_ascii_alphanumeric() || bytes[i - 1] == b'_');
                let mut j = i + 1;
                while j < bytes.len() && bytes[j].is_ascii_whitespace() {
                    j += 1;
                }
                if prev_alnum || j >= bytes.len() || bytes[j] != b'[' {
                    continue;
                }
                let close = piece[j..]
                    .find(']')
                    .ok_or_else(|| PdoError::Format("unterminated D[".into()))?
                    + j;
                let inner = &piece[j + 1..close];
                let parts: Result<Vec<u32>, _> =
                    inner.split(',').map(|s| s.trim().parse::<u32>()).collect();
                let alpha = MultiIndex(parts.map_err(|_| {
                    PdoError::Format(format!("bad multi-index `{inner}`"))
                })?);
                return Ok(Some((&piece[..i], &piece[close + 1..], alpha)));
            }
            _ => {}
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::Expr;

    #[test]
    fn laplacian_round_trip() {
        let op = parse_operator("1*D[2,0] + 1*D[0,2]", 2).unwrap();
        assert_eq!(op.order(), 2);
        let text = format_operator(&op);
        let op2 = parse_operator(&text, 2).unwrap();
        assert_eq!(op, op2);
    }

    #[test]
    fn variable_coefficient_and_bare_term() {
        let op = parse_operator("x1*D[1]", 1).unwrap();
        assert_eq!(op.order(), 1);
        let f = Expr::var(0).powi(3);
        let out = op.apply(&f).unwrap();
        // x·D = x·(1/i)∂: on x³ gives (3/i)x³ = −3i·x³
        let v = out.eval_real_point(&[1.0]).unwrap();
        assert!((v.im + 3.0).abs() < 1e-14 && v.re.abs() < 1e-15, "{v}");
        // order-0 multiplication term
        let op = parse_operator("x1^2", 1).unwrap();
        assert_eq!(op.order(), 0);
    }

    #[test]
    fn signs_and_differences() {
        let op = parse_operator("1*D[2] - 1*D[2]", 1).unwrap();
        assert!(op.is_zero());
        let op = parse_operator("-1*D[1] + 2*D[1]", 1).unwrap();
        assert_eq!(op.order(), 1);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        assert!(parse_operator("1*D[2,0]", 1).is_err());
        assert!(parse_operator("x2*D[1]", 1).is_err());
    }
}
