//! Principal symbol and the sampled ellipticity check.

use super::LinearPDO;
use crate::error::{EvalError, PdoError};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use serde::Serialize;

/// `P_m(x, ξ) = Σ_{|α|=m} a_α(x) ξ^α` with the D-form coefficients, so the
/// `(−i)` phases cancel and the Laplacian has symbol `|ξ|²`.
pub fn principal_symbol(
    op: &LinearPDO,
    x: &[f64],
    xi: &[f64],
) -> Result<Complex64, EvalError> {
    let m = op.order();
    let mut acc = Complex64::new(0.0, 0.0);
    for (alpha, _) in op.partial_coeffs() {
        if alpha.order() != m {
            continue;
        }
        let a = op.d_coeff(alpha).expect("present");
        let mut xi_pow = 1.0f64;
        for (k, &a_k) in alpha.0.iter().enumerate() {
            xi_pow *= xi[k].powi(a_k as i32);
        }
        acc += a.eval_real_point(x)? * xi_pow;
    }
    Ok(acc)
}

/// Verdict of the sampled ellipticity check. Sampling-based: `elliptic`
/// means no symbol zero was found on the sampled grid, not a proof.
#[derive(Debug, Clone, Serialize)]
pub enum EllipticityVerdict {
    Elliptic {
        /// min |P_m(x,ξ)| over all samples
        c_min: f64,
        /// max |P_m(x,ξ)| over all samples (threshold reference)
        c_max: f64,
    },
    NonElliptic {
        witness_x: Vec<f64>,
        witness_xi: Vec<f64>,
        symbol_abs: f64,
        c_max: f64,
    },
}

impl EllipticityVerdict {
    pub fn is_elliptic(&self) -> bool {
        matches!(self, EllipticityVerdict::Elliptic { .. })
    }
}

/// Sample `|P_m(x, ξ)|` over a grid in the box and directions on the unit
/// sphere; refine locally around the smallest sample when it falls below
/// `threshold` (relative to the sphere maximum) to pin a witness.
///
/// Minimum sampling: 5 points per axis, 64 sphere directions in 2-D and
/// 256 in 3-D; higher dimensions use a seeded uniform sample.
pub fn ellipticity_check(
    op: &LinearPDO,
    bounds: &[(f64, f64)],
    x_samples: usize,
    sphere_samples: usize,
    threshold: f64,
    seed: u64,
) -> Result<EllipticityVerdict, PdoError> {
    let n = op.dim();
    if bounds.len() != n {
        return Err(PdoError::DimensionMismatch(bounds.len(), n));
    }
    let x_samples = x_samples.max(5);
    let sphere_samples = sphere_samples.max(match n {
        0..=2 => 64,
        3 => 256,
        _ => 512,
    });

    let xs = grid_points(bounds, x_samples);
    let dirs = sphere_points(n, sphere_samples, seed);

    let eval =
        |x: &[f64], xi: &[f64]| -> Result<f64, PdoError> {
            principal_symbol(op, x, xi)
                .map(|v| v.norm())
                .map_err(|e| PdoError::Precondition(format!("symbol evaluation failed: {e}")))
        };

    let mut c_min = f64::INFINITY;
    let mut c_max: f64 = 0.0;
    let mut argmin: (usize, usize) = (0, 0);
    for (ix, x) in xs.iter().enumerate() {
        for (id, xi) in dirs.iter().enumerate() {
            let v = eval(x, xi)?;
            if v < c_min {
                c_min = v;
                argmin = (ix, id);
            }
            c_max = c_max.max(v);
        }
    }
    let scale = c_max.max(f64::MIN_POSITIVE);
    if c_min >= threshold * scale {
        return Ok(EllipticityVerdict::Elliptic { c_min, c_max });
    }

    // Local refinement around the minimizing sample to pin the witness.
    let mut best_x = xs[argmin.0].clone();
    let mut best_xi = dirs[argmin.1].clone();
    let mut best = c_min;
    if n == 2 {
        // ternary search on the sphere angle; |P_m|² is smooth in θ
        let mut theta = best_xi[1].atan2(best_xi[0]);
        let mut width = std::f64::consts::PI / sphere_samples as f64 * 2.0;
        for _ in 0..200 {
            let t1 = theta - width / 3.0;
            let t2 = theta + width / 3.0;
            let v1 = eval(&best_x, &[t1.cos(), t1.sin()])?;
            let v2 = eval(&best_x, &[t2.cos(), t2.sin()])?;
            if v1 < v2 {
                theta = t1;
            } else {
                theta = t2;
            }
            width *= 2.0 / 3.0;
            if width < 1e-14 {
                break;
            }
        }
        best_xi = vec![theta.cos(), theta.sin()];
        best = eval(&best_x, &best_xi)?;
    } else {
        // shrinking neighborhood sampling on the sphere
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
        let mut radius = 0.5f64;
        for _ in 0..60 {
            let mut improved = false;
            for _ in 0..64 {
                let mut cand: Vec<f64> = best_xi
                    .iter()
                    .map(|&c| c + radius * (rng.gen::<f64>() - 0.5))
                    .collect();
                let norm = cand.iter().map(|c| c * c).sum::<f64>().sqrt();
                if norm < 1e-12 {
                    continue;
                }
                cand.iter_mut().for_each(|c| *c /= norm);
                let v = eval(&best_x, &cand)?;
                if v < best {
                    best = v;
                    best_xi = cand;
                    improved = true;
                }
            }
            if !improved {
                radius *= 0.5;
            }
            if radius < 1e-13 {
                break;
            }
        }
    }
    // the x-location can matter too for variable coefficients: nudge x
    // along the grid neighborhood
    for axis in 0..n {
        let h = (bounds[axis].1 - bounds[axis].0) / (4.0 * x_samples as f64);
        for _ in 0..80 {
            let mut moved = false;
            for dir in [-1.0, 1.0] {
                let mut cand = best_x.clone();
                cand[axis] = (cand[axis] + dir * h).clamp(bounds[axis].0, bounds[axis].1);
                let v = eval(&cand, &best_xi)?;
                if v < best {
                    best = v;
                    best_x = cand;
                    moved = true;
                }
            }
            if !moved {
                break;
            }
        }
    }
    Ok(EllipticityVerdict::NonElliptic {
        witness_x: best_x,
        witness_xi: best_xi,
        symbol_abs: best,
        c_max,
    })
}

fn grid_points(bounds: &[(f64, f64)], per_axis: usize) -> Vec<Vec<f64>> {
    let n = bounds.len();
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let p: Vec<f64> = (0..n)
            .map(|k| {
                let (a, b) = bounds[k];
                a + (b - a) * idx[k] as f64 / (per_axis - 1) as f64
            })
            .collect();
        out.push(p);
        let mut k = 0;
        loop {
            if k == n {
                return out;
            }
            idx[k] += 1;
            if idx[k] < per_axis {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

fn sphere_points(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    match n {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|k| {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
                vec![theta.cos(), theta.sin()]
            })
            .collect(),
        3 => {
            // Fibonacci sphere
            let golden = (1.0 + 5f64.sqrt()) / 2.0;
            (0..count)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let phi = 2.0 * std::f64::consts::PI * k as f64 / golden;
                    vec![r * phi.cos(), r * phi.sin(), z]
                })
                .collect()
        }
        _ => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| {
                    loop {
                        let v: Vec<f64> =
                            (0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
                        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                        if norm > 1e-3 {
                            return v.into_iter().map(|c| c / norm).collect();
                        }
                    }
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pdo::parse_operator;
    use crate::symbolic::MultiIndex;
    
    #[test]
    fn laplacian_symbol_on_unit_vector() {
        let lap = parse_operator("1*D[2,0] + 1*D[0,2]", 2).unwrap();
        let v = principal_symbol(&lap, &[0.0, 0.0], &[0.6, 0.8]).unwrap();
        assert!((v.re - 1.0).abs() < 1e-14 && v.im.abs() < 1e-15, "{v}");
    }

    #[test]
    fn missing_direction_gives_zero() {
        let p = parse_operator("1*D[2,0]", 2).unwrap();
        let v = principal_symbol(&p, &[0.3, 0.7], &[0.0, 1.0]).unwrap();
        assert_eq!(v, num_complex::Complex64::new(0.0, 0.0));
    }

    #[test]
    fn variable_coefficient_symbol() {
        let p = parse_operator("x1*D[2]", 1).unwrap();
        let v = principal_symbol(&p, &[2.0], &[3.0]).unwrap();
        assert!((v.re - 18.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn symbol_homogeneity() {
        let p = parse_operator("x1*D[2,0] + 1*D[1,1] + 2*D[0,2]", 2).unwrap();
        let m = p.order() as i32;
        let x = [1.3, -0.4];
        let xi = [0.8, -0.6];
        let base = principal_symbol(&p, &x, &xi).unwrap();
        for t in [2.0, 10.0] {
            let scaled: Vec<f64> = xi.iter().map(|&c| c * t).collect();
            let v = principal_symbol(&p, &x, &scaled).unwrap();
            let want = base * t.powi(m);
            assert!((v - want).norm() <= 1e-10 * (1.0 + want.norm()), "t={t}");
        }
    }

    #[test]
    fn laplacian_is_elliptic_with_cmin_one() {
        let lap = parse_operator("1*D[2,0] + 1*D[0,2]", 2).unwrap();
        let v = ellipticity_check(&lap, &[(-1.0, 1.0), (-1.0, 1.0)], 5, 64, 1e-9, 0).unwrap();
        match v {
            EllipticityVerdict::Elliptic { c_min, .. } => {
                assert!((c_min - 1.0).abs() < 1e-12)
            }
            other => panic!("expected elliptic, got {other:?}"),
        }
    }

    #[test]
    fn heat_type_operator_is_non_elliptic() {
        // principal part D_x² in variables (x, t): symbol ξ₁², zero at (0, ±1)
        let p = parse_operator("1*D[2,0] + 1*D[0,1]", 2).unwrap();
        let v = ellipticity_check(&p, &[(-1.0, 1.0), (-1.0, 1.0)], 5, 64, 1e-9, 0).unwrap();
        match v {
            EllipticityVerdict::NonElliptic { witness_xi, symbol_abs, .. } => {
                assert!(symbol_abs < 1e-9);
                assert!(witness_xi[0].abs() < 1e-6, "ξ* = {witness_xi:?}");
                assert!((witness_xi[1].abs() - 1.0).abs() < 1e-6);
            }
            other => panic!("expected non-elliptic, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_on_axis_elliptic_away_from_it() {
        // D₁² + x1²·D₂²: elliptic on [1,2]×[0,1], degenerates at x1=0
        let p = parse_operator("1*D[2,0] + x1^2*D[0,2]", 2).unwrap();
        let v = ellipticity_check(&p, &[(1.0, 2.0), (0.0, 1.0)], 5, 64, 1e-9, 0).unwrap();
        assert!(v.is_elliptic(), "{v:?}");
        let v = ellipticity_check(&p, &[(-1.0, 1.0), (-1.0, 1.0)], 5, 64, 1e-9, 0).unwrap();
        match v {
            EllipticityVerdict::NonElliptic { witness_x, witness_xi, .. } => {
                assert!(witness_x[0].abs() < 1e-6, "x* = {witness_x:?}");
                assert!(witness_xi[0].abs() < 1e-3, "ξ* = {witness_xi:?}");
            }
            other => panic!("expected non-elliptic, got {other:?}"),
        }
    }

    #[test]
    fn identity_homogeneity_order_zero() {
        let p = LinearPDO::from_partial_coeffs(
            1,
            [(MultiIndex(vec![0]), crate::symbolic::Expr::real(3.0))],
        )
        .unwrap();
        let v = principal_symbol(&p, &[0.0], &[5.0]).unwrap();
        assert!((v.re - 3.0).abs() < 1e-15);
    }
}
