//! Quadrature evaluation of `u`, its directional derivatives, its
//! operator iterates, and the two-sided counterexample report.

use super::oscillatory::{adaptive_oscillatory, OscIntegrandSpec};
use super::params::MetivierParams;
use super::{complex_zero, ln_directional_derivative_closed_form};
use crate::analysis::{fit_roumieu, BoxDomain, FitResult};
use crate::error::MetivierError;
use crate::symbolic::{derivative, simplify, DiffVar, Expr, MultiIndex};
use crate::weights::{ls_slope, YoungConjugate};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

/// Evaluate `u(x)` by adaptive panel quadrature with estimated absolute
/// error below `tol`.
pub fn eval_u(params: &MetivierParams, x: &[f64], tol: f64) -> Result<Complex64, MetivierError> {
    let cut = params.support_cut(x);
    if cut == Some(0.0) {
        return Ok(complex_zero());
    }
    let d = params.phase(x);
    let spec = OscIntegrandSpec::new(params.eta, tol, d.abs(), cut, 0.0);
    let scaled: Vec<(f64, f64)> = x
        .iter()
        .zip(&params.x0)
        .map(|(xi, a)| ((xi - a) / params.half_width, 0.0))
        .collect();
    let (value, err) = adaptive_oscillatory(&spec, |rho| {
        let s = rho.powf(params.eps);
        let mut bump = 1.0;
        for (rel, _) in &scaled {
            bump *= params.psi_at(s * rel);
            if bump == 0.0 {
                return Ok(complex_zero());
            }
        }
        let decay = (-rho.powf(params.eta)).exp();
        Ok(Complex64::new(0.0, rho * d).exp() * (bump * decay))
    })?;
    if err > tol {
        return Err(MetivierError::Accuracy { requested: tol, achieved: err });
    }
    Ok(value)
}

/// Quadrature value, exact leading term and error estimate for
/// `D_{ξ₀}^α u(x₀)`.
#[derive(Debug, Clone, Serialize)]
pub struct DirectionalDerivative {
    pub alpha: u32,
    pub quadrature_re: f64,
    pub quadrature_im: f64,
    pub closed_form: f64,
    pub est_error: f64,
}

/// Directional derivative at the center by symbolic differentiation
/// under the integral along the line `x₀ + t·ξ₀`, then quadrature.
///
/// The integrand derivative expands by the Leibniz rule over the bump and
/// oscillatory factors; on the plateau every bump-derivative term
/// vanishes at `t = 0`, leaving `ρ^α e^{−ρ^η}` whose integral is the
/// closed form `(1/η)Γ_upper((α+1)/η, 1)` — the quadrature here checks
/// that mechanism rather than assuming it. `tol` is relative to the
/// closed-form magnitude, which only sets the error budget.
pub fn directional_derivative_u(
    params: &MetivierParams,
    alpha: u32,
    tol: f64,
) -> Result<DirectionalDerivative, MetivierError> {
    // line-restricted integrand: Π_i ψ(ρ^ε t ξ₀ᵢ / w) · e^{iρt}
    let mut factors = Vec::new();
    for &c in params.xi0.iter().filter(|c| c.abs() > 0.0) {
        let v = Expr::Prod(vec![
            Expr::real(c / params.half_width),
            Expr::Pow(Box::new(Expr::Rho), crate::symbolic::Exponent::Real(params.eps)),
            Expr::var(0),
        ]);
        factors.push(params.psi.substitute(DiffVar::Var(0), &v));
    }
    factors.push(Expr::Exp(Box::new(Expr::Prod(vec![
        Expr::imag_unit(),
        Expr::Rho,
        Expr::var(0),
    ]))));
    let mut line = simplify(&Expr::Prod(factors));
    for _ in 0..alpha {
        line = derivative(&line, DiffVar::Var(0));
    }
    // D_t = (1/i)∂_t ⇒ D^α = (−i)^α ∂^α; substitute t = 0
    let at_zero = simplify(&line.substitute(DiffVar::Var(0), &Expr::zero()));
    let phase = match alpha % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    };
    let closed_form = super::directional_derivative_closed_form(params.eta, alpha);
    let tol_abs = tol * closed_form.abs().max(1.0);
    let spec = OscIntegrandSpec::new(params.eta, tol_abs, 0.0, None, alpha as f64);
    let (value, err) = adaptive_oscillatory(&spec, |rho| {
        let g = at_zero
            .eval(&[0.0], rho)
            .map_err(MetivierError::Eval)?;
        Ok(g * (-rho.powf(params.eta)).exp())
    })?;
    let value = value * phase;
    if err > tol_abs {
        return Err(MetivierError::Accuracy { requested: tol_abs, achieved: err });
    }
    Ok(DirectionalDerivative {
        alpha,
        quadrature_re: value.re,
        quadrature_im: value.im,
        closed_form,
        est_error: err,
    })
}

/// Dense lookup tables for the 1-D profile derivatives `ψ^{(j)}`.
///
/// The expressions are exact symbolic derivatives; the tables only
/// accelerate their pointwise evaluation inside quadrature loops (order 0
/// is always evaluated exactly). ψ is even, so `ψ^{(j)}(−v) =
/// (−1)^j ψ^{(j)}(v)` and tables cover `v ∈ [0, 1]`.
pub struct PsiDerivTables {
    exprs: Vec<Expr>,
    tables: Vec<Vec<f64>>,
    step: f64,
}

const PSI_TABLE_POINTS: usize = 16385;

impl PsiDerivTables {
    pub fn build(psi: &Expr, max_order: u32) -> Result<Self, MetivierError> {
        let mut exprs = vec![psi.clone()];
        for _ in 0..max_order {
            exprs.push(derivative(exprs.last().unwrap(), DiffVar::Var(0)));
        }
        let step = 1.0 / (PSI_TABLE_POINTS - 1) as f64;
        let mut tables = Vec::with_capacity(exprs.len());
        for e in &exprs {
            let mut t = Vec::with_capacity(PSI_TABLE_POINTS);
            for i in 0..PSI_TABLE_POINTS {
                let v = i as f64 * step;
                let val = if v >= 1.0 {
                    0.0
                } else {
                    e.eval_real_point(&[v]).map_err(MetivierError::Eval)?.re
                };
                t.push(val);
            }
            tables.push(t);
        }
        Ok(Self { exprs, tables, step })
    }

    pub fn order(&self) -> u32 {
        (self.exprs.len() - 1) as u32
    }

    /// Exact expression evaluation (no tables).
    pub fn eval_exact(&self, j: u32, v: f64) -> f64 {
        let e = &self.exprs[j as usize];
        let val = e.eval_real_point(&[v.abs()]).map(|c| c.re).unwrap_or(0.0);
        if j % 2 == 1 && v < 0.0 {
            -val
        } else {
            val
        }
    }

    /// Table lookup with linear interpolation; order 0 is exact.
    pub fn eval(&self, j: u32, v: f64) -> f64 {
        let av = v.abs();
        if av >= 1.0 {
            return 0.0;
        }
        if j == 0 {
            return self.eval_exact(0, av);
        }
        let t = &self.tables[j as usize];
        let pos = av / self.step;
        let i = (pos as usize).min(t.len() - 2);
        let frac = pos - i as f64;
        let val = t[i] * (1.0 - frac) + t[i + 1] * frac;
        if j % 2 == 1 && v < 0.0 {
            -val
        } else {
            val
        }
    }
}

/// Evaluator for `P^q u` at arbitrary points: the operator power is
/// composed exactly on the operator algebra (constant coefficients), the
/// integrand factorizes per axis, and each axis derivative expands by
/// the 1-D Leibniz rule over `ψ` and the oscillatory exponential with
/// the ρ-powers tracked exactly.
pub struct IterateEvaluator<'a> {
    params: &'a MetivierParams,
    /// constant coefficients of `P^q`
    coeffs: Vec<(MultiIndex, Complex64)>,
    tables: &'a PsiDerivTables,
    max_axis_order: u32,
}

impl<'a> IterateEvaluator<'a> {
    pub fn new(
        params: &'a MetivierParams,
        q: u32,
        tables: &'a PsiDerivTables,
    ) -> Result<Self, MetivierError> {
        let pq = params.op.iterate(q).map_err(MetivierError::Pdo)?;
        let mut coeffs = Vec::new();
        let mut max_axis_order = 0;
        for (alpha, c) in pq.partial_coeffs() {
            let Expr::Const(v) = simplify(c) else {
                return Err(MetivierError::Constraint(
                    "iterate evaluator needs constant coefficients".into(),
                ));
            };
            max_axis_order = max_axis_order.max(alpha.0.iter().copied().max().unwrap_or(0));
            coeffs.push((alpha.clone(), v));
        }
        if max_axis_order > tables.order() {
            return Err(MetivierError::Constraint(format!(
                "profile tables go up to order {}, need {max_axis_order}",
                tables.order()
            )));
        }
        Ok(Self { params, coeffs, tables, max_axis_order })
    }

    /// `[P^q F₀](x, ρ)` where `F₀` is the bump–oscillation integrand
    /// (without the `e^{−ρ^η}` decay factor).
    pub fn integrand(&self, x: &[f64], rho: f64) -> Complex64 {
        let p = self.params;
        let n = p.dim();
        let s = rho.powf(p.eps) / p.half_width;
        // axis_d[i][k] = ∂_i^k [ψ(s(x_i−a_i)) e^{iρ ξ₀ᵢ (x_i−a_i)}]
        let mut axis_d: Vec<Vec<Complex64>> = Vec::with_capacity(n);
        for i in 0..n {
            let rel = x[i] - p.x0[i];
            let v = s * rel;
            let osc = Complex64::new(0.0, rho * p.xi0[i] * rel).exp();
            let iw = Complex64::new(0.0, rho * p.xi0[i]);
            let kmax = self.max_axis_order as usize;
            let mut col = Vec::with_capacity(kmax + 1);
            // psi^{(j)}(v)·s^j cached
            let mut psi_pow = Vec::with_capacity(kmax + 1);
            let mut spow = 1.0;
            for j in 0..=kmax {
                psi_pow.push(self.tables.eval(j as u32, v) * spow);
                spow *= s;
            }
            for k in 0..=kmax {
                let mut acc = complex_zero();
                let mut binom = 1.0f64;
                let mut iw_pow = iw.powu(k as u32);
                let iw_is_zero = iw.norm_sqr() == 0.0;
                for j in 0..=k {
                    if psi_pow[j] != 0.0 {
                        let osc_pow = if iw_is_zero {
                            if j == k {
                                Complex64::new(1.0, 0.0)
                            } else {
                                complex_zero()
                            }
                        } else {
                            iw_pow
                        };
                        acc += osc_pow * (binom * psi_pow[j]);
                    }
                    binom *= (k - j) as f64 / (j + 1) as f64;
                    if !iw_is_zero {
                        iw_pow /= iw;
                    }
                }
                col.push(acc * osc);
            }
            axis_d.push(col);
        }
        let mut total = complex_zero();
        for (alpha, c) in &self.coeffs {
            let mut term = *c;
            for (i, &k) in alpha.0.iter().enumerate() {
                term *= axis_d[i][k as usize];
                if term == complex_zero() {
                    break;
                }
            }
            total += term;
        }
        total
    }

    /// ρ-integral of the iterated integrand at `x` with the decay weight.
    pub fn integral_at(&self, x: &[f64], tol_abs: f64) -> Result<(Complex64, f64), MetivierError> {
        let cut = self.params.support_cut(x);
        if cut == Some(0.0) {
            return Ok((complex_zero(), 0.0));
        }
        let d = self.params.phase(x);
        let power = (self.coeffs.iter().map(|(a, _)| a.order()).max().unwrap_or(0)) as f64;
        let spec = OscIntegrandSpec::new(self.params.eta, tol_abs, d.abs(), cut, power);
        adaptive_oscillatory(&spec, |rho| {
            Ok(self.integrand(x, rho) * (-rho.powf(self.params.eta)).exp())
        })
    }
}

/// `P^q u(x)` by symbolic application of the operator under the integral
/// followed by quadrature; `q = 0` coincides with [`eval_u`].
pub fn apply_iterate_under_integral(
    params: &MetivierParams,
    q: u32,
    x: &[f64],
    tol: f64,
) -> Result<Complex64, MetivierError> {
    if q == 0 {
        return eval_u(params, x, tol);
    }
    let tables = PsiDerivTables::build(&params.psi, q * params.m)?;
    let ev = IterateEvaluator::new(params, q, &tables)?;
    let (v, err) = ev.integral_at(x, tol)?;
    if err > tol {
        return Err(MetivierError::Accuracy { requested: tol, achieved: err });
    }
    Ok(v)
}

/// Grid and window configuration for the counterexample report.
#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleConfig {
    /// Iterate orders `q = 0..=qmax`.
    pub qmax: u32,
    /// Quadrature-vs-oracle derivative orders `α = 0..=alpha_max`.
    pub alpha_max: u32,
    /// Closed-form slope window (inclusive).
    pub slope_window: (u32, u32),
    /// L² domain for the iterate norms.
    pub domain: BoxDomain,
    /// Simpson nodes on ordinary axes.
    pub base_nodes: usize,
    /// Simpson nodes along the oscillation axis (largest |ξ₀ᵢ|).
    pub osc_nodes: usize,
    /// Relative ρ-quadrature tolerance for the norms.
    pub rho_tol_rel: f64,
    /// Relative tolerance for the derivative quadrature checks.
    pub deriv_tol_rel: f64,
}

impl CounterexampleConfig {
    pub fn default_for(params: &MetivierParams) -> Self {
        let half = 0.6 * params.delta / 0.5;
        let bounds: Vec<(f64, f64)> =
            params.x0.iter().map(|&a| (a - half, a + half)).collect();
        Self {
            qmax: 6,
            alpha_max: 10,
            slope_window: (10, 25),
            domain: BoxDomain::new(bounds).expect("positive half-width"),
            base_nodes: 17,
            osc_nodes: 257,
            rho_tol_rel: 1e-5,
            deriv_tol_rel: 1e-8,
        }
    }
}

/// One side of the growth comparison.
#[derive(Debug, Clone, Serialize)]
pub struct ExponentFit {
    /// Least-squares slope of `log(value)` against `z·log z` (with
    /// intercept), `z` the derivative order.
    pub exponent: f64,
    pub window: (u32, u32),
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SideReport {
    pub values: Vec<f64>,
    pub fit: ExponentFit,
}

/// The combined verdict report.
#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub params: super::params::ParamsSummary,
    /// `log |D^α u(x₀)|` closed-form branch over the slope window.
    pub derivative: SideReport,
    /// Quadrature-vs-oracle agreement for small α.
    pub derivative_checks: Vec<DirectionalDerivative>,
    /// `‖P^q u‖_{L²(K)}` for `q ≤ qmax`.
    pub iterate: SideReport,
    /// Roumieu fit of the iterate norms against the supplied weight.
    pub iterate_roumieu: FitResult,
    pub gap: f64,
    pub has_gap: bool,
    /// Gevrey index `s′` of the comparison weight `t^{1/s′}`; the
    /// derivative side escapes it whenever `exponent > s′`.
    pub sigma_target_s: f64,
    pub exceeds_sigma_target: bool,
    pub degenerate: bool,
    pub verdict: String,
}

/// Margin used for the gap verdict.
pub const GAP_MARGIN: f64 = 0.05;

/// Assemble the full report: derivative-side growth at `x₀` along `ξ₀`,
/// iterate-side L² growth over the box, fitted exponents, and the
/// membership-vs-escape verdict.
pub fn counterexample_report(
    params: &MetivierParams,
    conj: &YoungConjugate,
    sigma_target_s: f64,
    cfg: &CounterexampleConfig,
) -> Result<CounterexampleReport, MetivierError> {
    let degenerate = cfg.qmax == 0 || cfg.slope_window.1 <= cfg.slope_window.0;

    // derivative side: closed-form branch on the slope window
    let mut dpoints = Vec::new();
    for alpha in cfg.slope_window.0..=cfg.slope_window.1 {
        let z = alpha as f64;
        dpoints.push((z * z.ln(), ln_directional_derivative_closed_form(params.eta, alpha)));
    }
    let derivative_fit = fit_points(&dpoints, cfg.slope_window);
    let derivative = SideReport {
        values: dpoints.iter().map(|(_, y)| *y).collect(),
        fit: derivative_fit,
    };

    // quadrature-vs-oracle checks at small α
    let mut derivative_checks = Vec::new();
    for alpha in 0..=cfg.alpha_max {
        derivative_checks.push(directional_derivative_u(params, alpha, cfg.deriv_tol_rel)?);
    }

    // iterate side
    let norms = iterate_norm_table(params, cfg)?;
    let mut ipoints = Vec::new();
    for (q, &v) in norms.iter().enumerate().skip(1) {
        if v > 0.0 && v.is_finite() {
            let z = (q as f64) * params.m as f64;
            ipoints.push((z * z.ln(), v.ln()));
        }
    }
    let iterate_fit = fit_points(&ipoints, (1, cfg.qmax));
    let iterate = SideReport { values: norms.clone(), fit: iterate_fit };
    let iterate_roumieu = fit_roumieu(
        &norms,
        conj,
        params.m,
        &crate::analysis::default_ladder(),
    )
    .map_err(|e| MetivierError::Constraint(e.to_string()))?;

    let gap = derivative.fit.exponent - iterate.fit.exponent;
    let has_gap = gap > GAP_MARGIN && !degenerate;
    let exceeds_sigma_target = derivative.fit.exponent > sigma_target_s;
    let verdict = if degenerate {
        "degenerate configuration: no verdict".into()
    } else if has_gap {
        format!(
            "iterate class strictly larger: derivative exponent {:.4} vs iterate exponent {:.4}",
            derivative.fit.exponent, iterate.fit.exponent
        )
    } else {
        format!(
            "no counterexample: derivative exponent {:.4} vs iterate exponent {:.4}",
            derivative.fit.exponent, iterate.fit.exponent
        )
    };
    Ok(CounterexampleReport {
        params: params.summary(),
        derivative,
        derivative_checks,
        iterate,
        iterate_roumieu,
        gap,
        has_gap,
        sigma_target_s,
        exceeds_sigma_target,
        degenerate,
        verdict,
    })
}

fn fit_points(points: &[(f64, f64)], window: (u32, u32)) -> ExponentFit {
    if points.len() < 2 {
        return ExponentFit { exponent: f64::NAN, window, points: points.to_vec() };
    }
    let xs: Vec<f64> = points.iter().map(|(x, _)| *x).collect();
    let ys: Vec<f64> = points.iter().map(|(_, y)| *y).collect();
    ExponentFit { exponent: ls_slope(&xs, &ys), window, points: points.to_vec() }
}

/// `q ↦ ‖P^q u‖_{L²(K)}` with per-node adaptive ρ-quadrature.
pub fn iterate_norm_table(
    params: &MetivierParams,
    cfg: &CounterexampleConfig,
) -> Result<Vec<f64>, MetivierError> {
    let n = params.dim();
    if cfg.domain.dim() != n {
        return Err(MetivierError::Constraint("domain dimension mismatch".into()));
    }
    let tables = PsiDerivTables::build(&params.psi, cfg.qmax * params.m)?;
    // oscillation axis gets the fine grid
    let osc_axis = params
        .xi0
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut axis_nodes = Vec::new();
    let mut axis_weights = Vec::new();
    for axis in 0..n {
        let count = if axis == osc_axis { cfg.osc_nodes } else { cfg.base_nodes };
        let count = if count % 2 == 0 { count + 1 } else { count };
        let (a, b) = cfg.domain.bounds()[axis];
        let h = (b - a) / (count - 1) as f64;
        axis_nodes.push((0..count).map(|i| a + h * i as f64).collect::<Vec<f64>>());
        axis_weights.push(
            (0..count)
                .map(|i| {
                    let c = if i == 0 || i == count - 1 {
                        1.0
                    } else if i % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    c * h / 3.0
                })
                .collect::<Vec<f64>>(),
        );
    }
    // flatten the tensor grid
    let mut nodes: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut idx = vec![0usize; n];
    'outer: loop {
        let mut x = Vec::with_capacity(n);
        let mut w = 1.0;
        for k in 0..n {
            x.push(axis_nodes[k][idx[k]]);
            w *= axis_weights[k][idx[k]];
        }
        nodes.push((x, w));
        let mut k = 0;
        loop {
            if k == n {
                break 'outer;
            }
            idx[k] += 1;
            if idx[k] < axis_nodes[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }

    let mut out = Vec::with_capacity(cfg.qmax as usize + 1);
    for q in 0..=cfg.qmax {
        let ev = IterateEvaluator::new(params, q, &tables)?;
        // probe pass for the magnitude scale
        let mut probe: f64 = 0.0;
        for frac in [0.05f64, 0.2, 0.35, 0.5, 0.65] {
            let x: Vec<f64> = (0..n)
                .map(|k| {
                    let (a, b) = cfg.domain.bounds()[k];
                    a + (b - a) * frac
                })
                .collect();
            let (v, _) = ev.integral_at(&x, f64::MAX)?;
            probe = probe.max(v.norm());
        }
        let tol_abs = cfg.rho_tol_rel * probe.max(1e-280);
        // deterministic reduction: node results collected in index order
        let sq_terms: Result<Vec<f64>, MetivierError> = nodes
            .par_iter()
            .map(|(x, w)| {
                let (v, _) = ev.integral_at(x, tol_abs)?;
                Ok(w * v.norm_sqr())
            })
            .collect();
        let sq: f64 = sq_terms?.iter().sum();
        out.push(sq.max(0.0).sqrt());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn defaults() -> MetivierParams {
        MetivierParams::default_bundle().unwrap()
    }

    #[test]
    fn u_at_center_matches_incomplete_gamma() {
        let p = defaults();
        let v = eval_u(&p, &[0.0, 0.0], 1e-10).unwrap();
        // ∫₁^∞ e^{−ρ^η} dρ = (1/η)Γ_upper(1/η, 1)
        assert!((v.re - 1.6868476323030852).abs() < 1e-8, "{v}");
        assert!(v.im.abs() < 1e-10);
    }

    #[test]
    fn u_vanishes_outside_support() {
        let p = defaults();
        for &x in &[[1.0, 0.0], [0.0, -1.0], [0.9, 0.9], [2.0, 0.3]] {
            let v = eval_u(&p, &x, 1e-10).unwrap();
            assert!(v.norm() < 1e-10, "x={x:?}: {v}");
        }
    }

    #[test]
    fn halving_tolerance_is_self_consistent() {
        let p = defaults();
        let x = [0.2, 0.3];
        let a = eval_u(&p, &x, 1e-6).unwrap();
        let b = eval_u(&p, &x, 5e-7).unwrap();
        assert!((a - b).norm() < 1.5e-6);
    }

    #[test]
    fn directional_derivative_alpha_zero_is_u() {
        let p = defaults();
        let d = directional_derivative_u(&p, 0, 1e-8).unwrap();
        let u0 = eval_u(&p, &[0.0, 0.0], 1e-10).unwrap();
        assert!((d.quadrature_re - u0.re).abs() < 1e-7);
        assert!((d.closed_form - 1.6868476323030852).abs() < 1e-9);
    }

    #[test]
    fn directional_derivative_alpha4_matches_oracle() {
        let p = defaults();
        let d = directional_derivative_u(&p, 4, 1e-8).unwrap();
        let rel = (d.quadrature_re - d.closed_form).abs() / d.closed_form;
        assert!(rel < 1e-6, "α=4: {} vs {} rel {rel}", d.quadrature_re, d.closed_form);
        assert!(d.quadrature_im.abs() < 1e-6 * d.closed_form);
    }

    #[test]
    fn iterate_zero_consistency() {
        let p = defaults();
        let x = [0.15, -0.2];
        let a = apply_iterate_under_integral(&p, 0, &x, 1e-8).unwrap();
        let b = eval_u(&p, &x, 1e-8).unwrap();
        assert!((a - b).norm() < 1e-9);
    }

    #[test]
    fn iterates_vanish_outside_support() {
        let p = defaults();
        for q in [1u32, 2] {
            let v = apply_iterate_under_integral(&p, q, &[1.2, -0.4], 1e-8).unwrap();
            assert_eq!(v, complex_zero(), "q={q}");
        }
    }

    #[test]
    fn iterate_evaluator_agrees_with_symbolic_route() {
        // cross-check the tensor/table evaluator against a fully
        // symbolic application of P on the assembled integrand
        let p = defaults();
        let tables = PsiDerivTables::build(&p.psi, 2).unwrap();
        let ev = IterateEvaluator::new(&p, 1, &tables).unwrap();
        let f0 = p.base_integrand();
        let pf0 = p.op.apply(&f0).unwrap();
        for (x, rho) in [([0.3, 0.1], 2.0), ([0.1, -0.25], 7.3), ([0.05, 0.0], 30.0)] {
            let fast = ev.integrand(&x, rho);
            let exact = pf0.eval(&x, rho).unwrap();
            assert!(
                (fast - exact).norm() <= 1e-6 * (1.0 + exact.norm()),
                "x={x:?} ρ={rho}: {fast} vs {exact}"
            );
        }
    }

    #[test]
    fn symbol_cancellation_at_center() {
        // the ρ^{qm} coefficient of the substituted integrand vanishes
        // when P_m(ξ₀) = 0, for q ≤ 3
        let p = defaults();
        let f0 = p.base_integrand();
        let mut cur = f0;
        for q in 1..=3u32 {
            cur = p.op.apply(&cur).unwrap();
            let mut at_center = cur.clone();
            for (k, &a) in p.x0.iter().enumerate() {
                at_center = at_center.substitute(DiffVar::Var(k), &Expr::real(a));
            }
            let at_center = simplify(&at_center);
            let coeff = rho_power_coefficient(&at_center, (q * p.m) as f64);
            assert!(
                coeff.norm() < 1e-12,
                "q={q}: ρ^{} coefficient {coeff}",
                q * p.m
            );
        }
    }

    /// Extract the coefficient of `ρ^power` from a simplified expression
    /// that is polynomial in `rho`.
    fn rho_power_coefficient(e: &Expr, power: f64) -> Complex64 {
        fn term_power(t: &Expr) -> (f64, Complex64) {
            match t {
                Expr::Rho => (1.0, Complex64::new(1.0, 0.0)),
                Expr::Pow(b, ex) if matches!(**b, Expr::Rho) => {
                    (ex.as_f64(), Complex64::new(1.0, 0.0))
                }
                Expr::Const(c) => (0.0, *c),
                Expr::Prod(fs) => {
                    let mut p = 0.0;
                    let mut c = Complex64::new(1.0, 0.0);
                    for f in fs {
                        let (fp, fc) = term_power(f);
                        p += fp;
                        c *= fc;
                    }
                    (p, c)
                }
                other => panic!("not a rho-polynomial term: {other}"),
            }
        }
        let terms: Vec<&Expr> = match e {
            Expr::Sum(ts) => ts.iter().collect(),
            other => vec![other],
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for t in terms {
            if t.is_const(0.0) {
                continue;
            }
            let (p, c) = term_power(t);
            if (p - power).abs() < 1e-9 {
                acc += c;
            }
        }
        acc
    }
}
