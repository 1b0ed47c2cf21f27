//! Parameter bundle for the counterexample function.

use super::plateau_profile;
use crate::error::MetivierError;
use crate::pdo::{principal_symbol, LinearPDO};
use crate::symbolic::Expr;
use serde::Serialize;

/// Fraction of the profile radius that is identically 1.
pub const PLATEAU_FRACTION: f64 = 0.5;

/// The `(s, σ, ε, δ, η, x₀, ξ₀, P)` bundle defining the oscillatory
/// integral `u`.
///
/// Validated at construction:
/// - `s > 1`, `σ ∈ (1, s)`, `0 < ε < m(s−σ)/(2ms−σ)`;
/// - `η = (m−ε)/(ms) ∈ (0, 1)` and `1/η > s`;
/// - `|ξ₀| = 1` within 1e−12;
/// - `P` constant-coefficient of order `m` with a sampled symbol zero at
///   `ξ₀`: `|P_m(ξ₀)| < 1e−10 · max_{|ξ|=1} |P_m(ξ)|`.
#[derive(Debug, Clone)]
pub struct MetivierParams {
    pub s: f64,
    pub sigma: f64,
    pub eps: f64,
    pub delta: f64,
    pub m: u32,
    pub eta: f64,
    pub x0: Vec<f64>,
    pub xi0: Vec<f64>,
    pub op: LinearPDO,
    /// Half-width of each tensor factor: `2δ/√n`, so the support box
    /// stays inside `B(x₀, 2δ)`.
    pub half_width: f64,
    /// The 1-D plateau profile `ψ` as an expression in one variable.
    pub psi: Expr,
}

/// Serializable snapshot of the validated parameters.
#[derive(Debug, Clone, Serialize)]
pub struct ParamsSummary {
    pub s: f64,
    pub sigma: f64,
    pub eps: f64,
    pub eps_bound: f64,
    pub delta: f64,
    pub m: u32,
    pub eta: f64,
    pub x0: Vec<f64>,
    pub xi0: Vec<f64>,
    pub operator: String,
    pub half_width: f64,
}

impl MetivierParams {
    pub fn new(
        s: f64,
        sigma: f64,
        eps: f64,
        delta: f64,
        x0: Vec<f64>,
        xi0: Vec<f64>,
        op: LinearPDO,
    ) -> Result<Self, MetivierError> {
        let cerr = |msg: String| Err(MetivierError::Constraint(msg));
        if !(s > 1.0) {
            return cerr(format!("s must exceed 1, got {s}"));
        }
        if !(sigma > 1.0 && sigma < s) {
            return cerr(format!("σ must lie in (1, s) = (1, {s}), got {sigma}"));
        }
        let m = op.order();
        if m == 0 {
            return cerr("operator order must be ≥ 1".into());
        }
        let mf = m as f64;
        let eps_bound = mf * (s - sigma) / (2.0 * mf * s - sigma);
        if !(eps > 0.0 && eps < eps_bound) {
            return cerr(format!(
                "ε must lie in (0, m(s−σ)/(2ms−σ)) = (0, {eps_bound:.6}), got {eps}"
            ));
        }
        if !(delta > 0.0) {
            return cerr(format!("δ must be positive, got {delta}"));
        }
        let eta = (mf - eps) / (mf * s);
        debug_assert!(eta > 0.0 && eta < 1.0 && 1.0 / eta > s);
        let n = op.dim();
        if x0.len() != n || xi0.len() != n {
            return cerr(format!("x₀ and ξ₀ must have dimension {n}"));
        }
        let norm = xi0.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return cerr(format!("ξ₀ must be a unit vector, |ξ₀| = {norm}"));
        }
        for (_, c) in op.partial_coeffs() {
            if c.max_var().is_some() || c.uses_rho() {
                return cerr("operator must have constant coefficients".into());
            }
        }
        // sampled symbol zero at ξ₀
        let at_xi0 = principal_symbol(&op, &x0, &xi0)
            .map_err(|e| MetivierError::Constraint(format!("symbol evaluation: {e}")))?
            .norm();
        let mut max_on_sphere: f64 = 0.0;
        let samples = 256;
        for k in 0..samples {
            let xi = unit_direction(n, k, samples);
            let v = principal_symbol(&op, &x0, &xi)
                .map_err(|e| MetivierError::Constraint(format!("symbol evaluation: {e}")))?
                .norm();
            max_on_sphere = max_on_sphere.max(v);
        }
        if at_xi0 >= 1e-10 * max_on_sphere {
            return cerr(format!(
                "P_m(ξ₀) must vanish: |P_m(ξ₀)| = {at_xi0:.3e} vs max {max_on_sphere:.3e}"
            ));
        }
        Self::assemble(s, sigma, eps, delta, x0, xi0, op, eta)
    }

    /// Default bundle: `s = 2, σ = 1.5, ε = 0.1, δ = 0.5, m = 2`,
    /// `P = D₁²` in two variables, `x₀ = 0`, `ξ₀ = (0, 1)`.
    pub fn default_bundle() -> Result<Self, MetivierError> {
        let op = crate::pdo::parse_operator("1*D[2,0]", 2)
            .map_err(|e| MetivierError::Constraint(e.to_string()))?;
        Self::new(2.0, 1.5, 0.1, 0.5, vec![0.0, 0.0], vec![0.0, 1.0], op)
    }

    /// Same bundle with the operator swapped and the symbol-zero gate
    /// skipped — the control configuration for elliptic comparisons. The
    /// substitute must have the same dimension and order.
    pub fn control_with(&self, op: LinearPDO) -> Result<Self, MetivierError> {
        if op.dim() != self.op.dim() || op.order() != self.m {
            return Err(MetivierError::Constraint(
                "control operator must match dimension and order".into(),
            ));
        }
        for (_, c) in op.partial_coeffs() {
            if c.max_var().is_some() || c.uses_rho() {
                return Err(MetivierError::Constraint(
                    "operator must have constant coefficients".into(),
                ));
            }
        }
        Self::assemble(
            self.s,
            self.sigma,
            self.eps,
            self.delta,
            self.x0.clone(),
            self.xi0.clone(),
            op,
            self.eta,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        s: f64,
        sigma: f64,
        eps: f64,
        delta: f64,
        x0: Vec<f64>,
        xi0: Vec<f64>,
        op: LinearPDO,
        eta: f64,
    ) -> Result<Self, MetivierError> {
        let n = op.dim();
        let half_width = 2.0 * delta / (n as f64).sqrt();
        let psi = plateau_profile(sigma, PLATEAU_FRACTION, &Expr::var(0))?;
        Ok(Self { s, sigma, eps, delta, m: op.order(), eta, x0, xi0, op, half_width, psi })
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn summary(&self) -> ParamsSummary {
        let mf = self.m as f64;
        ParamsSummary {
            s: self.s,
            sigma: self.sigma,
            eps: self.eps,
            eps_bound: mf * (self.s - self.sigma) / (2.0 * mf * self.s - self.sigma),
            delta: self.delta,
            m: self.m,
            eta: self.eta,
            x0: self.x0.clone(),
            xi0: self.xi0.clone(),
            operator: crate::pdo::format_operator(&self.op),
            half_width: self.half_width,
        }
    }

    /// ψ evaluated numerically at a scalar argument.
    pub fn psi_at(&self, v: f64) -> f64 {
        self.psi.eval_real_point(&[v]).map(|c| c.re).unwrap_or(0.0)
    }

    /// `⟨x − x₀, ξ₀⟩`, the oscillation phase gradient.
    pub fn phase(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.x0)
            .zip(&self.xi0)
            .map(|((xi, a), xi0)| (xi - a) * xi0)
            .sum()
    }

    /// Hard support cut in ρ at the point `x`: the tensor bump vanishes
    /// once any axis has `ρ^ε |xᵢ − x₀ᵢ| ≥ half_width`; `None` means no
    /// finite cut (x = x₀), `Some(0)` means `u(x) = 0` for all ρ ≥ 1.
    pub fn support_cut(&self, x: &[f64]) -> Option<f64> {
        let rel = x
            .iter()
            .zip(&self.x0)
            .map(|(xi, a)| (xi - a).abs() / self.half_width)
            .fold(0.0f64, f64::max);
        if rel == 0.0 {
            None
        } else if rel >= 1.0 {
            Some(0.0)
        } else {
            Some(rel.powf(-1.0 / self.eps))
        }
    }

    /// The full integrand factor `φ(ρ^ε(x−x₀)) e^{iρ⟨x−x₀,ξ₀⟩}` as an
    /// expression over `x1..xn` and `rho` (the `e^{−ρ^η}` decay factor is
    /// applied at quadrature time).
    pub fn base_integrand(&self) -> Expr {
        let mut factors = Vec::with_capacity(self.dim() + 1);
        for k in 0..self.dim() {
            let v = Expr::Prod(vec![
                Expr::real(1.0 / self.half_width),
                Expr::Pow(Box::new(Expr::Rho), crate::symbolic::Exponent::Real(self.eps)),
                Expr::Sum(vec![Expr::var(k), Expr::real(-self.x0[k])]),
            ]);
            factors.push(self.psi.substitute(crate::symbolic::DiffVar::Var(0), &v));
        }
        let phase = Expr::Sum(
            (0..self.dim())
                .map(|k| {
                    Expr::Prod(vec![
                        Expr::real(self.xi0[k]),
                        Expr::Sum(vec![Expr::var(k), Expr::real(-self.x0[k])]),
                    ])
                })
                .collect(),
        );
        factors.push(Expr::Exp(Box::new(Expr::Prod(vec![
            Expr::imag_unit(),
            Expr::Rho,
            phase,
        ]))));
        crate::symbolic::simplify(&Expr::Prod(factors))
    }
}

fn unit_direction(n: usize, k: usize, total: usize) -> Vec<f64> {
    match n {
        1 => vec![if k % 2 == 0 { 1.0 } else { -1.0 }],
        2 => {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / total as f64;
            vec![theta.cos(), theta.sin()]
        }
        _ => {
            // deterministic pseudo-uniform directions via a golden spiral
            let golden = (1.0 + 5f64.sqrt()) / 2.0;
            let mut v: Vec<f64> = (0..n)
                .map(|axis| {
                    let t = ((k + 1) as f64 * golden.powi(axis as i32 + 1)).fract() - 0.5;
                    t
                })
                .collect();
            let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt().max(1e-9);
            v.iter_mut().for_each(|c| *c /= norm);
            v
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_bundle_validates() {
        let p = MetivierParams::default_bundle().unwrap();
        assert!((p.eta - 0.475).abs() < 1e-15);
        assert!(1.0 / p.eta > p.s);
        assert!((p.summary().eps_bound - 0.15384615384615385).abs() < 1e-15);
    }

    #[test]
    fn epsilon_gate() {
        let op = crate::pdo::parse_operator("1*D[2,0]", 2).unwrap();
        // bound at defaults is 2·0.5/6.5 ≈ 0.1538: ε = 0.2 must fail
        let err = MetivierParams::new(
            2.0,
            1.5,
            0.2,
            0.5,
            vec![0.0, 0.0],
            vec![0.0, 1.0],
            op.clone(),
        )
        .unwrap_err();
        assert!(matches!(err, MetivierError::Constraint(_)), "{err}");
        assert!(err.to_string().contains("0.153846"));
        // non-unit ξ₀ rejected
        let err = MetivierParams::new(
            2.0,
            1.5,
            0.1,
            0.5,
            vec![0.0, 0.0],
            vec![0.0, 1.1],
            op.clone(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("unit"));
        // elliptic operator rejected (no symbol zero at ξ₀)
        let lap = crate::pdo::parse_operator("1*D[2,0] + 1*D[0,2]", 2).unwrap();
        let err =
            MetivierParams::new(2.0, 1.5, 0.1, 0.5, vec![0.0, 0.0], vec![0.0, 1.0], lap)
                .unwrap_err();
        assert!(err.to_string().contains("P_m"));
    }

    #[test]
    fn support_cut_geometry() {
        let p = MetivierParams::default_bundle().unwrap();
        assert!(p.support_cut(&[0.0, 0.0]).is_none());
        // beyond the half-width the integrand vanishes for every ρ ≥ 1
        assert_eq!(p.support_cut(&[p.half_width, 0.0]), Some(0.0));
        let cut = p.support_cut(&[p.half_width / 2.0, 0.0]).unwrap();
        assert!((cut - 2f64.powf(1.0 / p.eps)).abs() < 1e-9);
    }

    #[test]
    fn variable_coefficients_rejected() {
        let op = crate::pdo::parse_operator("x1*D[2,0]", 2).unwrap();
        let err =
            MetivierParams::new(2.0, 1.5, 0.1, 0.5, vec![0.0, 0.0], vec![0.0, 1.0], op)
                .unwrap_err();
        assert!(err.to_string().contains("constant"));
    }
}
