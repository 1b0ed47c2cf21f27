//! Weight functions and their catalog.
//!
//! A weight function is a continuous non-decreasing `ω: [0,∞) → [0,∞)`
//! used to gauge derivative growth. Catalog weights are normalized so that
//! `ω ≡ 0` on `[0,1]`; the conjugate machinery relies on that.
//!
//! Catalog entries and their text specs:
//!
//! | spec                    | definition                                             |
//! |-------------------------|--------------------------------------------------------|
//! | `gevrey:s=2`            | `max(0, t^{1/s} − 1)`, `s > 1`                         |
//! | `logpower:s=2`          | `0` on `[0, e^{2s}]`, then `t^{1/s}/log t − e²/(2s)`   |
//! | `sublog:beta=2`         | `max(0, t·log(e+t)^{−β} − c₀)`, `β > 1`                |
//! | `explog:alpha=.5,beta=1`| `max(0, exp(β·log(1+t)^α) − c₀)`, `α ∈ (0,1)`, `β > 0` |
//! | `custom:<path>`         | two-column table `(t, ω(t))`, linearly interpolated    |
//!
//! `c₀` is the raw value at `t = 1`, so every catalog weight vanishes on
//! `[0,1]`. The `logpower` entry starts its live branch at `e^{2s}` where
//! `t^{1/s}/log t` is increasing.

mod assoc;
mod axioms;
mod conjugate;
mod properties;

pub use assoc::{assoc_seq, ln_factorial, AssocSeqValue};
pub use axioms::{check_axioms, ls_slope, AxiomReport, BetaVerdict, SampleSpec};
pub use conjugate::{gevrey_conjugate_closed_form, YoungConjugate};
pub use properties::{bound_shift, check_prop21, check_scaling_inequality, BoundShift, Prop21Report, Violation};

use crate::error::WeightError;
use std::sync::Arc;

/// Interpolation table for a custom weight.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    /// Strictly increasing abscissae.
    pub t: Vec<f64>,
    /// Weight values at the abscissae.
    pub omega: Vec<f64>,
}

impl WeightTable {
    pub fn new(t: Vec<f64>, omega: Vec<f64>) -> Result<Self, WeightError> {
        if t.len() != omega.len() || t.len() < 2 {
            return Err(WeightError::Table(
                "need at least two (t, ω) rows of equal length".into(),
            ));
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(WeightError::Table("t column must be strictly increasing".into()));
        }
        if t[0] < 0.0 || omega.iter().any(|v| !v.is_finite()) {
            return Err(WeightError::Table("t ≥ 0 and finite ω required".into()));
        }
        Ok(Self { t, omega })
    }

    /// Linear interpolation, linear extrapolation on the last segment.
    fn eval(&self, t: f64) -> f64 {
        let n = self.t.len();
        if t <= self.t[0] {
            return self.omega[0];
        }
        if t >= self.t[n - 1] {
            let slope = (self.omega[n - 1] - self.omega[n - 2]) / (self.t[n - 1] - self.t[n - 2]);
            return self.omega[n - 1] + slope * (t - self.t[n - 1]);
        }
        let i = match self.t.binary_search_by(|probe| probe.total_cmp(&t)) {
            Ok(i) => return self.omega[i],
            Err(i) => i,
        };
        let (t0, t1) = (self.t[i - 1], self.t[i]);
        let (w0, w1) = (self.omega[i - 1], self.omega[i]);
        w0 + (w1 - w0) * (t - t0) / (t1 - t0)
    }
}

/// Which catalog family (or custom table) a [`Weight`] uses.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightKind {
    Gevrey { s: f64 },
    LogPower { s: f64 },
    SubLog { beta: f64 },
    ExpLog { alpha: f64, beta: f64 },
    Custom { table: Arc<WeightTable>, normalized: bool },
}

/// A weight function with validated parameters.
///
/// Catalog weights are normalized by construction (they vanish on `[0,1]`);
/// custom tables are used as-is unless `normalized` was requested, in which
/// case `max(0, ω(t) − ω(1))` is applied.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    kind: WeightKind,
}

impl Weight {
    pub fn gevrey(s: f64) -> Result<Self, WeightError> {
        if !(s > 1.0) || !s.is_finite() {
            return Err(WeightError::Parameter(format!("gevrey needs s > 1, got {s}")));
        }
        Ok(Self { kind: WeightKind::Gevrey { s } })
    }

    pub fn log_power(s: f64) -> Result<Self, WeightError> {
        if !(s > 1.0) || !s.is_finite() {
            return Err(WeightError::Parameter(format!("logpower needs s > 1, got {s}")));
        }
        Ok(Self { kind: WeightKind::LogPower { s } })
    }

    pub fn sub_log(beta: f64) -> Result<Self, WeightError> {
        if !(beta > 1.0) || !beta.is_finite() {
            return Err(WeightError::Parameter(format!("sublog needs β > 1, got {beta}")));
        }
        Ok(Self { kind: WeightKind::SubLog { beta } })
    }

    pub fn exp_log(alpha: f64, beta: f64) -> Result<Self, WeightError> {
        if !(alpha > 0.0 && alpha < 1.0 && beta > 0.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(WeightError::Parameter(format!(
                "explog needs α ∈ (0,1), β > 0, got α={alpha}, β={beta}"
            )));
        }
        Ok(Self { kind: WeightKind::ExpLog { alpha, beta } })
    }

    pub fn custom(table: WeightTable, normalized: bool) -> Self {
        Self { kind: WeightKind::Custom { table: Arc::new(table), normalized } }
    }

    /// The four catalog weights at default parameters.
    pub fn catalog_defaults() -> Vec<Self> {
        vec![
            Self::gevrey(2.0).unwrap(),
            Self::log_power(2.0).unwrap(),
            Self::sub_log(2.0).unwrap(),
            Self::exp_log(0.5, 1.0).unwrap(),
        ]
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    /// Whether the weight vanishes on `[0,1]` by construction.
    pub fn is_normalized(&self) -> bool {
        match &self.kind {
            WeightKind::Custom { normalized, .. } => *normalized,
            _ => true,
        }
    }

    /// Evaluate `ω(t)` for `t ≥ 0`.
    pub fn eval(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0, "weights are defined on [0, ∞)");
        match &self.kind {
            WeightKind::Gevrey { s } => (t.powf(1.0 / s) - 1.0).max(0.0),
            WeightKind::LogPower { s } => {
                let t0 = (2.0 * s).exp();
                if t <= t0 {
                    0.0
                } else {
                    t.powf(1.0 / s) / t.ln() - std::f64::consts::E.powi(2) / (2.0 * s)
                }
            }
            WeightKind::SubLog { beta } => {
                let raw = |u: f64| u * (std::f64::consts::E + u).ln().powf(-beta);
                (raw(t) - raw(1.0)).max(0.0)
            }
            WeightKind::ExpLog { alpha, beta } => {
                let raw = |u: f64| (beta * (1.0 + u).ln().powf(*alpha)).exp();
                (raw(t) - raw(1.0)).max(0.0)
            }
            WeightKind::Custom { table, normalized } => {
                let v = table.eval(t);
                if *normalized {
                    (v - table.eval(1.0)).max(0.0)
                } else {
                    v
                }
            }
        }
    }

    /// `φ(u) = ω(e^u)`, the convex gauge whose Young conjugate drives
    /// everything. Saturates instead of overflowing for `u` beyond `exp`
    /// range; callers never reach that regime because the conjugate
    /// bracket caps expansion first.
    pub fn phi(&self, u: f64) -> f64 {
        if u > 700.0 {
            return f64::INFINITY;
        }
        self.eval(u.exp())
    }

    /// A conjugate evaluator for this weight with the default tolerance.
    pub fn conjugate(&self) -> YoungConjugate {
        YoungConjugate::new(self.clone(), 1e-12)
    }

    /// Parse the weight spec text format (`gevrey:s=2`, `logpower:s=2`,
    /// `sublog:beta=2`, `explog:alpha=0.5,beta=1`, `custom:<path>`).
    pub fn parse(spec: &str) -> Result<Self, WeightError> {
        let err = |reason: &str| WeightError::Spec { spec: spec.into(), reason: reason.into() };
        let (head, rest) = spec.split_once(':').ok_or_else(|| err("expected `kind:params`"))?;
        let params = |rest: &str| -> Result<Vec<(String, f64)>, WeightError> {
            rest.split(',')
                .map(|kv| {
                    let (k, v) = kv.split_once('=').ok_or_else(|| err("expected `key=value`"))?;
                    let v: f64 =
                        v.trim().parse().map_err(|_| err(&format!("bad number `{v}`")))?;
                    Ok((k.trim().to_string(), v))
                })
                .collect()
        };
        let get = |ps: &[(String, f64)], key: &str| -> Result<f64, WeightError> {
            ps.iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| *v)
                .ok_or_else(|| err(&format!("missing parameter `{key}`")))
        };
        match head.trim() {
            "gevrey" => {
                let ps = params(rest)?;
                Self::gevrey(get(&ps, "s")?)
            }
            "logpower" => {
                let ps = params(rest)?;
                Self::log_power(get(&ps, "s")?)
            }
            "sublog" => {
                let ps = params(rest)?;
                Self::sub_log(get(&ps, "beta")?)
            }
            "explog" => {
                let ps = params(rest)?;
                Self::exp_log(get(&ps, "alpha")?, get(&ps, "beta")?)
            }
            "custom" => {
                let text = std::fs::read_to_string(rest.trim())
                    .map_err(|e| WeightError::Table(format!("read `{}`: {e}", rest.trim())))?;
                let table = parse_table(&text)?;
                Ok(Self::custom(table, false))
            }
            other => Err(err(&format!("unknown weight kind `{other}`"))),
        }
    }

    /// Round-trippable spec string.
    pub fn label(&self) -> String {
        match &self.kind {
            WeightKind::Gevrey { s } => format!("gevrey:s={s}"),
            WeightKind::LogPower { s } => format!("logpower:s={s}"),
            WeightKind::SubLog { beta } => format!("sublog:beta={beta}"),
            WeightKind::ExpLog { alpha, beta } => format!("explog:alpha={alpha},beta={beta}"),
            WeightKind::Custom { .. } => "custom:<table>".into(),
        }
    }
}

/// Parse a two-column whitespace-separated `(t, ω)` table; `#` comments.
pub fn parse_table(text: &str) -> Result<WeightTable, WeightError> {
    let mut ts = Vec::new();
    let mut ws = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split_whitespace();
        let parse = |s: Option<&str>| -> Result<f64, WeightError> {
            s.and_then(|s| s.parse().ok())
                .ok_or_else(|| WeightError::Table(format!("line {}: need two numbers", lineno + 1)))
        };
        ts.push(parse(cols.next())?);
        ws.push(parse(cols.next())?);
    }
    WeightTable::new(ts, ws)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gevrey_normalized_values() {
        let w = Weight::gevrey(2.0).unwrap();
        assert_eq!(w.eval(1.0), 0.0);
        assert_eq!(w.eval(0.0), 0.0);
        assert!((w.eval(16.0) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(Weight::gevrey(1.0).is_err());
        assert!(Weight::gevrey(0.5).is_err());
        assert!(Weight::sub_log(1.0).is_err());
        assert!(Weight::exp_log(1.0, 1.0).is_err());
        assert!(Weight::exp_log(0.5, 0.0).is_err());
    }

    #[test]
    fn catalog_vanishes_on_unit_interval() {
        for w in Weight::catalog_defaults() {
            for &t in &[0.0, 0.3, 0.7, 1.0] {
                assert_eq!(w.eval(t), 0.0, "{} at t={t}", w.label());
            }
            assert!(w.eval(1e6) > 0.0, "{} should grow", w.label());
        }
    }

    #[test]
    fn logpower_live_branch_is_continuous_and_monotone() {
        let w = Weight::log_power(2.0).unwrap();
        let t0 = (4.0f64).exp();
        assert!(w.eval(t0 * 0.999).abs() < 1e-12);
        assert!(w.eval(t0 * 1.001) < 1e-3);
        let mut prev = 0.0;
        let mut t = 1.0;
        while t < 1e8 {
            let v = w.eval(t);
            assert!(v >= prev - 1e-12, "monotone at t={t}");
            prev = v;
            t *= 1.1;
        }
    }

    #[test]
    fn spec_round_trip() {
        for spec in ["gevrey:s=2", "logpower:s=2", "sublog:beta=2", "explog:alpha=0.5,beta=1"] {
            let w = Weight::parse(spec).unwrap();
            assert_eq!(w.label(), spec);
        }
        assert!(Weight::parse("gevrey:s=0.5").is_err());
        assert!(Weight::parse("nosuch:s=2").is_err());
    }

    #[test]
    fn custom_table_interpolates() {
        let table = parse_table("0 0\n1 1\n10 10\n").unwrap();
        let w = Weight::custom(table, false);
        assert!((w.eval(5.0) - 5.0).abs() < 1e-14);
        assert!((w.eval(20.0) - 20.0).abs() < 1e-12); // linear extrapolation
    }
}
