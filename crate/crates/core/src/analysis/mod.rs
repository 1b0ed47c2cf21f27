//! Norms, seminorms and growth-class analysis.
//!
//! The domains are axis-aligned boxes; `G_δ` (the points at distance more
//! than `δ` from the boundary) is again a box shrunk by `δ` per face,
//! which keeps all quadrature exact-to-geometry. L² integrals use
//! composite Simpson with odd node counts per axis.

mod growth;
mod norms;
mod recursion;

pub use growth::{
    beurling_ladder, beurling_table, default_ladder, derivative_growth, fit_roumieu, growth_slope,
    membership_report, FitResult, GrowthReport, KFit, MembershipReport,
};
pub use norms::{iterate_norms, l2_norm, nabla_norm, npm_seminorm, NormTable};
pub use recursion::{empirical_recursion_constant, RecursionRow};

use crate::error::AnalysisError;
use serde::Serialize;

/// An axis-aligned box `Π [aᵢ, bᵢ]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxDomain {
    bounds: Vec<(f64, f64)>,
}

impl BoxDomain {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self, AnalysisError> {
        if bounds.is_empty() || bounds.iter().any(|(a, b)| !(a < b)) {
            return Err(AnalysisError::Input("box needs non-empty intervals a < b".into()));
        }
        Ok(Self { bounds })
    }

    /// Parse `a1,b1,a2,b2,...`.
    pub fn parse(text: &str) -> Result<Self, AnalysisError> {
        let nums: Result<Vec<f64>, _> =
            text.split(',').map(|s| s.trim().parse::<f64>()).collect();
        let nums = nums.map_err(|_| AnalysisError::Input(format!("bad box `{text}`")))?;
        if nums.len() % 2 != 0 {
            return Err(AnalysisError::Input("box needs an even number of values".into()));
        }
        Self::new(nums.chunks(2).map(|c| (c[0], c[1])).collect())
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn volume(&self) -> f64 {
        self.bounds.iter().map(|(a, b)| b - a).product()
    }

    pub fn min_side(&self) -> f64 {
        self.bounds.iter().map(|(a, b)| b - a).fold(f64::INFINITY, f64::min)
    }

    /// `G_δ = {x : dist(x, ∂G) > δ}`: the box shrunk by `δ` per face, or
    /// `None` when `2δ` meets the smallest side.
    pub fn shrink(&self, delta: f64) -> Option<BoxDomain> {
        if delta <= 0.0 {
            return Some(self.clone());
        }
        if 2.0 * delta >= self.min_side() {
            return None;
        }
        Some(BoxDomain {
            bounds: self.bounds.iter().map(|(a, b)| (a + delta, b - delta)).collect(),
        })
    }
}

/// Composite-Simpson tensor grid: odd node count per axis.
#[derive(Debug, Clone, Serialize)]
pub struct QuadratureGrid {
    nodes_per_axis: Vec<usize>,
}

impl QuadratureGrid {
    pub fn new(nodes_per_axis: Vec<usize>) -> Result<Self, AnalysisError> {
        if nodes_per_axis.iter().any(|&n| n < 3 || n % 2 == 0) {
            return Err(AnalysisError::Input(
                "Simpson grids need an odd node count ≥ 3 per axis".into(),
            ));
        }
        Ok(Self { nodes_per_axis })
    }

    pub fn uniform(dim: usize, nodes: usize) -> Result<Self, AnalysisError> {
        Self::new(vec![nodes; dim])
    }

    pub fn nodes_per_axis(&self) -> &[usize] {
        &self.nodes_per_axis
    }

    /// Double every axis's interval count (`n → 2n − 1`).
    pub fn refine(&self) -> Self {
        Self { nodes_per_axis: self.nodes_per_axis.iter().map(|n| 2 * n - 1).collect() }
    }

    /// Integrate a scalar function over a box.
    pub fn integrate<F>(&self, domain: &BoxDomain, mut f: F) -> Result<f64, AnalysisError>
    where
        F: FnMut(&[f64]) -> Result<f64, AnalysisError>,
    {
        let dim = domain.dim();
        if self.nodes_per_axis.len() != dim {
            return Err(AnalysisError::Input(format!(
                "grid dimension {} vs box dimension {dim}",
                self.nodes_per_axis.len()
            )));
        }
        let mut axis_nodes = Vec::with_capacity(dim);
        let mut axis_weights = Vec::with_capacity(dim);
        for (k, &n) in self.nodes_per_axis.iter().enumerate() {
            let (a, b) = domain.bounds[k];
            let h = (b - a) / (n - 1) as f64;
            let nodes: Vec<f64> = (0..n).map(|i| a + h * i as f64).collect();
            let weights: Vec<f64> = (0..n)
                .map(|i| {
                    let c = if i == 0 || i == n - 1 {
                        1.0
                    } else if i % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    c * h / 3.0
                })
                .collect();
            axis_nodes.push(nodes);
            axis_weights.push(weights);
        }
        let mut idx = vec![0usize; dim];
        let mut x = vec![0.0f64; dim];
        let mut acc = 0.0;
        loop {
            let mut w = 1.0;
            for k in 0..dim {
                x[k] = axis_nodes[k][idx[k]];
                w *= axis_weights[k][idx[k]];
            }
            acc += w * f(&x)?;
            // odometer
            let mut k = 0;
            loop {
                if k == dim {
                    return Ok(acc);
                }
                idx[k] += 1;
                if idx[k] < self.nodes_per_axis[k] {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }
}

/// Geometric `δ` grid in `(0, 1]` for the shrinking-domain seminorms.
#[derive(Debug, Clone, Serialize)]
pub struct DeltaGrid(Vec<f64>);

impl DeltaGrid {
    /// `count` geometric points from `min` up to 1.
    pub fn geometric(min: f64, count: usize) -> Result<Self, AnalysisError> {
        if !(min > 0.0 && min < 1.0) || count < 2 {
            return Err(AnalysisError::Input("δ grid needs 0 < min < 1, count ≥ 2".into()));
        }
        let l0 = min.ln();
        Ok(Self(
            (0..count).map(|i| (l0 - l0 * i as f64 / (count - 1) as f64).exp()).collect(),
        ))
    }

    /// Default: 32 geometric points in `[1e−3, 1]`.
    pub fn default_grid() -> Self {
        Self::geometric(1e-3, 32).unwrap()
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }

    /// Insert log-midpoints: the refined grid is a superset, so seminorm
    /// maxima never decrease under refinement.
    pub fn refine(&self) -> Self {
        let mut out = Vec::with_capacity(self.0.len() * 2 - 1);
        for i in 0..self.0.len() {
            out.push(self.0[i]);
            if i + 1 < self.0.len() {
                out.push((self.0[i].ln() * 0.5 + self.0[i + 1].ln() * 0.5).exp());
            }
        }
        out.sort_by(f64::total_cmp);
        Self(out)
    }
}
