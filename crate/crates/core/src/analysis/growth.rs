//! Roumieu/Beurling growth fitting and the two-sided membership report.
//!
//! A Roumieu bound has the shape `norm_j ≤ c·e^{(1/k)φ*(j·m·k)}`, a
//! Beurling bound `norm_j ≤ c_k·e^{k·φ*(j·m/k)}`. Fits are log-domain by
//! construction, so any returned `(k, c)` satisfies its bound on every
//! input row exactly.
//!
//! Finite-window membership is undecidable; the stability surrogate is:
//! `c_k` is *stable* when recomputing it on the first-half window moves
//! `log c_k` by less than 10% (relative to `max(1, |log c_k|)`). Reports
//! carry an explicit finite-window caveat flag when no ladder `k` is
//! stable.

use super::norms::derivative_table;
use super::{iterate_norms, BoxDomain, QuadratureGrid};
use crate::error::AnalysisError;
use crate::pdo::LinearPDO;
use crate::symbolic::{Expr, MultiIndex};
use crate::weights::YoungConjugate;
use serde::Serialize;

/// Dyadic ladder `2^0 .. 2^6` for the Roumieu quantifier `∃k`; the
/// integer-`k` quantifiers of the class definitions are matched up to
/// equivalence by dyadic values.
pub fn default_ladder() -> Vec<f64> {
    (0..=6).map(|i| 2f64.powi(i)).collect()
}

/// Dyadic ladder `2^0 .. 2^3` for the Beurling quantifier `∀k`. Larger
/// `k` are uninformative on desk-size windows: the gauge `k·φ*(jm/k)`
/// vanishes identically for `jm < k/2`-scale arguments of a normalized
/// weight, so `c_k` degenerates to the largest table entry and the
/// window-stability diagnostic can never hold.
pub fn beurling_ladder() -> Vec<f64> {
    (0..=3).map(|i| 2f64.powi(i)).collect()
}

/// Fit diagnostics for one ladder value.
#[derive(Debug, Clone, Serialize)]
pub struct KFit {
    pub k: f64,
    pub log_c_full: f64,
    pub log_c_half: f64,
    pub stable: bool,
}

/// Result of a Roumieu-side fit.
#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    pub k_star: f64,
    pub c_star: f64,
    pub log_c_star: f64,
    pub per_k: Vec<KFit>,
    /// False when no ladder value passed the stability rule and the
    /// reported pair is the last ladder entry (finite-window caveat).
    pub stable: bool,
    pub all_zero: bool,
}

const STABILITY_REL: f64 = 0.10;

fn fit_at(
    log_norms: &[(usize, f64)],
    conj: &YoungConjugate,
    m: u32,
    bound_exponent: impl Fn(&YoungConjugate, f64, f64) -> Result<f64, AnalysisError>,
    k: f64,
) -> Result<KFit, AnalysisError> {
    let mut full = f64::NEG_INFINITY;
    let mut half = f64::NEG_INFINITY;
    let half_len = log_norms.last().map(|(j, _)| j / 2).unwrap_or(0);
    for &(j, ln_n) in log_norms {
        let e = bound_exponent(conj, (j as f64) * m as f64, k)?;
        let v = ln_n - e;
        full = full.max(v);
        if j <= half_len {
            half = half.max(v);
        }
    }
    let stable = (full - half).abs() < STABILITY_REL * full.abs().max(1.0);
    Ok(KFit { k, log_c_full: full, log_c_half: half, stable })
}

fn roumieu_exponent(conj: &YoungConjugate, jm: f64, k: f64) -> Result<f64, AnalysisError> {
    // (1/k)φ*(jm·k) = λφ*(jm/λ) with λ = 1/k
    Ok(conj.scaled(jm, 1.0 / k)?)
}

fn beurling_exponent(conj: &YoungConjugate, jm: f64, k: f64) -> Result<f64, AnalysisError> {
    Ok(conj.scaled(jm, k)?)
}

/// Roumieu fit: for each ladder `k`, `log c_k = max_j (log norm_j −
/// (1/k)φ*(jmk))`; `k*` is the smallest stable ladder value.
pub fn fit_roumieu(
    norms: &[f64],
    conj: &YoungConjugate,
    m: u32,
    ladder: &[f64],
) -> Result<FitResult, AnalysisError> {
    let log_norms: Vec<(usize, f64)> = norms
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.0)
        .map(|(j, &v)| (j, v.ln()))
        .collect();
    if log_norms.is_empty() {
        return Ok(FitResult {
            k_star: ladder.first().copied().unwrap_or(1.0),
            c_star: 0.0,
            log_c_star: f64::NEG_INFINITY,
            per_k: vec![],
            stable: true,
            all_zero: true,
        });
    }
    let mut per_k = Vec::with_capacity(ladder.len());
    for &k in ladder {
        per_k.push(fit_at(&log_norms, conj, m, roumieu_exponent, k)?);
    }
    let chosen = per_k.iter().find(|f| f.stable).or(per_k.last());
    let chosen = chosen.expect("non-empty ladder");
    Ok(FitResult {
        k_star: chosen.k,
        c_star: chosen.log_c_full.exp(),
        log_c_star: chosen.log_c_full,
        stable: chosen.stable,
        per_k,
        all_zero: false,
    })
}

/// Beurling table `k ↦ c_k` over the ladder with the same stability
/// diagnostic per entry.
pub fn beurling_table(
    norms: &[f64],
    conj: &YoungConjugate,
    m: u32,
    ladder: &[f64],
) -> Result<Vec<KFit>, AnalysisError> {
    let log_norms: Vec<(usize, f64)> = norms
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.0)
        .map(|(j, &v)| (j, v.ln()))
        .collect();
    let mut out = Vec::with_capacity(ladder.len());
    for &k in ladder {
        if log_norms.is_empty() {
            out.push(KFit { k, log_c_full: f64::NEG_INFINITY, log_c_half: f64::NEG_INFINITY, stable: true });
        } else {
            out.push(fit_at(&log_norms, conj, m, beurling_exponent, k)?);
        }
    }
    Ok(out)
}

/// Least-squares slope (with intercept) of `log norm_j` against
/// `(1/k)φ*(jmk)` over the last-half window, the comparison statistic of
/// the membership report. `k = 1` is the fixed reference ladder point so
/// that both sides share one gauge. NaN when fewer than two rows are
/// positive on the window.
pub fn growth_slope(
    norms: &[f64],
    conj: &YoungConjugate,
    m: u32,
    k: f64,
) -> Result<f64, AnalysisError> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let lo = norms.len() / 2;
    for (j, &v) in norms.iter().enumerate().skip(lo) {
        if v > 0.0 {
            xs.push(roumieu_exponent(conj, (j as f64) * m as f64, k)?);
            ys.push(v.ln());
        }
    }
    if xs.len() < 2 {
        return Ok(f64::NAN);
    }
    Ok(crate::weights::ls_slope(&xs, &ys))
}

/// One side of the growth comparison.
#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub side: String,
    pub weight: String,
    pub m: u32,
    pub norms: Vec<f64>,
    pub truncated_at: Option<usize>,
    pub roumieu: FitResult,
    pub beurling: Vec<KFit>,
    pub beurling_all_stable: bool,
    /// Slope of `log norm` against the `k = 1` conjugate gauge on the
    /// last-half window.
    pub slope_k1: f64,
    pub finite_window_caveat: bool,
}

fn build_growth_report(
    side: &str,
    norms: Vec<f64>,
    truncated_at: Option<usize>,
    conj: &YoungConjugate,
    m: u32,
    ladder: &[f64],
) -> Result<GrowthReport, AnalysisError> {
    let roumieu = fit_roumieu(&norms, conj, m, ladder)?;
    let beurling = beurling_table(&norms, conj, m, &beurling_ladder())?;
    let beurling_all_stable = beurling.iter().all(|f| f.stable);
    let slope_k1 = growth_slope(&norms, conj, m, 1.0)?;
    let finite_window_caveat = !roumieu.stable || truncated_at.is_some();
    Ok(GrowthReport {
        side: side.into(),
        weight: conj.weight().label(),
        m,
        norms,
        truncated_at,
        roumieu,
        beurling,
        beurling_all_stable,
        slope_k1,
        finite_window_caveat,
    })
}

/// Derivative-side growth: `q ↦ max_{|α|=q} sup-grid |D^α u|` with the
/// class gauge `e^{(1/k)φ*(qk)}` (order scaling `m = 1`). The sup over
/// the compact box is approximated on a sample grid, 33 points per axis
/// by default.
pub fn derivative_growth(
    u: &Expr,
    domain: &BoxDomain,
    nmax: u32,
    conj: &YoungConjugate,
    ladder: &[f64],
    sup_samples: usize,
) -> Result<GrowthReport, AnalysisError> {
    let dim = domain.dim();
    let table = derivative_table(u, dim, nmax);
    let samples = sup_grid(domain, sup_samples.max(3));
    let mut norms = Vec::with_capacity(nmax as usize + 1);
    for q in 0..=nmax {
        let mut best = 0.0f64;
        for alpha in MultiIndex::with_order(dim, q) {
            let d = &table[&alpha];
            for x in &samples {
                best = best.max(d.eval_real_point(x)?.norm());
            }
        }
        norms.push(best);
    }
    build_growth_report("derivative", norms, None, conj, 1, ladder)
}

fn sup_grid(domain: &BoxDomain, per_axis: usize) -> Vec<Vec<f64>> {
    let dim = domain.dim();
    let mut out = Vec::new();
    let mut idx = vec![0usize; dim];
    loop {
        out.push(
            (0..dim)
                .map(|k| {
                    let (a, b) = domain.bounds()[k];
                    a + (b - a) * idx[k] as f64 / (per_axis - 1) as f64
                })
                .collect(),
        );
        let mut k = 0;
        loop {
            if k == dim {
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

/// Combined two-sided report mirroring the derivative-vs-iterate class
/// comparison.
#[derive(Debug, Clone, Serialize)]
pub struct MembershipReport {
    pub iterate: GrowthReport,
    pub derivative: GrowthReport,
    /// Relative difference of the two `k = 1` slopes.
    pub slope_rel_diff: f64,
    pub slopes_agree_10pct: bool,
}

/// Run both sides for one function and operator.
///
/// The iterate side uses `‖P^j u‖_{L²(K)}` with gauge argument `j·m`, the
/// derivative side sup-norm growth with gauge argument `q`. Requires
/// `order(P) ≥ 1`.
#[allow(clippy::too_many_arguments)]
pub fn membership_report(
    u: &Expr,
    op: &LinearPDO,
    domain: &BoxDomain,
    conj: &YoungConjugate,
    jmax: u32,
    nmax: u32,
    grid: &QuadratureGrid,
    sup_samples: usize,
) -> Result<MembershipReport, AnalysisError> {
    let m = op.order();
    if m == 0 {
        return Err(AnalysisError::Input(
            "membership analysis needs an operator of order m ≥ 1".into(),
        ));
    }
    let ladder = default_ladder();
    let table = iterate_norms(op, u, domain, jmax, grid)?;
    let iterate =
        build_growth_report("iterate", table.values, table.truncated_at, conj, m, &ladder)?;
    let derivative = derivative_growth(u, domain, nmax, conj, &ladder, sup_samples)?;
    let denom = derivative.slope_k1.abs().max(1e-300);
    let slope_rel_diff = (iterate.slope_k1 - derivative.slope_k1).abs() / denom;
    Ok(MembershipReport {
        slopes_agree_10pct: slope_rel_diff < 0.10,
        iterate,
        derivative,
        slope_rel_diff,
    })
}
