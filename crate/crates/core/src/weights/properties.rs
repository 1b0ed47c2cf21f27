//! The inequality suite of the associated sequence `a_{j,λ}`, all in log
//! domain, plus the `ρ^j`-absorption shift bound.

use super::{ln_factorial, YoungConjugate};
use crate::error::ConjugateError;
use serde::Serialize;

/// One violated inequality instance.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    /// Property tag: "1", "1w", "2", "3", "4", "6", "7", "8", "015", "bjo".
    pub property: String,
    pub j: u32,
    pub h: u32,
    pub r: u32,
    pub lambda: f64,
    /// `lhs − rhs` in log domain (positive = violated).
    pub excess: f64,
}

/// Outcome of [`check_prop21`].
#[derive(Debug, Clone, Serialize)]
pub struct Prop21Report {
    pub weight: String,
    pub jmax: u32,
    pub ladder: Vec<f64>,
    pub slack: f64,
    pub checks_run: u64,
    pub violations: Vec<Violation>,
    /// Set when any violation was found; per the inequality ledger the
    /// weight is flagged rather than the inequality adjusted.
    pub flagged: bool,
}

impl Prop21Report {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

const MAX_RECORDED: usize = 2048;

/// Check properties (1), (1w), (2), (3), (4), (6), (7), (8) of the
/// associated sequence for all `j, h, r ≤ jmax` and every ladder `λ`.
///
/// `slack` is the multiplicative tolerance `1 + slack` applied to the
/// dominating side (log-additive `ln(1+slack)`), absorbing clamping edge
/// effects. Property (1w) is the binomially weakened form of (1),
/// `a_j·a_h ≤ a_{j+h}·C(j+h, j)`, checked at zero slack — it follows from
/// convexity alone and must never fail.
pub fn check_prop21(
    conj: &YoungConjugate,
    jmax: u32,
    ladder: &[f64],
    slack: f64,
) -> Result<Prop21Report, ConjugateError> {
    let eps = slack.ln_1p();
    let nmax = (2 * jmax + 2) as usize;
    let lf: Vec<f64> = (0..=nmax as u32).map(ln_factorial).collect();

    let mut violations: Vec<Violation> = Vec::new();
    let mut checks: u64 = 0;
    let mut record = |property: &str, j: u32, h: u32, r: u32, lambda: f64, excess: f64| {
        if violations.len() < MAX_RECORDED {
            violations.push(Violation { property: property.into(), j, h, r, lambda, excess });
        }
    };

    // A[λ][n] = λ φ*(n/λ); the half-ladder values appear in (4) and (7).
    let mut a_full: Vec<Vec<f64>> = Vec::with_capacity(ladder.len());
    let mut a_half: Vec<Vec<f64>> = Vec::with_capacity(ladder.len());
    for &lam in ladder {
        let mut full = Vec::with_capacity(nmax + 1);
        let mut half = Vec::with_capacity(nmax + 1);
        for n in 0..=nmax {
            full.push(conj.scaled(n as f64, lam)?);
            half.push(conj.scaled(n as f64, lam / 2.0)?);
        }
        a_full.push(full);
        a_half.push(half);
    }

    for (li, &lam) in ladder.iter().enumerate() {
        let a = &a_full[li];
        let ah = &a_half[li];
        let jm = jmax as usize;

        for j in 0..=jm {
            for h in 0..=jm {
                // (1): a_j a_h ≤ a_{j+h}
                let lhs = a[j] - lf[j] + a[h] - lf[h];
                let rhs = a[j + h] - lf[j + h];
                checks += 1;
                if lhs > rhs + eps {
                    record("1", j as u32, h as u32, 0, lam, lhs - rhs);
                }
                // (1w): weakened by the binomial, zero slack
                let rhs_w = a[j + h] - lf[j + h] + (lf[j + h] - lf[j] - lf[h]);
                checks += 1;
                if lhs > rhs_w + 1e-11 * (1.0 + rhs_w.abs()) {
                    record("1w", j as u32, h as u32, 0, lam, lhs - rhs_w);
                }
                // (4): a_{j+h,λ} ≤ a_{j,λ/2} a_{h,λ/2}
                let lhs4 = a[j + h] - lf[j + h];
                let rhs4 = ah[j] - lf[j] + ah[h] - lf[h];
                checks += 1;
                if lhs4 > rhs4 + eps {
                    record("4", j as u32, h as u32, 0, lam, lhs4 - rhs4);
                }
            }
            // (2): a_j ≤ a_{j+1}
            let lhs = a[j] - lf[j];
            let rhs = a[j + 1] - lf[j + 1];
            checks += 1;
            if lhs > rhs + eps {
                record("2", j as u32, 0, 0, lam, lhs - rhs);
            }
        }

        // (6): (j!/h!) a_{j−h} ≤ e^{λφ*((j+r)/λ)} / e^{λφ*((h+r)/λ)}, h ≤ j
        for j in 0..=jm {
            for h in 0..=j {
                let base = lf[j] - lf[h] + a[j - h] - lf[j - h];
                for r in 0..=jm {
                    checks += 1;
                    let rhs = a[j + r] - a[h + r];
                    if base > rhs + eps {
                        record("6", j as u32, h as u32, r as u32, lam, base - rhs);
                    }
                }
            }
        }

        // (7): e^{λφ*(j/λ)} e^{λφ*((r+h)/λ)} ≤ e^{(λ/2)φ*((j+h)/(λ/2))} e^{(λ/2)φ*(r/(λ/2))}
        for j in 0..=jm {
            for h in 0..=jm {
                for r in 0..=jm {
                    checks += 1;
                    let lhs = a[j] + a[r + h];
                    let rhs = ah[j + h] + ah[r];
                    if lhs > rhs + eps {
                        record("7", j as u32, h as u32, r as u32, lam, lhs - rhs);
                    }
                }
            }
        }

        // (8): the ratio e^{λφ*((q+1)/λ)−λφ*(q/λ)} is non-decreasing in q
        for q in 0..jm {
            let dq = a[q + 1] - a[q];
            for r in 0..=q {
                checks += 1;
                let dr = a[r + 1] - a[r];
                if dq < dr - eps {
                    record("8", q as u32, 0, r as u32, lam, dr - dq);
                }
            }
        }
    }

    // (3): λ ↦ a_{j,λ} non-increasing across the ladder
    for j in 0..=jmax as usize {
        for li in 1..ladder.len() {
            checks += 1;
            let smaller = a_full[li - 1][j];
            let larger = a_full[li][j];
            if larger > smaller + eps {
                record("3", j as u32, 0, 0, ladder[li], larger - smaller);
            }
        }
    }

    let flagged = !violations.is_empty();
    Ok(Prop21Report {
        weight: conj.weight().label(),
        jmax,
        ladder: ladder.to_vec(),
        slack,
        checks_run: checks,
        violations,
        flagged,
    })
}

/// Check Eq.-(015)-style iterated-doubling bounds:
/// `λLⁿφ*(y/(λLⁿ)) + ny ≤ λφ*(y/λ) + λ·Σ_{h=1}^n Lʰ`
/// for `y` on an integer grid and `n ∈ {1, 2, 3}`.
pub fn check_scaling_inequality(
    conj: &YoungConjugate,
    ymax: u32,
    ladder: &[f64],
    big_l: f64,
    slack: f64,
) -> Result<Vec<Violation>, ConjugateError> {
    let mut out = Vec::new();
    for &lam in ladder {
        for n in 1..=3u32 {
            let ln_pow = big_l.powi(n as i32);
            let geom: f64 = (1..=n).map(|h| big_l.powi(h as i32)).sum();
            for y in 0..=ymax {
                let yv = y as f64;
                let lhs = conj.scaled(yv, lam * ln_pow)? + (n as f64) * yv;
                let rhs = conj.scaled(yv, lam)? + lam * geom;
                if lhs > rhs + slack * (1.0 + rhs.abs()) {
                    out.push(Violation {
                        property: "015".into(),
                        j: y,
                        h: n,
                        r: 0,
                        lambda: lam,
                        excess: lhs - rhs,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Result of the `ρ^j` absorption bound
/// `ρ^j e^{λφ*(j/λ)} ≤ D e^{λ′φ*(j/λ′)}`.
#[derive(Debug, Clone, Serialize)]
pub struct BoundShift {
    pub rho: f64,
    pub lambda: f64,
    pub big_l: f64,
    /// `n_ρ = ⌊log ρ + 1⌋` (clamped at 0 for ρ < 1/e).
    pub n_rho: u32,
    /// `λ′ = λ / L^{n_ρ}`.
    pub lambda_prime: f64,
    /// `log D = λ·n_ρ`.
    pub log_d: f64,
    pub verified: bool,
    /// First violating `j` and its log-domain excess, if any.
    pub witness: Option<(u32, f64)>,
}

/// Verify the shift bound for all `j ≤ jmax` in log domain.
///
/// `big_l` must satisfy `ω(et) ≤ L(1+ω(t))` for the weight; increasing
/// subadditive weights admit `L = 3`.
pub fn bound_shift(
    conj: &YoungConjugate,
    rho: f64,
    lambda: f64,
    big_l: f64,
    jmax: u32,
    slack: f64,
) -> Result<BoundShift, ConjugateError> {
    debug_assert!(rho > 0.0 && lambda > 0.0 && big_l > 1.0);
    let n_rho = (rho.ln() + 1.0).floor().max(0.0) as u32;
    let lambda_prime = lambda / big_l.powi(n_rho as i32);
    let log_d = lambda * n_rho as f64;
    let mut witness = None;
    for j in 0..=jmax {
        let lhs = j as f64 * rho.ln() + conj.scaled(j as f64, lambda)?;
        let rhs = log_d + conj.scaled(j as f64, lambda_prime)?;
        if lhs > rhs + slack * (1.0 + rhs.abs()) {
            witness = Some((j, lhs - rhs));
            break;
        }
    }
    Ok(BoundShift {
        rho,
        lambda,
        big_l,
        n_rho,
        lambda_prime,
        log_d,
        verified: witness.is_none(),
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{assoc_seq, Weight};

    #[test]
    fn unit_ladder_is_clean_for_catalog() {
        // λ ≤ 1 is the regime the growth-class machinery uses (λ = 1/k).
        for w in Weight::catalog_defaults() {
            let conj = w.conjugate();
            let rep = check_prop21(&conj, 24, &[0.25, 0.5, 1.0], 1e-9).unwrap();
            assert!(rep.ok(), "{}: {:?}", w.label(), rep.violations.first());
        }
    }

    #[test]
    fn gevrey_property1_example_at_lambda_one() {
        let conj = Weight::gevrey(2.0).unwrap().conjugate();
        let a1 = assoc_seq(&conj, 1, 1.0).unwrap();
        let a2 = assoc_seq(&conj, 2, 1.0).unwrap();
        // a₁² = 16/e² ≈ 2.1654 ≤ a₂ = 128/e³ ≈ 6.3727
        assert!((a1.value().powi(2) - 2.1653645317858032).abs() < 1e-7);
        assert!((a2.value() - 6.372744751086586).abs() < 1e-7);
        assert!(2.0 * a1.log_value <= a2.log_value);
    }

    #[test]
    fn property2_at_zero_is_trivial() {
        for w in Weight::catalog_defaults() {
            let conj = w.conjugate();
            for &lam in &[0.25, 1.0, 4.0] {
                let a0 = assoc_seq(&conj, 0, lam).unwrap();
                let a1 = assoc_seq(&conj, 1, lam).unwrap();
                assert!(a1.log_value >= a0.log_value - 1e-12, "{} λ={lam}", w.label());
            }
        }
    }

    #[test]
    fn above_unit_ladder_violations_are_confined_to_1_2_6() {
        // The normalized Gevrey weight has φ*(1/2) = 0, which forces
        // a_{2,4} = 1/2 < 1 = a_{1,4}: properties (1), (2), (6) genuinely
        // fail for λ > 1 while (1w), (3), (4), (7), (8) hold at every λ.
        let conj = Weight::gevrey(2.0).unwrap().conjugate();
        let rep = check_prop21(&conj, 24, &[0.25, 0.5, 1.0, 2.0, 4.0], 1e-9).unwrap();
        assert!(rep.flagged);
        for v in &rep.violations {
            assert!(
                matches!(v.property.as_str(), "1" | "2" | "6"),
                "unexpected violation {v:?}"
            );
            assert!(v.lambda > 1.0, "violation at λ={} ≤ 1: {v:?}", v.lambda);
        }
    }

    #[test]
    fn scaling_inequality_holds_with_l3() {
        for w in Weight::catalog_defaults() {
            let conj = w.conjugate();
            let v =
                check_scaling_inequality(&conj, 60, &[0.25, 0.5, 1.0, 2.0, 4.0], 3.0, 1e-9)
                    .unwrap();
            assert!(v.is_empty(), "{}: {:?}", w.label(), v.first());
        }
    }

    #[test]
    fn shift_bound_formula_and_verification() {
        let conj = Weight::gevrey(2.0).unwrap().conjugate();
        // ρ=1: n=⌊1⌋=1, λ′=λ/3, D=e^λ; ρ^j = 1 so the bound is immediate.
        let b = bound_shift(&conj, 1.0, 3.0, 3.0, 60, 1e-9).unwrap();
        assert_eq!(b.n_rho, 1);
        assert!((b.lambda_prime - 1.0).abs() < 1e-15);
        assert!((b.log_d - 3.0).abs() < 1e-15);
        assert!(b.verified);
        // ρ=2: n=⌊ln2+1⌋=1, λ′=1/3, D=e
        let b = bound_shift(&conj, 2.0, 1.0, 3.0, 60, 1e-9).unwrap();
        assert_eq!(b.n_rho, 1);
        assert!((b.lambda_prime - 1.0 / 3.0).abs() < 1e-15);
        assert!((b.log_d - 1.0).abs() < 1e-15);
        assert!(b.verified);
        // ρ=10: n=⌊ln10+1⌋=3
        let b = bound_shift(&conj, 10.0, 1.0, 3.0, 60, 1e-9).unwrap();
        assert_eq!(b.n_rho, 3);
        assert!(b.verified, "witness {:?}", b.witness);
    }
}
