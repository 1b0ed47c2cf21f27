//! The associated sequence `a_{j,λ} = e^{λφ*(j/λ)}/j!`, kept in log domain.

use super::YoungConjugate;
use crate::error::ConjugateError;

/// One value of the associated sequence, stored in log domain so that no
/// factorial or exponential is ever formed linearly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssocSeqValue {
    pub j: u32,
    pub lambda: f64,
    /// `log a_{j,λ} = λφ*(j/λ) − log j!`
    pub log_value: f64,
}

impl AssocSeqValue {
    /// Linear-domain value; may overflow to ∞ for large `j`, which is why
    /// all property checks use `log_value`.
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }
}

/// `log j!`, exact for `j = 0, 1`.
pub fn ln_factorial(j: u32) -> f64 {
    if j <= 1 {
        0.0
    } else {
        statrs::function::gamma::ln_gamma(j as f64 + 1.0)
    }
}

/// Compute `a_{j,λ}` in log domain. `a_{0,λ} = 1` exactly.
pub fn assoc_seq(
    conj: &YoungConjugate,
    j: u32,
    lambda: f64,
) -> Result<AssocSeqValue, ConjugateError> {
    debug_assert!(lambda > 0.0);
    let log_value = conj.scaled(j as f64, lambda)? - ln_factorial(j);
    Ok(AssocSeqValue { j, lambda, log_value })
}
