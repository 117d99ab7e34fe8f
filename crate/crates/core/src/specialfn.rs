//! Mittag-Leffler `E_α` and Kilbas–Saigo `E_(α,m,l)` by direct summation.
//!
//! These close the single-term equations in closed form and serve as
//! independent checks on the recurrence. Summation stops after `n_terms`
//! terms, or earlier once a term drops below `1e-16·|sum|` while the terms
//! are decreasing. There is no asymptotic expansion, so arguments should
//! stay moderate.

use crate::gamma::{self, GammaError, GammaSign};

const STOP_RATIO: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KilbasSaigoParams {
    pub alpha: f64,
    pub m: f64,
    pub l: f64,
}

fn accumulate(
    z: f64,
    n_terms: usize,
    mut coeff: impl FnMut(usize) -> Result<f64, GammaError>,
) -> Result<f64, GammaError> {
    if z == 0.0 || n_terms == 0 {
        return Ok(1.0);
    }
    let mut sum = 1.0;
    let mut comp = 0.0;
    let mut power = 1.0;
    let mut previous = 1.0f64;
    for k in 1..n_terms {
        power *= z;
        let term = coeff(k)? * power;
        let next = sum + term;
        comp += if sum.abs() >= term.abs() {
            (sum - next) + term
        } else {
            (term - next) + sum
        };
        sum = next;
        if term.abs() < STOP_RATIO * (sum + comp).abs() && term.abs() <= previous.abs() {
            break;
        }
        previous = term;
    }
    Ok(sum + comp)
}

/// `Σ_(n<n_terms) zⁿ / Γ(1 + αn)`.
pub fn mittag_leffler(alpha: f64, z: f64, n_terms: usize) -> Result<f64, GammaError> {
    accumulate(z, n_terms, |k| {
        let lg = gamma::signed_log_gamma(1.0 + alpha * k as f64)?;
        Ok(match lg.sign {
            GammaSign::Positive => (-lg.log_abs).exp(),
            GammaSign::Negative => -(-lg.log_abs).exp(),
            GammaSign::Pole => 0.0,
        })
    })
}

/// `Σ c_k z^k` with `c₀ = 1` and
/// `c_k = Π_(j<k) Γ(α(jm+l)+1) / Γ(α(jm+l+1)+1)`.
pub fn kilbas_saigo(params: KilbasSaigoParams, z: f64, n_terms: usize) -> Result<f64, GammaError> {
    let KilbasSaigoParams { alpha, m, l } = params;
    let mut c = 1.0;
    let mut built = 0usize;
    accumulate(z, n_terms, |k| {
        while built < k {
            let a = alpha * (built as f64 * m + l) + 1.0;
            c *= gamma::gamma_ratio_shift(a, -alpha)?;
            built += 1;
        }
        Ok(c)
    })
}

/// Leading coefficients `c_0..c_(n-1)` of the Kilbas–Saigo series.
pub fn kilbas_saigo_coefficients(
    params: KilbasSaigoParams,
    n: usize,
) -> Result<Vec<f64>, GammaError> {
    let KilbasSaigoParams { alpha, m, l } = params;
    let mut out = Vec::with_capacity(n);
    let mut c = 1.0;
    for j in 0..n {
        out.push(c);
        c *= gamma::gamma_ratio_shift(alpha * (j as f64 * m + l) + 1.0, -alpha)?;
    }
    Ok(out)
}
