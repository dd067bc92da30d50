//! Finite-cutoff evaluation of the gcd series behind the limiting cosine,
//! tail extrapolation, and the closed form for the limit.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::number_theory::{gcd, GcdConstants, ZETA3};
use crate::summation::CompensatedSum;

/// `5ζ(3)/2`, the limit of `‖v_n‖²/n` and of the unweighted double gcd sum.
pub const NORM_DENSITY: f64 = 2.5 * ZETA3;

/// Cutoff above which the O(D²) double sums log a warning.
pub const DOUBLE_SUM_GUARD: usize = 20_000;

/// `Σ_{d ≤ cutoff} c_d² / d²`, ascending and compensated.
pub fn sum_cd_squared(cutoff: usize, constants: &GcdConstants) -> Result<f64> {
    constants.covers(cutoff)?;
    let mut acc = CompensatedSum::new();
    for d in 1..=cutoff {
        let df = d as f64;
        let c = constants.get(d);
        acc += c * c / (df * df);
    }
    Ok(acc.value())
}

/// `Σ_{d1, d2 ≤ cutoff} a_{d1} a_{d2} gcd(d1, d2)` for `a_d = weight[d]`
/// (`weight[0]` unused), folded over the upper triangle.
///
/// Each row is reduced with compensation on its own; rows are then combined
/// in ascending order, so the result does not depend on the thread count.
fn symmetric_gcd_sum(weight: &[f64]) -> f64 {
    let cutoff = weight.len() - 1;
    if cutoff > DOUBLE_SUM_GUARD {
        log::warn!("double gcd sum at cutoff {cutoff} is O(D^2) and will be slow");
    }
    let rows: Vec<f64> = (1..=cutoff)
        .into_par_iter()
        .map(|d1| {
            let a1 = weight[d1];
            let d1u = d1 as u64;
            let mut off = CompensatedSum::new();
            for (d2, &a2) in weight.iter().enumerate().skip(d1 + 1) {
                off += a2 * gcd(d1u, d2 as u64) as f64;
            }
            a1 * (a1 * d1 as f64 + 2.0 * off.value())
        })
        .collect();
    crate::summation::sum(rows)
}

fn unit_weights(cutoff: usize, c: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut w = vec![0.0; cutoff + 1];
    for (d, slot) in w.iter_mut().enumerate().skip(1) {
        let df = d as f64;
        *slot = c(d) / (df * df);
    }
    w
}

/// `Σ_{d1, d2 ≤ cutoff} c_{d1} c_{d2} gcd(d1, d2) / (d1² d2²)`.
pub fn double_gcd_sum_weighted(cutoff: usize, constants: &GcdConstants) -> Result<f64> {
    if cutoff == 0 {
        return Err(Error::InvalidArgument("cutoff must be at least 1".into()));
    }
    constants.covers(cutoff)?;
    Ok(symmetric_gcd_sum(&unit_weights(cutoff, |d| {
        constants.get(d)
    })))
}

/// `Σ_{d1, d2 ≤ cutoff} gcd(d1, d2) / (d1² d2²)`; tends to `5ζ(3)/2`.
pub fn double_gcd_sum_unweighted(cutoff: usize) -> Result<f64> {
    if cutoff == 0 {
        return Err(Error::InvalidArgument("cutoff must be at least 1".into()));
    }
    Ok(symmetric_gcd_sum(&unit_weights(cutoff, |_| 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtrapolationEstimate {
    pub cutoff_lo: usize,
    pub cutoff_hi: usize,
    pub sum_lo: f64,
    pub sum_hi: f64,
    pub tail_exponent: f64,
    /// `c` in the tail model `S(∞) − S(N) ≈ c / N^p`.
    pub tail_coefficient: f64,
    pub limit: f64,
}

/// Fit `S(N) + c/N^p` through two cutoffs and return the common value.
pub fn extrapolate<F>(
    mut sum_fn: F,
    cutoff_lo: usize,
    cutoff_hi: usize,
    tail_exponent: f64,
) -> Result<ExtrapolationEstimate>
where
    F: FnMut(usize) -> Result<f64>,
{
    if cutoff_lo == 0 || cutoff_lo >= cutoff_hi {
        return Err(Error::InvalidArgument(format!(
            "need 0 < cutoff_lo < cutoff_hi, got {cutoff_lo} and {cutoff_hi}"
        )));
    }
    if tail_exponent.is_nan() || tail_exponent <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tail exponent must be positive, got {tail_exponent}"
        )));
    }
    let sum_lo = sum_fn(cutoff_lo)?;
    let sum_hi = sum_fn(cutoff_hi)?;
    Ok(fit_tail(
        cutoff_lo,
        cutoff_hi,
        sum_lo,
        sum_hi,
        tail_exponent,
    ))
}

/// Tail fit from already evaluated partial sums.
pub fn fit_tail(
    cutoff_lo: usize,
    cutoff_hi: usize,
    sum_lo: f64,
    sum_hi: f64,
    tail_exponent: f64,
) -> ExtrapolationEstimate {
    let (lo, hi) = (cutoff_lo as f64, cutoff_hi as f64);
    let tail_coefficient = if tail_exponent == 1.0 {
        (sum_hi - sum_lo) * lo * hi / (hi - lo)
    } else {
        (sum_hi - sum_lo) / (lo.powf(-tail_exponent) - hi.powf(-tail_exponent))
    };
    ExtrapolationEstimate {
        cutoff_lo,
        cutoff_hi,
        sum_lo,
        sum_hi,
        tail_exponent,
        tail_coefficient,
        limit: sum_hi + tail_coefficient / hi.powf(tail_exponent),
    }
}

/// Limit under the alternative tail model `c · ln(N) / N`, for sensitivity checks.
pub fn log_tail_limit(cutoff_lo: usize, cutoff_hi: usize, sum_lo: f64, sum_hi: f64) -> f64 {
    let shape = |n: usize| (n as f64).ln() / n as f64;
    let c = (sum_hi - sum_lo) / (shape(cutoff_lo) - shape(cutoff_hi));
    sum_hi + c * shape(cutoff_hi)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaReport {
    /// Extrapolated `Σ c_d²/d²`.
    pub s1: f64,
    /// Extrapolated `Σ c_{d1} c_{d2} gcd(d1, d2)/(d1² d2²)`.
    pub s2: f64,
    /// `√2 / (√5 √ζ(3))`.
    pub prefactor: f64,
    pub alpha: f64,
    pub s1_estimate: Option<ExtrapolationEstimate>,
    pub s2_estimate: Option<ExtrapolationEstimate>,
}

pub fn alpha_prefactor() -> f64 {
    2f64.sqrt() / (5f64.sqrt() * ZETA3.sqrt())
}

/// `α = √2/(√5 √ζ(3)) · s1 / √s2`.
pub fn alpha_from_limits(s1: f64, s2: f64) -> Result<AlphaReport> {
    if !s2.is_finite() || s2 <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "double sum must be positive, got {s2}"
        )));
    }
    if !s1.is_finite() || s1 <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "single sum must be positive, got {s1}"
        )));
    }
    let prefactor = alpha_prefactor();
    Ok(AlphaReport {
        s1,
        s2,
        prefactor,
        alpha: prefactor * s1 / s2.sqrt(),
        s1_estimate: None,
        s2_estimate: None,
    })
}

pub fn compute_alpha(
    s1_estimate: &ExtrapolationEstimate,
    s2_estimate: &ExtrapolationEstimate,
) -> Result<AlphaReport> {
    let mut report = alpha_from_limits(s1_estimate.limit, s2_estimate.limit)?;
    report.s1_estimate = Some(*s1_estimate);
    report.s2_estimate = Some(*s2_estimate);
    Ok(report)
}
