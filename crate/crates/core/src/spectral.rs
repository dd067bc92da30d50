//! The candidate vector `v_n = (σ₁(k)/k)`, power iteration for the top
//! singular vector of `A_n`, and the cosine statistic between `v_n` and `AᵀA v_n`.

use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::number_theory::{record_indices, sieve_tables, tail_record_indices, DivisorTables};
use crate::operators::{LinearOperator, RedhefferOperator};
use crate::summation::{self, CompensatedSum};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateVector {
    pub n: usize,
    /// `entries[k - 1] = σ₁(k)/k`.
    pub entries: Vec<f64>,
}

pub fn candidate_vector(n: usize, tables: &DivisorTables) -> Result<CandidateVector> {
    tables.covers(n)?;
    let entries = (1..=n)
        .map(|k| tables.sigma1(k) as f64 / k as f64)
        .collect();
    Ok(CandidateVector { n, entries })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerIterationResult {
    pub n: usize,
    /// Unit vector, sign chosen so the entries sum to a nonnegative value.
    pub eigenvector: Vec<f64>,
    /// Top eigenvalue of the operator (for `AᵀA`, the squared top singular value).
    pub rayleigh: f64,
    pub iterations: usize,
    /// `‖G u − rayleigh · u‖` for the returned `u`.
    pub residual: f64,
    pub converged: bool,
}

/// Power iteration from the normalised all-ones vector.
///
/// Stops once the relative change of the Rayleigh quotient drops below `tol`
/// (or the relative residual does). Hitting `max_iter` is not an error; the
/// result comes back with `converged = false`.
pub fn power_iteration<O: LinearOperator + ?Sized>(
    op: &O,
    tol: f64,
    max_iter: usize,
) -> Result<PowerIterationResult> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if max_iter == 0 {
        return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
    }
    let n = op.dim();
    if n == 0 {
        return Err(Error::InvalidArgument("operator has dimension 0".into()));
    }

    let mut u = vec![1.0 / (n as f64).sqrt(); n];
    let mut previous: Option<f64> = None;
    let mut rayleigh = 0.0;
    let mut residual = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < max_iter {
        iterations += 1;
        let w = op.apply(&u)?;
        rayleigh = summation::dot(&u, &w);
        residual = summation::sum(
            w.iter()
                .zip(&u)
                .map(|(wi, ui)| (wi - rayleigh * ui).powi(2)),
        )
        .sqrt();

        let settled = previous.is_some_and(|p| (rayleigh - p).abs() <= tol * rayleigh.abs());
        if settled || residual <= tol * rayleigh.abs() {
            converged = true;
            break;
        }
        previous = Some(rayleigh);

        let norm = summation::norm(&w);
        if norm == 0.0 {
            // Start vector lies in the kernel.
            break;
        }
        u = w.into_iter().map(|wi| wi / norm).collect();
    }

    if summation::sum(u.iter().copied()) < 0.0 {
        u.iter_mut().for_each(|x| *x = -*x);
    }

    Ok(PowerIterationResult {
        n,
        eigenvector: u,
        rayleigh,
        iterations,
        residual,
        converged,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilarityReport {
    pub n: usize,
    pub norm_v: f64,
    pub norm_gram_v: f64,
    pub inner: f64,
    /// `inner / (norm_v · norm_gram_v)`.
    pub statistic: f64,
    pub elapsed_ms: f64,
}

/// Cosine between `x` and `AᵀA x`.
pub fn cosine_with_gram(op: &RedhefferOperator<'_>, x: &[f64]) -> Result<SimilarityReport> {
    let start = Instant::now();
    let gx = op.apply_gram(x)?;
    let norm_v = summation::norm(x);
    let norm_gram_v = summation::norm(&gx);
    let inner = summation::dot(x, &gx);
    Ok(SimilarityReport {
        n: op.dim(),
        norm_v,
        norm_gram_v,
        inner,
        statistic: inner / (norm_v * norm_gram_v),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// `⟨v_n/‖v_n‖, AᵀA v_n/‖AᵀA v_n‖⟩` using precomputed tables.
pub fn similarity_statistic_with(n: usize, tables: &DivisorTables) -> Result<SimilarityReport> {
    let start = Instant::now();
    let op = RedhefferOperator::new(n, tables)?;
    let v = candidate_vector(n, tables)?;
    let mut report = cosine_with_gram(&op, &v.entries)?;
    report.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

/// Sieve, build `v_n` and evaluate the cosine statistic; O(n log n) time, O(n) memory.
pub fn similarity_statistic(n: usize) -> Result<SimilarityReport> {
    let start = Instant::now();
    let tables = sieve_tables(n)?;
    let mut report = similarity_statistic_with(n, &tables)?;
    report.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

/// Indices with at least this many divisors count as "highly divisible" in profiles.
pub const MANY_DIVISORS: u32 = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryProfile {
    pub n: usize,
    /// Mean entry over prime indices; `None` when there are no primes (n < 2).
    pub prime_mean: Option<f64>,
    /// Mean entry over indices with σ₀ ≥ [`MANY_DIVISORS`]; `None` below n = 24.
    pub many_divisors_mean: Option<f64>,
    pub min: f64,
    pub max: f64,
    /// Strict running maxima over the whole vector.
    pub records: Vec<usize>,
    /// Index 1 plus the records from index 2 on.
    pub tail_records: Vec<usize>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let mut acc = CompensatedSum::new();
    let mut count = 0usize;
    for v in values {
        acc += v;
        count += 1;
    }
    (count > 0).then(|| acc.value() / count as f64)
}

/// Compare entries at prime indices against entries at indices with many divisors.
pub fn prime_vs_composite_profile(vec: &[f64], tables: &DivisorTables) -> Result<EntryProfile> {
    let n = vec.len();
    tables.covers(n.max(1))?;
    let prime_mean = mean((1..=n).filter(|&k| tables.is_prime(k)).map(|k| vec[k - 1]));
    let many_divisors_mean = mean(
        (1..=n)
            .filter(|&k| tables.sigma0(k) >= MANY_DIVISORS)
            .map(|k| vec[k - 1]),
    );
    Ok(EntryProfile {
        n,
        prime_mean,
        many_divisors_mean,
        min: vec.iter().copied().fold(f64::INFINITY, f64::min),
        max: vec.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        records: record_indices(vec),
        tail_records: tail_record_indices(vec),
    })
}
