//! Sieved arithmetic functions, the gcd-series constants `c_l` and record detection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::summation::CompensatedSum;

/// ζ(2) = π²/6.
pub const ZETA2: f64 = 1.644934066848226;
/// ζ(3), Apéry's constant.
pub const ZETA3: f64 = 1.202056903159594;

/// Binary (Stein) gcd. `gcd(0, b) = b`.
#[inline]
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

/// Per-index arithmetic functions for `1..=n`.
///
/// All vectors have length `n + 1`; slot 0 is unused and holds zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorTables {
    pub(crate) n: usize,
    pub(crate) mu: Vec<i8>,
    pub(crate) sigma0: Vec<u32>,
    pub(crate) sigma1: Vec<u64>,
    pub(crate) phi: Vec<u64>,
    pub(crate) spf: Vec<u32>,
}

/// Sieve μ, σ₀, σ₁, φ and the smallest prime factor for every index up to `n`.
///
/// σ₀ and σ₁ come from one divisor-enumeration pass (O(n log n)); μ, φ and
/// the smallest prime factor from a linear sieve.
pub fn sieve_tables(n: usize) -> Result<DivisorTables> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "sieve bound must be at least 1".into(),
        ));
    }
    if n > u32::MAX as usize {
        return Err(Error::InvalidArgument(format!(
            "sieve bound {n} exceeds u32 range"
        )));
    }

    let mut sigma0 = vec![0u32; n + 1];
    let mut sigma1 = vec![0u64; n + 1];
    for d in 1..=n {
        for m in (d..=n).step_by(d) {
            sigma0[m] += 1;
            sigma1[m] += d as u64;
        }
    }

    let mut mu = vec![0i8; n + 1];
    let mut phi = vec![0u64; n + 1];
    let mut spf = vec![0u32; n + 1];
    let mut primes: Vec<usize> = Vec::new();
    mu[1] = 1;
    phi[1] = 1;
    spf[1] = 1;
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            mu[i] = -1;
            phi[i] = i as u64 - 1;
            primes.push(i);
        }
        for &p in &primes {
            let m = i * p;
            if p > spf[i] as usize || m > n {
                break;
            }
            spf[m] = p as u32;
            if i % p == 0 {
                mu[m] = 0;
                phi[m] = phi[i] * p as u64;
            } else {
                mu[m] = -mu[i];
                phi[m] = phi[i] * (p as u64 - 1);
            }
        }
    }

    Ok(DivisorTables {
        n,
        mu,
        sigma0,
        sigma1,
        phi,
        spf,
    })
}

impl DivisorTables {
    pub fn bound(&self) -> usize {
        self.n
    }

    pub fn covers(&self, k: usize) -> Result<()> {
        if k == 0 {
            return Err(Error::InvalidArgument("indices start at 1".into()));
        }
        if k > self.n {
            return Err(Error::TableTooSmall {
                needed: k,
                available: self.n,
            });
        }
        Ok(())
    }

    #[inline]
    pub fn mu(&self, k: usize) -> i8 {
        self.mu[k]
    }

    #[inline]
    pub fn sigma0(&self, k: usize) -> u32 {
        self.sigma0[k]
    }

    #[inline]
    pub fn sigma1(&self, k: usize) -> u64 {
        self.sigma1[k]
    }

    #[inline]
    pub fn phi(&self, k: usize) -> u64 {
        self.phi[k]
    }

    #[inline]
    pub fn spf(&self, k: usize) -> u32 {
        self.spf[k]
    }

    /// Raw views indexed from 0 (slot 0 unused).
    pub fn sigma0_slice(&self) -> &[u32] {
        &self.sigma0
    }

    pub fn sigma1_slice(&self) -> &[u64] {
        &self.sigma1
    }

    pub fn is_prime(&self, k: usize) -> bool {
        k >= 2 && self.spf[k] as usize == k
    }

    /// Divisors of `k` in ascending order, generated from the smallest-prime-factor chain.
    pub fn divisors(&self, k: usize) -> Vec<u64> {
        let mut divs = vec![1u64];
        let mut rest = k;
        while rest > 1 {
            let p = self.spf[rest] as usize;
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            let len = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p as u64;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

/// Mertens function M(n) = Σ_{k ≤ n} μ(k).
pub fn mertens(n: usize, tables: &DivisorTables) -> Result<i64> {
    tables.covers(n)?;
    Ok(tables.mu[1..=n].iter().map(|&m| m as i64).sum())
}

/// Pillai's function Σ_{k=1}^{d} gcd(k, d), evaluated as Σ_{e|d} e·φ(d/e).
pub fn pillai(d: usize, tables: &DivisorTables) -> Result<u64> {
    tables.covers(d)?;
    Ok(tables
        .divisors(d)
        .into_iter()
        .map(|e| e * tables.phi(d / e as usize))
        .sum())
}

/// Σ_{d=1}^{l} gcd(l, d)², evaluated as Σ_{e|l} e²·φ(l/e).
pub fn gcd_square_sum(l: usize, tables: &DivisorTables) -> Result<u64> {
    tables.covers(l)?;
    Ok(tables
        .divisors(l)
        .into_iter()
        .map(|e| e * e * tables.phi(l / e as usize))
        .sum())
}

/// `c_l = Σ_{d ≥ 1} gcd(d, l)/d²` through the identity `c_l = ζ(2)/l² · Σ_{d=1}^{l} gcd(l, d)²`.
pub fn c_constant(l: usize, tables: &DivisorTables) -> Result<f64> {
    let g = gcd_square_sum(l, tables)?;
    let l = l as f64;
    Ok(ZETA2 * g as f64 / (l * l))
}

/// The defining series of `c_l` truncated at `cutoff`.
///
/// The omitted tail is at most `l / cutoff` because `gcd(d, l) ≤ l`.
pub fn c_constant_series(l: usize, cutoff: usize) -> Result<f64> {
    if l == 0 {
        return Err(Error::InvalidArgument("l must be at least 1".into()));
    }
    if cutoff < l {
        return Err(Error::InvalidArgument(format!(
            "series cutoff {cutoff} is below l = {l}; the tail bound l/cutoff would be vacuous"
        )));
    }
    let l = l as u64;
    let mut acc = CompensatedSum::new();
    for d in 1..=cutoff as u64 {
        let df = d as f64;
        acc += gcd(d, l) as f64 / (df * df);
    }
    Ok(acc.value())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GcdConstantsMethod {
    ClosedForm,
    TruncatedSeries { cutoff: usize },
}

/// Table of `c_l` for `1 ≤ l ≤ bound`; slot 0 is unused.
#[derive(Debug, Clone, PartialEq)]
pub struct GcdConstants {
    bound: usize,
    values: Vec<f64>,
    method: GcdConstantsMethod,
}

impl GcdConstants {
    /// Closed-form table. The gcd-square sums are filled by a Dirichlet-convolution
    /// sieve of `e²` against φ, so the whole table costs O(L log L).
    pub fn closed_form(bound: usize, tables: &DivisorTables) -> Result<Self> {
        if bound == 0 {
            return Err(Error::InvalidArgument(
                "table bound must be at least 1".into(),
            ));
        }
        tables.covers(bound)?;
        let mut g = vec![0u64; bound + 1];
        for e in 1..=bound {
            let e2 = (e as u64) * (e as u64);
            for k in 1..=bound / e {
                g[e * k] += e2 * tables.phi(k);
            }
        }
        let mut values = vec![0.0; bound + 1];
        for l in 1..=bound {
            let lf = l as f64;
            values[l] = ZETA2 * g[l] as f64 / (lf * lf);
        }
        Ok(Self {
            bound,
            values,
            method: GcdConstantsMethod::ClosedForm,
        })
    }

    /// Table from the truncated defining series; O(L · cutoff), meant for cross-checks.
    pub fn truncated_series(bound: usize, cutoff: usize) -> Result<Self> {
        if bound == 0 {
            return Err(Error::InvalidArgument(
                "table bound must be at least 1".into(),
            ));
        }
        let mut values = vec![0.0; bound + 1];
        for (l, slot) in values.iter_mut().enumerate().skip(1) {
            *slot = c_constant_series(l, cutoff)?;
        }
        Ok(Self {
            bound,
            values,
            method: GcdConstantsMethod::TruncatedSeries { cutoff },
        })
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn method(&self) -> GcdConstantsMethod {
        self.method
    }

    #[inline]
    pub fn get(&self, l: usize) -> f64 {
        self.values[l]
    }

    /// Values for `l = 1..=bound`.
    pub fn values(&self) -> &[f64] {
        &self.values[1..]
    }

    pub fn covers(&self, cutoff: usize) -> Result<()> {
        if cutoff > self.bound {
            return Err(Error::TableTooSmall {
                needed: cutoff,
                available: self.bound,
            });
        }
        Ok(())
    }
}

/// Indices (1-based) at which the sequence reaches a strict new maximum.
///
/// `values[0]` is the entry for index 1, which is always a record.
pub fn record_indices<T: PartialOrd + Copy>(values: &[T]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut best: Option<T> = None;
    for (i, &v) in values.iter().enumerate() {
        if best.is_none_or(|b| v > b) {
            best = Some(v);
            out.push(i + 1);
        }
    }
    out
}

/// Index 1 followed by the strict records among indices `2..`.
///
/// Entry 1 of a Redheffer singular vector sits on the all-ones first column
/// and exceeds every later entry, so plain [`record_indices`] would stop there.
pub fn tail_record_indices<T: PartialOrd + Copy>(values: &[T]) -> Vec<usize> {
    if values.is_empty() {
        return Vec::new();
    }
    let mut out = vec![1];
    out.extend(record_indices(&values[1..]).into_iter().map(|i| i + 1));
    out
}
