//! Oracles shared by the property and acceptance suites.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{One, Zero};

use redheffer::number_theory::gcd;
use redheffer::DivisorTables;

/// Lemma-4 style divisor rewrite, checked for every `n ≤ bound` and `i ≤ n`:
/// Σ_k σ₀(gcd(i,k))·σ₁(k)/k == Σ_{d|i} Σ_{k ≤ n/d} σ₁(kd)/(kd).
/// Both sides are scaled by lcm(1..=bound), which makes every term an exact integer.
pub fn divisor_rewrite_holds(bound: usize, t: &DivisorTables) -> Result<(), String> {
    let mut lcm = BigInt::one();
    for k in 1..=bound as u64 {
        let rem: u64 = (&lcm % BigInt::from(k)).try_into().unwrap();
        lcm *= BigInt::from(k / gcd(rem, k));
    }
    let scaled: Vec<BigInt> = (0..=bound)
        .map(|k| {
            if k == 0 {
                BigInt::zero()
            } else {
                BigInt::from(t.sigma1(k)) * (&lcm / BigInt::from(k))
            }
        })
        .collect();
    for n in 1..=bound {
        for i in 1..=n {
            let mut lhs = BigInt::zero();
            for k in 1..=n {
                lhs += &scaled[k] * t.sigma0(gcd(i as u64, k as u64) as usize);
            }
            let mut rhs = BigInt::zero();
            for d in t.divisors(i) {
                let d = d as usize;
                for k in 1..=n / d {
                    rhs += &scaled[k * d];
                }
            }
            if lhs != rhs {
                return Err(format!("mismatch at i = {i}, n = {n}"));
            }
        }
    }
    Ok(())
}

/// Dense `A_n` with 0/1 integer entries.
pub fn dense_redheffer(n: usize) -> Vec<Vec<i64>> {
    (1..=n)
        .map(|i| (1..=n).map(|j| i64::from(j == 1 || j % i == 0)).collect())
        .collect()
}

/// `AᵀA` by brute-force integer multiplication.
pub fn dense_gram(n: usize) -> Vec<Vec<i64>> {
    let a = dense_redheffer(n);
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[k][i] * a[k][j]).sum())
                .collect()
        })
        .collect()
}
