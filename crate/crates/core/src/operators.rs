//! Matrix-free Redheffer operators.
//!
//! `A_n` has `A[i][j] = 1` iff `j = 1` or `i | j` (1-based). Vectors are
//! stored 0-based, so slot `k - 1` holds the entry for index `k`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{check_len, Error, Result};
use crate::number_theory::{gcd, DivisorTables};

/// Largest `n` accepted by [`exact_determinant`] without `force`. Bareiss
/// elimination is O(n³) big-integer operations; beyond this a single call
/// takes minutes.
pub const DETERMINANT_GUARD: usize = 300;

/// Largest `n` for which [`apply_b`] runs without a warning. The dense
/// product costs n² gcd evaluations.
pub const DENSE_B_GUARD: usize = 5000;

/// A symmetric linear map that can be applied to a vector.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>>;
}

/// The Redheffer matrix `A_n`, never materialised.
#[derive(Debug, Clone, Copy)]
pub struct RedhefferOperator<'a> {
    n: usize,
    tables: &'a DivisorTables,
}

impl<'a> RedhefferOperator<'a> {
    pub fn new(n: usize, tables: &'a DivisorTables) -> Result<Self> {
        tables.covers(n)?;
        Ok(Self { n, tables })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn tables(&self) -> &'a DivisorTables {
        self.tables
    }

    /// Entry of the matrix at 1-based `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> u8 {
        debug_assert!((1..=self.n).contains(&i) && (1..=self.n).contains(&j));
        u8::from(j == 1 || j.is_multiple_of(i))
    }

    /// `A x`: row 1 sums everything, row `i ≥ 2` is `x_1 + Σ_{m ≥ 1} x_{im}`.
    pub fn apply_forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n, x.len())?;
        let n = self.n;
        let mut out = vec![0.0; n];
        out.par_iter_mut().enumerate().for_each(|(row, slot)| {
            let i = row + 1;
            *slot = if i == 1 {
                x.iter().sum()
            } else {
                let mut acc = x[0];
                for j in (i..=n).step_by(i) {
                    acc += x[j - 1];
                }
                acc
            };
        });
        Ok(out)
    }

    /// `Aᵀ x`: entry 1 sums everything, entry `j ≥ 2` is `Σ_{d | j} x_d`.
    pub fn apply_transpose(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n, x.len())?;
        let n = self.n;
        let mut out = vec![0.0; n];
        for d in 1..=n {
            let xd = x[d - 1];
            // Start at 2d for d = 1 so that slot 1 is written only once below.
            let start = if d == 1 { 2 } else { d };
            for m in (start..=n).step_by(d) {
                out[m - 1] += xd;
            }
        }
        out[0] = x.iter().sum();
        Ok(out)
    }

    /// `AᵀA x` as two sparse passes.
    pub fn apply_gram(&self, x: &[f64]) -> Result<Vec<f64>> {
        let y = self.apply_forward(x)?;
        self.apply_transpose(&y)
    }

    pub fn gram(&self) -> GramOperator<'a> {
        GramOperator { op: *self }
    }
}

/// `AᵀA` viewed as a [`LinearOperator`].
#[derive(Debug, Clone, Copy)]
pub struct GramOperator<'a> {
    op: RedhefferOperator<'a>,
}

impl LinearOperator for GramOperator<'_> {
    fn dim(&self) -> usize {
        self.op.n
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.op.apply_gram(x)
    }
}

/// Entry `(i, j)` of `AᵀA`: `n` at `(1,1)`, `σ₀(j)` on the first row,
/// `σ₀(i)` on the first column and `σ₀(gcd(i, j))` elsewhere.
pub fn gram_entry(i: usize, j: usize, n: usize, tables: &DivisorTables) -> Result<u64> {
    tables.covers(n)?;
    if !(1..=n).contains(&i) || !(1..=n).contains(&j) {
        return Err(Error::InvalidArgument(format!(
            "entry ({i}, {j}) outside a {n}x{n} matrix"
        )));
    }
    let value = match (i, j) {
        (1, 1) => n as u64,
        (1, j) => tables.sigma0(j) as u64,
        (i, 1) => tables.sigma0(i) as u64,
        (i, j) => tables.sigma0(gcd(i as u64, j as u64) as usize) as u64,
    };
    Ok(value)
}

/// `B_n x` with `B_n = (σ₀(gcd(i, k)))`, dense and row-parallel.
pub fn apply_b(x: &[f64], n: usize, tables: &DivisorTables) -> Result<Vec<f64>> {
    check_len(n, x.len())?;
    tables.covers(n)?;
    if n > DENSE_B_GUARD {
        log::warn!("dense B product at n = {n} exceeds the guard of {DENSE_B_GUARD}");
    }
    let mut out = vec![0.0; n];
    out.par_iter_mut().enumerate().for_each(|(row, slot)| {
        let i = row as u64 + 1;
        let mut acc = 0.0;
        for (k, &xk) in x.iter().enumerate() {
            acc += tables.sigma0(gcd(i, k as u64 + 1) as usize) as f64 * xk;
        }
        *slot = acc;
    });
    Ok(out)
}

/// Exact determinant of the dense `n × n` Redheffer matrix by fraction-free
/// (Bareiss) elimination with row pivoting.
pub fn exact_determinant(n: usize, force: bool) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "dimension must be at least 1".into(),
        ));
    }
    if n > DETERMINANT_GUARD && !force {
        return Err(Error::SizeGuard {
            what: "exact determinant",
            n,
            limit: DETERMINANT_GUARD,
        });
    }
    let matrix: Vec<Vec<BigInt>> = (1..=n)
        .map(|i| {
            (1..=n)
                .map(|j| BigInt::from(u8::from(j == 1 || j % i == 0)))
                .collect()
        })
        .collect();
    Ok(bareiss_determinant(matrix))
}

pub(crate) fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        let (upper, lower) = m.split_at_mut(k + 1);
        let pivot_row = &upper[k];
        let pivot = &pivot_row[k];
        for row in lower.iter_mut() {
            let factor = std::mem::take(&mut row[k]);
            for j in k + 1..n {
                let mut v = &row[j] * pivot;
                if !factor.is_zero() && !pivot_row[j].is_zero() {
                    v -= &factor * &pivot_row[j];
                }
                row[j] = if prev.is_one() { v } else { v / &prev };
            }
        }
        prev = pivot_row[k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}
