//! Redheffer matrices `A_n` (`A[i][j] = 1` iff `j = 1` or `i | j`), the
//! arithmetic functions they are built from, and the numerics around the
//! near-alignment of `(σ₁(k)/k)_k` with the top singular vector of `A_n`.

pub mod cache;
pub mod constants;
pub mod error;
pub mod number_theory;
pub mod operators;
pub mod spectral;
pub mod summation;

pub use constants::{
    compute_alpha, double_gcd_sum_unweighted, double_gcd_sum_weighted, extrapolate, sum_cd_squared,
    AlphaReport, ExtrapolationEstimate, NORM_DENSITY,
};
pub use error::{Error, Result};
pub use number_theory::{
    c_constant, c_constant_series, mertens, pillai, record_indices, sieve_tables,
    tail_record_indices, DivisorTables, GcdConstants, GcdConstantsMethod, ZETA2, ZETA3,
};
pub use operators::{apply_b, exact_determinant, gram_entry, LinearOperator, RedhefferOperator};
pub use spectral::{
    candidate_vector, power_iteration, prime_vs_composite_profile, similarity_statistic,
    CandidateVector, EntryProfile, PowerIterationResult, SimilarityReport,
};
