mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use redheffer::constants::{fit_tail, NORM_DENSITY};
use redheffer::number_theory::gcd;
use redheffer::spectral::cosine_with_gram;
use redheffer::summation::{dot, norm};
use redheffer::*;

fn random_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

#[test]
fn gram_is_symmetric_and_positive_semidefinite() {
    let n = 10_000;
    let t = sieve_tables(n).unwrap();
    let op = RedhefferOperator::new(n, &t).unwrap();
    for seed in 0..4 {
        let x = random_vector(n, 2 * seed);
        let y = random_vector(n, 2 * seed + 1);
        let gx = op.apply_gram(&x).unwrap();
        let gy = op.apply_gram(&y).unwrap();
        let (a, b) = (dot(&gx, &y), dot(&x, &gy));
        assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()), "{a} vs {b}");
        assert!(dot(&x, &gx) >= 0.0);
        assert!(dot(&y, &gy) >= 0.0);
    }
}

#[test]
fn gram_minus_b_residual() {
    let mut previous = f64::INFINITY;
    for n in [500usize, 1000, 2000] {
        let t = sieve_tables(n).unwrap();
        let op = RedhefferOperator::new(n, &t).unwrap();
        let v = candidate_vector(n, &t).unwrap().entries;
        let gv = op.apply_gram(&v).unwrap();
        let bv = apply_b(&v, n, &t).unwrap();
        let r: Vec<f64> = gv.iter().zip(&bv).map(|(a, b)| a - b).collect();
        // v_n has non-integer entries, so the two products round differently.
        for i in 2..=n {
            let expected = t.sigma0(i) as f64 - 1.0;
            assert!(
                (r[i - 1] - expected).abs() <= 1e-12 * gv[i - 1].abs(),
                "r[{i}] at n = {n}"
            );
        }

        // Integer entries with x_1 = 1 keep both products exact: r_i = (σ₀(i) − 1)·x_1.
        let x: Vec<f64> = (1..=n)
            .map(|k| if k == 1 { 1.0 } else { t.sigma1(k) as f64 })
            .collect();
        let rx: Vec<f64> = op
            .apply_gram(&x)
            .unwrap()
            .iter()
            .zip(apply_b(&x, n, &t).unwrap())
            .map(|(a, b)| a - b)
            .collect();
        for i in 2..=n {
            assert_eq!(
                rx[i - 1],
                t.sigma0(i) as f64 - 1.0,
                "integer r[{i}] at n = {n}"
            );
        }
        let scaled = norm(&r) / (n as f64).powf(1.2);
        assert!(scaled < previous, "n = {n}: {scaled} !< {previous}");
        previous = scaled;
    }
}

#[test]
fn divisor_rewrite_is_an_exact_identity() {
    let t = sieve_tables(200).unwrap();
    common::divisor_rewrite_holds(200, &t).unwrap();
}

#[test]
fn gram_entries_match_brute_force_product() {
    let t = sieve_tables(64).unwrap();
    for n in 1..=64 {
        let dense = common::dense_gram(n);
        for i in 1..=n {
            for j in 1..=n {
                assert_eq!(gram_entry(i, j, n, &t).unwrap() as i64, dense[i - 1][j - 1]);
            }
        }
    }
}

#[test]
fn b_applied_to_candidate_tracks_divisor_constant_sum() {
    let mut previous = f64::INFINITY;
    for n in [500usize, 1000, 2000] {
        let t = sieve_tables(n).unwrap();
        let c = GcdConstants::closed_form(n, &t).unwrap();
        let v = candidate_vector(n, &t).unwrap().entries;
        let bv = apply_b(&v, n, &t).unwrap();
        let worst = (1..=n)
            .map(|i| {
                let model: f64 = t
                    .divisors(i)
                    .iter()
                    .map(|&d| c.get(d as usize) / d as f64)
                    .sum();
                (bv[i - 1] - n as f64 * model).abs() / n as f64
            })
            .fold(0.0, f64::max);
        assert!(worst < previous, "n = {n}: {worst}");
        previous = worst;
    }
    assert!(previous < 0.1, "{previous}");
}

#[test]
fn closed_form_agrees_with_series_within_tail_bound() {
    let t = sieve_tables(500).unwrap();
    for l in 1..=500 {
        let cutoff = 100_000.max(100 * l);
        let closed = c_constant(l, &t).unwrap();
        let series = c_constant_series(l, cutoff).unwrap();
        assert!(series <= closed + 1e-12);
        assert!(closed - series <= l as f64 / cutoff as f64, "l = {l}");
    }
}

#[test]
fn gcd_constant_table_bounds() {
    let bound = 1 << 16;
    let t = sieve_tables(bound).unwrap();
    let c = GcdConstants::closed_form(bound, &t).unwrap();

    assert_eq!(c.get(1), ZETA2);
    assert!((1..=bound).all(|l| c.get(l) >= 1.0));

    // Pointwise growth is at most logarithmic.
    let ratio = (1..=bound)
        .map(|l| c.get(l) / (1.0 + (l as f64).ln()))
        .fold(0.0, f64::max);
    assert!(ratio < 2.0, "{ratio}");

    // Dyadic averages stay bounded.
    let worst = (0..=15)
        .map(|e| {
            let x = 1usize << e;
            (x..=2 * x).map(|l| c.get(l)).sum::<f64>() / x as f64
        })
        .fold(0.0, f64::max);
    assert!(worst <= 4.0, "{worst}");

    // Σ c_l / l² converges.
    let partial =
        |x: usize| redheffer::summation::sum((1..=x).map(|l| c.get(l) / (l as f64).powi(2)));
    assert!((partial(100_000.min(bound)) - partial(1000)).abs() < 0.1);
}

#[test]
fn gcd_constants_up_to_one_hundred_thousand_are_at_least_one() {
    let t = sieve_tables(100_000).unwrap();
    let c = GcdConstants::closed_form(100_000, &t).unwrap();
    assert!(c.values().iter().all(|&v| v >= 1.0));
}

#[test]
fn norm_of_candidate_approaches_density() {
    let t = sieve_tables(1_000_000).unwrap();
    let mut previous = f64::INFINITY;
    for n in [1_000usize, 10_000, 100_000, 1_000_000] {
        let v = candidate_vector(n, &t).unwrap().entries;
        let density = dot(&v, &v) / n as f64;
        let gap = (density - NORM_DENSITY).abs();
        assert!(gap < previous, "n = {n}: {gap}");
        previous = gap;
        if n >= 10_000 {
            assert!((2.9..=3.1).contains(&density));
        }
    }
    assert!(previous < 0.01);
}

#[test]
fn three_routes_to_the_norm_density() {
    let n = 100_000;
    let t = sieve_tables(n).unwrap();
    let v = candidate_vector(n, &t).unwrap().entries;
    let direct = dot(&v, &v) / n as f64;
    let double = extrapolate(double_gcd_sum_unweighted, 1000, 2000, 1.0)
        .unwrap()
        .limit;
    for (a, b) in [
        (direct, NORM_DENSITY),
        (direct, double),
        (double, NORM_DENSITY),
    ] {
        assert!((a - b).abs() < 1e-2, "{a} vs {b}");
    }
}

#[test]
fn unweighted_double_sum_extrapolates_to_density_at_two_thousand() {
    let e = extrapolate(double_gcd_sum_unweighted, 1000, 2000, 1.0).unwrap();
    assert!((e.limit - NORM_DENSITY).abs() < 1e-2);
    assert!((e.limit - 3.005).abs() < 1e-2);
}

#[test]
fn extrapolation_is_self_consistent() {
    let t = sieve_tables(200_000).unwrap();
    let c = GcdConstants::closed_form(200_000, &t).unwrap();
    let s = |d| sum_cd_squared(d, &c).unwrap();
    let (s1, s2, s3) = (s(25_000), s(100_000), s(200_000));
    let first = fit_tail(25_000, 100_000, s1, s2, 1.0);
    let second = fit_tail(100_000, 200_000, s2, s3, 1.0);
    let smaller_tail = (second.tail_coefficient / 200_000.0).abs();
    assert!((first.limit - second.limit).abs() <= smaller_tail);
    assert!(first.limit >= first.sum_hi);
}

#[test]
fn converged_singular_vector_is_a_fixed_direction() {
    let n = 500;
    let t = sieve_tables(n).unwrap();
    let op = RedhefferOperator::new(n, &t).unwrap();
    let r = power_iteration(&op.gram(), 1e-12, 10_000).unwrap();
    assert!(r.converged);
    assert!((norm(&r.eigenvector) - 1.0).abs() <= 1e-12);
    assert!(r.eigenvector.iter().all(|&x| x >= 0.0));
    let u = cosine_with_gram(&op, &r.eigenvector).unwrap();
    assert!(u.statistic >= 1.0 - 1e-8);
    let v = candidate_vector(n, &t).unwrap();
    let s = cosine_with_gram(&op, &v.entries).unwrap();
    assert!(s.statistic < 1.0 - 1e-4);

    // λ = ‖A u‖², and it dominates the Rayleigh quotient of v_n.
    let au = op.apply_forward(&r.eigenvector).unwrap();
    let au2 = dot(&au, &au);
    assert!((au2 - r.rayleigh).abs() <= 1e-10 * r.rayleigh);
    assert!(r.rayleigh > s.inner / (s.norm_v * s.norm_v));
}

#[test]
fn statistic_climbs_toward_the_limit() {
    let values: Vec<f64> = [1_000usize, 10_000, 50_000]
        .iter()
        .map(|&n| similarity_statistic(n).unwrap().statistic)
        .collect();
    assert!(values.windows(2).all(|w| w[0] < w[1]), "{values:?}");
    assert!(values[1] > 0.99 && values[2] < 0.999);
    assert!((values[2] - 0.99799).abs() < 1e-3);
}

#[test]
fn singular_vector_is_small_on_primes() {
    let n = 1000;
    let t = sieve_tables(n).unwrap();
    let op = RedhefferOperator::new(n, &t).unwrap();
    let r = power_iteration(&op.gram(), 1e-10, 10_000).unwrap();
    let p = prime_vs_composite_profile(&r.eigenvector, &t).unwrap();
    assert!(p.prime_mean.unwrap() < p.many_divisors_mean.unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn forward_and_transpose_are_adjoint(n in 1usize..400, seed in any::<u64>()) {
        let t = sieve_tables(n).unwrap();
        let op = RedhefferOperator::new(n, &t).unwrap();
        let x = random_vector(n, seed);
        let y = random_vector(n, seed ^ 0x9e37_79b9);
        let lhs = dot(&op.apply_forward(&x).unwrap(), &y);
        let rhs = dot(&x, &op.apply_transpose(&y).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn statistic_is_scale_invariant(n in 1usize..3000, scale in 1e-6f64..1e6) {
        let t = sieve_tables(n).unwrap();
        let op = RedhefferOperator::new(n, &t).unwrap();
        let v = candidate_vector(n, &t).unwrap().entries;
        let scaled: Vec<f64> = v.iter().map(|x| x * scale).collect();
        let a = cosine_with_gram(&op, &v).unwrap().statistic;
        let b = cosine_with_gram(&op, &scaled).unwrap().statistic;
        prop_assert!((a - b).abs() <= 1e-12);
        prop_assert!(a > 0.0 && a <= 1.0 + 1e-15);
    }

    #[test]
    fn weighted_double_sum_dominates(cutoff in 1usize..200) {
        let t = sieve_tables(200).unwrap();
        let c = GcdConstants::closed_form(200, &t).unwrap();
        prop_assert!(double_gcd_sum_weighted(cutoff, &c).unwrap() >= double_gcd_sum_unweighted(cutoff).unwrap());
    }

    #[test]
    fn multiplicative_functions_split_over_coprime_factors(a in 1usize..3000, b in 1usize..3000) {
        prop_assume!(gcd(a as u64, b as u64) == 1);
        let t = sieve_tables(a * b).unwrap();
        prop_assert_eq!(t.sigma0(a * b), t.sigma0(a) * t.sigma0(b));
        prop_assert_eq!(t.sigma1(a * b), t.sigma1(a) * t.sigma1(b));
        prop_assert_eq!(t.mu(a * b), t.mu(a) * t.mu(b));
        prop_assert_eq!(t.phi(a * b), t.phi(a) * t.phi(b));
    }

    #[test]
    fn table_cache_roundtrips(n in 1usize..5000) {
        let t = sieve_tables(n).unwrap();
        prop_assert_eq!(redheffer::cache::decode(&redheffer::cache::encode(&t)).unwrap(), t);
    }
}
