mod common;

use common::{moment_by_tensor, rel};
use num_complex::Complex;
use proptest::prelude::*;
use socdist::moments::{
    moment_asymptotic, moment_exact, moment_exact_barnes, moment_haar_so_even, normalization_c,
    selberg_integral,
};
use socdist::special_fn::barnes_g;
use socdist::{EnsembleSpec, SelbergParams64};

fn spec(n: u32, m: u32) -> EnsembleSpec {
    EnsembleSpec::new(n, m).unwrap()
}

fn exact(n: u32, m: u32, s: f64) -> f64 {
    moment_exact(spec(n, m), Complex::new(s, 0.0))
        .unwrap()
        .to_real()
}

fn selberg(k: u32, alpha: f64, beta: f64) -> f64 {
    selberg_integral(SelbergParams64::real(k, alpha, beta, 1.0).unwrap())
        .unwrap()
        .to_real()
}

#[test]
fn several_angles_match_tensor_quadrature() {
    for (n, m) in [(0u32, 2usize), (1, 2), (2, 2), (1, 3)] {
        for s in [0.5, 1.0, 1.7, 3.0] {
            let got = exact(n, m as u32, s);
            let oracle = moment_by_tensor(n, m, s, 60);
            assert!(
                rel(got, oracle) < 1e-8,
                "n={n} M={m} s={s}: {got} vs {oracle}"
            );
        }
    }
}

#[test]
fn selberg_route_matches_gamma_product() {
    // M(s) = (n! 2^M)^s S_M(n + 1/2 + s, 1/2) / S_M(n + 1/2, 1/2)
    for n in 0..=3u32 {
        for m in 1..=8u32 {
            for s in [0.25, 1.0, 2.5] {
                let fact: f64 = (1..=n).map(f64::from).product();
                let a = n as f64 + 0.5;
                let via_selberg = (fact * 2f64.powi(m as i32)).powf(s) * selberg(m, a + s, 0.5)
                    / selberg(m, a, 0.5);
                let direct = exact(n, m, s);
                assert!(rel(direct, via_selberg) < 1e-12, "n={n} M={m} s={s}");
            }
        }
    }
}

#[test]
fn normalization_inverts_the_selberg_integral() {
    for n in 0..=5u32 {
        for m in 1..=20u32 {
            let c: f64 = normalization_c(spec(n, m)).to_real();
            let z = selberg(m, n as f64 + 0.5, 0.5);
            assert!((c * z - 1.0).abs() < 1e-12, "n={n} M={m}: {}", c * z);
            assert!((exact(n, m, 0.0) - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn haar_even_orthogonal_case() {
    for m in [1u32, 7, 25, 50] {
        for s in [0.5, 1.0, 2.0, 3.0] {
            let haar = moment_haar_so_even(m, Complex::new(s, 0.0))
                .unwrap()
                .to_real();
            assert!(rel(exact(0, m, s), haar) < 1e-12);
        }
    }
}

#[test]
fn barnes_form_agrees_with_product() {
    for n in 0..=3u32 {
        for m in [1u32, 4, 17, 60] {
            for s in [0.5, 1.0, 2.0, 3.5] {
                let g = moment_exact_barnes(spec(n, m), s).unwrap().to_real();
                assert!(rel(g, exact(n, m, s)) < 1e-9, "n={n} M={m} s={s}");
            }
        }
    }
}

#[test]
fn n_zero_first_moment_tends_to_barnes_constant() {
    // (2 pi)^{1/2} 2^{1/2} G(1/2) / G(3/2)
    let g_half = barnes_g(0.5f64).unwrap().modulus();
    let g_three_halves = barnes_g(1.5f64).unwrap().modulus();
    let limit = (2.0 * std::f64::consts::PI).sqrt() * 2f64.sqrt() * g_half / g_three_halves;
    assert!(rel(exact(0, 100_000, 1.0), limit) < 1e-4);
}

#[test]
fn large_m_ratio_example() {
    let sp = spec(1, 10_000);
    let ratio = exact(1, 10_000, 1.0) / moment_asymptotic(sp, 1.0).unwrap().to_real();
    assert!((0.99..=1.01).contains(&ratio));
}

#[test]
fn moments_at_complex_exponents_are_conjugate_symmetric() {
    let sp = spec(2, 5);
    let z = moment_exact(sp, Complex::new(0.7, 1.3))
        .unwrap()
        .to_complex();
    let w = moment_exact(sp, Complex::new(0.7, -1.3))
        .unwrap()
        .to_complex();
    assert!((z - w.conj()).norm() < 1e-13 * z.norm());
}

proptest! {
    #[test]
    fn moments_are_log_convex(n in 0u32..4, m in 1u32..30, s in 0.05f64..4.0, h in 0.01f64..0.5) {
        let l = |t: f64| exact(n, m, t).ln();
        prop_assert!(l(s) + l(s + 2.0 * h) - 2.0 * l(s + h) >= -1e-9);
    }

    #[test]
    fn moments_are_bounded_by_the_support(n in 0u32..4, m in 1u32..30, s in 0.1f64..5.0) {
        let fact: f64 = (1..=n).map(f64::from).product();
        let ln_x = fact.ln() + 2.0 * m as f64 * 2f64.ln();
        prop_assert!(exact(n, m, s).ln() <= s * ln_x + 1e-12);
    }

    #[test]
    fn lyapunov_inequality(n in 0u32..4, m in 1u32..20, s in 0.1f64..3.0, t in 0.1f64..3.0) {
        // <X^s>^{1/s} is nondecreasing in s
        let (lo, hi) = if s < t { (s, t) } else { (t, s) };
        prop_assert!(exact(n, m, lo).ln() / lo <= exact(n, m, hi).ln() / hi + 1e-10);
    }
}
