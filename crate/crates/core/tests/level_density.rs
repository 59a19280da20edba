mod common;

use std::f64::consts::PI;

use common::{integrate, mapped, rel, tensor_sum, weight};
use proptest::prelude::*;
use socdist::level_density::{
    finite_scaled_kernel, kernel, kernel_spectral, m_level_density, one_level_density,
    scaled_kernel, scaled_one_level, KernelContext,
};
use socdist::special_fn::{jacobi_norm, jacobi_poly};
use socdist::{EnsembleSpec, JacobiParams64};

fn ctx(n: u32, m: u32) -> KernelContext {
    KernelContext::new(EnsembleSpec::new(n, m).unwrap())
}

fn k(c: &KernelContext, t: f64, p: f64) -> f64 {
    kernel(c, t, p).unwrap()
}

#[test]
fn single_uniform_angle_kernel() {
    let c = ctx(0, 1);
    for t in [0.1, 1.0, 3.0] {
        assert!((k(&c, t, 2.0) - 1.0 / PI).abs() < 1e-14);
        assert!((one_level_density::<f64>(&c, t).unwrap() - 1.0 / PI).abs() < 1e-14);
    }
}

#[test]
fn one_level_density_counts_the_angles() {
    for n in 0..=3 {
        for m in [1, 2, 7, 20] {
            let c = ctx(n, m);
            let total = integrate(120, 0.0, PI, |t| one_level_density::<f64>(&c, t).unwrap());
            assert!(
                (total - m as f64).abs() < 1e-8 * m as f64,
                "n={n} M={m}: {total}"
            );
        }
    }
}

#[test]
fn kernel_reproduces_itself() {
    for n in 0..=2 {
        for m in [1, 4, 10] {
            let c = ctx(n, m);
            for &(t, p) in &[(0.3, 0.3), (0.5, 2.0), (1.7, 2.9)] {
                let conv = integrate(80, 0.0, PI, |u| {
                    (1.0 - u.cos()).powi(n as i32) * k(&c, t, u) * k(&c, u, p)
                });
                assert!(
                    (conv - k(&c, t, p)).abs() < 1e-7 * k(&c, t, t).abs(),
                    "n={n} M={m} ({t}, {p})"
                );
            }
        }
    }
}

#[test]
fn angle_and_jacobi_weights_agree() {
    // (1 - cos t)^n dt is (1 - x)^{n-1/2} (1 + x)^{-1/2} dx under x = cos t
    for n in 0..=3u32 {
        for j in 0..8 {
            let p = JacobiParams64::new(n as f64 - 0.5, -0.5, j).unwrap();
            let by_angle = integrate(60, 0.0, PI, |t| {
                jacobi_poly(p, t.cos()).powi(2) * (1.0 - t.cos()).powi(n as i32)
            });
            assert!(rel(by_angle, jacobi_norm(p)) < 1e-10, "n={n} j={j}");
        }
    }
}

#[test]
fn densities_are_nonnegative() {
    for n in 0..=4 {
        for m in [1, 3, 6, 15] {
            let c = ctx(n, m);
            for i in 0..1000 {
                let t = PI * i as f64 / 999.0;
                assert!(
                    one_level_density::<f64>(&c, t).unwrap() >= -1e-12,
                    "n={n} M={m} t={t}"
                );
            }
        }
    }
}

#[test]
fn two_level_density_matches_brute_force_marginal() {
    // R_2(t1, t2) = M (M - 1) * marginal of the normalized measure
    let (n, m) = (1u32, 4usize);
    let c = ctx(n, m as u32);
    let rule = mapped(30, 0.0, PI);
    let z = tensor_sum(&rule, m, |a| weight(n, a));
    for &(t1, t2) in &[(0.4, 1.1), (0.9, 2.5), (2.0, 2.8), (1.5, 0.2)] {
        let marginal = tensor_sum(&rule, m - 2, |rest| {
            let mut a = vec![t1, t2];
            a.extend_from_slice(rest);
            weight(n, &a)
        }) / z;
        let want = (m * (m - 1)) as f64 * marginal;
        let got = m_level_density(&c, &[t1, t2]).unwrap();
        assert!(rel(got, want) < 1e-4, "({t1}, {t2}): {got} vs {want}");
    }
}

#[test]
fn m_level_edge_cases() {
    let c = ctx(2, 5);
    let one = m_level_density(&c, &[0.7]).unwrap();
    assert!((one - one_level_density::<f64>(&c, 0.7).unwrap()).abs() < 1e-14);
    assert!(m_level_density::<f64>(&c, &[0.7, 0.7, 1.2]).unwrap().abs() < 1e-10);
    assert!(m_level_density::<f64>(&c, &[0.1; 6]).is_err());
    assert!(m_level_density::<f64>(&c, &[]).is_err());
}

#[test]
fn scaled_kernel_for_one_forced_eigenvalue_is_a_sine_kernel_difference() {
    let sinc = |x: f64| (PI * x).sin() / (PI * x);
    for &(t, p) in &[(0.5, 1.0), (0.2, 3.7), (2.5, 2.4)] {
        let want = sinc(t - p) - sinc(t + p);
        assert!((scaled_kernel(1, t, p).unwrap() - want).abs() < 1e-13);
    }
    assert!((scaled_one_level(1, 0.5f64).unwrap() - 1.0).abs() < 1e-14);
}

#[test]
fn scaled_density_has_unit_mean_far_out() {
    for n in 1..=5 {
        let mean = integrate(200, 50.0, 51.0, |t| scaled_one_level(n, t).unwrap());
        assert!((mean - 1.0).abs() < 0.01, "n={n}: {mean}");
    }
}

#[test]
fn scaled_densities_order_by_repulsion() {
    let vals: Vec<f64> = (1..=5)
        .map(|n| scaled_one_level(n, 0.05).unwrap())
        .collect();
    assert!(vals.windows(2).all(|w| w[1] < w[0]), "{vals:?}");
}

#[test]
fn finite_kernel_converges_to_the_bessel_limit() {
    for n in [1, 2] {
        let c = ctx(n, 2000);
        let finite: f64 = finite_scaled_kernel(&c, 0.7, 1.3).unwrap();
        assert!((finite - scaled_kernel(n, 0.7, 1.3).unwrap()).abs() < 1e-3);
    }
}

proptest! {
    #[test]
    fn christoffel_darboux_matches_spectral_sum(n in 0u32..4, m in 1u32..31, t in 0.0f64..PI, p in 0.0f64..PI) {
        let c = ctx(n, m);
        let a = k(&c, t, p);
        let b: f64 = kernel_spectral(&c, t, p).unwrap();
        let scale = kernel_spectral::<f64>(&c, t, t).unwrap().abs().max(kernel_spectral::<f64>(&c, p, p).unwrap().abs());
        prop_assert!((a - b).abs() <= 1e-8 * scale);
    }

    #[test]
    fn kernels_are_symmetric(n in 0u32..4, m in 1u32..20, t in 0.01f64..3.0, p in 0.01f64..3.0) {
        let c = ctx(n, m);
        prop_assert!((k(&c, t, p) - k(&c, p, t)).abs() <= 1e-13 * k(&c, t, t).abs().max(1.0));
        if n >= 1 {
            let (a, b) = (scaled_kernel(n, t, p).unwrap(), scaled_kernel(n, p, t).unwrap());
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }
}
