//! Independent quadrature oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Nodes and weights mapped to [a, b].
pub fn mapped(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    gauss_legendre(n)
        .into_iter()
        .map(|(x, w)| (mid + half * x, w * half))
        .collect()
}

pub fn integrate(n: usize, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    mapped(n, a, b).into_iter().map(|(x, w)| w * f(x)).sum()
}

/// Unnormalized conditioned weight of a configuration of eigenangles.
pub fn weight(n: u32, angles: &[f64]) -> f64 {
    let mut w = 1.0;
    for (i, &a) in angles.iter().enumerate() {
        w *= (1.0 - a.cos()).powi(n as i32);
        for &b in &angles[i + 1..] {
            w *= (a.cos() - b.cos()).powi(2);
        }
    }
    w
}

/// Sum of `f` over the tensor grid of `dim` copies of `rule`.
pub fn tensor_sum(rule: &[(f64, f64)], dim: usize, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
    let mut idx = vec![0usize; dim];
    let mut pt = vec![0.0; dim];
    let mut total = 0.0;
    loop {
        let mut w = 1.0;
        for (d, &i) in idx.iter().enumerate() {
            pt[d] = rule[i].0;
            w *= rule[i].1;
        }
        total += w * f(&pt);
        let mut d = 0;
        loop {
            if d == dim {
                return total;
            }
            idx[d] += 1;
            if idx[d] < rule.len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// `<|Lambda^{(n)}(1)|^s>` by tensor quadrature over the eigenangles.
pub fn moment_by_tensor(n: u32, m: usize, s: f64, nodes: usize) -> f64 {
    let rule = mapped(nodes, 0.0, PI);
    let fact: f64 = (1..=n).map(f64::from).product();
    let z = tensor_sum(&rule, m, |a| weight(n, a));
    let num = tensor_sum(&rule, m, |a| {
        let v: f64 = fact * a.iter().map(|t| 2.0 * (1.0 - t.cos())).product::<f64>();
        weight(n, a) * v.powf(s)
    });
    num / z
}

pub fn rel(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}
