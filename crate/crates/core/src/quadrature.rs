//! Quadrature rules used by the distribution code and by the
//! cross-validation checks.
//!
//! Everything here is built from elementary functions only, so the rules can
//! serve as oracles for the gamma-function closed forms.

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, w * half))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss-Legendre over `panels` equal pieces of `[a, b]`.
pub fn composite_gauss<F: FnMut(f64) -> f64>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    panels: usize,
    mut f: F,
) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let lo = a + h * p as f64;
            rule.integrate(lo, lo + h, &mut f)
        })
        .sum()
}

/// One node of a tanh-sinh rule on `[a, b]`: the abscissa, its distances to
/// both endpoints (computed without cancellation) and the weight.
#[derive(Debug, Clone, Copy)]
pub struct TanhSinhNode {
    pub x: f64,
    pub from_left: f64,
    pub from_right: f64,
    pub weight: f64,
}

/// Tanh-sinh nodes on `[a, b]` with step `h`, truncated where the weights
/// underflow.
pub fn tanh_sinh_nodes(a: f64, b: f64, h: f64) -> Vec<TanhSinhNode> {
    let half = 0.5 * (b - a);
    let mut out = Vec::new();
    let kmax = (4.0 / h).ceil() as i64;
    for k in -kmax..=kmax {
        let t = k as f64 * h;
        let u = 0.5 * PI * t.sinh();
        let cu = u.cosh();
        // distance to the nearer endpoint, 1 - tanh|u| = 2 / (1 + e^{2|u|}),
        // computed directly so it never comes out of a cancellation
        let near = 2.0 / (1.0 + (2.0 * u.abs()).exp());
        let (one_plus, one_minus) = if u >= 0.0 {
            (2.0 - near, near)
        } else {
            (near, 2.0 - near)
        };
        let w = 0.5 * PI * t.cosh() / (cu * cu) * h * half;
        let from_left = half * one_plus;
        let from_right = half * one_minus;
        if !(w > 1e-300) || from_left <= 0.0 || from_right <= 0.0 {
            continue;
        }
        out.push(TanhSinhNode {
            x: a + from_left,
            from_left,
            from_right,
            weight: w,
        });
    }
    out
}

/// Adaptive tanh-sinh integration: halves the step until two successive
/// estimates agree to `rel_tol`. `f` receives `(x, x - a, b - x)`.
pub fn tanh_sinh<F: FnMut(f64, f64, f64) -> f64>(a: f64, b: f64, rel_tol: f64, mut f: F) -> f64 {
    let mut h = 0.5;
    let mut prev = f64::NAN;
    for _ in 0..8 {
        let est: f64 = tanh_sinh_nodes(a, b, h)
            .iter()
            .map(|nd| nd.weight * f(nd.x, nd.from_left, nd.from_right))
            .sum();
        if (est - prev).abs() <= rel_tol * est.abs() {
            return est;
        }
        prev = est;
        h *= 0.5;
    }
    prev
}
