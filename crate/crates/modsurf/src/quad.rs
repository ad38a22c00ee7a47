//! Internal quadrature helpers: Gauss–Legendre panels and a bisection-based
//! adaptive rule for piecewise-smooth integrands.

use std::sync::OnceLock;

/// Gauss–Legendre nodes and weights on [-1, 1], computed once by Newton
/// iteration on the Legendre recurrence.
fn gl_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0f64, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0f64, x);
        for k in 2..=n {
            let k = k as f64;
            let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn cached_rule(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static R8: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    static R16: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    static R32: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    static R64: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    match n {
        8 => R8.get_or_init(|| gl_rule(8)),
        16 => R16.get_or_init(|| gl_rule(16)),
        32 => R32.get_or_init(|| gl_rule(32)),
        64 => R64.get_or_init(|| gl_rule(64)),
        _ => panic!("uncached Gauss-Legendre order {n}"),
    }
}

/// n-point Gauss–Legendre on [a, b].
pub fn gl<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    let (nodes, weights) = cached_rule(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        sum += w * f(mid + half * x);
    }
    sum * half
}

/// Composite Gauss–Legendre: `panels` equal panels of `n` points each.
pub fn gl_panels<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize, panels: usize) -> f64 {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for k in 0..panels {
        sum += gl(&mut f, a + k as f64 * h, a + (k + 1) as f64 * h, n);
    }
    sum
}

/// Adaptive bisection with a GL16-vs-two-GL16 error estimate. `tol` is
/// treated as an absolute tolerance on each accepted panel, scaled by the
/// panel fraction of the interval.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, max_depth: u32) -> f64 {
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let mid = 0.5 * (a + b);
        let left = gl(f, a, mid, 16);
        let right = gl(f, mid, b, 16);
        if depth == 0 || (left + right - whole).abs() <= tol {
            return left + right;
        }
        rec(f, a, mid, left, 0.5 * tol, depth - 1) + rec(f, mid, b, right, 0.5 * tol, depth - 1)
    }
    let whole = gl(f, a, b, 16);
    rec(f, a, b, whole, tol, max_depth)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_polynomials_exact() {
        // GL16 integrates degree-31 polynomials exactly
        let v = gl(|x| x.powi(20), 0.0, 1.0, 16);
        assert!((v - 1.0 / 21.0).abs() < 1e-15, "{v}");
        let v = gl(|x| (3.0 * x).sin(), 0.0, 2.0, 32);
        let exact = (1.0 - 6.0f64.cos()) / 3.0;
        assert!((v - exact).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_peaks() {
        let f = |x: f64| 1.0 / ((x - 0.3).powi(2) + 1e-4);
        let v = adaptive(&f, 0.0, 1.0, 1e-12, 40);
        let exact = 100.0 * ((0.7f64 / 0.01).atan() + (0.3f64 / 0.01).atan());
        assert!((v - exact).abs() < 1e-8 * exact, "{v} vs {exact}");
    }
}
