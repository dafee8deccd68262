//! Gauss–Legendre quadrature on panels.
//!
//! Nodes and weights on the reference interval `[-1, 1]` are computed once per
//! order by Newton iteration on the Legendre polynomial and cached. All panel
//! layouts used elsewhere in the crate are built from fixed breakpoints plus
//! dyadic (geometric) refinement toward integrable singularities, so repeated
//! runs evaluate the integrand at bit-identical points.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Legendre polynomial value and derivative at `x` for degree `n`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn compute_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2, "quadrature order must be at least 2");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-based initial guess, then Newton.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        weights[i] = w;
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Cached Gauss–Legendre rule of order `n` on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static (Vec<f64>, Vec<f64>)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    map.entry(n)
        .or_insert_with(|| Box::leak(Box::new(compute_rule(n))))
}

/// Integral of `f` over the single panel `[a, b]` with an order-`n` rule.
pub fn integrate_panel<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Integral of `f` over consecutive panels given by `breaks` (sorted).
pub fn integrate_panels<F: FnMut(f64) -> f64>(f: &mut F, breaks: &[f64], n: usize) -> f64 {
    let mut acc = 0.0;
    for pair in breaks.windows(2) {
        if pair[1] > pair[0] {
            acc += integrate_panel(&mut *f, pair[0], pair[1], n);
        }
    }
    acc
}

/// Panel breakpoints on `[a, b]` refined dyadically toward `a`
/// (`levels` halvings), e.g. `a, a+w/2^L, ..., a+w/2, b`.
pub fn graded_breaks_left(a: f64, b: f64, levels: usize) -> Vec<f64> {
    let w = b - a;
    let mut breaks = Vec::with_capacity(levels + 2);
    breaks.push(a);
    for k in (1..=levels).rev() {
        breaks.push(a + w * 0.5f64.powi(k as i32));
    }
    breaks.push(b);
    breaks
}

/// Panel breakpoints on `[a, b]` refined dyadically toward `b`.
pub fn graded_breaks_right(a: f64, b: f64, levels: usize) -> Vec<f64> {
    let w = b - a;
    let mut breaks = Vec::with_capacity(levels + 2);
    breaks.push(a);
    for k in 1..=levels {
        breaks.push(b - w * 0.5f64.powi(k as i32));
    }
    breaks.push(b);
    breaks
}

/// Splits every panel of `breaks` into `2^level` equal subpanels.
pub fn refine_breaks(breaks: &[f64], level: usize) -> Vec<f64> {
    let parts = 1usize << level;
    let mut out = Vec::with_capacity((breaks.len() - 1) * parts + 1);
    for pair in breaks.windows(2) {
        for j in 0..parts {
            out.push(pair[0] + (pair[1] - pair[0]) * j as f64 / parts as f64);
        }
    }
    out.push(*breaks.last().unwrap());
    out
}

/// Geometric panel breakpoints from `a` to `b` with ratio 2, growing away
/// from `a`; first panel has width `min(h0, b - a)`.
pub fn geometric_breaks(a: f64, b: f64, h0: f64) -> Vec<f64> {
    debug_assert!(b > a && h0 > 0.0);
    let mut breaks = vec![a];
    let mut h = h0;
    let mut x = a;
    while x + h < b {
        x += h;
        breaks.push(x);
        h *= 2.0;
    }
    breaks.push(b);
    breaks
}

/// Merges sorted breakpoints with extra split points clipped to `[lo, hi]`,
/// deduplicating near-coincident entries.
pub fn merge_breaks(lo: f64, hi: f64, extra: &[f64]) -> Vec<f64> {
    let mut pts = vec![lo, hi];
    for &p in extra {
        if p > lo && p < hi {
            pts.push(p);
        }
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let tol = (hi - lo) * 1e-14;
    pts.dedup_by(|a, b| (*a - *b).abs() <= tol);
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_rule_integrates_polynomials_exactly() {
        // Order n is exact up to degree 2n-1.
        for &n in &[2usize, 6, 8, 10, 16] {
            let deg = 2 * n - 1;
            let exact = 2.0 / (deg as f64 + 1.0) * 0.0 + {
                // integral of x^(deg-1) over [-1,1]; deg-1 even
                2.0 / (deg as f64)
            };
            let got = integrate_panel(|x| x.powi(deg as i32 - 1), -1.0, 1.0, n);
            assert!((got - exact).abs() < 1e-13, "order {n}: {got} vs {exact}");
        }
    }

    #[test]
    fn gl_weights_sum_to_interval_length() {
        for &n in &[6usize, 16] {
            let (_, w) = gauss_legendre(n);
            let total: f64 = w.iter().sum();
            assert!((total - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn graded_panels_resolve_weak_singularity() {
        // integral of x^{-0.6} over (0,1] = 1/0.4
        // Error is dominated by the innermost panel, ~ (2^-60)^{0.4}.
        let breaks = graded_breaks_left(0.0, 1.0, 60);
        let got = integrate_panels(&mut |x: f64| x.powf(-0.6), &breaks, 16);
        assert!((got - 2.5).abs() < 1e-7, "got {got}");
    }

    #[test]
    fn refine_breaks_doubles_panels() {
        let base = vec![0.0, 1.0, 3.0];
        let fine = refine_breaks(&base, 1);
        assert_eq!(fine, vec![0.0, 0.5, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn geometric_breaks_cover_interval() {
        let b = geometric_breaks(1.0, 100.0, 0.5);
        assert_eq!(b.first().copied(), Some(1.0));
        assert_eq!(b.last().copied(), Some(100.0));
        assert!(b.windows(2).all(|p| p[1] > p[0]));
    }
}
