//! Gauss–Legendre quadrature on intervals and (via a collapsed-square
//! mapping) on triangles.

use num_complex::Complex64;
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Default quadrature order used throughout the crate.
pub const DEFAULT_ORDER: usize = 16;

fn node_cache() -> &'static Mutex<BTreeMap<usize, Arc<Vec<(f64, f64)>>>> {
    static CACHE: OnceLock<Mutex<BTreeMap<usize, Arc<Vec<(f64, f64)>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(BTreeMap::new()))
}

/// Gauss–Legendre nodes and weights on [−1, 1], computed by Newton
/// iteration on the Legendre polynomial from the Chebyshev initial guess.
pub fn gauss_legendre(order: usize) -> Arc<Vec<(f64, f64)>> {
    assert!(order >= 1, "quadrature order must be positive");
    if let Some(hit) = node_cache().lock().unwrap().get(&order) {
        return hit.clone();
    }
    let n = order;
    let mut nodes = Vec::with_capacity(n);
    for k in 0..n {
        // Chebyshev-based initial guess, refined by Newton.
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes.push((x, w));
    }
    nodes.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let arc = Arc::new(nodes);
    node_cache().lock().unwrap().insert(order, arc.clone());
    arc
}

/// Legendre P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0f64, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// ∫_a^b f(x) dx.
pub fn integrate_interval<F>(f: F, a: f64, b: f64, order: usize) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let nodes = gauss_legendre(order);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = Complex64::new(0.0, 0.0);
    for &(x, w) in nodes.iter() {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// ∫_a^b split into `panels` equal panels (for integrands with localized
/// features longer than a single Gauss rule handles well).
pub fn integrate_interval_panels<F>(
    f: F,
    a: f64,
    b: f64,
    order: usize,
    panels: usize,
) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    assert!(panels >= 1);
    let mut acc = Complex64::new(0.0, 0.0);
    let h = (b - a) / panels as f64;
    for k in 0..panels {
        acc += integrate_interval(&f, a + k as f64 * h, a + (k + 1) as f64 * h, order);
    }
    acc
}

/// ∫ over the triangle with vertices v0, v1, v2 of a density f(x, y)
/// (the plain scalar integrand against dx dy, orientation-free: the area
/// Jacobian enters with |·|).
///
/// Uses the collapsed-square (Duffy) map of the tensor Gauss rule onto the
/// reference triangle, exact for total degree ≥ 2·order − 2.
pub fn integrate_triangle<F>(
    f: F,
    v0: (f64, f64),
    v1: (f64, f64),
    v2: (f64, f64),
    order: usize,
) -> Complex64
where
    F: Fn(f64, f64) -> Complex64,
{
    let nodes = gauss_legendre(order);
    let e1 = (v1.0 - v0.0, v1.1 - v0.1);
    let e2 = (v2.0 - v0.0, v2.1 - v0.1);
    let jac = (e1.0 * e2.1 - e1.1 * e2.0).abs();
    let mut acc = Complex64::new(0.0, 0.0);
    for &(xu, wu) in nodes.iter() {
        let u = 0.5 * (xu + 1.0);
        for &(xv, wv) in nodes.iter() {
            let v = 0.5 * (xv + 1.0);
            // Duffy map of the unit square onto the reference triangle.
            let (a, b) = (u * (1.0 - v), u * v);
            let x = v0.0 + a * e1.0 + b * e2.0;
            let y = v0.1 + a * e1.1 + b * e2.1;
            acc += wu * wv * u * f(x, y);
        }
    }
    acc * (0.25 * jac)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn re(f: f64) -> Complex64 {
        Complex64::new(f, 0.0)
    }

    #[test]
    fn nodes_symmetric_and_weights_sum_to_two() {
        for order in [1, 2, 5, 16, 31] {
            let nodes = gauss_legendre(order);
            let wsum: f64 = nodes.iter().map(|n| n.1).sum();
            assert_abs_diff_eq!(wsum, 2.0, epsilon = 1e-13);
            for k in 0..order {
                assert_abs_diff_eq!(
                    nodes[k].0,
                    -nodes[order - 1 - k].0,
                    epsilon = 1e-13
                );
            }
        }
    }

    #[test]
    fn exact_for_high_degree_monomials() {
        // Order 16 is exact through degree 31.
        for p in [0usize, 7, 20, 31] {
            let got = integrate_interval(|x| re(x.powi(p as i32)), 0.0, 1.0, 16);
            assert_abs_diff_eq!(got.re, 1.0 / (p as f64 + 1.0), epsilon = 1e-13);
        }
    }

    #[test]
    fn oscillatory_mean_is_zero() {
        let got = integrate_interval(
            |s| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * s),
            0.0,
            1.0,
            16,
        );
        assert!(got.norm() < 1e-12);
    }

    #[test]
    fn winding_integral_dz_over_z() {
        // ∮ dz/z over the unit circle = 2πi.
        let got = integrate_interval(
            |t| {
                let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t);
                let dz = Complex64::new(0.0, 2.0 * std::f64::consts::PI) * z;
                dz / z
            },
            0.0,
            1.0,
            16,
        );
        assert_abs_diff_eq!(got.re, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(got.im, 2.0 * std::f64::consts::PI, epsilon = 1e-12);
    }

    #[test]
    fn triangle_moments_on_reference() {
        // ∫ x^a y^b over {x, y ≥ 0, x + y ≤ 1} = a! b! / (a + b + 2)!.
        let fact = |n: u64| (1..=n).product::<u64>() as f64;
        for (a, b) in [(0u64, 0u64), (1, 0), (2, 3), (5, 5), (7, 2)] {
            let got = integrate_triangle(
                |x, y| re(x.powi(a as i32) * y.powi(b as i32)),
                (0.0, 0.0),
                (1.0, 0.0),
                (0.0, 1.0),
                16,
            );
            let want = fact(a) * fact(b) / fact(a + b + 2);
            assert_abs_diff_eq!(got.re, want, epsilon = 1e-13);
        }
    }

    #[test]
    fn triangle_area_any_orientation() {
        let area = integrate_triangle(|_, _| re(1.0), (2.0, 1.0), (5.0, 2.0), (3.0, 4.0), 4);
        assert_abs_diff_eq!(area.re, 4.0, epsilon = 1e-12);
        // Swapping two vertices must not flip the sign of an area density.
        let area2 = integrate_triangle(|_, _| re(1.0), (5.0, 2.0), (2.0, 1.0), (3.0, 4.0), 4);
        assert_abs_diff_eq!(area2.re, 4.0, epsilon = 1e-12);
    }

    #[test]
    fn panels_match_single_interval() {
        let f = |x: f64| re((3.0 * x).sin() * x.exp());
        let a = integrate_interval(f, -1.0, 2.0, 24);
        let b = integrate_interval_panels(f, -1.0, 2.0, 12, 8);
        assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-11);
    }
}
