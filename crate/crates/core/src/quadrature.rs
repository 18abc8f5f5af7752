//! Gauss-Legendre nodes and weights, adaptive 1-D integration, and a
//! deterministic pairwise summation used by every integral in the crate.

/// Gauss-Legendre nodes and weights on (-1, 1).
///
/// Nodes computed by Newton iteration on the Legendre polynomial with the
/// Chebyshev initial guess; accurate to machine precision for the small
/// orders used here.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // initial guess (roots ordered decreasing in this formula)
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Adaptive Gauss-Legendre integration of `f` on `[a, b]` to the given
/// relative tolerance (with an absolute floor of 1e-14).
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (nodes, weights) = gauss_legendre(15);
    let whole = panel(f, a, b, &nodes, &weights);
    adapt(f, a, b, whole, rel_tol, &nodes, &weights, 0)
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, nodes: &[f64], weights: &[f64]) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

#[allow(clippy::too_many_arguments)]
fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    rel_tol: f64,
    nodes: &[f64],
    weights: &[f64],
    depth: usize,
) -> f64 {
    let mid = 0.5 * (a + b);
    let left = panel(f, a, mid, nodes, weights);
    let right = panel(f, mid, b, nodes, weights);
    let refined = left + right;
    let err = (refined - whole).abs();
    if depth >= 40 || err <= rel_tol * refined.abs().max(1e-14) {
        refined
    } else {
        adapt(f, a, mid, left, rel_tol, nodes, weights, depth + 1)
            + adapt(f, mid, b, right, rel_tol, nodes, weights, depth + 1)
    }
}

/// Deterministic pairwise summation over a fixed binary tree.
///
/// Independent of thread count and chunking, so reports are byte-identical
/// across runs.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}
