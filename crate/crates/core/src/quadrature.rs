//! Panel-adaptive 15-point Gauss-Legendre quadrature on a finite interval.

use std::sync::OnceLock;

pub const GL_ORDER: usize = 15;

/// Maximum number of live plus accepted panels.
pub const DEFAULT_PANEL_CAP: usize = 10_000;

/// Bisection depth after which a panel is declared non-convergent.
const MAX_DEPTH: u32 = 64;

/// Nodes and weights on `[-1, 1]`, found by Newton iteration on `P_15`.
pub fn gauss_legendre_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| legendre_rule(GL_ORDER))
}

fn legendre_rule(order: usize) -> Vec<(f64, f64)> {
    let n = order as f64;
    let mut rule = Vec::with_capacity(order);
    for i in 0..order {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(x) and P_n'(x) by the three-term recurrence.
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((x, w));
    }
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    rule
}

fn panel<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> f64 {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    gauss_legendre_rule()
        .iter()
        .map(|&(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Sum over accepted panels of `|two halves - whole|`.
    pub error_estimate: f64,
    pub panels: usize,
}

/// Integrates `f` over `[a, b]`, bisecting every panel whose two-half
/// estimate differs from its one-panel estimate by more than its share
/// `tol * width / (b - a)` of the tolerance.
///
/// On non-convergence (panel cap or depth limit) returns `Err` with the
/// partial sum accumulated so far.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    panel_cap: usize,
) -> Result<Integral, Integral> {
    let total_width = b - a;
    let mut stack = vec![(a, b, panel(&f, a, b), 0u32)];
    let mut result = Integral {
        value: 0.0,
        error_estimate: 0.0,
        panels: 0,
    };
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = panel(&f, lo, mid);
        let right = panel(&f, mid, hi);
        let refined = left + right;
        let diff = (refined - whole).abs();
        let share = tol * (hi - lo) / total_width;
        let floor = 50.0 * f64::EPSILON * refined.abs();
        if !refined.is_finite() {
            return Err(result);
        }
        if diff <= share.max(floor) {
            result.value += refined;
            result.error_estimate += diff;
            result.panels += 1;
            continue;
        }
        if depth >= MAX_DEPTH || result.panels + stack.len() + 2 > panel_cap {
            return Err(result);
        }
        stack.push((mid, hi, right, depth + 1));
        stack.push((lo, mid, left, depth + 1));
    }
    Ok(result)
}
