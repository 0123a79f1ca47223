//! Photon-number statistics and quadrature squeezing.
//!
//! Quadratures use the bare ladder operators, `a|n> = sqrt(n)|n-1>`, with
//! `X1 = (a e^{i phi} + a† e^{-i phi}) / 2` and
//! `X2 = (a e^{i phi} - a† e^{-i phi}) / 2i`. The states have finite support,
//! so `<a a†> = <a† a> + 1` holds exactly for them.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;

use crate::deformation::{chi, deformation_g, g_factorial_log, StateVector};
use crate::error::{Error, Result};
use crate::logspace::{ln_binomial, log_sum_exp};
use crate::states::{StateKind, StateSpec};

/// Mandel `Q`, undefined for states with zero mean photon number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mandel {
    Value(f64),
    Undefined,
}

impl Mandel {
    pub fn value(&self) -> Option<f64> {
        match self {
            Mandel::Value(q) => Some(*q),
            Mandel::Undefined => None,
        }
    }
}

impl fmt::Display for Mandel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mandel::Value(q) => write!(f, "{q}"),
            Mandel::Undefined => f.write_str("undefined"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhotonStatistics {
    pub pdf: Vec<f64>,
    pub mean: f64,
    pub second_moment: f64,
    /// Centered variance `<(n - <n>)^2>`.
    pub variance: f64,
    pub mandel_q: Mandel,
}

pub fn photon_statistics(state: &StateVector) -> PhotonStatistics {
    let pdf: Vec<f64> = state.amplitudes().iter().map(|a| a.norm_sqr()).collect();
    let mean: f64 = pdf.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
    let second_moment: f64 = pdf
        .iter()
        .enumerate()
        .map(|(n, p)| (n * n) as f64 * p)
        .sum();
    // Centered sum: the raw `<n^2> - <n>^2` cancels catastrophically near Fock states.
    let variance: f64 = pdf
        .iter()
        .enumerate()
        .map(|(n, p)| (n as f64 - mean).powi(2) * p)
        .sum();
    let mandel_q = if mean == 0.0 {
        Mandel::Undefined
    } else {
        Mandel::Value((variance - mean) / mean)
    };
    PhotonStatistics {
        pdf,
        mean,
        second_moment,
        variance,
        mandel_q,
    }
}

/// Photon-number distribution from the explicit `P_n` formulas of the
/// photon-added and photon-subtracted states, without building amplitudes.
pub fn closed_form_pdf(spec: &StateSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let params = spec.params;
    let big_n = params.cutoff();
    let m = spec.m;
    let ln_x = spec.mu.norm_sqr().ln();
    // x^j with x^0 = 1 even at x = 0.
    let ln_pow = |j: usize| if j == 0 { 0.0 } else { j as f64 * ln_x };
    let ln_gfact = |n: usize| g_factorial_log(params, n).map(|w| w.log_magnitude);

    let mut logs = vec![f64::NEG_INFINITY; params.dim()];
    match spec.kind {
        StateKind::PhotonAdded => {
            for (n, slot) in logs.iter_mut().enumerate().skip(m) {
                let mut chi_sq = 0.0;
                for i in n + 1 - m..=n {
                    chi_sq += 2.0 * chi(params, i)?.ln();
                }
                *slot = ln_binomial(big_n, n - m) + ln_pow(n - m) + 2.0 * ln_gfact(n)? + chi_sq;
            }
        }
        StateKind::PhotonSubtracted => {
            for (n, slot) in logs.iter_mut().enumerate().take(big_n - m + 1) {
                let mut chig_sq = 0.0;
                for i in n + 1..=n + m {
                    chig_sq += 2.0 * (chi(params, i)? * deformation_g(params, i)?).ln();
                }
                *slot =
                    ln_binomial(big_n, n + m) + ln_pow(n + m) + 2.0 * ln_gfact(n + m)? + chig_sq;
            }
        }
        other => {
            return Err(Error::Domain(format!(
                "closed-form distribution is defined for pacs and pscs, got {}",
                other.label()
            )))
        }
    }
    let log_c = log_sum_exp(&logs);
    if log_c == f64::NEG_INFINITY {
        return Err(Error::Degenerate("all photon-number weights vanish".into()));
    }
    Ok(logs.iter().map(|l| (l - log_c).exp()).collect())
}

/// `<a>`, `<a^2>` and `<a† a>` with the bare ladder operators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LadderMoments {
    pub a: Complex64,
    pub a2: Complex64,
    pub n: f64,
}

pub fn ladder_moments(state: &StateVector) -> LadderMoments {
    let c = state.amplitudes();
    let mut a = Complex64::new(0.0, 0.0);
    let mut a2 = Complex64::new(0.0, 0.0);
    let mut n_mean = 0.0;
    for k in 1..c.len() {
        a += c[k - 1].conj() * c[k] * (k as f64).sqrt();
        n_mean += k as f64 * c[k].norm_sqr();
        if k >= 2 {
            a2 += c[k - 2].conj() * c[k] * ((k * (k - 1)) as f64).sqrt();
        }
    }
    LadderMoments { a, a2, n: n_mean }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureReport {
    pub phase: f64,
    pub s1: f64,
    pub s2: f64,
    pub variance1: f64,
    pub variance2: f64,
}

impl QuadratureReport {
    /// `(s1 + 1)(s2 + 1) = 16 var1 var2`, bounded below by 1.
    pub fn uncertainty_product(&self) -> f64 {
        (self.s1 + 1.0) * (self.s2 + 1.0)
    }
}

impl LadderMoments {
    pub fn quadratures(&self, phase: f64) -> QuadratureReport {
        let e = Complex64::from_polar(1.0, phase);
        let squeeze = (self.a2 * e * e).re;
        let shifted = self.a * e;
        let mean1 = shifted.re;
        let mean2 = shifted.im;
        let variance1 = 0.25 * (2.0 * squeeze + 2.0 * self.n + 1.0) - mean1 * mean1;
        let variance2 = 0.25 * (-2.0 * squeeze + 2.0 * self.n + 1.0) - mean2 * mean2;
        QuadratureReport {
            phase,
            s1: 4.0 * variance1 - 1.0,
            s2: 4.0 * variance2 - 1.0,
            variance1,
            variance2,
        }
    }
}

pub fn quadrature_report(state: &StateVector, phase: f64) -> QuadratureReport {
    ladder_moments(state).quadratures(phase)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SqueezingMinimum {
    pub phase: f64,
    pub value: f64,
}

const GOLDEN_TOLERANCE: f64 = 1e-10;

/// Minimum of `min(s1, s2)` over `phi in [0, 2 pi)`: a uniform scan of
/// `grid_points` phases, then golden-section refinement around the best one.
pub fn min_squeezing(state: &StateVector, grid_points: usize) -> Result<SqueezingMinimum> {
    if grid_points < 8 {
        return Err(Error::Domain(format!(
            "min_squeezing needs at least 8 grid points, got {grid_points}"
        )));
    }
    let moments = ladder_moments(state);
    let h = |phi: f64| {
        let q = moments.quadratures(phi);
        q.s1.min(q.s2)
    };
    let step = TAU / grid_points as f64;
    let mut best = SqueezingMinimum {
        phase: 0.0,
        value: h(0.0),
    };
    for j in 1..grid_points {
        let phi = j as f64 * step;
        let v = h(phi);
        if v < best.value {
            best = SqueezingMinimum {
                phase: phi,
                value: v,
            };
        }
    }

    let refined = golden_section(h, best.phase - step, best.phase + step, GOLDEN_TOLERANCE);
    if refined.value < best.value {
        best = SqueezingMinimum {
            phase: refined.phase.rem_euclid(TAU),
            value: refined.value,
        };
    }
    Ok(best)
}

fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> SqueezingMinimum {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        }
    }
    let phase = 0.5 * (lo + hi);
    SqueezingMinimum {
        phase,
        value: f(phase),
    }
}
