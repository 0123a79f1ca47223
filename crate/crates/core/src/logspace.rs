//! Signed/phased values stored as `phase * exp(log_magnitude)`.
//!
//! Products of deformation factors overflow `f64` long before the state
//! vectors they define become interesting, so every weight is carried here
//! and only exponentiated after subtracting the maximum log-magnitude of the
//! sum it belongs to.

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogWeight {
    /// Natural log of the magnitude; `-inf` encodes an exact zero.
    pub log_magnitude: f64,
    /// Unit-modulus phase factor.
    pub phase: Complex64,
}

impl LogWeight {
    pub const ZERO: LogWeight = LogWeight {
        log_magnitude: f64::NEG_INFINITY,
        phase: Complex64::new(1.0, 0.0),
    };

    pub const ONE: LogWeight = LogWeight {
        log_magnitude: 0.0,
        phase: Complex64::new(1.0, 0.0),
    };

    pub fn from_log(log_magnitude: f64) -> Self {
        LogWeight {
            log_magnitude,
            phase: Complex64::new(1.0, 0.0),
        }
    }

    pub fn from_value(value: Complex64) -> Self {
        let r = value.norm();
        if r == 0.0 {
            return LogWeight::ZERO;
        }
        LogWeight {
            log_magnitude: r.ln(),
            phase: value / r,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.log_magnitude == f64::NEG_INFINITY
    }

    /// `self^k` for a nonnegative integer power; `x^0 = 1` even for `x = 0`.
    pub fn powi(self, k: usize) -> LogWeight {
        if k == 0 {
            return LogWeight::ONE;
        }
        if self.is_zero() {
            return LogWeight::ZERO;
        }
        let angle = self.phase.arg() * k as f64;
        LogWeight {
            log_magnitude: self.log_magnitude * k as f64,
            phase: Complex64::from_polar(1.0, angle),
        }
    }

    /// Value after dividing by `exp(shift)`.
    pub fn shifted_value(&self, shift: f64) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        self.phase * (self.log_magnitude - shift).exp()
    }

    /// Raw value; only safe when the magnitude is known to be representable.
    pub fn value(&self) -> Complex64 {
        self.shifted_value(0.0)
    }
}

/// `ln(sum_i exp(logs[i]))`, summed in index order after a max-shift.
/// Returns `-inf` when every entry is `-inf` (or the slice is empty).
impl std::ops::Mul for LogWeight {
    type Output = LogWeight;

    fn mul(self, other: LogWeight) -> LogWeight {
        if self.is_zero() || other.is_zero() {
            return LogWeight::ZERO;
        }
        LogWeight {
            log_magnitude: self.log_magnitude + other.log_magnitude,
            phase: self.phase * other.phase,
        }
    }
}

pub fn log_sum_exp(logs: &[f64]) -> f64 {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut acc = 0.0;
    for &l in logs {
        acc += (l - max).exp();
    }
    max + acc.ln()
}

/// `ln C(n, k)` via log-gamma; `-inf` when `k > n`.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if k == 0 || k == n {
        return 0.0;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lse_matches_direct_sum_for_small_values() {
        let xs = [0.1_f64, 0.2, 0.3];
        let logs: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        assert_relative_eq!(log_sum_exp(&logs), 0.6_f64.ln(), max_relative = 1e-14);
    }

    #[test]
    fn lse_survives_huge_logs() {
        let logs = [1000.0, 1000.0];
        assert_relative_eq!(log_sum_exp(&logs), 1000.0 + 2f64.ln(), max_relative = 1e-15);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY; 3]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
    }

    #[test]
    fn binomials() {
        assert_relative_eq!(ln_binomial(5, 2).exp(), 10.0, max_relative = 1e-13);
        assert_relative_eq!(
            ln_binomial(200, 100).exp() / 9.054851465610328e58,
            1.0,
            max_relative = 1e-11
        );
        assert_eq!(ln_binomial(3, 4), f64::NEG_INFINITY);
    }

    #[test]
    fn zero_power_is_one() {
        assert_eq!(LogWeight::ZERO.powi(0), LogWeight::ONE);
        assert!(LogWeight::ZERO.powi(3).is_zero());
        let w = LogWeight::from_value(Complex64::new(0.0, 2.0)).powi(2);
        let v = w.value();
        assert_relative_eq!(v.re, -4.0, epsilon = 1e-14);
        assert_relative_eq!(v.im, 0.0, epsilon = 1e-14);
    }
}
