//! Numerical check of the resolution of identity
//! `int d^2 mu M(|mu|^2) |mu, m><mu, m| = 1` on the support subspace.
//!
//! The angular integral is analytic: it kills every off-diagonal element and
//! leaves `pi int_0^inf dx` with `x = |mu|^2`. For a measure
//! `M = (N+1)/pi * h(x)` the diagonal element is
//! `(N+1) int_0^inf P_n(x) h(x) dx`, evaluated after `x = t / (1 - t)`.

use nalgebra::DMatrix;

use crate::deformation::{chi, deformation_g, g_factorial_log, ModelParams};
use crate::error::{Error, Result};
use crate::logspace::{ln_binomial, log_sum_exp, LogWeight};
use crate::quadrature::{integrate_adaptive, DEFAULT_PANEL_CAP};
use crate::states::StateKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Added,
    Subtracted,
}

impl Branch {
    pub fn state_kind(&self) -> StateKind {
        match self {
            Branch::Added => StateKind::PhotonAdded,
            Branch::Subtracted => StateKind::PhotonSubtracted,
        }
    }
}

impl std::str::FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.parse::<StateKind>()? {
            StateKind::PhotonAdded => Ok(Branch::Added),
            StateKind::PhotonSubtracted => Ok(Branch::Subtracted),
            other => Err(Error::Domain(format!(
                "identity resolution needs pacs or pscs, got {}",
                other.label()
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MeasureMode {
    /// `h(x) = 1 / (1 + x)^2`; exact for the flat coherent state (`lambda = 0, m = 0`).
    FlatExact,
    /// `h(x) = 1 / D(x)^beta` with `D` the deformed binomial sum.
    PaperLiteral { beta: f64 },
}

impl MeasureMode {
    pub const DEFAULT_BETA: f64 = 2.0;

    pub fn literal() -> Self {
        MeasureMode::PaperLiteral {
            beta: Self::DEFAULT_BETA,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResolutionReport {
    /// `(N+1) x (N+1)`, diagonal after the angular integral.
    pub matrix: DMatrix<f64>,
    /// Inclusive photon-number window on which the identity is resolved.
    pub support: (usize, usize),
    pub max_offdiag: f64,
    /// `|diag_n - 1|` for `n` in `support`, in order.
    pub diag_deviation: Vec<f64>,
    pub quadrature_error_estimate: f64,
    pub panels: usize,
}

impl ResolutionReport {
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.matrix.nrows())
            .map(|i| self.matrix[(i, i)])
            .collect()
    }

    pub fn max_diag_deviation(&self) -> f64 {
        self.diag_deviation.iter().copied().fold(0.0, f64::max)
    }
}

/// Per-index `(ln coefficient, power of x)` of the deformed binomial
/// expansion, with the `mu^{-+2m}` factors cancelled so the sum depends on
/// `x = |mu|^2` alone. Indices outside the support get `-inf`.
fn expansion_terms(params: ModelParams, m: usize, branch: Branch) -> Result<Vec<(f64, usize)>> {
    let big_n = params.cutoff();
    if m > big_n {
        return Err(Error::Domain(format!("m = {m} exceeds cutoff N = {big_n}")));
    }
    let mut terms = vec![(f64::NEG_INFINITY, 0usize); params.dim()];
    match branch {
        Branch::Added => {
            for (n, term) in terms.iter_mut().enumerate().skip(m) {
                let mut ln_c =
                    ln_binomial(big_n, n - m) + 2.0 * g_factorial_log(params, n)?.log_magnitude;
                for i in n + 1 - m..=n {
                    ln_c += 2.0 * chi(params, i)?.ln();
                }
                *term = (ln_c, n - m);
            }
        }
        Branch::Subtracted => {
            for (n, term) in terms.iter_mut().enumerate().take(big_n - m + 1) {
                let mut ln_c =
                    ln_binomial(big_n, n + m) + 2.0 * g_factorial_log(params, n + m)?.log_magnitude;
                for i in n + 1..=n + m {
                    ln_c += 2.0 * (chi(params, i)? * deformation_g(params, i)?).ln();
                }
                *term = (ln_c, n + m);
            }
        }
    }
    Ok(terms)
}

fn ln_power(ln_x: f64, j: usize) -> f64 {
    if j == 0 {
        0.0
    } else {
        j as f64 * ln_x
    }
}

fn ln_expansion(terms: &[(f64, usize)], ln_x: f64) -> f64 {
    let logs: Vec<f64> = terms.iter().map(|&(c, j)| c + ln_power(ln_x, j)).collect();
    log_sum_exp(&logs)
}

/// `(1 + x)^±_{lambda, m}`: the deformed binomial sum, equal to the state
/// normalization `C_m^±` at `|mu|^2 = x`.
pub fn deformed_binomial_sum(
    params: ModelParams,
    m: usize,
    branch: Branch,
    x: f64,
) -> Result<LogWeight> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!("x must be nonnegative, got {x}")));
    }
    let terms = expansion_terms(params, m, branch)?;
    Ok(LogWeight::from_log(ln_expansion(&terms, x.ln())))
}

pub fn resolution_matrix(
    params: ModelParams,
    m: usize,
    branch: Branch,
    measure: MeasureMode,
    radial_tolerance: f64,
) -> Result<ResolutionReport> {
    if radial_tolerance.is_nan() || radial_tolerance <= 0.0 {
        return Err(Error::Domain("radial tolerance must be positive".into()));
    }
    match measure {
        MeasureMode::FlatExact if params.curvature() != 0.0 || m != 0 => {
            return Err(Error::Domain(
                "the flat measure applies only to lambda = 0, m = 0".into(),
            ))
        }
        MeasureMode::PaperLiteral { beta } if !beta.is_finite() => {
            return Err(Error::Domain("measure exponent must be finite".into()))
        }
        _ => {}
    }

    let terms = expansion_terms(params, m, branch)?;
    let support = branch.state_kind().support(params.cutoff(), m);
    let ln_dim = (params.dim() as f64).ln();

    let mut report = ResolutionReport {
        matrix: DMatrix::zeros(params.dim(), params.dim()),
        support,
        max_offdiag: 0.0,
        diag_deviation: Vec::with_capacity(support.1 - support.0 + 1),
        quadrature_error_estimate: 0.0,
        panels: 0,
    };

    for n in support.0..=support.1 {
        let (ln_c, j) = terms[n];
        let integrand = |t: f64| {
            let ln_one_minus_t = (-t).ln_1p();
            let ln_x = t.ln() - ln_one_minus_t;
            let ln_d = ln_expansion(&terms, ln_x);
            let ln_h = match measure {
                // ln(1 + x) = -ln(1 - t)
                MeasureMode::FlatExact => 2.0 * ln_one_minus_t,
                MeasureMode::PaperLiteral { beta } => -beta * ln_d,
            };
            // dx = dt / (1 - t)^2
            (ln_dim + ln_c + ln_power(ln_x, j) - ln_d + ln_h - 2.0 * ln_one_minus_t).exp()
        };
        match integrate_adaptive(integrand, 0.0, 1.0, radial_tolerance, DEFAULT_PANEL_CAP) {
            Ok(r) => {
                report.matrix[(n, n)] = r.value;
                report.diag_deviation.push((r.value - 1.0).abs());
                report.quadrature_error_estimate += r.error_estimate;
                report.panels += r.panels;
            }
            Err(partial) => {
                report.panels += partial.panels;
                return Err(Error::QuadratureFailure {
                    index: n,
                    panels: partial.panels,
                    partial: Box::new(report),
                });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{log_normalization, StateSpec};
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn p(lambda: f64, n: usize) -> ModelParams {
        ModelParams::new(lambda, n).unwrap()
    }

    #[test]
    fn flat_sum_is_binomial() {
        for x in [0.0, 0.3, 1.0, 7.0] {
            let v = deformed_binomial_sum(p(0.0, 6), 0, Branch::Added, x).unwrap();
            assert_relative_eq!(v.log_magnitude, 6.0 * (1.0_f64 + x).ln(), epsilon = 1e-12);
        }
    }

    #[test]
    fn full_addition_has_single_term() {
        let params = p(0.7, 4);
        let a = deformed_binomial_sum(params, 4, Branch::Added, 0.3).unwrap();
        let b = deformed_binomial_sum(params, 4, Branch::Added, 30.0).unwrap();
        assert_relative_eq!(a.log_magnitude, b.log_magnitude, epsilon = 1e-12);
    }

    #[test]
    fn sum_equals_state_normalization() {
        for lambda in [0.0, 0.5, 3.0] {
            for big_n in [1, 4, 9] {
                for m in 0..=big_n {
                    for branch in [Branch::Added, Branch::Subtracted] {
                        for x in [0.01, 0.5, 2.0, 40.0] {
                            let d = deformed_binomial_sum(p(lambda, big_n), m, branch, x).unwrap();
                            let spec = StateSpec::new(
                                branch.state_kind(),
                                p(lambda, big_n),
                                Complex64::new(x.sqrt(), 0.0),
                                m,
                            )
                            .unwrap();
                            let c = log_normalization(&spec).unwrap();
                            assert_relative_eq!(
                                d.log_magnitude,
                                c,
                                epsilon = 1e-12,
                                max_relative = 1e-13
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn flat_measure_resolves_identity() {
        for big_n in [1, 2, 5, 10] {
            let r = resolution_matrix(
                p(0.0, big_n),
                0,
                Branch::Added,
                MeasureMode::FlatExact,
                1e-10,
            )
            .unwrap();
            assert_eq!(r.max_offdiag, 0.0);
            assert!(
                r.max_diag_deviation() < 1e-6,
                "N={big_n}: {:?}",
                r.diag_deviation
            );
            for i in 0..=big_n {
                for j in 0..=big_n {
                    if i != j {
                        assert_eq!(r.matrix[(i, j)], 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn flat_measure_rejects_deformed_states() {
        assert!(
            resolution_matrix(p(0.1, 3), 0, Branch::Added, MeasureMode::FlatExact, 1e-8).is_err()
        );
        assert!(
            resolution_matrix(p(0.0, 3), 1, Branch::Added, MeasureMode::FlatExact, 1e-8).is_err()
        );
        assert!(
            resolution_matrix(p(0.0, 3), 0, Branch::Added, MeasureMode::FlatExact, 0.0).is_err()
        );
    }

    #[test]
    fn refinement_does_not_degrade_flat_result() {
        for big_n in [2, 5, 10] {
            let mut last = f64::INFINITY;
            for tol in [1e-3, 1e-6, 1e-9, 1e-12] {
                let r =
                    resolution_matrix(p(0.0, big_n), 0, Branch::Added, MeasureMode::FlatExact, tol)
                        .unwrap();
                let dev = r.max_diag_deviation();
                assert!(dev <= last + 1e-14, "N={big_n} tol={tol}: {dev} > {last}");
                last = dev;
            }
        }
    }

    #[test]
    fn literal_mode_reports_zero_outside_support() {
        let r =
            resolution_matrix(p(0.5, 5), 1, Branch::Added, MeasureMode::literal(), 1e-9).unwrap();
        assert_eq!(r.support, (1, 5));
        assert_eq!(r.matrix[(0, 0)], 0.0);
        assert_eq!(r.diag_deviation.len(), 5);
        assert!(r.diagonal().iter().all(|d| d.is_finite() && *d >= 0.0));
        let s = resolution_matrix(
            p(0.5, 5),
            0,
            Branch::Subtracted,
            MeasureMode::literal(),
            1e-9,
        )
        .unwrap();
        assert_eq!(s.support, (0, 5));
    }

    // With m >= 1 the subtracted expansion vanishes like x^m at the origin, so
    // the literal measure makes the n = 0 integrand non-integrable.
    #[test]
    fn literal_subtracted_divergence_is_reported() {
        let err = resolution_matrix(
            p(0.5, 5),
            1,
            Branch::Subtracted,
            MeasureMode::literal(),
            1e-9,
        )
        .unwrap_err();
        match err {
            Error::QuadratureFailure { index, partial, .. } => {
                assert_eq!(index, 0);
                assert_eq!(partial.support, (0, 4));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
