//! Coherent states on a sphere and their photon-added / photon-subtracted
//! descendants, normalized in log space.

use num_complex::Complex64;

use crate::deformation::{apply_lower, apply_raise, chi, deformation_g, ModelParams, StateVector};
use crate::error::{Error, Result};
use crate::logspace::{ln_binomial, log_sum_exp, LogWeight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StateKind {
    /// Deformed coherent state on the sphere.
    SphereCs,
    /// Flat-space (`lambda = 0`) truncated coherent state; curvature is ignored.
    FlatCs,
    /// `(A†)^m` applied to the sphere coherent state.
    PhotonAdded,
    /// `A^m` applied to the sphere coherent state.
    PhotonSubtracted,
}

impl StateKind {
    pub fn label(&self) -> &'static str {
        match self {
            StateKind::SphereCs => "sphere-cs",
            StateKind::FlatCs => "flat-cs",
            StateKind::PhotonAdded => "pacs",
            StateKind::PhotonSubtracted => "pscs",
        }
    }

    /// Inclusive photon-number support of an `m`-photon state with cutoff `N`.
    pub fn support(&self, cutoff: usize, m: usize) -> (usize, usize) {
        match self {
            StateKind::PhotonAdded => (m, cutoff),
            StateKind::PhotonSubtracted => (0, cutoff - m),
            _ => (0, cutoff),
        }
    }
}

impl std::str::FromStr for StateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sphere-cs" | "scs" | "sphere" => Ok(StateKind::SphereCs),
            "flat-cs" | "fcs" | "flat" => Ok(StateKind::FlatCs),
            "pacs" | "added" | "photon-added" => Ok(StateKind::PhotonAdded),
            "pscs" | "subtracted" | "photon-subtracted" => Ok(StateKind::PhotonSubtracted),
            other => Err(Error::Domain(format!("unknown state kind '{other}'"))),
        }
    }
}

/// Recipe for a state: kind, geometry, coherent amplitude `mu` and the
/// number `m` of added or subtracted photons.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateSpec {
    pub kind: StateKind,
    pub params: ModelParams,
    pub mu: Complex64,
    pub m: usize,
}

impl StateSpec {
    pub fn new(kind: StateKind, params: ModelParams, mu: Complex64, m: usize) -> Result<Self> {
        let spec = StateSpec {
            kind,
            params,
            mu,
            m,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn sphere(params: ModelParams, mu: Complex64) -> Self {
        StateSpec {
            kind: StateKind::SphereCs,
            params,
            mu,
            m: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu.re.is_finite() && self.mu.im.is_finite()) {
            return Err(Error::Domain("mu must be finite".into()));
        }
        if self.m > self.params.cutoff() {
            return Err(Error::Domain(format!(
                "m = {} exceeds cutoff N = {}",
                self.m,
                self.params.cutoff()
            )));
        }
        if matches!(self.kind, StateKind::SphereCs | StateKind::FlatCs) && self.m != 0 {
            return Err(Error::Domain(format!(
                "{} takes m = 0, got {}",
                self.kind.label(),
                self.m
            )));
        }
        Ok(())
    }
}

/// Running `ln [g(lambda, n)]!` for `n = 0..=N`.
pub(crate) fn g_factorial_table(params: ModelParams) -> Vec<f64> {
    let mut table = Vec::with_capacity(params.dim());
    let mut acc = 0.0;
    table.push(acc);
    for n in 1..=params.cutoff() {
        acc += deformation_g(params, n).expect("index in range").ln();
        table.push(acc);
    }
    table
}

fn ln_chi(params: ModelParams, n: usize) -> f64 {
    chi(params, n).expect("index in range").ln()
}

fn ln_g(params: ModelParams, n: usize) -> f64 {
    deformation_g(params, n).expect("index in range").ln()
}

/// Unnormalized amplitudes of the state as log-weights, index = photon number.
pub fn log_amplitudes(spec: &StateSpec) -> Result<Vec<LogWeight>> {
    spec.validate()?;
    let params = spec.params;
    let big_n = params.cutoff();
    let m = spec.m;
    let mu = LogWeight::from_value(spec.mu);
    let mut out = vec![LogWeight::ZERO; params.dim()];

    match spec.kind {
        StateKind::FlatCs => {
            for (n, w) in out.iter_mut().enumerate() {
                *w = LogWeight::from_log(0.5 * ln_binomial(big_n, n)) * mu.powi(n);
            }
        }
        StateKind::SphereCs => {
            let gf = g_factorial_table(params);
            for (n, w) in out.iter_mut().enumerate() {
                *w = LogWeight::from_log(0.5 * ln_binomial(big_n, n) + gf[n]) * mu.powi(n);
            }
        }
        StateKind::PhotonAdded => {
            let gf = g_factorial_table(params);
            for (n, w) in out.iter_mut().enumerate().skip(m) {
                let chi_prod: f64 = (n + 1 - m..=n).map(|i| ln_chi(params, i)).sum();
                let j = n - m;
                *w = LogWeight::from_log(0.5 * ln_binomial(big_n, j) + gf[n] + chi_prod)
                    * mu.powi(j);
            }
        }
        StateKind::PhotonSubtracted => {
            if m > 0 && spec.mu.norm() == 0.0 {
                return Err(Error::Degenerate(
                    "photon subtraction from the vacuum (mu = 0) annihilates the state".into(),
                ));
            }
            let gf = g_factorial_table(params);
            for (n, w) in out.iter_mut().enumerate().take(big_n - m + 1) {
                let chig_prod: f64 = (n + 1..=n + m)
                    .map(|i| ln_chi(params, i) + ln_g(params, i))
                    .sum();
                let j = n + m;
                *w = LogWeight::from_log(0.5 * ln_binomial(big_n, j) + gf[j] + chig_prod)
                    * mu.powi(j);
            }
        }
    }
    Ok(out)
}

/// `ln` of the normalization sum (`N(|mu|^2)` or `C_m^±(|mu|^2)`).
pub fn log_normalization(spec: &StateSpec) -> Result<f64> {
    let weights = log_amplitudes(spec)?;
    Ok(log_norm_of(&weights))
}

fn log_norm_of(weights: &[LogWeight]) -> f64 {
    let logs: Vec<f64> = weights.iter().map(|w| 2.0 * w.log_magnitude).collect();
    log_sum_exp(&logs)
}

/// Normalized state for `spec`, computed from the closed-form amplitudes.
pub fn build_state(spec: &StateSpec) -> Result<StateVector> {
    let weights = log_amplitudes(spec)?;
    let log_c = log_norm_of(&weights);
    if log_c == f64::NEG_INFINITY {
        return Err(Error::Degenerate(format!(
            "every amplitude of {} vanishes",
            spec.kind.label()
        )));
    }
    let half = 0.5 * log_c;
    let amplitudes = weights.iter().map(|w| w.shifted_value(half)).collect();
    StateVector::new(spec.params, amplitudes)
}

/// The same state built by applying the deformed ladder operator `m` times
/// to the sphere coherent state.
pub fn state_by_ladder(spec: &StateSpec) -> Result<StateVector> {
    spec.validate()?;
    let step: fn(ModelParams, &StateVector) -> Result<StateVector> = match spec.kind {
        StateKind::PhotonAdded => apply_raise,
        StateKind::PhotonSubtracted => apply_lower,
        other => {
            return Err(Error::Domain(format!(
                "ladder construction needs pacs or pscs, got {}",
                other.label()
            )))
        }
    };
    let mut state = build_state(&StateSpec::sphere(spec.params, spec.mu))?;
    for _ in 0..spec.m {
        state = step(spec.params, &state)?
            .normalized()
            .ok_or_else(|| Error::Degenerate("ladder action produced the zero vector".into()))?;
    }
    Ok(state)
}
