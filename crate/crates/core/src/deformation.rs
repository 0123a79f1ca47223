//! Deformed oscillator algebra of a two-dimensional oscillator on a sphere.
//!
//! The curvature `lambda = 1/R^2` enters only through the deformation
//! function `g(lambda, n)`; the cutoff `N` fixes a Fock space of dimension
//! `N + 1`. Ladder actions:
//!
//! ```text
//! A† |n> = g(lambda, n+1) chi_{n+1} |n+1>
//! A  |n> = g(lambda, n)   chi_n     |n-1>
//! chi_n  = sqrt(n (N + 1 - n))
//! ```

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::logspace::LogWeight;

/// Curvature and Fock cutoff shared by every computation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    curvature: f64,
    cutoff: usize,
}

impl ModelParams {
    pub fn new(curvature: f64, cutoff: usize) -> Result<Self> {
        if !curvature.is_finite() || curvature < 0.0 {
            return Err(Error::Domain(format!(
                "curvature must be finite and nonnegative, got {curvature}"
            )));
        }
        if cutoff < 1 {
            return Err(Error::Domain("cutoff must be at least 1".into()));
        }
        Ok(ModelParams { curvature, cutoff })
    }

    /// `lambda`.
    pub fn curvature(&self) -> f64 {
        self.curvature
    }

    /// `N`; the Fock space has dimension `N + 1`.
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.cutoff + 1
    }

    fn check_index(&self, n: usize, max: usize) -> Result<()> {
        if n > max {
            Err(Error::Domain(format!(
                "index {n} outside 0..={max} for cutoff N = {}",
                self.cutoff
            )))
        } else {
            Ok(())
        }
    }
}

/// Complex amplitudes over `|0>..|N>`.
///
/// Normalized unless returned by an operation documented as producing an
/// unnormalized vector (the raw ladder actions).
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    params: ModelParams,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(params: ModelParams, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != params.dim() {
            return Err(Error::Domain(format!(
                "state has {} amplitudes, expected {}",
                amplitudes.len(),
                params.dim()
            )));
        }
        Ok(StateVector { params, amplitudes })
    }

    /// The Fock state `|n>`.
    pub fn fock(params: ModelParams, n: usize) -> Result<Self> {
        params.check_index(n, params.cutoff)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); params.dim()];
        amplitudes[n] = Complex64::new(1.0, 0.0);
        Ok(StateVector { params, amplitudes })
    }

    pub fn params(&self) -> ModelParams {
        self.params
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Returns a unit-norm copy; `None` for the zero vector.
    pub fn normalized(&self) -> Option<StateVector> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return None;
        }
        Some(StateVector {
            params: self.params,
            amplitudes: self.amplitudes.iter().map(|a| a / norm).collect(),
        })
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|<self|other>|`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm()
    }
}

/// `g(lambda, n) = sqrt((lambda (N+1-n) + s)(lambda n + s))`, `s = sqrt(1 + lambda^2 / 2)`.
pub fn deformation_g(params: ModelParams, n: usize) -> Result<f64> {
    params.check_index(n, params.cutoff)?;
    Ok(g_unchecked(params, n))
}

fn g_unchecked(params: ModelParams, n: usize) -> f64 {
    let lambda = params.curvature;
    if lambda == 0.0 {
        return 1.0;
    }
    let s = (1.0 + 0.5 * lambda * lambda).sqrt();
    let upper = lambda * (params.cutoff + 1 - n) as f64 + s;
    let lower = lambda * n as f64 + s;
    (upper * lower).sqrt()
}

/// `ln [g(lambda, n)]! = sum_{k=1..n} ln g(lambda, k)`.
pub fn g_factorial_log(params: ModelParams, n: usize) -> Result<LogWeight> {
    params.check_index(n, params.cutoff)?;
    let mut acc = 0.0;
    for k in 1..=n {
        acc += g_unchecked(params, k).ln();
    }
    Ok(LogWeight::from_log(acc))
}

/// `chi_n = sqrt(n (N + 1 - n))`, defined for `0 <= n <= N + 1`.
pub fn chi(params: ModelParams, n: usize) -> Result<f64> {
    params.check_index(n, params.cutoff + 1)?;
    Ok(chi_unchecked(params, n))
}

fn chi_unchecked(params: ModelParams, n: usize) -> f64 {
    ((n * (params.cutoff + 1 - n)) as f64).sqrt()
}

/// Matrix element `<n+1| A† |n>`, zero for `n = N`.
fn raise_element(params: ModelParams, n: usize) -> f64 {
    if n >= params.cutoff {
        0.0
    } else {
        g_unchecked(params, n + 1) * chi_unchecked(params, n + 1)
    }
}

fn check_dim(params: ModelParams, state: &StateVector) -> Result<()> {
    if state.params.dim() != params.dim() {
        return Err(Error::Domain(format!(
            "state dimension {} does not match cutoff N = {}",
            state.params.dim(),
            params.cutoff
        )));
    }
    Ok(())
}

/// `A†` applied to `state`. The result is not renormalized.
pub fn apply_raise(params: ModelParams, state: &StateVector) -> Result<StateVector> {
    check_dim(params, state)?;
    let mut out = vec![Complex64::new(0.0, 0.0); params.dim()];
    for n in 0..params.cutoff {
        out[n + 1] = state.amplitudes[n] * raise_element(params, n);
    }
    Ok(StateVector {
        params,
        amplitudes: out,
    })
}

/// `A` applied to `state`. The result is not renormalized.
pub fn apply_lower(params: ModelParams, state: &StateVector) -> Result<StateVector> {
    check_dim(params, state)?;
    let mut out = vec![Complex64::new(0.0, 0.0); params.dim()];
    for n in 1..=params.cutoff {
        out[n - 1] = state.amplitudes[n] * raise_element(params, n - 1);
    }
    Ok(StateVector {
        params,
        amplitudes: out,
    })
}

/// `<n| [A, A†] |n> = (n+1) f_s^2(n+1) - n f_s^2(n)` with
/// `f_s(n) = sqrt(N + 1 - n) g(lambda, n)`; the first term vanishes at `n = N`.
pub fn commutator_diagonal(params: ModelParams, n: usize) -> Result<f64> {
    params.check_index(n, params.cutoff)?;
    let big_n = params.cutoff;
    let fs_sqr = |k: usize| (big_n + 1 - k) as f64 * g_unchecked(params, k).powi(2);
    let up = if n < big_n {
        (n + 1) as f64 * fs_sqr(n + 1)
    } else {
        0.0
    };
    let down = if n > 0 { n as f64 * fs_sqr(n) } else { 0.0 };
    Ok(up - down)
}
