//! Complex polynomials and their roots (companion-matrix eigenvalues,
//! then Newton polishing).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Coefficients in ascending order: `c[0] + c[1] z + ... + c[k] z^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Index of the highest nonzero coefficient; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| c.norm() != 0.0)
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// `(p(z), p'(z))` by Horner.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let (mut p, mut dp) = (zero, zero);
        for c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `|p(z)| / max |c_i|`.
    pub fn relative_residual(&self, z: Complex64) -> f64 {
        self.eval(z).norm() / self.max_coeff()
    }

    /// All roots, with multiplicity.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let degree = self
            .degree()
            .ok_or_else(|| Error::NumericalFailure("roots of the zero polynomial".into()))?;
        let lead = self.coeffs[degree];
        let raw = match degree {
            0 => Vec::new(),
            1 => vec![-self.coeffs[0] / lead],
            _ => companion_eigenvalues(&self.coeffs[..=degree])?,
        };
        Ok(raw.into_iter().map(|z| self.polish(z)).collect())
    }

    /// Newton iteration from `z`, returning the iterate with the smallest residual.
    pub fn polish(&self, z: Complex64) -> Complex64 {
        let mut best = z;
        let mut best_res = self.eval(z).norm();
        let mut cur = z;
        for _ in 0..100 {
            let (p, dp) = self.eval_with_derivative(cur);
            if p.norm() == 0.0 || dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            cur -= step;
            let res = self.eval(cur).norm();
            if res < best_res {
                best_res = res;
                best = cur;
            }
            if step.norm() <= 4.0 * f64::EPSILON * cur.norm().max(f64::MIN_POSITIVE) {
                break;
            }
        }
        best
    }
}

fn companion_eigenvalues(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let k = coeffs.len() - 1;
    let lead = coeffs[k];
    let mut companion = DMatrix::<Complex64>::zeros(k, k);
    for i in 1..k {
        companion[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..k {
        companion[(i, k - 1)] = -coeffs[i] / lead;
    }
    let eig = companion.schur().eigenvalues().ok_or_else(|| {
        Error::NumericalFailure("companion matrix Schur form did not converge".into())
    })?;
    Ok(eig.iter().copied().collect())
}
