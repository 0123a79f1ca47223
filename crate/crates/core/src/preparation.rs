//! Conditional preparation of a cavity field by a sequence of two-level
//! atoms, each injected in `|e> + eps_k |g>` and detected in `|g>`.
//!
//! Forward map for atom `k` with interaction `g_tau`:
//!
//! ```text
//! phi_n^(k) = sin(g_tau sqrt(n)) phi_{n-1}^(k-1) - eps_k cos(g_tau sqrt(n)) phi_n^(k-1)
//! ```
//!
//! Synthesis runs the map backwards from the target, one photon of support
//! at a time, choosing `eps_k` among the roots of a degree-`k` polynomial.
//! A target with no vacuum component is stepped down with `eps = 0` (a fully
//! excited atom), which is the only choice that can reach the vacuum.

use std::io::{self, Write};

use num_complex::Complex64;

use crate::deformation::StateVector;
use crate::error::{Error, Result};
use crate::format::sig12;
use crate::poly::Polynomial;
use crate::states::StateSpec;

/// Schedule entries with `|cos|` or `|sin|` below this are rejected.
pub const SCHEDULE_GUARD: f64 = 1e-6;
pub const SCHEDULE_NUDGE: f64 = 0.05;
pub const SCHEDULE_RETRIES: usize = 20;
pub const DEFAULT_G_TAU: f64 = 1.0;

/// Roots are accepted when `|p(eps)| / max |coeff|` is below this.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-10;
/// Roots smaller than this are treated as zero.
pub const ZERO_ROOT: f64 = 1e-12;
/// Relative size under which the vacuum amplitude counts as absent.
const VACUUM_ABSENT: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootPolicy {
    MaxSuccessProbability,
    SmallestMagnitude,
}

impl std::str::FromStr for RootPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "max-success" | "max-success-probability" | "max" => {
                Ok(RootPolicy::MaxSuccessProbability)
            }
            "smallest" | "smallest-magnitude" | "min" => Ok(RootPolicy::SmallestMagnitude),
            other => Err(Error::Domain(format!("unknown root policy '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanStep {
    /// Atom index, `1..=K`; the field has support `0..=k` after this atom.
    pub k: usize,
    pub epsilon: Complex64,
    pub g_tau: f64,
    /// Probability of detecting this atom in `|g>`.
    pub p_g: f64,
    /// `|p(eps)| / max |coeff|` of the characteristic polynomial at `eps`.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PreparationPlan {
    pub steps: Vec<PlanStep>,
    pub target: StateVector,
    pub success_probability: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Simulation {
    pub final_state: StateVector,
    pub fidelity: f64,
    pub success_probability: f64,
    pub step_probabilities: Vec<f64>,
}

fn trig(g_tau: f64, n: usize) -> (f64, f64) {
    (g_tau * (n as f64).sqrt()).sin_cos()
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

/// Ground-detection branch of one atom passage. `field` has support
/// `0..field.len()`; the result has one more entry and is not normalized.
pub fn forward_step(field: &[Complex64], epsilon: Complex64, g_tau: f64) -> Vec<Complex64> {
    let k = field.len();
    let zero = Complex64::new(0.0, 0.0);
    (0..=k)
        .map(|n| {
            let (s, c) = trig(g_tau, n);
            let below = if n >= 1 { field[n - 1] } else { zero };
            let here = if n < k { field[n] } else { zero };
            below * s - epsilon * c * here
        })
        .collect()
}

/// Excited-detection branch: `e_n = cos(g_tau sqrt(n+1)) phi_n + eps sin(g_tau sqrt(n+1)) phi_{n+1}`.
/// Together with [`forward_step`] it carries the full norm `(1 + |eps|^2) |phi|^2`.
pub fn excited_branch(field: &[Complex64], epsilon: Complex64, g_tau: f64) -> Vec<Complex64> {
    let k = field.len();
    (0..k)
        .map(|n| {
            let (s, c) = trig(g_tau, n + 1);
            let above = if n + 1 < k {
                field[n + 1]
            } else {
                Complex64::new(0.0, 0.0)
            };
            field[n] * c + epsilon * s * above
        })
        .collect()
}

/// `p_g = |forward_step(field)|^2 / (1 + |eps|^2)` for a normalized `field`.
pub fn ground_probability(field: &[Complex64], epsilon: Complex64, g_tau: f64) -> f64 {
    norm_sqr(&forward_step(field, epsilon, g_tau)) / (1.0 + epsilon.norm_sqr())
}

fn check_trig(g_tau: f64, k: usize) -> Result<()> {
    for n in 1..=k {
        let (s, c) = trig(g_tau, n);
        if n < k && c.abs() < SCHEDULE_GUARD {
            return Err(Error::IllConditioned(format!(
                "cos(g_tau sqrt({n})) = {c:e} for g_tau = {g_tau}"
            )));
        }
        if s.abs() < SCHEDULE_GUARD {
            return Err(Error::IllConditioned(format!(
                "sin(g_tau sqrt({n})) = {s:e} for g_tau = {g_tau}"
            )));
        }
    }
    Ok(())
}

/// Polynomial in `eps` whose roots let `target` (support `0..=k`) be reached
/// from a field with support `0..k`:
///
/// ```text
/// p_0 = -psi_0
/// p_n = (sin_n p_{n-1} - eps^n psi_n) / cos_n,   n = 1..k-1
/// p   = psi_k eps^k - sin_k p_{k-1}
/// ```
///
/// The preceding field is then `phi_n = p_n(eps) / eps^{n+1}`.
pub fn characteristic_polynomial(target: &[Complex64], g_tau: f64) -> Result<Polynomial> {
    let k = target
        .len()
        .checked_sub(1)
        .filter(|&k| k >= 1)
        .ok_or_else(|| Error::Domain("target needs support of at least two states".into()))?;
    if target[k].norm() == 0.0 {
        return Err(Error::Domain(format!(
            "target amplitude at n = {k} is zero"
        )));
    }
    check_trig(g_tau, k)?;

    let zero = Complex64::new(0.0, 0.0);
    let mut partial = vec![-target[0]];
    for n in 1..k {
        let (s, c) = trig(g_tau, n);
        let mut next = vec![zero; n + 1];
        for (i, a) in partial.iter().enumerate() {
            next[i] += a * s;
        }
        next[n] -= target[n];
        for a in next.iter_mut() {
            *a /= c;
        }
        partial = next;
    }
    let (s, _) = trig(g_tau, k);
    let mut coeffs = vec![zero; k + 1];
    coeffs[k] = target[k];
    for (i, a) in partial.iter().enumerate() {
        coeffs[i] -= a * s;
    }
    Ok(Polynomial::new(coeffs))
}

/// Field before the atom, unnormalized, given the target (support `0..=k`)
/// and a root `eps` of its characteristic polynomial.
///
/// The forward map gives `k + 1` equations for `k` unknowns. Solving from the
/// top (`phi_{n-1} = (psi_n + eps cos_n phi_n) / sin_n`) divides by `sin`;
/// solving from the vacuum (`phi_0 = -psi_0 / eps`, then
/// `phi_n = (sin_n phi_{n-1} - psi_n) / (eps cos_n)`, i.e. `p_n(eps) / eps^{n+1}`)
/// divides by `eps`. Both agree for an exact root; the one that reproduces the
/// target more closely under [`forward_step`] is returned. For `eps = 0` only the
/// top-down solution exists and it is the pure downward shift.
pub fn back_substitute(target: &[Complex64], epsilon: Complex64, g_tau: f64) -> Vec<Complex64> {
    let top = back_substitute_from_top(target, epsilon, g_tau);
    if epsilon.norm() == 0.0 {
        return top;
    }
    let bottom = back_substitute_from_vacuum(target, epsilon, g_tau);
    if forward_mismatch(target, &bottom, epsilon, g_tau)
        < forward_mismatch(target, &top, epsilon, g_tau)
    {
        bottom
    } else {
        top
    }
}

fn back_substitute_from_top(
    target: &[Complex64],
    epsilon: Complex64,
    g_tau: f64,
) -> Vec<Complex64> {
    let k = target.len() - 1;
    let mut prev = vec![Complex64::new(0.0, 0.0); k];
    prev[k - 1] = target[k] / trig(g_tau, k).0;
    for n in (1..k).rev() {
        let (s, c) = trig(g_tau, n);
        prev[n - 1] = (target[n] + epsilon * c * prev[n]) / s;
    }
    prev
}

fn back_substitute_from_vacuum(
    target: &[Complex64],
    epsilon: Complex64,
    g_tau: f64,
) -> Vec<Complex64> {
    let k = target.len() - 1;
    let mut prev = Vec::with_capacity(k);
    prev.push(-target[0] / epsilon);
    for n in 1..k {
        let (s, c) = trig(g_tau, n);
        let phi = (prev[n - 1] * s - target[n]) / (epsilon * c);
        prev.push(phi);
    }
    prev
}

/// `1 - |<target|forward>| / (|target| |forward|)`; infinite if the forward image vanishes.
fn forward_mismatch(
    target: &[Complex64],
    previous: &[Complex64],
    epsilon: Complex64,
    g_tau: f64,
) -> f64 {
    let image = forward_step(previous, epsilon, g_tau);
    let overlap: Complex64 = target.iter().zip(&image).map(|(t, f)| t.conj() * f).sum();
    let denom = (norm_sqr(target) * norm_sqr(&image)).sqrt();
    if denom == 0.0 || !denom.is_finite() {
        return f64::INFINITY;
    }
    1.0 - overlap.norm() / denom
}

/// Applies the deterministic nudge `g_tau += 0.05` (at most 20 times) to
/// every entry of the first `steps` entries that hits a zero of cos or sin.
pub fn validate_schedule(schedule: &[f64], steps: usize) -> Result<Vec<f64>> {
    if schedule.len() < steps {
        return Err(Error::Domain(format!(
            "schedule has {} entries, {} atoms needed",
            schedule.len(),
            steps
        )));
    }
    let mut out = Vec::with_capacity(steps);
    for (i, &g_tau) in schedule[..steps].iter().enumerate() {
        if !g_tau.is_finite() || g_tau <= 0.0 {
            return Err(Error::Domain(format!(
                "g_tau must be positive, got {g_tau}"
            )));
        }
        let k = i + 1;
        let mut g = g_tau;
        let mut retries = 0;
        while let Err(e) = check_trig(g, k) {
            if retries == SCHEDULE_RETRIES {
                return Err(e);
            }
            g += SCHEDULE_NUDGE;
            retries += 1;
        }
        out.push(g);
    }
    Ok(out)
}

pub fn uniform_schedule(steps: usize, g_tau: f64) -> Vec<f64> {
    vec![g_tau; steps]
}

struct Candidate {
    epsilon: Complex64,
    previous: Vec<Complex64>,
    p_g: f64,
    residual: f64,
}

fn lexicographic(a: Complex64, b: Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn pick(candidates: Vec<Candidate>, policy: RootPolicy) -> Option<Candidate> {
    candidates.into_iter().min_by(|a, b| {
        let primary = match policy {
            RootPolicy::MaxSuccessProbability => b.p_g.total_cmp(&a.p_g),
            RootPolicy::SmallestMagnitude => a.epsilon.norm().total_cmp(&b.epsilon.norm()),
        };
        primary.then_with(|| lexicographic(a.epsilon, b.epsilon))
    })
}

fn normalize(v: &mut [Complex64]) -> bool {
    let norm = norm_sqr(v).sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return false;
    }
    for a in v.iter_mut() {
        *a /= norm;
    }
    true
}

/// Backward synthesis of the atomic amplitudes that prepare `target` from
/// the vacuum. `g_tau_schedule[k - 1]` is used for atom `k`.
pub fn synthesize_plan(
    target: &StateVector,
    g_tau_schedule: &[f64],
    root_policy: RootPolicy,
) -> Result<PreparationPlan> {
    let amps = target.amplitudes();
    let top = match amps.iter().rposition(|a| a.norm() != 0.0) {
        Some(k) => k,
        None => return Err(Error::Domain("target is the zero vector".into())),
    };
    let schedule = validate_schedule(g_tau_schedule, top)?;

    let mut psi = amps[..=top].to_vec();
    if !normalize(&mut psi) {
        return Err(Error::Domain("target cannot be normalized".into()));
    }
    let mut steps = Vec::with_capacity(top);
    for k in (1..=top).rev() {
        let g_tau = schedule[k - 1];
        let scale = psi.iter().map(|a| a.norm()).fold(0.0, f64::max);

        let chosen = if psi[0].norm() <= VACUUM_ABSENT * scale {
            let mut previous = back_substitute(&psi, Complex64::new(0.0, 0.0), g_tau);
            if !normalize(&mut previous) {
                return Err(Error::SynthesisFailure(format!(
                    "empty field before atom {k}"
                )));
            }
            let eps = Complex64::new(0.0, 0.0);
            Candidate {
                p_g: ground_probability(&previous, eps, g_tau),
                epsilon: eps,
                previous,
                residual: psi[0].norm() / scale,
            }
        } else {
            let poly = characteristic_polynomial(&psi, g_tau)?;
            let roots = poly.roots()?;
            let nonzero: Vec<Complex64> = roots
                .into_iter()
                .filter(|r| r.norm() >= ZERO_ROOT)
                .collect();
            if nonzero.is_empty() {
                return Err(Error::SynthesisFailure(format!(
                    "every root of the degree-{k} polynomial vanishes"
                )));
            }
            let mut candidates = Vec::new();
            let mut worst = 0.0_f64;
            for eps in nonzero {
                let residual = poly.relative_residual(eps);
                worst = worst.max(residual);
                if residual >= ROOT_RESIDUAL_TOL {
                    continue;
                }
                let mut previous = back_substitute(&psi, eps, g_tau);
                if !normalize(&mut previous) {
                    continue;
                }
                candidates.push(Candidate {
                    p_g: ground_probability(&previous, eps, g_tau),
                    epsilon: eps,
                    previous,
                    residual,
                });
            }
            pick(candidates, root_policy).ok_or_else(|| {
                Error::NumericalFailure(format!(
                    "no root of the degree-{k} polynomial polished below {ROOT_RESIDUAL_TOL:e} (best {worst:e})"
                ))
            })?
        };

        steps.push(PlanStep {
            k,
            epsilon: chosen.epsilon,
            g_tau,
            p_g: chosen.p_g,
            residual: chosen.residual,
        });
        psi = chosen.previous;
    }
    steps.reverse();
    let success_probability = steps.iter().map(|s| s.p_g).product();
    Ok(PreparationPlan {
        steps,
        target: target.clone(),
        success_probability,
    })
}

/// Runs the plan forward from the vacuum, conditioning on ground-state
/// detection of every atom.
pub fn simulate_plan(plan: &PreparationPlan) -> Result<Simulation> {
    let params = plan.target.params();
    if plan.steps.len() > params.cutoff() {
        return Err(Error::Domain(format!(
            "plan has {} atoms but the cutoff is N = {}",
            plan.steps.len(),
            params.cutoff()
        )));
    }
    let mut field = vec![Complex64::new(1.0, 0.0)];
    let mut step_probabilities = Vec::with_capacity(plan.steps.len());
    for step in &plan.steps {
        let mut next = forward_step(&field, step.epsilon, step.g_tau);
        let weight = norm_sqr(&next);
        if !normalize(&mut next) {
            return Err(Error::SimulationFailure(format!(
                "field vanished after atom {}",
                step.k
            )));
        }
        step_probabilities.push(weight / (1.0 + step.epsilon.norm_sqr()));
        field = next;
    }
    field.resize(params.dim(), Complex64::new(0.0, 0.0));
    let final_state = StateVector::new(params, field)?;
    let target = plan
        .target
        .normalized()
        .ok_or_else(|| Error::Domain("target is the zero vector".into()))?;
    Ok(Simulation {
        fidelity: target.fidelity(&final_state),
        final_state,
        success_probability: step_probabilities.iter().product(),
        step_probabilities,
    })
}

/// Plan as CSV: a metadata header row and its values, then one record per atom.
///
/// ```text
/// N,lambda,mu_re,mu_im,m,kind,fidelity,success_probability
/// ...
/// k,eps_re,eps_im,g_tau,p_g
/// ...
/// ```
pub fn write_plan_csv<W: Write>(
    mut out: W,
    spec: &StateSpec,
    plan: &PreparationPlan,
    simulation: &Simulation,
) -> io::Result<()> {
    writeln!(
        out,
        "N,lambda,mu_re,mu_im,m,kind,fidelity,success_probability"
    )?;
    writeln!(
        out,
        "{},{},{},{},{},{},{},{}",
        spec.params.cutoff(),
        sig12(spec.params.curvature()),
        sig12(spec.mu.re),
        sig12(spec.mu.im),
        spec.m,
        spec.kind.label(),
        sig12(simulation.fidelity),
        sig12(simulation.success_probability)
    )?;
    writeln!(out, "k,eps_re,eps_im,g_tau,p_g")?;
    for s in &plan.steps {
        writeln!(
            out,
            "{},{},{},{},{}",
            s.k,
            sig12(s.epsilon.re),
            sig12(s.epsilon.im),
            sig12(s.g_tau),
            sig12(s.p_g)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deformation::ModelParams;
    use crate::states::{build_state, StateKind};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn flat_one_photon() -> StateVector {
        let spec = StateSpec::new(
            StateKind::FlatCs,
            ModelParams::new(0.0, 1).unwrap(),
            c(1.0, 0.0),
            0,
        )
        .unwrap();
        build_state(&spec).unwrap()
    }

    #[test]
    fn forward_step_examples() {
        let field = [c(0.6, 0.1), c(-0.3, 0.7)];
        let eps = c(0.4, -1.1);
        let out = forward_step(&field, eps, 0.8);
        assert_eq!(out.len(), 3);
        assert_eq!(out[0], -eps * field[0]);

        let vac = forward_step(&[c(1.0, 0.0)], eps, 1.3);
        assert_eq!(vac[0], -eps);
        assert_relative_eq!(vac[1].re, 1.3f64.sin(), epsilon = 1e-15);

        let shifted = forward_step(&field, c(0.0, 0.0), 0.8);
        assert_eq!(shifted[0], c(0.0, 0.0));
        for n in 1..3 {
            assert_eq!(shifted[n], field[n - 1] * (0.8 * (n as f64).sqrt()).sin());
        }
    }

    #[test]
    fn atom_passage_is_unitary() {
        let mut field = vec![c(0.2, 0.1), c(-0.5, 0.3), c(0.4, -0.6), c(0.1, 0.2)];
        normalize(&mut field);
        for eps in [c(0.0, 0.0), c(1.0, 0.0), c(-0.3, 2.2)] {
            for g_tau in [0.3, 1.0, 2.7] {
                let pg = ground_probability(&field, eps, g_tau);
                let pe = norm_sqr(&excited_branch(&field, eps, g_tau)) / (1.0 + eps.norm_sqr());
                assert_relative_eq!(pg + pe, 1.0, epsilon = 1e-14);
            }
        }
    }

    // Hand solution of the two-component recursion: eps = -sin(g_tau) psi_0 / psi_1.
    #[test]
    fn linear_polynomial_for_one_photon_target() {
        let target = flat_one_photon();
        let poly = characteristic_polynomial(target.amplitudes(), 1.0).unwrap();
        assert_eq!(poly.degree(), Some(1));
        let roots = poly.roots().unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - c(-1f64.sin(), 0.0)).norm() < 1e-12);
        assert_relative_eq!(roots[0].re, -0.841471, epsilon = 1e-6);
    }

    #[test]
    fn polynomial_has_full_degree() {
        let spec = StateSpec::new(
            StateKind::PhotonSubtracted,
            ModelParams::new(0.5, 7).unwrap(),
            c(1.0, 0.3),
            1,
        )
        .unwrap();
        let s = build_state(&spec).unwrap();
        let support = &s.amplitudes()[..=6];
        for k in 1..=6 {
            let poly = characteristic_polynomial(&support[..=k], 1.0).unwrap();
            assert_eq!(poly.degree(), Some(k));
        }
    }

    // Oracle: phi_n = p_n(eps) / eps^{n+1}, with p_n from its own recursion.
    #[test]
    fn back_substitution_matches_partial_polynomials() {
        let target = [c(0.3, 0.1), c(0.5, -0.2), c(-0.4, 0.3), c(0.2, 0.5)];
        let g_tau = 1.1;
        let roots = characteristic_polynomial(&target, g_tau)
            .unwrap()
            .roots()
            .unwrap();
        assert_eq!(roots.len(), 3);
        for eps in roots {
            check_partial_polynomials(&target, eps, g_tau);
        }
    }

    fn check_partial_polynomials(target: &[Complex64], eps: Complex64, g_tau: f64) {
        let mut p: Vec<Complex64> = vec![-target[0]];
        let mut values = vec![p[0]];
        for n in 1..3 {
            let (s, cs) = trig(g_tau, n);
            let prev_val = values[n - 1];
            let val = (prev_val * s - eps.powu(n as u32) * target[n]) / cs;
            values.push(val);
            p.push(val);
        }
        let prev = back_substitute(target, eps, g_tau);
        for n in 0..3 {
            let expected = values[n] / eps.powu(n as u32 + 1);
            assert!((prev[n] - expected).norm() < 1e-12 * expected.norm().max(1.0));
        }
        let image = forward_step(&prev, eps, g_tau);
        for n in 0..4 {
            assert!((image[n] - target[n]).norm() < 1e-12);
        }
    }

    #[test]
    fn fock_target_uses_excited_atoms() {
        let params = ModelParams::new(0.0, 4).unwrap();
        let target = StateVector::fock(params, 3).unwrap();
        let poly = characteristic_polynomial(&target.amplitudes()[..=3], 1.0).unwrap();
        assert!(poly.coeffs()[..3].iter().all(|a| a.norm() == 0.0));
        let previous = back_substitute(&target.amplitudes()[..=3], c(0.0, 0.0), 1.0);
        assert_eq!(previous.len(), 3);
        assert!(previous[..2].iter().all(|a| a.norm() == 0.0));
        assert!(previous[2].norm() > 0.0);

        let plan = synthesize_plan(
            &target,
            &uniform_schedule(3, 1.0),
            RootPolicy::MaxSuccessProbability,
        )
        .unwrap();
        assert!(plan.steps.iter().all(|s| s.epsilon.norm() == 0.0));
        let expected: f64 = (1..=3).map(|n| (n as f64).sqrt().sin().powi(2)).product();
        assert_relative_eq!(plan.success_probability, expected, epsilon = 1e-14);
        let sim = simulate_plan(&plan).unwrap();
        assert_relative_eq!(sim.fidelity, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn vacuum_target_gives_empty_plan() {
        let target = StateVector::fock(ModelParams::new(0.3, 5).unwrap(), 0).unwrap();
        let plan = synthesize_plan(&target, &[], RootPolicy::MaxSuccessProbability).unwrap();
        assert!(plan.steps.is_empty());
        assert_eq!(plan.success_probability, 1.0);
        let sim = simulate_plan(&plan).unwrap();
        assert_eq!(sim.success_probability, 1.0);
        assert_eq!(sim.final_state, target);
    }

    #[test]
    fn one_photon_flat_target_plan() {
        let plan = synthesize_plan(
            &flat_one_photon(),
            &[1.0],
            RootPolicy::MaxSuccessProbability,
        )
        .unwrap();
        assert_eq!(plan.steps.len(), 1);
        assert!((plan.steps[0].epsilon - c(-1f64.sin(), 0.0)).norm() < 1e-12);
        let sim = simulate_plan(&plan).unwrap();
        assert!(sim.fidelity > 1.0 - 1e-14);
    }

    #[test]
    fn schedule_validation() {
        // sqrt(1) * pi / 2: cos vanishes for n = 1, used by atoms k >= 2.
        let bad = std::f64::consts::FRAC_PI_2;
        let fixed = validate_schedule(&[1.0, bad, 1.0], 3).unwrap();
        assert_eq!(fixed[0], 1.0);
        assert_relative_eq!(fixed[1], bad + SCHEDULE_NUDGE, epsilon = 1e-15);
        assert!(validate_schedule(&[1.0], 2).is_err());
        assert!(validate_schedule(&[-1.0], 1).is_err());
        assert!(matches!(
            characteristic_polynomial(&[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)], bad),
            Err(Error::IllConditioned(_))
        ));
    }

    #[test]
    fn smallest_magnitude_policy_also_roundtrips() {
        let spec = StateSpec::new(
            StateKind::PhotonAdded,
            ModelParams::new(0.5, 5).unwrap(),
            c(1.0, 0.0),
            1,
        )
        .unwrap();
        let target = build_state(&spec).unwrap();
        let best = synthesize_plan(
            &target,
            &uniform_schedule(5, 1.0),
            RootPolicy::MaxSuccessProbability,
        )
        .unwrap();
        let small = synthesize_plan(
            &target,
            &uniform_schedule(5, 1.0),
            RootPolicy::SmallestMagnitude,
        )
        .unwrap();
        assert!(simulate_plan(&small).unwrap().fidelity > 1.0 - 1e-8);
        assert_eq!(best.steps.len(), 5);
        // Greedy per-step choice: the last atom's detection probability is maximal.
        assert!(best.steps[4].p_g >= small.steps[4].p_g - 1e-12);
    }

    #[test]
    fn roundtrip_grid() {
        for big_n in 1..=8 {
            for kind in [StateKind::PhotonAdded, StateKind::PhotonSubtracted] {
                for lambda in [0.0, 0.5, 2.0] {
                    for mu in [0.5, 1.0] {
                        for m in 0..=2usize.min(big_n) {
                            let spec = StateSpec::new(
                                kind,
                                ModelParams::new(lambda, big_n).unwrap(),
                                c(mu, 0.0),
                                m,
                            )
                            .unwrap();
                            let target = build_state(&spec).unwrap();
                            let plan = synthesize_plan(
                                &target,
                                &uniform_schedule(big_n, 1.0),
                                RootPolicy::MaxSuccessProbability,
                            )
                            .unwrap();
                            let sim = simulate_plan(&plan).unwrap();
                            let label = format!("{kind:?} N={big_n} lambda={lambda} mu={mu} m={m}");
                            assert!(
                                sim.fidelity >= 1.0 - 1e-8,
                                "{label}: fidelity {}",
                                sim.fidelity
                            );
                            assert!(
                                plan.steps.iter().all(|s| s.residual < ROOT_RESIDUAL_TOL),
                                "{label}"
                            );
                            assert!(
                                (sim.success_probability - plan.success_probability).abs() < 1e-12,
                                "{label}"
                            );
                            assert!(
                                plan.success_probability > 0.0 && plan.success_probability <= 1.0,
                                "{label}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn success_probability_falls_with_photon_number() {
        let mut last = 1.0;
        for big_n in 1..=8 {
            let spec = StateSpec::new(
                StateKind::FlatCs,
                ModelParams::new(0.0, big_n).unwrap(),
                c(1.0, 0.0),
                0,
            )
            .unwrap();
            let plan = synthesize_plan(
                &build_state(&spec).unwrap(),
                &uniform_schedule(big_n, 1.0),
                RootPolicy::MaxSuccessProbability,
            )
            .unwrap();
            assert!(plan.success_probability < last);
            last = plan.success_probability;
        }
    }

    #[test]
    fn plan_csv_layout() {
        let spec = StateSpec::new(
            StateKind::FlatCs,
            ModelParams::new(0.0, 1).unwrap(),
            c(1.0, 0.0),
            0,
        )
        .unwrap();
        let plan = synthesize_plan(
            &build_state(&spec).unwrap(),
            &[1.0],
            RootPolicy::MaxSuccessProbability,
        )
        .unwrap();
        let sim = simulate_plan(&plan).unwrap();
        let mut buf = Vec::new();
        write_plan_csv(&mut buf, &spec, &plan, &sim).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "N,lambda,mu_re,mu_im,m,kind,fidelity,success_probability"
        );
        assert!(lines[1].starts_with("1,0,1,0,0,flat-cs,1,"));
        assert_eq!(lines[2], "k,eps_re,eps_im,g_tau,p_g");
        assert!(lines[3].starts_with("1,-0.841470984808,0,1,"));
        assert_eq!(lines.len(), 4);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn forward_step_respects_support(len in 1usize..10, re in -1.0f64..1.0, im in -1.0f64..1.0, g_tau in 0.1f64..3.0) {
            let field: Vec<Complex64> = (0..len).map(|i| c(re + i as f64 * 0.1, im)).collect();
            let out = forward_step(&field, c(im, re), g_tau);
            prop_assert_eq!(out.len(), len + 1);
        }

        #[test]
        fn random_targets_roundtrip(big_n in 1usize..8, seed in proptest::collection::vec(-1.0f64..1.0, 16)) {
            let params = ModelParams::new(0.0, big_n).unwrap();
            let amps: Vec<Complex64> = (0..=big_n).map(|i| c(seed[2 * i] + 0.05, seed[2 * i + 1])).collect();
            let target = StateVector::new(params, amps).unwrap().normalized().unwrap();
            let plan = synthesize_plan(&target, &uniform_schedule(big_n, 1.0), RootPolicy::MaxSuccessProbability).unwrap();
            let sim = simulate_plan(&plan).unwrap();
            prop_assert!(sim.fidelity > 1.0 - 1e-8);
            prop_assert!((sim.success_probability - plan.success_probability).abs() < 1e-12);
        }
    }
}
