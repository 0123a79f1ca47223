//! `prepare`, `identity` and `state` commands, independent of argument parsing.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use spherecs_core::format::sig12;
use spherecs_core::preparation::{uniform_schedule, write_plan_csv};
use spherecs_core::Complex64;
use spherecs_core::{
    build_state, resolution_matrix, simulate_plan, synthesize_plan, Branch, Error, MeasureMode,
    ModelParams, PreparationPlan, ResolutionReport, RootPolicy, Simulation, StateKind, StateSpec,
    StateVector,
};

use crate::error::{CliError, CliResult};

/// Fidelity below `1 - FIDELITY_GATE` is a verification failure.
pub const FIDELITY_GATE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Recipe {
    pub kind: StateKind,
    pub cutoff: usize,
    pub mu: Complex64,
    pub m: usize,
    pub lambda: f64,
}

impl Recipe {
    pub fn spec(&self) -> CliResult<StateSpec> {
        let params = ModelParams::new(self.lambda, self.cutoff)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        StateSpec::new(self.kind, params, self.mu, self.m)
            .map_err(|e| CliError::Usage(e.to_string()))
    }
}

/// Parses `RE` or `RE,IM`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| {
        p.parse::<f64>()
            .map_err(|_| format!("'{s}' is not RE or RE,IM"))
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("'{s}' is not RE or RE,IM")),
    }
}

fn create(path: &Path) -> CliResult<fs::File> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display().to_string(), e))?;
    }
    fs::File::create(path).map_err(|e| CliError::io(path.display().to_string(), e))
}

pub struct PrepareOutcome {
    pub plan: PreparationPlan,
    pub simulation: Simulation,
    pub summary: String,
}

/// Synthesizes and simulates a plan, writes it to `out`, and fails
/// verification when the simulated fidelity falls below `1 - 1e-6`.
pub fn run_prepare(
    recipe: &Recipe,
    g_tau: f64,
    policy: RootPolicy,
    out: &Path,
) -> CliResult<PrepareOutcome> {
    if !(g_tau > 0.0 && g_tau.is_finite()) {
        return Err(CliError::Usage(format!(
            "g_tau must be positive, got {g_tau}"
        )));
    }
    let spec = recipe.spec()?;
    let target = build_state(&spec)?;
    let plan = synthesize_plan(
        &target,
        &uniform_schedule(spec.params.cutoff(), g_tau),
        policy,
    )?;
    let simulation = simulate_plan(&plan)?;

    let file = create(out)?;
    let mut writer = std::io::BufWriter::new(file);
    write_plan_csv(&mut writer, &spec, &plan, &simulation)
        .and_then(|_| writer.flush())
        .map_err(|e| CliError::io(out.display().to_string(), e))?;

    let summary = format!(
        "atoms: {}\nfidelity: {}\nsuccess_probability: {}",
        plan.steps.len(),
        sig12(simulation.fidelity),
        sig12(simulation.success_probability)
    );
    if simulation.fidelity < 1.0 - FIDELITY_GATE {
        return Err(CliError::Verification(format!(
            "simulated fidelity {} is below 1 - {FIDELITY_GATE:e}\n{summary}",
            sig12(simulation.fidelity)
        )));
    }
    Ok(PrepareOutcome {
        plan,
        simulation,
        summary,
    })
}

pub fn format_report(report: &ResolutionReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "support: {}..={}", report.support.0, report.support.1);
    let _ = writeln!(s, "n,diagonal,deviation");
    let diag = report.diagonal();
    for (i, n) in (report.support.0..=report.support.1).enumerate() {
        let dev = report.diag_deviation.get(i).copied().unwrap_or(f64::NAN);
        let _ = writeln!(s, "{n},{},{}", sig12(diag[n]), sig12(dev));
    }
    let _ = writeln!(
        s,
        "max_diag_deviation: {}",
        sig12(report.max_diag_deviation())
    );
    let _ = writeln!(s, "max_offdiag: {}", sig12(report.max_offdiag));
    let _ = writeln!(
        s,
        "quadrature_error_estimate: {}",
        sig12(report.quadrature_error_estimate)
    );
    let _ = write!(s, "panels: {}", report.panels);
    s
}

/// Returns the formatted report; a quadrature failure returns the partial
/// report inside the error message.
pub fn run_identity(
    cutoff: usize,
    lambda: f64,
    m: usize,
    branch: Branch,
    mode: MeasureMode,
    tol: f64,
) -> CliResult<String> {
    let params = ModelParams::new(lambda, cutoff).map_err(|e| CliError::Usage(e.to_string()))?;
    match resolution_matrix(params, m, branch, mode, tol) {
        Ok(report) => Ok(format_report(&report)),
        Err(Error::QuadratureFailure { index, panels, partial }) => Err(CliError::Core(Error::NumericalFailure(
            format!(
                "radial quadrature did not converge for n = {index} after {panels} panels\npartial report:\n{}",
                format_report(&partial)
            ),
        ))),
        Err(e) => Err(e.into()),
    }
}

pub fn write_state_csv<W: Write>(mut out: W, state: &StateVector) -> std::io::Result<()> {
    writeln!(out, "n,re,im,probability")?;
    for (n, a) in state.amplitudes().iter().enumerate() {
        writeln!(
            out,
            "{n},{},{},{}",
            sig12(a.re),
            sig12(a.im),
            sig12(a.norm_sqr())
        )?;
    }
    Ok(())
}

pub fn run_state(recipe: &Recipe, out: &Path) -> CliResult<StateVector> {
    let state = build_state(&recipe.spec()?)?;
    let mut writer = std::io::BufWriter::new(create(out)?);
    write_state_csv(&mut writer, &state)
        .and_then(|_| writer.flush())
        .map_err(|e| CliError::io(out.display().to_string(), e))?;
    Ok(state)
}
