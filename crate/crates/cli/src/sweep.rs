//! Parameter sweeps over `lambda`, `m` or the quadrature phase `phi`.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;
use spherecs_core::format::sig12;
use spherecs_core::observables::ladder_moments;
use spherecs_core::Complex64;
use spherecs_core::{
    build_state, min_squeezing, photon_statistics, Mandel, ModelParams, StateKind, StateSpec,
};

use crate::error::{CliError, CliResult};
use crate::grid::Grid;

/// Phase-scan resolution for the squeezing minimum.
pub const SQUEEZING_GRID: usize = 720;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepVar {
    Lambda,
    M,
    Phi,
}

impl SweepVar {
    pub fn label(self) -> &'static str {
        match self {
            SweepVar::Lambda => "lambda",
            SweepVar::M => "m",
            SweepVar::Phi => "phi",
        }
    }
}

impl FromStr for SweepVar {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "lambda" => Ok(SweepVar::Lambda),
            "m" => Ok(SweepVar::M),
            "phi" => Ok(SweepVar::Phi),
            other => Err(CliError::Usage(format!("unknown sweep variable '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Observable {
    /// One column `p{n}` per photon number.
    Pdf,
    Mean,
    Mandel,
    /// `s1` and `s2` for phase sweeps, the minimum over phase `smin` otherwise.
    Squeezing,
    S1,
    S2,
}

impl FromStr for Observable {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "pdf" => Ok(Observable::Pdf),
            "mean" => Ok(Observable::Mean),
            "mandel" => Ok(Observable::Mandel),
            "squeezing" => Ok(Observable::Squeezing),
            "s1" => Ok(Observable::S1),
            "s2" => Ok(Observable::S2),
            other => Err(CliError::Usage(format!("unknown observable '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub kind: StateKind,
    pub cutoff: usize,
    pub mu: Complex64,
    /// Curves over `m`; ignored when sweeping `m`.
    pub ms: Vec<usize>,
    /// Curves over `lambda`; ignored when sweeping `lambda`.
    pub lambdas: Vec<f64>,
    pub var: SweepVar,
    pub grid: Grid,
    pub observables: Vec<Observable>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Undefined,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Num(x) => f.write_str(&sig12(*x)),
            Cell::Undefined => f.write_str("undefined"),
        }
    }
}

impl Cell {
    pub fn value(self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(x),
            Cell::Undefined => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    /// First cell of each row is the sweep variable.
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", self.header.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<Cell>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn x(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r[0].value().unwrap_or(f64::NAN))
            .collect()
    }
}

/// One curve of the table: the parameters held fixed along the sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Curve {
    m: Option<usize>,
    lambda: Option<f64>,
}

impl Curve {
    fn suffix(&self) -> String {
        let mut s = String::new();
        if let Some(m) = self.m {
            s.push_str(&format!("_m{m}"));
        }
        if let Some(l) = self.lambda {
            s.push_str(&format!("_lam{}", sig12(l)));
        }
        s
    }
}

impl SweepSpec {
    pub fn validate(&self) -> CliResult<()> {
        if self.cutoff == 0 {
            return Err(CliError::Usage("N must be at least 1".into()));
        }
        if self.observables.is_empty() {
            return Err(CliError::Usage("no observables requested".into()));
        }
        if self.var != SweepVar::M && self.ms.is_empty() {
            return Err(CliError::Usage("m list is empty".into()));
        }
        if self.var != SweepVar::Lambda && self.lambdas.is_empty() {
            return Err(CliError::Usage("lambda list is empty".into()));
        }
        if self.var == SweepVar::M {
            for v in self.grid.values() {
                if v < 0.0 || v.fract() != 0.0 {
                    return Err(CliError::Usage(format!(
                        "m grid value {v} is not a nonnegative integer"
                    )));
                }
            }
        }
        if self.var == SweepVar::Phi
            && self
                .observables
                .iter()
                .any(|o| !matches!(o, Observable::Squeezing | Observable::S1 | Observable::S2))
        {
            return Err(CliError::Usage(
                "phase sweeps support only squeezing, s1 and s2".into(),
            ));
        }
        if self.var != SweepVar::Phi
            && self
                .observables
                .iter()
                .any(|o| matches!(o, Observable::S1 | Observable::S2))
        {
            return Err(CliError::Usage(
                "s1 and s2 need a phase sweep; use squeezing".into(),
            ));
        }
        Ok(())
    }

    fn curves(&self) -> Vec<Curve> {
        match self.var {
            SweepVar::Lambda => self
                .ms
                .iter()
                .map(|&m| Curve {
                    m: Some(m),
                    lambda: None,
                })
                .collect(),
            SweepVar::M => self
                .lambdas
                .iter()
                .map(|&l| Curve {
                    m: None,
                    lambda: Some(l),
                })
                .collect(),
            SweepVar::Phi => self
                .ms
                .iter()
                .flat_map(|&m| {
                    self.lambdas.iter().map(move |&l| Curve {
                        m: Some(m),
                        lambda: Some(l),
                    })
                })
                .collect(),
        }
    }

    fn columns(&self, curve: &Curve) -> Vec<String> {
        let suffix = curve.suffix();
        let mut cols = Vec::new();
        for obs in &self.observables {
            match obs {
                Observable::Pdf => cols.extend((0..=self.cutoff).map(|n| format!("p{n}{suffix}"))),
                Observable::Mean => cols.push(format!("mean{suffix}")),
                Observable::Mandel => cols.push(format!("mandel{suffix}")),
                Observable::Squeezing if self.var == SweepVar::Phi => {
                    cols.push(format!("s1{suffix}"));
                    cols.push(format!("s2{suffix}"));
                }
                Observable::Squeezing => cols.push(format!("smin{suffix}")),
                Observable::S1 => cols.push(format!("s1{suffix}")),
                Observable::S2 => cols.push(format!("s2{suffix}")),
            }
        }
        cols
    }

    fn state_spec(&self, m: usize, lambda: f64) -> CliResult<StateSpec> {
        let params =
            ModelParams::new(lambda, self.cutoff).map_err(|e| CliError::Usage(e.to_string()))?;
        StateSpec::new(self.kind, params, self.mu, m).map_err(|e| CliError::Usage(e.to_string()))
    }

    fn evaluate(&self, curve: &Curve, x: f64) -> CliResult<Vec<Cell>> {
        let (m, lambda, phi) = match self.var {
            SweepVar::Lambda => (curve.m.unwrap_or(0), x, None),
            SweepVar::M => (x as usize, curve.lambda.unwrap_or(0.0), None),
            SweepVar::Phi => (curve.m.unwrap_or(0), curve.lambda.unwrap_or(0.0), Some(x)),
        };
        let state = build_state(&self.state_spec(m, lambda)?)?;
        let mut cells = Vec::new();
        if let Some(phi) = phi {
            let q = ladder_moments(&state).quadratures(phi);
            for obs in &self.observables {
                match obs {
                    Observable::Squeezing => cells.extend([Cell::Num(q.s1), Cell::Num(q.s2)]),
                    Observable::S1 => cells.push(Cell::Num(q.s1)),
                    Observable::S2 => cells.push(Cell::Num(q.s2)),
                    _ => unreachable!("validated"),
                }
            }
            return Ok(cells);
        }
        let stats = photon_statistics(&state);
        for obs in &self.observables {
            match obs {
                Observable::Pdf => cells.extend(stats.pdf.iter().map(|&p| Cell::Num(p))),
                Observable::Mean => cells.push(Cell::Num(stats.mean)),
                Observable::Mandel => cells.push(match stats.mandel_q {
                    Mandel::Value(q) => Cell::Num(q),
                    Mandel::Undefined => Cell::Undefined,
                }),
                Observable::Squeezing => {
                    cells.push(Cell::Num(min_squeezing(&state, SQUEEZING_GRID)?.value))
                }
                Observable::S1 | Observable::S2 => unreachable!("validated"),
            }
        }
        Ok(cells)
    }
}

/// Evaluates every (curve, grid point) pair in parallel and assembles the
/// rows in grid order; the output does not depend on the thread count.
pub fn run_sweep(spec: &SweepSpec) -> CliResult<Table> {
    spec.validate()?;
    let xs = spec.grid.values();
    let curves = spec.curves();

    let mut header = vec![spec.var.label().to_string()];
    for curve in &curves {
        header.extend(spec.columns(curve));
    }

    let jobs: Vec<(usize, usize)> = (0..xs.len())
        .flat_map(|i| (0..curves.len()).map(move |c| (i, c)))
        .collect();
    let results: Vec<CliResult<Vec<Cell>>> = jobs
        .par_iter()
        .map(|&(i, c)| spec.evaluate(&curves[c], xs[i]))
        .collect();

    let mut rows = Vec::with_capacity(xs.len());
    let mut results = results.into_iter();
    for &x in &xs {
        let mut row = vec![Cell::Num(x)];
        for _ in 0..curves.len() {
            row.extend(results.next().expect("one result per job")?);
        }
        rows.push(row);
    }
    Ok(Table { header, rows })
}
