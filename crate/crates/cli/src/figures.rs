//! Figure panels as fixed sweeps.
//!
//! | id | state | x | curves | observable |
//! |----|-------|---|--------|------------|
//! | 1a, 3a | PACS, PSCS; N=5, mu=1, lambda=0 | m = 0..5 | | P_n |
//! | 1b, 3b | PACS, PSCS; N=5, mu=1, m=1 | lambda | | P_n |
//! | 2, 4 | PACS, PSCS; N=5, mu=1 | lambda | m = 0..4 | mean |
//! | 5a, 5b | PACS, PSCS; N=20, mu=1 | lambda | m = 0, 5, 10 | Mandel Q |
//! | 6a/b, 8a/b | PACS, PSCS; N=20, mu=0.5, lambda=0 | phi | m = 0, 5, 10 | S1 / S2 |
//! | 7a/b, 9a/b | PACS, PSCS; N=20, mu=0.5, m=1 | phi | lambda = 0, 0.1, 0.2 | S1 / S2 |
//!
//! `lambda` axes use `{0}` plus 41 log-spaced points on `[1e-2, 1e2]`;
//! `phi` axes use 361 points on `[0, 2 pi]`.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use spherecs_core::Complex64;
use spherecs_core::StateKind;

use crate::error::{CliError, CliResult};
use crate::grid::Grid;
use crate::svg::{Plot, Series};
use crate::sweep::{run_sweep, Observable, SweepSpec, SweepVar, Table};

pub const LAMBDA_MIN: f64 = 1e-2;
pub const LAMBDA_MAX: f64 = 1e2;
pub const LAMBDA_POINTS: usize = 41;
pub const PHI_POINTS: usize = 361;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FigureId {
    F1a,
    F1b,
    F2,
    F3a,
    F3b,
    F4,
    F5a,
    F5b,
    F6a,
    F6b,
    F7a,
    F7b,
    F8a,
    F8b,
    F9a,
    F9b,
}

impl FigureId {
    pub const ALL: [FigureId; 16] = [
        FigureId::F1a,
        FigureId::F1b,
        FigureId::F2,
        FigureId::F3a,
        FigureId::F3b,
        FigureId::F4,
        FigureId::F5a,
        FigureId::F5b,
        FigureId::F6a,
        FigureId::F6b,
        FigureId::F7a,
        FigureId::F7b,
        FigureId::F8a,
        FigureId::F8b,
        FigureId::F9a,
        FigureId::F9b,
    ];

    pub fn label(self) -> &'static str {
        match self {
            FigureId::F1a => "1a",
            FigureId::F1b => "1b",
            FigureId::F2 => "2",
            FigureId::F3a => "3a",
            FigureId::F3b => "3b",
            FigureId::F4 => "4",
            FigureId::F5a => "5a",
            FigureId::F5b => "5b",
            FigureId::F6a => "6a",
            FigureId::F6b => "6b",
            FigureId::F7a => "7a",
            FigureId::F7b => "7b",
            FigureId::F8a => "8a",
            FigureId::F8b => "8b",
            FigureId::F9a => "9a",
            FigureId::F9b => "9b",
        }
    }

    pub fn file_stem(self) -> String {
        format!("fig{}", self.label())
    }

    fn kind(self) -> StateKind {
        use FigureId::*;
        match self {
            F1a | F1b | F2 | F5a | F6a | F6b | F7a | F7b => StateKind::PhotonAdded,
            _ => StateKind::PhotonSubtracted,
        }
    }

    pub fn title(self) -> String {
        use FigureId::*;
        let name = match self.kind() {
            StateKind::PhotonAdded => "PACS",
            _ => "PSCS",
        };
        match self {
            F1a | F3a => format!("{name} photon distribution vs m (N=5, mu=1, lambda=0)"),
            F1b | F3b => format!("{name} photon distribution vs lambda (N=5, mu=1, m=1)"),
            F2 | F4 => format!("{name} mean photon number vs lambda (N=5, mu=1)"),
            F5a | F5b => format!("{name} Mandel Q vs lambda (N=20, mu=1)"),
            F6a | F8a => format!("{name} S1 vs phi (N=20, mu=0.5, lambda=0)"),
            F6b | F8b => format!("{name} S2 vs phi (N=20, mu=0.5, lambda=0)"),
            F7a | F9a => format!("{name} S1 vs phi (N=20, mu=0.5, m=1)"),
            F7b | F9b => format!("{name} S2 vs phi (N=20, mu=0.5, m=1)"),
        }
    }

    fn y_label(self) -> &'static str {
        use FigureId::*;
        match self {
            F1a | F1b | F3a | F3b => "P_n",
            F2 | F4 => "<n>",
            F5a | F5b => "Q",
            F6a | F7a | F8a | F9a => "S1",
            F6b | F7b | F8b | F9b => "S2",
        }
    }

    pub fn sweep(self) -> SweepSpec {
        use FigureId::*;
        let lambda_grid =
            Grid::log(LAMBDA_MIN, LAMBDA_MAX, LAMBDA_POINTS, true).expect("static grid");
        let phi_grid = Grid::linear(0.0, std::f64::consts::TAU, PHI_POINTS).expect("static grid");
        let kind = self.kind();
        let spec = |cutoff, mu, ms: Vec<usize>, lambdas: Vec<f64>, var, grid, obs| SweepSpec {
            kind,
            cutoff,
            mu: Complex64::new(mu, 0.0),
            ms,
            lambdas,
            var,
            grid,
            observables: vec![obs],
        };
        match self {
            F1a | F3a => spec(
                5,
                1.0,
                vec![],
                vec![0.0],
                SweepVar::M,
                Grid::linear(0.0, 5.0, 6).expect("static grid"),
                Observable::Pdf,
            ),
            F1b | F3b => spec(
                5,
                1.0,
                vec![1],
                vec![],
                SweepVar::Lambda,
                lambda_grid,
                Observable::Pdf,
            ),
            F2 | F4 => spec(
                5,
                1.0,
                (0..=4).collect(),
                vec![],
                SweepVar::Lambda,
                lambda_grid,
                Observable::Mean,
            ),
            F5a | F5b => spec(
                20,
                1.0,
                vec![0, 5, 10],
                vec![],
                SweepVar::Lambda,
                lambda_grid,
                Observable::Mandel,
            ),
            F6a | F8a => spec(
                20,
                0.5,
                vec![0, 5, 10],
                vec![0.0],
                SweepVar::Phi,
                phi_grid,
                Observable::S1,
            ),
            F6b | F8b => spec(
                20,
                0.5,
                vec![0, 5, 10],
                vec![0.0],
                SweepVar::Phi,
                phi_grid,
                Observable::S2,
            ),
            F7a | F9a => spec(
                20,
                0.5,
                vec![1],
                vec![0.0, 0.1, 0.2],
                SweepVar::Phi,
                phi_grid,
                Observable::S1,
            ),
            F7b | F9b => spec(
                20,
                0.5,
                vec![1],
                vec![0.0, 0.1, 0.2],
                SweepVar::Phi,
                phi_grid,
                Observable::S2,
            ),
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for FigureId {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let s = s.trim().trim_start_matches("fig");
        FigureId::ALL
            .into_iter()
            .find(|id| id.label() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown figure '{s}'")))
    }
}

pub fn figure_table(id: FigureId) -> CliResult<Table> {
    run_sweep(&id.sweep())
}

pub fn figure_plot(id: FigureId, table: &Table) -> Plot {
    let spec = id.sweep();
    let xs = table.x();
    let series = table.header[1..]
        .iter()
        .enumerate()
        .map(|(j, name)| Series {
            label: name.clone(),
            points: xs
                .iter()
                .zip(&table.rows)
                .map(|(&x, row)| (x, row[j + 1].value()))
                .collect(),
        })
        .collect();
    Plot {
        title: format!("Fig. {}: {}", id, id.title()),
        x_label: spec.var.label().to_string(),
        y_label: id.y_label().to_string(),
        log_x: spec.var == SweepVar::Lambda,
        series,
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| CliError::io(path.display().to_string(), e))
}

/// Writes `fig<id>.csv` (and `fig<id>.svg` when asked) into `out_dir`.
pub fn run_figure(id: FigureId, out_dir: &Path, svg: bool) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir.display().to_string(), e))?;
    let table = figure_table(id)?;
    let csv_path = out_dir.join(format!("{}.csv", id.file_stem()));
    let mut buf = Vec::new();
    table
        .write_csv(&mut buf)
        .map_err(|e| CliError::io(csv_path.display().to_string(), e))?;
    write_file(&csv_path, &buf)?;
    let mut written = vec![csv_path];
    if svg {
        let svg_path = out_dir.join(format!("{}.svg", id.file_stem()));
        write_file(&svg_path, figure_plot(id, &table).render().as_bytes())?;
        written.push(svg_path);
    }
    Ok(written)
}
