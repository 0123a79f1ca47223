//! Figure reproduction, parameter sweeps, state dumps, identity diagnostics
//! and preparation synthesis on top of `spherecs-core`.

pub mod commands;
pub mod error;
pub mod figures;
pub mod grid;
pub mod svg;
pub mod sweep;

pub use error::{CliError, CliResult};
pub use figures::{run_figure, FigureId};
pub use grid::Grid;
pub use sweep::{run_sweep, Cell, Observable, SweepSpec, SweepVar, Table};
