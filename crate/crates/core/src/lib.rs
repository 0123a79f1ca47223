//! Photon-added and photon-subtracted coherent states on a sphere.
//!
//! The cavity mode is truncated at `N` photons and deformed by a curvature
//! parameter `lambda >= 0`; `lambda = 0` recovers the flat (binomial) model.

pub mod deformation;
pub mod error;
pub mod format;
pub mod identity;
pub mod logspace;
pub mod observables;
pub mod poly;
pub mod preparation;
pub mod quadrature;
pub mod states;

pub use num_complex::Complex64;

pub use deformation::{ModelParams, StateVector};
pub use error::{Error, Result};
pub use identity::{resolution_matrix, Branch, MeasureMode, ResolutionReport};
pub use observables::{
    min_squeezing, photon_statistics, quadrature_report, Mandel, PhotonStatistics,
    QuadratureReport, SqueezingMinimum,
};
pub use preparation::{simulate_plan, synthesize_plan, PreparationPlan, RootPolicy, Simulation};
pub use states::{build_state, StateKind, StateSpec};
