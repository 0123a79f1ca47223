use thiserror::Error;

use crate::identity::ResolutionReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter, index or dimension outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),

    /// Every weight of the requested state vanishes.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("radial quadrature did not converge for n = {index} after {panels} panels")]
    QuadratureFailure {
        index: usize,
        panels: usize,
        partial: Box<ResolutionReport>,
    },

    /// `|cos(g_tau sqrt(n))|` or `|sin(g_tau sqrt(n))|` too close to zero.
    #[error("ill-conditioned interaction schedule: {0}")]
    IllConditioned(String),

    #[error("synthesis failure: {0}")]
    SynthesisFailure(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("simulation failure: {0}")]
    SimulationFailure(String),
}
