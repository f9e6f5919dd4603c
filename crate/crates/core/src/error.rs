use alloc::string::String;

use crate::energy::Component;
use crate::harmonics::MultiIndex;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("tridiagonal eigen-decomposition did not converge for eigenvalue {index} after {iterations} sweeps")]
    NoConvergence { index: usize, iterations: usize },

    #[error("matrix is not positive definite: pivot {pivot} is {value:e}")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("state is not tilde-orthogonal: {component} coefficient at {index} is {value:e}")]
    NotTildeOrthogonal {
        component: Component,
        index: MultiIndex,
        value: f64,
    },

    #[error("quadrature paths accept zonal data only, found coefficient at {0}")]
    NonZonal(MultiIndex),

    #[error("radial profile violates the decay condition: {0}")]
    Decay(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
