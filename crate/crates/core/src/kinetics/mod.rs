//! Model coefficients and the right-hand sides of the base and audit
//! dynamics, as pure functions of a population state.

mod config;
mod state;
mod tensors;

pub use config::{EnforcementParams, ModelConfig, S_GAP_WARN_RATIO, WEIGHT_SUM_TOL};
pub use state::{income_of, PopulationState, NORMALIZATION_TOL};
pub use tensors::{
    audited_rates, build_payer_matrix, effective_rates, TransitionTensors, STOCHASTICITY_TOL,
};
