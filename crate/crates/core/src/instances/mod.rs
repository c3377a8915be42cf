//! Ready-made games.

pub mod counterexample;
pub mod pursuit;

pub use counterexample::{
    build_counterexample, claim1_best_reply, claim2_maximizer_strategy, counterexample_bounds,
    minimizer_from_stop_probabilities, never_stop_minimizer, no_value_witness, Bounds, CounterexampleError,
    CounterexampleParams,
};
pub use pursuit::{build_pursuit_grid, Graph, Observation, PursuitError, PursuitParams, PursuitVariant};
