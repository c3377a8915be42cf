//! Exact solvers for two-player zero-sum cumulative games with private
//! signals, where payoffs accumulate stage by stage.
//!
//! Typical pipeline: describe a game as a [`GameSpec`], unfold a finite
//! truncation with [`unfold::truncate`], solve it with
//! [`solver::solve_zero_sum`], and sweep horizons with
//! [`uniform::sweep`] to watch the truncated values converge.

pub mod cli;
pub mod discretize;
pub mod eval;
pub mod game;
pub mod instances;
pub mod leavable;
pub mod lp;
pub mod random;
pub mod rational;
pub mod solver;
pub mod uniform;
pub mod unfold;

pub use game::{BehavioralStrategy, ExplicitGame, GameSpec, Player, Profile};
pub use rational::Rational;
