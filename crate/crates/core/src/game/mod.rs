//! Domain model: generator specs, unfolded trees, strategies.

pub mod builder;
pub mod compiled;
pub mod explicit;
pub mod spec;
pub mod strategy;

pub use builder::SpecBuilder;
pub use compiled::{ActionId, CompiledGame, Names, SignalId, SpecError, StateId};
pub use explicit::{ExplicitGame, Node, NodeId, PrivId, PrivateHistory, PrivateNode, PrivateTree, UnknownHistory, Variant};
pub use spec::{
    ActionSets, Classification, Flags, GameSpec, Initial, Outcome, PayoffEntry, Player, SignalRef, Transition,
    Violation,
};
pub use strategy::{BehavioralStrategy, DenseRows, Fallback, Profile, StrategyError};
