//! Leavable games: the Maximizer may stop at any stage, freezing the
//! accumulated payoff. Only the truncations `L_n`, where stopping is forced
//! by stage `n`, are ever built; each is a plain cumulative game.

use crate::game::compiled::{ActionId, CompiledGame, StateId};
use crate::game::explicit::{ExplicitGame, Variant};
use crate::game::spec::{ActionSets, GameSpec, Outcome, Player, SignalRef, Transition};
use crate::rational::Rational;
use crate::unfold::{UnfoldError, Unfolder, DEFAULT_NODE_BUDGET};

/// A base spec extended with a Maximizer stop action leading to an
/// absorbing, publicly observed, zero-payoff state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopAugmentedSpec {
    pub base: GameSpec,
    pub spec: GameSpec,
    pub stop_action: String,
    pub absorbing: String,
}

fn fresh(base: &str, taken: impl Fn(&str) -> bool) -> String {
    let mut name = base.to_string();
    while taken(&name) {
        name.push('\'');
    }
    name
}

pub fn stop_augmented(base: &GameSpec) -> StopAugmentedSpec {
    let stop_action = fresh("stop", |n| base.actions.values().any(|s| s.max.iter().any(|a| a == n)));
    let absorbing = fresh("stopped", |n| base.states.iter().any(|s| s == n));
    let idle = "idle".to_string();
    let mut spec = base.clone();
    for (state, sets) in spec.actions.iter_mut() {
        sets.max.push(stop_action.clone());
        for a2 in &sets.min {
            spec.transitions.push(Transition {
                state: state.clone(),
                a1: stop_action.clone(),
                a2: a2.clone(),
                outcomes: vec![Outcome {
                    prob: Rational::one(),
                    next: absorbing.clone(),
                    s1: SignalRef::label(&absorbing),
                    s2: SignalRef::label(&absorbing),
                }],
            });
        }
    }
    spec.states.push(absorbing.clone());
    spec.actions.insert(absorbing.clone(), ActionSets { max: vec![idle.clone()], min: vec![idle.clone()] });
    spec.transitions.push(Transition {
        state: absorbing.clone(),
        a1: idle.clone(),
        a2: idle,
        outcomes: vec![Outcome {
            prob: Rational::one(),
            next: absorbing.clone(),
            s1: SignalRef::label(&absorbing),
            s2: SignalRef::label(&absorbing),
        }],
    });
    StopAugmentedSpec { base: base.clone(), spec, stop_action, absorbing }
}

/// `L_n`: `n` stages with the stop option, then a final stage where the
/// Maximizer can only stop (the Minimizer's choice there is irrelevant and
/// fixed to its first action). The tree therefore has `n + 1` rounds.
pub fn build_leavable_truncation(spec: &GameSpec, n: usize) -> Result<ExplicitGame, UnfoldError> {
    build_leavable_truncation_with_budget(spec, n, DEFAULT_NODE_BUDGET)
}

pub fn build_leavable_truncation_with_budget(
    spec: &GameSpec,
    n: usize,
    budget: u64,
) -> Result<ExplicitGame, UnfoldError> {
    let aug = stop_augmented(spec);
    let compiled = CompiledGame::new(&aug.spec)?;
    let stop = compiled.action_id(Player::Max, &aug.stop_action).expect("stop action interned");
    let absorbing = compiled.state_id(&aug.absorbing).expect("absorbing state");
    let restrict = move |state: StateId, depth: usize, player: Player, all: &[ActionId]| -> Vec<ActionId> {
        if depth < n || state == absorbing {
            return all.to_vec();
        }
        match player {
            Player::Max => vec![stop],
            Player::Min => vec![all[0]],
        }
    };
    Unfolder::new(&compiled).budget(budget).restrict(&restrict).build(n + 1, Variant::Leavable { stop_by: n })
}
