use std::collections::BTreeMap;

use crate::game::spec::{ActionSets, Flags, GameSpec, Initial, Outcome, PayoffEntry, SignalRef, Transition};
use crate::rational::Rational;

/// Incremental construction of a [`GameSpec`] from Rust code.
#[derive(Debug, Clone)]
pub struct SpecBuilder {
    spec: GameSpec,
}

impl Default for SpecBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl SpecBuilder {
    pub fn new() -> Self {
        SpecBuilder {
            spec: GameSpec {
                states: Vec::new(),
                initial: Initial::State(String::new()),
                actions: BTreeMap::new(),
                transitions: Vec::new(),
                payoffs: Vec::new(),
                flags: Flags::default(),
                signals: BTreeMap::new(),
            },
        }
    }

    pub fn state<S: AsRef<str>>(&mut self, name: &str, max: &[S], min: &[S]) -> &mut Self {
        self.spec.states.push(name.to_string());
        self.spec.actions.insert(
            name.to_string(),
            ActionSets {
                max: max.iter().map(|s| s.as_ref().to_string()).collect(),
                min: min.iter().map(|s| s.as_ref().to_string()).collect(),
            },
        );
        self
    }

    pub fn initial_state(&mut self, name: &str) -> &mut Self {
        self.spec.initial = Initial::State(name.to_string());
        self
    }

    /// Initial chance move: `(prob, state, max signal, min signal)`.
    pub fn initial_chance(&mut self, outcomes: &[(Rational, &str, &str, &str)]) -> &mut Self {
        self.spec.initial = Initial::Chance(Self::outcomes(outcomes));
        self
    }

    fn outcomes(outcomes: &[(Rational, &str, &str, &str)]) -> Vec<Outcome> {
        outcomes
            .iter()
            .map(|(p, next, s1, s2)| Outcome {
                prob: p.clone(),
                next: next.to_string(),
                s1: SignalRef::label(*s1),
                s2: SignalRef::label(*s2),
            })
            .collect()
    }

    pub fn transition(&mut self, state: &str, a1: &str, a2: &str, outcomes: &[(Rational, &str, &str, &str)]) -> &mut Self {
        self.transition_raw(state, a1, a2, Self::outcomes(outcomes))
    }

    pub fn transition_raw(&mut self, state: &str, a1: &str, a2: &str, outcomes: Vec<Outcome>) -> &mut Self {
        self.spec.transitions.push(Transition {
            state: state.to_string(),
            a1: a1.to_string(),
            a2: a2.to_string(),
            outcomes,
        });
        self
    }

    /// Deterministic move to `next` with the given signals.
    pub fn goto(&mut self, state: &str, a1: &str, a2: &str, next: &str, s1: &str, s2: &str) -> &mut Self {
        self.transition(state, a1, a2, &[(Rational::one(), next, s1, s2)])
    }

    /// Records a payoff; zero entries are skipped since absent entries pay zero.
    pub fn payoff(&mut self, state: &str, a1: &str, a2: &str, value: Rational) -> &mut Self {
        if !value.is_zero() {
            self.spec.payoffs.push(PayoffEntry {
                state: state.to_string(),
                a1: a1.to_string(),
                a2: a2.to_string(),
                value,
            });
        }
        self
    }

    pub fn flags(&mut self, nonnegative: bool, bound: Option<Rational>) -> &mut Self {
        self.spec.flags = Flags { nonnegative, bound };
        self
    }

    pub fn build(&self) -> GameSpec {
        self.spec.clone()
    }
}
