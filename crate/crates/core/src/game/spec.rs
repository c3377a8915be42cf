//! Generator form of a cumulative game with incomplete information.
//!
//! A [`GameSpec`] is a finite state machine: in every state both players pick
//! an action simultaneously, the pair earns a daily payoff for the Maximizer,
//! and Nature draws the next state together with one private signal per
//! player. Signals may be correlated (they are drawn jointly) and Nature's
//! draw may depend on everything in the state, so history-dependent action
//! or signal sets are expressed by augmenting the state.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::discretize::SignalModel;
use crate::rational::Rational;

/// Maximizer (player 1) or Minimizer (player 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Max,
    Min,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::Max, Player::Min];

    pub fn index(self) -> usize {
        match self {
            Player::Max => 0,
            Player::Min => 1,
        }
    }

    pub fn opponent(self) -> Player {
        match self {
            Player::Max => Player::Min,
            Player::Min => Player::Max,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Max => "max",
            Player::Min => "min",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSets {
    pub max: Vec<String>,
    pub min: Vec<String>,
}

impl ActionSets {
    pub fn of(&self, player: Player) -> &[String] {
        match player {
            Player::Max => &self.max,
            Player::Min => &self.min,
        }
    }
}

/// A signal as written in a game file: a plain label, or a reference to a
/// continuous/countable [`SignalModel`] declared in the `signals` section.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SignalRef {
    Label(String),
    Model { model: String },
}

impl SignalRef {
    pub fn label(s: impl Into<String>) -> Self {
        SignalRef::Label(s.into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub prob: Rational,
    pub next: String,
    pub s1: SignalRef,
    pub s2: SignalRef,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub state: String,
    pub a1: String,
    pub a2: String,
    pub outcomes: Vec<Outcome>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PayoffEntry {
    pub state: String,
    pub a1: String,
    pub a2: String,
    pub value: Rational,
}

/// Either a fixed initial state, or an initial chance move that also emits
/// the players' first private signals before stage one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Initial {
    State(String),
    Chance(Vec<Outcome>),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    #[serde(default)]
    pub nonnegative: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameSpec {
    pub states: Vec<String>,
    pub initial: Initial,
    pub actions: BTreeMap<String, ActionSets>,
    pub transitions: Vec<Transition>,
    /// Missing entries pay zero.
    #[serde(default)]
    pub payoffs: Vec<PayoffEntry>,
    #[serde(default)]
    pub flags: Flags,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub signals: BTreeMap<String, SignalModel>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoStates,
    DuplicateState(String),
    UnknownState(String),
    MissingActions(String),
    EmptyActionSet { state: String, player: Player },
    DuplicateAction { state: String, player: Player, action: String },
    UnknownAction { state: String, player: Player, action: String },
    MissingTransition { state: String, a1: String, a2: String },
    DuplicateTransition { state: String, a1: String, a2: String },
    EmptyDistribution { context: String },
    NegativeProbability { context: String, prob: Rational },
    DistributionMass { context: String, mass: Rational },
    UnknownSignalModel(String),
    InvalidSignalModel { model: String, reason: String },
    DuplicatePayoff { state: String, a1: String, a2: String },
    NegativePayoff { state: String, a1: String, a2: String, value: Rational },
    NonPositiveBound(Rational),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            NoStates => write!(f, "no states declared"),
            DuplicateState(s) => write!(f, "state {s:?} declared twice"),
            UnknownState(s) => write!(f, "unknown state {s:?}"),
            MissingActions(s) => write!(f, "no action sets for state {s:?}"),
            EmptyActionSet { state, player } => write!(f, "empty {player} action set in state {state:?}"),
            DuplicateAction { state, player, action } => {
                write!(f, "{player} action {action:?} repeated in state {state:?}")
            }
            UnknownAction { state, player, action } => {
                write!(f, "unknown {player} action {action:?} in state {state:?}")
            }
            MissingTransition { state, a1, a2 } => write!(f, "missing transition for ({state}, {a1}, {a2})"),
            DuplicateTransition { state, a1, a2 } => write!(f, "duplicate transition for ({state}, {a1}, {a2})"),
            EmptyDistribution { context } => write!(f, "empty outcome list in {context}"),
            NegativeProbability { context, prob } => write!(f, "negative probability {prob} in {context}"),
            DistributionMass { context, mass } => write!(f, "distribution mass {mass} != 1 in {context}"),
            UnknownSignalModel(m) => write!(f, "unknown signal model {m:?}"),
            InvalidSignalModel { model, reason } => write!(f, "signal model {model:?}: {reason}"),
            DuplicatePayoff { state, a1, a2 } => write!(f, "duplicate payoff for ({state}, {a1}, {a2})"),
            NegativePayoff { state, a1, a2, value } => write!(
                f,
                "payoff {value} found at ({state}, {a1}, {a2}) but the game is declared nonnegative"
            ),
            NonPositiveBound(b) => write!(f, "declared bound {b} is not positive"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub nonnegative: bool,
    pub per_stage_bound: Rational,
}

impl GameSpec {
    pub fn from_json(text: &str) -> Result<GameSpec, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn payoff_of(&self, state: &str, a1: &str, a2: &str) -> Rational {
        self.payoffs
            .iter()
            .find(|p| p.state == state && p.a1 == a1 && p.a2 == a2)
            .map(|p| p.value.clone())
            .unwrap_or_default()
    }

    pub fn has_signal_models(&self) -> bool {
        let is_model = |o: &Outcome| matches!(o.s1, SignalRef::Model { .. }) || matches!(o.s2, SignalRef::Model { .. });
        let initial = match &self.initial {
            Initial::State(_) => false,
            Initial::Chance(os) => os.iter().any(is_model),
        };
        initial || self.transitions.iter().any(|t| t.outcomes.iter().any(is_model))
    }

    /// Every violated invariant; empty iff the spec is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.states.is_empty() {
            out.push(Violation::NoStates);
        }
        let mut known = BTreeSet::new();
        for s in &self.states {
            if !known.insert(s.as_str()) {
                out.push(Violation::DuplicateState(s.clone()));
            }
        }
        for s in self.actions.keys() {
            if !known.contains(s.as_str()) {
                out.push(Violation::UnknownState(s.clone()));
            }
        }
        for s in &self.states {
            let Some(sets) = self.actions.get(s) else {
                out.push(Violation::MissingActions(s.clone()));
                continue;
            };
            for p in Player::BOTH {
                let acts = sets.of(p);
                if acts.is_empty() {
                    out.push(Violation::EmptyActionSet { state: s.clone(), player: p });
                }
                let mut seen = BTreeSet::new();
                for a in acts {
                    if !seen.insert(a) {
                        out.push(Violation::DuplicateAction { state: s.clone(), player: p, action: a.clone() });
                    }
                }
            }
        }
        let check_outcomes = |out: &mut Vec<Violation>, outcomes: &[Outcome], context: String| {
            if outcomes.is_empty() {
                out.push(Violation::EmptyDistribution { context: context.clone() });
                return;
            }
            let mut mass = Rational::zero();
            for o in outcomes {
                if o.prob.is_negative() {
                    out.push(Violation::NegativeProbability { context: context.clone(), prob: o.prob.clone() });
                }
                mass += &o.prob;
                if !known.contains(o.next.as_str()) {
                    out.push(Violation::UnknownState(o.next.clone()));
                }
                for s in [&o.s1, &o.s2] {
                    if let SignalRef::Model { model } = s {
                        if !self.signals.contains_key(model) {
                            out.push(Violation::UnknownSignalModel(model.clone()));
                        }
                    }
                }
            }
            if !mass.is_one() {
                out.push(Violation::DistributionMass { context, mass });
            }
        };
        match &self.initial {
            Initial::State(s) => {
                if !known.contains(s.as_str()) {
                    out.push(Violation::UnknownState(s.clone()));
                }
            }
            Initial::Chance(os) => check_outcomes(&mut out, os, "initial distribution".to_string()),
        }
        let action_known = |state: &str, p: Player, a: &str| {
            self.actions.get(state).map(|s| s.of(p).iter().any(|x| x == a)).unwrap_or(false)
        };
        let mut seen_transitions = BTreeSet::new();
        for t in &self.transitions {
            if !known.contains(t.state.as_str()) {
                out.push(Violation::UnknownState(t.state.clone()));
                continue;
            }
            let mut ok = true;
            for (p, a) in [(Player::Max, &t.a1), (Player::Min, &t.a2)] {
                if !action_known(&t.state, p, a) {
                    out.push(Violation::UnknownAction { state: t.state.clone(), player: p, action: a.clone() });
                    ok = false;
                }
            }
            if ok && !seen_transitions.insert((t.state.as_str(), t.a1.as_str(), t.a2.as_str())) {
                out.push(Violation::DuplicateTransition {
                    state: t.state.clone(),
                    a1: t.a1.clone(),
                    a2: t.a2.clone(),
                });
            }
            check_outcomes(&mut out, &t.outcomes, format!("transition ({}, {}, {})", t.state, t.a1, t.a2));
        }
        for s in &self.states {
            if let Some(sets) = self.actions.get(s) {
                for a1 in &sets.max {
                    for a2 in &sets.min {
                        if !seen_transitions.contains(&(s.as_str(), a1.as_str(), a2.as_str())) {
                            out.push(Violation::MissingTransition { state: s.clone(), a1: a1.clone(), a2: a2.clone() });
                        }
                    }
                }
            }
        }
        let mut seen_payoffs = BTreeSet::new();
        for p in &self.payoffs {
            if !known.contains(p.state.as_str()) {
                out.push(Violation::UnknownState(p.state.clone()));
                continue;
            }
            for (pl, a) in [(Player::Max, &p.a1), (Player::Min, &p.a2)] {
                if !action_known(&p.state, pl, a) {
                    out.push(Violation::UnknownAction { state: p.state.clone(), player: pl, action: a.clone() });
                }
            }
            if !seen_payoffs.insert((p.state.as_str(), p.a1.as_str(), p.a2.as_str())) {
                out.push(Violation::DuplicatePayoff { state: p.state.clone(), a1: p.a1.clone(), a2: p.a2.clone() });
            }
            if self.flags.nonnegative && p.value.is_negative() {
                out.push(Violation::NegativePayoff {
                    state: p.state.clone(),
                    a1: p.a1.clone(),
                    a2: p.a2.clone(),
                    value: p.value.clone(),
                });
            }
        }
        if let Some(b) = &self.flags.bound {
            if !b.is_positive() {
                out.push(Violation::NonPositiveBound(b.clone()));
            }
        }
        for (name, model) in &self.signals {
            if let Err(reason) = model.check() {
                out.push(Violation::InvalidSignalModel { model: name.clone(), reason });
            }
        }
        out
    }

    /// Sign and per-stage magnitude of the daily payoffs. Over `n` stages the
    /// cumulative payoff is bounded by `n * per_stage_bound`.
    pub fn classify(&self) -> Classification {
        let nonnegative = self.payoffs.iter().all(|p| !p.value.is_negative());
        let per_stage_bound = self.payoffs.iter().map(|p| p.value.abs()).max().unwrap_or_default();
        Classification { nonnegative, per_stage_bound }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    pub(crate) fn trivial() -> GameSpec {
        let mut actions = BTreeMap::new();
        actions.insert("s".to_string(), ActionSets { max: vec!["a".into()], min: vec!["b".into()] });
        GameSpec {
            states: vec!["s".into()],
            initial: Initial::State("s".into()),
            actions,
            transitions: vec![Transition {
                state: "s".into(),
                a1: "a".into(),
                a2: "b".into(),
                outcomes: vec![Outcome {
                    prob: Rational::one(),
                    next: "s".into(),
                    s1: SignalRef::label("-"),
                    s2: SignalRef::label("-"),
                }],
            }],
            payoffs: vec![],
            flags: Flags::default(),
            signals: BTreeMap::new(),
        }
    }

    #[test]
    fn degenerate_game_is_valid() {
        let spec = trivial();
        assert!(spec.validate().is_empty());
        assert_eq!(spec.classify(), Classification { nonnegative: true, per_stage_bound: Rational::zero() });
    }

    #[test]
    fn mass_other_than_one_is_reported() {
        let mut spec = trivial();
        spec.transitions[0].outcomes[0].prob = q(9, 10);
        let v = spec.validate();
        assert_eq!(v.len(), 1);
        assert!(matches!(&v[0], Violation::DistributionMass { mass, .. } if *mass == q(9, 10)));
        assert!(v[0].to_string().contains("9/10 != 1"));
    }

    #[test]
    fn structural_violations() {
        let mut spec = trivial();
        spec.actions.get_mut("s").unwrap().min.push("c".into());
        spec.payoffs.push(PayoffEntry { state: "s".into(), a1: "zz".into(), a2: "b".into(), value: q(1, 1) });
        spec.flags.bound = Some(Rational::zero());
        let v = spec.validate();
        assert!(v.iter().any(|x| matches!(x, Violation::MissingTransition { a2, .. } if a2 == "c")));
        assert!(v.iter().any(|x| matches!(x, Violation::UnknownAction { action, .. } if action == "zz")));
        assert!(v.contains(&Violation::NonPositiveBound(Rational::zero())));
    }

    #[test]
    fn declared_nonnegative_rejects_negative_payoff() {
        let mut spec = trivial();
        spec.flags.nonnegative = true;
        spec.payoffs.push(PayoffEntry { state: "s".into(), a1: "a".into(), a2: "b".into(), value: q(-1, 1) });
        let v = spec.validate();
        assert!(v.iter().any(|x| x.to_string().contains("payoff -1/1 found")));
    }

    #[test]
    fn json_shape() {
        let text = r#"{
            "states": ["s"], "initial": "s",
            "actions": {"s": {"max": ["a"], "min": ["b"]}},
            "transitions": [{"state": "s", "a1": "a", "a2": "b",
                "outcomes": [{"prob": "1/1", "next": "s", "s1": "-", "s2": "-"}]}],
            "payoffs": [{"state": "s", "a1": "a", "a2": "b", "value": "3/2"}],
            "flags": {"nonnegative": true, "bound": "10"}
        }"#;
        let spec = GameSpec::from_json(text).unwrap();
        assert!(spec.validate().is_empty());
        assert_eq!(spec.payoff_of("s", "a", "b"), q(3, 2));
        assert_eq!(spec.flags.bound, Some(q(10, 1)));
        assert_eq!(GameSpec::from_json(&spec.to_json()).unwrap(), spec);
    }
}
