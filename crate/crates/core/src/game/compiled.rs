use std::collections::BTreeMap;

use crate::game::spec::{GameSpec, Initial, Outcome, Player, SignalRef, Violation};
use crate::rational::Rational;

pub type StateId = usize;
pub type ActionId = u32;
pub type SignalId = u32;

#[derive(Debug, Clone)]
pub struct Branch {
    /// Position in the spec's outcome list.
    pub index: usize,
    pub prob: Rational,
    pub next: StateId,
    pub signals: [SignalId; 2],
}

#[derive(Debug, Clone)]
pub struct Cell {
    pub payoff: Rational,
    pub outcomes: Vec<Branch>,
}

/// Name tables shared by every tree unfolded from the same spec.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Names {
    pub states: Vec<String>,
    pub actions: [Vec<String>; 2],
    pub signals: [Vec<String>; 2],
}

/// Index-based form of a validated [`GameSpec`] with label-only signals.
#[derive(Debug, Clone)]
pub struct CompiledGame {
    pub names: Names,
    pub actions: Vec<[Vec<ActionId>; 2]>,
    pub initial: Vec<Branch>,
    cells: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpecError {
    #[error("invalid game spec: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("game uses continuous or countable signal models; discretize it first")]
    SignalModels,
}

struct Interner {
    names: Vec<String>,
    ids: BTreeMap<String, u32>,
}

impl Interner {
    fn new() -> Self {
        Interner { names: Vec::new(), ids: BTreeMap::new() }
    }

    fn id(&mut self, name: &str) -> u32 {
        if let Some(&i) = self.ids.get(name) {
            return i;
        }
        let i = self.names.len() as u32;
        self.names.push(name.to_string());
        self.ids.insert(name.to_string(), i);
        i
    }
}

impl CompiledGame {
    pub fn new(spec: &GameSpec) -> Result<CompiledGame, SpecError> {
        let violations = spec.validate();
        if !violations.is_empty() {
            return Err(SpecError::Invalid(violations));
        }
        if spec.has_signal_models() {
            return Err(SpecError::SignalModels);
        }
        let state_id: BTreeMap<&str, StateId> =
            spec.states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let mut acts = [Interner::new(), Interner::new()];
        let mut sigs = [Interner::new(), Interner::new()];
        let mut actions = Vec::with_capacity(spec.states.len());
        for s in &spec.states {
            let sets = &spec.actions[s];
            let ids: [Vec<ActionId>; 2] = [
                sets.max.iter().map(|a| acts[0].id(a)).collect(),
                sets.min.iter().map(|a| acts[1].id(a)).collect(),
            ];
            actions.push(ids);
        }
        let branch = |sigs: &mut [Interner; 2], i: usize, o: &Outcome| -> Branch {
            let sig = |s: &SignalRef| match s {
                SignalRef::Label(l) => l.clone(),
                SignalRef::Model { .. } => unreachable!("checked above"),
            };
            Branch {
                index: i,
                prob: o.prob.clone(),
                next: state_id[o.next.as_str()],
                signals: [sigs[0].id(&sig(&o.s1)), sigs[1].id(&sig(&o.s2))],
            }
        };
        let initial = match &spec.initial {
            Initial::State(s) => vec![Branch {
                index: 0,
                prob: Rational::one(),
                next: state_id[s.as_str()],
                signals: [sigs[0].id(""), sigs[1].id("")],
            }],
            Initial::Chance(os) => os.iter().enumerate().map(|(i, o)| branch(&mut sigs, i, o)).collect(),
        };
        let mut payoff: BTreeMap<(&str, &str, &str), &Rational> = BTreeMap::new();
        for p in &spec.payoffs {
            payoff.insert((p.state.as_str(), p.a1.as_str(), p.a2.as_str()), &p.value);
        }
        let mut by_key: BTreeMap<(&str, &str, &str), &[Outcome]> = BTreeMap::new();
        for t in &spec.transitions {
            by_key.insert((t.state.as_str(), t.a1.as_str(), t.a2.as_str()), &t.outcomes);
        }
        let mut cells = Vec::with_capacity(spec.states.len());
        for s in &spec.states {
            let sets = &spec.actions[s];
            let mut row = Vec::with_capacity(sets.max.len() * sets.min.len());
            for a1 in &sets.max {
                for a2 in &sets.min {
                    let key = (s.as_str(), a1.as_str(), a2.as_str());
                    let outcomes = by_key[&key].iter().enumerate().map(|(i, o)| branch(&mut sigs, i, o)).collect();
                    row.push(Cell { payoff: payoff.get(&key).map(|r| (*r).clone()).unwrap_or_default(), outcomes });
                }
            }
            cells.push(row);
        }
        let [a0, a1] = acts;
        let [s0, s1] = sigs;
        Ok(CompiledGame {
            names: Names {
                states: spec.states.clone(),
                actions: [a0.names, a1.names],
                signals: [s0.names, s1.names],
            },
            actions,
            initial,
            cells,
        })
    }

    pub fn num_states(&self) -> usize {
        self.actions.len()
    }

    pub fn actions_of(&self, state: StateId, player: Player) -> &[ActionId] {
        &self.actions[state][player.index()]
    }

    fn local(&self, state: StateId, player: Player, action: ActionId) -> usize {
        self.actions_of(state, player)
            .iter()
            .position(|&a| a == action)
            .expect("action available in state")
    }

    pub fn cell(&self, state: StateId, a1: ActionId, a2: ActionId) -> &Cell {
        let n2 = self.actions[state][1].len();
        let i = self.local(state, Player::Max, a1) * n2 + self.local(state, Player::Min, a2);
        &self.cells[state][i]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.names.states.iter().position(|s| s == name)
    }

    pub fn action_id(&self, player: Player, name: &str) -> Option<ActionId> {
        self.names.actions[player.index()].iter().position(|s| s == name).map(|i| i as ActionId)
    }
}
