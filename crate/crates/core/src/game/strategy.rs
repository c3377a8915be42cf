use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::game::explicit::{ExplicitGame, PrivId, PrivateHistory};
use crate::game::spec::Player;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StrategyError {
    #[error("{owner} strategy has no row for private history {history}")]
    MissingRow { owner: Player, history: String },
    #[error("{owner} strategy row for {history} is not a distribution over the available actions")]
    BadRow { owner: Player, history: String },
    #[error("strategy belongs to {found}, expected {expected}")]
    WrongOwner { expected: Player, found: Player },
}

/// How to fill private histories a strategy table does not cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fallback {
    Uniform,
    /// Play the named action when available, uniform otherwise.
    Action(String),
}

/// A map from the owner's private histories to distributions over actions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "StrategyFile", from = "StrategyFile")]
pub struct BehavioralStrategy {
    pub owner: Player,
    pub rows: BTreeMap<PrivateHistory, BTreeMap<String, Rational>>,
}

#[derive(Serialize, Deserialize)]
struct StrategyFile {
    owner: Player,
    rows: Vec<RowFile>,
}

#[derive(Serialize, Deserialize)]
struct RowFile {
    history: PrivateHistory,
    probs: BTreeMap<String, Rational>,
}

impl From<BehavioralStrategy> for StrategyFile {
    fn from(s: BehavioralStrategy) -> Self {
        StrategyFile {
            owner: s.owner,
            rows: s.rows.into_iter().map(|(history, probs)| RowFile { history, probs }).collect(),
        }
    }
}

impl From<StrategyFile> for BehavioralStrategy {
    fn from(f: StrategyFile) -> Self {
        BehavioralStrategy { owner: f.owner, rows: f.rows.into_iter().map(|r| (r.history, r.probs)).collect() }
    }
}

/// Dense per-node rows aligned with a game's private tree; empty for
/// nodes at the horizon.
pub type DenseRows = Vec<Vec<Rational>>;

impl BehavioralStrategy {
    pub fn new(owner: Player) -> Self {
        BehavioralStrategy { owner, rows: BTreeMap::new() }
    }

    /// Builds a table from dense rows over `game`'s private tree.
    pub fn from_dense(game: &ExplicitGame, owner: Player, rows: &[Vec<Rational>]) -> Self {
        let tree = game.tree(owner);
        let mut out = BehavioralStrategy::new(owner);
        for p in tree.decision_nodes() {
            let node = &tree.nodes[p];
            let row = node
                .actions
                .iter()
                .zip(&rows[p])
                .map(|(&a, pr)| (game.action_name(owner, a).to_string(), pr.clone()))
                .collect();
            out.rows.insert(game.history_of(owner, p), row);
        }
        out
    }

    pub fn uniform(game: &ExplicitGame, owner: Player) -> Self {
        BehavioralStrategy::new(owner).completed(game, &Fallback::Uniform)
    }

    /// Pure strategy choosing, at each decision node, the action at the given position.
    pub fn pure(game: &ExplicitGame, owner: Player, choice: &[usize]) -> Self {
        let tree = game.tree(owner);
        let rows: DenseRows = (0..tree.nodes.len())
            .map(|p| {
                (0..tree.nodes[p].actions.len())
                    .map(|k| if k == choice[p] { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        Self::from_dense(game, owner, &rows)
    }

    /// Copy of `self` with rows added for every decision node of `game` it lacks.
    pub fn completed(&self, game: &ExplicitGame, fallback: &Fallback) -> Self {
        let mut out = self.clone();
        let tree = game.tree(self.owner);
        for p in tree.decision_nodes() {
            let h = game.history_of(self.owner, p);
            if out.rows.contains_key(&h) {
                continue;
            }
            let names: Vec<&str> = tree.nodes[p].actions.iter().map(|&a| game.action_name(self.owner, a)).collect();
            let row = match fallback {
                Fallback::Action(a) if names.contains(&a.as_str()) => names
                    .iter()
                    .map(|n| (n.to_string(), if n == a { Rational::one() } else { Rational::zero() }))
                    .collect(),
                _ => {
                    let u = Rational::new(1, names.len() as i64);
                    names.iter().map(|n| (n.to_string(), u.clone())).collect()
                }
            };
            out.rows.insert(h, row);
        }
        out
    }

    /// Copy of `self` in which every decision node of `game` offering a
    /// single action plays it. Projects a strategy onto a truncation whose
    /// last stage is forced, such as a shorter leavable game.
    pub fn forced_moves(&self, game: &ExplicitGame) -> Self {
        let mut out = self.clone();
        let tree = game.tree(self.owner);
        for p in tree.decision_nodes() {
            if let [only] = tree.nodes[p].actions[..] {
                let row = [(game.action_name(self.owner, only).to_string(), Rational::one())].into();
                out.rows.insert(game.history_of(self.owner, p), row);
            }
        }
        out
    }

    /// Keeps only rows for histories shorter than `horizon`.
    pub fn restricted(&self, horizon: usize) -> Self {
        BehavioralStrategy {
            owner: self.owner,
            rows: self.rows.iter().filter(|(h, _)| h.len() < horizon).map(|(h, r)| (h.clone(), r.clone())).collect(),
        }
    }

    pub fn row(&self, history: &PrivateHistory) -> Option<&BTreeMap<String, Rational>> {
        self.rows.get(history)
    }

    /// Resolves the table against `game`'s private tree.
    pub fn resolve(&self, game: &ExplicitGame) -> Result<DenseRows, StrategyError> {
        let tree = game.tree(self.owner);
        let mut dense = vec![Vec::new(); tree.nodes.len()];
        for p in tree.decision_nodes() {
            dense[p] = self.resolve_node(game, p)?;
        }
        Ok(dense)
    }

    fn resolve_node(&self, game: &ExplicitGame, p: PrivId) -> Result<Vec<Rational>, StrategyError> {
        let h = game.history_of(self.owner, p);
        let Some(row) = self.rows.get(&h) else {
            return Err(StrategyError::MissingRow { owner: self.owner, history: h.to_string() });
        };
        let node = game.private_node(self.owner, p);
        let bad = || StrategyError::BadRow { owner: self.owner, history: h.to_string() };
        if row.values().any(|v| v.is_negative()) || !row.values().sum::<Rational>().is_one() {
            return Err(bad());
        }
        let probs: Vec<Rational> = node
            .actions
            .iter()
            .map(|&a| row.get(game.action_name(self.owner, a)).cloned().unwrap_or_default())
            .collect();
        // Mass on actions unavailable here.
        if !probs.iter().sum::<Rational>().is_one() {
            return Err(bad());
        }
        Ok(probs)
    }
}

/// A pair of strategies, one per player.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Profile {
    pub sigma1: BehavioralStrategy,
    pub sigma2: BehavioralStrategy,
}

impl Profile {
    pub fn new(sigma1: BehavioralStrategy, sigma2: BehavioralStrategy) -> Result<Self, StrategyError> {
        if sigma1.owner != Player::Max {
            return Err(StrategyError::WrongOwner { expected: Player::Max, found: sigma1.owner });
        }
        if sigma2.owner != Player::Min {
            return Err(StrategyError::WrongOwner { expected: Player::Min, found: sigma2.owner });
        }
        Ok(Profile { sigma1, sigma2 })
    }

    pub fn of(&self, player: Player) -> &BehavioralStrategy {
        match player {
            Player::Max => &self.sigma1,
            Player::Min => &self.sigma2,
        }
    }
}
