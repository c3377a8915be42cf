//! Fully unfolded finite-horizon game trees.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::game::compiled::{ActionId, Names, SignalId, StateId};
use crate::game::spec::Player;
use crate::rational::Rational;

pub type NodeId = usize;
pub type PrivId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Variant {
    Standard,
    /// Truncation `L_n` of a leavable game: the Maximizer must stop by stage `stop_by`.
    Leavable { stop_by: usize },
}

#[derive(Debug, Clone)]
pub struct Edge {
    /// Position of each player's action in its available list at the parent.
    pub local: [usize; 2],
    pub actions: [ActionId; 2],
    pub outcome: usize,
    pub signals: [SignalId; 2],
    pub prob: Rational,
}

#[derive(Debug, Clone)]
pub struct Node {
    pub depth: usize,
    pub state: StateId,
    pub parent: Option<NodeId>,
    /// `None` for roots; roots carry their initial signals in `root_signals`.
    pub edge: Option<Edge>,
    pub root_signals: [SignalId; 2],
    /// Probability of Nature's draws along the path.
    pub chance: Rational,
    /// Daily payoff of the stage that led into this node.
    pub increment: Rational,
    pub cumulative: Rational,
    pub private: [PrivId; 2],
    /// Children ordered by (a1, a2, outcome); `blocks[k]..blocks[k+1]` holds the
    /// children for the action pair with index `k = a1_local * n2 + a2_local`.
    pub children: Vec<NodeId>,
    pub blocks: Vec<usize>,
}

impl Node {
    pub fn children_for(&self, a1: usize, a2: usize, n2: usize) -> &[NodeId] {
        let k = a1 * n2 + a2;
        &self.children[self.blocks[k]..self.blocks[k + 1]]
    }
}

#[derive(Debug, Clone)]
pub struct PrivateNode {
    pub depth: usize,
    /// (parent, action position at parent, signal received).
    pub parent: Option<(PrivId, usize, SignalId)>,
    pub initial_signal: SignalId,
    /// Available actions; empty at the horizon.
    pub actions: Vec<ActionId>,
    pub children: BTreeMap<(usize, SignalId), PrivId>,
    pub members: Vec<NodeId>,
}

#[derive(Debug, Clone, Default)]
pub struct PrivateTree {
    pub nodes: Vec<PrivateNode>,
    pub roots: Vec<PrivId>,
}

impl PrivateTree {
    /// Nodes where the owner chooses an action.
    pub fn decision_nodes(&self) -> impl Iterator<Item = PrivId> + '_ {
        (0..self.nodes.len()).filter(move |&p| !self.nodes[p].actions.is_empty())
    }

    pub fn count_at_depth(&self, depth: usize) -> usize {
        self.nodes.iter().filter(|n| n.depth == depth).count()
    }
}

/// A player's own record of play: the initial signal followed by the
/// (own action, own signal) pair of every completed stage.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PrivateHistory {
    #[serde(default)]
    pub initial: String,
    #[serde(default)]
    pub steps: Vec<(String, String)>,
}

impl PrivateHistory {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

impl std::fmt::Display for PrivateHistory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "<{}>", self.initial)?;
        for (a, s) in &self.steps {
            write!(f, " {a}:{s}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ExplicitGame {
    pub horizon: usize,
    pub variant: Variant,
    pub names: Arc<Names>,
    pub nodes: Vec<Node>,
    pub roots: Vec<NodeId>,
    pub private: [PrivateTree; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown history: {0}")]
pub struct UnknownHistory(pub String);

impl ExplicitGame {
    pub fn tree(&self, player: Player) -> &PrivateTree {
        &self.private[player.index()]
    }

    pub fn private_node(&self, player: Player, id: PrivId) -> &PrivateNode {
        &self.private[player.index()].nodes[id]
    }

    pub fn actions_at(&self, node: NodeId, player: Player) -> &[ActionId] {
        &self.private_node(player, self.nodes[node].private[player.index()]).actions
    }

    pub fn action_name(&self, player: Player, a: ActionId) -> &str {
        &self.names.actions[player.index()][a as usize]
    }

    pub fn signal_name(&self, player: Player, s: SignalId) -> &str {
        &self.names.signals[player.index()][s as usize]
    }

    pub fn nodes_at_depth(&self, depth: usize) -> usize {
        self.nodes.iter().filter(|n| n.depth == depth).count()
    }

    pub fn history_of(&self, player: Player, id: PrivId) -> PrivateHistory {
        let tree = self.tree(player);
        let mut steps = Vec::new();
        let mut cur = id;
        while let Some((parent, a, s)) = tree.nodes[cur].parent {
            let act = tree.nodes[parent].actions[a];
            steps.push((self.action_name(player, act).to_string(), self.signal_name(player, s).to_string()));
            cur = parent;
        }
        steps.reverse();
        PrivateHistory { initial: self.signal_name(player, tree.nodes[cur].initial_signal).to_string(), steps }
    }

    pub fn find_private(&self, player: Player, history: &PrivateHistory) -> Option<PrivId> {
        let tree = self.tree(player);
        let mut cur = *tree.roots.iter().find(|&&r| {
            self.signal_name(player, tree.nodes[r].initial_signal) == history.initial
        })?;
        for (a, s) in &history.steps {
            let node = &tree.nodes[cur];
            let pos = node.actions.iter().position(|&x| self.action_name(player, x) == a)?;
            cur = *node
                .children
                .iter()
                .find(|((pa, sig), _)| *pa == pos && self.signal_name(player, *sig) == s)?
                .1;
        }
        Some(cur)
    }

    /// Cumulative payoff `rho_k(h)` of the public history ending at `node`.
    pub fn cumulative_payoff(&self, node: NodeId) -> Result<Rational, UnknownHistory> {
        self.nodes
            .get(node)
            .map(|n| n.cumulative.clone())
            .ok_or_else(|| UnknownHistory(format!("node {node}")))
    }

    /// Follows `(a1, a2, outcome index)` steps from the root with the given
    /// initial outcome index.
    pub fn find_public(&self, root: usize, steps: &[(&str, &str, usize)]) -> Result<NodeId, UnknownHistory> {
        let describe = || format!("root {root} then {steps:?}");
        let mut cur = *self.roots.get(root).ok_or_else(|| UnknownHistory(describe()))?;
        for (a1, a2, o) in steps {
            let n = &self.nodes[cur];
            cur = *n
                .children
                .iter()
                .find(|&&c| {
                    let e = self.nodes[c].edge.as_ref().expect("child edge");
                    self.action_name(Player::Max, e.actions[0]) == *a1
                        && self.action_name(Player::Min, e.actions[1]) == *a2
                        && e.outcome == *o
                })
                .ok_or_else(|| UnknownHistory(describe()))?;
        }
        Ok(cur)
    }

    pub fn cumulative_payoff_of(&self, root: usize, steps: &[(&str, &str, usize)]) -> Result<Rational, UnknownHistory> {
        self.cumulative_payoff(self.find_public(root, steps)?)
    }

    /// One node per line: `id parent depth labels increment probability`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (id, n) in self.nodes.iter().enumerate() {
            let parent = n.parent.map(|p| p.to_string()).unwrap_or_else(|| "-".into());
            let (labels, prob) = match &n.edge {
                Some(e) => (
                    format!(
                        "{}/{}/{}:{}/{}",
                        self.action_name(Player::Max, e.actions[0]),
                        self.action_name(Player::Min, e.actions[1]),
                        self.names.states[n.state],
                        self.signal_name(Player::Max, e.signals[0]),
                        self.signal_name(Player::Min, e.signals[1]),
                    ),
                    e.prob.clone(),
                ),
                None => (
                    format!(
                        "root/{}:{}/{}",
                        self.names.states[n.state],
                        self.signal_name(Player::Max, n.root_signals[0]),
                        self.signal_name(Player::Min, n.root_signals[1]),
                    ),
                    n.chance.clone(),
                ),
            };
            let _ = writeln!(out, "{id} {parent} {} {labels} {} {prob}", n.depth, n.increment);
        }
        out
    }
}
