//! Unfolding a generator spec into the explicit truncated game `G_n`.
//!
//! The truncation keeps the first `n` stages: the tree simply stops at depth
//! `n`, so payoffs of later stages are structurally absent. Each player's
//! private tree groups public nodes by that player's (action, signal)
//! record, which is exactly what the player can distinguish.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::sync::Arc;

use crate::game::compiled::{ActionId, CompiledGame, SpecError, StateId};
use crate::game::explicit::{Edge, ExplicitGame, Node, NodeId, PrivId, PrivateNode, PrivateTree, Variant};
use crate::game::spec::{GameSpec, Player};
use crate::rational::Rational;

pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UnfoldError {
    #[error("truncated tree would have {estimated} nodes, over the budget of {budget}; lower the horizon")]
    BudgetExceeded { estimated: u128, budget: u64 },
    #[error(transparent)]
    InvalidSpec(#[from] SpecError),
    #[error("{player}'s available actions differ between histories it cannot tell apart ({history})")]
    ObservationLeak { player: Player, history: String },
}

#[derive(Debug, Clone)]
pub struct TruncationRequest<'a> {
    pub spec: &'a GameSpec,
    pub horizon: usize,
    pub variant: Variant,
    pub node_budget: u64,
}

impl<'a> TruncationRequest<'a> {
    pub fn new(spec: &'a GameSpec, horizon: usize) -> Self {
        TruncationRequest { spec, horizon, variant: Variant::Standard, node_budget: DEFAULT_NODE_BUDGET }
    }

    pub fn leavable(spec: &'a GameSpec, horizon: usize) -> Self {
        TruncationRequest { variant: Variant::Leavable { stop_by: horizon }, ..Self::new(spec, horizon) }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.node_budget = budget;
        self
    }
}

/// Builds `G_n` (or `L_n` for the leavable variant).
pub fn truncate(req: &TruncationRequest) -> Result<ExplicitGame, UnfoldError> {
    match req.variant {
        Variant::Standard => {
            let compiled = CompiledGame::new(req.spec)?;
            Unfolder::new(&compiled).budget(req.node_budget).build(req.horizon, Variant::Standard)
        }
        Variant::Leavable { stop_by } => {
            crate::leavable::build_leavable_truncation_with_budget(req.spec, stop_by, req.node_budget)
        }
    }
}

/// Shorthand for a standard truncation with the default budget.
pub fn truncate_spec(spec: &GameSpec, horizon: usize) -> Result<ExplicitGame, UnfoldError> {
    truncate(&TruncationRequest::new(spec, horizon))
}

/// Restricts the actions available in `state` at `depth`; must return a
/// nonempty subset of the state's actions.
pub type Restriction<'a> = dyn Fn(StateId, usize, Player, &[ActionId]) -> Vec<ActionId> + 'a;

pub struct Unfolder<'a> {
    game: &'a CompiledGame,
    restrict: Option<&'a Restriction<'a>>,
    budget: u64,
}

impl<'a> Unfolder<'a> {
    pub fn new(game: &'a CompiledGame) -> Self {
        Unfolder { game, restrict: None, budget: DEFAULT_NODE_BUDGET }
    }

    pub fn budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn restrict(mut self, f: &'a Restriction<'a>) -> Self {
        self.restrict = Some(f);
        self
    }

    fn available(&self, state: StateId, depth: usize, player: Player) -> Cow<'a, [ActionId]> {
        let all = self.game.actions_of(state, player);
        match self.restrict {
            Some(f) => Cow::Owned(f(state, depth, player, all)),
            None => Cow::Borrowed(all),
        }
    }

    /// Exact node count of the truncated tree, computed per (depth, state).
    pub fn estimate(&self, horizon: usize) -> u128 {
        let n = self.game.num_states();
        let mut counts = vec![0u128; n];
        for b in &self.game.initial {
            if b.prob.is_positive() {
                counts[b.next] += 1;
            }
        }
        let mut total: u128 = counts.iter().sum();
        for depth in 0..horizon {
            let mut next = vec![0u128; n];
            for (s, &c) in counts.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for &a1 in self.available(s, depth, Player::Max).iter() {
                    for &a2 in self.available(s, depth, Player::Min).iter() {
                        for b in &self.game.cell(s, a1, a2).outcomes {
                            if b.prob.is_positive() {
                                next[b.next] = next[b.next].saturating_add(c);
                            }
                        }
                    }
                }
            }
            total = total.saturating_add(next.iter().fold(0u128, |a, &x| a.saturating_add(x)));
            counts = next;
            if total > self.budget as u128 {
                break;
            }
        }
        total
    }

    pub fn build(&self, horizon: usize, variant: Variant) -> Result<ExplicitGame, UnfoldError> {
        let estimated = self.estimate(horizon);
        if estimated > self.budget as u128 {
            return Err(UnfoldError::BudgetExceeded { estimated, budget: self.budget });
        }
        let mut b = Builder {
            unf: self,
            horizon,
            nodes: Vec::with_capacity(estimated as usize),
            private: [PrivateTree::default(), PrivateTree::default()],
        };
        let mut roots = Vec::new();
        for br in &self.game.initial {
            if !br.prob.is_positive() {
                continue;
            }
            let mut private = [0; 2];
            for p in Player::BOTH {
                let tree = &mut b.private[p.index()];
                let sig = br.signals[p.index()];
                private[p.index()] = match tree.roots.iter().find(|&&r| tree.nodes[r].initial_signal == sig) {
                    Some(&r) => r,
                    None => {
                        tree.nodes.push(PrivateNode {
                            depth: 0,
                            parent: None,
                            initial_signal: sig,
                            actions: Vec::new(),
                            children: BTreeMap::new(),
                            members: Vec::new(),
                        });
                        let id = tree.nodes.len() - 1;
                        tree.roots.push(id);
                        id
                    }
                };
            }
            let id = b.push(Node {
                depth: 0,
                state: br.next,
                parent: None,
                edge: None,
                root_signals: br.signals,
                chance: br.prob.clone(),
                increment: Rational::zero(),
                cumulative: Rational::zero(),
                private,
                children: Vec::new(),
                blocks: Vec::new(),
            })?;
            roots.push(id);
        }
        let mut frontier = roots.clone();
        for depth in 0..horizon {
            let mut next = Vec::new();
            for u in frontier {
                b.expand(u, depth, &mut next)?;
            }
            frontier = next;
        }
        Ok(ExplicitGame {
            horizon,
            variant,
            names: Arc::new(self.game.names.clone()),
            nodes: b.nodes,
            roots,
            private: b.private,
        })
    }
}

struct Builder<'u, 'a> {
    unf: &'u Unfolder<'a>,
    horizon: usize,
    nodes: Vec<Node>,
    private: [PrivateTree; 2],
}

impl Builder<'_, '_> {
    /// Adds a node and registers it with both private nodes, checking that
    /// each player's action set is determined by what it has observed.
    fn push(&mut self, node: Node) -> Result<NodeId, UnfoldError> {
        let id = self.nodes.len();
        for p in Player::BOTH {
            let pid = node.private[p.index()];
            let avail: Vec<ActionId> = if node.depth < self.horizon {
                self.unf.available(node.state, node.depth, p).into_owned()
            } else {
                Vec::new()
            };
            let pn = &mut self.private[p.index()].nodes[pid];
            if pn.members.is_empty() {
                pn.actions = avail;
            } else if pn.actions != avail {
                let history = self.describe(p, pid);
                return Err(UnfoldError::ObservationLeak { player: p, history });
            }
            self.private[p.index()].nodes[pid].members.push(id);
        }
        self.nodes.push(node);
        Ok(id)
    }

    fn describe(&self, player: Player, mut pid: PrivId) -> String {
        let names = &self.unf.game.names;
        let tree = &self.private[player.index()];
        let mut parts = Vec::new();
        while let Some((parent, a, s)) = tree.nodes[pid].parent {
            let act = tree.nodes[parent].actions[a];
            parts.push(format!(
                "{}:{}",
                names.actions[player.index()][act as usize],
                names.signals[player.index()][s as usize]
            ));
            pid = parent;
        }
        parts.reverse();
        format!("<{}> {}", names.signals[player.index()][tree.nodes[pid].initial_signal as usize], parts.join(" "))
    }

    fn private_child(&mut self, player: Player, parent: PrivId, local: usize, sig: u32) -> PrivId {
        let tree = &mut self.private[player.index()];
        if let Some(&c) = tree.nodes[parent].children.get(&(local, sig)) {
            return c;
        }
        let depth = tree.nodes[parent].depth + 1;
        let initial_signal = tree.nodes[parent].initial_signal;
        tree.nodes.push(PrivateNode {
            depth,
            parent: Some((parent, local, sig)),
            initial_signal,
            actions: Vec::new(),
            children: BTreeMap::new(),
            members: Vec::new(),
        });
        let id = tree.nodes.len() - 1;
        tree.nodes[parent].children.insert((local, sig), id);
        id
    }

    fn expand(&mut self, u: NodeId, depth: usize, out: &mut Vec<NodeId>) -> Result<(), UnfoldError> {
        let game = self.unf.game;
        let state = self.nodes[u].state;
        let parent_priv = self.nodes[u].private;
        let chance = self.nodes[u].chance.clone();
        let cumulative = self.nodes[u].cumulative.clone();
        let acts1 = self.private[0].nodes[parent_priv[0]].actions.clone();
        let acts2 = self.private[1].nodes[parent_priv[1]].actions.clone();
        let mut children = Vec::new();
        let mut blocks = vec![0];
        for (i1, &a1) in acts1.iter().enumerate() {
            for (i2, &a2) in acts2.iter().enumerate() {
                let cell = game.cell(state, a1, a2);
                for br in &cell.outcomes {
                    if !br.prob.is_positive() {
                        continue;
                    }
                    let private = [
                        self.private_child(Player::Max, parent_priv[0], i1, br.signals[0]),
                        self.private_child(Player::Min, parent_priv[1], i2, br.signals[1]),
                    ];
                    let id = self.push(Node {
                        depth: depth + 1,
                        state: br.next,
                        parent: Some(u),
                        edge: Some(Edge {
                            local: [i1, i2],
                            actions: [a1, a2],
                            outcome: br.index,
                            signals: br.signals,
                            prob: br.prob.clone(),
                        }),
                        root_signals: self.nodes[u].root_signals,
                        chance: &chance * &br.prob,
                        increment: cell.payoff.clone(),
                        cumulative: &cumulative + &cell.payoff,
                        private,
                        children: Vec::new(),
                        blocks: Vec::new(),
                    })?;
                    children.push(id);
                    out.push(id);
                }
                blocks.push(children.len());
            }
        }
        self.nodes[u].children = children;
        self.nodes[u].blocks = blocks;
        Ok(())
    }
}
