//! Exact values of finite truncations via sequence-form linear programming.
//!
//! Each player's strategy is encoded as a realization plan: one weight per
//! sequence of own choices, with flow conservation at every decision node.
//! Decision nodes offering a single action add no sequence of their own, so
//! forced moves do not inflate the program. The Maximizer's program
//! maximizes the value it can guarantee against the Minimizer's best
//! response (written through LP duality); the Minimizer's program is its
//! dual. Both are solved, and their optima must coincide.
//!
//! [`brute_force_oracle`] reaches the same number by a different route:
//! enumerate reduced pure strategies, tabulate the payoff matrix, and solve
//! the matrix game.

use std::collections::{BTreeMap, BTreeSet};

use crate::game::explicit::{ExplicitGame, NodeId, PrivId};
use crate::game::spec::Player;
use crate::game::strategy::{BehavioralStrategy, StrategyError};
use crate::lp::{LinearProgram, LpError, Relation};
use crate::rational::Rational;

pub const DEFAULT_ORACLE_BUDGET: u64 = 10_000;
pub const DEFAULT_SEQUENCE_BUDGET: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("sequence form has {count} sequences for {player}, over the budget of {budget}")]
    SizeBudgetExceeded { player: Player, count: usize, budget: usize },
    #[error("internal LP failure: {0}")]
    Lp(#[from] LpError),
    #[error("primal and dual optima differ ({primal} vs {dual})")]
    DualityGap { primal: Rational, dual: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("{player} has {count} reduced pure strategies, over the oracle budget of {budget}")]
    OracleBudgetExceeded { player: Player, count: u128, budget: u64 },
    #[error("internal LP failure: {0}")]
    Lp(#[from] LpError),
}

/// A decision node with at least two actions.
#[derive(Debug, Clone)]
pub struct InfoSet {
    pub node: PrivId,
    pub parent_seq: usize,
    pub seqs: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct SequenceForm {
    /// Sequence in effect on arrival at each private node (0 = empty sequence).
    pub seq_in: [Vec<usize>; 2],
    /// Sequence in effect after choosing each available action.
    pub seq_of: [Vec<Vec<usize>>; 2],
    pub num_seqs: [usize; 2],
    pub infosets: [Vec<InfoSet>; 2],
    /// Sparse payoff matrix over sequence pairs, weighted by Nature.
    pub payoff: BTreeMap<(usize, usize), Rational>,
    pub labels: [Vec<String>; 2],
}

impl SequenceForm {
    /// Number of `(private history, action)` pairs behind the owner's plan,
    /// counting forced moves.
    pub fn pair_count(game: &ExplicitGame, player: Player) -> usize {
        game.tree(player).nodes.iter().map(|n| n.actions.len()).sum()
    }
}

pub fn build_sequence_form(game: &ExplicitGame) -> SequenceForm {
    let mut seq_in: [Vec<usize>; 2] = Default::default();
    let mut seq_of: [Vec<Vec<usize>>; 2] = Default::default();
    let mut num_seqs = [1usize; 2];
    let mut infosets: [Vec<InfoSet>; 2] = Default::default();
    let mut labels: [Vec<String>; 2] = [vec!["x0".to_string()], vec!["y0".to_string()]];
    for p in Player::BOTH {
        let i = p.index();
        let tree = game.tree(p);
        seq_in[i] = vec![0; tree.nodes.len()];
        seq_of[i] = vec![Vec::new(); tree.nodes.len()];
        // Parents precede children in id order.
        for id in 0..tree.nodes.len() {
            let node = &tree.nodes[id];
            let incoming = match node.parent {
                None => 0,
                Some((parent, local, _)) => seq_of[i][parent][local],
            };
            seq_in[i][id] = incoming;
            if node.actions.len() >= 2 {
                let mut seqs = Vec::with_capacity(node.actions.len());
                for &a in &node.actions {
                    seqs.push(num_seqs[i]);
                    let prefix = if i == 0 { "x" } else { "y" };
                    labels[i].push(format!("{prefix}{}[p{id}:{}]", num_seqs[i], game.action_name(p, a)));
                    num_seqs[i] += 1;
                }
                seq_of[i][id] = seqs.clone();
                infosets[i].push(InfoSet { node: id, parent_seq: incoming, seqs });
            } else {
                seq_of[i][id] = vec![incoming; node.actions.len()];
            }
        }
    }
    let mut payoff: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    for v in &game.nodes {
        if v.increment.is_zero() {
            continue;
        }
        let (Some(u), Some(e)) = (v.parent, &v.edge) else { continue };
        let pu = &game.nodes[u].private;
        let key = (seq_of[0][pu[0]][e.local[0]], seq_of[1][pu[1]][e.local[1]]);
        *payoff.entry(key).or_default() += &v.chance * &v.increment;
    }
    SequenceForm { seq_in, seq_of, num_seqs, infosets, payoff, labels }
}

/// A linear program together with the map back to sequences.
#[derive(Debug, Clone)]
pub struct LpInstance {
    pub owner: Player,
    pub lp: LinearProgram,
    /// LP variable of each of the owner's sequences.
    pub plan_vars: Vec<usize>,
    /// LP variable holding the game value (up to sign for the Minimizer).
    pub value_var: usize,
}

impl LpInstance {
    /// Realization-plan variables: the empty sequence plus one per
    /// (decision node, action) pair at nodes with a real choice.
    pub fn plan_variable_count(&self) -> usize {
        self.plan_vars.len()
    }

    pub fn dump(&self) -> String {
        format!("\\ sequence-form LP for {}\n{}", self.owner, self.lp.dump())
    }
}

/// Sequence-form LP of `owner`. The Maximizer's optimum is the game value;
/// the Minimizer's is its negation.
pub fn sequence_form_lp(sf: &SequenceForm, owner: Player) -> LpInstance {
    let me = owner.index();
    let opp = owner.opponent().index();
    let mut lp = LinearProgram::default();
    let plan_vars: Vec<usize> = (0..sf.num_seqs[me]).map(|s| lp.add_var(sf.labels[me][s].clone(), false)).collect();
    let dual_prefix = if owner == Player::Max { "q" } else { "p" };
    let dual_vars: Vec<usize> =
        (0..=sf.infosets[opp].len()).map(|r| lp.add_var(format!("{dual_prefix}{r}"), true)).collect();
    // Own flow constraints.
    lp.add_constraint(vec![(plan_vars[0], Rational::one())], Relation::Eq, Rational::one());
    for set in &sf.infosets[me] {
        let mut row: Vec<(usize, Rational)> = set.seqs.iter().map(|&s| (plan_vars[s], Rational::one())).collect();
        row.push((plan_vars[set.parent_seq], -Rational::one()));
        lp.add_constraint(row, Relation::Eq, Rational::zero());
    }
    // One dual constraint per opponent sequence j:
    //   max:  (F^T q)_j - (A^T x)_j <= 0
    //   min:  (E^T p)_j - (A y)_j   >= 0
    let mut rows: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); sf.num_seqs[opp]];
    rows[0].insert(dual_vars[0], Rational::one());
    for (r, set) in sf.infosets[opp].iter().enumerate() {
        for &s in &set.seqs {
            *rows[s].entry(dual_vars[r + 1]).or_default() += &Rational::one();
        }
        *rows[set.parent_seq].entry(dual_vars[r + 1]).or_default() -= &Rational::one();
    }
    for (&(s1, s2), a) in &sf.payoff {
        let (mine, theirs) = if owner == Player::Max { (s1, s2) } else { (s2, s1) };
        *rows[theirs].entry(plan_vars[mine]).or_default() -= a;
    }
    let relation = if owner == Player::Max { Relation::Le } else { Relation::Ge };
    for row in rows {
        let coeffs: Vec<(usize, Rational)> = row.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        lp.add_constraint(coeffs, relation, Rational::zero());
    }
    let value_var = dual_vars[0];
    lp.objective[value_var] = if owner == Player::Max { Rational::one() } else { -Rational::one() };
    LpInstance { owner, lp, plan_vars, value_var }
}

/// Sequence weights of one player, stored per private node and action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizationPlan {
    pub owner: Player,
    /// `weights[node][k]`: weight of reaching `node` and playing its `k`-th action.
    pub weights: Vec<Vec<Rational>>,
}

impl RealizationPlan {
    /// Weight of the sequence leading into `node` (1 at roots).
    pub fn incoming(&self, game: &ExplicitGame, node: PrivId) -> Rational {
        match game.private_node(self.owner, node).parent {
            None => Rational::one(),
            Some((parent, local, _)) => self.weights[parent][local].clone(),
        }
    }

    /// Nodes where flow conservation or nonnegativity fails.
    pub fn flow_violations(&self, game: &ExplicitGame) -> Vec<PrivId> {
        let tree = game.tree(self.owner);
        tree.decision_nodes()
            .filter(|&p| {
                let w = &self.weights[p];
                w.iter().any(|x| x.is_negative()) || w.iter().sum::<Rational>() != self.incoming(game, p)
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct ZeroSumSolution {
    pub value: Rational,
    pub plan1: RealizationPlan,
    pub plan2: RealizationPlan,
    pub pivots: usize,
}

impl ZeroSumSolution {
    pub fn maximizer(&self, game: &ExplicitGame) -> BehavioralStrategy {
        plan_to_behavioral(game, &self.plan1)
    }

    pub fn minimizer(&self, game: &ExplicitGame) -> BehavioralStrategy {
        plan_to_behavioral(game, &self.plan2)
    }
}

fn plan_from_lp(game: &ExplicitGame, sf: &SequenceForm, inst: &LpInstance, values: &[Rational]) -> RealizationPlan {
    let i = inst.owner.index();
    let weights = sf.seq_of[i]
        .iter()
        .map(|seqs| seqs.iter().map(|&s| values[inst.plan_vars[s]].clone()).collect())
        .collect();
    let _ = game;
    RealizationPlan { owner: inst.owner, weights }
}

pub fn solve_zero_sum(game: &ExplicitGame) -> Result<ZeroSumSolution, SolveError> {
    solve_zero_sum_with_budget(game, DEFAULT_SEQUENCE_BUDGET)
}

pub fn solve_zero_sum_with_budget(game: &ExplicitGame, budget: usize) -> Result<ZeroSumSolution, SolveError> {
    let sf = build_sequence_form(game);
    for p in Player::BOTH {
        if sf.num_seqs[p.index()] > budget {
            return Err(SolveError::SizeBudgetExceeded { player: p, count: sf.num_seqs[p.index()], budget });
        }
    }
    let max_lp = sequence_form_lp(&sf, Player::Max);
    let min_lp = sequence_form_lp(&sf, Player::Min);
    let (s1, s2) = rayon::join(|| max_lp.lp.solve(), || min_lp.lp.solve());
    let (s1, s2) = (s1?, s2?);
    let value = s1.values[max_lp.value_var].clone();
    let dual = s2.values[min_lp.value_var].clone();
    if value != dual {
        return Err(SolveError::DualityGap { primal: value, dual });
    }
    Ok(ZeroSumSolution {
        plan1: plan_from_lp(game, &sf, &max_lp, &s1.values),
        plan2: plan_from_lp(game, &sf, &min_lp, &s2.values),
        value,
        pivots: s1.pivots + s2.pivots,
    })
}

/// Kuhn's conversion: action probabilities are sequence weights divided by
/// the incoming weight; unreached decision nodes get uniform rows.
pub fn plan_to_behavioral(game: &ExplicitGame, plan: &RealizationPlan) -> BehavioralStrategy {
    let tree = game.tree(plan.owner);
    let mut rows = vec![Vec::new(); tree.nodes.len()];
    for p in tree.decision_nodes() {
        let incoming = plan.incoming(game, p);
        let k = tree.nodes[p].actions.len();
        rows[p] = if incoming.is_positive() {
            plan.weights[p].iter().map(|w| w / &incoming).collect()
        } else {
            vec![Rational::new(1, k as i64); k]
        };
    }
    BehavioralStrategy::from_dense(game, plan.owner, &rows)
}

pub fn behavioral_to_plan(game: &ExplicitGame, strategy: &BehavioralStrategy) -> Result<RealizationPlan, StrategyError> {
    let rows = strategy.resolve(game)?;
    let tree = game.tree(strategy.owner);
    let mut weights: Vec<Vec<Rational>> = vec![Vec::new(); tree.nodes.len()];
    for p in 0..tree.nodes.len() {
        let reach = match tree.nodes[p].parent {
            None => Rational::one(),
            Some((parent, local, _)) => weights[parent][local].clone(),
        };
        weights[p] = rows[p].iter().map(|pr| &reach * pr).collect();
    }
    Ok(RealizationPlan { owner: strategy.owner, weights })
}

/// Number of reduced pure strategies: choices are only made at decision
/// nodes consistent with the player's own earlier choices.
pub fn reduced_pure_strategy_count(game: &ExplicitGame, player: Player) -> u128 {
    let tree = game.tree(player);
    let mut count = vec![1u128; tree.nodes.len()];
    for p in (0..tree.nodes.len()).rev() {
        let node = &tree.nodes[p];
        if node.actions.is_empty() {
            continue;
        }
        let mut total = 0u128;
        for k in 0..node.actions.len() {
            let prod = node
                .children
                .iter()
                .filter(|((a, _), _)| *a == k)
                .fold(1u128, |acc, (_, &c)| acc.saturating_mul(count[c]));
            total = total.saturating_add(prod);
        }
        count[p] = total;
    }
    tree.roots.iter().fold(1u128, |acc, &r| acc.saturating_mul(count[r]))
}

const UNSET: u16 = u16::MAX;

fn enumerate_pure(game: &ExplicitGame, player: Player) -> Vec<Vec<u16>> {
    let tree = game.tree(player);
    let n = tree.nodes.len();
    fn rec(tree: &crate::game::explicit::PrivateTree, p: PrivId) -> Vec<Vec<(PrivId, u16)>> {
        let node = &tree.nodes[p];
        if node.actions.is_empty() {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for k in 0..node.actions.len() {
            let mut partial: Vec<Vec<(PrivId, u16)>> = vec![vec![(p, k as u16)]];
            for (_, &c) in node.children.iter().filter(|((a, _), _)| *a == k) {
                let sub = rec(tree, c);
                partial = partial
                    .iter()
                    .flat_map(|base| {
                        sub.iter().map(move |s| {
                            let mut v = base.clone();
                            v.extend_from_slice(s);
                            v
                        })
                    })
                    .collect();
            }
            out.extend(partial);
        }
        out
    }
    let mut all: Vec<Vec<(PrivId, u16)>> = vec![Vec::new()];
    for &r in &tree.roots {
        let sub = rec(tree, r);
        all = all
            .iter()
            .flat_map(|base| {
                sub.iter().map(move |s| {
                    let mut v = base.clone();
                    v.extend_from_slice(s);
                    v
                })
            })
            .collect();
    }
    all.into_iter()
        .map(|assign| {
            let mut v = vec![UNSET; n];
            for (p, k) in assign {
                v[p] = k;
            }
            v
        })
        .collect()
}

fn pure_pair_value(game: &ExplicitGame, s1: &[u16], s2: &[u16]) -> Rational {
    fn rec(game: &ExplicitGame, u: NodeId, s1: &[u16], s2: &[u16]) -> Rational {
        let node = &game.nodes[u];
        if node.children.is_empty() {
            return Rational::zero();
        }
        let a1 = s1[node.private[0]] as usize;
        let a2 = s2[node.private[1]] as usize;
        let n2 = game.private_node(Player::Min, node.private[1]).actions.len();
        let mut total = Rational::zero();
        for &v in node.children_for(a1, a2, n2) {
            let child = &game.nodes[v];
            let prob = &child.edge.as_ref().expect("edge").prob;
            total += prob * &(&child.increment + &rec(game, v, s1, s2));
        }
        total
    }
    game.roots.iter().map(|&r| &game.nodes[r].chance * &rec(game, r, s1, s2)).sum()
}

/// Value of the matrix game with the row player maximizing.
///
/// Duplicate rows and columns are merged, the matrix is shifted to be
/// positive, and the column player's program `max sum(y) s.t. M y <= 1,
/// y >= 0` is solved; the shifted value is `1 / sum(y)`. The origin is
/// feasible, so no phase one is needed.
pub fn matrix_game_value(matrix: &[Vec<Rational>]) -> Result<Rational, LpError> {
    let rows: Vec<&Vec<Rational>> = matrix.iter().collect::<BTreeSet<_>>().into_iter().collect();
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let cols: Vec<Vec<Rational>> = (0..ncols)
        .map(|j| rows.iter().map(|r| r[j].clone()).collect())
        .collect::<BTreeSet<Vec<Rational>>>()
        .into_iter()
        .collect();
    let min = cols.iter().flatten().min().cloned().unwrap_or_default();
    let shift = &Rational::one() - &min;
    let mut lp = LinearProgram::default();
    let y: Vec<usize> = (0..cols.len()).map(|j| lp.add_var(format!("c{j}"), false)).collect();
    for &v in &y {
        lp.objective[v] = Rational::one();
    }
    for i in 0..rows.len() {
        let coeffs = cols.iter().enumerate().map(|(j, col)| (y[j], &col[i] + &shift)).collect();
        lp.add_constraint(coeffs, Relation::Le, Rational::one());
    }
    let total = lp.solve()?.objective;
    Ok(&total.recip() - &shift)
}

/// Game value by enumerating reduced pure strategies of both players.
pub fn brute_force_oracle(game: &ExplicitGame, budget: u64) -> Result<Rational, OracleError> {
    for p in Player::BOTH {
        let count = reduced_pure_strategy_count(game, p);
        if count > budget as u128 {
            return Err(OracleError::OracleBudgetExceeded { player: p, count, budget });
        }
    }
    let pure1 = enumerate_pure(game, Player::Max);
    let pure2 = enumerate_pure(game, Player::Min);
    let matrix: Vec<Vec<Rational>> =
        pure1.iter().map(|s1| pure2.iter().map(|s2| pure_pair_value(game, s1, s2)).collect()).collect();
    Ok(matrix_game_value(&matrix)?)
}
