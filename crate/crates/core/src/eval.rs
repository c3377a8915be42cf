//! Exact evaluation of strategies on explicit games, best responses, and
//! seeded Monte Carlo simulation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::game::explicit::{ExplicitGame, NodeId};
use crate::game::spec::{GameSpec, Player};
use crate::game::strategy::{BehavioralStrategy, DenseRows, Profile, StrategyError};
use crate::rational::Rational;
use crate::unfold::{truncate, TruncationRequest, UnfoldError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("strategy does not fit the game: {0}")]
    StrategyDomainMismatch(#[from] StrategyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Goal {
    Maximize,
    Minimize,
}

impl Goal {
    /// The goal of `player`.
    pub fn of(player: Player) -> Goal {
        match player {
            Player::Max => Goal::Maximize,
            Player::Min => Goal::Minimize,
        }
    }

    fn improves(self, candidate: &Rational, incumbent: &Rational) -> bool {
        match self {
            Goal::Maximize => candidate > incumbent,
            Goal::Minimize => candidate < incumbent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvaluationResult {
    pub value: Rational,
    pub responder_strategy: Option<BehavioralStrategy>,
}

/// Expected cumulative payoff of the profile over the game's horizon.
pub fn expected_payoff(game: &ExplicitGame, profile: &Profile) -> Result<Rational, EvalError> {
    let rows = [profile.sigma1.resolve(game)?, profile.sigma2.resolve(game)?];
    Ok(expected_payoff_dense(game, &rows))
}

pub(crate) fn expected_payoff_dense(game: &ExplicitGame, rows: &[DenseRows; 2]) -> Rational {
    // Children always carry larger ids than their parents.
    let mut value = vec![Rational::zero(); game.nodes.len()];
    for u in (0..game.nodes.len()).rev() {
        let node = &game.nodes[u];
        if node.children.is_empty() {
            continue;
        }
        let r1 = &rows[0][node.private[0]];
        let r2 = &rows[1][node.private[1]];
        let mut total = Rational::zero();
        for (i1, p1) in r1.iter().enumerate() {
            if p1.is_zero() {
                continue;
            }
            for (i2, p2) in r2.iter().enumerate() {
                if p2.is_zero() {
                    continue;
                }
                let w = p1 * p2;
                for &v in node.children_for(i1, i2, r2.len()) {
                    let child = &game.nodes[v];
                    let prob = &child.edge.as_ref().expect("edge").prob;
                    total += &(&(&w * prob) * &(&child.increment + &value[v]));
                }
            }
        }
        value[u] = total;
    }
    game.roots.iter().map(|&r| &game.nodes[r].chance * &value[r]).sum()
}

/// Best value the responder can reach against `fixed`, with a pure
/// strategy achieving it. Minimizing against a Maximizer strategy yields
/// that strategy's guaranteed value.
pub fn best_response_value(
    game: &ExplicitGame,
    fixed: &BehavioralStrategy,
    goal: Goal,
) -> Result<EvaluationResult, EvalError> {
    let rows = fixed.resolve(game)?;
    let (value, choice) = best_response_dense(game, fixed.owner, &rows, goal);
    let responder = fixed.owner.opponent();
    Ok(EvaluationResult { value, responder_strategy: Some(BehavioralStrategy::pure(game, responder, &choice)) })
}

/// Backward induction over the responder's private tree. Each public node
/// is weighted by Nature and the fixed player's probabilities; the
/// immediate payoff of a responder action at a private node aggregates the
/// weighted increments of all member nodes.
pub(crate) fn best_response_dense(
    game: &ExplicitGame,
    fixed_owner: Player,
    rows: &DenseRows,
    goal: Goal,
) -> (Rational, Vec<usize>) {
    let responder = fixed_owner.opponent();
    let ri = responder.index();
    let fi = fixed_owner.index();
    let tree = game.tree(responder);
    let mut weight: Vec<Rational> = vec![Rational::zero(); game.nodes.len()];
    for &r in &game.roots {
        weight[r] = game.nodes[r].chance.clone();
    }
    let mut imm: Vec<Vec<Rational>> = tree.nodes.iter().map(|n| vec![Rational::zero(); n.actions.len()]).collect();
    for u in 0..game.nodes.len() {
        let node = &game.nodes[u];
        if node.children.is_empty() || weight[u].is_zero() {
            continue;
        }
        let p = node.private[ri];
        for &v in &node.children {
            let e = game.nodes[v].edge.as_ref().expect("edge");
            let pf = &rows[node.private[fi]][e.local[fi]];
            if pf.is_zero() {
                continue;
            }
            let w = &(&weight[u] * pf) * &e.prob;
            if !game.nodes[v].increment.is_zero() {
                imm[p][e.local[ri]] += &(&w * &game.nodes[v].increment);
            }
            weight[v] = w;
        }
    }
    let mut value = vec![Rational::zero(); tree.nodes.len()];
    let mut choice = vec![0usize; tree.nodes.len()];
    for p in (0..tree.nodes.len()).rev() {
        let node = &tree.nodes[p];
        if node.actions.is_empty() {
            continue;
        }
        let mut totals = imm[p].clone();
        for (&(k, _), &c) in &node.children {
            totals[k] += &value[c];
        }
        let mut best = 0;
        for k in 1..totals.len() {
            if goal.improves(&totals[k], &totals[best]) {
                best = k;
            }
        }
        choice[p] = best;
        value[p] = totals.swap_remove(best);
    }
    let total = tree.roots.iter().map(|&r| &value[r]).sum();
    (total, choice)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulationResult {
    pub mean: f64,
    pub stderr: f64,
    pub reps: u64,
}

/// Monte Carlo estimate of the profile's expected payoff over `horizon`
/// stages. Replicate `r` draws from a ChaCha stream keyed by `(seed, r)`,
/// so results do not depend on scheduling.
pub fn simulate(
    spec: &GameSpec,
    profile: &Profile,
    horizon: usize,
    seed: u64,
    reps: u64,
) -> Result<SimulationResult, SimulateError> {
    let game = truncate(&TruncationRequest::new(spec, horizon))?;
    Ok(simulate_game(&game, profile, seed, reps)?)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimulateError {
    #[error(transparent)]
    Unfold(#[from] UnfoldError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

pub fn simulate_game(game: &ExplicitGame, profile: &Profile, seed: u64, reps: u64) -> Result<SimulationResult, EvalError> {
    let rows = [profile.sigma1.resolve(game)?, profile.sigma2.resolve(game)?];
    let cdf = |r: &DenseRows| -> Vec<Vec<f64>> {
        r.iter()
            .map(|row| {
                let mut acc = 0.0;
                row.iter()
                    .map(|p| {
                        acc += p.to_f64();
                        acc
                    })
                    .collect()
            })
            .collect()
    };
    let cdfs = [cdf(&rows[0]), cdf(&rows[1])];
    let root_cdf: Vec<f64> = {
        let mut acc = 0.0;
        game.roots
            .iter()
            .map(|&r| {
                acc += game.nodes[r].chance.to_f64();
                acc
            })
            .collect()
    };
    let draw = |c: &[f64], rng: &mut ChaCha8Rng| -> usize {
        let x: f64 = rng.gen::<f64>() * c.last().copied().unwrap_or(1.0);
        c.iter().position(|&t| x < t).unwrap_or(c.len() - 1)
    };
    let samples: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(rep);
            let mut u: NodeId = game.roots[draw(&root_cdf, &mut rng)];
            let mut payoff = 0.0;
            while !game.nodes[u].children.is_empty() {
                let node = &game.nodes[u];
                let i1 = draw(&cdfs[0][node.private[0]], &mut rng);
                let i2 = draw(&cdfs[1][node.private[1]], &mut rng);
                let kids = node.children_for(i1, i2, cdfs[1][node.private[1]].len());
                let mut acc = 0.0;
                let c: Vec<f64> = kids
                    .iter()
                    .map(|&v| {
                        acc += game.nodes[v].edge.as_ref().expect("edge").prob.to_f64();
                        acc
                    })
                    .collect();
                u = kids[draw(&c, &mut rng)];
                payoff += game.nodes[u].increment.to_f64();
            }
            payoff
        })
        .collect();
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let stderr = if samples.len() > 1 {
        let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(SimulationResult { mean, stderr, reps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::builder::SpecBuilder;
    use crate::rational::q;
    use crate::solver::solve_zero_sum;
    use crate::unfold::truncate_spec;

    fn pennies() -> GameSpec {
        let mut b = SpecBuilder::new();
        b.state("s", &["h", "t"], &["h", "t"]).initial_state("s");
        for a1 in ["h", "t"] {
            for a2 in ["h", "t"] {
                b.goto("s", a1, a2, "s", "-", "-");
                if a1 == a2 {
                    b.payoff("s", a1, a2, q(1, 1));
                }
            }
        }
        b.build()
    }

    fn uniform_profile(g: &ExplicitGame) -> Profile {
        Profile::new(BehavioralStrategy::uniform(g, Player::Max), BehavioralStrategy::uniform(g, Player::Min)).unwrap()
    }

    #[test]
    fn uniform_pennies() {
        let g = truncate_spec(&pennies(), 1).unwrap();
        let prof = uniform_profile(&g);
        assert_eq!(expected_payoff(&g, &prof).unwrap(), q(1, 2));
        let br = best_response_value(&g, &prof.sigma1, Goal::Maximize).unwrap();
        assert_eq!(br.value, q(1, 2));
    }

    #[test]
    fn responder_strategy_reproduces_value() {
        let g = truncate_spec(&pennies(), 3).unwrap();
        let sigma1 = BehavioralStrategy::pure(&g, Player::Max, &vec![0; g.tree(Player::Max).nodes.len()]);
        let br = best_response_value(&g, &sigma1, Goal::Minimize).unwrap();
        assert_eq!(br.value, q(0, 1));
        let prof = Profile::new(sigma1, br.responder_strategy.unwrap()).unwrap();
        assert_eq!(expected_payoff(&g, &prof).unwrap(), q(0, 1));
    }

    #[test]
    fn plan_guarantees_value() {
        let g = truncate_spec(&pennies(), 2).unwrap();
        let sol = solve_zero_sum(&g).unwrap();
        assert_eq!(sol.value, q(1, 1));
        assert_eq!(best_response_value(&g, &sol.maximizer(&g), Goal::Minimize).unwrap().value, q(1, 1));
        assert_eq!(best_response_value(&g, &sol.minimizer(&g), Goal::Maximize).unwrap().value, q(1, 1));
    }

    #[test]
    fn domain_mismatch() {
        let g = truncate_spec(&pennies(), 1).unwrap();
        let empty = BehavioralStrategy::new(Player::Max);
        assert!(matches!(
            best_response_value(&g, &empty, Goal::Minimize),
            Err(EvalError::StrategyDomainMismatch(StrategyError::MissingRow { .. }))
        ));
    }

    #[test]
    fn simulation_is_seeded() {
        let spec = pennies();
        let g = truncate_spec(&spec, 1).unwrap();
        let prof = uniform_profile(&g);
        let a = simulate(&spec, &prof, 1, 7, 20_000).unwrap();
        let b = simulate(&spec, &prof, 1, 7, 20_000).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert!((a.mean - 0.5).abs() <= 4.0 * a.stderr);
    }
}
