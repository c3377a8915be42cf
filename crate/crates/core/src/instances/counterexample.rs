//! A stopping game with a hidden bit and no value.
//!
//! Nature draws `b = 1` with probability `p` and tells only the Maximizer.
//! At odd stages the Maximizer may stop (payoff `1` if `b = 1`, `-1`
//! otherwise); at even stages the Minimizer may stop (payoff `A` if
//! `b = 1`, `-1` otherwise). Stopping ends the game for good and is seen by
//! both players. With `A p > 1` the Maximizer can secure
//! `p - (1 - p) / A` but the Minimizer can hold him to `p`.

use serde::Serialize;

use crate::eval::{best_response_value, expected_payoff, EvalError, Goal};
use crate::game::builder::SpecBuilder;
use crate::game::explicit::{ExplicitGame, PrivateHistory};
use crate::game::spec::{GameSpec, Player};
use crate::game::strategy::{BehavioralStrategy, Fallback, Profile};
use crate::rational::Rational;
use crate::unfold::{truncate_spec, UnfoldError};

pub const STOP: &str = "stop";
pub const CONTINUE: &str = "continue";
pub const LIVE: &str = "live";
pub const OVER: &str = "over";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CounterexampleParams {
    pub p: Rational,
    #[serde(rename = "A")]
    pub a: Rational,
    /// Truncation length used for strategy tables and evaluations.
    pub horizon: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CounterexampleError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("stopping mass after every odd stage up to {max_stage} is still at least epsilon")]
    TailNotReached { max_stage: usize },
    #[error(transparent)]
    Unfold(#[from] UnfoldError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl CounterexampleParams {
    pub fn new(p: Rational, a: Rational, horizon: usize) -> Result<Self, CounterexampleError> {
        let params = CounterexampleParams { p, a, horizon };
        params.check()?;
        Ok(params)
    }

    pub fn check(&self) -> Result<(), CounterexampleError> {
        if !self.p.is_positive() || self.p >= Rational::one() {
            return Err(CounterexampleError::InvalidParams(format!("p = {} must lie in (0, 1)", self.p)));
        }
        if &self.a * &self.p <= Rational::one() {
            return Err(CounterexampleError::InvalidParams(format!("A p = {} must exceed 1", &self.a * &self.p)));
        }
        Ok(())
    }

    /// Stop probability of the Maximizer's secure strategy at stage 1 when `b = 1`.
    pub fn claim2_stop_probability(&self) -> Rational {
        let one = Rational::one();
        &one - &(&(&one - &self.p) / &(&self.a * &self.p))
    }
}

fn state(b: u8, odd: bool) -> String {
    format!("b{b}-{}", if odd { "odd" } else { "even" })
}

pub fn build_counterexample(params: &CounterexampleParams) -> Result<GameSpec, CounterexampleError> {
    params.check()?;
    let one = Rational::one();
    let mut sb = SpecBuilder::new();
    for b in [1u8, 0] {
        sb.state(&state(b, true), &[CONTINUE, STOP], &[CONTINUE]);
        sb.state(&state(b, false), &[CONTINUE], &[CONTINUE, STOP]);
    }
    sb.state(OVER, &["wait"], &["wait"]);
    sb.initial_chance(&[
        (params.p.clone(), &state(1, true), "b1", "?"),
        (&one - &params.p, &state(0, true), "b0", "?"),
    ]);
    for b in [1u8, 0] {
        let (odd, even) = (state(b, true), state(b, false));
        sb.goto(&odd, CONTINUE, CONTINUE, &even, LIVE, LIVE);
        sb.goto(&odd, STOP, CONTINUE, OVER, OVER, OVER);
        sb.goto(&even, CONTINUE, CONTINUE, &odd, LIVE, LIVE);
        sb.goto(&even, CONTINUE, STOP, OVER, OVER, OVER);
        let lose = -one.clone();
        sb.payoff(&odd, STOP, CONTINUE, if b == 1 { one.clone() } else { lose.clone() });
        sb.payoff(&even, CONTINUE, STOP, if b == 1 { params.a.clone() } else { lose });
    }
    sb.goto(OVER, "wait", "wait", OVER, OVER, OVER);
    Ok(sb.build())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub upper: Rational,
    pub lower: Rational,
    pub gap: Rational,
}

/// Closed forms: upper value `p`, lower value `p - (1 - p)/A`.
pub fn counterexample_bounds(params: &CounterexampleParams) -> Bounds {
    let gap = &(&Rational::one() - &params.p) / &params.a;
    Bounds { upper: params.p.clone(), lower: &params.p - &gap, gap }
}

fn truncation(params: &CounterexampleParams, horizon: usize) -> Result<ExplicitGame, CounterexampleError> {
    Ok(truncate_spec(&build_counterexample(params)?, horizon)?)
}

/// Dense rows over a truncation: `choose(b, depth, actions)` names the
/// action played with probability one, or returns explicit probabilities.
fn maximizer_rows(
    game: &ExplicitGame,
    mut row: impl FnMut(&str, usize, &[&str]) -> Vec<Rational>,
) -> BehavioralStrategy {
    let tree = game.tree(Player::Max);
    let rows: Vec<Vec<Rational>> = (0..tree.nodes.len())
        .map(|p| {
            let node = &tree.nodes[p];
            if node.actions.is_empty() {
                return Vec::new();
            }
            let names: Vec<&str> = node.actions.iter().map(|&a| game.action_name(Player::Max, a)).collect();
            let b = game.signal_name(Player::Max, node.initial_signal);
            row(b, node.depth, &names)
        })
        .collect();
    BehavioralStrategy::from_dense(game, Player::Max, &rows)
}

fn point(names: &[&str], chosen: &str) -> Vec<Rational> {
    let hit = names.contains(&chosen);
    names
        .iter()
        .enumerate()
        .map(|(i, n)| if *n == chosen || (!hit && i == 0) { Rational::one() } else { Rational::zero() })
        .collect()
}

/// Stops at stage 1 with probability `1 - (1 - p)/(A p)` when `b = 1`,
/// otherwise never stops.
pub fn claim2_maximizer_strategy(params: &CounterexampleParams) -> Result<BehavioralStrategy, CounterexampleError> {
    let game = truncation(params, params.horizon)?;
    let s = params.claim2_stop_probability();
    Ok(maximizer_rows(&game, |b, depth, names| {
        if b == "b1" && depth == 0 && names.contains(&STOP) {
            names.iter().map(|n| if *n == STOP { s.clone() } else { &Rational::one() - &s }).collect()
        } else {
            point(names, CONTINUE)
        }
    }))
}

/// The Minimizer strategy that never stops.
pub fn never_stop_minimizer(params: &CounterexampleParams) -> Result<BehavioralStrategy, CounterexampleError> {
    let game = truncation(params, params.horizon)?;
    Ok(BehavioralStrategy::new(Player::Min).completed(&game, &Fallback::Action(CONTINUE.into())))
}

/// Minimizer strategy stopping at even stage `k` (on the live path) with
/// the given conditional probabilities; `stops[j]` applies at stage `2j + 2`.
pub fn minimizer_from_stop_probabilities(
    params: &CounterexampleParams,
    stops: &[Rational],
) -> Result<BehavioralStrategy, CounterexampleError> {
    let horizon = 2 * stops.len();
    let game = truncation(params, horizon)?;
    let mut s = BehavioralStrategy::new(Player::Min);
    for (j, q) in stops.iter().enumerate() {
        let stage = 2 * j + 2;
        let h = live_history(Player::Min, stage - 1);
        s.rows.insert(h, [(CONTINUE.to_string(), &Rational::one() - q), (STOP.to_string(), q.clone())].into());
    }
    Ok(s.completed(&game, &Fallback::Action(CONTINUE.into())))
}

/// The Minimizer's record after `steps` stages without a stop.
fn live_history(player: Player, steps: usize) -> PrivateHistory {
    let initial = if player == Player::Min { "?" } else { "b1" };
    PrivateHistory { initial: initial.into(), steps: vec![(CONTINUE.to_string(), LIVE.to_string()); steps] }
}

/// Unconditional stopping distribution of a Minimizer strategy along the
/// live path: `sigma[k]` is the probability of stopping exactly at stage
/// `k` (zero at odd stages), read from the strategy's table; stages it
/// does not cover count as "continue".
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StopDistribution {
    pub sigma: Vec<(usize, Rational)>,
    pub never: Rational,
}

impl StopDistribution {
    pub fn of(minimizer: &BehavioralStrategy) -> StopDistribution {
        let last_stage = minimizer.rows.keys().map(|h| h.len() + 1).max().unwrap_or(0);
        let mut alive = Rational::one();
        let mut sigma = Vec::new();
        for stage in (2..=last_stage).step_by(2) {
            let q = minimizer
                .row(&live_history(Player::Min, stage - 1))
                .and_then(|r| r.get(STOP).cloned())
                .unwrap_or_default();
            if q.is_positive() {
                sigma.push((stage, &alive * &q));
                alive = &alive * &(&Rational::one() - &q);
            }
        }
        StopDistribution { sigma, never: alive }
    }

    /// Mass of stops strictly after `stage`.
    pub fn tail_after(&self, stage: usize) -> Rational {
        self.sigma.iter().filter(|(k, _)| *k > stage).map(|(_, s)| s).sum()
    }

    pub fn last_stage(&self) -> usize {
        self.sigma.last().map(|(k, _)| *k).unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Claim1Reply {
    #[serde(rename = "N")]
    pub n: usize,
    pub strategy: BehavioralStrategy,
    pub guarantee: Rational,
    pub stops: StopDistribution,
}

/// The Maximizer reply to a given Minimizer strategy: never stop when
/// `b = 0`; when `b = 1`, stop at the first odd stage `N` after which the
/// Minimizer stops with probability less than `epsilon`. The guarantee is
/// the exact expected payoff against the Minimizer strategy.
pub fn claim1_best_reply(
    minimizer: &BehavioralStrategy,
    epsilon: &Rational,
    params: &CounterexampleParams,
) -> Result<Claim1Reply, CounterexampleError> {
    params.check()?;
    let stops = StopDistribution::of(minimizer);
    let n = (1..=params.horizon.max(1))
        .step_by(2)
        .find(|&n| &stops.tail_after(n) < epsilon)
        .ok_or(CounterexampleError::TailNotReached { max_stage: params.horizon })?;
    let horizon = n.max(stops.last_stage());
    let game = truncation(params, horizon)?;
    let strategy = maximizer_rows(&game, |b, depth, names| {
        if b == "b1" && depth + 1 == n {
            point(names, STOP)
        } else {
            point(names, CONTINUE)
        }
    });
    let sigma2 = minimizer.completed(&game, &Fallback::Action(CONTINUE.into()));
    let profile = Profile::new(strategy.clone(), sigma2).expect("owners match");
    let guarantee = expected_payoff(&game, &profile)?;
    Ok(Claim1Reply { n, strategy, guarantee, stops })
}

/// Both certificates computed by exact evaluation on one truncation: the
/// secure strategy's worst case and the best payoff against a Minimizer
/// who never stops.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NoValueWitness {
    pub horizon: usize,
    pub lower_certificate: Rational,
    pub upper_certificate: Rational,
    pub gap: Rational,
}

pub fn no_value_witness(params: &CounterexampleParams) -> Result<NoValueWitness, CounterexampleError> {
    let game = truncation(params, params.horizon)?;
    let lower = best_response_value(&game, &claim2_maximizer_strategy(params)?, Goal::Minimize)?.value;
    let upper = best_response_value(&game, &never_stop_minimizer(params)?, Goal::Maximize)?.value;
    Ok(NoValueWitness { horizon: params.horizon, gap: &upper - &lower, lower_certificate: lower, upper_certificate: upper })
}
