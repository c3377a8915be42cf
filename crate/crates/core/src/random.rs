//! Seeded random game generators for tests and benchmarks.
//!
//! Each player's action count is fixed per game (not per state), so action
//! sets never reveal hidden state.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::game::builder::SpecBuilder;
use crate::game::spec::GameSpec;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RandomSpecParams {
    pub states: usize,
    /// Upper bounds; the actual counts are drawn from `1..=max` per game
    /// (action counts are exact in turn-based games).
    pub max_actions: [usize; 2],
    pub max_signals: [usize; 2],
    pub max_outcomes: usize,
    pub nonnegative: bool,
    /// Payoff numerators are drawn from `-max_payoff..=max_payoff`
    /// (or `0..=max_payoff` when nonnegative) over `payoff_denominator`.
    pub max_payoff: i64,
    pub payoff_denominator: i64,
    /// Players alternate: at even stages only the Maximizer chooses, at odd
    /// stages only the Minimizer, and only the mover receives a signal.
    pub turn_based: bool,
    /// Chance probabilities are drawn from {1/4, 1/2, 3/4}, keeping exact
    /// arithmetic small over long horizons.
    pub dyadic: bool,
}

impl RandomSpecParams {
    /// Small enough for the pure-strategy oracle at three stages.
    pub fn oracle_scale() -> Self {
        RandomSpecParams {
            states: 3,
            max_actions: [2, 2],
            max_signals: [2, 2],
            max_outcomes: 2,
            nonnegative: false,
            max_payoff: 4,
            payoff_denominator: 2,
            turn_based: false,
            dyadic: false,
        }
    }

    /// Nonnegative games whose private trees stay small up to about six stages.
    pub fn sweep_scale() -> Self {
        RandomSpecParams {
            states: 3,
            max_actions: [2, 2],
            max_signals: [2, 2],
            max_outcomes: 2,
            nonnegative: true,
            max_payoff: 3,
            payoff_denominator: 4,
            turn_based: true,
            dyadic: true,
        }
    }
}

fn distribution(rng: &mut ChaCha8Rng, k: usize, dyadic: bool) -> Vec<Rational> {
    if dyadic {
        return match k {
            1 => vec![Rational::one()],
            _ => {
                let w = rng.gen_range(1..=3);
                vec![Rational::new(w, 4), Rational::new(4 - w, 4)]
            }
        };
    }
    let weights: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=4)).collect();
    let total: i64 = weights.iter().sum();
    weights.iter().map(|&w| Rational::new(w, total)).collect()
}

pub fn random_spec(params: &RandomSpecParams, seed: u64) -> GameSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // A mover with a single action would make half of an alternating game trivial.
    let [k1, k2] = if params.turn_based {
        params.max_actions
    } else {
        [rng.gen_range(1..=params.max_actions[0]), rng.gen_range(1..=params.max_actions[1])]
    };
    let sig1 = rng.gen_range(1..=params.max_signals[0]);
    let sig2 = rng.gen_range(1..=params.max_signals[1]);
    let a1: Vec<String> = (0..k1).map(|i| format!("a{i}")).collect();
    let a2: Vec<String> = (0..k2).map(|i| format!("b{i}")).collect();
    let wait = vec!["wait".to_string()];
    // (name, Maximizer actions, Minimizer actions, successor states, mover)
    let mut states: Vec<(String, &[String], &[String], usize)> = Vec::new();
    if params.turn_based {
        for i in 0..params.states {
            states.push((format!("s{i}.max"), a1.as_slice(), wait.as_slice(), 0));
        }
        for i in 0..params.states {
            states.push((format!("s{i}.min"), wait.as_slice(), a2.as_slice(), 1));
        }
    } else {
        for i in 0..params.states {
            states.push((format!("s{i}"), a1.as_slice(), a2.as_slice(), 2));
        }
    }
    let mut sb = SpecBuilder::new();
    for (name, x, y, _) in &states {
        sb.state(name, x, y);
    }
    sb.initial_state(&states[0].0);
    let low = if params.nonnegative { 0 } else { -params.max_payoff };
    for (name, xs, ys, mover) in &states {
        // Alternating games hand the move to the other half of the state list.
        let successors: Vec<&String> = match mover {
            0 => states[params.states..].iter().map(|s| &s.0).collect(),
            1 => states[..params.states].iter().map(|s| &s.0).collect(),
            _ => states.iter().map(|s| &s.0).collect(),
        };
        for x in xs.iter() {
            for y in ys.iter() {
                let k = rng.gen_range(1..=params.max_outcomes);
                let probs = distribution(&mut rng, k, params.dyadic);
                let outcomes: Vec<(Rational, String, String, String)> = probs
                    .into_iter()
                    .map(|p| {
                        let next = (*successors.choose(&mut rng).expect("states")).clone();
                        let u = if *mover != 1 { format!("x{}", rng.gen_range(0..sig1)) } else { "-".into() };
                        let v = if *mover != 0 { format!("y{}", rng.gen_range(0..sig2)) } else { "-".into() };
                        (p, next, u, v)
                    })
                    .collect();
                let refs: Vec<(Rational, &str, &str, &str)> =
                    outcomes.iter().map(|(p, n, u, v)| (p.clone(), n.as_str(), u.as_str(), v.as_str())).collect();
                sb.transition(name, x, y, &refs);
                sb.payoff(name, x, y, Rational::new(rng.gen_range(low..=params.max_payoff), params.payoff_denominator));
            }
        }
    }
    sb.flags(params.nonnegative, None);
    sb.build()
}

/// Nature flips a biased coin the Maximizer glimpses through a noisy
/// signal; the Minimizer, who sees nothing, picks one of two actions each
/// stage, and the daily payoff depends on the coin and that action.
pub fn hidden_coin_spec(seed: u64) -> GameSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let heads = Rational::new(rng.gen_range(1..=3), 4);
    let accuracy = Rational::new(rng.gen_range(5..=9), 10);
    let tails = &Rational::one() - &heads;
    let miss = &Rational::one() - &accuracy;
    let mut sb = SpecBuilder::new();
    sb.state("heads", &["go"], &["a", "b"]).state("tails", &["go"], &["a", "b"]);
    sb.initial_chance(&[
        (&heads * &accuracy, "heads", "h", "-"),
        (&heads * &miss, "heads", "t", "-"),
        (&tails * &miss, "tails", "h", "-"),
        (&tails * &accuracy, "tails", "t", "-"),
    ]);
    for s in ["heads", "tails"] {
        for y in ["a", "b"] {
            sb.goto(s, "go", y, s, "live", "live");
            sb.payoff(s, "go", y, Rational::new(rng.gen_range(0..=4), 4));
        }
    }
    sb.flags(true, None);
    sb.build()
}

/// Every stage pays 1 regardless of play.
pub fn constant_payoff_spec() -> GameSpec {
    let mut sb = SpecBuilder::new();
    sb.state("s", &["go"], &["wait"]).initial_state("s");
    sb.goto("s", "go", "wait", "s", "-", "-").payoff("s", "go", "wait", Rational::one());
    sb.flags(true, None);
    sb.build()
}
