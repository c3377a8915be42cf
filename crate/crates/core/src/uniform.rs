//! Horizon sweeps: the values `v_n` of the truncations `G_n`, which are
//! nondecreasing when payoffs are nonnegative, and the extraction of
//! strategies that stay good in every longer truncation.

use rayon::prelude::*;
use serde::Serialize;

use crate::eval::{best_response_value, EvalError, Goal};
use crate::game::explicit::ExplicitGame;
use crate::game::spec::{GameSpec, Player};
use crate::game::strategy::{BehavioralStrategy, Fallback};
use crate::leavable::build_leavable_truncation_with_budget;
use crate::rational::Rational;
use crate::solver::{solve_zero_sum_with_budget, SolveError, DEFAULT_SEQUENCE_BUDGET};
use crate::unfold::{truncate, TruncationRequest, UnfoldError, DEFAULT_NODE_BUDGET};

pub const REPORT_SCHEMA: &str = "pegame/report@1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Truncation {
    /// `G_n`: the first `n` stages.
    Standard,
    /// `L_n`: the Maximizer may stop and must do so by stage `n`.
    Leavable,
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub truncation: Truncation,
    /// Consecutive small gaps required to stop early.
    pub plateau_window: usize,
    pub node_budget: u64,
    pub sequence_budget: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            truncation: Truncation::Standard,
            plateau_window: 3,
            node_budget: DEFAULT_NODE_BUDGET,
            sequence_budget: DEFAULT_SEQUENCE_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SweepError {
    #[error(transparent)]
    Unfold(#[from] UnfoldError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("payoffs are nonnegative but v_{n} = {current} < v_{prev_n} = {previous}")]
    NonMonotoneValues { n: usize, prev_n: usize, current: Rational, previous: Rational },
    #[error("v_{n} = {value} reaches the declared bound {bound}")]
    DeclaredBoundViolated { n: usize, value: Rational, bound: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtractError {
    #[error("values did not plateau within the solved horizons; raise the maximum horizon")]
    PlateauNotReached,
    #[error("extraction needs nonnegative payoffs")]
    NotNonnegative,
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
    #[error(transparent)]
    Sweep(#[from] SweepError),
}

/// A strategy together with its exact value in every solved truncation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GuaranteeTable {
    pub horizon: usize,
    pub strategy: BehavioralStrategy,
    /// `guarantees[n]`: the strategy's value in the truncation of length `n`
    /// (worst case over the opponent's replies).
    pub guarantees: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValueReport {
    pub schema: &'static str,
    pub truncation: Truncation,
    pub horizons: Vec<usize>,
    pub values: Vec<Rational>,
    pub nonnegative: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<Rational>,
    pub plateau_epsilon: Rational,
    pub plateau_window: usize,
    pub plateau_reached: bool,
    /// `v_N - v_{N-1}`, absent when only `v_0` was computed.
    pub last_gap: Option<Rational>,
    /// The last solved value, offered as an estimate of the limit only.
    pub limit_estimate: Rational,
    /// `v_N`, which the Maximizer can secure in every longer truncation;
    /// only claimed for nonnegative payoffs.
    pub certified_lower_bound: Option<Rational>,
    pub maximizer: GuaranteeTable,
    pub minimizer: GuaranteeTable,
}

impl ValueReport {
    pub fn final_horizon(&self) -> usize {
        *self.horizons.last().expect("at least v_0")
    }

    pub fn final_value(&self) -> &Rational {
        self.values.last().expect("at least v_0")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `n,v_n` lines with a decimal approximation column.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,v_n,v_n_approx\n");
        for (n, v) in self.horizons.iter().zip(&self.values) {
            out.push_str(&format!("{n},{v},~{:.6}\n", v.to_f64()));
        }
        out
    }
}

pub fn build_truncation(
    spec: &GameSpec,
    n: usize,
    truncation: Truncation,
    node_budget: u64,
) -> Result<ExplicitGame, UnfoldError> {
    match truncation {
        Truncation::Standard => truncate(&TruncationRequest::new(spec, n).with_budget(node_budget)),
        Truncation::Leavable => build_leavable_truncation_with_budget(spec, n, node_budget),
    }
}

/// Solves truncations of increasing length until `max_horizon`, or until
/// the last `plateau_window` gaps all fall below `plateau_epsilon`.
pub fn sweep(spec: &GameSpec, max_horizon: usize, plateau_epsilon: &Rational) -> Result<ValueReport, SweepError> {
    sweep_with(spec, max_horizon, plateau_epsilon, &SweepOptions::default())
}

pub fn sweep_with(
    spec: &GameSpec,
    max_horizon: usize,
    plateau_epsilon: &Rational,
    opts: &SweepOptions,
) -> Result<ValueReport, SweepError> {
    let class = spec.classify();
    let bound = spec.flags.bound.clone();
    let mut games = Vec::new();
    let mut values: Vec<Rational> = Vec::new();
    let mut small_gaps = 0;
    let mut plateau_reached = false;
    let mut last = None;
    for n in 0..=max_horizon {
        let game = build_truncation(spec, n, opts.truncation, opts.node_budget)?;
        let sol = solve_zero_sum_with_budget(&game, opts.sequence_budget)?;
        if let Some(b) = &bound {
            if &sol.value >= b {
                return Err(SweepError::DeclaredBoundViolated { n, value: sol.value, bound: b.clone() });
            }
        }
        if let Some(prev) = values.last() {
            if class.nonnegative && &sol.value < prev {
                return Err(SweepError::NonMonotoneValues {
                    n,
                    prev_n: n - 1,
                    current: sol.value,
                    previous: prev.clone(),
                });
            }
            if &(&sol.value - prev) < plateau_epsilon {
                small_gaps += 1;
            } else {
                small_gaps = 0;
            }
        }
        values.push(sol.value.clone());
        last = Some((sol.maximizer(&game), sol.minimizer(&game)));
        games.push(game);
        if opts.plateau_window > 0 && small_gaps >= opts.plateau_window {
            plateau_reached = true;
            break;
        }
    }
    let (sigma1, sigma2) = last.expect("horizon 0 is always solved");
    let table = |strategy: BehavioralStrategy, goal: Goal| -> Result<GuaranteeTable, SweepError> {
        let guarantees = games
            .par_iter()
            .map(|g| best_response_value(g, &strategy.forced_moves(g), goal).map(|r| r.value))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GuaranteeTable { horizon: games.len() - 1, strategy, guarantees })
    };
    let maximizer = table(sigma1, Goal::Minimize)?;
    let minimizer = table(sigma2, Goal::Maximize)?;
    let final_value = values.last().cloned().expect("nonempty");
    Ok(ValueReport {
        schema: REPORT_SCHEMA,
        truncation: opts.truncation,
        horizons: (0..values.len()).collect(),
        last_gap: (values.len() > 1).then(|| &values[values.len() - 1] - &values[values.len() - 2]),
        nonnegative: class.nonnegative,
        bound,
        plateau_epsilon: plateau_epsilon.clone(),
        plateau_window: opts.plateau_window,
        plateau_reached,
        limit_estimate: final_value.clone(),
        certified_lower_bound: class.nonnegative.then_some(final_value),
        values,
        maximizer,
        minimizer,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EpsOptimal {
    #[serde(rename = "N")]
    pub n: usize,
    pub sigma1: BehavioralStrategy,
    pub sigma2: BehavioralStrategy,
    pub guarantee: Rational,
    /// `(n, val_{G_n}(sigma1))` for every solved `n >= N`.
    pub certified: Vec<(usize, Rational)>,
}

/// Picks the first `N` with `v_N > v_final - epsilon`, re-solves `G_N`,
/// extends the Maximizer's optimal strategy there by uniform play, and
/// certifies that it secures `v_N` in every solved truncation from `N` on.
pub fn extract_eps_optimal(
    spec: &GameSpec,
    report: &ValueReport,
    epsilon: &Rational,
) -> Result<EpsOptimal, ExtractError> {
    extract_eps_optimal_with(spec, report, epsilon, &SweepOptions { truncation: report.truncation, ..Default::default() })
}

pub fn extract_eps_optimal_with(
    spec: &GameSpec,
    report: &ValueReport,
    epsilon: &Rational,
    opts: &SweepOptions,
) -> Result<EpsOptimal, ExtractError> {
    if !epsilon.is_positive() {
        return Err(ExtractError::NonPositiveEpsilon);
    }
    if !report.nonnegative {
        return Err(ExtractError::NotNonnegative);
    }
    if !report.plateau_reached {
        return Err(ExtractError::PlateauNotReached);
    }
    let target = report.final_value() - epsilon;
    let n = report.values.iter().position(|v| v > &target).expect("the final value itself qualifies");
    Ok(secure_from(spec, report, n, opts)?)
}

/// The Maximizer's optimal strategy of the length-`n` truncation, extended
/// by uniform play, with its exact value in every solved truncation from
/// `n` to the end of the report. Does not check that `n` is a sensible
/// choice; [`extract_eps_optimal`] does.
pub fn secure_from(spec: &GameSpec, report: &ValueReport, n: usize, opts: &SweepOptions) -> Result<EpsOptimal, SweepError> {
    let final_n = report.final_horizon();
    let game_n = build_truncation(spec, n, opts.truncation, opts.node_budget)?;
    let sol = solve_zero_sum_with_budget(&game_n, opts.sequence_budget)?;
    let game_final = build_truncation(spec, final_n.max(n), opts.truncation, opts.node_budget)?;
    let sigma1 = sol.maximizer(&game_n).completed(&game_final, &Fallback::Uniform);
    let certified = (n..=final_n)
        .into_par_iter()
        .map(|k| -> Result<(usize, Rational), SweepError> {
            let g = build_truncation(spec, k, opts.truncation, opts.node_budget)?;
            Ok((k, best_response_value(&g, &sigma1.forced_moves(&g), Goal::Minimize)?.value))
        })
        .collect::<Result<Vec<_>, _>>()?;
    debug_assert!(!report.nonnegative || certified.iter().all(|(_, v)| v >= &sol.value));
    Ok(EpsOptimal { n, sigma1, sigma2: report.minimizer.strategy.clone(), guarantee: sol.value, certified })
}

/// Guarantee of a fixed Maximizer strategy in each of the given horizons.
pub fn maximizer_guarantees(
    spec: &GameSpec,
    sigma1: &BehavioralStrategy,
    horizons: impl IntoIterator<Item = usize>,
    truncation: Truncation,
) -> Result<Vec<Rational>, SweepError> {
    assert_eq!(sigma1.owner, Player::Max);
    horizons
        .into_iter()
        .map(|k| {
            let g = build_truncation(spec, k, truncation, DEFAULT_NODE_BUDGET)?;
            Ok(best_response_value(&g, &sigma1.forced_moves(&g), Goal::Minimize)?.value)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::builder::SpecBuilder;
    use crate::rational::q;

    fn zero_game() -> GameSpec {
        let mut b = SpecBuilder::new();
        b.state("s", &["a", "b"], &["c", "d"]).initial_state("s");
        for a1 in ["a", "b"] {
            for a2 in ["c", "d"] {
                b.goto("s", a1, a2, "s", "-", "-");
            }
        }
        b.flags(true, None);
        b.build()
    }

    /// Pays `1 / ((m + 1)(m + 2))` in round `m`, so `v_n = 1 - 1/(n + 1)`.
    fn telescoping(len: usize) -> GameSpec {
        let mut b = SpecBuilder::new();
        for m in 0..=len {
            b.state(&format!("t{m}"), &["go"], &["go"]);
        }
        b.initial_state("t0");
        for m in 0..=len {
            let next = format!("t{}", (m + 1).min(len));
            b.goto(&format!("t{m}"), "go", "go", &next, "-", "-");
            if m < len {
                b.payoff(&format!("t{m}"), "go", "go", q(1, ((m + 1) * (m + 2)) as i64));
            }
        }
        b.flags(true, Some(q(1, 1)));
        b.build()
    }

    #[test]
    fn zero_game_sweep_and_extract() {
        let r = sweep(&zero_game(), 6, &q(1, 100)).unwrap();
        assert!(r.values.iter().all(|v| v.is_zero()));
        assert!(r.plateau_reached);
        assert_eq!(r.horizons, vec![0, 1, 2, 3]);
        let e = extract_eps_optimal(&zero_game(), &r, &q(1, 10)).unwrap();
        assert_eq!(e.n, 0);
        assert_eq!(e.guarantee, q(0, 1));
    }

    #[test]
    fn telescoping_values_and_extraction() {
        let spec = telescoping(20);
        let r = sweep(&spec, 20, &q(1, 100)).unwrap();
        for (n, v) in r.values.iter().enumerate() {
            assert_eq!(v, &(&q(1, 1) - &q(1, n as i64 + 1)));
        }
        assert_eq!(r.final_horizon(), 12);
        let e = extract_eps_optimal(&spec, &r, &q(1, 4)).unwrap();
        assert_eq!((e.n, e.guarantee.clone()), (3, q(3, 4)));
        assert!(e.certified.iter().all(|(_, v)| v >= &q(3, 4)));
    }

    #[test]
    fn plateau_required_for_extraction() {
        let spec = telescoping(20);
        let r = sweep(&spec, 4, &q(1, 100)).unwrap();
        assert!(!r.plateau_reached);
        assert_eq!(extract_eps_optimal(&spec, &r, &q(1, 4)), Err(ExtractError::PlateauNotReached));
    }

    #[test]
    fn minimizer_table_is_capped_by_final_value() {
        let spec = telescoping(8);
        let r = sweep(&spec, 5, &q(1, 1000)).unwrap();
        for g in &r.minimizer.guarantees {
            assert!(g <= r.final_value());
        }
        assert_eq!(r.maximizer.guarantees.last(), Some(r.final_value()));
    }

    #[test]
    fn bound_violation_is_reported() {
        let mut spec = telescoping(8);
        spec.flags.bound = Some(q(1, 2));
        assert!(matches!(sweep(&spec, 4, &q(1, 100)), Err(SweepError::DeclaredBoundViolated { n: 1, .. })));
    }
}
