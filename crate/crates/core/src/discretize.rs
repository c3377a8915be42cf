//! Replacing infinite signal spaces by finite ones with a total-variation
//! certificate.
//!
//! At stage `n` the signals a player may receive are drawn from a handful
//! of distributions (one per history class). Relative to their mean, each
//! has a bounded density; rounding those densities down to multiples of
//! `eps_n = eps / 2^n` and revealing only the vector of rounded values
//! yields a finite alphabet. Within one cell of that partition all
//! likelihood ratios agree up to `eps_n`, so redistributing a cell's mass
//! uniformly moves each class by at most `eps_n / 2` in total variation.
//! Countable models are truncated instead, lumping a tail lighter than
//! `eps_n / 2` into one signal.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::game::spec::{ActionSets, GameSpec, Initial, Outcome, PayoffEntry, Player, SignalRef, Transition, Violation};
use crate::rational::Rational;

pub const DEFAULT_ALPHABET_BUDGET: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Atom {
    pub label: String,
    pub prob: Rational,
}

/// Constant density `height` on `[from, to)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Piece {
    pub from: Rational,
    pub to: Rational,
    pub height: Rational,
}

fn default_prefix() -> String {
    "g".to_string()
}

/// A signal distribution declared in the `signals` section of a game file.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SignalModel {
    Finite {
        atoms: Vec<Atom>,
    },
    /// Leading atoms of a countable distribution; the unlisted mass is at most `tail`.
    Countable {
        atoms: Vec<Atom>,
        tail: Rational,
    },
    /// Atom `k = 0, 1, ...` (labelled `{prefix}{k}`) has mass `(1 - ratio) ratio^k`.
    Geometric {
        ratio: Rational,
        #[serde(default = "default_prefix")]
        prefix: String,
    },
    /// Step density on `[0, 1]` with respect to Lebesgue measure.
    Density {
        pieces: Vec<Piece>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Base {
    Atomic,
    Countable,
    Lebesgue,
}

impl SignalModel {
    pub fn base(&self) -> Base {
        match self {
            SignalModel::Finite { .. } => Base::Atomic,
            SignalModel::Countable { .. } | SignalModel::Geometric { .. } => Base::Countable,
            SignalModel::Density { .. } => Base::Lebesgue,
        }
    }

    pub fn check(&self) -> Result<(), String> {
        let atoms_ok = |atoms: &[Atom]| -> Result<Rational, String> {
            let mut seen = BTreeSet::new();
            for a in atoms {
                if a.prob.is_negative() {
                    return Err(format!("atom {:?} has negative mass", a.label));
                }
                if !seen.insert(&a.label) {
                    return Err(format!("atom {:?} listed twice", a.label));
                }
            }
            Ok(atoms.iter().map(|a| &a.prob).sum())
        };
        match self {
            SignalModel::Finite { atoms } => {
                let mass = atoms_ok(atoms)?;
                if !mass.is_one() {
                    return Err(format!("atoms have mass {mass}, expected 1"));
                }
            }
            SignalModel::Countable { atoms, tail } => {
                let mass = atoms_ok(atoms)?;
                if tail.is_negative() || mass > Rational::one() || &(&Rational::one() - &mass) > tail {
                    return Err(format!("listed mass {mass} is not within the declared tail {tail} of 1"));
                }
            }
            SignalModel::Geometric { ratio, .. } => {
                if !ratio.is_positive() || *ratio >= Rational::one() {
                    return Err(format!("ratio {ratio} must lie strictly between 0 and 1"));
                }
            }
            SignalModel::Density { pieces } => {
                let mut sorted = pieces.clone();
                sorted.sort();
                let mut last = Rational::zero();
                let mut mass = Rational::zero();
                for p in &sorted {
                    if p.from < last || p.to <= p.from || p.to > Rational::one() {
                        return Err(format!("piece [{}, {}) is empty, overlaps, or leaves [0, 1]", p.from, p.to));
                    }
                    if p.height.is_negative() {
                        return Err(format!("negative height on [{}, {})", p.from, p.to));
                    }
                    mass += &(&p.height * &(&p.to - &p.from));
                    last = p.to.clone();
                }
                if !mass.is_one() {
                    return Err(format!("density integrates to {mass}, expected 1"));
                }
            }
        }
        Ok(())
    }

    /// Density height on an interval containing no breakpoint of this model.
    fn height_on(&self, a: &Rational, b: &Rational) -> Rational {
        match self {
            SignalModel::Density { pieces } => {
                pieces.iter().find(|p| &p.from <= a && b <= &p.to).map(|p| p.height.clone()).unwrap_or_default()
            }
            _ => Rational::zero(),
        }
    }

    fn breakpoints(&self) -> Vec<Rational> {
        match self {
            SignalModel::Density { pieces } => pieces.iter().flat_map(|p| [p.from.clone(), p.to.clone()]).collect(),
            _ => Vec::new(),
        }
    }

    /// Leading atoms and the exact mass left after them, for atomic models.
    fn atom(&self, k: usize) -> Option<(String, Rational)> {
        match self {
            SignalModel::Finite { atoms } | SignalModel::Countable { atoms, .. } => {
                atoms.get(k).map(|a| (a.label.clone(), a.prob.clone()))
            }
            SignalModel::Geometric { ratio, prefix } => {
                Some((format!("{prefix}{k}"), &(&Rational::one() - ratio) * &ratio.pow(k as u32)))
            }
            SignalModel::Density { .. } => None,
        }
    }

    pub fn probability_of(&self, label: &str) -> Rational {
        match self {
            SignalModel::Finite { atoms } | SignalModel::Countable { atoms, .. } => {
                atoms.iter().find(|a| a.label == label).map(|a| a.prob.clone()).unwrap_or_default()
            }
            SignalModel::Geometric { prefix, .. } => label
                .strip_prefix(prefix.as_str())
                .and_then(|k| k.parse::<usize>().ok())
                .and_then(|k| self.atom(k))
                .map(|(_, p)| p)
                .unwrap_or_default(),
            SignalModel::Density { .. } => Rational::zero(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DiscretizeError {
    #[error("stage {stage}: {player}'s signal distributions mix densities with atoms")]
    IncompatibleBaseMeasures { stage: usize, player: Player },
    #[error("unsupported signal model: {0}")]
    UnsupportedSignalModel(String),
    #[error("rounded alphabets need {size} signals, over the budget of {budget}; raise epsilon or shrink the game")]
    AlphabetBudgetExceeded { size: usize, budget: usize },
    #[error("invalid game: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidSpec(Vec<Violation>),
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
}

/// Signal distribution of one history class at a stage: a plain label
/// (point mass) or a declared model.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Class<'a> {
    Label(&'a str),
    Model(&'a str, &'a SignalModel),
}

impl Class<'_> {
    fn name(&self) -> String {
        match self {
            Class::Label(l) => format!("label:{l}"),
            Class::Model(m, _) => format!("model:{m}"),
        }
    }

    fn base(&self) -> Base {
        match self {
            Class::Label(_) => Base::Atomic,
            Class::Model(_, m) => m.base(),
        }
    }
}

/// The uniform mixture of a stage's signal distributions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MeanSignal {
    /// No signal is drawn at this stage (beyond the reachable tree).
    None,
    Atomic { atoms: BTreeMap<String, Rational> },
    /// Countable components, each with weight `1 / components.len()`.
    Countable { components: Vec<SignalModel> },
    Density { pieces: Vec<Piece> },
}

impl MeanSignal {
    pub fn probability_of(&self, label: &str) -> Rational {
        match self {
            MeanSignal::Atomic { atoms } => atoms.get(label).cloned().unwrap_or_default(),
            MeanSignal::Countable { components } => {
                let total: Rational = components.iter().map(|m| m.probability_of(label)).sum();
                &total / &Rational::from_integer(components.len() as i64)
            }
            _ => Rational::zero(),
        }
    }
}

/// States reachable at each depth `0..=horizon`, with the transitions of each state.
struct Layers<'a> {
    spec: &'a GameSpec,
    layers: Vec<BTreeSet<&'a str>>,
    by_state: BTreeMap<&'a str, Vec<&'a Transition>>,
}

impl<'a> Layers<'a> {
    fn new(spec: &'a GameSpec, depth: usize) -> Result<Self, DiscretizeError> {
        let violations = spec.validate();
        if !violations.is_empty() {
            return Err(DiscretizeError::InvalidSpec(violations));
        }
        let mut by_state: BTreeMap<&str, Vec<&Transition>> = BTreeMap::new();
        for t in &spec.transitions {
            by_state.entry(t.state.as_str()).or_default().push(t);
        }
        let first: BTreeSet<&str> = match &spec.initial {
            Initial::State(s) => [s.as_str()].into(),
            Initial::Chance(os) => {
                if os.iter().any(|o| !matches!((&o.s1, &o.s2), (SignalRef::Label(_), SignalRef::Label(_)))) {
                    return Err(DiscretizeError::UnsupportedSignalModel(
                        "signal models on the initial chance move".into(),
                    ));
                }
                os.iter().filter(|o| o.prob.is_positive()).map(|o| o.next.as_str()).collect()
            }
        };
        let mut layers = vec![first];
        for m in 0..depth {
            let next: BTreeSet<&str> = layers[m]
                .iter()
                .flat_map(|s| by_state.get(s).into_iter().flatten())
                .flat_map(|t| t.outcomes.iter())
                .filter(|o| o.prob.is_positive())
                .map(|o| o.next.as_str())
                .collect();
            layers.push(next);
        }
        Ok(Layers { spec, layers, by_state })
    }

    /// Outcomes drawn after round `m` (signals of stage `m + 1`).
    fn outcomes_after(&self, m: usize) -> impl Iterator<Item = &'a Outcome> + '_ {
        self.layers[m]
            .iter()
            .flat_map(|s| self.by_state.get(s).into_iter().flatten())
            .flat_map(|t| t.outcomes.iter())
            .filter(|o| o.prob.is_positive())
    }

    fn classes(&self, stage: usize, player: Player) -> Result<Vec<Class<'a>>, DiscretizeError> {
        let mut set = BTreeSet::new();
        for o in self.outcomes_after(stage - 1) {
            let r = if player == Player::Max { &o.s1 } else { &o.s2 };
            set.insert(match r {
                SignalRef::Label(l) => Class::Label(l),
                SignalRef::Model { model } => Class::Model(model, &self.spec.signals[model]),
            });
        }
        let bases: BTreeSet<Base> = set.iter().map(|c| c.base()).collect();
        if bases.contains(&Base::Lebesgue) && bases.len() > 1 {
            return Err(DiscretizeError::IncompatibleBaseMeasures { stage, player });
        }
        Ok(set.into_iter().collect())
    }
}

fn elementary_intervals(classes: &[Class]) -> Vec<(Rational, Rational)> {
    let mut points: BTreeSet<Rational> = [Rational::zero(), Rational::one()].into();
    for c in classes {
        if let Class::Model(_, m) = c {
            points.extend(m.breakpoints());
        }
    }
    let pts: Vec<Rational> = points.into_iter().collect();
    pts.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect()
}

/// Mean signal distribution of each player at `stage` (1-based: the
/// signals drawn after round `stage`).
pub fn mean_signal_distribution(spec: &GameSpec, stage: usize) -> Result<[MeanSignal; 2], DiscretizeError> {
    assert!(stage >= 1, "stages are numbered from 1");
    let layers = Layers::new(spec, stage - 1)?;
    let mut out = [MeanSignal::None, MeanSignal::None];
    for p in Player::BOTH {
        let classes = layers.classes(stage, p)?;
        if classes.is_empty() {
            continue;
        }
        let k = Rational::from_integer(classes.len() as i64);
        out[p.index()] = if classes.iter().any(|c| c.base() == Base::Lebesgue) {
            let mut pieces: Vec<Piece> = Vec::new();
            for (a, b) in elementary_intervals(&classes) {
                let h: Rational = classes
                    .iter()
                    .map(|c| if let Class::Model(_, m) = c { m.height_on(&a, &b) } else { Rational::zero() })
                    .sum::<Rational>()
                    / k.clone();
                if h.is_zero() {
                    continue;
                }
                match pieces.last_mut() {
                    Some(last) if last.to == a && last.height == h => last.to = b,
                    _ => pieces.push(Piece { from: a, to: b, height: h }),
                }
            }
            MeanSignal::Density { pieces }
        } else if classes.iter().any(|c| c.base() == Base::Countable) {
            let components = classes
                .iter()
                .map(|c| match c {
                    Class::Label(l) => {
                        SignalModel::Finite { atoms: vec![Atom { label: l.to_string(), prob: Rational::one() }] }
                    }
                    Class::Model(_, m) => (*m).clone(),
                })
                .collect();
            MeanSignal::Countable { components }
        } else {
            let mut atoms: BTreeMap<String, Rational> = BTreeMap::new();
            for c in &classes {
                match c {
                    Class::Label(l) => *atoms.entry(l.to_string()).or_default() += &(&Rational::one() / &k),
                    Class::Model(_, SignalModel::Finite { atoms: list }) => {
                        for a in list {
                            *atoms.entry(a.label.clone()).or_default() += &(&a.prob / &k);
                        }
                    }
                    Class::Model(..) => unreachable!("only finite classes remain"),
                }
            }
            MeanSignal::Atomic { atoms }
        };
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Coding {
    /// Labels and finite models pass through unchanged.
    Exact,
    /// Countable models truncated, with a lumped tail signal.
    Truncated,
    /// Step densities coded by the vector of rounded likelihood ratios.
    Rounded,
    /// Step densities coded by elementary interval (no loss).
    Refined,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlayerStageCertificate {
    pub coding: Coding,
    pub classes: Vec<String>,
    pub alphabet_size: usize,
    /// `(floor(K / eps_n) + 1)^K` for `K` density classes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nominal_alphabet_bound: Option<String>,
    /// Exact total-variation distance per class (for truncation: the lumped
    /// tail mass, which bounds it).
    pub tv: BTreeMap<String, Rational>,
    pub tv_max: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageCertificate {
    pub stage: usize,
    pub grid: Rational,
    pub players: [PlayerStageCertificate; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiscretizationCertificate {
    pub epsilon: Rational,
    /// Payoff range the total-variation budget is multiplied by.
    pub scale: Rational,
    pub scaled_epsilon: Rational,
    /// The finite game agrees with the original on truncations up to this horizon.
    pub covered_horizon: usize,
    pub stages: Vec<StageCertificate>,
    /// Sum over stages and players of the worst per-class distance.
    pub total_tv: Rational,
    /// `scale * total_tv`; bounds the payoff change for every profile.
    pub payoff_error_bound: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discretized {
    pub spec: GameSpec,
    pub certificate: DiscretizationCertificate,
}

#[derive(Debug, Clone)]
pub struct DiscretizeOptions {
    pub horizon: usize,
    pub alphabet_budget: usize,
}

impl DiscretizeOptions {
    pub fn new(horizon: usize) -> Self {
        DiscretizeOptions { horizon, alphabet_budget: DEFAULT_ALPHABET_BUDGET }
    }
}

/// Per-stage coding of one player's signals: class -> distribution over new labels.
struct StageCode {
    map: BTreeMap<String, Vec<(String, Rational)>>,
    cert: PlayerStageCertificate,
}

fn code_stage(classes: &[Class], grid: &Rational, lossless: bool) -> Result<StageCode, DiscretizeError> {
    let mut map = BTreeMap::new();
    let mut tv = BTreeMap::new();
    let names: Vec<String> = classes.iter().map(Class::name).collect();
    let mut labels: BTreeSet<String> = BTreeSet::new();
    let has_density = classes.iter().any(|c| c.base() == Base::Lebesgue);
    let has_countable = classes.iter().any(|c| c.base() == Base::Countable);
    let mut nominal = None;
    let coding = if has_density {
        let intervals = elementary_intervals(classes);
        let k = Rational::from_integer(classes.len() as i64);
        let heights: Vec<Vec<Rational>> = classes
            .iter()
            .map(|c| match c {
                Class::Model(_, m) => intervals.iter().map(|(a, b)| m.height_on(a, b)).collect(),
                Class::Label(_) => unreachable!("mixed bases rejected earlier"),
            })
            .collect();
        let mean: Vec<Rational> = (0..intervals.len())
            .map(|j| heights.iter().map(|h| &h[j]).sum::<Rational>() / k.clone())
            .collect();
        // Cells: groups of intervals sharing a label.
        let mut cells: Vec<(String, Vec<usize>)> = Vec::new();
        for (j, g) in mean.iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            let label = if lossless {
                format!("[{},{})", intervals[j].0, intervals[j].1)
            } else {
                let v: Vec<String> =
                    heights.iter().map(|h| (&h[j] / g).floor_to_multiple(grid).to_string()).collect();
                format!("({})", v.join(","))
            };
            match cells.iter_mut().find(|(l, _)| *l == label) {
                Some((_, js)) => js.push(j),
                None => cells.push((label, vec![j])),
            }
        }
        for (ci, name) in names.iter().enumerate() {
            let mut dist = Vec::new();
            let mut dist_tv = Rational::zero();
            for (label, js) in &cells {
                let len = |j: usize| &intervals[j].1 - &intervals[j].0;
                let mass: Rational = js.iter().map(|&j| &heights[ci][j] * &len(j)).sum();
                let mean_mass: Rational = js.iter().map(|&j| &mean[j] * &len(j)).sum();
                let ratio = &mass / &mean_mass;
                for &j in js {
                    dist_tv += &(&(&heights[ci][j] - &(&ratio * &mean[j])).abs() * &len(j));
                }
                if mass.is_positive() {
                    dist.push((label.clone(), mass));
                }
            }
            tv.insert(name.clone(), &dist_tv / &Rational::from_integer(2));
            map.insert(name.clone(), dist);
        }
        labels.extend(cells.into_iter().map(|(l, _)| l));
        if lossless {
            Coding::Refined
        } else {
            let kk = classes.len() as u32;
            let levels = (&k / grid).floor() + BigInt::from(1);
            nominal = Some(num_traits::pow::pow(levels, kk as usize).to_string());
            Coding::Rounded
        }
    } else if has_countable {
        if lossless {
            return Err(DiscretizeError::UnsupportedSignalModel(
                "countable signal models have no exact finite refinement".into(),
            ));
        }
        let half = grid / &Rational::from_integer(2);
        for (c, name) in classes.iter().zip(&names) {
            let (dist, lumped) = match c {
                Class::Label(l) => (vec![(l.to_string(), Rational::one())], Rational::zero()),
                Class::Model(m, model) => truncate_countable(m, model, &half)?,
            };
            tv.insert(name.clone(), lumped);
            labels.extend(dist.iter().map(|(l, _)| l.clone()));
            map.insert(name.clone(), dist);
        }
        Coding::Truncated
    } else {
        for (c, name) in classes.iter().zip(&names) {
            let dist = match c {
                Class::Label(l) => vec![(l.to_string(), Rational::one())],
                Class::Model(_, SignalModel::Finite { atoms }) => {
                    atoms.iter().filter(|a| a.prob.is_positive()).map(|a| (a.label.clone(), a.prob.clone())).collect()
                }
                Class::Model(..) => unreachable!("only finite classes remain"),
            };
            tv.insert(name.clone(), Rational::zero());
            labels.extend(dist.iter().map(|(l, _)| l.clone()));
            map.insert(name.clone(), dist);
        }
        Coding::Exact
    };
    let tv_max = tv.values().cloned().max().unwrap_or_default();
    Ok(StageCode {
        map,
        cert: PlayerStageCertificate {
            coding,
            classes: names,
            alphabet_size: labels.len(),
            nominal_alphabet_bound: nominal,
            tv,
            tv_max,
        },
    })
}

const TAIL_LABEL: &str = "other";

/// Keeps leading atoms until the remaining mass drops below `limit`.
fn truncate_countable(
    name: &str,
    model: &SignalModel,
    limit: &Rational,
) -> Result<(Vec<(String, Rational)>, Rational), DiscretizeError> {
    let mut dist = Vec::new();
    let mut rest = Rational::one();
    let mut k = 0;
    while &rest >= limit {
        match model.atom(k) {
            Some((label, p)) => {
                rest -= &p;
                if p.is_positive() {
                    dist.push((label, p));
                }
                k += 1;
            }
            None => {
                return Err(DiscretizeError::UnsupportedSignalModel(format!(
                    "model {name:?}: unlisted mass {rest} exceeds the stage budget {limit}"
                )))
            }
        }
    }
    if rest.is_positive() {
        dist.push((TAIL_LABEL.to_string(), rest.clone()));
    }
    Ok((dist, rest))
}

fn scale_of(spec: &GameSpec, horizon: usize) -> Rational {
    let class = spec.classify();
    let range = spec
        .flags
        .bound
        .clone()
        .unwrap_or_else(|| &class.per_stage_bound * &Rational::from_integer(horizon as i64));
    let range = if class.nonnegative { range } else { &range * &Rational::from_integer(2) };
    if range.is_positive() {
        range
    } else {
        Rational::one()
    }
}

/// Finite-signal game within `epsilon` of `spec` on truncations up to
/// `opts.horizon`, with its certificate. Specs without signal models are
/// returned unchanged.
pub fn approximate_signals(
    spec: &GameSpec,
    epsilon: &Rational,
    opts: &DiscretizeOptions,
) -> Result<Discretized, DiscretizeError> {
    build(spec, epsilon, opts, false)
}

/// Lossless finite game for step-density signals: each signal is replaced
/// by the elementary interval containing it. Likelihood ratios are constant
/// there, so nothing strategically relevant is lost.
pub fn refine_exact(spec: &GameSpec, horizon: usize) -> Result<GameSpec, DiscretizeError> {
    let opts = DiscretizeOptions { horizon, alphabet_budget: usize::MAX };
    Ok(build(spec, &Rational::one(), &opts, true)?.spec)
}

fn build(spec: &GameSpec, epsilon: &Rational, opts: &DiscretizeOptions, lossless: bool) -> Result<Discretized, DiscretizeError> {
    if !epsilon.is_positive() {
        return Err(DiscretizeError::NonPositiveEpsilon);
    }
    let scale = scale_of(spec, opts.horizon);
    let scaled_epsilon = epsilon / &scale;
    if !spec.has_signal_models() {
        let violations = spec.validate();
        if !violations.is_empty() {
            return Err(DiscretizeError::InvalidSpec(violations));
        }
        return Ok(Discretized {
            spec: spec.clone(),
            certificate: DiscretizationCertificate {
                epsilon: epsilon.clone(),
                scale,
                scaled_epsilon,
                covered_horizon: opts.horizon,
                stages: Vec::new(),
                total_tv: Rational::zero(),
                payoff_error_bound: Rational::zero(),
            },
        });
    }
    let horizon = opts.horizon;
    let layers = Layers::new(spec, horizon)?;
    let mut codes: Vec<[StageCode; 2]> = Vec::with_capacity(horizon);
    let mut stages = Vec::with_capacity(horizon);
    let mut alphabet = 0usize;
    for n in 1..=horizon {
        let grid = &scaled_epsilon * &Rational::pow2_inv(n as u32);
        let c1 = code_stage(&layers.classes(n, Player::Max)?, &grid, lossless)?;
        let c2 = code_stage(&layers.classes(n, Player::Min)?, &grid, lossless)?;
        alphabet = alphabet.saturating_add(c1.cert.alphabet_size + c2.cert.alphabet_size);
        if alphabet > opts.alphabet_budget {
            return Err(DiscretizeError::AlphabetBudgetExceeded { size: alphabet, budget: opts.alphabet_budget });
        }
        stages.push(StageCertificate { stage: n, grid, players: [c1.cert.clone(), c2.cert.clone()] });
        codes.push([c1, c2]);
    }
    let total_tv: Rational = stages.iter().flat_map(|s| s.players.iter().map(|p| &p.tv_max)).sum();
    let out = augmented_spec(spec, &layers, &codes);
    Ok(Discretized {
        spec: out,
        certificate: DiscretizationCertificate {
            epsilon: epsilon.clone(),
            payoff_error_bound: &scale * &total_tv,
            scale,
            scaled_epsilon,
            covered_horizon: horizon,
            stages,
            total_tv,
        },
    })
}

fn at(state: &str, depth: usize) -> String {
    format!("{state}@{depth}")
}

fn class_key(r: &SignalRef) -> String {
    match r {
        SignalRef::Label(l) => format!("label:{l}"),
        SignalRef::Model { model } => format!("model:{model}"),
    }
}

/// Stage-indexed copy of `spec` in which every signal is replaced by its
/// stage coding. States at the last depth loop on themselves with an
/// uninformative signal.
fn augmented_spec(spec: &GameSpec, layers: &Layers, codes: &[[StageCode; 2]]) -> GameSpec {
    let horizon = codes.len();
    let mut states = Vec::new();
    let mut actions = BTreeMap::new();
    let mut transitions = Vec::new();
    let mut payoffs = Vec::new();
    for (m, layer) in layers.layers.iter().enumerate() {
        for &x in layer {
            let name = at(x, m);
            states.push(name.clone());
            let sets: &ActionSets = &spec.actions[x];
            actions.insert(name.clone(), sets.clone());
            payoffs.extend(
                spec.payoffs
                    .iter()
                    .filter(|p| p.state == x)
                    .map(|p| PayoffEntry { state: name.clone(), ..p.clone() }),
            );
            for t in layer_transitions(layers, x) {
                let outcomes = if m < horizon {
                    let mut merged: Vec<Outcome> = Vec::new();
                    for o in t.outcomes.iter().filter(|o| o.prob.is_positive()) {
                        let d1 = &codes[m][0].map[&class_key(&o.s1)];
                        let d2 = &codes[m][1].map[&class_key(&o.s2)];
                        for (l1, p1) in d1 {
                            for (l2, p2) in d2 {
                                let prob = &(&o.prob * p1) * p2;
                                let next = at(&o.next, m + 1);
                                match merged.iter_mut().find(|e| {
                                    e.next == next && e.s1 == SignalRef::Label(l1.clone()) && e.s2 == SignalRef::Label(l2.clone())
                                }) {
                                    Some(e) => e.prob += &prob,
                                    None => merged.push(Outcome {
                                        prob,
                                        next,
                                        s1: SignalRef::label(l1),
                                        s2: SignalRef::label(l2),
                                    }),
                                }
                            }
                        }
                    }
                    merged
                } else {
                    vec![Outcome { prob: Rational::one(), next: name.clone(), s1: SignalRef::label("-"), s2: SignalRef::label("-") }]
                };
                transitions.push(Transition { state: name.clone(), a1: t.a1.clone(), a2: t.a2.clone(), outcomes });
            }
        }
    }
    let initial = match &spec.initial {
        Initial::State(s) => Initial::State(at(s, 0)),
        Initial::Chance(os) => Initial::Chance(
            os.iter()
                .filter(|o| o.prob.is_positive())
                .map(|o| Outcome { next: at(&o.next, 0), ..o.clone() })
                .collect(),
        ),
    };
    GameSpec { states, initial, actions, transitions, payoffs, flags: spec.flags.clone(), signals: BTreeMap::new() }
}

fn layer_transitions<'a>(layers: &Layers<'a>, state: &str) -> Vec<&'a Transition> {
    layers.by_state.get(state).cloned().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::builder::SpecBuilder;
    use crate::rational::q;

    fn piece(from: Rational, to: Rational, height: Rational) -> Piece {
        Piece { from, to, height }
    }

    /// Nature picks one of two states; the Maximizer then sees a density signal.
    fn two_density_spec() -> GameSpec {
        let mut b = SpecBuilder::new();
        b.state("s", &["a"], &["b"]).state("l", &["a"], &["b"]).state("r", &["a"], &["b"]).initial_state("s");
        b.transition_raw(
            "s",
            "a",
            "b",
            vec![
                Outcome { prob: q(1, 2), next: "l".into(), s1: SignalRef::Model { model: "lo".into() }, s2: SignalRef::label("-") },
                Outcome { prob: q(1, 2), next: "r".into(), s1: SignalRef::Model { model: "hi".into() }, s2: SignalRef::label("-") },
            ],
        );
        b.goto("l", "a", "b", "l", "-", "-").goto("r", "a", "b", "r", "-", "-");
        let mut spec = b.build();
        spec.signals.insert("lo".into(), SignalModel::Density { pieces: vec![piece(q(0, 1), q(1, 2), q(2, 1))] });
        spec.signals.insert("hi".into(), SignalModel::Density { pieces: vec![piece(q(1, 2), q(1, 1), q(2, 1))] });
        spec
    }

    #[test]
    fn model_checks() {
        assert!(SignalModel::Density { pieces: vec![piece(q(0, 1), q(1, 1), q(1, 1))] }.check().is_ok());
        assert!(SignalModel::Density { pieces: vec![piece(q(0, 1), q(1, 1), q(2, 1))] }.check().is_err());
        assert!(SignalModel::Geometric { ratio: q(1, 2), prefix: "g".into() }.check().is_ok());
        assert!(SignalModel::Geometric { ratio: q(1, 1), prefix: "g".into() }.check().is_err());
        let listed = vec![Atom { label: "a".into(), prob: q(1, 2) }];
        assert!(SignalModel::Countable { atoms: listed.clone(), tail: q(1, 2) }.check().is_ok());
        assert!(SignalModel::Countable { atoms: listed, tail: q(1, 4) }.check().is_err());
    }

    #[test]
    fn mean_of_complementary_densities_is_uniform() {
        let [m1, m2] = mean_signal_distribution(&two_density_spec(), 1).unwrap();
        assert_eq!(m1, MeanSignal::Density { pieces: vec![piece(q(0, 1), q(1, 1), q(1, 1))] });
        assert_eq!(m2, MeanSignal::Atomic { atoms: [("-".to_string(), q(1, 1))].into() });
    }

    #[test]
    fn mean_of_point_masses() {
        let mut b = SpecBuilder::new();
        b.state("s", &["a"], &["b"]).initial_state("s");
        b.transition("s", "a", "b", &[(q(1, 3), "s", "x", "-"), (q(2, 3), "s", "y", "-")]);
        let [m1, _] = mean_signal_distribution(&b.build(), 1).unwrap();
        assert_eq!(m1, MeanSignal::Atomic { atoms: [("x".to_string(), q(1, 2)), ("y".to_string(), q(1, 2))].into() });
    }

    #[test]
    fn mixed_bases_are_rejected() {
        let mut spec = two_density_spec();
        spec.transitions[0].outcomes[1].s1 = SignalRef::label("plain");
        assert_eq!(
            mean_signal_distribution(&spec, 1),
            Err(DiscretizeError::IncompatibleBaseMeasures { stage: 1, player: Player::Max })
        );
    }

    #[test]
    fn pass_through() {
        let mut b = SpecBuilder::new();
        b.state("s", &["a"], &["b"]).initial_state("s").goto("s", "a", "b", "s", "-", "-");
        let spec = b.build();
        let d = approximate_signals(&spec, &q(1, 10), &DiscretizeOptions::new(3)).unwrap();
        assert_eq!(d.spec, spec);
        assert!(d.certificate.total_tv.is_zero());
        let again = approximate_signals(&d.spec, &q(1, 10), &DiscretizeOptions::new(3)).unwrap();
        assert_eq!(again, d);
    }

    #[test]
    fn separated_densities_round_exactly() {
        let d = approximate_signals(&two_density_spec(), &q(1, 2), &DiscretizeOptions::new(2)).unwrap();
        assert!(d.spec.validate().is_empty());
        let s1 = &d.certificate.stages[0].players[0];
        assert_eq!(s1.coding, Coding::Rounded);
        assert_eq!(s1.alphabet_size, 2);
        assert!(s1.tv_max.is_zero());
        assert_eq!(s1.nominal_alphabet_bound.as_deref(), Some("81"));
    }

    #[test]
    fn geometric_truncation_keeps_tail_below_budget() {
        let mut b = SpecBuilder::new();
        b.state("s", &["a"], &["b"]).initial_state("s");
        b.transition_raw(
            "s",
            "a",
            "b",
            vec![Outcome { prob: q(1, 1), next: "s".into(), s1: SignalRef::Model { model: "geo".into() }, s2: SignalRef::label("-") }],
        );
        b.flags(true, Some(q(1, 1)));
        let mut spec = b.build();
        spec.signals.insert("geo".into(), SignalModel::Geometric { ratio: q(1, 2), prefix: "k".into() });
        let d = approximate_signals(&spec, &q(1, 4), &DiscretizeOptions::new(3)).unwrap();
        for st in &d.certificate.stages {
            assert!(st.players[0].tv_max < &st.grid / &q(2, 1));
        }
        assert!(d.certificate.total_tv < q(1, 4));
        // stage 1: grid 1/8, tail must drop below 1/16: 2^-5
        assert_eq!(d.certificate.stages[0].players[0].tv_max, q(1, 32));
        assert_eq!(d.certificate.stages[0].players[0].alphabet_size, 6);
    }

    #[test]
    fn refinement_is_lossless_and_valid() {
        let g = refine_exact(&two_density_spec(), 2).unwrap();
        assert!(g.validate().is_empty());
        assert!(!g.has_signal_models());
    }
}
