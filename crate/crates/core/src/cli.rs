//! Command-line front end. [`run_command`] does all the work and returns
//! the exit status with the text destined for stdout and stderr, so the
//! binary stays a thin wrapper and tests can drive commands in-process.
//!
//! Exit statuses: 0 success, 2 invalid input, 3 budget exhausted.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::discretize::{approximate_signals, DiscretizeError, DiscretizeOptions, DEFAULT_ALPHABET_BUDGET};
use crate::eval::{best_response_value, expected_payoff, simulate_game, EvalError, Goal};
use crate::game::spec::{Classification, GameSpec};
use crate::game::strategy::{BehavioralStrategy, Profile};
use crate::instances::counterexample::{
    build_counterexample, counterexample_bounds, no_value_witness, Bounds, CounterexampleError, CounterexampleParams,
    NoValueWitness,
};
use crate::instances::pursuit::{build_pursuit_grid, Graph, Observation, PursuitError, PursuitParams, PursuitVariant};
use crate::rational::Rational;
use crate::solver::{
    brute_force_oracle, build_sequence_form, sequence_form_lp, solve_zero_sum_with_budget, OracleError, SolveError,
    DEFAULT_ORACLE_BUDGET, DEFAULT_SEQUENCE_BUDGET,
};
use crate::uniform::{
    build_truncation, extract_eps_optimal_with, sweep_with, EpsOptimal, ExtractError, SweepError, SweepOptions,
    Truncation, ValueReport,
};
use crate::unfold::{UnfoldError, DEFAULT_NODE_BUDGET};
use crate::Player;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Clone, Parser)]
#[command(name = "pegame", version, about = "Exact values of cumulative pursuit-evasion games with private signals")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Maximum number of nodes in an unfolded truncation.
    #[arg(long, global = true, env = "PEGAME_NODE_BUDGET", default_value_t = DEFAULT_NODE_BUDGET,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub node_budget: u64,
    /// Maximum reduced pure strategies per player for `solve --oracle`.
    #[arg(long, global = true, env = "PEGAME_ORACLE_BUDGET", default_value_t = DEFAULT_ORACLE_BUDGET,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub oracle_budget: u64,
    /// Maximum signal alphabet per player and stage when discretizing.
    #[arg(long, global = true, env = "PEGAME_ALPHABET_BUDGET", default_value_t = DEFAULT_ALPHABET_BUDGET)]
    pub alphabet_budget: usize,
    /// Maximum sequences per player in a sequence-form LP.
    #[arg(long, global = true, env = "PEGAME_SEQUENCE_BUDGET", default_value_t = DEFAULT_SEQUENCE_BUDGET)]
    pub sequence_budget: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Check a game file and report its classification.
    Validate(GameArg),
    /// Solve one truncation exactly.
    Solve(SolveArgs),
    /// Solve truncations of increasing length.
    Sweep(SweepArgs),
    /// Expected payoff of a strategy profile.
    Eval(EvalArgs),
    /// Best reply to a fixed strategy, and the value it achieves.
    BestResponse(BestResponseArgs),
    /// Monte Carlo estimate of a profile's payoff.
    Simulate(SimulateArgs),
    /// Replace continuous or countable signals by finite ones.
    ApproxSignals(ApproxArgs),
    /// The two-type stopping game without a value.
    Counterexample(CounterexampleArgs),
    /// Pursuit on a graph given as an edge list.
    Pursuit(PursuitArgs),
    /// Sweep the leavable truncations.
    LeavableSweep(LeavableSweepArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GameArg {
    #[arg(long)]
    pub game: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub game: PathBuf,
    #[arg(long)]
    pub horizon: usize,
    /// Solve the leavable truncation instead.
    #[arg(long)]
    pub leavable: bool,
    /// Cross-check the value by enumerating pure strategies.
    #[arg(long)]
    pub oracle: bool,
    /// Write the unfolded tree, one node per line, to this file.
    #[arg(long)]
    pub dump_tree: Option<PathBuf>,
    /// Write both sequence-form LPs to this file.
    #[arg(long)]
    pub dump_lp: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepParams {
    #[arg(long)]
    pub max_horizon: usize,
    /// Gap below which consecutive values count as a plateau.
    #[arg(long, default_value = "1/1000")]
    pub plateau_epsilon: Rational,
    /// Consecutive small gaps needed to stop early (0 never stops early).
    #[arg(long, default_value_t = 3)]
    pub plateau_window: usize,
    /// Also extract an epsilon-optimal Maximizer strategy.
    #[arg(long)]
    pub extract: Option<Rational>,
    /// Shorthand for `--format csv`.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub game: PathBuf,
    #[arg(long)]
    pub leavable: bool,
    #[command(flatten)]
    pub sweep: SweepParams,
}

#[derive(Debug, Clone, Args)]
pub struct LeavableSweepArgs {
    #[arg(long)]
    pub game: PathBuf,
    #[command(flatten)]
    pub sweep: SweepParams,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub game: PathBuf,
    #[arg(long)]
    pub horizon: usize,
    /// JSON file with `sigma1` and `sigma2`.
    #[arg(long)]
    pub profile: PathBuf,
    #[arg(long)]
    pub leavable: bool,
}

#[derive(Debug, Clone, Args)]
pub struct BestResponseArgs {
    #[arg(long)]
    pub game: PathBuf,
    #[arg(long)]
    pub horizon: usize,
    /// JSON strategy file of the fixed player.
    #[arg(long)]
    pub strategy: PathBuf,
    #[arg(long)]
    pub leavable: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub game: PathBuf,
    #[arg(long)]
    pub horizon: usize,
    #[arg(long)]
    pub profile: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub reps: u64,
}

#[derive(Debug, Clone, Args)]
pub struct ApproxArgs {
    #[arg(long)]
    pub game: PathBuf,
    #[arg(long)]
    pub epsilon: Rational,
    /// Number of stages to cover.
    #[arg(long)]
    pub horizon: usize,
    /// Also write the finite-signal game to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CounterexampleArgs {
    #[arg(long)]
    pub p: Rational,
    #[arg(long = "A")]
    pub a: Rational,
    /// Truncation used for the certificates.
    #[arg(long, default_value_t = 6)]
    pub horizon: usize,
    /// Also solve the truncations up to `--max-horizon`.
    #[arg(long)]
    pub sweep: bool,
    #[arg(long, default_value_t = 6)]
    pub max_horizon: usize,
    /// Print the game file instead of analysing it.
    #[arg(long)]
    pub emit_spec: bool,
}

#[derive(Debug, Clone, Args)]
pub struct PursuitArgs {
    /// Edge list: one `u v` pair per line.
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_enum)]
    pub variant: VariantArg,
    /// Starting vertex names (default: first vertex / last vertex).
    #[arg(long)]
    pub pursuer: Option<String>,
    #[arg(long)]
    pub evader: Option<String>,
    #[arg(long, value_enum, default_value_t = ObservationArg::OwnPosition)]
    pub observation: ObservationArg,
    /// End play after this many stages.
    #[arg(long)]
    pub cap: Option<usize>,
    #[command(flatten)]
    pub sweep: SweepParams,
    /// Print the game file instead of sweeping it.
    #[arg(long)]
    pub emit_spec: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Kind,
    Degree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObservationArg {
    OwnPosition,
    Full,
}

/// Result of a command: exit status plus captured output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
enum Failure {
    Invalid(String),
    Budget(String),
}

impl Failure {
    fn invalid(e: impl std::fmt::Display) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<UnfoldError> for Failure {
    fn from(e: UnfoldError) -> Self {
        match e {
            UnfoldError::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            _ => Failure::invalid(e),
        }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::SizeBudgetExceeded { .. } => Failure::Budget(e.to_string()),
            _ => Failure::invalid(e),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::OracleBudgetExceeded { .. } => Failure::Budget(e.to_string()),
            _ => Failure::invalid(e),
        }
    }
}

impl From<SweepError> for Failure {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::Unfold(u) => u.into(),
            SweepError::Solve(s) => s.into(),
            _ => Failure::invalid(e),
        }
    }
}

impl From<ExtractError> for Failure {
    fn from(e: ExtractError) -> Self {
        match e {
            ExtractError::Sweep(s) => s.into(),
            _ => Failure::invalid(e),
        }
    }
}

impl From<DiscretizeError> for Failure {
    fn from(e: DiscretizeError) -> Self {
        match e {
            DiscretizeError::AlphabetBudgetExceeded { .. } => Failure::Budget(e.to_string()),
            _ => Failure::invalid(e),
        }
    }
}

impl From<CounterexampleError> for Failure {
    fn from(e: CounterexampleError) -> Self {
        match e {
            CounterexampleError::Unfold(u) => u.into(),
            _ => Failure::invalid(e),
        }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        Failure::invalid(e)
    }
}

impl From<PursuitError> for Failure {
    fn from(e: PursuitError) -> Self {
        Failure::invalid(e)
    }
}

type CmdResult = Result<String, Failure>;

/// Runs one command. Never panics on bad input; every failure maps to a
/// nonzero status with a diagnostic on stderr and nothing on stdout.
pub fn run_command(config: &RunConfig) -> Outcome {
    let result = match &config.command {
        Command::Validate(a) => validate(config, a),
        Command::Solve(a) => solve(config, a),
        Command::Sweep(a) => {
            let t = if a.leavable { Truncation::Leavable } else { Truncation::Standard };
            load_game(&a.game).and_then(|spec| sweep_cmd(config, &spec, &a.sweep, t))
        }
        Command::LeavableSweep(a) => {
            load_game(&a.game).and_then(|spec| sweep_cmd(config, &spec, &a.sweep, Truncation::Leavable))
        }
        Command::Eval(a) => eval_cmd(config, a),
        Command::BestResponse(a) => best_response_cmd(config, a),
        Command::Simulate(a) => simulate_cmd(config, a),
        Command::ApproxSignals(a) => approx_cmd(config, a),
        Command::Counterexample(a) => counterexample_cmd(config, a),
        Command::Pursuit(a) => pursuit_cmd(config, a),
    };
    match result {
        Ok(mut stdout) => {
            if !stdout.ends_with('\n') {
                stdout.push('\n');
            }
            Outcome { status: EXIT_OK, stdout, stderr: String::new() }
        }
        Err(Failure::Invalid(msg)) => Outcome { status: EXIT_INVALID, stdout: String::new(), stderr: format!("error: {msg}\n") },
        Err(Failure::Budget(msg)) => {
            Outcome { status: EXIT_BUDGET, stdout: String::new(), stderr: format!("budget exceeded: {msg}\n") }
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

/// Loads and validates a game file.
fn load_game(path: &Path) -> Result<GameSpec, Failure> {
    let spec: GameSpec = parse_json(path)?;
    let violations = spec.validate();
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(Failure::Invalid(format!("{}: {}", path.display(), list.join("; "))));
    }
    Ok(spec)
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output serializes")
}

#[derive(Serialize)]
struct ValidateOutput {
    valid: bool,
    violations: Vec<String>,
    classification: Classification,
    signal_models: usize,
}

fn validate(config: &RunConfig, a: &GameArg) -> CmdResult {
    let spec: GameSpec = parse_json(&a.game)?;
    let violations: Vec<String> = spec.validate().iter().map(|v| v.to_string()).collect();
    if !violations.is_empty() {
        return Err(Failure::Invalid(format!("{}: {}", a.game.display(), violations.join("; "))));
    }
    let out = ValidateOutput { valid: true, violations, classification: spec.classify(), signal_models: spec.signals.len() };
    Ok(match config.format {
        Format::Human => format!(
            "valid; nonnegative: {}; per-stage bound: {}\n",
            out.classification.nonnegative, out.classification.per_stage_bound
        ),
        _ => json(&out),
    })
}

#[derive(Serialize)]
struct SolveOutput {
    schema: &'static str,
    truncation: Truncation,
    horizon: usize,
    value: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_value: Option<Rational>,
    nodes: usize,
    sequences: [usize; 2],
    pivots: usize,
    maximizer: BehavioralStrategy,
    minimizer: BehavioralStrategy,
}

fn truncation_of(leavable: bool) -> Truncation {
    if leavable {
        Truncation::Leavable
    } else {
        Truncation::Standard
    }
}

fn solve(config: &RunConfig, a: &SolveArgs) -> CmdResult {
    let spec = load_game(&a.game)?;
    let truncation = truncation_of(a.leavable);
    let game = build_truncation(&spec, a.horizon, truncation, config.node_budget)?;
    if let Some(path) = &a.dump_tree {
        write(path, &game.dump())?;
    }
    let sf = build_sequence_form(&game);
    if let Some(path) = &a.dump_lp {
        let text = format!("{}\n{}", sequence_form_lp(&sf, Player::Max).dump(), sequence_form_lp(&sf, Player::Min).dump());
        write(path, &text)?;
    }
    let sol = solve_zero_sum_with_budget(&game, config.sequence_budget)?;
    let oracle_value = if a.oracle { Some(brute_force_oracle(&game, config.oracle_budget)?) } else { None };
    if let Some(v) = &oracle_value {
        if v != &sol.value {
            return Err(Failure::Invalid(format!("oracle value {v} disagrees with LP value {}", sol.value)));
        }
    }
    let out = SolveOutput {
        schema: "pegame/solve@1",
        truncation,
        horizon: a.horizon,
        nodes: game.nodes.len(),
        sequences: sf.num_seqs,
        pivots: sol.pivots,
        maximizer: sol.maximizer(&game),
        minimizer: sol.minimizer(&game),
        value: sol.value,
        oracle_value,
    };
    Ok(match config.format {
        Format::Human => format!("v_{} = {} (~{:.6})\n", a.horizon, out.value, out.value.to_f64()),
        Format::Csv => format!("n,v_n\n{},{}\n", a.horizon, out.value),
        Format::Json => json(&out),
    })
}

#[derive(Serialize)]
struct SweepOutput<'a> {
    #[serde(flatten)]
    report: &'a ValueReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    eps_optimal: Option<EpsOptimal>,
}

fn sweep_options(config: &RunConfig, p: &SweepParams, truncation: Truncation) -> SweepOptions {
    SweepOptions {
        truncation,
        plateau_window: p.plateau_window,
        node_budget: config.node_budget,
        sequence_budget: config.sequence_budget,
    }
}

fn sweep_cmd(config: &RunConfig, spec: &GameSpec, p: &SweepParams, truncation: Truncation) -> CmdResult {
    if !p.plateau_epsilon.is_positive() {
        return Err(Failure::Invalid("plateau epsilon must be positive".into()));
    }
    let opts = sweep_options(config, p, truncation);
    let report = sweep_with(spec, p.max_horizon, &p.plateau_epsilon, &opts)?;
    let eps_optimal = match &p.extract {
        Some(eps) => Some(extract_eps_optimal_with(spec, &report, eps, &opts)?),
        None => None,
    };
    Ok(render_sweep(config, p, &report, eps_optimal))
}

fn render_sweep(config: &RunConfig, p: &SweepParams, report: &ValueReport, eps_optimal: Option<EpsOptimal>) -> String {
    if p.csv || config.format == Format::Csv {
        return report.to_csv();
    }
    match config.format {
        Format::Human => {
            let mut out = String::new();
            for (n, v) in report.horizons.iter().zip(&report.values) {
                out.push_str(&format!("v_{n} = {v}\n"));
            }
            out.push_str(&format!("plateau reached: {}\n", report.plateau_reached));
            if let Some(lb) = &report.certified_lower_bound {
                out.push_str(&format!("certified lower bound: {lb}\n"));
            }
            if let Some(e) = &eps_optimal {
                out.push_str(&format!("epsilon-optimal from N = {} with guarantee {}\n", e.n, e.guarantee));
            }
            out
        }
        _ => json(&SweepOutput { report, eps_optimal }),
    }
}

#[derive(Serialize)]
struct ValueOutput {
    horizon: usize,
    value: Rational,
}

fn eval_cmd(config: &RunConfig, a: &EvalArgs) -> CmdResult {
    let spec = load_game(&a.game)?;
    let profile: Profile = parse_json(&a.profile)?;
    let profile = Profile::new(profile.sigma1, profile.sigma2).map_err(Failure::invalid)?;
    let game = build_truncation(&spec, a.horizon, truncation_of(a.leavable), config.node_budget)?;
    let value = expected_payoff(&game, &profile)?;
    Ok(match config.format {
        Format::Json => json(&ValueOutput { horizon: a.horizon, value }),
        _ => format!("{value}\n"),
    })
}

#[derive(Serialize)]
struct BestResponseOutput {
    horizon: usize,
    fixed: Player,
    goal: Goal,
    value: Rational,
    responder_strategy: Option<BehavioralStrategy>,
}

fn best_response_cmd(config: &RunConfig, a: &BestResponseArgs) -> CmdResult {
    let spec = load_game(&a.game)?;
    let strategy: BehavioralStrategy = parse_json(&a.strategy)?;
    let game = build_truncation(&spec, a.horizon, truncation_of(a.leavable), config.node_budget)?;
    let goal = Goal::of(strategy.owner.opponent());
    let result = best_response_value(&game, &strategy, goal)?;
    Ok(match config.format {
        Format::Json => json(&BestResponseOutput {
            horizon: a.horizon,
            fixed: strategy.owner,
            goal,
            value: result.value,
            responder_strategy: result.responder_strategy,
        }),
        _ => format!("{}\n", result.value),
    })
}

#[derive(Serialize)]
struct SimulateOutput {
    horizon: usize,
    seed: u64,
    reps: u64,
    /// Floating-point estimates, reported next to the exact value.
    mean_approx: f64,
    stderr_approx: f64,
    exact: Rational,
}

fn simulate_cmd(config: &RunConfig, a: &SimulateArgs) -> CmdResult {
    let spec = load_game(&a.game)?;
    let profile: Profile = parse_json(&a.profile)?;
    let profile = Profile::new(profile.sigma1, profile.sigma2).map_err(Failure::invalid)?;
    let game = build_truncation(&spec, a.horizon, Truncation::Standard, config.node_budget)?;
    let sim = simulate_game(&game, &profile, a.seed, a.reps)?;
    let exact = expected_payoff(&game, &profile)?;
    let out = SimulateOutput {
        horizon: a.horizon,
        seed: a.seed,
        reps: sim.reps,
        mean_approx: sim.mean,
        stderr_approx: sim.stderr,
        exact,
    };
    Ok(match config.format {
        Format::Json => json(&out),
        _ => format!("~{:.6} ± {:.6} (exact {})\n", out.mean_approx, out.stderr_approx, out.exact),
    })
}

fn approx_cmd(config: &RunConfig, a: &ApproxArgs) -> CmdResult {
    let spec = load_game(&a.game)?;
    let opts = DiscretizeOptions { horizon: a.horizon, alphabet_budget: config.alphabet_budget };
    let d = approximate_signals(&spec, &a.epsilon, &opts)?;
    if let Some(path) = &a.out {
        write(path, &d.spec.to_json())?;
    }
    Ok(match config.format {
        Format::Json => json(&d),
        _ => format!(
            "total variation {} <= {}; payoff error bound {}\n",
            d.certificate.total_tv, d.certificate.scaled_epsilon, d.certificate.payoff_error_bound
        ),
    })
}

#[derive(Serialize)]
struct CounterexampleOutput {
    params: CounterexampleParams,
    bounds: Bounds,
    witness: NoValueWitness,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<ValueReport>,
}

fn counterexample_cmd(config: &RunConfig, a: &CounterexampleArgs) -> CmdResult {
    let params = CounterexampleParams::new(a.p.clone(), a.a.clone(), a.horizon)?;
    let spec = build_counterexample(&params)?;
    if a.emit_spec {
        return Ok(spec.to_json());
    }
    let witness = no_value_witness(&params)?;
    let sweep = if a.sweep {
        let opts = SweepOptions {
            plateau_window: 0,
            node_budget: config.node_budget,
            sequence_budget: config.sequence_budget,
            ..Default::default()
        };
        Some(sweep_with(&spec, a.max_horizon, &Rational::new(1, 1000), &opts)?)
    } else {
        None
    };
    let out = CounterexampleOutput { bounds: counterexample_bounds(&params), params, witness, sweep };
    Ok(match config.format {
        Format::Json => json(&out),
        _ => {
            let mut s = format!(
                "upper {} lower {} gap {}\ncertified at horizon {}: upper {} lower {}\n",
                out.bounds.upper,
                out.bounds.lower,
                out.bounds.gap,
                out.witness.horizon,
                out.witness.upper_certificate,
                out.witness.lower_certificate
            );
            if let Some(r) = &out.sweep {
                for (n, v) in r.horizons.iter().zip(&r.values) {
                    s.push_str(&format!("v_{n} = {v}\n"));
                }
            }
            s
        }
    })
}

fn pursuit_cmd(config: &RunConfig, a: &PursuitArgs) -> CmdResult {
    let graph = Graph::parse_edge_list(&read(&a.graph)?)?;
    let vertex = |name: &Option<String>, default: usize| -> Result<usize, Failure> {
        match name {
            None => Ok(default),
            Some(n) => graph.vertex(n).ok_or_else(|| Failure::Invalid(format!("unknown vertex {n:?}"))),
        }
    };
    let params = PursuitParams {
        pursuer_start: vertex(&a.pursuer, 0)?,
        evader_start: vertex(&a.evader, graph.len() - 1)?,
        variant: match a.variant {
            VariantArg::Kind => PursuitVariant::Kind,
            VariantArg::Degree => PursuitVariant::Degree,
        },
        observation: match a.observation {
            ObservationArg::OwnPosition => Observation::OwnPosition,
            ObservationArg::Full => Observation::Full,
        },
        horizon_cap: a.cap,
        graph,
    };
    let spec = build_pursuit_grid(&params)?;
    if a.emit_spec {
        return Ok(spec.to_json());
    }
    sweep_cmd(config, &spec, &a.sweep, Truncation::Standard)
}
