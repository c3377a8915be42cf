//! Acceptance suite: one PASS/FAIL line per criterion, with the time taken
//! against its budget. Run with `cargo test --test acceptance -- --nocapture`.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde_json::{json, Value};

use pegame::discretize::{approximate_signals, refine_exact, DiscretizeOptions, Piece, SignalModel};
use pegame::eval::{best_response_value, expected_payoff, Goal};
use pegame::game::builder::SpecBuilder;
use pegame::game::spec::{GameSpec, Outcome, SignalRef};
use pegame::instances::counterexample::{
    build_counterexample, claim1_best_reply, claim2_maximizer_strategy, counterexample_bounds,
    minimizer_from_stop_probabilities, never_stop_minimizer, no_value_witness, CounterexampleParams, StopDistribution,
};
use pegame::leavable::build_leavable_truncation;
use pegame::random::{constant_payoff_spec, hidden_coin_spec, random_spec, RandomSpecParams};
use pegame::solver::{behavioral_to_plan, brute_force_oracle, plan_to_behavioral, solve_zero_sum, DEFAULT_ORACLE_BUDGET};
use pegame::uniform::{maximizer_guarantees, secure_from, sweep_with, SweepOptions, Truncation};
use pegame::unfold::truncate_spec;
use pegame::{Player, Profile, Rational};

type Check = Result<Value, String>;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn nondecreasing(xs: &[Rational]) -> bool {
    xs.windows(2).all(|w| w[0] <= w[1])
}

fn strings(xs: &[Rational]) -> Vec<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

fn oracle_equivalence() -> Check {
    let mut values = Vec::new();
    for seed in 0..50 {
        let spec = random_spec(&RandomSpecParams::oracle_scale(), seed);
        let game = truncate_spec(&spec, 3).map_err(|e| e.to_string())?;
        let lp = solve_zero_sum(&game).map_err(|e| e.to_string())?.value;
        let brute = brute_force_oracle(&game, DEFAULT_ORACLE_BUDGET).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(lp == brute, || format!("seed {seed}: LP {lp} vs oracle {brute}"))?;
        values.push(lp.to_string());
    }
    Ok(json!({ "values": values }))
}

fn monotonicity() -> Check {
    let opts = SweepOptions { plateau_window: 0, ..Default::default() };
    let mut out = Vec::new();
    for seed in 0..20 {
        let spec = random_spec(&RandomSpecParams::sweep_scale(), seed);
        ensure(spec.classify().nonnegative, || format!("seed {seed}: spec not nonnegative"))?;
        let report = sweep_with(&spec, 6, &q(1, 1000), &opts).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(report.values.len() == 7, || format!("seed {seed}: stopped early"))?;
        ensure(nondecreasing(&report.values), || format!("seed {seed}: values {:?}", strings(&report.values)))?;
        // sigma^1: optimal in G_N for the first N with v_N > v_6 - 1/4.
        let target = report.final_value() - &q(1, 4);
        let n = report.values.iter().position(|v| v > &target).expect("v_6 qualifies");
        let eps = secure_from(&spec, &report, n, &opts).map_err(|e| e.to_string())?;
        let guarantees =
            maximizer_guarantees(&spec, &eps.sigma1, 0..=6, Truncation::Standard).map_err(|e| e.to_string())?;
        ensure(nondecreasing(&guarantees), || format!("seed {seed}: sigma1 guarantees {:?}", strings(&guarantees)))?;
        ensure(guarantees[n..].iter().all(|g| g >= &report.values[n]), || {
            format!("seed {seed}: sigma1 drops below v_{n} = {}", report.values[n])
        })?;
        ensure(nondecreasing(&report.maximizer.guarantees), || format!("seed {seed}: final-horizon table"))?;
        out.push(json!({ "seed": seed, "values": strings(&report.values), "N": n, "guarantees": strings(&guarantees) }));
    }
    Ok(Value::Array(out))
}

fn counterexample_closed_forms() -> Check {
    let mut out = Vec::new();
    for (p, a) in [(q(1, 2), q(3, 1)), (q(1, 4), q(5, 1)), (q(2, 3), q(2, 1))] {
        let one = Rational::one();
        let lower = &p - &(&(&one - &p) / &a);
        let gap = &(&one - &p) / &a;
        let mut values = Vec::new();
        for n in 0..=6 {
            let params = CounterexampleParams::new(p.clone(), a.clone(), n).map_err(|e| e.to_string())?;
            let game = truncate_spec(&build_counterexample(&params).map_err(|e| e.to_string())?, n)
                .map_err(|e| e.to_string())?;
            let v = solve_zero_sum(&game).map_err(|e| e.to_string())?.value;
            if n >= 1 {
                let never = never_stop_minimizer(&params).map_err(|e| e.to_string())?;
                let up = best_response_value(&game, &never, Goal::Maximize).map_err(|e| e.to_string())?.value;
                ensure(up == p, || format!("p={p} A={a} n={n}: reply to never-stop is {up}, expected {p}"))?;
                let secure = claim2_maximizer_strategy(&params).map_err(|e| e.to_string())?;
                let low = best_response_value(&game, &secure, Goal::Minimize).map_err(|e| e.to_string())?.value;
                ensure(low == lower, || format!("p={p} A={a} n={n}: secure strategy yields {low}, expected {lower}"))?;
                ensure(lower <= v && v <= p, || format!("p={p} A={a}: v_{n} = {v} outside [{lower}, {p}]"))?;
            }
            values.push(v.to_string());
        }
        let params = CounterexampleParams::new(p.clone(), a.clone(), 6).map_err(|e| e.to_string())?;
        let bounds = counterexample_bounds(&params);
        let witness = no_value_witness(&params).map_err(|e| e.to_string())?;
        ensure(bounds.gap == gap && witness.gap == gap, || format!("p={p} A={a}: gap {} / {}", bounds.gap, witness.gap))?;
        out.push(json!({ "p": p, "A": a, "values": values, "gap": witness.gap }));
    }
    Ok(Value::Array(out))
}

/// The displayed sum, computed from the stopping distribution alone.
fn claim1_formula(p: &Rational, a: &Rational, n: usize, stops: &StopDistribution) -> Rational {
    let one = Rational::one();
    let before: Rational = stops.sigma.iter().filter(|(k, _)| *k <= n).map(|(_, s)| s.clone()).sum();
    let all: Rational = stops.sigma.iter().map(|(_, s)| s.clone()).sum();
    let reached = &stops.tail_after(n) + &stops.never;
    &(&(p * &(&before * a)) + &(p * &reached)) - &(&(&one - p) * &all)
}

fn claim1_reply() -> Check {
    use rand::{Rng, SeedableRng};
    let params = CounterexampleParams::new(q(1, 2), q(3, 1), 12).map_err(|e| e.to_string())?;
    let eps = q(1, 10);
    let mut out = Vec::new();
    for seed in 0..10u64 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let len = rng.gen_range(1..=4);
        let stops: Vec<Rational> = (0..len).map(|_| q(rng.gen_range(0..=4), 4)).collect();
        let minimizer = minimizer_from_stop_probabilities(&params, &stops).map_err(|e| e.to_string())?;
        let reply = claim1_best_reply(&minimizer, &eps, &params).map_err(|e| format!("seed {seed}: {e}"))?;
        // Independent distribution straight from the conditional stop probabilities.
        let mut alive = Rational::one();
        let mut sigma = Vec::new();
        for (j, s) in stops.iter().enumerate() {
            if s.is_positive() {
                sigma.push((2 * j + 2, &alive * s));
            }
            alive = &alive * &(&Rational::one() - s);
        }
        let dist = StopDistribution { sigma, never: alive };
        ensure(dist == reply.stops, || format!("seed {seed}: stopping distribution {:?}", reply.stops))?;
        let formula = claim1_formula(&params.p, &params.a, reply.n, &dist);
        ensure(formula == reply.guarantee, || format!("seed {seed}: formula {formula} vs payoff {}", reply.guarantee))?;
        ensure(reply.guarantee >= &params.p - &eps, || format!("seed {seed}: {} < p - eps", reply.guarantee))?;
        out.push(json!({ "seed": seed, "stops": stops, "N": reply.n, "payoff": reply.guarantee }));
    }
    Ok(Value::Array(out))
}

/// Nature picks `l` or `r`; the Maximizer sees a step-density signal,
/// then both guess the state.
fn density_game() -> GameSpec {
    let mut b = SpecBuilder::new();
    b.state("s", &["go"], &["go"]);
    for s in ["l", "r"] {
        b.state(s, &["gl", "gr"], &["c", "d"]);
    }
    b.initial_state("s");
    let model = |m: &str| SignalRef::Model { model: m.into() };
    b.transition_raw(
        "s",
        "go",
        "go",
        vec![
            Outcome { prob: q(1, 2), next: "l".into(), s1: model("lo"), s2: SignalRef::label("-") },
            Outcome { prob: q(1, 2), next: "r".into(), s1: model("hi"), s2: SignalRef::label("-") },
        ],
    );
    for s in ["l", "r"] {
        for x in ["gl", "gr"] {
            for y in ["c", "d"] {
                b.goto(s, x, y, s, "-", "-");
            }
        }
    }
    b.payoff("l", "gl", "c", q(1, 1)).payoff("l", "gl", "d", q(1, 2));
    b.payoff("r", "gr", "d", q(1, 1)).payoff("r", "gr", "c", q(1, 2));
    b.flags(true, None);
    let mut spec = b.build();
    let steps = |hs: [Rational; 4]| SignalModel::Density {
        pieces: hs
            .into_iter()
            .enumerate()
            .map(|(i, height)| Piece { from: q(i as i64, 4), to: q(i as i64 + 1, 4), height })
            .collect(),
    };
    spec.signals.insert("lo".into(), steps([q(13, 10), q(127, 100), q(73, 100), q(7, 10)]));
    spec.signals.insert("hi".into(), steps([q(7, 10), q(73, 100), q(127, 100), q(13, 10)]));
    spec
}

fn discretization() -> Check {
    let spec = density_game();
    let eps = q(1, 4);
    let exact = refine_exact(&spec, 2).map_err(|e| e.to_string())?;
    let v_exact = solve_zero_sum(&truncate_spec(&exact, 2).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?.value;
    let d = approximate_signals(&spec, &eps, &DiscretizeOptions::new(2)).map_err(|e| e.to_string())?;
    let v_approx =
        solve_zero_sum(&truncate_spec(&d.spec, 2).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?.value;
    ensure((&v_exact - &v_approx).abs() <= eps, || format!("v_2 {v_exact} vs discretized {v_approx}"))?;

    // Independent TV: stage-1 grid is eps / (per-stage bound 1 * 2 stages) / 2.
    let grid = q(1, 16);
    let stage1 = &d.certificate.stages[0];
    ensure(stage1.grid == grid, || format!("grid {}", stage1.grid))?;
    let densities: BTreeMap<&str, Vec<Rational>> = spec
        .signals
        .iter()
        .map(|(name, m)| match m {
            SignalModel::Density { pieces } => (name.as_str(), pieces.iter().map(|p| p.height.clone()).collect()),
            _ => unreachable!(),
        })
        .collect();
    let mean: Vec<Rational> =
        (0..4).map(|j| &(&densities["lo"][j] + &densities["hi"][j]) / &q(2, 1)).collect();
    let label_of = |j: usize| -> String {
        let v: Vec<String> = ["hi", "lo"]
            .iter()
            .map(|m| {
                let r = &densities[*m][j] / &mean[j];
                r.floor_to_multiple(&grid).to_string()
            })
            .collect();
        format!("({})", v.join(","))
    };
    // Cell probabilities as written into the finite game, per class.
    let mut cell_prob: BTreeMap<(String, String), Rational> = BTreeMap::new();
    for t in d.spec.transitions.iter().filter(|t| t.state.starts_with("s@")) {
        for o in &t.outcomes {
            let class = if o.next.starts_with("l@") { "lo" } else { "hi" };
            let SignalRef::Label(label) = &o.s1 else { return Err("model left in finite game".into()) };
            *cell_prob.entry((class.to_string(), label.clone())).or_default() += &(&o.prob * &q(2, 1));
        }
    }
    let len = q(1, 4);
    let mut worst = Rational::zero();
    let mut per_class = BTreeMap::new();
    for class in ["lo", "hi"] {
        let mut tv = Rational::zero();
        for j in 0..4 {
            let label = label_of(j);
            let cell_mass: Rational = (0..4).filter(|&k| label_of(k) == label).map(|k| &mean[k] * &len).sum();
            let pe = cell_prob.get(&(class.to_string(), label.clone())).cloned().unwrap_or_default();
            let approx = &(&pe / &cell_mass) * &mean[j];
            tv += &(&(&densities[class][j] - &approx).abs() * &len);
        }
        let tv = &tv / &q(2, 1);
        let cert = stage1.players[0].tv.get(&format!("model:{class}")).cloned().unwrap_or_default();
        ensure(cert == tv, || format!("class {class}: certificate {cert} vs integrated {tv}"))?;
        worst = worst.max(tv.clone());
        per_class.insert(class, tv);
    }
    ensure(d.certificate.total_tv == worst, || format!("total {} vs {worst}", d.certificate.total_tv))?;
    ensure(worst <= eps, || format!("summed TV {worst} > {eps}"))?;
    ensure(worst.is_positive(), || "expected a lossy rounding".into())?;
    Ok(json!({ "v_exact": v_exact, "v_approx": v_approx, "tv": per_class, "certificate": d.certificate }))
}

fn kuhn_round_trip() -> Check {
    let mut out = Vec::new();
    for seed in 0..20 {
        let spec = random_spec(&RandomSpecParams::oracle_scale(), 1000 + seed);
        let game = truncate_spec(&spec, 1 + (seed as usize % 3)).map_err(|e| e.to_string())?;
        let sol = solve_zero_sum(&game).map_err(|e| e.to_string())?;
        for (plan, player) in [(&sol.plan1, Player::Max), (&sol.plan2, Player::Min)] {
            let behavioral = plan_to_behavioral(&game, plan);
            let again = behavioral_to_plan(&game, &behavioral).map_err(|e| e.to_string())?;
            for (p, ws) in plan.weights.iter().enumerate() {
                for (k, w) in ws.iter().enumerate() {
                    ensure(!w.is_positive() || &again.weights[p][k] == w, || {
                        format!("seed {seed}: {player} sequence ({p},{k}) {w} -> {}", again.weights[p][k])
                    })?;
                }
            }
            let goal = Goal::of(player.opponent());
            let br = best_response_value(&game, &behavioral, goal).map_err(|e| e.to_string())?.value;
            ensure(br == sol.value, || format!("seed {seed}: {player} strategy secures {br}, value {}", sol.value))?;
        }
        let profile = Profile::new(sol.maximizer(&game), sol.minimizer(&game)).map_err(|e| e.to_string())?;
        let payoff = expected_payoff(&game, &profile).map_err(|e| e.to_string())?;
        ensure(payoff == sol.value, || format!("seed {seed}: equilibrium payoff {payoff}"))?;
        out.push(sol.value.to_string());
    }
    Ok(json!({ "values": out }))
}

fn leavable() -> Check {
    let constant = constant_payoff_spec();
    let mut ones = Vec::new();
    for n in 0..=5 {
        let g = build_leavable_truncation(&constant, n).map_err(|e| e.to_string())?;
        let v = solve_zero_sum(&g).map_err(|e| e.to_string())?.value;
        ensure(v == Rational::from_integer(n as i64), || format!("constant payoff: val(L_{n}) = {v}"))?;
        ones.push(v);
    }
    let coin = hidden_coin_spec(7);
    let mut values = Vec::new();
    for n in 0..=5 {
        let g = build_leavable_truncation(&coin, n).map_err(|e| e.to_string())?;
        let v = solve_zero_sum(&g).map_err(|e| e.to_string())?.value;
        let brute = brute_force_oracle(&g, DEFAULT_ORACLE_BUDGET).map_err(|e| e.to_string())?;
        ensure(v == brute, || format!("hidden coin: val(L_{n}) = {v} but oracle {brute}"))?;
        values.push(v);
    }
    ensure(nondecreasing(&values), || format!("hidden coin values {:?}", strings(&values)))?;
    Ok(json!({ "constant": strings(&ones), "hidden_coin": strings(&values) }))
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Check,
}

const CRITERIA: &[Criterion] = &[
    Criterion { id: 1, name: "oracle equivalence", budget: Duration::from_secs(60), run: oracle_equivalence },
    Criterion { id: 2, name: "monotone values and guarantees", budget: Duration::from_secs(120), run: monotonicity },
    Criterion { id: 3, name: "no-value game closed forms", budget: Duration::from_secs(60), run: counterexample_closed_forms },
    Criterion { id: 4, name: "stopping reply formula", budget: Duration::from_secs(30), run: claim1_reply },
    Criterion { id: 5, name: "signal discretization", budget: Duration::from_secs(60), run: discretization },
    Criterion { id: 6, name: "plan/behavioral round trip", budget: Duration::from_secs(30), run: kuhn_round_trip },
    Criterion { id: 7, name: "leavable truncations", budget: Duration::from_secs(30), run: leavable },
];

/// Runs every criterion once; returns the PASS/FAIL lines and the JSON record.
fn run_suite() -> (Vec<(u32, bool, String)>, String) {
    let mut lines = Vec::new();
    let mut record = serde_json::Map::new();
    for c in CRITERIA {
        let start = Instant::now();
        let result = (c.run)();
        let took = start.elapsed();
        let (ok, detail) = match result {
            Ok(v) => {
                record.insert(format!("criterion_{}", c.id), v);
                if took <= c.budget {
                    (true, format!("{:.2}s (budget {}s)", took.as_secs_f64(), c.budget.as_secs()))
                } else {
                    (false, format!("correct but took {:.2}s, over {}s", took.as_secs_f64(), c.budget.as_secs()))
                }
            }
            Err(e) => {
                record.insert(format!("criterion_{}", c.id), Value::String(format!("error: {e}")));
                (false, e)
            }
        };
        lines.push((c.id, ok, format!("criterion {}: {} — {}", c.id, c.name, detail)));
    }
    (lines, serde_json::to_string_pretty(&Value::Object(record)).expect("json"))
}

#[test]
fn acceptance() {
    let (lines, first) = run_suite();
    if std::env::var("ACCEPTANCE_DUMP").is_ok() {
        println!("{first}");
    }
    let (_, second) = run_suite();
    let mut all_ok = true;
    for (_, ok, line) in &lines {
        println!("[{}] {line}", if *ok { "PASS" } else { "FAIL" });
        all_ok &= ok;
    }
    let same = first == second;
    println!(
        "[{}] criterion 8: determinism — two full runs {} byte-identical JSON ({} bytes)",
        if same { "PASS" } else { "FAIL" },
        if same { "produced" } else { "did not produce" },
        first.len()
    );
    all_ok &= same;
    assert!(all_ok, "some acceptance criteria failed");
}
