//! Continuous signals: a state is revealed through a step density. The exact
//! interval refinement and the epsilon-approximation are both finite games;
//! the certificate bounds how far their values can drift.

use pegame::discretize::{approximate_signals, refine_exact, DiscretizeOptions, Piece, SignalModel};
use pegame::game::builder::SpecBuilder;
use pegame::game::spec::{Outcome, SignalRef};
use pegame::solver::solve_zero_sum;
use pegame::unfold::truncate_spec;
use pegame::{GameSpec, Rational};

fn sensor_game() -> GameSpec {
    let q = Rational::new;
    let mut b = SpecBuilder::new();
    b.state("start", &["go"], &["go"]);
    for s in ["near", "far"] {
        b.state(s, &["strike", "wait"], &["watch"]);
    }
    b.initial_state("start");
    let reading = |m: &str| SignalRef::Model { model: m.into() };
    b.transition_raw(
        "start",
        "go",
        "go",
        vec![
            Outcome { prob: q(2, 5), next: "near".into(), s1: reading("near-reading"), s2: SignalRef::label("-") },
            Outcome { prob: q(3, 5), next: "far".into(), s1: reading("far-reading"), s2: SignalRef::label("-") },
        ],
    );
    for s in ["near", "far"] {
        for x in ["strike", "wait"] {
            b.goto(s, x, "watch", s, "-", "-");
        }
    }
    // Striking pays only when the target is near, waiting only when it is far.
    b.payoff("near", "strike", "watch", q(1, 1)).payoff("far", "wait", "watch", q(1, 1));
    b.flags(true, None);
    let mut spec = b.build();
    // Twenty slowly varying pieces: coarse grids merge neighbouring readings.
    let steps = |height: &dyn Fn(i64) -> i64| SignalModel::Density {
        pieces: (0..20).map(|i| Piece { from: q(i, 20), to: q(i + 1, 20), height: q(height(i), 40) }).collect(),
    };
    spec.signals.insert("near-reading".into(), steps(&|i| 59 - 2 * i));
    spec.signals.insert("far-reading".into(), steps(&|i| 21 + 2 * i));
    spec
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = sensor_game();
    let exact = refine_exact(&spec, 3)?;
    let v = solve_zero_sum(&truncate_spec(&exact, 3)?)?.value;
    println!("exact refinement: v_3 = {v}");
    for k in 1..=4 {
        let eps = Rational::new(1, 1 << k);
        let d = approximate_signals(&spec, &eps, &DiscretizeOptions::new(3))?;
        let w = solve_zero_sum(&truncate_spec(&d.spec, 3)?)?.value;
        let sizes: Vec<usize> = d.certificate.stages.iter().map(|s| s.players[0].alphabet_size).collect();
        println!(
            "eps = {eps}: v_3 = {w}, |diff| = {}, certified <= {}, alphabet sizes {sizes:?}",
            (&v - &w).abs(),
            d.certificate.payoff_error_bound
        );
    }
    Ok(())
}
