use proptest::prelude::*;

use pegame::discretize::{approximate_signals, refine_exact, DiscretizeOptions, Piece, SignalModel};
use pegame::eval::{best_response_value, expected_payoff, simulate_game, Goal};
use pegame::game::builder::SpecBuilder;
use pegame::game::spec::{GameSpec, Outcome, SignalRef};
use pegame::random::{random_spec, RandomSpecParams};
use pegame::solver::{behavioral_to_plan, brute_force_oracle, matrix_game_value, solve_zero_sum};
use pegame::unfold::truncate_spec;
use pegame::{BehavioralStrategy, Player, Profile, Rational};

fn rational() -> impl Strategy<Value = Rational> {
    (-50i64..50, 1i64..20).prop_map(|(n, d)| Rational::new(n, d))
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn rational_field_laws(a in rational(), b in rational(), c in rational()) {
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        if !b.is_zero() {
            prop_assert_eq!(&(&a / &b) * &b, a.clone());
        }
        prop_assert_eq!(a < b, a.to_f64() < b.to_f64());
        prop_assert_eq!(a.to_string().parse::<Rational>().unwrap(), a);
    }

    #[test]
    fn rational_promotes_without_loss(n in 1i64..i64::MAX, d in 1i64..i64::MAX) {
        let x = Rational::new(n, d);
        let big = &(&x * &x) * &x;
        prop_assert_eq!(&(&big / &x) / &x, x.clone());
        prop_assert_eq!(serde_json::from_str::<Rational>(&serde_json::to_string(&big).unwrap()).unwrap(), big);
    }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn matrix_game_duality(rows in 1usize..4, cols in 1usize..4, entries in prop::collection::vec(-6i64..7, 16)) {
        let m: Vec<Vec<Rational>> =
            (0..rows).map(|i| (0..cols).map(|j| Rational::from_integer(entries[i * 4 + j])).collect()).collect();
        let neg_t: Vec<Vec<Rational>> = (0..cols).map(|j| (0..rows).map(|i| -&m[i][j]).collect()).collect();
        let v = matrix_game_value(&m).unwrap();
        prop_assert_eq!(&v, &-matrix_game_value(&neg_t).unwrap());
        let maxmin = m.iter().map(|r| r.iter().min().unwrap().clone()).max().unwrap();
        let minmax = (0..cols).map(|j| m.iter().map(|r| r[j].clone()).max().unwrap()).min().unwrap();
        prop_assert!(maxmin <= v && v <= minmax);
    }

    #[test]
    fn solver_matches_oracle_and_best_responses(seed in 0u64..10_000, horizon in 0usize..3) {
        let game = truncate_spec(&random_spec(&RandomSpecParams::oracle_scale(), seed), horizon).unwrap();
        let sol = solve_zero_sum(&game).unwrap();
        prop_assert_eq!(&brute_force_oracle(&game, 10_000).unwrap(), &sol.value);
        let s1 = sol.maximizer(&game);
        let s2 = sol.minimizer(&game);
        prop_assert_eq!(&best_response_value(&game, &s1, Goal::Minimize).unwrap().value, &sol.value);
        prop_assert_eq!(&best_response_value(&game, &s2, Goal::Maximize).unwrap().value, &sol.value);
        prop_assert!(sol.plan1.flow_violations(&game).is_empty());
        prop_assert!(sol.plan2.flow_violations(&game).is_empty());
    }

    #[test]
    fn nonnegative_values_are_monotone(seed in 0u64..10_000) {
        let spec = random_spec(&RandomSpecParams::sweep_scale(), seed);
        let values: Vec<Rational> =
            (0..5).map(|n| solve_zero_sum(&truncate_spec(&spec, n).unwrap()).unwrap().value).collect();
        prop_assert!(values[0].is_zero());
        prop_assert!(values.windows(2).all(|w| w[0] <= w[1]), "{:?}", values);
    }

    #[test]
    fn uniform_profile_bracketed_by_best_responses(seed in 0u64..10_000, horizon in 1usize..4) {
        let game = truncate_spec(&random_spec(&RandomSpecParams::oracle_scale(), seed), horizon).unwrap();
        let s1 = BehavioralStrategy::uniform(&game, Player::Max);
        let s2 = BehavioralStrategy::uniform(&game, Player::Min);
        prop_assert!(behavioral_to_plan(&game, &s1).unwrap().flow_violations(&game).is_empty());
        let payoff = expected_payoff(&game, &Profile::new(s1.clone(), s2.clone()).unwrap()).unwrap();
        let low = best_response_value(&game, &s1, Goal::Minimize).unwrap().value;
        let high = best_response_value(&game, &s2, Goal::Maximize).unwrap().value;
        prop_assert!(low <= payoff && payoff <= high);
    }

    #[test]
    fn spec_json_round_trip(seed in 0u64..10_000) {
        let spec = random_spec(&RandomSpecParams::oracle_scale(), seed);
        prop_assert_eq!(GameSpec::from_json(&spec.to_json()).unwrap(), spec);
    }
}

/// Two step densities on `k` equal pieces, built from positive weights.
fn density_pair(k: usize, w1: &[i64], w2: &[i64]) -> GameSpec {
    let mut b = SpecBuilder::new();
    b.state("s", &["go"], &["go"]);
    for s in ["l", "r"] {
        b.state(s, &["x", "y"], &["go"]);
    }
    b.initial_state("s");
    let model = |m: &str| SignalRef::Model { model: m.into() };
    b.transition_raw(
        "s",
        "go",
        "go",
        vec![
            Outcome { prob: Rational::new(1, 3), next: "l".into(), s1: model("f"), s2: SignalRef::label("-") },
            Outcome { prob: Rational::new(2, 3), next: "r".into(), s1: model("g"), s2: SignalRef::label("-") },
        ],
    );
    for s in ["l", "r"] {
        for a in ["x", "y"] {
            b.goto(s, a, "go", s, "-", "-");
        }
    }
    b.payoff("l", "x", "go", Rational::one()).payoff("r", "y", "go", Rational::new(1, 2));
    b.flags(true, None);
    let mut spec = b.build();
    let steps = |w: &[i64]| {
        let total: i64 = w[..k].iter().sum();
        SignalModel::Density {
            pieces: (0..k)
                .map(|i| Piece {
                    from: Rational::new(i as i64, k as i64),
                    to: Rational::new(i as i64 + 1, k as i64),
                    height: Rational::new(w[i] * k as i64, total),
                })
                .collect(),
        }
    };
    spec.signals.insert("f".into(), steps(w1));
    spec.signals.insert("g".into(), steps(w2));
    spec
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn discretization_stays_within_budget(
        k in 1usize..6,
        w1 in prop::collection::vec(1i64..20, 6),
        w2 in prop::collection::vec(1i64..20, 6),
        e in 1i64..4,
    ) {
        let spec = density_pair(k, &w1, &w2);
        let eps = Rational::new(1, 1 << e);
        let d = approximate_signals(&spec, &eps, &DiscretizeOptions::new(2)).unwrap();
        prop_assert!(d.spec.validate().is_empty());
        prop_assert!(d.certificate.total_tv <= d.certificate.scaled_epsilon);
        prop_assert!(d.certificate.payoff_error_bound <= eps);
        let exact = refine_exact(&spec, 2).unwrap();
        let v = solve_zero_sum(&truncate_spec(&exact, 2).unwrap()).unwrap().value;
        let w = solve_zero_sum(&truncate_spec(&d.spec, 2).unwrap()).unwrap().value;
        prop_assert!((&v - &w).abs() <= eps);
        // Coarsening the signal can only hurt the informed player.
        prop_assert!(w <= v);
    }

    #[test]
    fn simulation_is_seeded_and_consistent(seed in 0u64..1000) {
        let game = truncate_spec(&random_spec(&RandomSpecParams::oracle_scale(), seed), 3).unwrap();
        let profile = Profile::new(
            BehavioralStrategy::uniform(&game, Player::Max),
            BehavioralStrategy::uniform(&game, Player::Min),
        ).unwrap();
        let a = simulate_game(&game, &profile, seed, 2000).unwrap();
        prop_assert_eq!(a, simulate_game(&game, &profile, seed, 2000).unwrap());
        let exact = expected_payoff(&game, &profile).unwrap().to_f64();
        prop_assert!((a.mean - exact).abs() <= 6.0 * a.stderr + 1e-9, "{} vs {}", a.mean, exact);
    }
}
