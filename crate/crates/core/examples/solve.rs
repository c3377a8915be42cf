//! Solve one truncation exactly and cross-check with pure-strategy enumeration.
//!
//!     cargo run --example solve                      # built-in inspection game
//!     cargo run --example solve -- game.json 3       # any game file, horizon 3

use pegame::game::builder::SpecBuilder;
use pegame::solver::{brute_force_oracle, solve_zero_sum, DEFAULT_ORACLE_BUDGET};
use pegame::unfold::truncate_spec;
use pegame::{GameSpec, Rational};

/// A smuggler (Maximizer) picks a route each night; the inspector guards one.
/// An unguarded crossing pays 1 on the north route and 2 on the south one.
/// The inspector only learns, noisily, which route was used the night before.
fn inspection() -> GameSpec {
    let mut b = SpecBuilder::new();
    b.state("night", &["north", "south"], &["guard-n", "guard-s"]).initial_state("night");
    for (route, guard, pay) in [("north", "guard-s", 1), ("south", "guard-n", 2)] {
        b.payoff("night", route, guard, Rational::from_integer(pay));
    }
    for route in ["north", "south"] {
        let (seen, other) = if route == "north" { ("saw-n", "saw-s") } else { ("saw-s", "saw-n") };
        for guard in ["guard-n", "guard-s"] {
            b.transition(
                "night",
                route,
                guard,
                &[(Rational::new(3, 4), "night", "-", seen), (Rational::new(1, 4), "night", "-", other)],
            );
        }
    }
    b.flags(true, None);
    b.build()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (spec, horizon) = match args.as_slice() {
        [path, n] => (GameSpec::from_json(&std::fs::read_to_string(path)?)?, n.parse()?),
        _ => (inspection(), 3),
    };
    let game = truncate_spec(&spec, horizon)?;
    let sol = solve_zero_sum(&game)?;
    println!("{} nodes, value of the {horizon}-stage game: {}", game.nodes.len(), sol.value);
    match brute_force_oracle(&game, DEFAULT_ORACLE_BUDGET) {
        Ok(v) => println!("pure-strategy enumeration agrees: {}", v == sol.value),
        Err(e) => println!("enumeration skipped: {e}"),
    }
    println!("Maximizer strategy:\n{}", serde_json::to_string_pretty(&sol.maximizer(&game))?);
    Ok(())
}
