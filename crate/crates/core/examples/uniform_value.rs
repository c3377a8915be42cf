//! Sweep the truncation values v_0 <= v_1 <= ... of a nonnegative game until
//! they settle, then extract a Maximizer strategy that keeps its guarantee in
//! every longer game.

use pegame::instances::{build_pursuit_grid, Graph, Observation, PursuitParams, PursuitVariant};
use pegame::uniform::{extract_eps_optimal, sweep};
use pegame::Rational;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Pursuer and evader start at opposite ends of a 4-vertex path, each
    // seeing only their own vertex.
    let spec = build_pursuit_grid(&PursuitParams {
        graph: Graph::path(4),
        variant: PursuitVariant::Kind,
        pursuer_start: 0,
        evader_start: 3,
        observation: Observation::OwnPosition,
        horizon_cap: None,
    })?;
    let report = sweep(&spec, 7, &Rational::new(1, 100))?;
    for (n, v) in report.horizons.iter().zip(&report.values) {
        println!("v_{n} = {v} (~{:.4})", v.to_f64());
    }
    println!("plateau reached: {}", report.plateau_reached);
    match extract_eps_optimal(&spec, &report, &Rational::new(1, 10)) {
        Ok(eps) => {
            println!("strategy optimal at N = {} secures {} from then on:", eps.n, eps.guarantee);
            for (n, g) in &eps.certified {
                println!("  val(G_{n}) >= {g}");
            }
        }
        Err(e) => println!("no extraction: {e}"),
    }
    Ok(())
}
