//! Pursuit on a graph: the game of kind (probability of capture) and the game
//! of degree (expected stages survived), under partial and full observation.
//!
//!     cargo run --example pursuit -- edges.txt      # `u v` per line

use pegame::instances::{build_pursuit_grid, Graph, Observation, PursuitParams, PursuitVariant};
use pegame::solver::solve_zero_sum;
use pegame::unfold::truncate_spec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let graph = match std::env::args().nth(1) {
        Some(path) => Graph::parse_edge_list(&std::fs::read_to_string(path)?)?,
        None => Graph::path(3),
    };
    let last = graph.len() - 1;
    for variant in [PursuitVariant::Kind, PursuitVariant::Degree] {
        for observation in [Observation::OwnPosition, Observation::Full] {
            let spec = build_pursuit_grid(&PursuitParams {
                graph: graph.clone(),
                variant,
                pursuer_start: 0,
                evader_start: last,
                observation,
                horizon_cap: None,
            })?;
            let values: Vec<String> = (0..=3)
                .map(|n| Ok(solve_zero_sum(&truncate_spec(&spec, n)?)?.value.to_string()))
                .collect::<Result<_, Box<dyn std::error::Error>>>()?;
            println!("{variant:?} / {observation:?}: {}", values.join(", "));
        }
    }
    Ok(())
}
