//! Evaluate fixed strategies: exact expected payoff, best responses, and a
//! seeded Monte Carlo estimate for comparison.

use pegame::eval::{best_response_value, expected_payoff, simulate_game, Goal};
use pegame::random::{random_spec, RandomSpecParams};
use pegame::solver::solve_zero_sum;
use pegame::unfold::truncate_spec;
use pegame::{BehavioralStrategy, Player, Profile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = random_spec(&RandomSpecParams::oracle_scale(), 11);
    let game = truncate_spec(&spec, 3)?;
    let sol = solve_zero_sum(&game)?;
    let uniform = BehavioralStrategy::uniform(&game, Player::Min);
    let optimal = sol.maximizer(&game);

    let profile = Profile::new(optimal.clone(), uniform.clone())?;
    println!("value {}", sol.value);
    println!("optimal vs uniform: exact {}", expected_payoff(&game, &profile)?);
    let sim = simulate_game(&game, &profile, 42, 20_000)?;
    println!("                    simulated ~{:.4} ± {:.4}", sim.mean, sim.stderr);
    println!("optimal secures     {}", best_response_value(&game, &optimal, Goal::Minimize)?.value);
    println!("uniform concedes    {}", best_response_value(&game, &uniform, Goal::Maximize)?.value);
    Ok(())
}
