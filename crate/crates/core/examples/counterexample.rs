//! The two-type stopping game: the Maximizer's best secure payoff stays
//! below what it could get once the Minimizer's strategy is known, so the
//! infinite game has no value, although every truncation does.

use pegame::instances::{
    claim1_best_reply, counterexample_bounds, minimizer_from_stop_probabilities, no_value_witness,
    CounterexampleParams,
};
use pegame::Rational;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = CounterexampleParams::new(Rational::new(1, 2), Rational::from_integer(3), 8)?;
    let b = counterexample_bounds(&params);
    println!("upper value {}, lower value {}, gap {}", b.upper, b.lower, b.gap);

    let w = no_value_witness(&params)?;
    println!(
        "certified on {} stages: secure strategy gets {}, reply to a never-stopping Minimizer gets {}",
        w.horizon, w.lower_certificate, w.upper_certificate
    );

    // Whatever the Minimizer commits to, the Maximizer gets within epsilon of p.
    let minimizer = minimizer_from_stop_probabilities(
        &params,
        &[Rational::new(1, 4), Rational::new(1, 3), Rational::new(1, 2)],
    )?;
    let reply = claim1_best_reply(&minimizer, &Rational::new(1, 20), &params)?;
    println!("reply stops at stage {} and earns {}", reply.n, reply.guarantee);
    Ok(())
}
