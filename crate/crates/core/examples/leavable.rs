//! Leavable truncations: the Maximizer may stop at any stage and must stop by
//! stage n. Their values never decrease and approach the same limit as the
//! plain truncations in nonnegative games.

use pegame::leavable::build_leavable_truncation;
use pegame::random::{random_spec, RandomSpecParams};
use pegame::solver::solve_zero_sum;
use pegame::unfold::truncate_spec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = random_spec(&RandomSpecParams::sweep_scale(), 7);
    println!(" n  G_n          L_n");
    for n in 0..=6 {
        let g = solve_zero_sum(&truncate_spec(&spec, n)?)?.value;
        let l = solve_zero_sum(&build_leavable_truncation(&spec, n)?)?.value;
        println!("{n:>2}  {:<12} {l}", g.to_string());
    }
    Ok(())
}
