use std::io::Write;

use clap::Parser;
use pegame::cli::{run_command, RunConfig};

fn main() {
    let config = RunConfig::parse();
    let outcome = run_command(&config);
    std::io::stdout().write_all(outcome.stdout.as_bytes()).expect("write stdout");
    std::io::stderr().write_all(outcome.stderr.as_bytes()).expect("write stderr");
    std::process::exit(outcome.status);
}
