use std::process::ExitCode;

use clap::Parser;
use contact_caustic::cli::{run, Cli};

fn main() -> ExitCode {
    run(Cli::parse())
}
