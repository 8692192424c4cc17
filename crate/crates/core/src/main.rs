use clap::Parser;
use nerve_orbits::cli::{self, Cli};

fn main() {
    let args = Cli::parse();
    std::process::exit(cli::run(&args));
}
