use clap::Parser;

use onetree::cli::{execute, Cli};

fn main() {
    std::process::exit(execute(Cli::parse()));
}
