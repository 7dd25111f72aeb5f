//! `euclid-orbits`: classify, normalize and pair the orbits of E(n), SE(n),
//! O(n) and SO(n) from the command line.

mod args;
mod commands;
mod io;

use clap::Parser;

fn main() {
    let cli = args::Cli::parse();
    let result = commands::dispatch(&cli);
    let rendered = match cli.output {
        args::OutputMode::Json => serde_json::to_string(&result),
        args::OutputMode::Pretty => serde_json::to_string_pretty(&result),
    }
    .expect("the result envelope always serializes");
    println!("{rendered}");
    std::process::exit(result.status.exit_code());
}
