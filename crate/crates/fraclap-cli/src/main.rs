use clap::Parser;

use fraclap_cli::commands;
use fraclap_cli::config::Cli;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = commands::dispatch(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
