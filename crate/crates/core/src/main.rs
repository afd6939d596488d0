use clap::Parser;
use screenest::cli::{init_threads, run, Cli};

fn main() {
    let cli = Cli::parse();
    init_threads();
    let code = run(&cli, &mut std::io::stdout());
    std::process::exit(code);
}
