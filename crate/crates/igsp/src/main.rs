use clap::Parser;

use igsp::cli::{execute, Cli};

fn main() {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(2);
        }
    }
}
