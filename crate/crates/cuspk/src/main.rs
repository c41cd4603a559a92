use clap::Parser;

use cuspk::cli::{self, Cli};
use cuspk::Error;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests are not errors
            if e.use_stderr() {
                eprint!("{e}");
                std::process::exit(cli::EXIT_USAGE_OR_RESOURCE);
            }
            print!("{e}");
            std::process::exit(cli::EXIT_OK);
        }
    };
    if let Some(n) = cli.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .ok();
    }
    let json = cli.global.format == "json";
    match cli::run_command(&cli) {
        Ok(outcome) => {
            print!("{}", cli::render(&outcome, json));
            std::process::exit(outcome.exit);
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Disagreement(_) => cli::EXIT_DISAGREEMENT,
                _ => cli::EXIT_USAGE_OR_RESOURCE,
            };
            std::process::exit(code);
        }
    }
}
