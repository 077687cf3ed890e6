use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = match rsbr::cli::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version print to stdout and succeed; every other
            // parse failure is an ordinary error (exit 1).
            let is_help = !e.use_stderr();
            let _ = e.print();
            return if is_help {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    ExitCode::from(rsbr::cli::run(cli))
}
