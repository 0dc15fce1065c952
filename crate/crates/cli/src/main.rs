mod args;
mod run;

use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use args::Cli;

const EXIT_INPUT: u8 = 2;
const EXIT_ANOMALY: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            return fail(EXIT_INPUT, "usage", &e.to_string());
        }
    };
    match run::run(&cli) {
        Ok(run::Outcome::Done(path)) => {
            println!("{}", path.display());
            ExitCode::SUCCESS
        }
        Ok(run::Outcome::Anomaly { report, message }) => {
            eprintln!("{}", json!({ "error": { "kind": "anomaly", "message": message, "report": report } }));
            ExitCode::from(EXIT_ANOMALY)
        }
        Err(e) => fail(EXIT_INPUT, e.kind(), &e.to_string()),
    }
}

fn fail(code: u8, kind: &str, message: &str) -> ExitCode {
    eprintln!("{}", json!({ "error": { "kind": kind, "message": message.trim_end() } }));
    ExitCode::from(code)
}
