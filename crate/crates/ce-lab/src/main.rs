use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use ce_lab::cli::{out_path, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(output) => {
            let written = match out_path(&cli) {
                Some(path) => std::fs::write(path, &output.text),
                None => std::io::stdout().write_all(output.text.as_bytes()),
            };
            if let Err(err) = written {
                eprintln!("{}", error_record(&err.to_string()));
                return ExitCode::from(2);
            }
            ExitCode::from(output.exit_code as u8)
        }
        Err(err) => {
            eprintln!("{}", error_record(&err.to_string()));
            ExitCode::from(2)
        }
    }
}

fn error_record(message: &str) -> String {
    serde_json::json!({ "error": message }).to_string()
}
