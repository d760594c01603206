use std::fs::File;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use m1poly::cli::{run, Cli, Format};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let mut out: Box<dyn Write> = match &cli.out {
        Some(path) => match File::create(path) {
            Ok(f) => Box::new(f),
            Err(e) => {
                eprintln!("error: cannot create {}: {e}", path.display());
                return ExitCode::from(2);
            }
        },
        None => Box::new(std::io::stdout().lock()),
    };
    let written = match cli.format {
        Format::Json => report.to_json().and_then(|s| {
            writeln!(out, "{s}")
                .map_err(|e| m1poly::Error::Parameter(format!("cannot write report: {e}")))
        }),
        Format::Csv => report.write_csv(&mut out),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
