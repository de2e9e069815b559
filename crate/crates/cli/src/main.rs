use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use hazard_cli::{run, Args, Failure};

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let outcome = args
        .into_config()
        .map_err(Failure::Validation)
        .and_then(|cfg| run(&cfg));
    match outcome {
        Ok(w) => {
            eprintln!("wrote {} rows to {}", w.rows, w.path.display());
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("hazard: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
