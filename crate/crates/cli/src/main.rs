use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use fieldkernel_cli::{execute, write_report, Cli, CliError};

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("FIELDKERNEL_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| CliError::Usage(format!("FIELDKERNEL_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Usage(e.to_string()))
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.record());
    ExitCode::from(e.exit_code())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return fail(&CliError::Usage(e.kind().to_string()));
        }
    };
    if let Err(e) = configure_threads() {
        return fail(&e);
    }
    match execute(&cli).and_then(|r| write_report(&r, &cli.common).map(|_| r.passed)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => fail(&e),
    }
}
