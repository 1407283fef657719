mod options;

use std::process::ExitCode;

use clap::Parser;
use paritynet::sweep::{self, ORACLE_THRESHOLD};
use paritynet::{Error, Execution};

use options::{resolve, Cli, Command, Mode, OptionsError};

const EXIT_VALIDATION: u8 = 2;
const EXIT_ORACLE: u8 = 3;
const EXIT_IO: u8 = 4;
const EXIT_NUMERICAL: u8 = 1;

fn library_exit(e: &Error) -> u8 {
    match e {
        Error::Domain(_) => EXIT_VALIDATION,
        Error::Io { .. } | Error::Serialize(_) => EXIT_IO,
        Error::Numerical(_) => EXIT_NUMERICAL,
    }
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn oracle_line(dev: Option<f64>) -> Option<bool> {
    dev.map(|d| {
        let ok = d <= ORACLE_THRESHOLD;
        eprintln!(
            "oracle max deviation {d:.3e} (threshold {ORACLE_THRESHOLD:.0e}) {}",
            if ok { "PASS" } else { "FAIL" }
        );
        ok
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (flags, mode) = match &cli.command {
        Command::Run(f) => (f, Mode::Run),
        Command::Sweep(f) => (f, Mode::Sweep),
        Command::Verify(f) => (f, Mode::Verify),
    };
    let config = match resolve(flags, mode) {
        Ok(c) => c,
        Err(e @ OptionsError::Io(..)) => return fail(EXIT_IO, e),
        Err(e) => return fail(EXIT_VALIDATION, e),
    };

    match mode {
        Mode::Run => match sweep::run(&config) {
            Ok(series) => {
                eprintln!(
                    "wrote {} samples to {} (peak concurrence {:.6})",
                    series.records.len(),
                    config.output_path.display(),
                    series.peak_concurrence()
                );
                if oracle_line(series.metadata.oracle_max_deviation) == Some(false) {
                    return ExitCode::from(EXIT_ORACLE);
                }
                ExitCode::SUCCESS
            }
            Err(e) => fail(library_exit(&e), e),
        },
        Mode::Sweep => {
            let exec = if flags.sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            };
            match sweep::sweep(&config, exec) {
                Ok(points) => {
                    let mut oracle_ok = true;
                    for (path, series) in &points {
                        eprintln!("{} peak {:.6}", path.display(), series.peak_concurrence());
                        oracle_ok &=
                            oracle_line(series.metadata.oracle_max_deviation) != Some(false);
                    }
                    if oracle_ok {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(EXIT_ORACLE)
                    }
                }
                Err(e) => fail(library_exit(&e), e),
            }
        }
        Mode::Verify => match sweep::verify(&config) {
            Ok(report) => {
                println!("{report}");
                if report.passed() {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(EXIT_ORACLE)
                }
            }
            Err(e) => fail(library_exit(&e), e),
        },
    }
}
