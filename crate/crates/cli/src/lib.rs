//! Command-line front end: instance creation, stream generation, the test
//! batteries and self-checks.

pub mod args;
pub mod commands;
pub mod error;
pub mod manifest;
pub mod report;
pub mod selftest;

use args::{Cli, Command, PufCommand, ReportCommand};
pub use error::{exit, CliError, CliResult};

/// Environment variable capping the battery's worker threads.
pub const THREADS_ENV: &str = "PUF_TRNG_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => exit::PASS,
            Verdict::Fail => exit::FAIL,
        }
    }
}

/// Sizes the global rayon pool from `PUF_TRNG_THREADS`, if set.
pub fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            CliError::Usage(format!(
                "{THREADS_ENV} must be a positive integer, got {value:?}"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

pub fn run(cli: &Cli) -> CliResult<Verdict> {
    match &cli.command {
        Command::Puf {
            action: PufCommand::New(a),
        } => commands::puf_new(a),
        Command::Generate(a) => commands::generate(a),
        Command::Test(a) => commands::test(a),
        Command::Selftest(a) => commands::selftest(a),
        Command::Report {
            action: ReportCommand::Show { path },
        } => commands::report_show(path),
    }
}
