//! Command-line driver for the engine and the tree simulator.
//!
//! Exit codes follow a fixed contract so scripts can branch on outcomes:
//!
//! | code | meaning                                            |
//! |-----:|----------------------------------------------------|
//! |    0 | clean run / verdict holds                          |
//! |    1 | operational error (missing file, parse error, ...) |
//! |    2 | exploration finished and found bugs                |
//! |    3 | a solver exception aborted or degraded the run     |
//! |   64 | command-line usage error                           |

mod commands;

use clap::error::ErrorKind;
use clap::Parser;

use commands::Cli;

pub use commands::run::RunReport;

/// Exit code for a clean outcome.
pub const EXIT_OK: i32 = 0;
/// Exit code for operational failures (I/O, parse, malformed input).
pub const EXIT_ERROR: i32 = 1;
/// Exit code when the exploration completed and reported bugs.
pub const EXIT_BUGS: i32 = 2;
/// Exit code when a solver exception aborted or degraded the analysis.
pub const EXIT_SOLVER: i32 = 3;
/// Exit code for command-line misuse (unknown flags, bad ranges).
pub const EXIT_USAGE: i32 = 64;

/// Parses the process arguments and runs the selected command.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return EXIT_OK;
        }
        Err(e) => {
            eprint!("{e}");
            return EXIT_USAGE;
        }
    };
    match cli.execute() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.downcast_ref::<commands::UsageError>().is_some() {
                EXIT_USAGE
            } else {
                EXIT_ERROR
            }
        }
    }
}
