//! Command-line front end for [`polarisim_core`]: parameter files, CSV/JSON
//! artifacts and the `polarisim` subcommands.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use error::{CliError, ExitStatus, Result};

/// Caps the global thread pool at `POLARISIM_THREADS` when set.
pub fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("POLARISIM_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            CliError::Usage(format!(
                "POLARISIM_THREADS must be a positive integer, got `{value}`"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot configure thread pool: {e}")))
}
