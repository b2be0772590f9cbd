//! Configuration, figure presets, sweeps and result files for `discord-dyn`.
//!
//! The `discord-dyn` binary wraps this library:
//!
//! ```text
//! discord-dyn simulate --config run.cfg
//! discord-dyn sweep --config base.cfg --axis s=0.5,1,3 --axis reservoir_kind=independent,common
//! discord-dyn figures --family fig1 --out data/fig1
//! ```
//!
//! Exit codes: 0 success, 1 validation, 2 numerical failure, 3 I/O.
//! `DISCORD_DYN_THREADS` sets the worker count.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod figures;
pub mod presets;
pub mod run;
pub mod sweep;

pub use config::RunConfig;
pub use error::{HarnessError, Result};

/// Environment variable holding the worker count.
pub const THREADS_ENV: &str = "DISCORD_DYN_THREADS";

/// Worker count from [`THREADS_ENV`], defaulting to the available parallelism.
pub fn worker_count() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(HarnessError::validation(format!(
                "{THREADS_ENV} must be a positive integer, got `{v}`"
            ))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// A rayon pool sized by [`worker_count`].
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let n = worker_count()?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| HarnessError::validation(format!("cannot start {n} workers: {e}")))
}
