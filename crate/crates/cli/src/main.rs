mod args;
mod cache;
mod commands;
mod input;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use drep_core::Error;

use crate::args::Cli;
use crate::cache::{Cache, Lookup, RunManifest};
use crate::report::Report;

/// Errors that mean the mathematics did not check out, rather than bad input.
fn is_verification_failure(e: &anyhow::Error) -> bool {
    matches!(
        e.downcast_ref::<Error>(),
        Some(
            Error::DSquaredNonzero { .. }
                | Error::DimensionMismatch { .. }
                | Error::Inconsistent(_)
                | Error::NonInteger(_)
        )
    )
}

fn execute(cli: Cli) -> anyhow::Result<Report> {
    let plan = commands::plan(cli.command, cli.budget)?;
    let dir = if cli.no_cache || !plan.cacheable {
        None
    } else {
        cli.cache_dir.or_else(|| std::env::var_os("DREP_CACHE").map(Into::into))
    };
    let Some(dir) = dir else {
        return (plan.run)();
    };
    let cache = Cache::new(dir);
    let manifest = RunManifest::new(plan.command, plan.digest.clone(), plan.params.clone());
    let replace = match cache.get(&manifest) {
        Lookup::Hit(report) => {
            eprintln!("drep: served from cache ({})", manifest.key());
            return Ok(report);
        }
        Lookup::Miss => false,
        Lookup::Corrupt(why) => {
            eprintln!(
                "drep: warning: corrupt cache entry {} ({why}); recomputing",
                manifest.key()
            );
            true
        }
    };
    let report = (plan.run)()?;
    if let Err(e) = cache.put(&manifest, &report, replace) {
        eprintln!("drep: warning: could not write cache entry: {e}");
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs as usize)
            .build_global()
        {
            eprintln!("drep: warning: {e}");
        }
    }
    let format = cli.format;
    match execute(cli) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(report.render(format).as_bytes());
            let _ = out.flush();
            ExitCode::from(report.exit_code())
        }
        Err(e) => {
            eprintln!("drep: error: {e:#}");
            ExitCode::from(if is_verification_failure(&e) { 1 } else { 2 })
        }
    }
}
