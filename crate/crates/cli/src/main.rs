//! `phigamma`: command-line front end.
//! Exit codes: 0 success (including unstable or non-converging results), 1 usage error, 2 computation error.

mod cache;
mod commands;
mod config;

use std::io::Write;
use std::sync::atomic::Ordering;

use clap::Parser;

use crate::cache::Cache;
use crate::config::{Cli, Format, Session};

fn usage(msg: &str) -> i32 {
    eprintln!("phigamma: error: {msg}");
    eprintln!("run `phigamma --help` for usage");
    1
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let session = match Session::from_args(&cli.session) {
        Ok(s) => s,
        Err(m) => return usage(&m),
    };
    let cache = match session.cache_dir.clone().map(Cache::open).transpose() {
        Ok(c) => c,
        Err(m) => return usage(&m),
    };
    let items = match commands::build(&cli.cmd, &session) {
        Ok(items) => items,
        Err(m) => return usage(&m),
    };
    let results = commands::run_items(&items, &session, cache.as_ref());
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let mut code = 0;
    for (line, c) in &results {
        let text = match session.format {
            Format::Json => format!("{line}\n"),
            Format::Human => commands::human(line),
        };
        if out.write_all(text.as_bytes()).is_err() {
            return 2;
        }
        code = code.max(*c);
    }
    if let Some(c) = &cache {
        eprintln!(
            "phigamma: cache: {} hit, {} miss",
            c.hits.load(Ordering::Relaxed),
            c.misses.load(Ordering::Relaxed)
        );
    }
    code
}

fn main() {
    std::process::exit(run());
}
