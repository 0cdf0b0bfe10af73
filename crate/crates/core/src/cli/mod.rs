//! Configuration, command dispatch and artifact writers behind the
//! `stringbreak` binary.
//!
//! Usage: `stringbreak <command> [--config FILE] [--key=value ...]`.

mod commands;
mod config;
mod output;

use std::fmt::Write as _;
use std::path::PathBuf;

pub use commands::{resolve_threads, run_command, schemas, RunReport};
pub use config::{BoundaryKind, Command, KernelKind, RunConfig};
pub use output::{write_metadata, write_series, Cell, Schema, SchemaContext};

use crate::{Error, Result};

/// What the argument list asks for.
#[derive(Clone, Debug, PartialEq)]
pub enum Invocation {
    Help(Option<Command>),
    Run(Box<RunConfig>),
}

/// Parses `args` (without the program name).
pub fn parse_args(args: &[String]) -> Result<Invocation> {
    let mut command = None;
    let mut file: Option<PathBuf> = None;
    let mut overrides = Vec::new();
    let mut help = false;
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        if arg == "--help" || arg == "-h" {
            help = true;
        } else if arg == "--config" {
            let path = it.next().ok_or_else(|| Error::config("config", "missing file after --config"))?;
            file = Some(PathBuf::from(path));
        } else if let Some(path) = arg.strip_prefix("--config=") {
            file = Some(PathBuf::from(path));
        } else if let Some(kv) = arg.strip_prefix("--") {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::config(kv, "flags take the form --key=value"))?;
            overrides.push((k.to_string(), v.to_string()));
        } else if command.is_none() {
            command = Some(arg.parse::<Command>()?);
        } else {
            return Err(Error::config("arguments", format!("unexpected argument `{arg}`")));
        }
    }
    if help || (command.is_none() && file.is_none() && overrides.is_empty()) {
        return Ok(Invocation::Help(command));
    }
    Ok(Invocation::Run(Box::new(RunConfig::load(command, file.as_deref(), &overrides)?)))
}

/// Usage text; with a command, also its output schemas.
pub fn help_text(command: Option<Command>) -> String {
    let mut s = String::new();
    s.push_str("usage: stringbreak <command> [--config FILE] [--key=value ...]\n\n");
    match command {
        None => {
            s.push_str("commands:\n");
            for c in Command::ALL {
                let _ = writeln!(s, "  {:<12} {}", c.name(), c.summary());
            }
            s.push_str("\nRun `stringbreak <command> --help` for the CSV columns a command writes.\n");
        }
        Some(c) => {
            let _ = writeln!(s, "{}: {}\n\noutputs ({}.json plus):", c.name(), c.summary(), c.name());
            for schema in schemas(c) {
                let _ = writeln!(s, "  {}: {}", schema.file, schema.pattern);
            }
            s.push_str("  (n = dynamical spins, k = levels; `?flag` columns appear only when enabled)\n");
        }
    }
    s.push_str("\nconfig keys (key=value per line, # comments; flags override the file):\n");
    for (k, d) in RunConfig::KEYS {
        let _ = writeln!(s, "  {k:<16} {d}");
    }
    s.push_str("\nSTRINGBREAK_THREADS bounds the worker threads when `threads` is 0.\n");
    s.push_str("exit status: 0 success, 1 invalid input, 2 numerical failure\n");
    s
}

/// Entry point shared by the binary and the tests; returns the exit status.
pub fn main_with_args(args: &[String]) -> i32 {
    let outcome = parse_args(args).and_then(|inv| match inv {
        Invocation::Help(c) => {
            print!("{}", help_text(c));
            Ok(())
        }
        Invocation::Run(cfg) => {
            let report = run_command(&cfg)?;
            for f in &report.files {
                println!("{}", f.display());
            }
            Ok(())
        }
    });
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("stringbreak: {e}");
            e.exit_code()
        }
    }
}
