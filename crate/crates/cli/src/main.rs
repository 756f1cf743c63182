//! `stokeslp <command> --config <path> [--set key=value]...`
//!
//! Exit status: 0 when every check passes, 1 when a check fails or a
//! computation errors, 2 for configuration and usage errors.

mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use run::Command;

#[derive(Parser, Debug)]
#[command(name = "stokeslp", version, about = "Layer-potential verification checks on a periodic strip")]
struct Cli {
    /// verify-jumps, verify-green, verify-lateral, spectrum, solve, dtn, all, or criterion-<1..11>
    command: String,
    /// Configuration file of `key = value` lines
    #[arg(long)]
    config: PathBuf,
    /// Overrides a configuration key; may be repeated
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn config_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("stokeslp: config error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(command) = Command::parse(&cli.command) else {
        return config_error(format!("unknown command `{}`; expected one of {}", cli.command, Command::NAMES.join(", ")));
    };
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => return config_error(format!("cannot read {}: {e}", cli.config.display())),
    };
    let cfg = config::parse_entries(&text).and_then(|mut entries| {
        for s in &cli.overrides {
            let (k, v) = config::parse_override(s)?;
            entries.insert(k, v);
        }
        config::build(entries)
    });
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => return config_error(e),
    };
    let outcome = match run::execute(&cfg, command) {
        Ok(o) => o,
        Err(e) => return config_error(e),
    };
    let summary = match run::emit(&cfg, &cli.command, &outcome) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("stokeslp: cannot write {}: {e}", cfg.outdir.display());
            return ExitCode::from(1);
        }
    };
    for r in &outcome.rows {
        if !r.pass() {
            eprintln!("FAIL {}", r.csv());
        }
    }
    for e in &outcome.errors {
        eprintln!("ERROR {e}");
    }
    let failed = outcome.rows.iter().filter(|r| !r.pass()).count();
    println!(
        "{}: {} rows, {} failed, {} errors; artifacts in {}",
        cli.command,
        outcome.rows.len(),
        failed,
        outcome.errors.len(),
        cfg.outdir.display()
    );
    if summary["pass"].as_bool() == Some(true) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
