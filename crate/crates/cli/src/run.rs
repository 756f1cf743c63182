//! Command dispatch and artifact emission.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};
use stokeslp_core::layer::BoundarySystem;
use stokeslp_core::stokes::StokesParams;
use stokeslp_core::verify::{self, CheckRow, CSV_HEADER, CRITERIA};

use crate::config::RunConfig;

/// A command name resolved against the known set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    VerifyJumps,
    VerifyGreen,
    VerifyLateral,
    Spectrum,
    Solve,
    Dtn,
    All,
    Criterion(u32),
}

impl Command {
    pub const NAMES: [&'static str; 8] =
        ["verify-jumps", "verify-green", "verify-lateral", "spectrum", "solve", "dtn", "all", "criterion-<1..11>"];

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "verify-jumps" => Command::VerifyJumps,
            "verify-green" => Command::VerifyGreen,
            "verify-lateral" => Command::VerifyLateral,
            "spectrum" => Command::Spectrum,
            "solve" => Command::Solve,
            "dtn" => Command::Dtn,
            "all" => Command::All,
            _ => {
                let k: u32 = s.strip_prefix("criterion-")?.parse().ok()?;
                CRITERIA.iter().find(|(c, _)| *c == k)?;
                Command::Criterion(k)
            }
        })
    }
}

/// Rows produced by one command, plus any numerical errors met on the way.
#[derive(Default)]
pub struct Outcome {
    pub rows: Vec<CheckRow>,
    pub errors: Vec<String>,
}

fn single(cfg: &RunConfig, params: &StokesParams, cmd: Command, out: &mut Outcome) {
    let tol = &cfg.tolerances;
    let seed = cfg.seed;
    let rows = &mut out.rows;
    let system = || BoundarySystem::new(params);
    let result = match cmd {
        Command::VerifyJumps => system().and_then(|s| verify::jump_rows(rows, &s, seed, tol).map(drop)),
        Command::VerifyGreen => verify::green_rows(rows, params, 8, seed, tol.green, tol.green_weak),
        Command::VerifyLateral => verify::lateral_rows(rows, params.dim(), seed, tol)
            .and_then(|_| system())
            .and_then(|s| verify::asymptotic_rows(rows, &s, tol)),
        Command::Spectrum => system().and_then(|s| verify::spectrum_rows(rows, &s).map(drop)).and_then(|_| verify::adjoint_rows(rows, params, tol)),
        Command::Solve => system().and_then(|s| verify::solve_rows(rows, &s, seed, tol).map(drop)),
        Command::Dtn => system().and_then(|s| verify::dtn_rows(rows, &s, seed, tol).map(drop)),
        Command::Criterion(k) => verify::criterion(k, seed).map(|r| rows.extend(r)),
        Command::All => unreachable!("expanded by the caller"),
    };
    if let Err(e) = result {
        out.errors.push(format!("{cmd:?}: {e}"));
    }
}

/// Runs a command against a configuration.
pub fn execute(cfg: &RunConfig, cmd: Command) -> Result<Outcome, String> {
    let params = cfg.params()?;
    let mut out = Outcome::default();
    let list = match cmd {
        Command::All => vec![
            Command::VerifyJumps,
            Command::VerifyGreen,
            Command::VerifyLateral,
            Command::Spectrum,
            Command::Solve,
            Command::Dtn,
        ],
        c => vec![c],
    };
    for c in list {
        single(cfg, &params, c, &mut out);
    }
    Ok(out)
}

/// Writes `path` through a temporary sibling and a rename.
fn write_atomic(path: &Path, body: &str) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(body.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(tmp, path)
}

/// Writes `<outdir>/<check>.csv` per check and `<outdir>/summary.json`.
pub fn emit(cfg: &RunConfig, command: &str, outcome: &Outcome) -> std::io::Result<Value> {
    fs::create_dir_all(&cfg.outdir)?;
    let mut by_check: BTreeMap<&str, Vec<&CheckRow>> = BTreeMap::new();
    for r in &outcome.rows {
        by_check.entry(r.check.as_str()).or_default().push(r);
    }
    let mut checks = serde_json::Map::new();
    for (name, rows) in &by_check {
        let mut body = String::from(CSV_HEADER);
        body.push('\n');
        for r in rows {
            body.push_str(&r.csv());
            body.push('\n');
        }
        write_atomic(&cfg.outdir.join(format!("{name}.csv")), &body)?;
        let failed = rows.iter().filter(|r| !r.pass()).count();
        checks.insert(name.to_string(), json!({ "rows": rows.len(), "failed": failed }));
    }
    let failures: Vec<Value> = outcome
        .rows
        .iter()
        .filter(|r| !r.pass())
        .map(|r| {
            json!({
                "check": r.check, "n": r.dim, "N": r.points, "case": r.case,
                "param": format!("{} {}", r.param, r.relation.symbol()),
                "residual": r.value, "tolerance": r.tolerance,
            })
        })
        .collect();
    let summary = json!({
        "command": command,
        "config": cfg.entries,
        "pass": failures.is_empty() && outcome.errors.is_empty(),
        "checks": checks,
        "failures": failures,
        "errors": outcome.errors,
    });
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    write_atomic(&cfg.outdir.join("summary.json"), &(text + "\n"))?;
    Ok(summary)
}
