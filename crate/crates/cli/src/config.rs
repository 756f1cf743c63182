//! Line-based `key = value` run configuration.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use stokeslp_core::spectral::TorusGrid;
use stokeslp_core::stokes::{Coefficient, StokesParams};
use stokeslp_core::verify::Tolerances;

/// Everything a run needs, after defaults and overrides are applied.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub dim: usize,
    pub points: usize,
    pub strip: f64,
    pub v: Coefficient,
    pub v0: Coefficient,
    pub seed: u64,
    pub outdir: PathBuf,
    pub tolerances: Tolerances,
    /// The resolved key/value pairs, echoed into the summary.
    pub entries: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn params(&self) -> Result<StokesParams, String> {
        let grid = TorusGrid::new(self.dim, self.points).map_err(|e| e.to_string())?;
        StokesParams::new(grid, self.v, self.v0)
            .and_then(|p| p.with_strip(self.strip))
            .map_err(|e| e.to_string())
    }
}

/// Parses `key = value` lines; `#` starts a comment. Later lines win.
pub fn parse_entries(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`, got `{line}`", i + 1))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// Parses a `key=value` override given on the command line.
pub fn parse_override(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("--set expects key=value, got `{s}`"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

const TOLERANCE_KEYS: [&str; 12] = [
    "jump",
    "green",
    "green_weak",
    "lateral_ratio",
    "lateral_limit",
    "kernel_residual",
    "trace",
    "route",
    "dtn",
    "no_jump",
    "adjoint",
    "convergence_ratio",
];

fn tolerance_slot<'a>(t: &'a mut Tolerances, key: &str) -> Option<&'a mut f64> {
    Some(match key {
        "jump" => &mut t.jump,
        "green" => &mut t.green,
        "green_weak" => &mut t.green_weak,
        "lateral_ratio" => &mut t.lateral_ratio,
        "lateral_limit" => &mut t.lateral_limit,
        "kernel_residual" => &mut t.kernel_residual,
        "trace" => &mut t.trace,
        "route" => &mut t.route,
        "dtn" => &mut t.dtn,
        "no_jump" => &mut t.no_jump,
        "adjoint" => &mut t.adjoint,
        "convergence_ratio" => &mut t.convergence_ratio,
        _ => return None,
    })
}

fn positive(key: &str, value: &str) -> Result<f64, String> {
    let x: f64 = value.parse().map_err(|_| format!("`{key}` must be a number, got `{value}`"))?;
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(format!("`{key}` must be positive, got `{value}`"))
    }
}

fn count(key: &str, value: &str) -> Result<usize, String> {
    value.parse().map_err(|_| format!("`{key}` must be a positive integer, got `{value}`"))
}

/// A constant `c >= 0`, or `bump(amplitude)` / `bump(amplitude, half_width)`
/// centred in the exterior strip (L, 2π).
fn coefficient(key: &str, value: &str, strip: f64) -> Result<Coefficient, String> {
    if let Some(args) = value.strip_prefix("bump(").and_then(|s| s.strip_suffix(')')) {
        let parts: Vec<&str> = args.split(',').map(str::trim).collect();
        let amplitude = positive(key, parts[0])?;
        let mut c = Coefficient::exterior_bump(amplitude, strip);
        match parts.len() {
            1 => {}
            2 => {
                let width = positive(key, parts[1])?;
                if let Coefficient::Bump { ref mut half_width, .. } = c {
                    if width > *half_width {
                        return Err(format!("`{key}` bump half width {width} leaves the exterior strip"));
                    }
                    *half_width = width;
                }
            }
            _ => return Err(format!("`{key}` expects bump(amplitude) or bump(amplitude, half_width)")),
        }
        return Ok(c);
    }
    let x: f64 = value
        .parse()
        .map_err(|_| format!("`{key}` must be a number or bump(amplitude[, half_width]), got `{value}`"))?;
    if !(x.is_finite() && x >= 0.0) {
        return Err(format!("`{key}` must be nonnegative, got `{value}`"));
    }
    Ok(Coefficient::Constant(x))
}

/// Builds a configuration from resolved entries. `N` is required.
pub fn build(entries: BTreeMap<String, String>) -> Result<RunConfig, String> {
    for key in entries.keys() {
        let known = matches!(key.as_str(), "n" | "N" | "L" | "V" | "V0" | "seed" | "outdir")
            || key.strip_prefix("tol.").is_some_and(|t| TOLERANCE_KEYS.contains(&t));
        if !known {
            return Err(format!("unknown key `{key}`"));
        }
    }
    let get = |k: &str| entries.get(k).map(String::as_str);
    let points = count("N", get("N").ok_or("missing required key `N`")?)?;
    let dim = get("n").map(|v| count("n", v)).transpose()?.unwrap_or(2);
    let strip = get("L").map(|v| positive("L", v)).transpose()?.unwrap_or(PI);
    if strip >= 2.0 * PI {
        return Err(format!("`L` must be below 2π, got {strip}"));
    }
    let v = coefficient("V", get("V").unwrap_or("1"), strip)?;
    let v0 = coefficient("V0", get("V0").unwrap_or("1"), strip)?;
    let seed = match get("seed") {
        Some(s) => s.parse().map_err(|_| format!("`seed` must be a nonnegative integer, got `{s}`"))?,
        None => 1,
    };
    let outdir = PathBuf::from(get("outdir").unwrap_or("stokeslp-out"));
    let mut tolerances = Tolerances::default();
    for key in TOLERANCE_KEYS {
        if let Some(value) = get(&format!("tol.{key}")) {
            *tolerance_slot(&mut tolerances, key).expect("listed key") = positive(&format!("tol.{key}"), value)?;
        }
    }
    let cfg = RunConfig { dim, points, strip, v, v0, seed, outdir, tolerances, entries };
    cfg.params()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entries(text: &str) -> BTreeMap<String, String> {
        parse_entries(text).unwrap()
    }

    #[test]
    fn defaults_fill_optional_keys() {
        let c = build(entries("N = 32")).unwrap();
        assert_eq!((c.dim, c.points, c.seed), (2, 32, 1));
        assert_eq!(c.v, Coefficient::Constant(1.0));
        assert_eq!(c.tolerances, Tolerances::default());
    }

    #[test]
    fn comments_and_later_lines() {
        let e = entries("# header\nN = 16 # trailing\nN = 32\n\nV0 = bump(2)\ntol.jump = 1e-3");
        let c = build(e).unwrap();
        assert_eq!(c.points, 32);
        assert!(matches!(c.v0, Coefficient::Bump { amplitude, .. } if amplitude == 2.0));
        assert_eq!(c.tolerances.jump, 1e-3);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(build(entries("n = 2")).unwrap_err().contains("`N`"));
        assert!(build(entries("N = 12")).is_err());
        assert!(build(entries("N = 16\nV = -1")).is_err());
        assert!(build(entries("N = 16\nfoo = 1")).unwrap_err().contains("foo"));
        assert!(build(entries("N = 16\nV0 = bump(1, 9)")).is_err());
        assert!(parse_entries("N 16").is_err());
    }
}
