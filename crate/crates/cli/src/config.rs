//! Flags, the optional key=value file and the merged run configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use farey_chain::{ClusterKind, PartitionKind, DEFAULT_CAP, DOUBLE_PRECISION, HARD_CAP};

use crate::Failure;

/// Longest grid a single range may expand to.
const MAX_GRID: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Partition,
    Spectrum,
    Expect,
    Verify,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Brute,
    Recursive,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

macro_rules! value_enum_text {
    ($($t:ty),*) => {$(
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.to_possible_value().unwrap().get_name())
            }
        }

        impl FromStr for $t {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, String> {
                <$t as ValueEnum>::from_str(s.trim(), true)
            }
        }
    )*};
}

value_enum_text!(Command, Method, Format);

/// Numerical tables, expectation values and identity checks for the Farey
/// spin chain.
///
/// Grids (`--k`, `--x`, `--beta`, `--n`, `--r`) accept a value, a comma
/// list or `start:stop:step`, and any mix of these.
#[derive(Debug, Parser)]
#[command(name = "farey-chain", version)]
pub struct Cli {
    #[arg(long, value_enum)]
    pub command: Option<Command>,
    /// Chain lengths; for `verify`, the largest enumerated length.
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long)]
    pub beta: Option<String>,
    /// Comma list of brute, recursive, grid.
    #[arg(long)]
    pub method: Option<String>,
    /// `knauf` for Z_k, `tilde` for the companion sum.
    #[arg(long)]
    pub kind: Option<String>,
    /// Chebyshev nodes for the transfer operator.
    #[arg(long)]
    pub nodes: Option<String>,
    /// Overrides every tolerance of the command.
    #[arg(long)]
    pub tol: Option<String>,
    /// Enumeration budget in terms, `N` or `2^N`, at most 2^30.
    #[arg(long)]
    pub cap: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file, written atomically. Standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// File of `key=value` lines with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Working precision in bits for enumeration.
    #[arg(long)]
    pub precision: Option<String>,
    /// Write 0 in the seconds column so that output is reproducible byte for byte.
    #[arg(long)]
    pub no_timing: bool,
    /// Semicolon or comma list of geometries such as `inf ^ n=2 v r=0`.
    #[arg(long)]
    pub geometry: Option<String>,
    /// Cluster kinds (uu, du, ud, dd, up-run, down-up-run) for `expect`.
    #[arg(long)]
    pub cluster: Option<String>,
    /// Gap lengths for cluster geometries.
    #[arg(long)]
    pub n: Option<String>,
    /// Run lengths for cluster geometries and tables.
    #[arg(long)]
    pub r: Option<String>,
}

const KEYS: &[&str] = &[
    "command", "k", "x", "beta", "method", "kind", "nodes", "tol", "cap", "format", "out",
    "precision", "timing", "geometry", "cluster", "n", "r",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub k: Vec<usize>,
    pub x: Vec<f64>,
    pub beta: Vec<f64>,
    pub methods: Vec<Method>,
    pub kind: PartitionKind,
    pub nodes: usize,
    pub tol: Option<f64>,
    pub cap: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub precision: u32,
    pub timing: bool,
    pub geometry: Vec<String>,
    pub clusters: Vec<ClusterKind>,
    pub n: Vec<usize>,
    pub r: Vec<usize>,
}

impl RunConfig {
    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::error(msg)
}

/// Reads `key=value` lines; `#` starts a comment.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config file {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("{}:{}: expected key=value", path.display(), i + 1)))?;
        let key = key.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(usage(format!("{}:{}: unknown key '{key}'", path.display(), i + 1)));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

impl Cli {
    fn flags(&self) -> BTreeMap<String, String> {
        let mut map = BTreeMap::new();
        let mut put = |key: &str, v: Option<String>| {
            if let Some(v) = v {
                map.insert(key.to_string(), v);
            }
        };
        put("command", self.command.map(|c| c.to_string()));
        put("k", self.k.clone());
        put("x", self.x.clone());
        put("beta", self.beta.clone());
        put("method", self.method.clone());
        put("kind", self.kind.clone());
        put("nodes", self.nodes.clone());
        put("tol", self.tol.clone());
        put("cap", self.cap.clone());
        put("format", self.format.map(|f| f.to_string()));
        put("out", self.out.as_ref().map(|p| p.display().to_string()));
        put("precision", self.precision.clone());
        put("timing", self.no_timing.then(|| "false".to_string()));
        put("geometry", self.geometry.clone());
        put("cluster", self.cluster.clone());
        put("n", self.n.clone());
        put("r", self.r.clone());
        map
    }

    /// File values first, flags on top, then defaults.
    pub fn resolve(&self) -> Result<RunConfig, Failure> {
        let mut map = match &self.config {
            Some(path) => read_config_file(path)?,
            None => BTreeMap::new(),
        };
        map.extend(self.flags());
        RunConfig::from_map(&map)
    }
}

impl RunConfig {
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self, Failure> {
        let get = |key: &str, default: &str| map.get(key).cloned().unwrap_or_else(|| default.into());
        let command: Command = get("command", "partition").parse().map_err(usage)?;
        let format_default = if command == Command::Verify { "json" } else { "csv" };
        let k_default = if command == Command::Verify { "12" } else { "10" };
        let r_default = if command == Command::Table { "0:4:1" } else { "1" };

        let methods = get("method", "brute")
            .split(',')
            .map(|m| m.parse::<Method>().map_err(usage))
            .collect::<Result<Vec<_>, _>>()?;
        let mut seen = Vec::new();
        for m in &methods {
            if seen.contains(m) {
                return Err(usage(format!("method {m} listed twice")));
            }
            seen.push(*m);
        }

        let kind = match get("kind", "knauf").trim() {
            "knauf" => PartitionKind::Knauf,
            "tilde" => PartitionKind::Tilde,
            other => return Err(usage(format!("unknown kind '{other}' (knauf, tilde)"))),
        };

        let nodes: usize = get("nodes", "64")
            .trim()
            .parse()
            .map_err(|_| usage("nodes must be a positive integer"))?;
        if nodes < 2 {
            return Err(usage("nodes must be at least 2"));
        }

        let tol = match map.get("tol") {
            Some(t) => {
                let t: f64 = t.trim().parse().map_err(|_| usage(format!("bad tolerance '{t}'")))?;
                if !(t > 0.0 && t.is_finite()) {
                    return Err(usage("tolerance must be finite and > 0"));
                }
                Some(t)
            }
            None => None,
        };

        let precision: u32 = get("precision", &DOUBLE_PRECISION.to_string())
            .trim()
            .parse()
            .map_err(|_| usage("precision must be a number of bits"))?;
        if precision < DOUBLE_PRECISION {
            return Err(usage(format!("precision must be at least {DOUBLE_PRECISION} bits")));
        }

        let timing = match get("timing", "true").trim() {
            "true" | "yes" | "1" => true,
            "false" | "no" | "0" => false,
            other => return Err(usage(format!("timing must be true or false, got '{other}'"))),
        };

        let geometry = match map.get("geometry") {
            Some(g) => split_geometries(g),
            None => Vec::new(),
        };
        let clusters = match map.get("cluster") {
            Some(c) => c
                .split(',')
                .map(|s| s.trim().parse::<ClusterKind>().map_err(|e| usage(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?,
            None => Vec::new(),
        };

        let cfg = RunConfig {
            command,
            k: parse_usize_grid(&get("k", k_default)).map_err(usage)?,
            x: parse_f64_grid(&get("x", "0")).map_err(usage)?,
            beta: parse_f64_grid(&get("beta", "0.5")).map_err(usage)?,
            methods,
            kind,
            nodes,
            tol,
            cap: parse_cap(&get("cap", &DEFAULT_CAP.to_string())).map_err(usage)?,
            format: get("format", format_default).parse().map_err(usage)?,
            out: map.get("out").map(PathBuf::from),
            precision,
            timing,
            geometry,
            clusters,
            n: parse_usize_grid(&get("n", "0")).map_err(usage)?,
            r: parse_usize_grid(&get("r", r_default)).map_err(usage)?,
        };
        if cfg.x.iter().any(|&x| x < 0.0) {
            return Err(usage("x must be >= 0"));
        }
        if cfg.beta.iter().any(|&b| b < 0.0) {
            return Err(usage("beta must be >= 0"));
        }
        Ok(cfg)
    }
}

/// Geometries are separated by `;` or `,`; neither occurs inside one.
fn split_geometries(s: &str) -> Vec<String> {
    s.split([';', ','])
        .map(|g| g.split_whitespace().collect::<Vec<_>>().join(" "))
        .filter(|g| !g.is_empty())
        .collect()
}

/// A value, a comma list or `start:stop:step`, combined freely.
pub fn parse_f64_grid(s: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim) {
        let num = |t: &str| -> Result<f64, String> {
            let v: f64 = t.trim().parse().map_err(|_| format!("bad number '{t}' in '{s}'"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("non-finite value '{t}' in '{s}'"))
            }
        };
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(num(v)?),
            [start, stop, step] => {
                let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
                if !(step > 0.0) || stop < start {
                    return Err(format!("range '{item}' needs step > 0 and stop >= start"));
                }
                let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                if count > MAX_GRID {
                    return Err(format!("range '{item}' has more than {MAX_GRID} points"));
                }
                out.extend((0..count).map(|i| start + i as f64 * step));
            }
            _ => return Err(format!("'{item}' is neither a value nor start:stop:step")),
        }
    }
    if out.is_empty() {
        return Err("empty grid".into());
    }
    Ok(out)
}

pub fn parse_usize_grid(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim) {
        let num = |t: &str| -> Result<usize, String> {
            t.trim()
                .parse()
                .map_err(|_| format!("bad non-negative integer '{t}' in '{s}'"))
        };
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(num(v)?),
            [start, stop, step] => {
                let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
                if step == 0 || stop < start {
                    return Err(format!("range '{item}' needs step > 0 and stop >= start"));
                }
                if (stop - start) / step >= MAX_GRID {
                    return Err(format!("range '{item}' has more than {MAX_GRID} points"));
                }
                out.extend((start..=stop).step_by(step));
            }
            _ => return Err(format!("'{item}' is neither a value nor start:stop:step")),
        }
    }
    if out.is_empty() {
        return Err("empty grid".into());
    }
    Ok(out)
}

/// `N` or `2^N` terms, between 1 and 2^30.
pub fn parse_cap(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let cap = match s.split_once('^') {
        Some((base, exp)) => {
            if base.trim() != "2" {
                return Err(format!("cap '{s}': only powers of 2 are accepted"));
            }
            let e: u32 = exp.trim().parse().map_err(|_| format!("bad cap exponent in '{s}'"))?;
            1u64.checked_shl(e).filter(|_| e < 64).ok_or_else(|| format!("cap '{s}' too large"))?
        }
        None => s.parse().map_err(|_| format!("bad cap '{s}'"))?,
    };
    if cap == 0 || cap > HARD_CAP {
        return Err(format!("cap must lie in 1..=2^30 terms, got {s}"));
    }
    Ok(cap)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_f64_grid("0.5").unwrap(), vec![0.5]);
        assert_eq!(parse_f64_grid("0,1,2.5").unwrap(), vec![0.0, 1.0, 2.5]);
        assert_eq!(parse_f64_grid("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_f64_grid("0:0.3:0.1").unwrap().len(), 4);
        assert_eq!(parse_usize_grid("1:9:4,12").unwrap(), vec![1, 5, 9, 12]);
        assert!(parse_f64_grid("1:0:0.1").is_err());
        assert!(parse_f64_grid("0:1:0").is_err());
        assert!(parse_f64_grid("nan").is_err());
        assert!(parse_f64_grid("").is_err());
        assert!(parse_usize_grid("-1").is_err());
    }

    #[test]
    fn caps() {
        assert_eq!(parse_cap("2^4").unwrap(), 16);
        assert_eq!(parse_cap("1000").unwrap(), 1000);
        assert_eq!(parse_cap("2^30").unwrap(), 1 << 30);
        assert!(parse_cap("2^31").is_err());
        assert!(parse_cap("3^4").is_err());
        assert!(parse_cap("0").is_err());
    }

    #[test]
    fn rejects_bad_tolerance() {
        let mut map = BTreeMap::new();
        map.insert("tol".to_string(), "0".to_string());
        assert!(RunConfig::from_map(&map).is_err());
        map.insert("tol".to_string(), "-1e-3".to_string());
        assert!(RunConfig::from_map(&map).is_err());
    }

    #[test]
    fn geometry_lists() {
        assert_eq!(
            split_geometries("inf ^ r=0; inf  v r=1,l=2 ^ r=2"),
            vec!["inf ^ r=0", "inf v r=1", "l=2 ^ r=2"]
        );
    }
}
