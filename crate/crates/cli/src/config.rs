//! Run configuration: command line flags layered over an optional
//! `key = value` file.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Flags shared by every subcommand.
#[derive(Clone, Debug, Default, Args)]
pub struct Flags {
    /// Base field, e.g. `Qp:p=3,prec=12` or `Fq:p=2,f=1,prec=16`.
    #[arg(long, global = true)]
    pub field: Option<String>,
    /// `unramified`, `ramified`, `split` or `ext:t=...,d=...`.
    #[arg(long, global = true)]
    pub ext: Option<String>,
    /// Test function as cell coefficients, e.g. `1K` or `0:1,1:-1/2`.
    #[arg(long, global = true)]
    pub f: Option<String>,
    /// Torus element: `depth=N[,marker=±1]` or `A;B` for `A + Bτ`.
    #[arg(long, global = true)]
    pub t: Option<String>,
    /// Element of the base field.
    #[arg(long, global = true)]
    pub x: Option<String>,
    /// `trivial`, `eps` or an extension spec for the κ-orbital integral.
    #[arg(long, global = true)]
    pub kappa: Option<String>,
    /// Transfer constant: `lambda-inverse` or `one`.
    #[arg(long, global = true)]
    pub constant: Option<String>,
    #[arg(long, global = true)]
    pub depth: Option<u32>,
    #[arg(long, global = true)]
    pub level: Option<u32>,
    /// Inclusive range `a..b`.
    #[arg(long = "n-range", global = true)]
    pub n_range: Option<String>,
    /// Number of random torus elements for sampled checks.
    #[arg(long, global = true)]
    pub samples: Option<u32>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Oracle to run: `unit-quotient`, `norm`, `conjugacy`, `square-classes`.
    #[arg(long, global = true)]
    pub oracle: Option<String>,
    /// Cross-check with the lattice-count oracle where available.
    #[arg(long = "with-oracle", global = true)]
    pub with_oracle: bool,
    /// Reduced sample sizes.
    #[arg(long, global = true)]
    pub quick: bool,
    /// File of `key = value` lines; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<String>,
    /// Print the resolved configuration as a `--config` file and exit.
    #[arg(long = "dump-config", global = true)]
    pub dump_config: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub field: Option<String>,
    pub ext: Option<String>,
    pub f: Option<String>,
    pub t: Option<String>,
    pub x: Option<String>,
    pub kappa: Option<String>,
    pub constant: Option<String>,
    pub depth: Option<u32>,
    pub level: Option<u32>,
    pub n_range: Option<String>,
    pub samples: Option<u32>,
    pub seed: u64,
    pub format: Format,
    pub oracle: Option<String>,
    pub with_oracle: bool,
    pub quick: bool,
}

const KEYS: [&str; 16] = [
    "field", "ext", "f", "t", "x", "kappa", "constant", "depth", "level", "n_range", "samples", "seed", "format",
    "oracle", "with_oracle", "quick",
];

fn parse_bool(k: &str, v: &str) -> Result<bool, String> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(format!("{k}: expected a boolean, got `{v}`")),
    }
}

fn parse_num<T: std::str::FromStr>(k: &str, v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("{k}: expected a number, got `{v}`"))
}

impl RunConfig {
    /// Parse `key = value` lines; `#` starts a comment.
    pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>, String> {
        let mut out = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
            let k = k.trim().replace('-', "_");
            if !KEYS.contains(&k.as_str()) {
                return Err(format!("line {}: unknown key `{k}`", i + 1));
            }
            let v = v.trim().trim_matches('"').to_string();
            out.insert(k, v);
        }
        Ok(out)
    }

    /// Flags over file values over defaults.
    pub fn resolve(command: &str, flags: &Flags, file: &BTreeMap<String, String>) -> Result<Self, String> {
        let s = |flag: &Option<String>, k: &str| flag.clone().or_else(|| file.get(k).cloned());
        let n = |flag: Option<u32>, k: &str| -> Result<Option<u32>, String> {
            match (flag, file.get(k)) {
                (Some(v), _) => Ok(Some(v)),
                (None, Some(v)) => parse_num(k, v).map(Some),
                (None, None) => Ok(None),
            }
        };
        let b = |flag: bool, k: &str| -> Result<bool, String> {
            match (flag, file.get(k)) {
                (true, _) => Ok(true),
                (false, Some(v)) => parse_bool(k, v),
                (false, None) => Ok(false),
            }
        };
        let seed = match (flags.seed, file.get("seed")) {
            (Some(v), _) => v,
            (None, Some(v)) => parse_num("seed", v)?,
            (None, None) => 0,
        };
        let format = match (flags.format, file.get("format").map(String::as_str)) {
            (Some(v), _) => v,
            (None, Some("json")) | (None, None) => Format::Json,
            (None, Some("csv")) => Format::Csv,
            (None, Some(v)) => return Err(format!("format: expected json or csv, got `{v}`")),
        };
        Ok(RunConfig {
            command: command.to_string(),
            field: s(&flags.field, "field"),
            ext: s(&flags.ext, "ext"),
            f: s(&flags.f, "f"),
            t: s(&flags.t, "t"),
            x: s(&flags.x, "x"),
            kappa: s(&flags.kappa, "kappa"),
            constant: s(&flags.constant, "constant"),
            depth: n(flags.depth, "depth")?,
            level: n(flags.level, "level")?,
            n_range: s(&flags.n_range, "n_range"),
            samples: n(flags.samples, "samples")?,
            seed,
            format,
            oracle: s(&flags.oracle, "oracle"),
            with_oracle: b(flags.with_oracle, "with_oracle")?,
            quick: b(flags.quick, "quick")?,
        })
    }

    /// The `key = value` form accepted by `--config`.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                let _ = writeln!(out, "{k} = {v}");
            }
        };
        put("field", self.field.clone());
        put("ext", self.ext.clone());
        put("f", self.f.clone());
        put("t", self.t.clone());
        put("x", self.x.clone());
        put("kappa", self.kappa.clone());
        put("constant", self.constant.clone());
        put("depth", self.depth.map(|v| v.to_string()));
        put("level", self.level.map(|v| v.to_string()));
        put("n_range", self.n_range.clone());
        put("samples", self.samples.map(|v| v.to_string()));
        put("seed", Some(self.seed.to_string()));
        put("format", Some(match self.format {
            Format::Json => "json".into(),
            Format::Csv => "csv".into(),
        }));
        put("oracle", self.oracle.clone());
        put("with_oracle", Some(self.with_oracle.to_string()));
        put("quick", Some(self.quick.to_string()));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunConfig {
        RunConfig {
            command: "weyl-check".into(),
            field: Some("Qp:p=3,prec=12".into()),
            ext: Some("ext:t=1,d=-1".into()),
            f: Some("0:1,1:-1/2".into()),
            level: Some(2),
            seed: 7,
            format: Format::Csv,
            quick: true,
            ..Default::default()
        }
    }

    #[test]
    fn json_round_trip() {
        let c = sample();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&s).unwrap(), c);
    }

    #[test]
    fn kv_round_trip() {
        let c = sample();
        let file = RunConfig::parse_kv(&c.to_kv()).unwrap();
        assert_eq!(RunConfig::resolve(&c.command, &Flags::default(), &file).unwrap(), c);
    }

    #[test]
    fn flags_override_file() {
        let file = RunConfig::parse_kv("field = Qp:p=5,prec=8\nlevel = 1 # comment\n").unwrap();
        let flags = Flags { level: Some(2), ..Default::default() };
        let c = RunConfig::resolve("x", &flags, &file).unwrap();
        assert_eq!(c.field.as_deref(), Some("Qp:p=5,prec=8"));
        assert_eq!(c.level, Some(2));
        assert!(RunConfig::parse_kv("bogus = 1").is_err());
    }
}
