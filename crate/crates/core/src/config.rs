//! Run configuration: flat `key = value` text with `[section]` headers.
//! No nesting — the format stays diff-friendly and language-neutral.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{CoreError, Result};

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub seed: u64,
    pub outdir: PathBuf,
    pub workers: usize,
    pub field_files: Vec<PathBuf>,
    pub precision_bits: u32,
    pub prime_lo: u64,
    pub prime_hi: u64,
    pub splitting_cap: usize,
    pub lattice_budget: u128,
    pub c_box: f64,
    pub strata_primes: Vec<u64>,
    /// every parsed key as section.key for the config hash
    pub raw: BTreeMap<String, String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 1,
            outdir: PathBuf::from("out"),
            workers: 1,
            field_files: Vec::new(),
            precision_bits: 128,
            prime_lo: 67,
            prime_hi: 134,
            splitting_cap: 24,
            lattice_budget: 100_000_000,
            c_box: 1.0,
            strata_primes: vec![11, 13, 17],
            raw: BTreeMap::new(),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        let mut section = String::from("run");
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') && line.ends_with(']') {
                section = line[1..line.len() - 1].trim().to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CoreError::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            cfg.raw.insert(format!("{section}.{key}"), value.to_string());
            let full = format!("{section}.{key}");
            match full.as_str() {
                "run.seed" => cfg.seed = parse_num(value, &full)?,
                "run.outdir" => cfg.outdir = PathBuf::from(value),
                "run.workers" => cfg.workers = parse_num(value, &full)?,
                "field.files" => {
                    cfg.field_files = value
                        .split(',')
                        .map(|s| PathBuf::from(s.trim()))
                        .filter(|p| !p.as_os_str().is_empty())
                        .collect()
                }
                "field.precision_bits" => cfg.precision_bits = parse_num(value, &full)?,
                "sieve.prime_lo" => cfg.prime_lo = parse_num(value, &full)?,
                "sieve.prime_hi" => cfg.prime_hi = parse_num(value, &full)?,
                "form.splitting_cap" => cfg.splitting_cap = parse_num(value, &full)?,
                "budget.lattice_points" => cfg.lattice_budget = parse_num(value, &full)?,
                "budget.c_box" => {
                    cfg.c_box = value
                        .parse()
                        .map_err(|_| CoreError::Config(format!("bad float for {full}")))?
                }
                "exps.strata_primes" => {
                    cfg.strata_primes = value
                        .split(',')
                        .map(|s| s.trim().parse::<u64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| CoreError::Config(format!("bad prime list for {full}")))?
                }
                other => {
                    return Err(CoreError::Config(format!("unknown config key: {other}")))
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        RunConfig::parse(&text)
    }

    /// FNV-1a hash of the canonicalized key/value map; recorded in every
    /// artifact so reports are traceable to their configuration.
    pub fn hash(&self) -> String {
        let mut h: u64 = 0xcbf29ce484222325;
        let mut feed = |bytes: &[u8]| {
            for &b in bytes {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        };
        for (k, v) in &self.raw {
            feed(k.as_bytes());
            feed(b"=");
            feed(v.as_bytes());
            feed(b"\n");
        }
        format!("{h:016x}")
    }
}

fn parse_num<T: std::str::FromStr>(v: &str, key: &str) -> Result<T> {
    v.parse()
        .map_err(|_| CoreError::Config(format!("bad number for {key}: {v}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_keys() {
        let text = "\
[run]
seed = 42
outdir = results
[field]
files = a.field, b.field
precision_bits = 256
[budget]
c_box = 1.5
";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.field_files.len(), 2);
        assert_eq!(cfg.precision_bits, 256);
        assert_eq!(cfg.c_box, 1.5);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::parse("[run]\nbogus = 1\n").is_err());
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = RunConfig::parse("[run]\nseed = 1\n").unwrap();
        let b = RunConfig::parse("[run]\nseed = 1\n").unwrap();
        let c = RunConfig::parse("[run]\nseed = 2\n").unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
    }
}
