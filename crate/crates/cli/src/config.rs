//! Run configuration: a plain-text file of `key = value` lines (`#` starts a comment),
//! overridden key by key by command-line flags.
//!
//! Every value that a run reads is recorded, defaults included, so the output header
//! documents the run completely.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use crate::CliError;

/// Recognized keys and what they mean. Angle-valued entries accept a `pi` suffix (`25.5pi`).
pub const SCHEMA: &[(&str, &str)] = &[
    ("experiment", "fig1-map | fig2-g2 | fig3-g2 | fig4-poles | fig5-concurrence | figS1-poles | custom"),
    ("kind", "what a custom run computes: map | g2 | poles | pole-list | concurrence"),
    ("omega0", "qubit frequency in units of Γ"),
    ("gamma", "waveguide decay rate Γ"),
    ("gamma-prime", "decay rate into other channels Γ'"),
    ("c", "group velocity"),
    ("k0L", "separation phase k0L, or a comma-separated list"),
    ("k0L-min", "start of a k0L scan"),
    ("k0L-max", "end of a k0L scan"),
    ("k0L-points", "number of points in a k0L scan"),
    ("delta-min", "transmission map: lowest photon detuning"),
    ("delta-max", "transmission map: highest photon detuning"),
    ("delta-points", "transmission map: number of detunings"),
    ("phase-min", "transmission map: lowest 2kL"),
    ("phase-max", "transmission map: highest 2kL"),
    ("phase-points", "transmission map: number of 2kL values"),
    ("delta", "g2: detuning ck - ω0 of the incident photons"),
    ("channel", "g2: transmitted | reflected | both"),
    ("tau-max", "g2: largest delay"),
    ("tau-step", "g2: delay spacing"),
    ("omega1", "concurrence: Rabi frequency on qubit 1"),
    ("omega2", "concurrence: Rabi frequency on qubit 2"),
    ("drive-detuning", "concurrence: drive frequency minus ω0"),
    ("mode", "concurrence: markov | renormalized | both"),
    ("re-half-width", "pole list: half-width of the searched window around ω0"),
    ("im-min", "pole list: lowest imaginary part searched"),
    ("step", "pole continuation step in k0L"),
    ("quad-tol", "two-photon quadrature tolerance"),
    ("window", "two-photon initial frequency window"),
    ("max-refine", "two-photon maximum refinements"),
    ("mesh", "two-photon initial mesh spacing"),
    ("out", "output path, - for stdout"),
    ("format", "csv | json"),
];

fn schema_hint() -> String {
    let keys: Vec<&str> = SCHEMA.iter().map(|(k, _)| *k).collect();
    format!("expected `key = value` lines with keys: {}", keys.join(", "))
}

#[derive(Debug, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
    used: RefCell<Vec<(String, String)>>,
}

impl Config {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("config: cannot read {}: {e}", path.display())))?;
        let mut cfg = Config::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::Config(format!("config: {}:{}: missing `=`; {}", path.display(), n + 1, schema_hint())));
            };
            cfg.set(k.trim(), v.trim())?;
        }
        if cfg.values.is_empty() {
            return Err(CliError::Config(format!("config: {} has no entries; {}", path.display(), schema_hint())));
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        if !SCHEMA.iter().any(|(k, _)| *k == key) {
            return Err(CliError::Config(format!("config: unknown key `{key}`; {}", schema_hint())));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    fn record(&self, key: &str, value: String) {
        let mut used = self.used.borrow_mut();
        if !used.iter().any(|(k, _)| k == key) {
            used.push((key.to_string(), value));
        }
    }

    /// Keys read so far with their resolved values, in reading order.
    pub fn used(&self) -> Vec<(String, String)> {
        self.used.borrow().clone()
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn f64(&self, key: &str, default: f64) -> Result<f64, CliError> {
        let v = match self.raw(key) {
            Some(s) => parse_number(s).map_err(|e| CliError::Config(format!("config: `{key}`: {e}")))?,
            None => default,
        };
        self.record(key, v.to_string());
        Ok(v)
    }

    pub fn list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        let v = match self.raw(key) {
            Some(s) => {
                s.split(',').map(parse_number).collect::<Result<Vec<_>, _>>().map_err(|e| CliError::Config(format!("config: `{key}`: {e}")))?
            }
            None => default.to_vec(),
        };
        if v.is_empty() {
            return Err(CliError::Config(format!("config: `{key}` is empty")));
        }
        self.record(key, v.iter().map(f64::to_string).collect::<Vec<_>>().join(","));
        Ok(v)
    }

    pub fn count(&self, key: &str, default: usize) -> Result<usize, CliError> {
        let v = match self.raw(key) {
            Some(s) => s.trim().parse::<usize>().map_err(|_| CliError::Config(format!("config: `{key}` must be a positive integer, got `{s}`")))?,
            None => default,
        };
        if v == 0 {
            return Err(CliError::Config(format!("config: `{key}` must be positive")));
        }
        self.record(key, v.to_string());
        Ok(v)
    }

    /// One of `allowed`, the first being the default.
    pub fn choice(&self, key: &str, allowed: &[&'static str]) -> Result<&'static str, CliError> {
        let v = match self.raw(key) {
            Some(s) => *allowed
                .iter()
                .find(|a| **a == s.trim())
                .ok_or_else(|| CliError::Config(format!("config: `{key}` must be one of {}, got `{s}`", allowed.join(" | "))))?,
            None => allowed[0],
        };
        self.record(key, v.to_string());
        Ok(v)
    }

    pub fn string(&self, key: &str, default: &str) -> String {
        let v = self.raw(key).unwrap_or(default).to_string();
        self.record(key, v.clone());
        v
    }
}

/// A real number with an optional `pi` factor: `2.5`, `pi`, `-0.5pi`, `25.5 pi`.
pub fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let bad = || format!("cannot parse `{s}` as a number");
    let v = match s.strip_suffix("pi") {
        Some(m) => {
            let m = m.trim();
            let coef = match m {
                "" | "+" => 1.0,
                "-" => -1.0,
                _ => m.parse::<f64>().map_err(|_| bad())?,
            };
            coef * PI
        }
        None => s.parse::<f64>().map_err(|_| bad())?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}
