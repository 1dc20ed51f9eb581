//! Resolved run configuration: per-command defaults, then the config file,
//! then command-line flags.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use super::CliError;

/// Every key accepted by the config file (and, with `--`, on the command line).
pub const KEYS: &[&str] = &[
    "command",
    "M",
    "P",
    "c2",
    "c",
    "rho",
    "model",
    "theorem",
    "variant",
    "inner",
    "seed",
    "samples",
    "alpha-bar",
    "target",
    "source",
    "format",
    "output",
    "threads",
];

/// Keys that never change the numerical output; left out of the echoed
/// header and the config hash.
const SILENT_KEYS: &[&str] = &["output", "threads"];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        debug_assert!(KEYS.contains(&key), "{key}");
        // the two gain keys are alternatives: the later layer decides
        match key {
            "c" => {
                self.values.remove("c2");
            }
            "c2" => {
                self.values.remove("c");
            }
            _ => {}
        }
        self.values.insert(key.to_string(), value.into());
    }

    /// Overlays every key of `other` on top of `self`.
    pub fn overlay(&mut self, other: &RunConfig) {
        for (k, v) in &other.values {
            self.set(k, v.clone());
        }
    }

    /// Parses `key = value` lines; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("config line {}: expected `key = value`", i + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(CliError::Usage(format!(
                    "config line {}: unknown key `{key}` (valid keys: {})",
                    i + 1,
                    KEYS.join(", ")
                )));
            }
            if cfg.values.contains_key(key) {
                return Err(CliError::Usage(format!(
                    "config line {}: duplicate key `{key}`",
                    i + 1
                )));
            }
            if (key == "c" && cfg.values.contains_key("c2"))
                || (key == "c2" && cfg.values.contains_key("c"))
            {
                return Err(CliError::Usage("give either `c` or `c2`, not both".into()));
            }
            cfg.values.insert(key.to_string(), value.to_string());
        }
        Ok(cfg)
    }

    /// Config-file text that reproduces this configuration.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.values {
            writeln!(out, "{k} = {v}").expect("write to string");
        }
        out
    }

    /// Lines echoed into output headers (everything that affects results).
    pub fn echoed(&self) -> Vec<(&str, &str)> {
        self.values
            .iter()
            .filter(|(k, _)| !SILENT_KEYS.contains(&k.as_str()))
            .map(|(k, v)| (k.as_str(), v.as_str()))
            .collect()
    }

    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in self.echoed() {
            h.update(k.as_bytes());
            h.update(b"=");
            h.update(v.as_bytes());
            h.update(b"\n");
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Object(
            self.echoed()
                .into_iter()
                .map(|(k, v)| (k.to_string(), serde_json::Value::String(v.into())))
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_dump_round_trip() {
        let text = "# comment\nM = 3\n\nP=10\nc2 = 1,4\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.get("M"), Some("3"));
        assert_eq!(cfg.get("c2"), Some("1,4"));
        assert_eq!(RunConfig::parse(&cfg.dump()).unwrap(), cfg);
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        assert!(matches!(
            RunConfig::parse("bogus = 1"),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            RunConfig::parse("M = 1\nM = 2"),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            RunConfig::parse("c = 1\nc2 = 2"),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(RunConfig::parse("M 2"), Err(CliError::Usage(_))));
    }

    #[test]
    fn later_gain_key_replaces_earlier() {
        let mut base = RunConfig::default();
        base.set("c2", "4");
        let mut top = RunConfig::default();
        top.set("c", "3");
        base.overlay(&top);
        assert_eq!(base.get("c2"), None);
        assert_eq!(base.get("c"), Some("3"));
    }

    #[test]
    fn hash_ignores_threads_and_output() {
        let mut a = RunConfig::default();
        a.set("M", "2");
        let mut b = a.clone();
        b.set("threads", "8");
        b.set("output", "x.csv");
        assert_eq!(a.hash(), b.hash());
        b.set("M", "3");
        assert_ne!(a.hash(), b.hash());
    }
}
