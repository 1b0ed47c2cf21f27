//! Flat key-value experiment configuration with section headers.
//!
//! ```text
//! # comment
//! [weights]
//! spec = gevrey:s=2
//! jmax = 60
//!
//! [domain]
//! box = 0,1,0,1
//! ```
//!
//! Sections group related keys; values are plain strings interpreted by
//! the consumer. Command-line flags override file values. The recognized
//! keys are listed in `docs/CONFIG.md`.

use crate::error::Error;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Default)]
pub struct ExperimentConfig {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current = String::from("global");
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                current = name.trim().to_string();
                sections.entry(current.clone()).or_default();
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "line {}: expected `key = value` or `[section]`",
                    lineno + 1
                )));
            };
            sections
                .entry(current.clone())
                .or_default()
                .insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self { sections })
    }

    pub fn load(path: &std::path::Path) -> Result<Self, Error> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section).and_then(|m| m.get(key)).map(String::as_str)
    }

    pub fn get_parsed<T: std::str::FromStr>(
        &self,
        section: &str,
        key: &str,
    ) -> Result<Option<T>, Error> {
        match self.get(section, key) {
            None => Ok(None),
            Some(v) => v.parse::<T>().map(Some).map_err(|_| {
                Error::Config(format!("[{section}] {key}: cannot parse `{v}`"))
            }),
        }
    }

    pub fn set(&mut self, section: &str, key: &str, value: String) {
        self.sections.entry(section.into()).or_default().insert(key.into(), value);
    }

    /// Sections and keys, for validation output.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for (sec, kv) in &self.sections {
            for (k, v) in kv {
                out.push_str(&format!("{sec}.{k} = {v}\n"));
            }
        }
        out
    }
}
