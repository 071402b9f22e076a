//! Flat `key = value` text files: run manifests and analysis summaries.

use std::fmt::Write as _;
use std::path::Path;

use super::write_atomic;
use crate::error::{Error, Result};
use crate::sim::Manifest;

/// Ordered key-value document. Keys are unique.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct KeyValues {
    entries: Vec<(String, String)>,
}

impl KeyValues {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::Format(format!("missing key {key:?}")))
    }

    pub fn parse_value<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let v = self.require(key)?;
        v.parse()
            .map_err(|_| Error::Format(format!("bad value {v:?} for {key:?}")))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut kv = KeyValues::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("line {}: expected `key = value`", n + 1)))?;
            let k = k.trim();
            if kv.get(k).is_some() {
                return Err(Error::Format(format!(
                    "line {}: duplicate key {k:?}",
                    n + 1
                )));
            }
            kv.push(k, v.trim());
        }
        Ok(kv)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_text().as_bytes())
    }
}

pub fn manifest_to_kv(m: &Manifest) -> KeyValues {
    let mut kv = KeyValues::new();
    kv.push("seed", m.seed);
    kv.push("config_hash", format!("{:016x}", m.config_hash));
    kv.push("duration_s", format!("{:?}", m.duration_s));
    kv.push("mean_current", format!("{:?}", m.mean_current));
    kv.push("pairs_generated", m.pairs_generated);
    kv.push("pairs_signal_arrived", m.pairs_signal_arrived);
    kv.push("pairs_idler_arrived", m.pairs_idler_arrived);
    kv.push("pairs_both_arrived", m.pairs_both_arrived);
    kv.push("pairs_recorded", m.pairs_recorded);
    for (i, d) in ["1", "2"].iter().enumerate() {
        kv.push(format!("recorded_{d}"), m.recorded[i]);
        kv.push(format!("dropped_by_response_{d}"), m.dropped_by_response[i]);
        kv.push(
            format!("dropped_by_dead_time_{d}"),
            m.dropped_by_dead_time[i],
        );
    }
    for (k, v) in &m.arrivals {
        kv.push(format!("arrivals.{k}"), v);
    }
    kv
}

pub fn manifest_from_kv(kv: &KeyValues) -> Result<Manifest> {
    let mut m = Manifest {
        seed: kv.parse_value("seed")?,
        config_hash: u64::from_str_radix(kv.require("config_hash")?, 16)
            .map_err(|_| Error::Format("bad config_hash".into()))?,
        duration_s: kv.parse_value("duration_s")?,
        mean_current: kv.parse_value("mean_current")?,
        pairs_generated: kv.parse_value("pairs_generated")?,
        pairs_signal_arrived: kv.parse_value("pairs_signal_arrived")?,
        pairs_idler_arrived: kv.parse_value("pairs_idler_arrived")?,
        pairs_both_arrived: kv.parse_value("pairs_both_arrived")?,
        pairs_recorded: kv.parse_value("pairs_recorded")?,
        ..Manifest::default()
    };
    for (i, d) in ["1", "2"].iter().enumerate() {
        m.recorded[i] = kv.parse_value(&format!("recorded_{d}"))?;
        m.dropped_by_response[i] = kv.parse_value(&format!("dropped_by_response_{d}"))?;
        m.dropped_by_dead_time[i] = kv.parse_value(&format!("dropped_by_dead_time_{d}"))?;
    }
    for (k, _) in kv.entries() {
        if let Some(name) = k.strip_prefix("arrivals.") {
            m.arrivals.insert(name.to_string(), kv.parse_value(k)?);
        }
    }
    Ok(m)
}

pub fn write_manifest(m: &Manifest, path: &Path) -> Result<()> {
    manifest_to_kv(m).write(path)
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    manifest_from_kv(&KeyValues::read(path)?)
}
