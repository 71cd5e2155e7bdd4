//! Reference facts about smooth Fano threefolds, loaded from a TSV file.
//!
//! Format: a header line `name\trho\tkcube\tnotes\ttags`, then one entry per
//! line. Tags are comma-separated; a tag of the form `key:value` carries data
//! (for example `rcap:5` or `bidegree:2x1`).

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::rational::Rational;

pub const HEADER: &str = "name\trho\tkcube\tnotes\ttags";

pub const BUNDLED_TSV: &str = include_str!("../data/reference.tsv");

/// Entries every table must provide.
pub const REQUIRED: &[&str] = &[
    "MM2-15",
    "MM2-16",
    "MM2-18",
    "MM2-36",
    "MM3-5",
    "MM5-products",
    "P3",
    "Q",
    "V5",
    "P1xP2",
    "V3",
    "V6",
    "Y21",
    "P1xP1xP1",
];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RefTableError {
    #[error("cannot read reference table {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("reference table lacks required entry {0}")]
    MissingEntry(String),
    #[error("malformed reference row at line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("duplicate reference entry {name} at line {line}")]
    Duplicate { name: String, line: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceEntry {
    pub name: String,
    pub rho: u32,
    pub kcube: Rational,
    pub notes: String,
    pub tags: Vec<String>,
}

impl ReferenceEntry {
    pub fn has_tag(&self, tag: &str) -> bool {
        self.tags.iter().any(|t| t == tag)
    }

    /// Value of a `key:value` tag.
    pub fn tag_value(&self, key: &str) -> Option<&str> {
        self.tags.iter().find_map(|t| t.strip_prefix(key).and_then(|r| r.strip_prefix(':')))
    }

    pub fn tag_int(&self, key: &str) -> Option<i64> {
        self.tag_value(key)?.parse().ok()
    }

    /// Value of every `key:value` tag with the given key.
    pub fn tag_values<'a>(&'a self, key: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.tags.iter().filter_map(move |t| t.strip_prefix(key).and_then(|r| r.strip_prefix(':')))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceTable {
    pub entries: BTreeMap<String, ReferenceEntry>,
    pub provenance: String,
}

impl ReferenceTable {
    pub fn parse(text: &str, provenance: &str) -> Result<Self, RefTableError> {
        let mut lines = text.lines().enumerate();
        let mut entries = BTreeMap::new();
        match lines.next() {
            Some((_, h)) if h.trim_end_matches('\r') == HEADER => {}
            Some((i, _)) => {
                return Err(RefTableError::MalformedRow { line: i + 1, reason: "unexpected header".into() })
            }
            None => return Err(RefTableError::MissingEntry(REQUIRED[0].to_string())),
        }
        for (i, raw) in lines {
            let line = i + 1;
            let raw = raw.trim_end_matches('\r');
            if raw.trim().is_empty() || raw.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = raw.split('\t').collect();
            if fields.len() != 5 {
                return Err(RefTableError::MalformedRow {
                    line,
                    reason: format!("expected 5 fields, got {}", fields.len()),
                });
            }
            let name = fields[0].trim().to_string();
            if name.is_empty() {
                return Err(RefTableError::MalformedRow { line, reason: "empty name".into() });
            }
            let rho: u32 = fields[1]
                .trim()
                .parse()
                .map_err(|_| RefTableError::MalformedRow { line, reason: format!("bad rho {:?}", fields[1]) })?;
            let kcube: Rational = fields[2]
                .trim()
                .parse()
                .map_err(|_| RefTableError::MalformedRow { line, reason: format!("bad kcube {:?}", fields[2]) })?;
            if rho == 0 || !kcube.is_positive() {
                return Err(RefTableError::MalformedRow { line, reason: "rho and kcube must be positive".into() });
            }
            let tags = fields[4].split(',').map(str::trim).filter(|t| !t.is_empty()).map(String::from).collect();
            let entry = ReferenceEntry { name: name.clone(), rho, kcube, notes: fields[3].trim().to_string(), tags };
            if entries.insert(name.clone(), entry).is_some() {
                return Err(RefTableError::Duplicate { name, line });
            }
        }
        let table = ReferenceTable { entries, provenance: provenance.to_string() };
        table.validate()?;
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self, RefTableError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RefTableError::Io { path: path.display().to_string(), reason: e.to_string() })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn bundled() -> Self {
        Self::parse(BUNDLED_TSV, "bundled").expect("bundled reference table is valid")
    }

    pub fn validate(&self) -> Result<(), RefTableError> {
        for name in REQUIRED {
            if !self.entries.contains_key(*name) {
                return Err(RefTableError::MissingEntry(name.to_string()));
            }
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&ReferenceEntry, RefTableError> {
        self.entries.get(name).ok_or_else(|| RefTableError::MissingEntry(name.to_string()))
    }

    /// The entry carrying the tag `excludes:<key>`, if any.
    pub fn excluder(&self, key: &str) -> Option<&ReferenceEntry> {
        self.entries.values().find(|e| e.tag_values("excludes").any(|v| v == key))
    }

    pub fn endpoints(&self) -> impl Iterator<Item = &ReferenceEntry> {
        self.entries.values().filter(|e| e.has_tag("endpoint"))
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from(HEADER);
        out.push('\n');
        for e in self.entries.values() {
            out.push_str(&format!("{}\t{}\t{}\t{}\t{}\n", e.name, e.rho, e.kcube, e.notes, e.tags.join(",")));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_loads() {
        let t = ReferenceTable::bundled();
        let e = t.get("MM2-15").unwrap();
        assert_eq!(e.kcube, 22);
        assert_eq!(t.excluder("e1-P3-k1").unwrap().name, "MM2-15");
        assert_eq!(t.excluder("e1-dP4-k0").unwrap().name, "MM2-16");
        assert_eq!(t.get("Y21").unwrap().tag_value("bidegree"), Some("2x1"));
        assert_eq!(t.get("Y21").unwrap().tag_int("rcap"), Some(5));
        assert!(t.get("MM2-36").unwrap().has_tag("contains-plane"));
    }

    #[test]
    fn empty_is_missing_entry() {
        assert!(matches!(ReferenceTable::parse("", "t"), Err(RefTableError::MissingEntry(_))));
        assert!(matches!(ReferenceTable::parse(&format!("{HEADER}\n"), "t"), Err(RefTableError::MissingEntry(_))));
    }

    #[test]
    fn malformed_kcube_reports_line() {
        let text = format!("{HEADER}\nP3\t1\tsixty\tx\t\n");
        assert_eq!(
            ReferenceTable::parse(&text, "t"),
            Err(RefTableError::MalformedRow { line: 2, reason: "bad kcube \"sixty\"".into() })
        );
    }

    #[test]
    fn duplicates_rejected() {
        let text = format!("{HEADER}\nP3\t1\t64\tx\t\nP3\t1\t64\tx\t\n");
        assert!(matches!(ReferenceTable::parse(&text, "t"), Err(RefTableError::Duplicate { line: 3, .. })));
    }

    #[test]
    fn tsv_round_trip() {
        let t = ReferenceTable::bundled();
        let again = ReferenceTable::parse(&t.to_tsv(), "bundled").unwrap();
        assert_eq!(t, again);
    }
}
