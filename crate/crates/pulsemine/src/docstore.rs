//! Append-only document store with heuristic ingestion filters.
//!
//! A store is a directory holding one `documents.jsonl` file, one JSON
//! object per line. The full id set is rebuilt from the file on open, so
//! the file itself is the only source of truth; appends are flushed per
//! document and duplicates (by id) are dropped.

use std::collections::HashSet;
use std::fs::{self, OpenOptions};
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDateTime, Utc};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::textnorm;

pub const DOCUMENTS_FILE: &str = "documents.jsonl";

/// Timestamps are second-precision UTC, serialized as `YYYY-MM-DDThh:mm:ssZ`.
const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M:%SZ";

pub fn parse_timestamp(s: &str) -> Result<DateTime<Utc>> {
    NaiveDateTime::parse_from_str(s, TIMESTAMP_FORMAT)
        .map(|naive| naive.and_utc())
        .map_err(|_| StoreError::BadTimestamp(s.to_string()))
}

pub fn format_timestamp(ts: DateTime<Utc>) -> String {
    ts.format(TIMESTAMP_FORMAT).to_string()
}

fn serialize_timestamp<S: Serializer>(
    ts: &DateTime<Utc>,
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&format_timestamp(*ts))
}

fn deserialize_timestamp<'de, D: Deserializer<'de>>(
    de: D,
) -> std::result::Result<DateTime<Utc>, D::Error> {
    let s = String::deserialize(de)?;
    parse_timestamp(&s).map_err(|_| {
        D::Error::custom(format!("timestamp not in YYYY-MM-DDThh:mm:ssZ form: {s:?}"))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

/// One stored message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub author: String,
    #[serde(
        serialize_with = "serialize_timestamp",
        deserialize_with = "deserialize_timestamp"
    )]
    pub timestamp: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geo: Option<GeoPoint>,
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lang: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("store file corrupt at line {line}: {reason}")]
    Corrupt { line: usize, reason: String },
    #[error("timestamp not in YYYY-MM-DDThh:mm:ssZ form: {0:?}")]
    BadTimestamp(String),
    #[error("invalid heuristics config: {0}")]
    BadHeuristics(String),
    #[error("invalid scan range: from {from} is after to {to}")]
    BadRange { from: String, to: String },
    #[error("ingest stopped after {accepted} accepted documents: {source}")]
    IngestWrite {
        accepted: usize,
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, StoreError>;

/// Filter deciding which raw documents enter a store. Clauses combine with
/// OR: a document is accepted when any configured clause matches. An empty
/// config accepts everything.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Heuristics {
    /// Phrases matched as contiguous normalized-token subsequences.
    #[serde(default)]
    pub search: Vec<String>,
    /// Author names, matched case-insensitively.
    #[serde(default)]
    pub users: Vec<String>,
    /// Inclusive bounding box on document geo points.
    #[serde(default)]
    pub geo: Option<GeoBox>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeoBox {
    pub min_lat: f64,
    pub max_lat: f64,
    pub min_lon: f64,
    pub max_lon: f64,
}

impl GeoBox {
    pub fn contains(&self, p: GeoPoint) -> bool {
        p.lat >= self.min_lat && p.lat <= self.max_lat && p.lon >= self.min_lon && p.lon <= self.max_lon
    }
}

impl Heuristics {
    pub fn from_json(json: &str) -> Result<Self> {
        let h: Heuristics =
            serde_json::from_str(json).map_err(|e| StoreError::BadHeuristics(e.to_string()))?;
        if let Some(g) = &h.geo {
            if g.min_lat > g.max_lat || g.min_lon > g.max_lon {
                return Err(StoreError::BadHeuristics(format!(
                    "empty geo box: lat {}..{}, lon {}..{}",
                    g.min_lat, g.max_lat, g.min_lon, g.max_lon
                )));
            }
        }
        Ok(h)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn is_empty(&self) -> bool {
        self.search.is_empty() && self.users.is_empty() && self.geo.is_none()
    }

    /// True when any clause matches (or no clause is configured).
    pub fn matches(&self, doc: &Document) -> bool {
        if self.is_empty() {
            return true;
        }
        if !self.search.is_empty() {
            let tokens = textnorm::normalize_surfaces(&doc.text);
            for phrase in &self.search {
                let needle = textnorm::normalize_surfaces(phrase);
                if !needle.is_empty() && contains_subsequence(&tokens, &needle) {
                    return true;
                }
            }
        }
        if !self.users.is_empty() {
            let author = doc.author.to_lowercase();
            if self.users.iter().any(|u| u.to_lowercase() == author) {
                return true;
            }
        }
        if let (Some(bbox), Some(point)) = (&self.geo, doc.geo) {
            if bbox.contains(point) {
                return true;
            }
        }
        false
    }
}

fn contains_subsequence(haystack: &[String], needle: &[String]) -> bool {
    if needle.len() > haystack.len() {
        return false;
    }
    haystack
        .windows(needle.len())
        .any(|w| w.iter().zip(needle).all(|(a, b)| a == b))
}

/// Counters reported by one ingest run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestStats {
    /// Lines read from the input, including bad ones.
    pub read: usize,
    /// Documents matching the heuristics and newly appended.
    pub accepted: usize,
    /// Documents matching the heuristics but already present.
    pub duplicates: usize,
    /// Lines that failed to parse plus documents failing every clause.
    pub rejected: usize,
}

#[derive(Debug)]
pub struct DocStore {
    path: PathBuf,
    documents: Vec<Document>,
    ids: HashSet<String>,
}

impl DocStore {
    /// Opens (creating if needed) the store directory.
    ///
    /// A torn final line, the mark of an interrupted append, is truncated
    /// away with a warning. A malformed line anywhere earlier is corruption
    /// and refuses the whole store.
    pub fn open(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let path = dir.join(DOCUMENTS_FILE);
        let mut documents = Vec::new();
        let mut ids = HashSet::new();
        if path.exists() {
            let data = fs::read_to_string(&path)?;
            let mut keep = data.len();
            let mut lines: Vec<&str> = data.split('\n').collect();
            // split('\n') on "a\nb\n" yields ["a", "b", ""]; a missing final
            // terminator means the last element is a torn line.
            match lines.pop() {
                Some("") | None => {}
                Some(torn) => {
                    keep = data.len() - torn.len();
                    log::warn!(
                        "store {}: dropping torn trailing line ({} bytes)",
                        path.display(),
                        torn.len()
                    );
                }
            }
            for (i, line) in lines.iter().enumerate() {
                let doc: Document = serde_json::from_str(line).map_err(|e| StoreError::Corrupt {
                    line: i + 1,
                    reason: e.to_string(),
                })?;
                if !ids.insert(doc.id.clone()) {
                    return Err(StoreError::Corrupt {
                        line: i + 1,
                        reason: format!("duplicate document id {:?}", doc.id),
                    });
                }
                documents.push(doc);
            }
            if keep < data.len() {
                let f = OpenOptions::new().write(true).open(&path)?;
                f.set_len(keep as u64)?;
                f.sync_all()?;
            }
        }
        Ok(DocStore { path, documents, ids })
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.ids.contains(id)
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.id == id)
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    /// Appends one document unless its id is already present. Returns true
    /// when the document was written.
    pub fn append(&mut self, doc: Document) -> Result<bool> {
        if self.ids.contains(&doc.id) {
            return Ok(false);
        }
        let mut line = serde_json::to_string(&doc).map_err(|e| StoreError::Corrupt {
            line: self.documents.len() + 1,
            reason: e.to_string(),
        })?;
        line.push('\n');
        let mut file = OpenOptions::new().create(true).append(true).open(&self.path)?;
        file.write_all(line.as_bytes())?;
        file.flush()?;
        self.ids.insert(doc.id.clone());
        self.documents.push(doc);
        Ok(true)
    }

    /// Reads JSONL documents from `input`, keeps those matching `heuristics`,
    /// appends the new ones and tallies the rest.
    ///
    /// Bad input lines are counted as rejected and logged, never fatal. A
    /// write failure is fatal and reports how many documents landed first.
    pub fn ingest<R: BufRead>(&mut self, input: R, heuristics: &Heuristics) -> Result<IngestStats> {
        let mut stats = IngestStats::default();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            stats.read += 1;
            let doc: Document = match serde_json::from_str(&line) {
                Ok(doc) => doc,
                Err(e) => {
                    log::warn!("ingest: skipping line {}: {}", i + 1, e);
                    stats.rejected += 1;
                    continue;
                }
            };
            if !heuristics.matches(&doc) {
                stats.rejected += 1;
                continue;
            }
            match self.append(doc) {
                Ok(true) => stats.accepted += 1,
                Ok(false) => stats.duplicates += 1,
                Err(StoreError::Io(e)) => {
                    return Err(StoreError::IngestWrite {
                        accepted: stats.accepted,
                        source: e,
                    })
                }
                Err(e) => return Err(e),
            }
        }
        Ok(stats)
    }

    /// Documents with `from <= timestamp <= to`, sorted by (timestamp, id).
    pub fn scan(&self, from: DateTime<Utc>, to: DateTime<Utc>) -> Result<Vec<&Document>> {
        if from > to {
            return Err(StoreError::BadRange {
                from: format_timestamp(from),
                to: format_timestamp(to),
            });
        }
        let mut hits: Vec<&Document> = self
            .documents
            .iter()
            .filter(|d| d.timestamp >= from && d.timestamp <= to)
            .collect();
        hits.sort_by(|a, b| (a.timestamp, &a.id).cmp(&(b.timestamp, &b.id)));
        Ok(hits)
    }

    /// Scan over the store's full timestamp range.
    pub fn scan_all(&self) -> Vec<&Document> {
        let mut hits: Vec<&Document> = self.documents.iter().collect();
        hits.sort_by(|a, b| (a.timestamp, &a.id).cmp(&(b.timestamp, &b.id)));
        hits
    }
}
