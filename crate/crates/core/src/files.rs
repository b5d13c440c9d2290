//! Readers for the line-delimited JSON files: corpus, networks, battery and
//! match results. Blank lines and lines starting with `#` are skipped.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::de::DeserializeOwned;

use crate::chess::BatteryCase;
use crate::error::FormatError;
use crate::lean::{CorpusEntry, CorpusRecord};
use crate::matcher::ResultRecord;
use crate::relnet::{NetworkRecord, RelationalNetwork, TypeRegistry};

fn read_text(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// `(1-based line number, content)` of every record line.
pub fn record_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn bad(path: &Path, line: usize, reason: impl ToString) -> FormatError {
    FormatError::Record {
        path: path.display().to_string(),
        line,
        reason: reason.to_string(),
    }
}

fn parse_all<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, FormatError> {
    let text = read_text(path)?;
    record_lines(&text)
        .map(|(n, l)| serde_json::from_str(l).map_err(|e| bad(path, n, e)))
        .collect()
}

/// Corpus entries that parsed, plus one warning per rejected line.
pub struct CorpusRead {
    pub entries: Vec<CorpusEntry>,
    pub warnings: Vec<FormatError>,
}

pub fn read_corpus(path: &Path) -> Result<CorpusRead, FormatError> {
    let text = read_text(path)?;
    let mut entries = Vec::new();
    let mut warnings = Vec::new();
    for (n, line) in record_lines(&text) {
        let parsed = serde_json::from_str::<CorpusRecord>(line)
            .map_err(|e| e.to_string())
            .and_then(|r| CorpusEntry::try_from(r).map_err(|e| e.to_string()));
        match parsed {
            Ok(e) => entries.push(e),
            Err(reason) => warnings.push(bad(path, n, reason)),
        }
    }
    Ok(CorpusRead { entries, warnings })
}

/// Reads network records, or corpus records whose proof states are turned
/// into networks. The kind is decided by the first record; any record that
/// does not fit it is an error naming that record.
pub fn read_networks(path: &Path) -> Result<Vec<RelationalNetwork>, FormatError> {
    let text = read_text(path)?;
    let mut lines = record_lines(&text).peekable();
    let Some(&(first_line, first)) = lines.peek() else {
        return Ok(Vec::new());
    };
    let value: serde_json::Value =
        serde_json::from_str(first).map_err(|e| bad(path, first_line, e))?;
    let is_corpus = value.get("tactic").is_some();
    let mut intern: Vec<Arc<TypeRegistry>> = Vec::new();
    let mut out = Vec::new();
    for (n, line) in lines {
        let net = if is_corpus {
            let rec: CorpusRecord = serde_json::from_str(line)
                .map_err(|e| bad(path, n, format!("corpus record: {e}")))?;
            let id = rec.id.clone();
            let entry = CorpusEntry::try_from(rec).map_err(|e| bad(path, n, e))?;
            entry
                .network()
                .ok_or_else(|| bad(path, n, format!("corpus record {id:?} has no proof state")))?
        } else {
            let rec: NetworkRecord = serde_json::from_str(line)
                .map_err(|e| bad(path, n, format!("network record: {e}")))?;
            rec.into_network(&mut intern).map_err(|e| bad(path, n, e))?
        };
        out.push(net);
    }
    Ok(out)
}

pub fn read_battery(path: &Path) -> Result<Vec<BatteryCase>, FormatError> {
    parse_all(path)
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRecord>, FormatError> {
    parse_all(path)
}
