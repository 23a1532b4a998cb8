//! Corpus ingestion, curation, and scanning.
//!
//! A corpus is an ordered list of immutable documents plus a datasheet that
//! records every curation decision. The corpus-level identity is a Merkle
//! root over document content hashes, so any byte change anywhere is visible
//! at the root.

mod dedup;
mod leakage;

pub use dedup::DedupStats;
pub use leakage::{scan_eval_leakage, ContaminationMatch, ContaminationReport};

use crate::error::{Error, Result};
use crate::hash::{digest, digest_parts, merkle_root, Digest};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LicenseTag {
    Open,
    AllRightsReserved,
    Entrusted,
}

impl fmt::Display for LicenseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LicenseTag::Open => "open",
            LicenseTag::AllRightsReserved => "all-rights-reserved",
            LicenseTag::Entrusted => "entrusted",
        };
        f.write_str(s)
    }
}

/// One ingested record. Immutable after ingestion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: u64,
    #[serde(with = "text_bytes")]
    pub text: Vec<u8>,
    pub source_uri: String,
    pub license_tag: LicenseTag,
    pub content_hash: Digest,
}

impl Document {
    fn new(ordinal: u64, text: Vec<u8>, source_uri: String, license_tag: LicenseTag) -> Document {
        let content_hash = digest(&text);
        // Stable id: hash of (ordinal, content), so identical records at
        // different positions still get distinct ids.
        let doc_id = digest_parts(&[&ordinal.to_be_bytes(), &content_hash.0]).prefix_u64();
        Document {
            doc_id,
            text,
            source_uri,
            license_tag,
            content_hash,
        }
    }
}

/// Text payloads may be arbitrary bytes; serialize as UTF-8 when possible,
/// base64 otherwise.
mod text_bytes {
    use base64::engine::general_purpose::STANDARD;
    use base64::Engine;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Utf8 { utf8: String },
        Base64 { base64: String },
    }

    pub fn serialize<S: Serializer>(bytes: &[u8], ser: S) -> Result<S::Ok, S::Error> {
        match std::str::from_utf8(bytes) {
            Ok(s) => Repr::Utf8 {
                utf8: s.to_string(),
            }
            .serialize(ser),
            Err(_) => Repr::Base64 {
                base64: STANDARD.encode(bytes),
            }
            .serialize(ser),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<u8>, D::Error> {
        match Repr::deserialize(de)? {
            Repr::Utf8 { utf8 } => Ok(utf8.into_bytes()),
            Repr::Base64 { base64 } => STANDARD
                .decode(base64.as_bytes())
                .map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasheetEntry {
    pub decision: String,
    pub justification: String,
}

/// Running documentation of corpus provenance and curation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Datasheet {
    pub creation_date: String,
    pub source_summary: String,
    pub decisions: Vec<DatasheetEntry>,
    /// Document counts per license tag at ingestion.
    pub license_counts: Vec<(String, usize)>,
    pub dedup_stats: Option<DedupStats>,
}

impl Datasheet {
    pub fn record(&mut self, decision: impl Into<String>, justification: impl Into<String>) {
        self.decisions.push(DatasheetEntry {
            decision: decision.into(),
            justification: justification.into(),
        });
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub corpus_id: String,
    pub documents: Vec<Document>,
    pub datasheet: Datasheet,
    pub safety_partition: BTreeSet<u64>,
}

impl Corpus {
    pub fn total_bytes(&self) -> u64 {
        self.documents.iter().map(|d| d.text.len() as u64).sum()
    }

    /// Merkle root over document content hashes, in document order.
    pub fn merkle_root(&self) -> Digest {
        let leaves: Vec<Digest> = self.documents.iter().map(|d| d.content_hash).collect();
        merkle_root(&leaves)
    }

    /// Documents eligible for licensing: everything outside the safety
    /// partition.
    pub fn licensable_documents(&self) -> impl Iterator<Item = &Document> {
        self.documents
            .iter()
            .filter(|d| !self.safety_partition.contains(&d.doc_id))
    }

    pub fn doc_ids(&self) -> BTreeSet<u64> {
        self.documents.iter().map(|d| d.doc_id).collect()
    }

    /// Concatenated licensable text, the token stream models train on.
    pub fn training_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.total_bytes() as usize);
        for d in self.licensable_documents() {
            out.extend_from_slice(&d.text);
        }
        out
    }

    /// Machine-readable manifest: ids, hashes, Merkle root.
    pub fn manifest(&self) -> CorpusManifest {
        CorpusManifest {
            corpus_id: self.corpus_id.clone(),
            merkle_root: self.merkle_root(),
            total_bytes: self.total_bytes(),
            document_count: self.documents.len(),
            documents: self
                .documents
                .iter()
                .map(|d| ManifestEntry {
                    doc_id: d.doc_id,
                    content_hash: d.content_hash,
                    bytes: d.text.len() as u64,
                    license_tag: d.license_tag,
                    source_uri: d.source_uri.clone(),
                })
                .collect(),
            safety_partition: self.safety_partition.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub corpus_id: String,
    pub merkle_root: Digest,
    pub total_bytes: u64,
    pub document_count: usize,
    pub documents: Vec<ManifestEntry>,
    pub safety_partition: BTreeSet<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub doc_id: u64,
    pub content_hash: Digest,
    pub bytes: u64,
    pub license_tag: LicenseTag,
    pub source_uri: String,
}

/// Evaluation set held apart from training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSet {
    pub eval_id: String,
    #[serde(with = "eval_items")]
    pub items: Vec<Vec<u8>>,
    pub registered_hash: Digest,
}

impl EvalSet {
    pub fn new(eval_id: impl Into<String>, items: Vec<Vec<u8>>) -> EvalSet {
        let registered_hash = Self::bind(&items);
        EvalSet {
            eval_id: eval_id.into(),
            items,
            registered_hash,
        }
    }

    fn bind(items: &[Vec<u8>]) -> Digest {
        let parts: Vec<&[u8]> = items.iter().map(|i| i.as_slice()).collect();
        digest_parts(&parts)
    }

    /// True iff the registered hash still binds the items.
    pub fn verify_binding(&self) -> bool {
        Self::bind(&self.items) == self.registered_hash
    }
}

mod eval_items {
    use base64::engine::general_purpose::STANDARD;
    use base64::Engine;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(items: &[Vec<u8>], ser: S) -> Result<S::Ok, S::Error> {
        let encoded: Vec<String> = items.iter().map(|i| STANDARD.encode(i)).collect();
        encoded.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<Vec<u8>>, D::Error> {
        let encoded: Vec<String> = Vec::deserialize(de)?;
        encoded
            .iter()
            .map(|s| STANDARD.decode(s.as_bytes()).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Ingest local files into a corpus, one document per logical record.
///
/// Files ending in `.jsonl` are parsed as one JSON object per line with a
/// required `text` field and an optional `uri` field; anything else is
/// treated as plain text with one record per line (the line keeps its
/// trailing newline, blank lines are skipped).
pub fn ingest<P: AsRef<Path>>(
    corpus_id: impl Into<String>,
    paths: &[P],
    source_uri: &str,
    license_tag: LicenseTag,
) -> Result<Corpus> {
    let mut records: Vec<(Vec<u8>, String)> = Vec::new();
    for path in paths {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::UnreadableInput {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        let is_jsonl = path.extension().is_some_and(|e| e == "jsonl");
        if is_jsonl {
            parse_jsonl_records(&bytes, source_uri, path, &mut records)?;
        } else {
            parse_plain_records(&bytes, source_uri, &mut records);
        }
    }
    ingest_records(corpus_id, records, source_uri, license_tag)
}

fn parse_plain_records(bytes: &[u8], source_uri: &str, out: &mut Vec<(Vec<u8>, String)>) {
    for line in bytes.split_inclusive(|&b| b == b'\n') {
        let content = match line.last() {
            Some(b'\n') => &line[..line.len() - 1],
            _ => line,
        };
        if content.is_empty() {
            continue;
        }
        out.push((line.to_vec(), source_uri.to_string()));
    }
}

fn parse_jsonl_records(
    bytes: &[u8],
    source_uri: &str,
    path: &Path,
    out: &mut Vec<(Vec<u8>, String)>,
) -> Result<()> {
    #[derive(Deserialize)]
    struct JsonlRecord {
        text: String,
        uri: Option<String>,
    }
    for (lineno, line) in bytes.split(|&b| b == b'\n').enumerate() {
        if line.iter().all(|b| b.is_ascii_whitespace()) {
            continue;
        }
        let rec: JsonlRecord =
            serde_json::from_slice(line).map_err(|e| Error::UnreadableInput {
                path: format!("{}:{}", path.display(), lineno + 1),
                reason: format!("bad JSONL record: {e}"),
            })?;
        let uri = rec.uri.unwrap_or_else(|| source_uri.to_string());
        out.push((rec.text.into_bytes(), uri));
    }
    Ok(())
}

/// Build a corpus from in-memory records. Used by `ingest` and by tests
/// and generators that never touch the filesystem.
pub fn ingest_records(
    corpus_id: impl Into<String>,
    records: Vec<(Vec<u8>, String)>,
    source_summary: &str,
    license_tag: LicenseTag,
) -> Result<Corpus> {
    if records.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let documents: Vec<Document> = records
        .into_iter()
        .enumerate()
        .map(|(i, (text, uri))| Document::new(i as u64, text, uri, license_tag))
        .collect();

    let mut datasheet = Datasheet {
        creation_date: today(),
        source_summary: source_summary.to_string(),
        ..Datasheet::default()
    };
    datasheet.license_counts = vec![(license_tag.to_string(), documents.len())];
    datasheet.record(
        format!("ingested {} records", documents.len()),
        format!("source: {source_summary}, license: {license_tag}"),
    );

    Ok(Corpus {
        corpus_id: corpus_id.into(),
        documents,
        datasheet,
        safety_partition: BTreeSet::new(),
    })
}

/// Move flagged documents into the safety partition. The documents stay in
/// the corpus (the main licensing view excludes them); the datasheet records
/// the decision.
pub fn partition_safety(
    mut corpus: Corpus,
    flagged: &BTreeSet<u64>,
    justification: &str,
) -> Result<Corpus> {
    let known = corpus.doc_ids();
    for id in flagged {
        if !known.contains(id) {
            return Err(Error::UnknownDocument(*id));
        }
    }
    corpus.safety_partition.extend(flagged.iter().copied());
    let remaining = corpus.licensable_documents().count();
    let mut decision = format!(
        "partitioned {} documents as safety-flagged ({} licensable remain)",
        flagged.len(),
        remaining
    );
    if remaining == 0 {
        decision.push_str("; warning: licensable view is empty");
    }
    corpus.datasheet.record(decision, justification);
    Ok(corpus)
}

/// Render the datasheet as Markdown.
pub fn emit_datasheet(corpus: &Corpus) -> String {
    let ds = &corpus.datasheet;
    let mut out = String::new();
    out.push_str(&format!("# Datasheet for corpus `{}`\n\n", corpus.corpus_id));
    out.push_str(&format!("- created: {}\n", ds.creation_date));
    out.push_str(&format!("- sources: {}\n", ds.source_summary));
    out.push_str(&format!("- documents: {}\n", corpus.documents.len()));
    out.push_str(&format!("- total bytes: {}\n", corpus.total_bytes()));
    out.push_str(&format!("- merkle root: {}\n", corpus.merkle_root()));
    out.push_str(&format!(
        "- safety partition: {} documents\n",
        corpus.safety_partition.len()
    ));
    out.push_str("\n## License counts\n\n");
    for (tag, n) in &ds.license_counts {
        out.push_str(&format!("- {tag}: {n}\n"));
    }
    if let Some(stats) = &ds.dedup_stats {
        out.push_str("\n## Deduplication\n\n");
        out.push_str(&format!("- exact duplicates removed: {}\n", stats.exact_removed));
        out.push_str(&format!("- near duplicates removed: {}\n", stats.near_removed));
        out.push_str(&format!("- jaccard threshold: {}\n", stats.jaccard_threshold));
    }
    out.push_str("\n## Curation decisions\n\n");
    if ds.decisions.is_empty() {
        out.push_str("(none)\n");
    }
    for (i, e) in ds.decisions.iter().enumerate() {
        out.push_str(&format!("{}. {} — {}\n", i + 1, e.decision, e.justification));
    }
    out
}

fn today() -> String {
    // Days since epoch rendered as an ISO date; avoids a clock/timezone
    // dependency in a library that must stay deterministic everywhere else.
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let days = secs / 86_400;
    civil_from_days(days as i64)
}

/// Gregorian date from days since 1970-01-01 (Howard Hinnant's algorithm).
fn civil_from_days(z: i64) -> String {
    let z = z + 719_468;
    let era = if z >= 0 { z } else { z - 146_096 } / 146_097;
    let doe = z - era * 146_097;
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = doy - (153 * mp + 2) / 5 + 1;
    let m = if mp < 10 { mp + 3 } else { mp - 9 };
    let y = if m <= 2 { y + 1 } else { y };
    format!("{y:04}-{m:02}-{d:02}")
}

pub use dedup::dedup;

#[cfg(test)]
mod tests;
