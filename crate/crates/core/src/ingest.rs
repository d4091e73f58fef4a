//! Corpus ingestion: CoNLL-2012 coreference files and a JSON-lines document
//! schema, plus the canonical mention processing order.
//!
//! Token indices are document-global. CoNLL files carry per-sentence word
//! numbers; those are ignored and tokens are numbered in reading order.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::IngestError;
use crate::types::{validate_document, Candidate, Document, GoldCluster, MentionSpan};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CorpusFormat {
    Conll2012,
    JsonLines,
}

#[derive(Clone, Debug)]
pub struct CorpusSource {
    pub format: CorpusFormat,
    pub paths: Vec<PathBuf>,
}

impl CorpusSource {
    pub fn new(format: CorpusFormat, paths: Vec<PathBuf>) -> Self {
        Self { format, paths }
    }

    /// Reads every file in order. Documents keep file order, then in-file order.
    pub fn read(&self) -> Result<Vec<Document>, IngestError> {
        let mut docs = Vec::new();
        for path in &self.paths {
            docs.extend(read_file(self.format, path)?);
        }
        Ok(docs)
    }
}

pub fn read_file(format: CorpusFormat, path: &Path) -> Result<Vec<Document>, IngestError> {
    let text = fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let parsed = match format {
        CorpusFormat::Conll2012 => parse_conll(&text),
        CorpusFormat::JsonLines => parse_jsonl_corpus(&text),
    };
    parsed.map_err(|e| e.in_file(path))
}

/// Sorts spans by `(start, end)` and removes exact duplicates. Returns the
/// ordered spans and the number of duplicates dropped.
pub fn order_mentions(mut spans: Vec<MentionSpan>) -> (Vec<MentionSpan>, usize) {
    spans.sort();
    let before = spans.len();
    spans.dedup();
    let removed = before - spans.len();
    (spans, removed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Bracket {
    Open(u32),
    Close(u32),
    Single(u32),
}

fn parse_coref_column(col: &str, line: usize) -> Result<Vec<Bracket>, IngestError> {
    if col == "-" || col == "_" {
        return Ok(Vec::new());
    }
    let malformed = |message: String| IngestError::MalformedColumn { line, message };
    let bytes = col.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;

    let read_id = |i: &mut usize| -> Result<u32, IngestError> {
        let start = *i;
        while *i < bytes.len() && bytes[*i].is_ascii_digit() {
            *i += 1;
        }
        if start == *i {
            return Err(malformed(format!("expected cluster id in `{col}`")));
        }
        col[start..*i]
            .parse()
            .map_err(|_| malformed(format!("cluster id out of range in `{col}`")))
    };

    while i < bytes.len() {
        match bytes[i] {
            b'|' => i += 1,
            b'(' => {
                i += 1;
                let id = read_id(&mut i)?;
                if i < bytes.len() && bytes[i] == b')' {
                    i += 1;
                    out.push(Bracket::Single(id));
                } else {
                    out.push(Bracket::Open(id));
                }
            }
            b'0'..=b'9' => {
                let id = read_id(&mut i)?;
                if i < bytes.len() && bytes[i] == b')' {
                    i += 1;
                    out.push(Bracket::Close(id));
                } else {
                    return Err(malformed(format!("dangling id without `)` in `{col}`")));
                }
            }
            _ => return Err(malformed(format!("non-integer cluster id in `{col}`"))),
        }
    }
    Ok(out)
}

struct DocBuilder {
    doc_id: String,
    tokens: Vec<String>,
    sentence_boundaries: Vec<usize>,
    sentence_open: bool,
    /// Per id, stack of (start token, line of the open).
    open: HashMap<u32, Vec<(usize, usize)>>,
    clusters: BTreeMap<u32, Vec<MentionSpan>>,
}

impl DocBuilder {
    fn new(doc_id: String) -> Self {
        Self {
            doc_id,
            tokens: Vec::new(),
            sentence_boundaries: Vec::new(),
            sentence_open: false,
            open: HashMap::new(),
            clusters: BTreeMap::new(),
        }
    }

    fn finish(self) -> Result<Document, IngestError> {
        let unclosed = self
            .open
            .iter()
            .flat_map(|(&id, stack)| stack.iter().map(move |&(_, line)| (line, id)))
            .min();
        if let Some((line, id)) = unclosed {
            return Err(IngestError::UnbalancedBracket { line, id });
        }
        let gold = self
            .clusters
            .into_iter()
            .map(|(id, mentions)| GoldCluster::new(id, mentions))
            .collect();
        let mut doc = Document::with_gold(self.doc_id, self.tokens, gold);
        doc.sentence_boundaries = self.sentence_boundaries;
        Ok(doc)
    }
}

fn conll_doc_id(header: &str) -> String {
    // "#begin document (name); part 000"
    let rest = header.trim_start_matches("#begin document").trim();
    let (name, tail) = match (rest.find('('), rest.find(')')) {
        (Some(a), Some(b)) if a < b => (&rest[a + 1..b], &rest[b + 1..]),
        _ => (rest, ""),
    };
    let part = tail
        .trim_start_matches(';')
        .trim()
        .strip_prefix("part")
        .map(str::trim)
        .filter(|p| !p.is_empty());
    match part {
        Some(p) => format!("{name}_{p}"),
        None => name.to_string(),
    }
}

/// Parses a CoNLL-2012 file into one document per `#begin document` block.
/// Every `id)` closes the most recent unclosed `(id`.
pub fn parse_conll(text: &str) -> Result<Vec<Document>, IngestError> {
    let mut docs = Vec::new();
    let mut current: Option<DocBuilder> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.starts_with("#begin document") {
            if let Some(open) = current.take() {
                docs.push(open.finish()?);
            }
            current = Some(DocBuilder::new(conll_doc_id(trimmed)));
            continue;
        }
        if trimmed.starts_with("#end document") {
            if let Some(open) = current.take() {
                docs.push(open.finish()?);
            }
            continue;
        }
        let Some(doc) = current.as_mut() else {
            continue;
        };
        if trimmed.is_empty() {
            doc.sentence_open = false;
            continue;
        }
        if trimmed.starts_with('#') {
            continue;
        }

        let cols: Vec<&str> = trimmed.split_whitespace().collect();
        if cols.len() < 5 {
            return Err(IngestError::MalformedColumn {
                line,
                message: format!("expected at least 5 columns, found {}", cols.len()),
            });
        }
        let t = doc.tokens.len();
        if !doc.sentence_open {
            doc.sentence_boundaries.push(t);
            doc.sentence_open = true;
        }
        doc.tokens.push(cols[3].to_string());

        for b in parse_coref_column(cols[cols.len() - 1], line)? {
            match b {
                Bracket::Single(id) => doc
                    .clusters
                    .entry(id)
                    .or_default()
                    .push(MentionSpan::new(t, t)),
                Bracket::Open(id) => doc.open.entry(id).or_default().push((t, line)),
                Bracket::Close(id) => {
                    let start = doc
                        .open
                        .get_mut(&id)
                        .and_then(Vec::pop)
                        .ok_or(IngestError::UnbalancedBracket { line, id })?;
                    if doc.open.get(&id).is_some_and(Vec::is_empty) {
                        doc.open.remove(&id);
                    }
                    doc.clusters
                        .entry(id)
                        .or_default()
                        .push(MentionSpan::new(start.0, t));
                }
            }
        }
    }
    if let Some(open) = current.take() {
        docs.push(open.finish()?);
    }
    for doc in &mut docs {
        for c in &mut doc.gold_clusters {
            c.mentions.sort();
        }
    }
    Ok(docs)
}

fn schema(line: usize, key: &str) -> IngestError {
    IngestError::Schema {
        line,
        key: key.to_string(),
    }
}

fn as_index(v: &Value, line: usize, key: &str) -> Result<usize, IngestError> {
    v.as_u64()
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| schema(line, key))
}

fn as_span(v: &Value, line: usize, key: &str) -> Result<MentionSpan, IngestError> {
    match v.as_array().map(Vec::as_slice) {
        Some([s, e]) => Ok(MentionSpan::new(
            as_index(s, line, key)?,
            as_index(e, line, key)?,
        )),
        _ => Err(schema(line, key)),
    }
}

fn parse_jsonl_at(text: &str, line: usize) -> Result<Document, IngestError> {
    let value: Value = serde_json::from_str(text).map_err(|e| IngestError::MalformedColumn {
        line,
        message: e.to_string(),
    })?;
    let obj = value.as_object().ok_or_else(|| schema(line, "<root>"))?;

    let doc_id = obj
        .get("doc_id")
        .and_then(Value::as_str)
        .ok_or_else(|| schema(line, "doc_id"))?
        .to_string();
    let tokens = obj
        .get("tokens")
        .and_then(Value::as_array)
        .ok_or_else(|| schema(line, "tokens"))?
        .iter()
        .map(|t| {
            t.as_str()
                .map(str::to_string)
                .ok_or_else(|| schema(line, "tokens"))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let clusters = obj
        .get("gold_clusters")
        .and_then(Value::as_array)
        .ok_or_else(|| schema(line, "gold_clusters"))?;
    let mut gold = Vec::with_capacity(clusters.len());
    for (i, c) in clusters.iter().enumerate() {
        let mentions = c
            .as_array()
            .ok_or_else(|| schema(line, "gold_clusters"))?
            .iter()
            .map(|m| as_span(m, line, "gold_clusters"))
            .collect::<Result<Vec<_>, _>>()?;
        gold.push(GoldCluster::new(i as u32, mentions));
    }

    let genre = match obj.get("genre") {
        None | Some(Value::Null) => None,
        Some(g) => Some(g.as_str().ok_or_else(|| schema(line, "genre"))?.to_string()),
    };
    let sentence_boundaries = match obj.get("sentence_boundaries") {
        None | Some(Value::Null) => Vec::new(),
        Some(v) => v
            .as_array()
            .ok_or_else(|| schema(line, "sentence_boundaries"))?
            .iter()
            .map(|b| as_index(b, line, "sentence_boundaries"))
            .collect::<Result<_, _>>()?,
    };

    let mut doc = Document::with_gold(doc_id, tokens, gold);
    doc.genre = genre;
    doc.sentence_boundaries = sentence_boundaries;

    if let Some(v) = obj.get("candidate_mentions").filter(|v| !v.is_null()) {
        let key = "candidate_mentions";
        doc.candidate_mentions = v
            .as_array()
            .ok_or_else(|| schema(line, key))?
            .iter()
            .map(|m| match m.as_array().map(Vec::as_slice) {
                Some([s, e, score]) => Ok(Candidate {
                    span: MentionSpan::new(as_index(s, line, key)?, as_index(e, line, key)?),
                    score: score.as_f64().ok_or_else(|| schema(line, key))?,
                }),
                _ => Err(schema(line, key)),
            })
            .collect::<Result<_, _>>()?;
    }

    let violations = validate_document(&doc);
    if !violations.is_empty() {
        return Err(IngestError::MalformedColumn {
            line,
            message: violations.join("; "),
        });
    }
    Ok(doc)
}

/// Parses one JSON-lines document record.
pub fn parse_jsonl(line: &str) -> Result<Document, IngestError> {
    parse_jsonl_at(line, 1)
}

/// Parses a whole JSON-lines file, skipping blank lines.
pub fn parse_jsonl_corpus(text: &str) -> Result<Vec<Document>, IngestError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_jsonl_at(l, i + 1))
        .collect()
}

#[derive(Serialize)]
struct JsonDoc<'a> {
    doc_id: &'a str,
    tokens: &'a [String],
    #[serde(skip_serializing_if = "<[usize]>::is_empty")]
    sentence_boundaries: &'a [usize],
    #[serde(skip_serializing_if = "Option::is_none")]
    genre: Option<&'a str>,
    gold_clusters: Vec<&'a [MentionSpan]>,
    candidate_mentions: Vec<(usize, usize, f64)>,
}

/// Serializes a document as one JSON line (no trailing newline). Gold cluster
/// ids are positional in this schema.
pub fn to_jsonl(doc: &Document) -> String {
    let record = JsonDoc {
        doc_id: &doc.doc_id,
        tokens: &doc.tokens,
        sentence_boundaries: &doc.sentence_boundaries,
        genre: doc.genre.as_deref(),
        gold_clusters: doc
            .gold_clusters
            .iter()
            .map(|c| c.mentions.as_slice())
            .collect(),
        candidate_mentions: doc
            .candidate_mentions
            .iter()
            .map(|c| (c.span.start, c.span.end, c.score))
            .collect(),
    };
    serde_json::to_string(&record).expect("document serialization is infallible")
}

/// One line of a cluster file: the clusters of a single document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterRecord {
    pub doc_id: String,
    pub clusters: Vec<Vec<MentionSpan>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doc_len: Option<usize>,
}

impl ClusterRecord {
    pub fn gold_of(doc: &Document) -> Self {
        Self {
            doc_id: doc.doc_id.clone(),
            clusters: doc
                .gold_clusters
                .iter()
                .map(|c| c.mentions.clone())
                .collect(),
            doc_len: Some(doc.len()),
        }
    }
}

pub fn parse_cluster_file(text: &str) -> Result<Vec<ClusterRecord>, IngestError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| IngestError::MalformedColumn {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}
