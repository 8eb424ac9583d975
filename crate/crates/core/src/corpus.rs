//! Document and corpus types plus the TSV interchange format.
//!
//! The on-disk layout is a UTF-8 TSV with the header `id<TAB>text<TAB>label`.
//! The label column may be empty for unlabeled documents, or may carry a raw
//! source label that is remapped at ingestion (see [`crate::eval::LabelMap`]).

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

/// Binary document label: positive class is `OFF`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Not,
    Off,
}

impl Label {
    pub fn flipped(self) -> Label {
        match self {
            Label::Not => Label::Off,
            Label::Off => Label::Not,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Not => "NOT",
            Label::Off => "OFF",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Label> {
        match s {
            "NOT" => Ok(Label::Not),
            "OFF" => Ok(Label::Off),
            other => Err(Error::UnknownLabel(other.to_string())),
        }
    }
}

/// A document as read from disk; the label is optional until ingestion
/// decides it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub id: String,
    pub text: String,
    pub label: Option<Label>,
}

impl RawDocument {
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: Option<Label>) -> Self {
        RawDocument {
            id: id.into(),
            text: text.into(),
            label,
        }
    }
}

/// A corpus in which every document carries a binary label.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabeledCorpus {
    pub docs: Vec<LabeledDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledDocument {
    pub id: String,
    pub text: String,
    pub label: Label,
}

impl LabeledCorpus {
    pub fn new(docs: Vec<LabeledDocument>) -> Self {
        LabeledCorpus { docs }
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    /// Number of documents carrying `label`.
    pub fn class_count(&self, label: Label) -> usize {
        self.docs.iter().filter(|d| d.label == label).count()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.docs.iter().map(|d| d.label).collect()
    }

    /// Corpus restricted to the given document indices, preserving order.
    pub fn subset(&self, indices: &[usize]) -> LabeledCorpus {
        LabeledCorpus {
            docs: indices.iter().map(|&i| self.docs[i].clone()).collect(),
        }
    }
}

/// One parsed TSV row before the label string has been interpreted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusRecord {
    pub id: String,
    pub text: String,
    pub label: Option<String>,
}

/// Parses TSV lines with the `id\ttext\tlabel` header, keeping raw label
/// strings so ingestion can remap heterogeneous source labels.
///
/// Rejects documents whose text is empty after trimming; the label field may
/// be empty.
pub fn parse_corpus_records(content: &str) -> Result<Vec<CorpusRecord>> {
    let mut lines = content.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::MalformedRecord("empty corpus file".into()))?;
    if header != "id\ttext\tlabel" {
        return Err(Error::MalformedRecord(format!(
            "expected header 'id\\ttext\\tlabel', got {header:?}"
        )));
    }
    let mut records = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::MalformedRecord(format!(
                "line {}: expected 3 tab-separated fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        if fields[1].trim().is_empty() {
            return Err(Error::MalformedRecord(format!(
                "line {}: document {:?} has empty text",
                lineno + 2,
                fields[0]
            )));
        }
        records.push(CorpusRecord {
            id: fields[0].to_string(),
            text: fields[1].to_string(),
            label: (!fields[2].is_empty()).then(|| fields[2].to_string()),
        });
    }
    Ok(records)
}

/// Strict variant: labels must already be `NOT` or `OFF`.
pub fn parse_corpus_tsv(content: &str) -> Result<Vec<RawDocument>> {
    parse_corpus_records(content)?
        .into_iter()
        .map(|r| {
            let label = r.label.map(|l| l.parse()).transpose()?;
            Ok(RawDocument::new(r.id, r.text, label))
        })
        .collect()
}

pub fn read_corpus_tsv(path: &Path) -> Result<Vec<RawDocument>> {
    let content =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_corpus_tsv(&content)
}

/// Renders documents back to the TSV interchange format.
pub fn corpus_to_tsv(docs: &[RawDocument]) -> Result<String> {
    let mut out = String::from("id\ttext\tlabel\n");
    for doc in docs {
        if doc.id.contains(['\t', '\n']) || doc.text.contains(['\t', '\n']) {
            return Err(Error::MalformedRecord(format!(
                "document {:?} contains tab or newline",
                doc.id
            )));
        }
        out.push_str(&doc.id);
        out.push('\t');
        out.push_str(&doc.text);
        out.push('\t');
        if let Some(label) = doc.label {
            out.push_str(label.as_str());
        }
        out.push('\n');
    }
    Ok(out)
}
