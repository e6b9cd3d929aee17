//! Document collections: loading, writing, and seeded subsetting.
//!
//! Two on-disk layouts are supported: JSON Lines (one document object per
//! line) and a directory of plain-text files. Both load into a
//! [`DocumentCollection`], an ordered list of documents with unique ids.

use std::collections::HashSet;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One indexable unit: an article with an id, an optional title, and a body.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    /// Empty string when the source provides no title.
    #[serde(default)]
    pub title: String,
    pub body: String,
}

/// On-disk layout of a corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    /// One JSON object per line: `{"id": ..., "title": ..., "body": ...}`.
    Jsonl,
    /// A directory of `*.txt` files; the file stem is the document id.
    DirOfText,
}

impl std::str::FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "jsonl" => Ok(CorpusFormat::Jsonl),
            "dir" | "dir_of_text" => Ok(CorpusFormat::DirOfText),
            other => Err(Error::File {
                path: other.to_string(),
                message: "unknown corpus format (expected jsonl or dir_of_text)".to_string(),
            }),
        }
    }
}

/// An ordered list of documents with unique ids.
#[derive(Debug, Clone)]
pub struct DocumentCollection {
    documents: Vec<Document>,
    source_label: String,
}

impl DocumentCollection {
    /// Builds a collection, rejecting duplicate document ids.
    pub fn from_documents(
        documents: Vec<Document>,
        source_label: impl Into<String>,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        for doc in &documents {
            if !seen.insert(doc.id.as_str()) {
                return Err(Error::DuplicateDocId { id: doc.id.clone() });
            }
        }
        Ok(DocumentCollection {
            documents,
            source_label: source_label.into(),
        })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Short human-readable description of where the collection came from.
    pub fn source_label(&self) -> &str {
        &self.source_label
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Document> {
        self.documents.iter()
    }
}

/// Loose schema used to report precise per-line problems in JSONL corpora.
#[derive(Deserialize)]
struct RawDocument {
    id: Option<String>,
    title: Option<String>,
    body: Option<String>,
}

/// Loads a corpus from `path` in the given format.
///
/// Document order follows the file (JSONL) or the lexicographic order of
/// file names (directory). An empty source yields an empty collection and a
/// logged warning rather than an error.
pub fn load_corpus(path: impl AsRef<Path>, format: CorpusFormat) -> Result<DocumentCollection> {
    let path = path.as_ref();
    let collection = match format {
        CorpusFormat::Jsonl => load_jsonl(path)?,
        CorpusFormat::DirOfText => load_dir_of_text(path)?,
    };
    if collection.is_empty() {
        log::warn!("{}: corpus is empty", path.display());
    }
    Ok(collection)
}

fn load_jsonl(path: &Path) -> Result<DocumentCollection> {
    let label = path.display().to_string();
    let file = fs::File::open(path).map_err(|e| Error::io(&label, e))?;
    let reader = BufReader::new(file);
    let mut documents = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(&label, e))?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawDocument = serde_json::from_str(&line)
            .map_err(|e| Error::record(&label, lineno, e.to_string()))?;
        let doc = validate_raw(raw, &label, lineno)?;
        if !seen.insert(doc.id.clone()) {
            return Err(Error::record(
                &label,
                lineno,
                format!("duplicate document id {:?}", doc.id),
            ));
        }
        documents.push(doc);
    }
    DocumentCollection::from_documents(documents, label)
}

fn validate_raw(raw: RawDocument, path: &str, lineno: usize) -> Result<Document> {
    let id = raw
        .id
        .ok_or_else(|| Error::record(path, lineno, "missing field id"))?;
    if id.trim().is_empty() {
        return Err(Error::record(path, lineno, "empty field id"));
    }
    let body = raw
        .body
        .ok_or_else(|| Error::record(path, lineno, "missing field body"))?;
    if body.trim().is_empty() {
        return Err(Error::record(path, lineno, "empty field body"));
    }
    Ok(Document {
        id,
        title: raw.title.unwrap_or_default(),
        body,
    })
}

fn load_dir_of_text(dir: &Path) -> Result<DocumentCollection> {
    let label = dir.display().to_string();
    let entries = fs::read_dir(dir).map_err(|e| Error::io(&label, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(&label, e))?;
        let path = entry.path();
        if path.extension().and_then(|e| e.to_str()) == Some("txt") {
            paths.push(path);
        }
    }
    paths.sort();
    let mut documents = Vec::new();
    for path in paths {
        let file_label = path.display().to_string();
        let id = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| Error::File {
                path: file_label.clone(),
                message: "file stem is not valid UTF-8".to_string(),
            })?
            .to_string();
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&file_label, e))?;
        let (title, body) = split_title(&text);
        if body.trim().is_empty() {
            return Err(Error::File {
                path: file_label,
                message: "empty document body".to_string(),
            });
        }
        documents.push(Document {
            id,
            title: title.to_string(),
            body: body.to_string(),
        });
    }
    DocumentCollection::from_documents(documents, label)
}

/// The first line is the title when a blank line follows it; otherwise the
/// whole file is the body.
fn split_title(text: &str) -> (&str, &str) {
    if let Some((first, rest)) = text.split_once('\n') {
        let first = first.strip_suffix('\r').unwrap_or(first);
        if let Some((second, tail)) = rest.split_once('\n') {
            if second.trim().is_empty() && !first.trim().is_empty() {
                return (first, tail);
            }
        }
    }
    ("", text)
}

/// Writes `collection` as JSON Lines; `load_corpus` reads the result back
/// identically.
pub fn write_corpus(collection: &DocumentCollection, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let label = path.display().to_string();
    let file = fs::File::create(path).map_err(|e| Error::io(&label, e))?;
    let mut writer = BufWriter::new(file);
    for doc in collection.iter() {
        let line = serde_json::to_string(doc).expect("document serialization cannot fail");
        writeln!(writer, "{line}").map_err(|e| Error::io(&label, e))?;
    }
    writer.flush().map_err(|e| Error::io(&label, e))?;
    Ok(())
}

/// A seeded request for a random fixed-size subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubsetSpec {
    pub size: usize,
    pub seed: u64,
}

/// Draws a uniform random subset of `spec.size` documents without
/// replacement, deterministically for a given seed.
///
/// Uses a partial Fisher-Yates shuffle over the document positions, so the
/// result depends only on the collection order and the seed.
pub fn sample_subset(
    collection: &DocumentCollection,
    spec: SubsetSpec,
) -> Result<DocumentCollection> {
    let n = collection.len();
    if spec.size > n {
        return Err(Error::SubsetTooLarge {
            requested: spec.size,
            available: n,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut order: Vec<usize> = (0..n).collect();
    for i in 0..spec.size {
        let j = rng.gen_range(i..n);
        order.swap(i, j);
    }
    let documents = order[..spec.size]
        .iter()
        .map(|&i| collection.documents[i].clone())
        .collect();
    let label = format!(
        "{}[size={} seed={}]",
        collection.source_label, spec.size, spec.seed
    );
    DocumentCollection::from_documents(documents, label)
}
