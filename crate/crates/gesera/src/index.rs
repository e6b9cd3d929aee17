//! From-scratch inverted index with BM25F ranking over title and body
//! fields.
//!
//! Scoring follows the simple weighted-field BM25 variant: per-field term
//! frequencies are length-normalized, weighted by a field boost, summed
//! into a single pseudo-frequency, and pushed through one shared
//! saturation curve. With document frequency `df` over `N` documents,
//!
//! ```text
//! idf(w)      = max(0, ln(1 + (N - df + 0.5) / (df + 0.5)))
//! tf~(w, d)   = sum over fields f of boost_f * tf(w,f,d) / (1 - b + b * len_f(d) / avglen_f)
//! score(q, d) = sum over distinct query words w of idf(w) * tf~ / (k1 + tf~)
//! ```
//!
//! Multi-word phrase terms are scored as bags of words; repeated query
//! words count once.

use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::DocumentCollection;
use crate::error::{Error, Result};
use crate::exec;
use crate::text::reformulate::Query;
use crate::text::tag::Tagger;

pub const INDEX_FORMAT: &str = "gesera-index";
pub const INDEX_VERSION: u32 = 1;

/// BM25F ranking parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexParams {
    /// Term-frequency saturation; higher means slower saturation.
    pub k1: f64,
    /// Length normalization in `[0, 1]`; 0 disables it.
    pub b: f64,
    pub title_boost: f64,
    pub body_boost: f64,
}

impl Default for IndexParams {
    fn default() -> Self {
        IndexParams {
            k1: 1.2,
            b: 0.75,
            title_boost: 2.0,
            body_boost: 1.0,
        }
    }
}

impl IndexParams {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.k1 > 0.0 && self.k1.is_finite()) {
            problems.push(format!("k1 must be positive and finite, got {}", self.k1));
        }
        if !(0.0..=1.0).contains(&self.b) {
            problems.push(format!("b must be in [0, 1], got {}", self.b));
        }
        if !(self.title_boost >= 0.0 && self.title_boost.is_finite()) {
            problems.push(format!(
                "title_boost must be non-negative and finite, got {}",
                self.title_boost
            ));
        }
        if !(self.body_boost > 0.0 && self.body_boost.is_finite()) {
            problems.push(format!(
                "body_boost must be positive and finite, got {}",
                self.body_boost
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::IndexParams(problems.join("; ")))
        }
    }
}

/// Term frequencies of one term in one document, by internal ordinal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
struct Posting {
    doc: u32,
    tf_title: u32,
    tf_body: u32,
}

/// A retrieval result: documents with their scores, best first.
///
/// Invariants: at most `cutoff` entries, no duplicate ids, scores
/// non-increasing, and `cutoff` is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    entries: Vec<(String, f64)>,
    cutoff: usize,
}

impl RankedList {
    pub fn new(entries: Vec<(String, f64)>, cutoff: usize) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::RankedList("cutoff must be positive".to_string()));
        }
        if entries.len() > cutoff {
            return Err(Error::RankedList(format!(
                "{} entries exceed cutoff {cutoff}",
                entries.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for (id, _) in &entries {
            if !seen.insert(id.as_str()) {
                return Err(Error::RankedList(format!("duplicate document id {id:?}")));
            }
        }
        if entries.windows(2).any(|w| w[0].1 < w[1].1) {
            return Err(Error::RankedList("scores must be non-increasing".to_string()));
        }
        Ok(RankedList { entries, cutoff })
    }

    /// Builds a list from bare ids, assigning descending placeholder scores.
    pub fn from_ids<I, S>(ids: I, cutoff: usize) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let ids: Vec<String> = ids.into_iter().map(Into::into).collect();
        let n = ids.len();
        let entries = ids
            .into_iter()
            .enumerate()
            .map(|(i, id)| (id, (n - i) as f64))
            .collect();
        RankedList::new(entries, cutoff)
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(id, _)| id.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }
}

/// The index: per-term posting lists plus per-document field lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct InvertedIndex {
    params: IndexParams,
    doc_ids: Vec<String>,
    id_to_ord: HashMap<String, u32>,
    title_lens: Vec<u32>,
    body_lens: Vec<u32>,
    avg_title_len: f64,
    avg_body_len: f64,
    postings: HashMap<String, Vec<Posting>>,
}

struct DocCounts {
    title_len: u32,
    body_len: u32,
    counts: HashMap<String, (u32, u32)>,
}

fn count_fields(tagger: &Tagger, title: &str, body: &str) -> Result<DocCounts> {
    let title_tokens = tagger.index_tokens(title)?;
    let body_tokens = tagger.index_tokens(body)?;
    let mut counts: HashMap<String, (u32, u32)> = HashMap::new();
    for token in &title_tokens {
        counts.entry(token.clone()).or_default().0 += 1;
    }
    for token in &body_tokens {
        counts.entry(token.clone()).or_default().1 += 1;
    }
    Ok(DocCounts {
        title_len: title_tokens.len() as u32,
        body_len: body_tokens.len() as u32,
        counts,
    })
}

/// Builds an index over `collection`, tokenizing fields through `tagger`.
pub fn build_index(
    collection: &DocumentCollection,
    params: IndexParams,
    tagger: &Tagger,
) -> Result<InvertedIndex> {
    build_impl(collection, params, tagger, true)
}

/// Sequential fallback of [`build_index`]; same index, single thread.
pub fn build_index_seq(
    collection: &DocumentCollection,
    params: IndexParams,
    tagger: &Tagger,
) -> Result<InvertedIndex> {
    build_impl(collection, params, tagger, false)
}

fn build_impl(
    collection: &DocumentCollection,
    params: IndexParams,
    tagger: &Tagger,
    parallel: bool,
) -> Result<InvertedIndex> {
    params.validate()?;
    if collection.is_empty() {
        return Err(Error::EmptyCollection);
    }
    let per_doc = exec::map_collect(collection.documents(), parallel, |doc| {
        count_fields(tagger, &doc.title, &doc.body)
    });

    let n = collection.len();
    let mut doc_ids = Vec::with_capacity(n);
    let mut id_to_ord = HashMap::with_capacity(n);
    let mut title_lens = Vec::with_capacity(n);
    let mut body_lens = Vec::with_capacity(n);
    let mut postings: HashMap<String, Vec<Posting>> = HashMap::new();

    // Documents are merged in collection order, so every posting list ends
    // up sorted by ordinal without an extra sort.
    for (ord, (doc, counts)) in collection.iter().zip(per_doc).enumerate() {
        let counts = counts?;
        let ord = ord as u32;
        id_to_ord.insert(doc.id.clone(), ord);
        doc_ids.push(doc.id.clone());
        title_lens.push(counts.title_len);
        body_lens.push(counts.body_len);
        for (term, (tf_title, tf_body)) in counts.counts {
            postings.entry(term).or_default().push(Posting {
                doc: ord,
                tf_title,
                tf_body,
            });
        }
    }

    let avg = |lens: &[u32]| lens.iter().map(|&l| l as u64).sum::<u64>() as f64 / n as f64;
    Ok(InvertedIndex {
        params,
        avg_title_len: avg(&title_lens),
        avg_body_len: avg(&body_lens),
        doc_ids,
        id_to_ord,
        title_lens,
        body_lens,
        postings,
    })
}

impl InvertedIndex {
    pub fn len(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doc_ids.is_empty()
    }

    pub fn params(&self) -> IndexParams {
        self.params
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn contains(&self, doc_id: &str) -> bool {
        self.id_to_ord.contains_key(doc_id)
    }

    /// Number of documents containing `word`.
    pub fn document_frequency(&self, word: &str) -> usize {
        self.postings.get(word).map_or(0, Vec::len)
    }

    fn idf(&self, df: usize) -> f64 {
        let n = self.doc_ids.len() as f64;
        let ratio = (n - df as f64 + 0.5) / (df as f64 + 0.5);
        (1.0 + ratio).ln().max(0.0)
    }

    fn weighted_tf(&self, posting: &Posting) -> f64 {
        let b = self.params.b;
        let mut tf = 0.0;
        if posting.tf_title > 0 {
            let norm =
                1.0 - b + b * self.title_lens[posting.doc as usize] as f64 / self.avg_title_len;
            tf += self.params.title_boost * posting.tf_title as f64 / norm;
        }
        if posting.tf_body > 0 {
            let norm =
                1.0 - b + b * self.body_lens[posting.doc as usize] as f64 / self.avg_body_len;
            tf += self.params.body_boost * posting.tf_body as f64 / norm;
        }
        tf
    }

    fn saturation(&self, tf: f64) -> f64 {
        tf / (self.params.k1 + tf)
    }

    /// BM25F score of one document for `query`. Unknown ids are an error.
    pub fn bm25f_score(&self, query: &Query, doc_id: &str) -> Result<f64> {
        let &ord = self
            .id_to_ord
            .get(doc_id)
            .ok_or_else(|| Error::UnknownDocId { id: doc_id.to_string() })?;
        let mut score = 0.0;
        for word in query.unique_words() {
            if let Some(postings) = self.postings.get(word) {
                if let Ok(pos) = postings.binary_search_by_key(&ord, |p| p.doc) {
                    score += self.idf(postings.len())
                        * self.saturation(self.weighted_tf(&postings[pos]));
                }
            }
        }
        Ok(score)
    }

    /// Returns the top `k` documents by score, best first. Ties break by
    /// ascending document id. Documents scoring zero are never returned,
    /// so the list may be shorter than `k`. An empty query logs a warning
    /// and returns an empty list.
    pub fn retrieve(&self, query: &Query, k: usize) -> RankedList {
        assert!(k > 0, "retrieval cutoff must be positive");
        let words = query.unique_words();
        if words.is_empty() {
            log::warn!(
                "query is empty after {} reformulation; returning no results",
                query.strategy
            );
            return RankedList {
                entries: Vec::new(),
                cutoff: k,
            };
        }
        let mut scores: HashMap<u32, f64> = HashMap::new();
        for word in words {
            if let Some(postings) = self.postings.get(word) {
                let idf = self.idf(postings.len());
                for posting in postings {
                    *scores.entry(posting.doc).or_insert(0.0) +=
                        idf * self.saturation(self.weighted_tf(posting));
                }
            }
        }
        let mut scored: Vec<(u32, f64)> = scores.into_iter().filter(|&(_, s)| s > 0.0).collect();
        scored.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .expect("scores are finite")
                .then_with(|| self.doc_ids[a.0 as usize].cmp(&self.doc_ids[b.0 as usize]))
        });
        scored.truncate(k);
        let entries = scored
            .into_iter()
            .map(|(ord, score)| (self.doc_ids[ord as usize].clone(), score))
            .collect();
        RankedList { entries, cutoff: k }
    }

    /// Writes the index as JSON Lines: a header, one line per document in
    /// ordinal order, then one line per term in lexicographic order.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let label = path.display().to_string();
        let file = fs::File::create(path).map_err(|e| Error::io(&label, e))?;
        let mut writer = BufWriter::new(file);
        let header = HeaderLine {
            format: INDEX_FORMAT.to_string(),
            version: INDEX_VERSION,
            params: self.params,
            doc_count: self.doc_ids.len() as u32,
        };
        let mut emit = |value: String| -> Result<()> {
            writeln!(writer, "{value}").map_err(|e| Error::io(&label, e))
        };
        emit(serde_json::to_string(&header).expect("header serializes"))?;
        for ord in 0..self.doc_ids.len() {
            let line = DocLine {
                id: self.doc_ids[ord].clone(),
                title_len: self.title_lens[ord],
                body_len: self.body_lens[ord],
            };
            emit(serde_json::to_string(&line).expect("doc line serializes"))?;
        }
        let mut terms: Vec<&String> = self.postings.keys().collect();
        terms.sort_unstable();
        for term in terms {
            let postings = &self.postings[term];
            let line = TermLine {
                term: term.clone(),
                postings: postings
                    .iter()
                    .map(|p| (p.doc, p.tf_title, p.tf_body))
                    .collect(),
            };
            emit(serde_json::to_string(&line).expect("term line serializes"))?;
        }
        writer.flush().map_err(|e| Error::io(&label, e))?;
        Ok(())
    }

    /// Reads an index written by [`InvertedIndex::save`]. The reloaded
    /// index compares equal to the saved one.
    pub fn load(path: impl AsRef<Path>) -> Result<InvertedIndex> {
        let path = path.as_ref();
        let label = path.display().to_string();
        let file = fs::File::open(path).map_err(|e| Error::io(&label, e))?;
        let mut lines = BufReader::new(file).lines();

        let header_line = lines
            .next()
            .transpose()
            .map_err(|e| Error::io(&label, e))?
            .ok_or_else(|| Error::IndexFormat {
                path: label.clone(),
                message: "file is empty".to_string(),
            })?;
        let header: HeaderLine =
            serde_json::from_str(&header_line).map_err(|e| Error::IndexFormat {
                path: label.clone(),
                message: e.to_string(),
            })?;
        if header.format != INDEX_FORMAT {
            return Err(Error::IndexFormat {
                path: label,
                message: format!("unexpected format tag {:?}", header.format),
            });
        }
        if header.version != INDEX_VERSION {
            return Err(Error::IndexVersion {
                path: label,
                found: header.version,
                expected: INDEX_VERSION,
            });
        }
        header.params.validate()?;

        let n = header.doc_count as usize;
        let mut doc_ids = Vec::with_capacity(n);
        let mut id_to_ord = HashMap::with_capacity(n);
        let mut title_lens = Vec::with_capacity(n);
        let mut body_lens = Vec::with_capacity(n);
        for ord in 0..n {
            let line = lines
                .next()
                .transpose()
                .map_err(|e| Error::io(&label, e))?
                .ok_or_else(|| Error::IndexFormat {
                    path: label.clone(),
                    message: format!("expected {n} document lines, found {ord}"),
                })?;
            let doc: DocLine = serde_json::from_str(&line)
                .map_err(|e| Error::record(&label, ord + 2, e.to_string()))?;
            if id_to_ord.insert(doc.id.clone(), ord as u32).is_some() {
                return Err(Error::DuplicateDocId { id: doc.id });
            }
            doc_ids.push(doc.id);
            title_lens.push(doc.title_len);
            body_lens.push(doc.body_len);
        }

        let mut postings: HashMap<String, Vec<Posting>> = HashMap::new();
        for (offset, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::io(&label, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let lineno = n + 2 + offset;
            let term: TermLine = serde_json::from_str(&line)
                .map_err(|e| Error::record(&label, lineno, e.to_string()))?;
            let list: Vec<Posting> = term
                .postings
                .iter()
                .map(|&(doc, tf_title, tf_body)| Posting {
                    doc,
                    tf_title,
                    tf_body,
                })
                .collect();
            if list.iter().any(|p| p.doc as usize >= n) {
                return Err(Error::record(
                    &label,
                    lineno,
                    format!("posting references document ordinal beyond {n}"),
                ));
            }
            if list.windows(2).any(|w| w[0].doc >= w[1].doc) {
                return Err(Error::record(
                    &label,
                    lineno,
                    "postings are not sorted by document ordinal",
                ));
            }
            if postings.insert(term.term.clone(), list).is_some() {
                return Err(Error::record(
                    &label,
                    lineno,
                    format!("duplicate term {:?}", term.term),
                ));
            }
        }

        let avg = |lens: &[u32]| lens.iter().map(|&l| l as u64).sum::<u64>() as f64 / n as f64;
        Ok(InvertedIndex {
            params: header.params,
            avg_title_len: avg(&title_lens),
            avg_body_len: avg(&body_lens),
            doc_ids,
            id_to_ord,
            title_lens,
            body_lens,
            postings,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct HeaderLine {
    format: String,
    version: u32,
    #[serde(flatten)]
    params: IndexParams,
    doc_count: u32,
}

#[derive(Serialize, Deserialize)]
struct DocLine {
    id: String,
    title_len: u32,
    body_len: u32,
}

#[derive(Serialize, Deserialize)]
struct TermLine {
    term: String,
    postings: Vec<(u32, u32, u32)>,
}
