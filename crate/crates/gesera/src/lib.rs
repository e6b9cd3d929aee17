//! GeSERA: retrieval-based summary evaluation.
//!
//! A summary is judged by what it retrieves. Candidate and reference
//! summaries are reformulated into queries (POS-filtered words, noun
//! phrases, or keyword n-grams), run against a BM25F-ranked inverted
//! index, and scored by the overlap of the retrieved document lists,
//! either as plain set overlap or discounted by rank displacement. A
//! correlation harness compares those scores with manual evaluation
//! scores at the system level.
//!
//! Pipeline:
//!
//! ```text
//! corpus  ->  index      (build a BM25F inverted index over documents)
//! summary ->  query      (tokenize, POS-tag, reformulate)
//! query   ->  ranked list (retrieve top-cutoff documents)
//! lists   ->  score      (set or rank-discounted overlap vs references)
//! scores  ->  correlation (Pearson / Spearman / Kendall tau-b vs manual)
//! ```
//!
//! With the default `parallel` feature, corpus-wide loops run on rayon;
//! the `*_seq` twins and builds without the feature produce identical
//! output sequentially.

pub mod corpus;
pub mod correlation;
pub mod error;
mod exec;
pub mod experiments;
pub mod index;
pub mod scoring;
pub mod text;

pub use corpus::{load_corpus, sample_subset, CorpusFormat, Document, DocumentCollection, SubsetSpec};
pub use correlation::{
    aggregate_to_system, correlate, kendall_tau_b, load_manual_scores, pearson, spearman,
    CorrelationResult, SystemScoreVector,
};
pub use error::{Error, Result};
pub use index::{build_index, build_index_seq, IndexParams, InvertedIndex, RankedList};
pub use scoring::{
    load_summaries, sera, sera_dis, EvalConfig, Evaluator, ScoreTable, SummaryKind, SummaryRecord,
    Variant,
};
pub use text::reformulate::{reformulate, Query, Strategy};
pub use text::tag::{HeuristicTagger, PosTag, TaggedToken, Tagger};
pub use text::tokenize::tokenize;

/// Version string stamped into run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
