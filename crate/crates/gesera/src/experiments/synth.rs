//! Synthetic benchmark generator with a known quality ordering.
//!
//! Builds a corpus of topic-focused documents over disjoint topic
//! vocabularies plus background documents over a shared vocabulary, then
//! derives summaries from the topic vocabularies: references are clean
//! draws, system candidates are copies of a reference with a per-system
//! fraction of the words replaced by words from the *next* topic's
//! vocabulary. Replacement words carry as much retrieval weight as
//! the words they displace but rank the wrong topic's documents, so
//! ranking overlap with the references falls roughly in proportion to the
//! corruption rate instead of holding steady until the signal collapses.
//! System quality (1 - corruption rate) is emitted as a manual score
//! vector, giving correlation a known target.
//!
//! Noise annotators write their references from the *next* topic's
//! vocabulary, mimicking an annotator who summarized the wrong cluster.
//! Their references systematically reward corrupted candidates (whose
//! replacement words are off-topic too), so removing such an annotator
//! should not hurt correlation with the known quality.
//!
//! Generation is a pure function of the configuration: the same config
//! always yields the same dataset.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Document, DocumentCollection};
use crate::correlation::SystemScoreVector;
use crate::error::{Error, Result};
use crate::scoring::{SummaryKind, SummaryRecord};

/// Fraction of topic-document body words drawn from the topic vocabulary;
/// the rest come from the shared vocabulary so topic and background
/// documents compete for corrupted queries.
const TOPIC_WORD_RATE: f64 = 0.7;

/// Each topic document draws its topic words from a contiguous (wrapping)
/// window covering this fraction of the topic vocabulary. Narrow windows
/// keep any single document from covering most of its topic, so which
/// documents rank high depends on exactly which summary words survive
/// corruption and ranking overlap degrades smoothly with the rate.
const DOC_WINDOW_FRACTION: f64 = 0.2;

/// Shape of the generated benchmark.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub topics: usize,
    /// Number of systems; system `s` has corruption rate
    /// `max_corruption * s / (systems - 1)`.
    pub systems: usize,
    pub annotators: usize,
    /// How many of the annotators (the last ones) write noise references.
    pub noise_annotators: usize,
    /// Total corpus size, including background documents.
    pub index_docs: usize,
    pub docs_per_topic: usize,
    /// Distinct words in each topic's vocabulary.
    pub topic_vocab: usize,
    /// Distinct words in the shared vocabulary.
    pub shared_vocab: usize,
    /// Words per document body.
    pub doc_len: usize,
    /// Words per summary.
    pub summary_len: usize,
    /// Corruption rate of the worst system, in [0, 1].
    pub max_corruption: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            topics: 30,
            systems: 10,
            annotators: 4,
            noise_annotators: 0,
            index_docs: 2000,
            docs_per_topic: 30,
            topic_vocab: 60,
            shared_vocab: 300,
            doc_len: 50,
            summary_len: 25,
            max_corruption: 0.8,
            seed: 0,
        }
    }
}

/// A generated benchmark: corpus, summaries, and the known quality vector.
#[derive(Debug, Clone)]
pub struct SynthDataset {
    pub corpus: DocumentCollection,
    pub candidates: Vec<SummaryRecord>,
    pub references: Vec<SummaryRecord>,
    /// Known system quality (1 - corruption rate), metric name "quality".
    pub quality: SystemScoreVector,
}

/// Paths written by [`SynthDataset::write_files`].
#[derive(Debug, Clone)]
pub struct SynthFiles {
    pub corpus: PathBuf,
    pub summaries: PathBuf,
    pub manual: PathBuf,
}

impl SynthDataset {
    /// Candidates followed by references, as one record list.
    pub fn summaries(&self) -> Vec<SummaryRecord> {
        let mut records = self.candidates.clone();
        records.extend(self.references.iter().cloned());
        records
    }

    /// Writes `corpus.jsonl`, `summaries.jsonl`, and `quality.csv` into
    /// `dir`, in the formats the experiment runner consumes.
    pub fn write_files(&self, dir: &Path) -> Result<SynthFiles> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
        let files = SynthFiles {
            corpus: dir.join("corpus.jsonl"),
            summaries: dir.join("summaries.jsonl"),
            manual: dir.join("quality.csv"),
        };
        crate::corpus::write_corpus(&self.corpus, &files.corpus)?;

        let mut lines = String::new();
        for record in self.summaries() {
            lines.push_str(&serde_json::to_string(&record).expect("records serialize"));
            lines.push('\n');
        }
        fs::write(&files.summaries, lines)
            .map_err(|e| Error::io(files.summaries.display().to_string(), e))?;

        let mut csv = String::from("system_id,score\n");
        for (system, score) in self.quality.entries() {
            csv.push_str(&format!("{system},{score}\n"));
        }
        fs::write(&files.manual, csv)
            .map_err(|e| Error::io(files.manual.display().to_string(), e))?;
        Ok(files)
    }
}

/// Generates a benchmark dataset from `config`.
pub fn generate(config: &SynthConfig) -> Result<SynthDataset> {
    validate(config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let topic_words: Vec<Vec<String>> = (0..config.topics)
        .map(|t| (0..config.topic_vocab).map(|j| topic_word(t, j)).collect())
        .collect();
    let shared_words: Vec<String> = (0..config.shared_vocab).map(shared_word).collect();

    let window = ((config.topic_vocab as f64 * DOC_WINDOW_FRACTION).round() as usize)
        .clamp(1, config.topic_vocab);
    let mut documents = Vec::with_capacity(config.index_docs);
    for words in &topic_words {
        for _ in 0..config.docs_per_topic {
            let start = rng.gen_range(0..words.len());
            let from_window = |rng: &mut ChaCha8Rng| {
                words[(start + rng.gen_range(0..window)) % words.len()].as_str()
            };
            let title = format!("{} {}", from_window(&mut rng), from_window(&mut rng));
            let body: Vec<&str> = (0..config.doc_len)
                .map(|_| {
                    if rng.gen_bool(TOPIC_WORD_RATE) {
                        from_window(&mut rng)
                    } else {
                        pick(&mut rng, &shared_words)
                    }
                })
                .collect();
            documents.push(doc(documents.len(), title, body.join(" ")));
        }
    }
    while documents.len() < config.index_docs {
        let title = format!(
            "{} {}",
            pick(&mut rng, &shared_words),
            pick(&mut rng, &shared_words)
        );
        let body: Vec<&str> = (0..config.doc_len)
            .map(|_| pick(&mut rng, &shared_words))
            .collect();
        documents.push(doc(documents.len(), title, body.join(" ")));
    }
    let corpus = DocumentCollection::from_documents(documents, "synthetic")?;

    let good_annotators = config.annotators - config.noise_annotators;
    let mut references = Vec::with_capacity(config.topics * config.annotators);
    for (t, words) in topic_words.iter().enumerate() {
        for a in 0..config.annotators {
            let pool = if a < good_annotators {
                words
            } else if config.topics > 1 {
                // A noise annotator summarizes the wrong topic.
                &topic_words[(t + 1) % config.topics]
            } else {
                &shared_words
            };
            let text: Vec<&str> = (0..config.summary_len)
                .map(|_| pick(&mut rng, pool))
                .collect();
            references.push(SummaryRecord {
                topic_id: topic_id(t),
                system_id: format!("A{}", a + 1),
                kind: SummaryKind::Reference,
                text: text.join(" "),
            });
        }
    }

    let mut candidates = Vec::with_capacity(config.topics * config.systems);
    let mut quality = std::collections::BTreeMap::new();
    for t in 0..config.topics {
        for s in 0..config.systems {
            let rate = corruption_rate(config, s);
            quality.insert(system_id(s), 1.0 - rate);
            // Rotating the base annotator per topic keeps one annotator's
            // idiosyncrasies from becoming a fixed per-system offset.
            let base = &references[t * config.annotators + (s + t) % good_annotators];
            let mut text: Vec<String> =
                base.text.split(' ').map(str::to_string).collect();
            // Corrupt an exact count rather than a Bernoulli draw per word,
            // so every candidate of a system realizes the same rate. All
            // replacements come from the next topic's vocabulary:
            // concentrated off-topic words claim ranking slots even at low
            // rates, keeping the score's response to the rate close to
            // linear, and the drift matches the topic a noise annotator
            // mistakenly summarizes.
            let pool = decoy_pool(&topic_words, &shared_words, t);
            let corrupted = (rate * text.len() as f64).round() as usize;
            for position in rand::seq::index::sample(&mut rng, text.len(), corrupted) {
                text[position] = pick(&mut rng, pool).to_string();
            }
            candidates.push(SummaryRecord {
                topic_id: topic_id(t),
                system_id: system_id(s),
                kind: SummaryKind::Candidate,
                text: text.join(" "),
            });
        }
    }

    Ok(SynthDataset {
        corpus,
        candidates,
        references,
        quality: SystemScoreVector::new("quality", quality),
    })
}

fn validate(config: &SynthConfig) -> Result<()> {
    let mut problems = Vec::new();
    for (name, value) in [
        ("systems", config.systems),
        ("annotators", config.annotators),
        ("docs_per_topic", config.docs_per_topic),
        ("doc_len", config.doc_len),
        ("summary_len", config.summary_len),
    ] {
        if value == 0 {
            problems.push(format!("{name} must be positive"));
        }
    }
    if config.noise_annotators >= config.annotators && config.annotators > 0 {
        problems.push("at least one annotator must not be noise".to_string());
    }
    if config.index_docs < config.topics * config.docs_per_topic {
        problems.push(format!(
            "index_docs ({}) is smaller than topics * docs_per_topic ({})",
            config.index_docs,
            config.topics * config.docs_per_topic
        ));
    }
    for (name, value, limit) in [
        ("topic_vocab", config.topic_vocab, 26 * 26),
        ("shared_vocab", config.shared_vocab, 26 * 26),
        ("topics", config.topics, 26 * 26),
    ] {
        if value == 0 || value > limit {
            problems.push(format!("{name} must be in 1..={limit}, got {value}"));
        }
    }
    if !(0.0..=1.0).contains(&config.max_corruption) {
        problems.push(format!(
            "max_corruption must be in [0, 1], got {}",
            config.max_corruption
        ));
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::Config { problems })
    }
}

fn corruption_rate(config: &SynthConfig, system: usize) -> f64 {
    if config.systems == 1 {
        0.0
    } else {
        config.max_corruption * system as f64 / (config.systems - 1) as f64
    }
}

fn pick<'a>(rng: &mut ChaCha8Rng, words: &'a [String]) -> &'a str {
    &words[rng.gen_range(0..words.len())]
}

/// Vocabulary that corruption replacements are drawn from: the next
/// topic's, or the shared vocabulary when no other topic exists.
fn decoy_pool<'a>(
    topic_words: &'a [Vec<String>],
    shared_words: &'a [String],
    own: usize,
) -> &'a [String] {
    if topic_words.len() < 2 {
        return shared_words;
    }
    &topic_words[(own + 1) % topic_words.len()]
}

fn doc(ordinal: usize, title: String, body: String) -> Document {
    Document {
        id: format!("doc{ordinal:04}"),
        title,
        body,
    }
}

fn topic_id(t: usize) -> String {
    format!("topic{t:02}")
}

fn system_id(s: usize) -> String {
    format!("sys{s:02}")
}

/// Two lowercase letters encoding `n < 676`.
fn alpha2(n: usize) -> [char; 2] {
    [
        (b'a' + (n / 26) as u8) as char,
        (b'a' + (n % 26) as u8) as char,
    ]
}

/// Letters-only word, unique per (topic, j), ending in a suffix-rule-safe
/// consonant so the default tagger classifies it as a noun.
fn topic_word(topic: usize, j: usize) -> String {
    let t = alpha2(topic);
    let w = alpha2(j);
    format!("t{}{}{}{}x", t[0], t[1], w[0], w[1])
}

fn shared_word(k: usize) -> String {
    let w = alpha2(k);
    format!("s{}{}x", w[0], w[1])
}
