//! Flat key-value experiment configuration.
//!
//! One `key = value` pair per line; `#` starts a comment line. List values
//! are comma-separated; annotator subsets are semicolon-separated lists of
//! comma-separated ids. Relative paths resolve against the config file's
//! directory. Validation is all-at-once: every problem in the file is
//! reported in a single error.
//!
//! Recognized keys (defaults in parentheses):
//!
//! ```text
//! corpus            path to the index corpus                  (required)
//! corpus_format     jsonl | dir_of_text                       (jsonl)
//! summaries         path to the candidate+reference records   (required)
//! manual.<method>   path to a manual score CSV                (one or more required)
//! subset_sizes      index sizes to sweep, e.g. 500, 1000      (required)
//! seed              base sampling seed                        (0)
//! strategies        raw, np, kw, gesera                       (all four)
//! variants          sera, dis                                 (both)
//! cutoffs           retrieval cutoffs, e.g. 5, 10             (5, 10)
//! annotator_subsets e.g. A1; A1,A2,A3; A1,A2,A3,A4            (empty)
//! out               output directory                          (results)
//! k1                BM25 saturation                           (1.2)
//! b                 BM25 length normalization                 (0.75)
//! title_boost       title field weight                        (2.0)
//! body_boost        body field weight                         (1.0)
//! stopwords         stopword list override file               (bundled list)
//! lexicon           lexicon override file                     (bundled lexicon)
//! pretagged_corpus  document text is token/TAG pairs          (false)
//! pretagged_queries summary text is token/TAG pairs           (false)
//! ```

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::corpus::CorpusFormat;
use crate::error::{Error, Result};
use crate::index::IndexParams;
use crate::scoring::{EvalConfig, Variant};
use crate::text::reformulate::Strategy;
use crate::text::tag::{load_lexicon, load_stopwords, HeuristicTagger, Tagger};

/// Parsed and validated experiment configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub corpus: PathBuf,
    pub corpus_format: CorpusFormat,
    pub summaries: PathBuf,
    /// Manual evaluation method name to score-file path.
    pub manual: BTreeMap<String, PathBuf>,
    pub subset_sizes: Vec<usize>,
    pub seed: u64,
    pub strategies: Vec<Strategy>,
    pub variants: Vec<Variant>,
    pub cutoffs: Vec<usize>,
    /// Each subset is a sorted, deduplicated list of annotator ids.
    pub annotator_subsets: Vec<Vec<String>>,
    pub out_dir: PathBuf,
    pub index_params: IndexParams,
    pub stopwords: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub pretagged_corpus: bool,
    pub pretagged_queries: bool,
}

impl ExperimentConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
        let path = path.as_ref();
        let text =
            fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base)
    }

    /// Parses config text, resolving relative paths against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<ExperimentConfig> {
        let mut problems = Vec::new();
        let mut pairs: BTreeMap<String, String> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                problems.push(format!("line {}: expected key = value", i + 1));
                continue;
            };
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                problems.push(format!("line {}: missing key", i + 1));
                continue;
            }
            if value.is_empty() {
                problems.push(format!("line {}: key {key} has an empty value", i + 1));
                continue;
            }
            if pairs.insert(key.to_string(), value.to_string()).is_some() {
                problems.push(format!("line {}: duplicate key {key}", i + 1));
            }
        }

        let mut manual = BTreeMap::new();
        let manual_keys: Vec<String> = pairs
            .keys()
            .filter(|k| k.starts_with("manual."))
            .cloned()
            .collect();
        for key in manual_keys {
            let value = pairs.remove(&key).expect("key was just listed");
            let method = key["manual.".len()..].to_string();
            if method.is_empty() {
                problems.push(format!("key {key:?} names no manual method"));
            } else {
                manual.insert(method, base.join(value));
            }
        }

        let mut take = |key: &str| pairs.remove(key);
        let corpus = take("corpus").map(|v| base.join(v));
        if corpus.is_none() {
            problems.push("missing required key corpus".to_string());
        }
        let corpus_format = take("corpus_format")
            .map(|v| parse_value::<CorpusFormat>(&v, "corpus_format", &mut problems))
            .unwrap_or(Some(CorpusFormat::Jsonl))
            .unwrap_or(CorpusFormat::Jsonl);
        let summaries = take("summaries").map(|v| base.join(v));
        if summaries.is_none() {
            problems.push("missing required key summaries".to_string());
        }
        if manual.is_empty() {
            problems.push("at least one manual.<method> score file is required".to_string());
        }
        let subset_sizes = match take("subset_sizes") {
            Some(v) => parse_list::<usize>(&v, "subset_sizes", &mut problems),
            None => {
                problems.push("missing required key subset_sizes".to_string());
                Vec::new()
            }
        };
        if subset_sizes.contains(&0) {
            problems.push("subset_sizes must be positive".to_string());
        }
        let seed = take("seed")
            .and_then(|v| parse_value::<u64>(&v, "seed", &mut problems))
            .unwrap_or(0);
        let strategies = match take("strategies") {
            Some(v) => dedup(parse_list::<Strategy>(&v, "strategies", &mut problems)),
            None => Strategy::ALL.to_vec(),
        };
        let variants = match take("variants") {
            Some(v) => dedup(parse_list::<Variant>(&v, "variants", &mut problems)),
            None => Variant::ALL.to_vec(),
        };
        let cutoffs = match take("cutoffs") {
            Some(v) => dedup(parse_list::<usize>(&v, "cutoffs", &mut problems)),
            None => vec![5, 10],
        };
        if cutoffs.contains(&0) {
            problems.push("cutoffs must be positive".to_string());
        }
        let annotator_subsets = match take("annotator_subsets") {
            Some(v) => parse_subsets(&v, &mut problems),
            None => Vec::new(),
        };
        let out_dir = take("out")
            .map(|v| base.join(v))
            .unwrap_or_else(|| base.join("results"));
        let index_params = IndexParams {
            k1: take("k1")
                .and_then(|v| parse_value(&v, "k1", &mut problems))
                .unwrap_or(IndexParams::default().k1),
            b: take("b")
                .and_then(|v| parse_value(&v, "b", &mut problems))
                .unwrap_or(IndexParams::default().b),
            title_boost: take("title_boost")
                .and_then(|v| parse_value(&v, "title_boost", &mut problems))
                .unwrap_or(IndexParams::default().title_boost),
            body_boost: take("body_boost")
                .and_then(|v| parse_value(&v, "body_boost", &mut problems))
                .unwrap_or(IndexParams::default().body_boost),
        };
        if let Err(e) = index_params.validate() {
            problems.push(e.to_string());
        }
        let stopwords = take("stopwords").map(|v| base.join(v));
        let lexicon = take("lexicon").map(|v| base.join(v));
        let pretagged_corpus = take("pretagged_corpus")
            .and_then(|v| parse_value::<bool>(&v, "pretagged_corpus", &mut problems))
            .unwrap_or(false);
        let pretagged_queries = take("pretagged_queries")
            .and_then(|v| parse_value::<bool>(&v, "pretagged_queries", &mut problems))
            .unwrap_or(false);

        for key in pairs.keys() {
            problems.push(format!("unknown key {key}"));
        }

        if let Some(corpus) = &corpus {
            check_corpus_path(corpus, corpus_format, &mut problems);
        }
        for (label, path) in [("summaries", &summaries)] {
            if let Some(path) = path {
                check_file(path, label, &mut problems);
            }
        }
        for (method, path) in &manual {
            check_file(path, &format!("manual.{method}"), &mut problems);
        }
        for (label, path) in [("stopwords", &stopwords), ("lexicon", &lexicon)] {
            if let Some(path) = path {
                check_file(path, label, &mut problems);
            }
        }

        if !problems.is_empty() {
            return Err(Error::Config { problems });
        }
        Ok(ExperimentConfig {
            corpus: corpus.expect("problems were empty"),
            corpus_format,
            summaries: summaries.expect("problems were empty"),
            manual,
            subset_sizes,
            seed,
            strategies,
            variants,
            cutoffs,
            annotator_subsets,
            out_dir,
            index_params,
            stopwords,
            lexicon,
            pretagged_corpus,
            pretagged_queries,
        })
    }

    /// Full metric grid: strategies x variants x cutoffs, in config order.
    pub fn eval_configs(&self) -> Vec<EvalConfig> {
        let mut configs = Vec::new();
        for &strategy in &self.strategies {
            for &variant in &self.variants {
                for &cutoff in &self.cutoffs {
                    configs.push(EvalConfig {
                        strategy,
                        variant,
                        cutoff,
                    });
                }
            }
        }
        configs
    }

    /// Tagging backend for document text.
    pub fn corpus_tagger(&self) -> Result<Tagger> {
        self.tagger(self.pretagged_corpus)
    }

    /// Tagging backend for summary text.
    pub fn query_tagger(&self) -> Result<Tagger> {
        self.tagger(self.pretagged_queries)
    }

    fn tagger(&self, pretagged: bool) -> Result<Tagger> {
        if pretagged {
            return Ok(Tagger::Pretagged);
        }
        let mut heuristic = HeuristicTagger::default();
        if let Some(path) = &self.stopwords {
            heuristic = heuristic.with_stopwords(load_stopwords(path)?);
        }
        if let Some(path) = &self.lexicon {
            heuristic = heuristic.with_lexicon(load_lexicon(path)?);
        }
        Ok(Tagger::Heuristic(heuristic))
    }

    /// Canonical dump of the effective configuration, used for hashing.
    pub fn canonical_string(&self) -> String {
        let mut out = String::new();
        let mut put = |key: &str, value: String| {
            writeln!(out, "{key} = {value}").expect("writing to a string cannot fail");
        };
        put("corpus", self.corpus.display().to_string());
        put(
            "corpus_format",
            match self.corpus_format {
                CorpusFormat::Jsonl => "jsonl".to_string(),
                CorpusFormat::DirOfText => "dir_of_text".to_string(),
            },
        );
        put("summaries", self.summaries.display().to_string());
        for (method, path) in &self.manual {
            put(&format!("manual.{method}"), path.display().to_string());
        }
        put("subset_sizes", join(&self.subset_sizes));
        put("seed", self.seed.to_string());
        put("strategies", join(&self.strategies));
        put("variants", join(&self.variants));
        put("cutoffs", join(&self.cutoffs));
        put(
            "annotator_subsets",
            self.annotator_subsets
                .iter()
                .map(|s| s.join(","))
                .collect::<Vec<_>>()
                .join("; "),
        );
        put("out", self.out_dir.display().to_string());
        put("k1", self.index_params.k1.to_string());
        put("b", self.index_params.b.to_string());
        put("title_boost", self.index_params.title_boost.to_string());
        put("body_boost", self.index_params.body_boost.to_string());
        for (key, path) in [("stopwords", &self.stopwords), ("lexicon", &self.lexicon)] {
            if let Some(path) = path {
                put(key, path.display().to_string());
            }
        }
        put("pretagged_corpus", self.pretagged_corpus.to_string());
        put("pretagged_queries", self.pretagged_queries.to_string());
        out
    }

    /// SHA-256 of the canonical configuration dump, hex-encoded.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.canonical_string().as_bytes());
        hex(&digest)
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len() * 2);
    for byte in bytes {
        write!(out, "{byte:02x}").expect("writing to a string cannot fail");
    }
    out
}

fn join<T: Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn dedup<T: PartialEq>(items: Vec<T>) -> Vec<T> {
    let mut out = Vec::with_capacity(items.len());
    for item in items {
        if !out.contains(&item) {
            out.push(item);
        }
    }
    out
}

fn parse_value<T: FromStr>(value: &str, key: &str, problems: &mut Vec<String>) -> Option<T>
where
    T::Err: Display,
{
    match value.trim().parse::<T>() {
        Ok(parsed) => Some(parsed),
        Err(e) => {
            problems.push(format!("key {key}: cannot parse {value:?}: {e}"));
            None
        }
    }
}

fn parse_list<T: FromStr>(value: &str, key: &str, problems: &mut Vec<String>) -> Vec<T>
where
    T::Err: Display,
{
    let mut out = Vec::new();
    for item in value.split(',') {
        let item = item.trim();
        if item.is_empty() {
            problems.push(format!("key {key}: empty list item"));
            continue;
        }
        if let Some(parsed) = parse_value::<T>(item, key, problems) {
            out.push(parsed);
        }
    }
    out
}

fn parse_subsets(value: &str, problems: &mut Vec<String>) -> Vec<Vec<String>> {
    let mut subsets = Vec::new();
    for group in value.split(';') {
        let mut ids: Vec<String> = group
            .split(',')
            .map(str::trim)
            .filter(|id| !id.is_empty())
            .map(str::to_string)
            .collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.is_empty() {
            problems.push("annotator_subsets contains an empty subset".to_string());
        } else {
            subsets.push(ids);
        }
    }
    subsets
}

fn check_corpus_path(path: &Path, format: CorpusFormat, problems: &mut Vec<String>) {
    let ok = match format {
        CorpusFormat::Jsonl => path.is_file(),
        CorpusFormat::DirOfText => path.is_dir(),
    };
    if !ok {
        let kind = match format {
            CorpusFormat::Jsonl => "file",
            CorpusFormat::DirOfText => "directory",
        };
        problems.push(format!("corpus: {} is not a {kind}", path.display()));
    }
}

fn check_file(path: &Path, label: &str, problems: &mut Vec<String>) {
    if !path.is_file() {
        problems.push(format!("{label}: {} is not a file", path.display()));
    }
}
