//! Summary scoring against retrieval results.
//!
//! A candidate summary and each reference summary are reformulated into
//! queries and run against the same index. With `R_C` the candidate's
//! ranked list and `R_G1..R_GM` the reference lists, the set-based score is
//!
//! ```text
//! sera = (1 / M) * sum over i of |R_C intersect R_Gi| / |R_C|
//! ```
//!
//! and the rank-discounted score counts each shared document at candidate
//! position `j` and reference position `k` (1-based) as
//! `1 / log(|j - k| + 2)`, normalized by the maximum attainable mass
//! `M * cutoff / log(2)`:
//!
//! ```text
//! sera_dis = sum over i, j, k of X_jk / (M * D_max),  D_max = cutoff / log(2)
//! ```
//!
//! The logarithm base cancels term by term, so any base gives the same
//! score; two identical lists of exactly `cutoff` documents score 1.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::index::{InvertedIndex, RankedList};
use crate::text::reformulate::{reformulate, Query, Strategy};
use crate::text::tag::Tagger;

/// Role of a summary in the evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SummaryKind {
    /// System output being scored.
    Candidate,
    /// Human-written summary scored against.
    Reference,
}

/// One summary attached to a topic and a system (or annotator) id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub topic_id: String,
    pub system_id: String,
    pub kind: SummaryKind,
    pub text: String,
}

/// Which scoring formula to apply to the ranked lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Sera,
    SeraDis,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::Sera, Variant::SeraDis];

    pub fn label(self) -> &'static str {
        match self {
            Variant::Sera => "sera",
            Variant::SeraDis => "dis",
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sera" => Ok(Variant::Sera),
            "dis" | "sera-dis" | "sera_dis" => Ok(Variant::SeraDis),
            other => Err(Error::File {
                path: other.to_string(),
                message: "unknown variant (expected sera or dis)".to_string(),
            }),
        }
    }
}

/// One metric to compute: a reformulation strategy, a scoring variant, and
/// a retrieval cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EvalConfig {
    pub strategy: Strategy,
    pub variant: Variant,
    pub cutoff: usize,
}

impl EvalConfig {
    /// Reporting name, e.g. `SERA-5`, `SERA-DIS-NP-10`, `GeSERA-10`.
    pub fn metric_name(&self) -> String {
        let base = match (self.strategy, self.variant) {
            (Strategy::Raw, Variant::Sera) => "SERA",
            (Strategy::Raw, Variant::SeraDis) => "SERA-DIS",
            (Strategy::NounPhrase, Variant::Sera) => "SERA-NP",
            (Strategy::NounPhrase, Variant::SeraDis) => "SERA-DIS-NP",
            (Strategy::Keyword, Variant::Sera) => "SERA-KW",
            (Strategy::Keyword, Variant::SeraDis) => "SERA-DIS-KW",
            (Strategy::Gesera, Variant::Sera) => "GeSERA",
            (Strategy::Gesera, Variant::SeraDis) => "GeSERA-DIS",
        };
        format!("{base}-{}", self.cutoff)
    }
}

/// Mean overlap between the candidate list and each reference list.
///
/// Returns 0 when the candidate list is empty; an empty reference slice is
/// an error.
pub fn sera(candidate: &RankedList, references: &[RankedList]) -> Result<f64> {
    if references.is_empty() {
        return Err(Error::NoReferences);
    }
    if candidate.is_empty() {
        return Ok(0.0);
    }
    let candidate_ids: HashSet<&str> = candidate.ids().collect();
    let size = candidate.len() as f64;
    let total: f64 = references
        .iter()
        .map(|r| r.ids().filter(|id| candidate_ids.contains(id)).count() as f64 / size)
        .sum();
    Ok(total / references.len() as f64)
}

/// Rank-discounted overlap, normalized to `[0, 1]` by the candidate's
/// cutoff. See the module docs for the formula.
pub fn sera_dis(candidate: &RankedList, references: &[RankedList]) -> Result<f64> {
    sera_dis_with_log_base(candidate, references, std::f64::consts::E)
}

/// [`sera_dis`] with an explicit logarithm base; the base cancels, so the
/// result is the same for every base greater than 1. Exposed so that the
/// base-independence is directly checkable.
pub fn sera_dis_with_log_base(
    candidate: &RankedList,
    references: &[RankedList],
    base: f64,
) -> Result<f64> {
    assert!(base > 1.0, "log base must exceed 1");
    if references.is_empty() {
        return Err(Error::NoReferences);
    }
    if candidate.is_empty() {
        return Ok(0.0);
    }
    let log2 = 2.0f64.log(base);
    let mut total = 0.0;
    for reference in references {
        let positions: HashMap<&str, usize> = reference
            .ids()
            .enumerate()
            .map(|(k, id)| (id, k + 1))
            .collect();
        for (j, id) in candidate.ids().enumerate() {
            if let Some(&k) = positions.get(id) {
                let distance = (j + 1).abs_diff(k) as f64;
                // X_jk / D_max with the basis-dependent factors cancelled.
                total += log2 / (distance + 2.0).log(base);
            }
        }
    }
    Ok(total / (references.len() * candidate.cutoff()) as f64)
}

/// Score of one candidate, plus whether its query retrieved nothing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryScore {
    pub score: f64,
    /// True when the candidate's reformulated query retrieved no documents
    /// (the score is then 0 by definition, not by evidence).
    pub degenerate: bool,
}

/// One row of a score table.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub topic_id: String,
    pub system_id: String,
    pub metric: String,
    pub score: f64,
}

/// Per-(topic, system, metric) scores with CSV output.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScoreTable {
    rows: Vec<ScoreRow>,
}

impl ScoreTable {
    pub fn new(rows: Vec<ScoreRow>) -> Self {
        ScoreTable { rows }
    }

    pub fn rows(&self) -> &[ScoreRow] {
        &self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Metric names present, in first-appearance order.
    pub fn metrics(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        self.rows
            .iter()
            .map(|r| r.metric.as_str())
            .filter(|m| seen.insert(*m))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, mut writer: W) -> Result<()> {
        let to_io = |e: std::io::Error| Error::io("score table", e);
        writeln!(writer, "topic_id,system_id,metric,score").map_err(to_io)?;
        for row in &self.rows {
            writeln!(
                writer,
                "{},{},{},{}",
                row.topic_id, row.system_id, row.metric, row.score
            )
            .map_err(to_io)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let label = path.display().to_string();
        let file = fs::File::create(path).map_err(|e| Error::io(&label, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

/// Result of scoring a whole dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetOutcome {
    pub table: ScoreTable,
    /// Number of (candidate, metric) evaluations whose candidate query
    /// retrieved no documents.
    pub degenerate_rows: usize,
}

/// Scores summaries against one index with one tagging backend.
#[derive(Debug, Clone, Copy)]
pub struct Evaluator<'a> {
    index: &'a InvertedIndex,
    tagger: &'a Tagger,
}

impl<'a> Evaluator<'a> {
    pub fn new(index: &'a InvertedIndex, tagger: &'a Tagger) -> Self {
        Evaluator { index, tagger }
    }

    pub fn index(&self) -> &'a InvertedIndex {
        self.index
    }

    /// Reformulates `text` into a query under `strategy`.
    pub fn query_for(&self, text: &str, strategy: Strategy) -> Result<Query> {
        Ok(reformulate(&self.tagger.tag_text(text)?, strategy))
    }

    /// Reformulates and retrieves in one step.
    pub fn retrieval_for(&self, text: &str, strategy: Strategy, cutoff: usize) -> Result<RankedList> {
        Ok(self.index.retrieve(&self.query_for(text, strategy)?, cutoff))
    }

    /// Scores one candidate against its references under one metric.
    pub fn evaluate_summary(
        &self,
        candidate: &SummaryRecord,
        references: &[SummaryRecord],
        config: &EvalConfig,
    ) -> Result<SummaryScore> {
        if references.is_empty() {
            return Err(Error::NoReferences);
        }
        expect_kind(candidate, SummaryKind::Candidate)?;
        for reference in references {
            expect_kind(reference, SummaryKind::Reference)?;
            if reference.topic_id != candidate.topic_id {
                return Err(Error::TopicMismatch {
                    expected: candidate.topic_id.clone(),
                    found: reference.topic_id.clone(),
                });
            }
        }
        let candidate_list = self.retrieval_for(&candidate.text, config.strategy, config.cutoff)?;
        let mut reference_lists = Vec::with_capacity(references.len());
        for reference in references {
            reference_lists.push(self.retrieval_for(
                &reference.text,
                config.strategy,
                config.cutoff,
            )?);
        }
        let score = match config.variant {
            Variant::Sera => sera(&candidate_list, &reference_lists)?,
            Variant::SeraDis => sera_dis(&candidate_list, &reference_lists)?,
        };
        Ok(SummaryScore {
            score,
            degenerate: candidate_list.is_empty(),
        })
    }

    /// Scores every candidate under every metric. Row order is candidates
    /// in input order, metrics in `configs` order within a candidate.
    pub fn evaluate_dataset(
        &self,
        candidates: &[SummaryRecord],
        references: &[SummaryRecord],
        configs: &[EvalConfig],
    ) -> Result<DatasetOutcome> {
        self.evaluate_dataset_impl(candidates, references, configs, true)
    }

    /// Sequential fallback of [`Evaluator::evaluate_dataset`]; same result,
    /// single thread.
    pub fn evaluate_dataset_seq(
        &self,
        candidates: &[SummaryRecord],
        references: &[SummaryRecord],
        configs: &[EvalConfig],
    ) -> Result<DatasetOutcome> {
        self.evaluate_dataset_impl(candidates, references, configs, false)
    }

    fn evaluate_dataset_impl(
        &self,
        candidates: &[SummaryRecord],
        references: &[SummaryRecord],
        configs: &[EvalConfig],
        parallel: bool,
    ) -> Result<DatasetOutcome> {
        for candidate in candidates {
            expect_kind(candidate, SummaryKind::Candidate)?;
        }
        for reference in references {
            expect_kind(reference, SummaryKind::Reference)?;
        }
        if let Some(bad) = configs.iter().find(|c| c.cutoff == 0) {
            return Err(Error::Config {
                problems: vec![format!(
                    "metric {} has cutoff 0; cutoffs must be positive",
                    bad.metric_name()
                )],
            });
        }

        let mut refs_by_topic: HashMap<&str, Vec<usize>> = HashMap::new();
        for (i, reference) in references.iter().enumerate() {
            refs_by_topic
                .entry(reference.topic_id.as_str())
                .or_default()
                .push(i);
        }
        let mut missing: Vec<String> = candidates
            .iter()
            .filter(|c| !refs_by_topic.contains_key(c.topic_id.as_str()))
            .map(|c| c.topic_id.clone())
            .collect();
        missing.sort_unstable();
        missing.dedup();
        if !missing.is_empty() {
            return Err(Error::TopicsWithoutReferences { topics: missing });
        }

        // Distinct (strategy, cutoff) pairs, in first-appearance order, so
        // each query is reformulated and retrieved once per pair.
        let mut pairs: Vec<(Strategy, usize)> = Vec::new();
        for config in configs {
            if !pairs.contains(&(config.strategy, config.cutoff)) {
                pairs.push((config.strategy, config.cutoff));
            }
        }

        let retrieve_all = |record: &SummaryRecord| -> Result<Vec<RankedList>> {
            pairs
                .iter()
                .map(|&(strategy, cutoff)| self.retrieval_for(&record.text, strategy, cutoff))
                .collect()
        };
        let reference_lists = collect_results(exec::map_collect(references, parallel, retrieve_all))?;
        let candidate_lists = collect_results(exec::map_collect(candidates, parallel, retrieve_all))?;

        let mut topic_pair_refs: HashMap<(&str, usize), Vec<RankedList>> = HashMap::new();
        for (i, reference) in references.iter().enumerate() {
            for (p, list) in reference_lists[i].iter().enumerate() {
                topic_pair_refs
                    .entry((reference.topic_id.as_str(), p))
                    .or_default()
                    .push(list.clone());
            }
        }

        let mut rows = Vec::with_capacity(candidates.len() * configs.len());
        let mut degenerate_rows = 0;
        for (i, candidate) in candidates.iter().enumerate() {
            for config in configs {
                let p = pairs
                    .iter()
                    .position(|&pair| pair == (config.strategy, config.cutoff))
                    .expect("pair was collected above");
                let candidate_list = &candidate_lists[i][p];
                let refs = &topic_pair_refs[&(candidate.topic_id.as_str(), p)];
                let score = match config.variant {
                    Variant::Sera => sera(candidate_list, refs),
                    Variant::SeraDis => sera_dis(candidate_list, refs),
                }
                .map_err(|e| {
                    e.context(format!(
                        "scoring topic {} system {} under {}",
                        candidate.topic_id,
                        candidate.system_id,
                        config.metric_name()
                    ))
                })?;
                if candidate_list.is_empty() {
                    degenerate_rows += 1;
                }
                rows.push(ScoreRow {
                    topic_id: candidate.topic_id.clone(),
                    system_id: candidate.system_id.clone(),
                    metric: config.metric_name(),
                    score,
                });
            }
        }
        if degenerate_rows > 0 {
            log::warn!("{degenerate_rows} evaluations had empty candidate retrievals");
        }
        Ok(DatasetOutcome {
            table: ScoreTable::new(rows),
            degenerate_rows,
        })
    }
}

fn expect_kind(record: &SummaryRecord, expected: SummaryKind) -> Result<()> {
    if record.kind != expected {
        return Err(Error::WrongKind {
            topic: record.topic_id.clone(),
            system: record.system_id.clone(),
            expected: match expected {
                SummaryKind::Candidate => "candidate",
                SummaryKind::Reference => "reference",
            },
        });
    }
    Ok(())
}

fn collect_results<T>(items: Vec<Result<T>>) -> Result<Vec<T>> {
    items.into_iter().collect()
}

/// Loose schema used to report precise per-line problems in summary files.
#[derive(Deserialize)]
struct RawSummary {
    topic_id: Option<String>,
    system_id: Option<String>,
    kind: Option<String>,
    text: Option<String>,
}

/// Loads summaries from JSON Lines: one object per line with `topic_id`,
/// `system_id`, `kind` (`candidate` or `reference`), and `text`.
pub fn load_summaries(path: impl AsRef<Path>) -> Result<Vec<SummaryRecord>> {
    let path = path.as_ref();
    let label = path.display().to_string();
    let file = fs::File::open(path).map_err(|e| Error::io(&label, e))?;
    let reader = BufReader::new(file);
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(&label, e))?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawSummary = serde_json::from_str(&line)
            .map_err(|e| Error::record(&label, lineno, e.to_string()))?;
        let field = |value: Option<String>, name: &str| -> Result<String> {
            let value = value.ok_or_else(|| {
                Error::record(&label, lineno, format!("missing field {name}"))
            })?;
            if value.trim().is_empty() {
                return Err(Error::record(&label, lineno, format!("empty field {name}")));
            }
            Ok(value)
        };
        let topic_id = field(raw.topic_id, "topic_id")?;
        let system_id = field(raw.system_id, "system_id")?;
        let kind_text = field(raw.kind, "kind")?;
        let kind = match kind_text.as_str() {
            "candidate" => SummaryKind::Candidate,
            "reference" => SummaryKind::Reference,
            other => {
                return Err(Error::record(
                    &label,
                    lineno,
                    format!("unknown kind {other:?} (expected candidate or reference)"),
                ))
            }
        };
        let text = field(raw.text, "text")?;
        if !seen.insert((topic_id.clone(), system_id.clone(), kind)) {
            return Err(Error::record(
                &label,
                lineno,
                format!("duplicate summary for topic {topic_id:?}, system {system_id:?}"),
            ));
        }
        records.push(SummaryRecord {
            topic_id,
            system_id,
            kind,
            text,
        });
    }
    Ok(records)
}

/// Splits records into (candidates, references), preserving order.
pub fn split_summaries(records: Vec<SummaryRecord>) -> (Vec<SummaryRecord>, Vec<SummaryRecord>) {
    records
        .into_iter()
        .partition(|r| r.kind == SummaryKind::Candidate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Document, DocumentCollection};
    use crate::index::{build_index, IndexParams};
    use approx::assert_abs_diff_eq;

    fn list(ids: &[&str], cutoff: usize) -> RankedList {
        RankedList::from_ids(ids.iter().copied(), cutoff).unwrap()
    }

    #[test]
    fn sera_matches_closed_forms() {
        let candidate = list(&["d1", "d2", "d3"], 3);
        let reference = list(&["d1", "d2", "x"], 3);
        assert_abs_diff_eq!(
            sera(&candidate, &[reference]).unwrap(),
            2.0 / 3.0,
            epsilon = 1e-15
        );

        let candidate = list(&["a", "b", "c", "d"], 4);
        let reference = list(&["a", "x", "y", "z"], 4);
        assert_abs_diff_eq!(sera(&candidate, &[reference]).unwrap(), 0.25, epsilon = 1e-15);

        let candidate = list(&["a", "b"], 2);
        let full = list(&["a", "b"], 2);
        let half = list(&["b", "x"], 2);
        assert_abs_diff_eq!(
            sera(&candidate, &[full, half]).unwrap(),
            0.75,
            epsilon = 1e-15
        );
    }

    #[test]
    fn sera_handles_degenerate_lists() {
        let empty = list(&[], 5);
        let reference = list(&["a"], 5);
        assert_eq!(sera(&empty, std::slice::from_ref(&reference)).unwrap(), 0.0);
        assert!(matches!(
            sera(&reference, &[]),
            Err(Error::NoReferences)
        ));
        let disjoint = list(&["q", "r"], 5);
        assert_eq!(sera(&disjoint, &[reference]).unwrap(), 0.0);
    }

    #[test]
    fn sera_dis_matches_the_swapped_pair_value() {
        let candidate = list(&["a", "b"], 2);
        let reference = list(&["b", "a"], 2);
        let got = sera_dis(&candidate, &[reference]).unwrap();
        let expected = std::f64::consts::LN_2 / 3.0f64.ln();
        assert_abs_diff_eq!(got, expected, epsilon = 1e-15);
        assert_abs_diff_eq!(got, 0.63093, epsilon = 5e-6);
    }

    #[test]
    fn sera_dis_of_identical_full_lists_is_exactly_one() {
        for n in 1..=10 {
            let ids: Vec<String> = (0..n).map(|i| format!("d{i}")).collect();
            let a = RankedList::from_ids(ids.clone(), n).unwrap();
            let b = RankedList::from_ids(ids, n).unwrap();
            assert_eq!(sera_dis(&a, &[b]).unwrap(), 1.0);
        }
    }

    #[test]
    fn sera_dis_is_log_base_invariant() {
        let candidate = list(&["a", "b", "c", "e"], 5);
        let reference = list(&["c", "d", "a"], 5);
        let reference = std::slice::from_ref(&reference);
        let natural = sera_dis(&candidate, reference).unwrap();
        for base in [2.0, 10.0, std::f64::consts::E] {
            let other = sera_dis_with_log_base(&candidate, reference, base).unwrap();
            assert_abs_diff_eq!(other, natural, epsilon = 1e-12);
        }
    }

    #[test]
    fn sera_dis_stays_within_bounds() {
        let candidate = list(&["a", "b", "c"], 5);
        let near = list(&["a", "c", "x"], 5);
        let far = list(&["x", "y", "a"], 5);
        for refs in [vec![near.clone()], vec![near, far]] {
            let score = sera_dis(&candidate, &refs).unwrap();
            assert!((0.0..=1.0).contains(&score), "{score}");
        }
    }

    #[test]
    fn metric_names_follow_the_scheme() {
        let name = |s, v, c| EvalConfig { strategy: s, variant: v, cutoff: c }.metric_name();
        assert_eq!(name(Strategy::Raw, Variant::Sera, 5), "SERA-5");
        assert_eq!(name(Strategy::Raw, Variant::SeraDis, 10), "SERA-DIS-10");
        assert_eq!(name(Strategy::NounPhrase, Variant::Sera, 5), "SERA-NP-5");
        assert_eq!(name(Strategy::Keyword, Variant::SeraDis, 5), "SERA-DIS-KW-5");
        assert_eq!(name(Strategy::Gesera, Variant::Sera, 10), "GeSERA-10");
        assert_eq!(name(Strategy::Gesera, Variant::SeraDis, 10), "GeSERA-DIS-10");
    }

    fn tiny_corpus() -> DocumentCollection {
        let bodies = [
            ("d1", "the hurricane damaged the coastal city"),
            ("d2", "the storm surge flooded many houses"),
            ("d3", "rescue teams helped people after the hurricane"),
            ("d4", "the local team won the football match"),
            ("d5", "players celebrated the football victory"),
        ];
        let docs = bodies
            .iter()
            .map(|(id, body)| Document {
                id: id.to_string(),
                title: String::new(),
                body: body.to_string(),
            })
            .collect();
        DocumentCollection::from_documents(docs, "tiny").unwrap()
    }

    fn record(topic: &str, system: &str, kind: SummaryKind, text: &str) -> SummaryRecord {
        SummaryRecord {
            topic_id: topic.to_string(),
            system_id: system.to_string(),
            kind,
            text: text.to_string(),
        }
    }

    #[test]
    fn identical_candidate_and_reference_score_one() {
        let corpus = tiny_corpus();
        let index = build_index(&corpus, IndexParams::default(), &Tagger::default()).unwrap();
        let tagger = Tagger::default();
        let evaluator = Evaluator::new(&index, &tagger);
        let text = "the hurricane flooded the city and rescue teams helped";
        let candidate = record("t1", "sys1", SummaryKind::Candidate, text);
        let reference = record("t1", "A1", SummaryKind::Reference, text);
        let config = EvalConfig {
            strategy: Strategy::Raw,
            variant: Variant::Sera,
            cutoff: 5,
        };
        let result = evaluator
            .evaluate_summary(&candidate, std::slice::from_ref(&reference), &config)
            .unwrap();
        assert_eq!(result.score, 1.0);
        assert!(!result.degenerate);
    }

    #[test]
    fn stopword_only_candidate_is_degenerate() {
        let corpus = tiny_corpus();
        let index = build_index(&corpus, IndexParams::default(), &Tagger::default()).unwrap();
        let tagger = Tagger::default();
        let evaluator = Evaluator::new(&index, &tagger);
        let candidate = record("t1", "sys1", SummaryKind::Candidate, "the of and");
        let reference = record("t1", "A1", SummaryKind::Reference, "hurricane city rescue");
        let config = EvalConfig {
            strategy: Strategy::Gesera,
            variant: Variant::Sera,
            cutoff: 5,
        };
        let result = evaluator
            .evaluate_summary(&candidate, std::slice::from_ref(&reference), &config)
            .unwrap();
        assert_eq!(result.score, 0.0);
        assert!(result.degenerate);
    }

    #[test]
    fn mismatched_topics_and_kinds_are_rejected() {
        let corpus = tiny_corpus();
        let index = build_index(&corpus, IndexParams::default(), &Tagger::default()).unwrap();
        let tagger = Tagger::default();
        let evaluator = Evaluator::new(&index, &tagger);
        let config = EvalConfig {
            strategy: Strategy::Raw,
            variant: Variant::Sera,
            cutoff: 5,
        };
        let candidate = record("t1", "sys1", SummaryKind::Candidate, "hurricane");
        let wrong_topic = record("t2", "A1", SummaryKind::Reference, "hurricane");
        assert!(matches!(
            evaluator.evaluate_summary(&candidate, &[wrong_topic], &config),
            Err(Error::TopicMismatch { .. })
        ));
        let not_a_reference = record("t1", "sys2", SummaryKind::Candidate, "hurricane");
        assert!(matches!(
            evaluator.evaluate_summary(&candidate, &[not_a_reference], &config),
            Err(Error::WrongKind { .. })
        ));
        assert!(matches!(
            evaluator.evaluate_summary(&candidate, &[], &config),
            Err(Error::NoReferences)
        ));
    }

    fn dataset() -> (Vec<SummaryRecord>, Vec<SummaryRecord>) {
        let candidates = vec![
            record("t1", "sysA", SummaryKind::Candidate, "hurricane flooded the city"),
            record("t1", "sysB", SummaryKind::Candidate, "football match victory"),
            record("t2", "sysA", SummaryKind::Candidate, "the football team won"),
        ];
        let references = vec![
            record("t1", "A1", SummaryKind::Reference, "hurricane damaged city houses"),
            record("t1", "A2", SummaryKind::Reference, "storm flooded houses rescue"),
            record("t2", "A1", SummaryKind::Reference, "football players celebrated victory"),
        ];
        (candidates, references)
    }

    #[test]
    fn dataset_rows_cover_every_candidate_and_metric() {
        let corpus = tiny_corpus();
        let index = build_index(&corpus, IndexParams::default(), &Tagger::default()).unwrap();
        let tagger = Tagger::default();
        let evaluator = Evaluator::new(&index, &tagger);
        let (candidates, references) = dataset();
        let configs = [
            EvalConfig { strategy: Strategy::Raw, variant: Variant::Sera, cutoff: 3 },
            EvalConfig { strategy: Strategy::Gesera, variant: Variant::SeraDis, cutoff: 3 },
        ];
        let outcome = evaluator
            .evaluate_dataset(&candidates, &references, &configs)
            .unwrap();
        assert_eq!(outcome.table.rows().len(), candidates.len() * configs.len());
        assert_eq!(outcome.table.metrics(), ["SERA-3", "GeSERA-DIS-3"]);
        let first = &outcome.table.rows()[0];
        assert_eq!(
            (first.topic_id.as_str(), first.system_id.as_str(), first.metric.as_str()),
            ("t1", "sysA", "SERA-3")
        );
        for row in outcome.table.rows() {
            assert!((0.0..=1.0).contains(&row.score), "{row:?}");
        }
    }

    #[test]
    fn dataset_sequential_and_parallel_agree_exactly() {
        let corpus = tiny_corpus();
        let index = build_index(&corpus, IndexParams::default(), &Tagger::default()).unwrap();
        let tagger = Tagger::default();
        let evaluator = Evaluator::new(&index, &tagger);
        let (candidates, references) = dataset();
        let configs = [
            EvalConfig { strategy: Strategy::Raw, variant: Variant::Sera, cutoff: 5 },
            EvalConfig { strategy: Strategy::Raw, variant: Variant::SeraDis, cutoff: 5 },
        ];
        let par = evaluator.evaluate_dataset(&candidates, &references, &configs).unwrap();
        let seq = evaluator
            .evaluate_dataset_seq(&candidates, &references, &configs)
            .unwrap();
        assert_eq!(par, seq);
        assert_eq!(par.table.to_csv_string(), seq.table.to_csv_string());
    }

    #[test]
    fn dataset_rejects_candidates_without_references() {
        let corpus = tiny_corpus();
        let index = build_index(&corpus, IndexParams::default(), &Tagger::default()).unwrap();
        let tagger = Tagger::default();
        let evaluator = Evaluator::new(&index, &tagger);
        let candidates = vec![record("t9", "sysA", SummaryKind::Candidate, "hurricane")];
        let references = vec![record("t1", "A1", SummaryKind::Reference, "hurricane")];
        let config = EvalConfig { strategy: Strategy::Raw, variant: Variant::Sera, cutoff: 5 };
        let err = evaluator
            .evaluate_dataset(&candidates, &references, &[config])
            .unwrap_err();
        assert!(err.to_string().contains("t9"), "{err}");
    }

    #[test]
    fn csv_output_has_the_pinned_header_and_row_shape() {
        let table = ScoreTable::new(vec![ScoreRow {
            topic_id: "t1".to_string(),
            system_id: "sysA".to_string(),
            metric: "SERA-5".to_string(),
            score: 0.5,
        }]);
        assert_eq!(
            table.to_csv_string(),
            "topic_id,system_id,metric,score\nt1,sysA,SERA-5,0.5\n"
        );
    }

    #[test]
    fn summary_file_round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("summaries.jsonl");
        fs::write(
            &path,
            concat!(
                "{\"topic_id\":\"t1\",\"system_id\":\"s1\",\"kind\":\"candidate\",\"text\":\"alpha\"}\n",
                "{\"topic_id\":\"t1\",\"system_id\":\"a1\",\"kind\":\"reference\",\"text\":\"beta\"}\n",
            ),
        )
        .unwrap();
        let records = load_summaries(&path).unwrap();
        assert_eq!(records.len(), 2);
        let (candidates, references) = split_summaries(records);
        assert_eq!(candidates.len(), 1);
        assert_eq!(references.len(), 1);

        fs::write(
            &path,
            "{\"topic_id\":\"t1\",\"system_id\":\"s1\",\"kind\":\"candidate\"}\n",
        )
        .unwrap();
        let err = load_summaries(&path).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 1") && msg.contains("missing field text"), "{msg}");

        fs::write(
            &path,
            "{\"topic_id\":\"t1\",\"system_id\":\"s1\",\"kind\":\"summary\",\"text\":\"x\"}\n",
        )
        .unwrap();
        let err = load_summaries(&path).unwrap_err();
        assert!(err.to_string().contains("summary"), "{err}");

        let duplicate =
            "{\"topic_id\":\"t1\",\"system_id\":\"s1\",\"kind\":\"candidate\",\"text\":\"x\"}\n";
        fs::write(&path, format!("{duplicate}{duplicate}")).unwrap();
        let err = load_summaries(&path).unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");
    }
}
