//! Index-size sweep: evaluate the full metric grid at each index size and
//! correlate the aggregated scores with every manual method.

use crate::correlation::{aggregate_to_system, correlate, load_manual_scores, SystemScoreVector};
use crate::corpus::{load_corpus, sample_subset, DocumentCollection, SubsetSpec};
use crate::error::{Error, Result};
use crate::index::{build_index, InvertedIndex};
use crate::scoring::{load_summaries, split_summaries, Evaluator, ScoreTable, SummaryRecord};
use crate::text::tag::Tagger;

use super::config::ExperimentConfig;
use super::{derive_seed, write_manifest, SweepResult, SweepRow};

/// Everything a run needs loaded off disk, shared by the sweep and the
/// annotator study.
pub(crate) struct RunInputs {
    pub corpus: DocumentCollection,
    pub candidates: Vec<SummaryRecord>,
    pub references: Vec<SummaryRecord>,
    /// One score vector per manual method, in method-name order.
    pub manual: Vec<SystemScoreVector>,
    pub corpus_tagger: Tagger,
    pub query_tagger: Tagger,
}

pub(crate) fn load_inputs(config: &ExperimentConfig) -> Result<RunInputs> {
    let corpus = load_corpus(&config.corpus, config.corpus_format)
        .map_err(|e| e.context("loading corpus"))?;
    let records =
        load_summaries(&config.summaries).map_err(|e| e.context("loading summaries"))?;
    let (candidates, references) = split_summaries(records);
    let mut manual = Vec::with_capacity(config.manual.len());
    for (method, path) in &config.manual {
        manual.push(
            load_manual_scores(path, method.clone())
                .map_err(|e| e.context(format!("loading manual.{method}")))?,
        );
    }
    Ok(RunInputs {
        corpus,
        candidates,
        references,
        manual,
        corpus_tagger: config.corpus_tagger()?,
        query_tagger: config.query_tagger()?,
    })
}

/// Checks every subset size against the loaded corpus, all at once.
pub(crate) fn check_sizes(config: &ExperimentConfig, corpus: &DocumentCollection) -> Result<()> {
    let problems: Vec<String> = config
        .subset_sizes
        .iter()
        .filter(|&&size| size > corpus.len())
        .map(|&size| {
            format!(
                "subset size {size} exceeds the corpus size ({} documents)",
                corpus.len()
            )
        })
        .collect();
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::Config { problems })
    }
}

/// Samples a subset of `size` documents and builds its index.
pub(crate) fn build_index_at_size(
    config: &ExperimentConfig,
    inputs: &RunInputs,
    size: usize,
) -> Result<InvertedIndex> {
    let spec = SubsetSpec {
        size,
        seed: derive_seed(config.seed, size as u64),
    };
    let subset = sample_subset(&inputs.corpus, spec)?;
    build_index(&subset, config.index_params, &inputs.corpus_tagger)
}

/// Scores the candidates against `references` over one index.
pub(crate) fn evaluate_with_index(
    config: &ExperimentConfig,
    inputs: &RunInputs,
    index: &InvertedIndex,
    references: &[SummaryRecord],
) -> Result<ScoreTable> {
    let evaluator = Evaluator::new(index, &inputs.query_tagger);
    let outcome = evaluator.evaluate_dataset(&inputs.candidates, references, &config.eval_configs())?;
    Ok(outcome.table)
}

/// Expands one evaluated score table into grid rows, correlating each
/// metric against each manual method. Aggregation or correlation failures
/// become error rows for the affected cells.
pub(crate) fn correlation_rows(
    group: &str,
    table: &ScoreTable,
    config: &ExperimentConfig,
    manual: &[SystemScoreVector],
    rows: &mut Vec<SweepRow>,
) {
    for eval in config.eval_configs() {
        let metric = eval.metric_name();
        match aggregate_to_system(table, &metric) {
            Ok(auto) => {
                for scores in manual {
                    rows.push(SweepRow {
                        group: group.to_string(),
                        metric: metric.clone(),
                        manual_method: scores.metric_name().to_string(),
                        outcome: correlate(&auto, scores).map_err(|e| e.to_string()),
                    });
                }
            }
            Err(e) => {
                let message = e.to_string();
                for scores in manual {
                    rows.push(SweepRow {
                        group: group.to_string(),
                        metric: metric.clone(),
                        manual_method: scores.metric_name().to_string(),
                        outcome: Err(message.clone()),
                    });
                }
            }
        }
    }
}

/// Fills a group's whole block of grid rows with one error message.
pub(crate) fn error_rows(
    group: &str,
    message: &str,
    config: &ExperimentConfig,
    manual: &[SystemScoreVector],
    rows: &mut Vec<SweepRow>,
) {
    for eval in config.eval_configs() {
        for scores in manual {
            rows.push(SweepRow {
                group: group.to_string(),
                metric: eval.metric_name(),
                manual_method: scores.metric_name().to_string(),
                outcome: Err(message.to_string()),
            });
        }
    }
}

/// Runs the full sweep grid and writes `sweep.csv`, `sweep_long.csv`, and
/// `manifest.txt` into the configured output directory.
///
/// Input-loading failures abort the run; failures inside the grid (a size
/// that cannot be evaluated, a correlation without variance) appear as
/// error rows, so the output always covers the full
/// sizes x metrics x manual-methods grid.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    let inputs = load_inputs(config)?;
    check_sizes(config, &inputs.corpus)?;

    let mut rows = Vec::new();
    for &size in &config.subset_sizes {
        let group = size.to_string();
        let table = build_index_at_size(config, &inputs, size)
            .and_then(|index| evaluate_with_index(config, &inputs, &index, &inputs.references));
        match table {
            Ok(table) => correlation_rows(&group, &table, config, &inputs.manual, &mut rows),
            Err(e) => error_rows(&group, &e.to_string(), config, &inputs.manual, &mut rows),
        }
    }

    let result = SweepResult::new("index_size", rows);
    result.save(&config.out_dir, "sweep")?;
    write_manifest(config, &config.out_dir)?;
    Ok(result)
}
