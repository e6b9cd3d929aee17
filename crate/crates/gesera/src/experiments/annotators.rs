//! Annotator-subset study: re-evaluate with references restricted to each
//! configured combination of annotators and correlate each restriction
//! against the manual methods.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::scoring::SummaryRecord;

use super::config::ExperimentConfig;
use super::sweep::{
    build_index_at_size, check_sizes, correlation_rows, error_rows, evaluate_with_index,
    load_inputs,
};
use super::{write_manifest, SweepResult, SweepRow};

/// Label of a subset block in the output: sorted ids joined with `+`.
pub fn subset_label(subset: &[String]) -> String {
    subset.join("+")
}

/// Runs the annotator study over `config.annotator_subsets` and writes
/// `annotators.csv`, `annotators_long.csv`, and `manifest.txt` into the
/// configured output directory.
///
/// Reference records carry annotator ids in `system_id`. Evaluation uses
/// one index built at the first configured subset size; each annotator
/// subset restricts the reference pool before scoring, so the
/// full-annotator subset reproduces the plain evaluation exactly. A subset
/// naming an unknown annotator is an error; a subset that strips some
/// topic of all its references shows up as error rows for that block.
pub fn run_annotator_study(config: &ExperimentConfig) -> Result<SweepResult> {
    if config.annotator_subsets.is_empty() {
        return Err(Error::Config {
            problems: vec!["annotator_subsets is required for the annotator study".to_string()],
        });
    }
    let inputs = load_inputs(config)?;
    check_sizes(config, &inputs.corpus)?;

    let known: BTreeSet<&str> = inputs
        .references
        .iter()
        .map(|r| r.system_id.as_str())
        .collect();
    for subset in &config.annotator_subsets {
        for id in subset {
            if !known.contains(id.as_str()) {
                return Err(Error::UnknownAnnotator { id: id.clone() });
            }
        }
    }

    let index = build_index_at_size(config, &inputs, config.subset_sizes[0])
        .map_err(|e| e.context("building the study index"))?;

    let mut rows: Vec<SweepRow> = Vec::new();
    for subset in &config.annotator_subsets {
        let group = subset_label(subset);
        let references: Vec<SummaryRecord> = inputs
            .references
            .iter()
            .filter(|r| subset.contains(&r.system_id))
            .cloned()
            .collect();
        match evaluate_with_index(config, &inputs, &index, &references) {
            Ok(table) => correlation_rows(&group, &table, config, &inputs.manual, &mut rows),
            Err(e) => error_rows(&group, &e.to_string(), config, &inputs.manual, &mut rows),
        }
    }

    let result = SweepResult::new("annotators", rows);
    result.save(&config.out_dir, "annotators")?;
    write_manifest(config, &config.out_dir)?;
    Ok(result)
}
