//! Experiment runners: index-size sweeps, annotator-subset studies, and
//! POS-distribution reports, all emitting deterministic CSV plus a run
//! manifest tying outputs to their inputs.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::corpus::{load_corpus, CorpusFormat};
use crate::correlation::CorrelationResult;
use crate::error::{Error, Result};
use crate::text::distribution::pos_distribution;
use crate::text::tag::Tagger;

pub mod annotators;
pub mod config;
pub mod sweep;
pub mod synth;

pub use annotators::run_annotator_study;
pub use config::ExperimentConfig;
pub use sweep::run_sweep;

/// Per-size sampling seed: a hash of (base seed, subset size), so adding a
/// size to the grid never changes the other sizes' subsets.
pub fn derive_seed(base_seed: u64, size: u64) -> u64 {
    splitmix64(base_seed ^ splitmix64(size))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// One cell of a sweep or annotator-study grid. `group` is the index size
/// for sweeps and the annotator-subset label for annotator studies.
/// Failures are carried as messages so no grid cell is silently skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub group: String,
    pub metric: String,
    pub manual_method: String,
    pub outcome: std::result::Result<CorrelationResult, String>,
}

/// Full grid of correlation results, one row per
/// (group, metric, manual method) combination.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    group_header: &'static str,
    rows: Vec<SweepRow>,
}

impl SweepResult {
    pub(crate) fn new(group_header: &'static str, rows: Vec<SweepRow>) -> Self {
        SweepResult { group_header, rows }
    }

    pub fn rows(&self) -> &[SweepRow] {
        &self.rows
    }

    /// Header of the group column: `index_size` or `annotators`.
    pub fn group_header(&self) -> &str {
        self.group_header
    }

    /// Wide CSV: one row per grid cell, error rows with empty coefficient
    /// columns and the message in `error`.
    pub fn to_csv_string(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record([
                self.group_header,
                "metric",
                "manual_method",
                "pearson",
                "spearman",
                "kendall_tau_b",
                "n_systems",
                "error",
            ])
            .expect("writing to memory cannot fail");
        for row in &self.rows {
            let record = match &row.outcome {
                Ok(result) => [
                    row.group.clone(),
                    row.metric.clone(),
                    row.manual_method.clone(),
                    result.pearson.to_string(),
                    result.spearman.to_string(),
                    result.kendall_tau_b.to_string(),
                    result.n_systems.to_string(),
                    String::new(),
                ],
                Err(message) => [
                    row.group.clone(),
                    row.metric.clone(),
                    row.manual_method.clone(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    message.clone(),
                ],
            };
            writer.write_record(&record).expect("writing to memory cannot fail");
        }
        finish_csv(writer)
    }

    /// Long-format CSV for plotting: one row per (cell, coefficient),
    /// error rows excluded.
    pub fn to_long_csv_string(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record([
                self.group_header,
                "metric",
                "manual_method",
                "coefficient",
                "value",
            ])
            .expect("writing to memory cannot fail");
        for row in &self.rows {
            let Ok(result) = &row.outcome else { continue };
            for (name, value) in [
                ("pearson", result.pearson),
                ("spearman", result.spearman),
                ("kendall_tau_b", result.kendall_tau_b),
            ] {
                writer
                    .write_record([
                        row.group.as_str(),
                        row.metric.as_str(),
                        row.manual_method.as_str(),
                        name,
                        &value.to_string(),
                    ])
                    .expect("writing to memory cannot fail");
            }
        }
        finish_csv(writer)
    }

    /// Writes `{stem}.csv` and `{stem}_long.csv` into `dir`.
    pub fn save(&self, dir: &Path, stem: &str) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
        for (name, content) in [
            (format!("{stem}.csv"), self.to_csv_string()),
            (format!("{stem}_long.csv"), self.to_long_csv_string()),
        ] {
            let path = dir.join(name);
            fs::write(&path, content).map_err(|e| Error::io(path.display().to_string(), e))?;
        }
        Ok(())
    }
}

fn finish_csv(writer: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(writer.into_inner().expect("writing to memory cannot fail"))
        .expect("csv output is UTF-8")
}

/// SHA-256 of a file's bytes, hex-encoded.
pub fn sha256_file(path: &Path) -> Result<String> {
    let file = fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut reader = std::io::BufReader::new(file);
    let mut hasher = Sha256::new();
    let mut buffer = [0u8; 64 * 1024];
    loop {
        let n = reader
            .read(&mut buffer)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buffer[..n]);
    }
    Ok(config::hex(&hasher.finalize()))
}

/// Checksum of a corpus input: the file hash for JSONL, or a hash over the
/// sorted (file name, file hash) pairs for a directory of text files.
pub fn sha256_corpus(path: &Path, format: CorpusFormat) -> Result<String> {
    match format {
        CorpusFormat::Jsonl => sha256_file(path),
        CorpusFormat::DirOfText => {
            let mut names = Vec::new();
            let entries =
                fs::read_dir(path).map_err(|e| Error::io(path.display().to_string(), e))?;
            for entry in entries {
                let entry = entry.map_err(|e| Error::io(path.display().to_string(), e))?;
                let entry_path = entry.path();
                if entry_path.extension().is_some_and(|e| e == "txt") {
                    names.push(entry_path);
                }
            }
            names.sort();
            let mut hasher = Sha256::new();
            for file in names {
                let name = file
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_default();
                hasher.update(name.as_bytes());
                hasher.update([0]);
                hasher.update(sha256_file(&file)?.as_bytes());
                hasher.update([0]);
            }
            Ok(config::hex(&hasher.finalize()))
        }
    }
}

/// Writes `manifest.txt` into `dir`: tool version, config hash, seed, and
/// a checksum per input file.
pub fn write_manifest(config: &ExperimentConfig, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    let mut lines = String::new();
    lines.push_str(&format!("tool_version = {}\n", crate::VERSION));
    lines.push_str(&format!("config_sha256 = {}\n", config.fingerprint()));
    lines.push_str(&format!("seed = {}\n", config.seed));
    lines.push_str(&format!("corpus = {}\n", config.corpus.display()));
    lines.push_str(&format!(
        "corpus_sha256 = {}\n",
        sha256_corpus(&config.corpus, config.corpus_format)?
    ));
    lines.push_str(&format!("summaries = {}\n", config.summaries.display()));
    lines.push_str(&format!(
        "summaries_sha256 = {}\n",
        sha256_file(&config.summaries)?
    ));
    for (method, path) in &config.manual {
        lines.push_str(&format!("manual.{method} = {}\n", path.display()));
        lines.push_str(&format!(
            "manual.{method}_sha256 = {}\n",
            sha256_file(path)?
        ));
    }
    let path = dir.join("manifest.txt");
    fs::write(&path, lines).map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(path)
}

/// One corpus row of a POS report: the distribution, or the failure that
/// prevented it.
#[derive(Debug, Clone)]
pub struct PosReportRow {
    pub corpus: String,
    pub outcome: std::result::Result<crate::text::distribution::PosDistribution, String>,
}

/// Per-corpus POS-class percentages with CSV output.
#[derive(Debug, Clone)]
pub struct PosReport {
    rows: Vec<PosReportRow>,
}

impl PosReport {
    pub fn rows(&self) -> &[PosReportRow] {
        &self.rows
    }

    /// CSV with one row per (corpus, class); a corpus that failed to load
    /// contributes a single row with the message in `error`.
    pub fn to_csv_string(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(["corpus", "class", "percentage", "error"])
            .expect("writing to memory cannot fail");
        for row in &self.rows {
            match &row.outcome {
                Ok(distribution) => {
                    for (class, percentage) in distribution.classes() {
                        writer
                            .write_record([
                                row.corpus.as_str(),
                                class,
                                &percentage.to_string(),
                                "",
                            ])
                            .expect("writing to memory cannot fail");
                    }
                }
                Err(message) => {
                    writer
                        .write_record([row.corpus.as_str(), "", "", message.as_str()])
                        .expect("writing to memory cannot fail");
                }
            }
        }
        finish_csv(writer)
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv_string())
            .map_err(|e| Error::io(path.display().to_string(), e))
    }
}

/// Tags every corpus and reports its POS-class percentages. Corpora that
/// fail to load or contain no tokens appear as error rows rather than
/// aborting the report.
pub fn report_pos_distribution(
    paths: &[PathBuf],
    format: CorpusFormat,
    tagger: &Tagger,
) -> PosReport {
    let rows = paths
        .iter()
        .map(|path| {
            let outcome = load_corpus(path, format)
                .and_then(|collection| pos_distribution(tagger, &collection))
                .map_err(|e| e.to_string());
            PosReportRow {
                corpus: path.display().to_string(),
                outcome,
            }
        })
        .collect();
    PosReport { rows }
}
