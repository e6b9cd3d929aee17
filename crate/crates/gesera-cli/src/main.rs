//! Command-line front end for the gesera library: index building,
//! one-shot scoring, index-size sweeps, annotator studies, and POS
//! reports.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use gesera::corpus::CorpusFormat;
use gesera::experiments::{
    report_pos_distribution, run_annotator_study, run_sweep, write_manifest, ExperimentConfig,
    SweepResult,
};
use gesera::index::InvertedIndex;
use gesera::scoring::{split_summaries, EvalConfig, Evaluator};
use gesera::text::tag::Tagger;
use gesera::{build_index, load_corpus, load_summaries, Strategy, Variant};

#[derive(Parser)]
#[command(
    name = "gesera",
    version,
    about = "Retrieval-based summary evaluation: index, score, sweep, correlate"
)]
struct Cli {
    /// Worker threads for corpus-wide loops (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a BM25F index over the full configured corpus.
    BuildIndex {
        /// Experiment config file.
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the config's `out`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score candidate summaries against references with one metric.
    Score {
        /// Index file written by build-index.
        #[arg(long)]
        index: PathBuf,
        /// Summary records holding the candidates.
        #[arg(long)]
        candidates: PathBuf,
        /// Summary records holding the references.
        #[arg(long)]
        references: PathBuf,
        /// Query reformulation: raw, np, kw, or gesera.
        #[arg(long, default_value = "gesera")]
        strategy: String,
        /// Scoring variant: sera or dis.
        #[arg(long, default_value = "sera")]
        variant: String,
        /// Retrieval cutoff (ranked-list length).
        #[arg(long, default_value_t = 10)]
        cutoff: usize,
        /// Treat summary text as pre-tagged token/TAG pairs.
        #[arg(long)]
        pretagged: bool,
        /// Write the score CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the index-size sweep grid from a config file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Base sampling seed (overrides the config's `seed`).
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (overrides the config's `out`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the annotator-subset study from a config file.
    Annotators {
        #[arg(long)]
        config: PathBuf,
        /// Base sampling seed (overrides the config's `seed`).
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (overrides the config's `out`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report POS-class percentages for one or more corpora.
    PosReport {
        /// Corpus files (or directories for dir_of_text).
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        /// Corpus layout: jsonl or dir_of_text.
        #[arg(long, default_value = "jsonl")]
        format: String,
        /// Treat document text as pre-tagged token/TAG pairs.
        #[arg(long)]
        pretagged: bool,
        /// Write the report CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    configure_threads(cli.threads)?;
    match cli.command {
        Command::BuildIndex { config, out } => build_index_command(&config, out),
        Command::Score {
            index,
            candidates,
            references,
            strategy,
            variant,
            cutoff,
            pretagged,
            out,
        } => score_command(
            &index,
            &candidates,
            &references,
            &strategy,
            &variant,
            cutoff,
            pretagged,
            out,
        ),
        Command::Sweep { config, seed, out } => {
            let config = load_config(&config, seed, out)?;
            let result = run_sweep(&config)?;
            report_grid("sweep", &result, &config);
            Ok(())
        }
        Command::Annotators { config, seed, out } => {
            let config = load_config(&config, seed, out)?;
            let result = run_annotator_study(&config)?;
            report_grid("annotators", &result, &config);
            Ok(())
        }
        Command::PosReport {
            paths,
            format,
            pretagged,
            out,
        } => pos_report_command(&paths, &format, pretagged, out),
    }
}

#[cfg(feature = "parallel")]
fn configure_threads(threads: Option<usize>) -> anyhow::Result<()> {
    if let Some(n) = threads {
        if n == 0 {
            bail!("--threads must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("initializing the worker pool")?;
    }
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(threads: Option<usize>) -> anyhow::Result<()> {
    if threads.is_some() {
        log::warn!("built without the parallel feature; --threads has no effect");
    }
    Ok(())
}

fn load_config(
    path: &PathBuf,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> anyhow::Result<ExperimentConfig> {
    let mut config = ExperimentConfig::from_file(path)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    if let Some(out) = out {
        config.out_dir = out;
    }
    Ok(config)
}

fn build_index_command(config_path: &PathBuf, out: Option<PathBuf>) -> anyhow::Result<()> {
    let config = load_config(config_path, None, out)?;
    let corpus = load_corpus(&config.corpus, config.corpus_format)?;
    let tagger = config.corpus_tagger()?;
    let index = build_index(&corpus, config.index_params, &tagger)?;
    fs::create_dir_all(&config.out_dir)
        .with_context(|| format!("creating {}", config.out_dir.display()))?;
    let path = config.out_dir.join("index.jsonl");
    index.save(&path)?;
    write_manifest(&config, &config.out_dir)?;
    println!("indexed {} documents -> {}", corpus.len(), path.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn score_command(
    index_path: &PathBuf,
    candidates_path: &PathBuf,
    references_path: &PathBuf,
    strategy: &str,
    variant: &str,
    cutoff: usize,
    pretagged: bool,
    out: Option<PathBuf>,
) -> anyhow::Result<()> {
    let config = EvalConfig {
        strategy: strategy.parse::<Strategy>()?,
        variant: variant.parse::<Variant>()?,
        cutoff,
    };
    if cutoff == 0 {
        bail!("--cutoff must be positive");
    }
    let index = InvertedIndex::load(index_path)?;
    let (candidates, _) = split_summaries(load_summaries(candidates_path)?);
    if candidates.is_empty() {
        bail!(
            "{}: no candidate records found",
            candidates_path.display()
        );
    }
    let (_, references) = split_summaries(load_summaries(references_path)?);
    if references.is_empty() {
        bail!(
            "{}: no reference records found",
            references_path.display()
        );
    }
    let tagger = if pretagged {
        Tagger::Pretagged
    } else {
        Tagger::default()
    };
    let evaluator = Evaluator::new(&index, &tagger);
    let outcome = evaluator.evaluate_dataset(&candidates, &references, &[config])?;
    if outcome.degenerate_rows > 0 {
        eprintln!(
            "warning: {} candidate evaluation(s) retrieved no documents; their scores are 0 by definition",
            outcome.degenerate_rows
        );
    }
    match out {
        Some(path) => {
            outcome.table.save_csv(&path)?;
            println!("wrote {} rows -> {}", outcome.table.rows().len(), path.display());
        }
        None => print!("{}", outcome.table.to_csv_string()),
    }
    Ok(())
}

fn report_grid(name: &str, result: &SweepResult, config: &ExperimentConfig) {
    let errors = result.rows().iter().filter(|r| r.outcome.is_err()).count();
    println!(
        "wrote {} rows ({} error rows) -> {}",
        result.rows().len(),
        errors,
        config.out_dir.join(format!("{name}.csv")).display()
    );
}

fn pos_report_command(
    paths: &[PathBuf],
    format: &str,
    pretagged: bool,
    out: Option<PathBuf>,
) -> anyhow::Result<()> {
    let format = format.parse::<CorpusFormat>()?;
    let tagger = if pretagged {
        Tagger::Pretagged
    } else {
        Tagger::default()
    };
    let report = report_pos_distribution(paths, format, &tagger);
    match out {
        Some(path) => {
            report.save_csv(&path)?;
            println!("wrote {} corpora -> {}", report.rows().len(), path.display());
        }
        None => print!("{}", report.to_csv_string()),
    }
    Ok(())
}
