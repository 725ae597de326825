//! `lexicomp`: run the lexicon analysis pipeline from a config file.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::error;

use lexicomp_core::report::{run_pipeline, PipelineSummary, RunConfig, Stage};

#[derive(Parser)]
#[command(
    name = "lexicomp",
    about = "Phonotactic complexity and morphological irregularity measures with per-language and cross-language regression analyses",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Pipeline config (TOML with one [[language]] block per language).
    #[arg(long)]
    config: PathBuf,
    /// Override the config's RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Folds for held-out phonotactic models.
    #[arg(long, value_name = "N")]
    folds_phon: Option<usize>,
    /// Folds for leave-lexeme-out inflection models.
    #[arg(long, value_name = "N")]
    folds_morph: Option<usize>,
    /// Minimum mean wug probability for a language to be analyzed.
    #[arg(long, value_name = "X")]
    min_accuracy: Option<f64>,
    /// Worker threads for per-language stages (0 = all cores).
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
    /// Output directory (overrides the config).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and join the inputs; report per-language entry counts.
    Ingest(RunArgs),
    /// Ingest, then compute PC, MI and the measure tables.
    Measure(RunArgs),
    /// Measure, then run the OLS/LMM/Spearman battery.
    Regress(RunArgs),
    /// Regress, then render figures.
    Report(RunArgs),
    /// The full pipeline (same as report).
    RunAll(RunArgs),
}

impl Command {
    fn stage(&self) -> Stage {
        match self {
            Command::Ingest(_) => Stage::Ingest,
            Command::Measure(_) => Stage::Measure,
            Command::Regress(_) => Stage::Regress,
            Command::Report(_) | Command::RunAll(_) => Stage::Report,
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Ingest(a)
            | Command::Measure(a)
            | Command::Regress(a)
            | Command::Report(a)
            | Command::RunAll(a) => a,
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<PipelineSummary> {
    let args = cli.command.args();
    let mut config = RunConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(folds) = args.folds_phon {
        config.folds_phon = folds;
    }
    if let Some(folds) = args.folds_morph {
        config.folds_morph = folds;
    }
    if let Some(min_accuracy) = args.min_accuracy {
        config.min_accuracy = min_accuracy;
    }
    if let Some(jobs) = args.jobs {
        config.jobs = jobs;
    }
    if let Some(out) = &args.out {
        config.output_dir = out.clone();
    }
    let summary = run_pipeline(&config, cli.command.stage())?;

    println!(
        "{} included, {} excluded, {} failed; outputs in {}",
        summary.included.len(),
        summary.excluded.len(),
        summary.failed.len(),
        config.output_dir.display()
    );
    for id in &summary.excluded {
        println!("excluded by accuracy gate: {id}");
    }
    for (id, reason) in &summary.failed {
        println!("failed: {id}: {reason}");
    }
    Ok(summary)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(summary) if summary.usable() => ExitCode::SUCCESS,
        Ok(_) => {
            error!("no language survived ingestion and the accuracy gate");
            ExitCode::from(2)
        }
        Err(e) => {
            error!("{e:#}");
            ExitCode::FAILURE
        }
    }
}
