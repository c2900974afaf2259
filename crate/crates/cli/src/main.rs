//! `tfjam`: synthesize jamming signals, build image datasets, train and
//! evaluate classifiers.

mod cmd;
mod config;
mod plot;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::info;

use config::{DatasetArgs, EvalArgs, FileConfig, NovelArgs, Overlay, SynthArgs, TrainArgs, UsageError};

#[derive(Parser)]
#[command(name = "tfjam", version, about = "Time-frequency jamming signal recognition")]
struct Cli {
    /// TOML file with [synth], [dataset], [train], [eval] and [novel] sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one frame as raw IQ, optionally with its time-frequency image.
    Synth(SynthArgs),
    /// Generate a labelled image dataset and its manifest.
    Dataset(DatasetArgs),
    /// Train a knn, gnb or cnn classifier on a dataset.
    Train(TrainArgs),
    /// Score a model on a dataset split: accuracy report, curves, confusion.
    Eval(EvalArgs),
    /// Flag-rate table for confidence-threshold novelty detection.
    Novel(NovelArgs),
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let file = FileConfig::load(cli.config.as_deref())?;
    info!("{}", tfjam::VERSION);
    match cli.command {
        Command::Synth(a) => cmd::synth::run(a.overlay(file.synth)),
        Command::Dataset(a) => cmd::dataset::run(a.overlay(file.dataset)),
        Command::Train(a) => cmd::train::run(a.overlay(file.train)),
        Command::Eval(a) => cmd::eval::run(a.overlay(file.eval)),
        Command::Novel(a) => cmd::novel::run(a.overlay(file.novel)),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format(|buf, record| writeln!(buf, "[{}] {}", record.level(), record.args()))
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
