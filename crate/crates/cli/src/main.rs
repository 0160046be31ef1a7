//! `hqnn`: featurize molecules, pretrain MLP backbones, train and evaluate
//! hybrid quantum-classical regressors, and report relative performance.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hqnn_core::hybrid::TrainStrategy;
use hqnn_core::Error;

use crate::config::{Overrides, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "hqnn", version, about = "Hybrid quantum neural network regression")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Input CSV.
    #[arg(long, global = true)]
    data: Option<PathBuf>,
    /// Output file or directory, depending on the command.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    qubits: Option<usize>,
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// scratch, finetune or frozen.
    #[arg(long, global = true, value_parser = parse_strategy)]
    strategy: Option<TrainStrategy>,
    /// Noise profile name from the catalog, or `none`.
    #[arg(long, global = true)]
    noise: Option<String>,
    #[arg(long, global = true)]
    noise_catalog: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Fail on the first bad data row instead of skipping it.
    #[arg(long, global = true)]
    strict: bool,
    /// Directory of pretrained `backbone_fold{i}.json` files.
    #[arg(long, global = true)]
    backbone: Option<PathBuf>,
    /// Directory written by `pretrain` or `train-hqnn`.
    #[arg(long, global = true)]
    checkpoints: Option<PathBuf>,
    #[arg(long, global = true)]
    epochs: Option<usize>,
    /// Cross-validation folds.
    #[arg(long, global = true)]
    folds: Option<usize>,
    #[arg(long, global = true)]
    batch_size: Option<usize>,
    /// Adam learning rate.
    #[arg(long, global = true)]
    lr: Option<f64>,
    /// Hidden layer widths, e.g. `1024,512,256`.
    #[arg(long, global = true, value_delimiter = ',')]
    hidden: Option<Vec<usize>>,
    #[arg(long, global = true)]
    dropout: Option<f64>,
    /// Fingerprint radius.
    #[arg(long, global = true)]
    radius: Option<usize>,
    /// Fingerprint length (power of two).
    #[arg(long, global = true)]
    nbits: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// SMILES CSV to fingerprint feature CSV.
    Featurize,
    /// Train the classical MLP on every fold.
    Pretrain,
    /// Train the hybrid model on every fold.
    TrainHqnn,
    /// Re-evaluate saved fold checkpoints, optionally under noise.
    Evaluate,
    /// Relative performance of hybrid runs against a classical run.
    Report {
        /// Classical metrics JSON.
        #[arg(long)]
        classical: PathBuf,
        /// Hybrid metrics JSON; repeat for several columns.
        #[arg(long, required = true)]
        hqnn: Vec<PathBuf>,
        #[arg(long, default_value = "property")]
        property: String,
        #[arg(long, default_value = "MLP")]
        model: String,
    },
    /// List hardware noise profiles.
    NoiseCatalog {
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Table,
    Json,
}

fn parse_strategy(s: &str) -> Result<TrainStrategy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl Global {
    fn overrides(&self) -> Overrides {
        Overrides {
            data: self.data.clone(),
            out: self.out.clone(),
            backbone: self.backbone.clone(),
            checkpoints: self.checkpoints.clone(),
            noise_catalog: self.noise_catalog.clone(),
            seed: self.seed,
            qubits: self.qubits,
            depth: self.depth,
            strategy: self.strategy,
            noise: self.noise.clone(),
            threads: self.threads,
            strict: self.strict,
            epochs: self.epochs,
            folds: self.folds,
            batch_size: self.batch_size,
            lr: self.lr,
            hidden: self.hidden.clone(),
            dropout: self.dropout,
            radius: self.radius,
            nbits: self.nbits,
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Index { .. } | Error::Shape { .. } | Error::Contract(_) => 2,
        Error::Domain(_) | Error::Metric(_) => 4,
        _ => 3,
    }
}

fn run(cli: &Cli) -> hqnn_core::Result<()> {
    let config = RunConfig::load(cli.global.config.as_deref(), &cli.global.overrides())?;
    if let Some(n) = config.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Featurize => commands::featurize(&config),
        Command::Pretrain => commands::pretrain(&config),
        Command::TrainHqnn => commands::train_hqnn(&config),
        Command::Evaluate => commands::evaluate(&config),
        Command::Report { classical, hqnn, property, model } => {
            commands::report(&commands::ReportArgs {
                classical,
                hqnn,
                property,
                model,
                out: config.paths.out.as_deref(),
            })
        }
        Command::NoiseCatalog { format } => {
            commands::noise_catalog(&config, matches!(format, Format::Json))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
