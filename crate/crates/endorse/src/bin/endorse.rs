//! Command-line front end for the endorsement pipeline.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use endorse::config::{Overrides, RunConfig};
use endorse::pipeline::{self, PipelineError, TrainKind, TrainSpec};

#[derive(Parser)]
#[command(
    name = "endorse",
    version,
    about = "Decision support for celebrity endorsement campaigns based on tweet opinion mining",
    long_about = "Compares two celebrity candidates for a brand campaign by mining tweet \
                  sentiment two ways: an opinion-lexicon mean score and a pair of naive \
                  Bayes classifiers for emotion and polarity."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Run configuration file
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Output directory, overriding the config
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifierArgs {
    /// Laplace smoothing constant for seed-trained classifiers
    #[arg(long)]
    alpha: Option<f64>,
    /// Width of the neutral band around a polarity ratio of 1
    #[arg(long)]
    neutral_band: Option<f64>,
}

#[derive(Args)]
struct TuningArgs {
    /// Mean-score threshold for a positive verdict
    #[arg(long)]
    threshold: Option<f64>,
    /// How many terms each word cloud keeps
    #[arg(long)]
    top_n: Option<usize>,
    #[command(flatten)]
    classifier: ClassifierArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliTrainKind {
    Emotion,
    Polarity,
}

impl From<CliTrainKind> for TrainKind {
    fn from(kind: CliTrainKind) -> Self {
        match kind {
            CliTrainKind::Emotion => TrainKind::Emotion,
            CliTrainKind::Polarity => TrainKind::Polarity,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Collect tweets through the configured provider
    Fetch {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Clean the raw tweets and report per-entity counts
    Clean {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Score every tweet against the opinion lexicon
    Score {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Run the emotion and polarity classifiers over every tweet
    Classify {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        classifier: ClassifierArgs,
    },
    /// Train a classifier and save it as a model file
    Train {
        /// Which classifier to train
        #[arg(long, value_enum)]
        kind: CliTrainKind,
        /// Labeled JSONL input; the bundled seed corpus when omitted
        #[arg(long, value_name = "FILE")]
        input: Option<PathBuf>,
        /// Laplace smoothing constant
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Where to write the model
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Fraction of documents held out for evaluation
        #[arg(long, default_value_t = 0.0)]
        holdout: f64,
        /// Reserved for future sampled holdout splits
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Emit per-entity aggregates as JSON, CSV, and SVG
    Aggregate {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        tuning: TuningArgs,
    },
    /// Produce recommendations from both methods
    Decide {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        tuning: TuningArgs,
        /// Rank vectors to use instead of deriving them
        #[arg(long, value_name = "FILE")]
        ranks: Option<PathBuf>,
    },
    /// The whole pipeline in one pass, ending in report.json
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        tuning: TuningArgs,
        /// Rank vectors to use instead of deriving them
        #[arg(long, value_name = "FILE")]
        ranks: Option<PathBuf>,
        /// Reserved for future randomized behavior
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn load(config: &ConfigArgs, overrides: Overrides) -> Result<RunConfig, PipelineError> {
    let overrides = Overrides {
        out_dir: config.out.clone(),
        ..overrides
    };
    Ok(RunConfig::load(&config.config, &overrides)?)
}

fn classifier_overrides(args: &ClassifierArgs) -> Overrides {
    Overrides {
        alpha: args.alpha,
        neutral_band: args.neutral_band,
        ..Overrides::default()
    }
}

fn tuning_overrides(args: &TuningArgs) -> Overrides {
    Overrides {
        threshold: args.threshold,
        top_n: args.top_n,
        ..classifier_overrides(&args.classifier)
    }
}

fn print_written(files: &[PathBuf]) {
    for file in files {
        println!("wrote {}", file.display());
    }
}

fn execute(command: Command) -> Result<(), PipelineError> {
    match command {
        Command::Fetch { config } => {
            let config = load(&config, Overrides::default())?;
            print_written(&pipeline::cmd_fetch(&config)?);
        }
        Command::Clean { config } => {
            let config = load(&config, Overrides::default())?;
            print_written(&pipeline::cmd_clean(&config)?);
        }
        Command::Score { config } => {
            let config = load(&config, Overrides::default())?;
            print_written(&pipeline::cmd_score(&config)?);
        }
        Command::Classify { config, classifier } => {
            let config = load(&config, classifier_overrides(&classifier))?;
            print_written(&pipeline::cmd_classify(&config)?);
        }
        Command::Train {
            kind,
            input,
            alpha,
            out,
            holdout,
            seed,
        } => {
            let outcome = pipeline::cmd_train(&TrainSpec {
                kind: kind.into(),
                input,
                alpha,
                out,
                holdout,
                seed,
            })?;
            println!("wrote {}", outcome.model_path.display());
            println!("trained on {} documents", outcome.train_docs);
            if let Some(accuracy) = outcome.holdout_accuracy {
                println!(
                    "holdout accuracy {:.4} over {} documents",
                    accuracy, outcome.holdout_docs
                );
            }
        }
        Command::Aggregate { config, tuning } => {
            let config = load(&config, tuning_overrides(&tuning))?;
            print_written(&pipeline::cmd_aggregate(&config)?);
        }
        Command::Decide {
            config,
            tuning,
            ranks,
        } => {
            let config = load(&config, tuning_overrides(&tuning))?;
            print_written(&pipeline::cmd_decide(&config, ranks.as_deref())?);
        }
        Command::Run {
            config,
            tuning,
            ranks,
            seed: _,
        } => {
            let started = Instant::now();
            let config = load(&config, tuning_overrides(&tuning))?;
            let files = pipeline::cmd_run(&config, ranks.as_deref())?;
            print_written(&files);
            // Timing goes to stderr only, so stdout and every artifact
            // stay reproducible byte for byte.
            eprintln!("run completed in {} ms", started.elapsed().as_millis());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(error.exit_code() as u8)
        }
    }
}
