use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ultradense::eval::Method;
use ultradense::{EmbeddingFormat, Error, LabelKind, Property, TauVariant};
use ultradense_cli::commands::{build_lexicon, run_eval, run_sweep, run_train, LexiconArgs, SweepOver};
use ultradense_cli::config::ExperimentConfig;
use ultradense_cli::{exit_code, StageError};

#[derive(Parser)]
#[command(name = "ultradense", version, about = "Train ultradense subspaces and induce lexicons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Overrides applied on top of a config file.
#[derive(Args)]
struct ConfigArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Force fixed summation order.
    #[arg(long)]
    deterministic: bool,
    #[arg(long)]
    top_k: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    alpha_sentiment: Option<f64>,
    #[arg(long)]
    alpha_concreteness: Option<f64>,
    #[arg(long)]
    alpha_frequency: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Binary,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Binary,
    Continuous,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    TauA,
    TauB,
}

#[derive(Clone, Copy, ValueEnum)]
enum Over {
    Subspace,
    Resource,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Ultradense,
    Pca,
    Random,
}

#[derive(Subcommand)]
enum Command {
    /// Learn an orthogonal transformation for the configured properties.
    Train {
        #[command(flatten)]
        config: ConfigArgs,
        /// Also write each property's held-out words with gold values.
        #[arg(long)]
        write_splits: bool,
    },
    /// Score every word of an embedding set with a trained subspace.
    Lexicon {
        #[arg(long)]
        transform: PathBuf,
        #[arg(long)]
        embeddings: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        top_k: Option<usize>,
        #[arg(long)]
        property: String,
        /// Labelled words for fitting a linear map over a multi-dimensional subspace.
        #[arg(long)]
        resource: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "continuous")]
        resource_kind: Kind,
        /// Rescale scores to [-1, 1].
        #[arg(long)]
        normalize: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Kendall's τ between a lexicon and gold values.
    Eval {
        #[arg(long)]
        lexicon: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        #[arg(long, default_value = "sentiment")]
        property: String,
        #[arg(long, value_enum, default_value = "tau-b")]
        tau_variant: Variant,
    },
    /// τ as a function of subspace size or training resource size.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        property: String,
        #[arg(long, value_enum)]
        over: Over,
        /// Comma-separated sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, value_enum, default_value = "ultradense")]
        method: MethodArg,
        #[arg(long, value_enum, default_value = "tau-b")]
        tau_variant: Variant,
        /// Write the curve here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn stage(stage: &'static str) -> impl FnOnce(Error) -> StageError {
    move |source| StageError { stage, source }
}

fn load_config(args: &ConfigArgs) -> Result<ExperimentConfig, StageError> {
    let mut cfg = ExperimentConfig::load(&args.config).map_err(stage("reading config"))?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if args.deterministic {
        cfg.deterministic = true;
    }
    if let Some(k) = args.top_k {
        cfg.top_k = k;
    }
    if let Some(n) = args.iterations {
        cfg.iterations = n;
    }
    if let Some(dir) = &args.out_dir {
        cfg.out_dir = dir.clone();
    }
    for (property, alpha) in [
        (Property::Sentiment, args.alpha_sentiment),
        (Property::Concreteness, args.alpha_concreteness),
        (Property::Frequency, args.alpha_frequency),
    ] {
        if let Some(a) = alpha {
            cfg.set_alpha(&property, a).map_err(stage("applying overrides"))?;
        }
    }
    cfg.validate_values().map_err(stage("validating config"))?;
    Ok(cfg)
}

fn parse_property(name: &str) -> Result<Property, StageError> {
    name.parse().map_err(stage("parsing arguments"))
}

fn variant(v: Variant) -> TauVariant {
    match v {
        Variant::TauA => TauVariant::TauA,
        Variant::TauB => TauVariant::TauB,
    }
}

fn write_out(path: &PathBuf, text: &str) -> Result<(), StageError> {
    fs::write(path, text).map_err(|e| StageError {
        stage: "writing output",
        source: Error::Io { path: path.clone(), source: e },
    })
}

fn run(cli: Cli) -> Result<(), StageError> {
    match cli.command {
        Command::Train { config, write_splits } => {
            let cfg = load_config(&config)?;
            for path in run_train(&cfg, write_splits)? {
                eprintln!("wrote {}", path.display());
            }
        }
        Command::Lexicon { transform, embeddings, format, top_k, property, resource, resource_kind, normalize, out } => {
            let args = LexiconArgs {
                transform,
                embeddings,
                format: match format {
                    Format::Text => EmbeddingFormat::Text,
                    Format::Binary => EmbeddingFormat::Binary,
                },
                top_k,
                property: parse_property(&property)?,
                resource: resource.map(|p| {
                    let kind = match resource_kind {
                        Kind::Binary => LabelKind::Binary,
                        Kind::Continuous => LabelKind::Continuous,
                    };
                    (p, kind)
                }),
                normalize,
            };
            let lexicon = build_lexicon(&args)?;
            write_out(&out, &lexicon.to_tsv())?;
            eprintln!("wrote {} ({} words)", out.display(), lexicon.len());
        }
        Command::Eval { lexicon, gold, property, tau_variant } => {
            let report = run_eval(&lexicon, &gold, parse_property(&property)?, variant(tau_variant))?;
            println!("property\tn\ttau\tcoverage\tmethod");
            println!("{report}");
        }
        Command::Sweep { config, property, over, sizes, method, tau_variant, out } => {
            let cfg = load_config(&config)?;
            let over = match over {
                Over::Subspace => SweepOver::SubspaceSize,
                Over::Resource => SweepOver::ResourceSize,
            };
            let method = match method {
                MethodArg::Ultradense => Method::Ultradense,
                MethodArg::Pca => Method::Pca,
                MethodArg::Random => Method::Random,
            };
            let curve = run_sweep(&cfg, &parse_property(&property)?, over, &sizes, method, variant(tau_variant))?;
            match out {
                Some(path) => write_out(&path, &curve)?,
                None => print!("{curve}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let mut source = std::error::Error::source(&err.source);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(exit_code(&err.source) as u8)
        }
    }
}
