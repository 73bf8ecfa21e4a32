use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use featknn::eval::ReportFormat;
use featknn::MetricKind;

#[derive(Debug, Parser)]
#[command(name = "featknn", version, about = "Exact k-NN classification over exported feature vectors")]
pub struct Cli {
    /// Worker threads for evaluate and sweep (default: all cores).
    #[arg(long, global = true, value_parser = parse_threads)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a model on a database FSET file and write it as KNNM.
    Fit {
        train: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Classify every vector of a query FSET file.
    Predict {
        model: PathBuf,
        query: PathBuf,
        #[command(flatten)]
        query_args: QueryArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Accuracy and confusion matrix of a model on a labeled test set.
    Evaluate {
        model: PathBuf,
        test: PathBuf,
        #[command(flatten)]
        query_args: QueryArgs,
        #[command(flatten)]
        out: OutputArgs,
        /// Include wall-clock timing in json/csv output.
        #[arg(long)]
        timing: bool,
    },
    /// Evaluate every (PCA option, metric, k) combination.
    Sweep {
        train: PathBuf,
        test: PathBuf,
        #[arg(long, value_delimiter = ',', default_values = ["1", "3", "5", "7", "9"], value_parser = parse_k)]
        ks: Vec<usize>,
        #[arg(
            long,
            value_delimiter = ',',
            default_values = ["euclidean", "cityblock", "canberra", "cosine"],
            value_parser = parse_metric
        )]
        metrics: Vec<MetricKind>,
        /// PCA settings to try, in order.
        #[arg(long, value_delimiter = ',', default_values = ["off", "on"], value_parser = parse_on_off)]
        pca_options: Vec<bool>,
        #[arg(long, default_value_t = 0.99, value_parser = parse_threshold)]
        variance_threshold: f64,
        #[command(flatten)]
        out: OutputArgs,
        /// Include wall-clock timing in json/csv output.
        #[arg(long)]
        timing: bool,
    },
    /// Describe an FSET or KNNM file.
    Inspect { path: PathBuf },
    /// Convert a `label,f0,f1,...` CSV file to FSET.
    ImportCsv {
        csv: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Convert an FSET file to CSV.
    ExportCsv {
        fset: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Seeded per-class split of an FSET file into database and test sets.
    Split {
        input: PathBuf,
        #[arg(long)]
        per_class_train: usize,
        #[arg(long)]
        per_class_test: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        train_out: PathBuf,
        #[arg(long)]
        test_out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// Project onto principal components (default).
    #[arg(long, overrides_with = "no_pca")]
    pub pca: bool,
    /// Skip the PCA projection.
    #[arg(long, overrides_with = "pca")]
    pub no_pca: bool,
    #[arg(long, default_value_t = 0.99, value_parser = parse_threshold)]
    pub variance_threshold: f64,
}

impl PipelineArgs {
    pub fn use_pca(&self) -> bool {
        !self.no_pca
    }
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[arg(long, default_value_t = 5, value_parser = parse_k)]
    pub k: usize,
    #[arg(long, default_value = "cityblock", value_parser = parse_metric)]
    pub metric: MetricKind,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, default_value = "text", value_parser = parse_format)]
    pub format: ReportFormat,
    /// Write to this file instead of standard output.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

fn parse_threshold(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if t > 0.0 && t <= 1.0 {
        Ok(t)
    } else {
        Err("threshold must be in (0,1]".to_string())
    }
}

fn parse_k(s: &str) -> Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(k) if k >= 1 => Ok(k),
        _ => Err(format!("k must be a positive integer, got {s:?}")),
    }
}

fn parse_threads(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("thread count must be a positive integer, got {s:?}")),
    }
}

fn parse_metric(s: &str) -> Result<MetricKind, String> {
    s.parse().map_err(|e: featknn::Error| e.to_string())
}

fn parse_format(s: &str) -> Result<ReportFormat, String> {
    s.parse().map_err(|e: featknn::Error| e.to_string())
}

fn parse_on_off(s: &str) -> Result<bool, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "on" | "true" | "pca" => Ok(true),
        "off" | "false" | "none" => Ok(false),
        _ => Err(format!("expected on or off, got {s:?}")),
    }
}
