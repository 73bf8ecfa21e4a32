//! `featknn` command-line front end.
//!
//! Exit codes: 0 success, 2 usage, 3 I/O, 4 data or format errors.

mod args;

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use featknn::eval::{self, render_report_with, render_sweep, RenderOptions, ReportFormat};
use featknn::feature_store::{self, FSET_MAGIC};
use featknn::knn::{self, KNNM_MAGIC};
use featknn::{FeatureSet, KnnModel, PipelineConfig, SplitSpec};

use args::{Cli, Command};

enum CliError {
    Usage(String),
    Io(String),
    Data(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Data(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Data(m) => m,
        }
    }

    fn from_lib(path: &Path, e: featknn::Error) -> Self {
        let msg = format!("{}: {e}", path.display());
        if e.is_io() {
            CliError::Io(msg)
        } else {
            CliError::Data(msg)
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> CliResult {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot configure {n} threads: {e}")))?;
    }
    match cli.command {
        Command::Fit {
            train,
            output,
            pipeline,
        } => cmd_fit(
            &train,
            &output,
            &PipelineConfig {
                use_pca: pipeline.use_pca(),
                variance_threshold: pipeline.variance_threshold,
            },
        ),
        Command::Predict {
            model,
            query,
            query_args,
            out,
        } => {
            let text = cmd_predict(&model, &query, query_args.k, query_args.metric, out.format)?;
            emit(out.output.as_deref(), &text)
        }
        Command::Evaluate {
            model,
            test,
            query_args,
            out,
            timing,
        } => {
            let model = load_model(&model)?;
            let test_set = load_fset(&test)?;
            check_dims(&model, &test_set, &test)?;
            let report = eval::evaluate(&model, &test_set, query_args.k, query_args.metric)
                .map_err(|e| CliError::from_lib(&test, e))?;
            let opts = RenderOptions {
                include_timing: timing,
            };
            emit(out.output.as_deref(), &render_report_with(&report, out.format, &opts))
        }
        Command::Sweep {
            train,
            test,
            ks,
            metrics,
            pca_options,
            variance_threshold,
            out,
            timing,
        } => {
            let train_set = load_fset(&train)?;
            let test_set = load_fset(&test)?;
            if train_set.dim() != test_set.dim() {
                return Err(CliError::Data(format!(
                    "test dimension {} does not match training dimension {}",
                    test_set.dim(),
                    train_set.dim()
                )));
            }
            eprintln!(
                "sweeping {} PCA option(s) x {} metric(s) x {} k value(s)",
                pca_options.len(),
                metrics.len(),
                ks.len()
            );
            let reports = eval::sweep(
                &train_set,
                &test_set,
                &metrics,
                &ks,
                &pca_options,
                variance_threshold,
            )
            .map_err(|e| CliError::from_lib(&test, e))?;
            let opts = RenderOptions {
                include_timing: timing,
            };
            emit(out.output.as_deref(), &render_sweep(&reports, out.format, &opts))
        }
        Command::Inspect { path } => {
            let text = cmd_inspect(&path)?;
            emit(None, &text)
        }
        Command::ImportCsv { csv, output } => {
            let file = open(&csv)?;
            let set = feature_store::import_csv(BufReader::new(file))
                .map_err(|e| CliError::from_lib(&csv, e))?;
            save_fset(&set, &output)?;
            println!("{}", describe_fset(&set));
            Ok(())
        }
        Command::ExportCsv { fset, output } => {
            let set = load_fset(&fset)?;
            let mut buf = Vec::new();
            feature_store::export_csv(&set, &mut buf).map_err(|e| CliError::from_lib(&fset, e))?;
            emit(output.as_deref(), &String::from_utf8_lossy(&buf))
        }
        Command::Split {
            input,
            per_class_train,
            per_class_test,
            seed,
            train_out,
            test_out,
        } => {
            let spec = SplitSpec::new(per_class_train, per_class_test, seed)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let set = load_fset(&input)?;
            let (train, test) = feature_store::stratified_split(&set, &spec)
                .map_err(|e| CliError::from_lib(&input, e))?;
            save_fset(&train, &train_out)?;
            save_fset(&test, &test_out)?;
            println!("train: {}", describe_fset(&train));
            println!("test: {}", describe_fset(&test));
            Ok(())
        }
    }
}

fn open(path: &Path) -> CliResult<File> {
    File::open(path).map_err(|e| CliError::Io(format!("cannot open {}: {e}", path.display())))
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))
}

fn load_fset(path: &Path) -> CliResult<FeatureSet> {
    feature_store::read_fset(BufReader::new(open(path)?)).map_err(|e| CliError::from_lib(path, e))
}

fn save_fset(set: &FeatureSet, path: &Path) -> CliResult {
    feature_store::write_fset(set, create(path)?)
        .map(|_| ())
        .map_err(|e| CliError::from_lib(path, e))
}

fn load_model(path: &Path) -> CliResult<KnnModel> {
    knn::read_knnm(BufReader::new(open(path)?)).map_err(|e| CliError::from_lib(path, e))
}

fn emit(output: Option<&Path>, text: &str) -> CliResult {
    match output {
        Some(path) => {
            let mut w = create(path)?;
            w.write_all(text.as_bytes())
                .and_then(|_| w.flush())
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())
                .and_then(|_| lock.flush())
                .map_err(|e| CliError::Io(format!("cannot write to standard output: {e}")))
        }
    }
}

fn check_dims(model: &KnnModel, set: &FeatureSet, path: &Path) -> CliResult {
    if model.raw_dim() == set.dim() {
        Ok(())
    } else {
        Err(CliError::Data(format!(
            "{}: query dimension {} does not match model dimension {}",
            path.display(),
            set.dim(),
            model.raw_dim()
        )))
    }
}

fn describe_fset(set: &FeatureSet) -> String {
    format!(
        "{} vectors, dim {}, {} classes: {}",
        set.len(),
        set.dim(),
        set.n_classes(),
        set.class_names().join(", ")
    )
}

fn describe_pca(model: &KnnModel) -> String {
    match model.pca() {
        Some(p) => format!(
            "{} ({:.2}% variance)",
            p.n_components(),
            p.cumulative_variance() * 100.0
        ),
        None => "none".to_string(),
    }
}

fn cmd_fit(train: &Path, output: &Path, config: &PipelineConfig) -> CliResult {
    let set = load_fset(train)?;
    eprintln!("fitting on {}", train.display());
    let model = KnnModel::fit(&set, config).map_err(|e| CliError::from_lib(train, e))?;
    let bytes = knn::write_knnm(&model, create(output)?).map_err(|e| CliError::from_lib(output, e))?;
    println!("database: {}", describe_fset(&set));
    match model.pca() {
        Some(_) => println!("components: {}", describe_pca(&model)),
        None => println!("pca: none"),
    }
    println!("wrote {} ({bytes} bytes)", output.display());
    Ok(())
}

fn cmd_predict(
    model_path: &Path,
    query_path: &Path,
    k: usize,
    metric: featknn::MetricKind,
    format: ReportFormat,
) -> CliResult<String> {
    let model = load_model(model_path)?;
    let queries = load_fset(query_path)?;
    check_dims(&model, &queries, query_path)?;
    let names = model.class_names();

    let mut predictions = Vec::with_capacity(queries.len());
    for row in queries.rows() {
        let p = model
            .classify(row, k, metric)
            .map_err(|e| CliError::from_lib(query_path, e))?;
        predictions.push(p);
    }

    let mut out = String::new();
    match format {
        ReportFormat::Text => {
            for (i, p) in predictions.iter().enumerate() {
                let votes: Vec<String> = names
                    .iter()
                    .zip(&p.votes)
                    .filter(|(_, &v)| v > 0)
                    .map(|(n, v)| format!("{n}={v}"))
                    .collect();
                let neighbors: Vec<String> = p
                    .neighbors
                    .iter()
                    .map(|n| format!("({}, {:.6}, {})", n.index, n.distance, names[n.label as usize]))
                    .collect();
                let _ = writeln!(
                    out,
                    "query {i} [{}]: {}  votes: {}  neighbors: {}",
                    queries.class_name(queries.label(i)),
                    names[p.predicted_class as usize],
                    votes.join(" "),
                    neighbors.join(" ")
                );
            }
        }
        ReportFormat::Json => {
            let records: Vec<serde_json::Value> = predictions
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    serde_json::json!({
                        "query": i,
                        "query_label": queries.class_name(queries.label(i)),
                        "predicted": names[p.predicted_class as usize],
                        "votes": p.votes,
                        "neighbors": p.neighbors.iter().map(|n| serde_json::json!({
                            "index": n.index,
                            "distance": n.distance,
                            "label": names[n.label as usize],
                        })).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let doc = serde_json::json!({
                "k": k,
                "metric": metric,
                "class_names": names,
                "predictions": records,
            });
            out = serde_json::to_string_pretty(&doc).expect("json serializes");
            out.push('\n');
        }
        ReportFormat::Csv => {
            out.push_str("query,query_label,predicted,votes,neighbor_indices,neighbor_distances,neighbor_labels\n");
            for (i, p) in predictions.iter().enumerate() {
                let join = |it: Vec<String>| it.join(";");
                let _ = writeln!(
                    out,
                    "{i},{},{},{},{},{},{}",
                    queries.class_name(queries.label(i)),
                    names[p.predicted_class as usize],
                    join(p.votes.iter().map(ToString::to_string).collect()),
                    join(p.neighbors.iter().map(|n| n.index.to_string()).collect()),
                    join(p.neighbors.iter().map(|n| n.distance.to_string()).collect()),
                    join(p.neighbors.iter().map(|n| names[n.label as usize].clone()).collect()),
                );
            }
        }
    }
    Ok(out)
}

fn cmd_inspect(path: &Path) -> CliResult<String> {
    let mut magic = [0u8; 4];
    let mut file = open(path)?;
    let n = read_prefix(&mut file, &mut magic)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    if n == 4 && &magic == FSET_MAGIC {
        let set = load_fset(path)?;
        Ok(format!("{}\n", describe_fset(&set)))
    } else if n == 4 && &magic == KNNM_MAGIC {
        let model = load_model(path)?;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "model: {} vectors, raw dim {}, processed dim {}, {} classes: {}",
            model.len(),
            model.raw_dim(),
            model.processed_dim(),
            model.class_names().len(),
            model.class_names().join(", ")
        );
        let _ = writeln!(out, "pca: {}", describe_pca(&model));
        Ok(out)
    } else {
        Err(CliError::Data(format!(
            "{}: unrecognized file format",
            path.display()
        )))
    }
}

fn read_prefix(r: &mut impl Read, buf: &mut [u8]) -> io::Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match r.read(&mut buf[filled..])? {
            0 => break,
            n => filled += n,
        }
    }
    Ok(filled)
}
