use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use serde_json::Value;

use super::EvaluationReport;
use crate::error::Error;
use crate::metrics::MetricKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Text,
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(ReportFormat::Text),
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(Error::Parameter(format!(
                "unknown format {s:?}, expected text, json or csv"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RenderOptions {
    /// When false, machine formats carry `null` timing fields so repeated
    /// runs produce identical bytes. Text output always shows timing.
    pub include_timing: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            include_timing: true,
        }
    }
}

const TIMING_KEYS: [&str; 2] = ["mean_query_seconds", "median_query_seconds"];

fn percent(x: f64) -> String {
    format!("{:.2}%", x * 100.0)
}

fn report_value(report: &EvaluationReport, opts: &RenderOptions) -> Value {
    let mut value = serde_json::to_value(report).expect("report serializes");
    if !opts.include_timing {
        if let Value::Object(map) = &mut value {
            for key in TIMING_KEYS {
                map.insert(key.to_string(), Value::Null);
            }
        }
    }
    value
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("value serializes");
    out.push('\n');
    out
}

pub fn render_report(report: &EvaluationReport, format: ReportFormat) -> String {
    render_report_with(report, format, &RenderOptions::default())
}

pub fn render_report_with(
    report: &EvaluationReport,
    format: ReportFormat,
    opts: &RenderOptions,
) -> String {
    match format {
        ReportFormat::Text => report_text(report),
        ReportFormat::Json => to_json(&report_value(report, opts)),
        ReportFormat::Csv => report_csv(report, opts),
    }
}

fn pipeline_label(report: &EvaluationReport) -> String {
    match (report.n_components, report.variance_threshold) {
        (Some(m), Some(t)) => format!("PCA on ({m} components, threshold {t})"),
        (Some(m), None) => format!("PCA on ({m} components)"),
        _ => "PCA off".to_string(),
    }
}

fn report_text(report: &EvaluationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "metric {}, k {}, {}",
        report.metric,
        report.k,
        pipeline_label(report)
    );
    let _ = writeln!(
        out,
        "accuracy: {} ({}/{})",
        percent(report.accuracy),
        report.n_correct(),
        report.n_samples()
    );
    let _ = writeln!(
        out,
        "query time: mean {:.3} ms, median {:.3} ms",
        report.mean_query_seconds * 1e3,
        report.median_query_seconds * 1e3
    );
    let _ = writeln!(out);
    let _ = writeln!(out, "confusion matrix (rows: true class, columns: predicted)");

    let names = &report.class_names;
    let label_w = names.iter().map(String::len).max().unwrap_or(0).max(4);
    let cell_w = names.iter().map(String::len).max().unwrap_or(0).max(5);
    let _ = write!(out, "{:label_w$}", "");
    for name in names {
        let _ = write!(out, " {name:>cell_w$}");
    }
    let _ = writeln!(out);
    for (r, name) in names.iter().enumerate() {
        let _ = write!(out, "{name:label_w$}");
        for c in 0..names.len() {
            let _ = write!(out, " {:>cell_w$}", report.confusion.get(r, c));
        }
        let _ = writeln!(out);
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "per-class accuracy");
    for (name, acc) in names.iter().zip(&report.per_class_accuracy) {
        let shown = acc.map_or_else(|| "n/a".to_string(), percent);
        let _ = writeln!(out, "{name:label_w$} {shown:>8}");
    }
    out
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt_num<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `kind,true,predicted,count,accuracy,...`: one `cell` row per confusion
/// entry followed by one `summary` row.
fn report_csv(report: &EvaluationReport, opts: &RenderOptions) -> String {
    let mut out = String::from(
        "kind,true,predicted,count,accuracy,k,metric,use_pca,n_components,mean_query_seconds\n",
    );
    for (r, t) in report.class_names.iter().enumerate() {
        for (c, p) in report.class_names.iter().enumerate() {
            let _ = writeln!(
                out,
                "cell,{},{},{},,,,,,",
                csv_escape(t),
                csv_escape(p),
                report.confusion.get(r, c)
            );
        }
    }
    let timing = if opts.include_timing {
        report.mean_query_seconds.to_string()
    } else {
        String::new()
    };
    let _ = writeln!(
        out,
        "summary,,,{},{},{},{},{},{},{}",
        report.n_samples(),
        report.accuracy,
        report.k,
        report.metric,
        report.use_pca,
        opt_num(report.n_components),
        timing
    );
    out
}

/// Highest accuracy over k for one (PCA option, metric) group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BestCell {
    pub use_pca: bool,
    pub metric: MetricKind,
    pub k: usize,
    pub accuracy: f64,
}

/// Groups appear in first-seen order; the first k reaching the maximum wins.
pub fn best_per_metric(reports: &[EvaluationReport]) -> Vec<BestCell> {
    let mut best: Vec<BestCell> = Vec::new();
    for r in reports {
        match best
            .iter_mut()
            .find(|b| b.use_pca == r.use_pca && b.metric == r.metric)
        {
            Some(b) if r.accuracy > b.accuracy => {
                b.k = r.k;
                b.accuracy = r.accuracy;
            }
            Some(_) => {}
            None => best.push(BestCell {
                use_pca: r.use_pca,
                metric: r.metric,
                k: r.k,
                accuracy: r.accuracy,
            }),
        }
    }
    best
}

pub fn render_sweep(
    reports: &[EvaluationReport],
    format: ReportFormat,
    opts: &RenderOptions,
) -> String {
    match format {
        ReportFormat::Json => {
            let values: Vec<Value> = reports.iter().map(|r| report_value(r, opts)).collect();
            to_json(&values)
        }
        ReportFormat::Csv => sweep_csv(reports, opts),
        ReportFormat::Text => sweep_text(reports),
    }
}

fn sweep_csv(reports: &[EvaluationReport], opts: &RenderOptions) -> String {
    let mut out = String::from(
        "use_pca,metric,k,accuracy,n_correct,n_samples,n_components,mean_query_seconds\n",
    );
    for r in reports {
        let timing = if opts.include_timing {
            r.mean_query_seconds.to_string()
        } else {
            String::new()
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.use_pca,
            r.metric,
            r.k,
            r.accuracy,
            r.n_correct(),
            r.n_samples(),
            opt_num(r.n_components),
            timing
        );
    }
    out
}

fn first_seen<T: PartialEq + Copy>(items: impl Iterator<Item = T>) -> Vec<T> {
    let mut seen = Vec::new();
    for item in items {
        if !seen.contains(&item) {
            seen.push(item);
        }
    }
    seen
}

fn sweep_text(reports: &[EvaluationReport]) -> String {
    let mut out = String::new();
    let best = best_per_metric(reports);
    let ks = first_seen(reports.iter().map(|r| r.k));
    for use_pca in first_seen(reports.iter().map(|r| r.use_pca)) {
        let group: Vec<&EvaluationReport> = reports.iter().filter(|r| r.use_pca == use_pca).collect();
        let _ = writeln!(out, "{}", pipeline_label(group[0]));
        let _ = write!(out, "{:<10}", "metric");
        for k in &ks {
            let _ = write!(out, " {:>9}", format!("k={k}"));
        }
        let _ = writeln!(out, " {:>9}", "best");
        for metric in first_seen(group.iter().map(|r| r.metric)) {
            let top = best
                .iter()
                .find(|b| b.use_pca == use_pca && b.metric == metric)
                .expect("every group has a best cell");
            let _ = write!(out, "{:<10}", metric.name());
            for &k in &ks {
                let cell = match group.iter().find(|r| r.metric == metric && r.k == k) {
                    Some(r) => {
                        let mark = if r.k == top.k { "*" } else { " " };
                        format!("{}{mark}", percent(r.accuracy))
                    }
                    None => "-".to_string(),
                };
                let _ = write!(out, " {cell:>9}");
            }
            let _ = writeln!(out, " {:>9}", percent(top.accuracy));
        }
        let _ = writeln!(out);
    }
    out.push_str("* best k per metric\n");
    out
}
