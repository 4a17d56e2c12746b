//! Report rendering.
//!
//! Three formats share one underlying report: `json` is the machine
//! interface (versioned with a top-level `"schema": 1`), `csv` gives one
//! row per session for spreadsheet aggregation, and `table` is an aligned
//! human-readable summary. Floating-point numbers are serialized with six
//! significant digits in every format, which is far above the statistical
//! resolution of any simulated quantity and keeps reports byte-stable.

use blindqkd::harness::SessionReport;
use clap::ValueEnum;
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Table,
}

/// Round to six significant digits; exact zeros and non-finite values pass
/// through unchanged.
fn round_sig6(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    let magnitude = v.abs().log10().floor() as i32;
    let factor = 10f64.powi(5 - magnitude);
    (v * factor).round() / factor
}

/// Round every f64 leaf in place. Integer-typed numbers (round counts,
/// seeds) are left exact.
fn round_floats(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if n.is_f64() {
                let rounded = round_sig6(n.as_f64().expect("checked f64"));
                if let Some(replacement) = Number::from_f64(rounded) {
                    *n = replacement;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(fields) => fields.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn report_value(report: &SessionReport) -> Value {
    let mut value = serde_json::to_value(report).expect("report serializes");
    round_floats(&mut value);
    value
}

fn fields_of(value: Value) -> Map<String, Value> {
    match value {
        Value::Object(fields) => fields,
        _ => unreachable!("session report serializes to an object"),
    }
}

pub fn render_json_single(report: &SessionReport) -> String {
    let mut root = Map::new();
    root.insert("schema".into(), 1.into());
    root.extend(fields_of(report_value(report)));
    serde_json::to_string_pretty(&Value::Object(root)).expect("json renders") + "\n"
}

pub fn render_json_matrix(runs: &[SessionReport]) -> String {
    let mut root = Map::new();
    root.insert("schema".into(), 1.into());
    root.insert("matrix".into(), true.into());
    root.insert(
        "runs".into(),
        Value::Array(runs.iter().map(report_value).collect()),
    );
    serde_json::to_string_pretty(&Value::Object(root)).expect("json renders") + "\n"
}

/// Shortest decimal form of the six-significant-digit rounding.
fn fmt_f64(v: f64) -> String {
    format!("{}", round_sig6(v))
}

const COLUMNS: [&str; 12] = [
    "scenario",
    "variant",
    "rounds",
    "seed",
    "delta",
    "agreement_rate",
    "qber_sampled",
    "eve_k_rate",
    "eve_b_rate",
    "intensity_pass_rate",
    "receipt_order_ok",
    "verdict",
];

fn row_of(report: &SessionReport) -> Vec<String> {
    vec![
        report.params.scenario.to_string(),
        report.params.variant.to_string(),
        report.n_rounds.to_string(),
        report.params.seed.to_string(),
        fmt_f64(report.params.delta),
        fmt_f64(report.agreement_rate),
        fmt_f64(report.qber_sampled),
        fmt_f64(report.eve_k_rate),
        fmt_f64(report.eve_b_rate),
        fmt_f64(report.intensity_pass_rate),
        report.receipt_order_ok.to_string(),
        report.verdict.to_string(),
    ]
}

pub fn render_csv(runs: &[SessionReport]) -> String {
    // Verdict reasons are '+'-joined, so no cell ever contains a comma.
    let mut out = COLUMNS.join(",") + "\n";
    for report in runs {
        out.push_str(&row_of(report).join(","));
        out.push('\n');
    }
    out
}

pub fn render_table(runs: &[SessionReport]) -> String {
    let rows: Vec<Vec<String>> = runs.iter().map(row_of).collect();
    let widths: Vec<usize> = COLUMNS
        .iter()
        .enumerate()
        .map(|(i, header)| {
            rows.iter()
                .map(|row| row[i].len())
                .chain(std::iter::once(header.len()))
                .max()
                .expect("at least the header")
        })
        .collect();
    let render_row = |cells: &[String]| -> String {
        let mut line = String::new();
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            line.push_str(&format!("{:<width$}", cell, width = widths[i]));
        }
        line.trim_end().to_string() + "\n"
    };
    let header: Vec<String> = COLUMNS.iter().map(|s| s.to_string()).collect();
    let mut out = render_row(&header);
    for row in &rows {
        out.push_str(&render_row(row));
    }
    out
}

pub fn render(runs: &[SessionReport], format: OutputFormat, matrix: bool) -> String {
    match format {
        OutputFormat::Json if matrix => render_json_matrix(runs),
        OutputFormat::Json => render_json_single(&runs[0]),
        OutputFormat::Csv => render_csv(runs),
        OutputFormat::Table => render_table(runs),
    }
}
