//! Error reports and the tables derived from them.
//!
//! `report.csv` mirrors the layout of a results table: one row per
//! `(metric, method)`, one column per case. Every number in it goes through
//! [`format_sci`], the same function used for the formatted fields of the
//! JSON report.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::MethodChoice;

/// Scientific notation with three significant digits and a two-digit
/// exponent, e.g. `1.03e-03`.
pub fn format_sci(value: f64) -> String {
    if value.is_nan() {
        return "nan".into();
    }
    if value.is_infinite() {
        return if value > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let raw = format!("{value:.2e}");
    let (mantissa, exponent) = raw.split_once('e').expect("exponent present");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    let sign = if exponent < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exponent.abs())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub method: MethodChoice,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub projection_error: Option<f64>,
    pub dynamic_error: Option<f64>,
    /// Basis file, relative to the output directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<String>,
    #[serde(default)]
    pub diagnostics: Vec<String>,
}

impl MethodReport {
    pub fn failed(method: MethodChoice, reason: String) -> Self {
        Self {
            method,
            status: Status::Failed,
            reason: Some(reason),
            projection_error: None,
            dynamic_error: None,
            basis: None,
            diagnostics: Vec::new(),
        }
    }

    fn cell(&self, metric: Metric) -> String {
        if self.status == Status::Failed {
            return "failed".into();
        }
        let value = match metric {
            Metric::Projection => self.projection_error,
            Metric::Dynamic => self.dynamic_error,
        };
        value.map_or_else(|| "n/a".into(), format_sci)
    }
}

/// Non-deterministic part of a report, excluded from comparisons.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    /// Wall-clock seconds per stage (`hdm`, `pod`, ...) and per method
    /// (`interp.neville`, `rom.neville`, ...).
    pub timings: BTreeMap<String, f64>,
    pub hdm_solved: usize,
    pub hdm_cached: usize,
    pub pod_computed: usize,
    pub pod_cached: usize,
    pub workers: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub case: String,
    pub target: f64,
    pub sampling: Vec<f64>,
    pub modes: usize,
    /// Content hash of the configuration that produced the report.
    pub config_hash: String,
    pub methods: Vec<MethodReport>,
    #[serde(default)]
    pub diagnostics: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run: Option<RunInfo>,
}

impl ErrorReport {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    /// JSON without the run section; identical for identical configs.
    pub fn deterministic_json(&self) -> String {
        let mut stripped = self.clone();
        stripped.run = None;
        stripped.to_json()
    }

    pub fn method(&self, method: MethodChoice) -> Option<&MethodReport> {
        self.methods.iter().find(|m| m.method == method)
    }

    pub fn timing(&self, key: &str) -> Option<f64> {
        self.run.as_ref()?.timings.get(key).copied()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Metric {
    Projection,
    Dynamic,
}

impl Metric {
    const ALL: [Metric; 2] = [Metric::Projection, Metric::Dynamic];

    fn name(self) -> &'static str {
        match self {
            Metric::Projection => "projection_error",
            Metric::Dynamic => "dynamic_error",
        }
    }
}

/// Rows of the merged table: `(metric, method, cells per case)`.
fn table(reports: &[ErrorReport]) -> Vec<(Metric, MethodChoice, Vec<String>)> {
    let mut methods: Vec<MethodChoice> = Vec::new();
    for r in reports {
        for m in &r.methods {
            if !methods.contains(&m.method) {
                methods.push(m.method);
            }
        }
    }
    methods.sort();
    let mut rows = Vec::new();
    for metric in Metric::ALL {
        for &method in &methods {
            let cells = reports
                .iter()
                .map(|r| {
                    r.method(method)
                        .map_or_else(|| "n/a".into(), |m| m.cell(metric))
                })
                .collect();
            rows.push((metric, method, cells));
        }
    }
    rows
}

/// `metric,method,<case>...` with one row per metric and method.
pub fn to_csv(reports: &[ErrorReport]) -> String {
    let mut out = String::from("metric,method");
    for r in reports {
        out.push(',');
        out.push_str(&csv_field(&r.case));
    }
    out.push('\n');
    for (metric, method, cells) in table(reports) {
        out.push_str(metric.name());
        out.push(',');
        out.push_str(method.as_str());
        for c in cells {
            out.push(',');
            out.push_str(&c);
        }
        out.push('\n');
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One markdown table per metric, methods as rows and cases as columns.
pub fn to_markdown(reports: &[ErrorReport]) -> String {
    let rows = table(reports);
    let mut out = String::new();
    for metric in Metric::ALL {
        out.push_str(&format!("### {}\n\n| Method |", metric.name()));
        for r in reports {
            out.push_str(&format!(" {} |", r.case.replace('|', "\\|")));
        }
        out.push_str("\n|---|");
        out.push_str(&"---|".repeat(reports.len()));
        out.push('\n');
        for (_, method, cells) in rows.iter().filter(|(m, _, _)| *m == metric) {
            out.push_str(&format!("| {method} |"));
            for c in cells {
                out.push_str(&format!(" {c} |"));
            }
            out.push('\n');
        }
        out.push('\n');
    }
    out
}
