//! Tabular exports of an archive: a summary table, one file per monitor
//! series, the flow diagnostics and the point-picking trace.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::archive::RunArchive;
use crate::error::{CliError, Result};
use crate::experiment::MonitorOutcome;
use crate::formats::num;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "markdown" | "md" => Ok(Self::Markdown),
            other => Err(CliError::InvalidConfig(format!("unknown report format {other:?} (csv, json, markdown)"))),
        }
    }
}

/// Constants pulled into the summary table, by monitor value key.
const KEY_CONSTANTS: [(&str, &str); 4] =
    [("fitted_c_prime", "fitted_slope"), ("epsilon", "epsilon"), ("sup_t_scal", "sup_t_scal"), ("chen_c", "fitted_c")];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub monitor: String,
    pub status: String,
    pub constants: BTreeMap<String, f64>,
    pub detail: String,
}

pub fn summary(archive: &RunArchive) -> Result<Vec<SummaryRow>> {
    let mut rows: Vec<SummaryRow> = archive
        .monitor_outcomes()?
        .iter()
        .map(|m| match m {
            MonitorOutcome::Report(r) => {
                let constants = KEY_CONSTANTS
                    .iter()
                    .filter_map(|(col, key)| r.values.get(*key).map(|&v| (col.to_string(), v)))
                    .collect();
                let failed: Vec<&str> = r.hypotheses.iter().filter(|h| !h.held).map(|h| h.name.as_str()).collect();
                let detail = if failed.is_empty() {
                    String::new()
                } else {
                    format!("hypotheses not held: {}", failed.join(" "))
                };
                SummaryRow { monitor: r.name.clone(), status: m.status().into(), constants, detail }
            }
            MonitorOutcome::Error { name, message } => SummaryRow {
                monitor: name.clone(),
                status: "error".into(),
                constants: BTreeMap::new(),
                detail: message.clone(),
            },
        })
        .collect();
    if let Some(audit) = archive.pick()? {
        let hops = audit.result.as_ref().map_or(0, |r| r.trace.len());
        rows.push(SummaryRow {
            monitor: format!("pointpick_k{}", audit.k),
            status: crate::experiment::verdict_name(audit.verdict).into(),
            constants: BTreeMap::new(),
            detail: audit.note.clone().unwrap_or_else(|| format!("{hops} hops")),
        });
    }
    Ok(rows)
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::format("report", e);
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(row).map_err(fail)?;
    }
    String::from_utf8(w.into_inner().map_err(|e| CliError::format("report", e))?)
        .map_err(|e| CliError::format("report", e))
}

fn cell(v: Option<&f64>) -> String {
    v.map(|&v| num(v)).unwrap_or_default()
}

fn summary_csv(rows: &[SummaryRow]) -> Result<String> {
    let mut header = vec!["monitor", "status"];
    header.extend(KEY_CONSTANTS.iter().map(|(c, _)| *c));
    header.push("detail");
    csv_text(
        &header,
        rows.iter().map(|r| {
            let mut row = vec![r.monitor.clone(), r.status.clone()];
            row.extend(KEY_CONSTANTS.iter().map(|(c, _)| cell(r.constants.get(*c))));
            row.push(r.detail.clone());
            row
        }),
    )
}

fn summary_markdown(rows: &[SummaryRow]) -> String {
    let mut out = String::from("| monitor | status |");
    for (c, _) in KEY_CONSTANTS {
        out.push_str(&format!(" {c} |"));
    }
    out.push_str(" detail |\n|---|---|");
    out.push_str(&"---|".repeat(KEY_CONSTANTS.len() + 1));
    out.push('\n');
    for r in rows {
        out.push_str(&format!("| {} | {} |", r.monitor, r.status));
        for (c, _) in KEY_CONSTANTS {
            out.push_str(&format!(" {} |", r.constants.get(c).map(|v| format!("{v:.6}")).unwrap_or_default()));
        }
        out.push_str(&format!(" {} |\n", r.detail));
    }
    out
}

/// Writes the report into `<archive>/report/` and returns the files written.
pub fn emit_report(archive: &RunArchive, format: ReportFormat) -> Result<Vec<PathBuf>> {
    let dir = archive.dir.join("report");
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let mut written = Vec::new();
    let mut put = |name: String, text: String| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        written.push(path);
        Ok(())
    };
    let rows = summary(archive)?;
    let outcomes = archive.monitor_outcomes()?;
    let series = archive.series()?;
    let pick = archive.pick()?;
    match format {
        ReportFormat::Json => {
            let doc = serde_json::json!({
                "summary": rows,
                "monitors": outcomes,
                "flow_series": series,
                "pointpick": pick,
            });
            put("report.json".into(), serde_json::to_string_pretty(&doc).expect("report serializes"))?;
        }
        ReportFormat::Markdown => put("summary.md".into(), summary_markdown(&rows))?,
        ReportFormat::Csv => {
            put("summary.csv".into(), summary_csv(&rows)?)?;
            for (idx, m) in outcomes.iter().enumerate() {
                if let MonitorOutcome::Report(r) = m {
                    for (name, points) in &r.series {
                        let text = csv_text(&["x", "value"], points.iter().map(|&(x, v)| vec![num(x), num(v)]))?;
                        put(format!("{idx:02}_{}_{name}.csv", r.name), text)?;
                    }
                }
            }
            let names: Vec<&String> = series.keys().collect();
            let times: Vec<f64> = series.values().next().map(|s| s.iter().map(|p| p.0).collect()).unwrap_or_default();
            let mut header = vec!["t"];
            header.extend(names.iter().map(|s| s.as_str()));
            let text = csv_text(
                &header,
                times.iter().enumerate().map(|(j, &t)| {
                    let mut row = vec![num(t)];
                    row.extend(names.iter().map(|n| cell(series[*n].get(j).map(|p| &p.1))));
                    row
                }),
            )?;
            put("flow_series.csv".into(), text)?;
            if let Some(result) = pick.as_ref().and_then(|a| a.result.as_ref()) {
                let mut prev = result.seed.scal;
                let mut rows = vec![vec![
                    "0".into(),
                    result.seed.node.to_string(),
                    result.seed.time.to_string(),
                    num(result.seed.t),
                    num(result.seed.scal),
                    String::new(),
                ]];
                for (h, p) in result.trace.iter().enumerate() {
                    rows.push(vec![
                        (h + 1).to_string(),
                        p.node.to_string(),
                        p.time.to_string(),
                        num(p.t),
                        num(p.scal),
                        num(p.scal / prev),
                    ]);
                    prev = p.scal;
                }
                put(
                    "pointpick_trace.csv".into(),
                    csv_text(&["hop", "node", "time_index", "t", "scal", "ratio_to_previous"], rows)?,
                )?;
            }
        }
    }
    Ok(written)
}

/// Human-readable summary for the terminal.
pub fn summary_text(rows: &[SummaryRow]) -> String {
    let mut out = String::new();
    for r in rows {
        let constants: Vec<String> = r.constants.iter().map(|(k, v)| format!("{k}={v:.6}")).collect();
        out.push_str(&format!("{:<24} {:<15} {} {}\n", r.monitor, r.status, constants.join(" "), r.detail));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_names() {
        assert_eq!("csv".parse::<ReportFormat>().unwrap(), ReportFormat::Csv);
        assert_eq!("markdown".parse::<ReportFormat>().unwrap(), ReportFormat::Markdown);
        assert!("xml".parse::<ReportFormat>().is_err());
    }
}
