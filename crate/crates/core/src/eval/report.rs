use std::fmt::Write as _;

use super::metrics::{FoldMetrics, RocPoint};
use super::run::{EvalSummary, MetricSummary};
use crate::dataset::Task;
use crate::error::Result;

/// `mean±std` with two decimals.
pub fn format_cell(m: &MetricSummary) -> String {
    format!("{:.2}±{:.2}", m.mean, m.std)
}

fn task_title(id: &str) -> String {
    id.parse::<Task>().map(|t| t.title().to_string()).unwrap_or_else(|_| id.to_string())
}

fn render(header: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| -> String {
        let mut s = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i > 0 {
                s.push_str("  ");
            }
            let pad = w - cell.chars().count();
            if i == 0 {
                s.push_str(cell);
                s.push_str(&" ".repeat(pad));
            } else {
                s.push_str(&" ".repeat(pad));
                s.push_str(cell);
            }
        }
        s.trim_end().to_string()
    };
    let mut out = line(header);
    out.push('\n');
    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}

/// Per-task table: class counts and mean±std of each metric.
pub fn render_summary_table(summaries: &[EvalSummary]) -> String {
    let mut header = vec!["Task".to_string(), "Method".into(), "#Pos.".into(), "#Neg.".into()];
    header.extend(FoldMetrics::NAMES.iter().map(|s| s.to_string()));
    let rows: Vec<Vec<String>> = summaries
        .iter()
        .map(|s| {
            let mut row = vec![
                task_title(&s.task),
                s.method.title().to_string(),
                s.n_pos.to_string(),
                s.n_neg.to_string(),
            ];
            row.extend(s.metrics().iter().map(format_cell));
            row
        })
        .collect();
    render(&header, &rows)
}

/// Method comparison; with more than one row, the best mean in each metric
/// column is wrapped in `**`.
pub fn render_comparison(summaries: &[EvalSummary]) -> String {
    let mut header = vec!["Method".to_string()];
    header.extend(FoldMetrics::NAMES.iter().map(|s| s.to_string()));
    let best: Vec<f64> = (0..4)
        .map(|m| {
            summaries
                .iter()
                .map(|s| s.metrics()[m].mean)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let highlight = summaries.len() > 1;
    let rows: Vec<Vec<String>> = summaries
        .iter()
        .map(|s| {
            let mut row = vec![s.method.title().to_string()];
            for (m, metric) in s.metrics().iter().enumerate() {
                let cell = format_cell(metric);
                row.push(if highlight && metric.mean == best[m] {
                    format!("**{cell}**")
                } else {
                    cell
                });
            }
            row
        })
        .collect();
    render(&header, &rows)
}

fn csv_float(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        v.to_string()
    }
}

/// `fpr,tpr,threshold` CSV; values round-trip exactly, missing thresholds
/// are empty.
pub fn roc_csv(points: &[RocPoint]) -> Result<String> {
    let mut out = String::from("fpr,tpr,threshold\n");
    for p in points {
        writeln!(out, "{},{},{}", csv_float(p.fpr), csv_float(p.tpr), csv_float(p.threshold)).expect("write to String");
    }
    Ok(out)
}

/// Parses [`roc_csv`] output back into points.
pub fn parse_roc_csv(text: &str) -> Result<Vec<RocPoint>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut points = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let num = |s: &str| -> Result<f64> {
            if s.is_empty() {
                return Ok(f64::NAN);
            }
            s.parse::<f64>()
                .map_err(|_| crate::error::Error::InvalidInput(format!("bad ROC value {s:?}")))
        };
        points.push(RocPoint {
            fpr: num(&rec[0])?,
            tpr: num(&rec[1])?,
            threshold: num(&rec[2])?,
        });
    }
    Ok(points)
}
