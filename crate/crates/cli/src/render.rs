use std::collections::BTreeSet;

use clap::ValueEnum;
use quotloc::report::{Report, ResultRow, Verdict};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

pub struct Output {
    pub text: String,
    pub pass: bool,
}

/// Above this many rows the text format only lists failures.
const TEXT_ROW_LIMIT: usize = 60;

pub fn emit<C: Serialize>(report: &Report<C>, format: Format) -> anyhow::Result<Output> {
    let text = match format {
        Format::Json => serde_json::to_string_pretty(report)? + "\n",
        Format::Csv => csv(&report.results)?,
        Format::Text => text(report),
    };
    Ok(Output { text, pass: report.suite_pass })
}

fn param_keys(rows: &[ResultRow]) -> Vec<String> {
    let keys: BTreeSet<&String> = rows.iter().flat_map(|r| r.params.keys()).collect();
    keys.into_iter().cloned().collect()
}

fn csv(rows: &[ResultRow]) -> anyhow::Result<String> {
    let keys = param_keys(rows);
    let mut w = csv::Writer::from_writer(vec![]);
    let mut header = keys.clone();
    header.extend(["value", "route", "verdict"].map(String::from));
    w.write_record(&header)?;
    for r in rows {
        let mut rec: Vec<String> =
            keys.iter().map(|k| r.params.get(k).map(|p| p.to_string()).unwrap_or_default()).collect();
        rec.push(r.value.clone());
        rec.push(r.route.clone().unwrap_or_default());
        rec.push(r.verdict.to_string());
        w.write_record(&rec)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn text<C>(report: &Report<C>) -> String {
    let rows = &report.results;
    let shown: Vec<&ResultRow> = if rows.len() > TEXT_ROW_LIMIT {
        rows.iter().filter(|r| r.verdict == Verdict::Fail).collect()
    } else {
        rows.iter().collect()
    };

    // a lone informational value prints bare, e.g. `quotloc intersect ...` -> `4`
    if rows.len() == 1 && rows[0].verdict == Verdict::Info {
        return format!("{}\n", rows[0].value);
    }

    let keys = param_keys(rows);
    let mut table: Vec<Vec<String>> = vec![];
    let mut header = keys.clone();
    header.extend(["value", "route", "verdict"].map(String::from));
    table.push(header);
    for r in &shown {
        let mut line: Vec<String> =
            keys.iter().map(|k| r.params.get(k).map(|p| p.to_string()).unwrap_or_default()).collect();
        line.push(r.value.clone());
        line.push(r.route.clone().unwrap_or_default());
        line.push(r.verdict.to_string());
        table.push(line);
    }
    let widths: Vec<usize> =
        (0..table[0].len()).map(|c| table.iter().map(|l| l[c].chars().count()).max().unwrap_or(0)).collect();

    let mut out = String::new();
    for line in &table {
        let cells: Vec<String> = line.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    if shown.len() < rows.len() {
        out.push_str(&format!("({} of {} rows shown: failures only)\n", shown.len(), rows.len()));
    }
    let fails = rows.iter().filter(|r| r.verdict == Verdict::Fail).count();
    out.push_str(&format!(
        "{}: {} rows, {} failed\n",
        if report.suite_pass { "PASS" } else { "FAIL" },
        rows.len(),
        fails
    ));
    out
}
