//! Rendering of reports as JSON, CSV or a padded text table.

use clap::ValueEnum;
use puretest::report::ReportEnvelope;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// Row-oriented view of a report, for the csv and table formats.
pub struct Tabular {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Tabular {
    pub fn new(headers: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self { headers: headers.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

pub struct Output {
    pub envelope: ReportEnvelope,
    pub table: Option<Tabular>,
    /// Replaces `table` for the text format only.
    pub display: Option<Tabular>,
}

pub fn render(out: &Output, format: Format) -> Result<String, String> {
    match format {
        Format::Json => serde_json::to_string_pretty(&out.envelope)
            .map(|s| s + "\n")
            .map_err(|e| e.to_string()),
        Format::Csv => {
            let t = tabular(out)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&t.headers).map_err(|e| e.to_string())?;
            for row in &t.rows {
                w.write_record(row).map_err(|e| e.to_string())?;
            }
            String::from_utf8(w.into_inner().map_err(|e| e.to_string())?).map_err(|e| e.to_string())
        }
        Format::Table => Ok(text_table(match &out.display {
            Some(d) => d,
            None => tabular(out)?,
        })),
    }
}

fn tabular(out: &Output) -> Result<&Tabular, String> {
    out.table
        .as_ref()
        .ok_or_else(|| format!("'{}' has no tabular form; use --format json", out.envelope.command))
}

fn text_table(t: &Tabular) -> String {
    let mut widths: Vec<usize> = t.headers.iter().map(|h| h.chars().count()).collect();
    for row in &t.rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| -> String {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        padded.join("  ").trim_end().to_string()
    };
    let mut s = line(&t.headers) + "\n";
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    s += &(rule.join("  ") + "\n");
    for row in &t.rows {
        s += &(line(row) + "\n");
    }
    s
}
