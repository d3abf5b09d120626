use serde::Serialize;

use crate::config::Format;

/// A report with fixed TSV columns and a text form.
pub trait Report: Serialize {
    fn tsv_header(&self) -> &'static [&'static str];
    fn tsv_rows(&self) -> Vec<Vec<String>>;
    fn text(&self) -> String;
    /// False when the report records a failed check.
    fn ok(&self) -> bool {
        true
    }
}

pub fn render(r: &dyn ErasedReport, format: Format) -> anyhow::Result<String> {
    Ok(match format {
        Format::Json => r.json()? + "\n",
        Format::Text => r.text(),
        Format::Tsv => {
            let mut out = r.tsv_header().join("\t");
            out.push('\n');
            for row in r.tsv_rows() {
                let cells: Vec<String> = row.into_iter().map(|c| c.replace(['\t', '\n'], " ")).collect();
                out.push_str(&cells.join("\t"));
                out.push('\n');
            }
            out
        }
    })
}

/// Object-safe view of [`Report`].
pub trait ErasedReport {
    fn json(&self) -> serde_json::Result<String>;
    fn tsv_header(&self) -> &'static [&'static str];
    fn tsv_rows(&self) -> Vec<Vec<String>>;
    fn text(&self) -> String;
    fn ok(&self) -> bool;
}

impl<T: Report> ErasedReport for T {
    fn json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }
    fn tsv_header(&self) -> &'static [&'static str] {
        Report::tsv_header(self)
    }
    fn tsv_rows(&self) -> Vec<Vec<String>> {
        Report::tsv_rows(self)
    }
    fn text(&self) -> String {
        Report::text(self)
    }
    fn ok(&self) -> bool {
        Report::ok(self)
    }
}
