//! CSV and JSON export with round-trip float formatting.

use std::fmt::Write as _;

/// 17 significant digits, so values survive a text round trip exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Comma-separated table with `#`-prefixed provenance lines.
#[derive(Debug, Clone, Default)]
pub struct CsvTable {
    provenance: Vec<String>,
    header: Vec<String>,
    rows: Vec<String>,
}

impl CsvTable {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        CsvTable {
            provenance: Vec::new(),
            header: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn provenance(&mut self, line: impl Into<String>) -> &mut Self {
        self.provenance.push(line.into());
        self
    }

    /// Insert header lines before the existing ones.
    pub fn prepend_provenance<I: IntoIterator<Item = String>>(&mut self, lines: I) -> &mut Self {
        let old = std::mem::take(&mut self.provenance);
        self.provenance.extend(lines);
        self.provenance.extend(old);
        self
    }

    /// Leading text fields followed by numeric fields.
    pub fn row(&mut self, text: &[&str], values: &[f64]) {
        let mut line = String::new();
        for (i, t) in text.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            line.push_str(t);
        }
        for (i, v) in values.iter().enumerate() {
            if i > 0 || !text.is_empty() {
                line.push(',');
            }
            let _ = write!(line, "{}", fmt_f64(*v));
        }
        self.rows.push(line);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for p in &self.provenance {
            out.push_str("# ");
            out.push_str(p);
            out.push('\n');
        }
        out.push_str(&self.header.join(","));
        out.push('\n');
        for r in &self.rows {
            out.push_str(r);
            out.push('\n');
        }
        out
    }
}
