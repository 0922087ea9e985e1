//! Shared CSV writing conventions.
//!
//! Every dataset this crate emits follows the same shape so downstream
//! plotting scripts can treat them uniformly:
//!
//! - leading `#`-prefixed comment lines echo the full effective
//!   configuration, the master seed, and the artifact version — enough to
//!   regenerate the file exactly (and nothing volatile like timestamps, so
//!   regeneration is byte-identical);
//! - one header line with the column names;
//! - data rows, floats printed with Rust's shortest round-trip formatting.
//!
//! Non-finite values must never reach a cell: writers translate saturation
//! into an empty field plus an explicit flag column instead.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

/// Formats a float with the shortest representation that parses back to the
/// same bits. This is what makes regenerated CSVs byte-identical across
/// runs and platforms.
///
/// Non-finite inputs are a caller bug (saturation must be flagged, not
/// printed); in debug builds this asserts.
pub fn fmt_f64(v: f64) -> String {
    debug_assert!(v.is_finite(), "non-finite value reached a CSV cell: {v}");
    format!("{v}")
}

/// An in-memory CSV document: comment header, column names, string rows.
#[derive(Debug, Clone, Default)]
pub struct CsvDoc {
    comments: Vec<String>,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvDoc {
    /// Starts a document with the given column names.
    pub fn new(columns: &[&str]) -> Self {
        Self {
            comments: Vec::new(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Appends one `#`-prefixed comment line to the header block.
    pub fn comment(&mut self, line: impl AsRef<str>) -> &mut Self {
        self.comments.push(line.as_ref().to_string());
        self
    }

    /// Appends a data row. The cell count must match the column count.
    pub fn push_row(&mut self, cells: Vec<String>) -> &mut Self {
        assert_eq!(
            cells.len(),
            self.columns.len(),
            "row width {} does not match {} columns",
            cells.len(),
            self.columns.len()
        );
        self.rows.push(cells);
        self
    }

    /// Number of data rows so far.
    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// Renders the document to a single string with `\n` line endings.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            writeln!(out, "# {c}").unwrap();
        }
        writeln!(out, "{}", self.columns.join(",")).unwrap();
        for row in &self.rows {
            writeln!(out, "{}", row.join(",")).unwrap();
        }
        out
    }

    /// Writes the rendered document to `path`, creating parent directories
    /// as needed.
    pub fn write_to(&self, path: &Path) -> io::Result<()> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                fs::create_dir_all(parent)?;
            }
        }
        fs::write(path, self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt_round_trips() {
        for &v in &[0.1, 1.0 / 3.0, 1e-12, 123_456.789, -0.0, 2.5e-8] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(fmt_f64(0.1), "0.1");
        assert_eq!(fmt_f64(3.0), "3");
    }

    #[test]
    #[should_panic(expected = "non-finite")]
    fn fmt_rejects_infinity() {
        let _ = fmt_f64(f64::INFINITY);
    }

    #[test]
    fn render_layout() {
        let mut doc = CsvDoc::new(&["a", "b"]);
        doc.comment("seed = 7")
            .comment("version = 0.1.0")
            .push_row(vec!["1".into(), "0.5".into()])
            .push_row(vec!["2".into(), fmt_f64(0.25)]);
        let text = doc.render();
        assert_eq!(text, "# seed = 7\n# version = 0.1.0\na,b\n1,0.5\n2,0.25\n");
        assert_eq!(doc.row_count(), 2);
    }

    #[test]
    #[should_panic(expected = "row width")]
    fn row_width_checked() {
        let mut doc = CsvDoc::new(&["a", "b"]);
        doc.push_row(vec!["1".into()]);
    }

    #[test]
    fn write_creates_parents() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/out.csv");
        let mut doc = CsvDoc::new(&["x"]);
        doc.push_row(vec!["1".into()]);
        doc.write_to(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "x\n1\n");
    }

    #[test]
    fn byte_identical_rerender() {
        let mut doc = CsvDoc::new(&["v"]);
        doc.comment("cfg");
        for i in 0..100 {
            doc.push_row(vec![fmt_f64(i as f64 * 0.3)]);
        }
        assert_eq!(doc.render(), doc.render());
    }
}
