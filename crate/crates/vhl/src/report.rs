//! CSV artifacts: canonical float formatting and atomic writes.
//!
//! All numeric artifacts use `,` separators, `\n` line ends, UTF-8, a
//! mandatory header row, and 17 significant digits per float, which is enough
//! to round-trip any f64 so repeated runs are byte-identical. Files are
//! written to a temporary sibling and renamed into place so readers never see
//! partial content.

use crate::Result;
use std::fs;
use std::path::Path;

/// Formats a float with 17 significant digits (exact f64 round trip).
pub fn fmt_float(v: f64) -> String {
    if v == 0.0 {
        // Normalize the sign of zero so artifacts do not depend on how a
        // zero was produced.
        return "0.0000000000000000e0".into();
    }
    format!("{v:.16e}")
}

/// A small CSV document builder with a fixed header.
#[derive(Debug, Clone)]
pub struct Csv {
    buf: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self {
            buf: format!("{}\n", header.join(",")),
            columns: header.len(),
        }
    }

    /// Appends a row of preformatted fields.
    pub fn row(&mut self, fields: &[String]) {
        assert_eq!(fields.len(), self.columns, "column count mismatch");
        self.buf.push_str(&fields.join(","));
        self.buf.push('\n');
    }

    pub fn into_string(self) -> String {
        self.buf
    }
}

/// Writes `content` to `path` atomically (temp file + rename).
pub fn write_atomic(path: &Path, content: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut tmp = path.to_path_buf();
    let file_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "artifact".into());
    tmp.set_file_name(format!(".{file_name}.tmp"));
    fs::write(&tmp, content)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for &v in &[1.0, -0.3333333333333333, 1e-300, 2.5e17, std::f64::consts::PI] {
            let s = fmt_float(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, v, "{s}");
        }
    }

    #[test]
    fn zero_formats_canonically() {
        assert_eq!(fmt_float(0.0), fmt_float(-0.0));
    }

    #[test]
    fn csv_layout() {
        let mut csv = Csv::new(&["a", "b"]);
        csv.row(&["1".into(), "2".into()]);
        assert_eq!(csv.into_string(), "a,b\n1,2\n");
    }

    #[test]
    fn atomic_write_creates_parents_and_replaces() {
        let dir = std::env::temp_dir().join("vhl_report_test");
        let _ = std::fs::remove_dir_all(&dir);
        let path = dir.join("sub").join("x.csv");
        write_atomic(&path, b"one\n").unwrap();
        write_atomic(&path, b"two\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "two\n");
        assert!(std::fs::read_dir(path.parent().unwrap())
            .unwrap()
            .all(|e| !e.unwrap().file_name().to_string_lossy().ends_with(".tmp")));
        let _ = std::fs::remove_dir_all(&dir);
    }
}
