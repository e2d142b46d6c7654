//! CSV and JSON writers with a pinned, reproducible format: comma separator,
//! `.` decimal point, LF line endings, one header row, floats at 17
//! significant digits. Files are assembled in memory and written in one
//! call, so a rerun with identical inputs is byte-identical.

use std::fs;
use std::path::Path;

use crate::error::Error;

/// 17 significant digits; round-trips any f64 exactly.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Builder for a CSV document.
pub struct Csv {
    buf: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = String::new();
        buf.push_str(&header.join(","));
        buf.push('\n');
        Self {
            buf,
            columns: header.len(),
        }
    }

    /// Append one row of preformatted cells.
    pub fn row(&mut self, cells: &[String]) {
        debug_assert_eq!(cells.len(), self.columns);
        self.buf.push_str(&cells.join(","));
        self.buf.push('\n');
    }

    pub fn into_string(self) -> String {
        self.buf
    }
}

/// Cell helpers: floats at fixed precision, empty cell for absent values.
pub fn cell(x: f64) -> String {
    fmt_float(x)
}

pub fn cell_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

pub fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)
            .map_err(|e| Error::InvalidParameter(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, text)
        .map_err(|e| Error::InvalidParameter(format!("cannot write {}: {e}", path.display())))
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidParameter(format!("serialization error: {e}")))?;
    text.push('\n');
    write_text(path, &text)
}
