//! Deterministic CSV emission: 17 significant digits, '.' decimal separator,
//! '\n' line endings, header row mandatory. Identical inputs produce
//! byte-identical files regardless of thread count.

use std::io::Write;

/// One float cell, 17 significant digits in scientific notation.
pub fn fmt(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    match x {
        Some(v) => fmt(v),
        None => "nan".to_string(),
    }
}

pub struct CsvWriter<W: Write> {
    out: W,
}

impl<W: Write> CsvWriter<W> {
    pub fn new(mut out: W, header: &[&str]) -> std::io::Result<Self> {
        out.write_all(header.join(",").as_bytes())?;
        out.write_all(b"\n")?;
        Ok(CsvWriter { out })
    }

    pub fn row(&mut self, cells: &[String]) -> std::io::Result<()> {
        self.out.write_all(cells.join(",").as_bytes())?;
        self.out.write_all(b"\n")
    }

    pub fn finish(mut self) -> std::io::Result<()> {
        self.out.flush()
    }
}
