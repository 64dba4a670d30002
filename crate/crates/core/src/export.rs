//! Plain CSV output: comma separated, header row, LF line endings, floats at
//! 17 significant digits so a round trip through text is lossless.

use std::fmt::Write as _;

use crate::wigner::PhaseSpaceGrid;

/// `v` with 17 significant digits in scientific notation.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Cell {
    fn render(&self, out: &mut String) {
        match self {
            Cell::Num(v) => out.push_str(&fmt_f64(*v)),
            Cell::Int(v) => {
                let _ = write!(out, "{v}");
            }
            Cell::Text(s) if s.contains([',', '"', '\n']) => {
                out.push('"');
                out.push_str(&s.replace('"', "\"\""));
                out.push('"');
            }
            Cell::Text(s) => out.push_str(s),
        }
    }
}

/// Accumulates rows in memory and renders them in one pass.
#[derive(Debug, Clone, Default)]
pub struct CsvTable {
    header: Vec<String>,
    body: String,
    rows: usize,
}

impl CsvTable {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self { header: header.iter().map(|s| s.as_ref().to_string()).collect(), body: String::new(), rows: 0 }
    }

    /// Panics if the row length differs from the header; that is a caller bug.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "CSV row width does not match header");
        for (i, c) in row.iter().enumerate() {
            if i > 0 {
                self.body.push(',');
            }
            c.render(&mut self.body);
        }
        self.body.push('\n');
        self.rows += 1;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        out.push_str(&self.body);
        out
    }
}

/// Long format (x, k, <column>) of one or more grids sharing the same axes.
pub fn grids_long_csv(columns: &[(&str, &PhaseSpaceGrid)]) -> CsvTable {
    let mut header = vec!["x", "k"];
    header.extend(columns.iter().map(|(name, _)| *name));
    let mut t = CsvTable::new(&header);
    if let Some((_, first)) = columns.first() {
        for (i, &x) in first.xs.iter().enumerate() {
            for (j, &k) in first.ks.iter().enumerate() {
                let mut row = vec![Cell::Num(x), Cell::Num(k)];
                row.extend(columns.iter().map(|(_, g)| Cell::Num(g.get(i, j))));
                t.push(row);
            }
        }
    }
    t
}
