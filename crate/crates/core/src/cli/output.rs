//! Tabular results rendered as `.dat`, CSV or JSON.

use std::fmt::Write;

use clap::ValueEnum;

use crate::format::{sig, DAT_DIGITS, FULL_DIGITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Space-separated columns, six significant digits, no header.
    Dat,
    /// Header row, full precision.
    Csv,
    /// `{"meta": {...}, "rows": [{...}]}`, full precision.
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Bool(bool),
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Num)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.into())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl Cell {
    fn plain(&self, digits: usize) -> String {
        match self {
            Cell::Num(x) => sig(*x, digits),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Num(x) if x.is_finite() => sig(*x, FULL_DIGITS),
            Cell::Num(_) | Cell::Missing => "null".into(),
            Cell::Text(s) => serde_json::to_string(s).expect("string serialises"),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

/// Rows under named columns, plus run metadata that only JSON carries.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub meta: Vec<(String, Cell)>,
    /// Columns shown in `.dat`; all when empty.
    pub dat_columns: Vec<usize>,
    /// Replaces the `.dat` rendering entirely.
    pub dat_text: Option<String>,
}

impl Report {
    pub fn new(columns: &[&str]) -> Self {
        Report { columns: columns.iter().map(|c| c.to_string()).collect(), ..Default::default() }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Cell>) {
        self.meta.push((key.into(), value.into()));
    }

    pub fn dat_only(mut self, columns: &[&str]) -> Self {
        self.dat_columns = columns
            .iter()
            .map(|c| self.columns.iter().position(|k| k == c).expect("known column"))
            .collect();
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Dat => self.dat(),
            Format::Csv => self.csv(),
            Format::Json => self.json(),
        }
    }

    fn dat(&self) -> String {
        if let Some(text) = &self.dat_text {
            return text.clone();
        }
        let mut out = String::new();
        for row in &self.rows {
            let cells: Vec<String> = if self.dat_columns.is_empty() {
                row.iter().map(|c| c.plain(DAT_DIGITS)).collect()
            } else {
                self.dat_columns.iter().map(|&i| row[i].plain(DAT_DIGITS)).collect()
            };
            writeln!(out, "{}", cells.join(" ")).unwrap();
        }
        out
    }

    fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.plain(FULL_DIGITS))).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
    }

    fn json(&self) -> String {
        let key = |k: &str| serde_json::to_string(k).expect("string serialises");
        let object = |pairs: Vec<(String, String)>| {
            let body: Vec<String> = pairs.into_iter().map(|(k, v)| format!("{}:{}", key(&k), v)).collect();
            format!("{{{}}}", body.join(","))
        };
        let meta = object(self.meta.iter().map(|(k, v)| (k.clone(), v.json())).collect());
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|row| object(self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect()))
            .collect();
        format!("{{\"meta\":{meta},\"rows\":[{}]}}\n", rows.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new(&["t", "value", "note"]);
        r.row(vec![0.8.into(), 0.31249999999999994.into(), "a,b".into()]);
        r.meta("n", 1.0);
        r
    }

    #[test]
    fn renders_each_format() {
        assert_eq!(sample().render(Format::Dat), "0.8 0.3125 a,b\n");
        assert_eq!(sample().dat_only(&["value"]).render(Format::Dat), "0.3125\n");
        assert_eq!(
            sample().render(Format::Csv),
            "t,value,note\n0.80000000000000004,0.31249999999999994,\"a,b\"\n"
        );
        let json: serde_json::Value = serde_json::from_str(&sample().render(Format::Json)).unwrap();
        assert_eq!(json["rows"][0]["value"], 0.31249999999999994);
        assert_eq!(json["meta"]["n"], 1.0);
    }
}
