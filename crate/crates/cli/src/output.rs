//! Output tables: CSV with a `# key=value` header, or JSON
//! `{config, records, summary}`. Floats use 17 significant digits.

use std::io::Write;

use fibdiff_core::measures::fmt_f64;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    U(u64),
    B(bool),
    S(String),
    /// A closed interval, `[lo,hi]` in CSV and a two-element array in JSON.
    Pair(f64, f64),
    Null,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::I(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::U(x as u64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::U(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::B(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::S(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::S(x)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Null, Into::into)
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::F(x) => fmt_f64(*x),
            Cell::I(x) => x.to_string(),
            Cell::U(x) => x.to_string(),
            Cell::B(x) => x.to_string(),
            Cell::S(s) => s.clone(),
            Cell::Pair(a, b) => format!("[{},{}]", fmt_f64(*a), fmt_f64(*b)),
            Cell::Null => String::new(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::F(x) if x.is_finite() => fmt_f64(*x),
            Cell::F(_) | Cell::Null => "null".into(),
            Cell::S(s) => serde_json::to_string(s).expect("string serializes"),
            Cell::Pair(a, b) => format!("[{},{}]", Cell::F(*a).json(), Cell::F(*b).json()),
            other => other.text(),
        }
    }
}

pub type Fields = Vec<(String, Cell)>;

/// Builds a field list: `fields![("a", 1.0), ("b", true)]`.
#[macro_export]
macro_rules! fields {
    ($(($k:expr, $v:expr)),* $(,)?) => {
        vec![$(($k.to_string(), $crate::output::Cell::from($v))),*]
    };
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub config: Fields,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Fields,
    /// Indices of rows that failed their check.
    pub failed_rows: Vec<usize>,
    pub failed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Json => self.json(),
        }
    }

    fn csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.config {
            out.push_str(&format!("# {k}={}\n", v.text()));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::text)).expect("in-memory write");
        }
        out.push_str(std::str::from_utf8(&w.into_inner().expect("in-memory flush")).expect("utf-8"));
        for (k, v) in &self.summary {
            out.push_str(&format!("# summary.{k}={}\n", v.text()));
        }
        out
    }

    fn object(fields: &[(String, Cell)]) -> String {
        let body: Vec<String> =
            fields.iter().map(|(k, v)| format!("{}:{}", serde_json::to_string(k).expect("key"), v.json())).collect();
        format!("{{{}}}", body.join(","))
    }

    fn record(&self, row: &[Cell]) -> String {
        let fields: Fields = self.columns.iter().zip(row).map(|(c, v)| (c.to_string(), v.clone())).collect();
        Report::object(&fields)
    }

    fn json(&self) -> String {
        let records: Vec<String> = self.rows.iter().map(|r| format!("  {}", self.record(r))).collect();
        let records = if records.is_empty() { "[]".to_string() } else { format!("[\n{}\n]", records.join(",\n")) };
        format!(
            "{{\n\"config\":{},\n\"records\":{},\n\"summary\":{}\n}}\n",
            Report::object(&self.config),
            records,
            Report::object(&self.summary)
        )
    }

    /// One-line JSON failure record.
    pub fn failure_record(&self, command: &str) -> String {
        let rows: Vec<String> = self.failed_rows.iter().map(|&i| self.record(&self.rows[i])).collect();
        format!(
            "{{\"failure\":{},\"failed_records\":{},\"records\":[{}],\"summary\":{}}}",
            serde_json::to_string(command).expect("command"),
            self.failed_rows.len(),
            rows.join(","),
            Report::object(&self.summary)
        )
    }
}

/// Writes to `path`, or stdout for `-`.
pub fn emit(text: &str, path: &str) -> std::io::Result<()> {
    if path == "-" {
        let mut out = std::io::stdout().lock();
        out.write_all(text.as_bytes())?;
        out.flush()
    } else {
        std::fs::write(path, text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        Report {
            config: fields![("command", "x"), ("n", 1e4)],
            columns: vec!["k", "pass", "note", "K"],
            rows: vec![
                vec![Cell::F(0.5), Cell::B(true), Cell::S("a,b".into()), Cell::Pair(-0.5, 1.5)],
                vec![Cell::F(f64::NAN), Cell::B(false), Cell::Null, Cell::Pair(0.0, 1.0)],
            ],
            summary: fields![("count", 2usize)],
            failed_rows: vec![1],
            failed: true,
        }
    }

    #[test]
    fn csv_layout() {
        let text = sample().render(Format::Csv);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# command=x");
        assert_eq!(lines[1], "# n=1.0000000000000000e4");
        assert_eq!(lines[2], "k,pass,note,K");
        assert_eq!(lines[3], "5.0000000000000000e-1,true,\"a,b\",\"[-5.0000000000000000e-1,1.5000000000000000e0]\"");
        assert_eq!(lines[5], "# summary.count=2");
    }

    #[test]
    fn json_parses() {
        let r = sample();
        let v: serde_json::Value = serde_json::from_str(&r.render(Format::Json)).unwrap();
        assert_eq!(v["config"]["n"], 1e4);
        assert_eq!(v["records"][0]["note"], "a,b");
        assert!(v["records"][1]["k"].is_null());
        assert_eq!(v["records"][0]["K"], serde_json::json!([-0.5, 1.5]));
        let f: serde_json::Value = serde_json::from_str(&r.failure_record("x")).unwrap();
        assert_eq!(f["failed_records"], 1);
    }
}
