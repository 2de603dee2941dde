//! CSV and JSON emission.
//!
//! CSV: `#`-prefixed header lines with the run metadata, then a column-name line and
//! comma-separated rows. Floats carry 17 significant digits so they round-trip exactly.

use serde_json::{json, Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Flag(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Text(s) => s.clone(),
            Cell::Flag(b) => (*b as u8).to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json!(x),
            Cell::Text(s) => json!(s),
            Cell::Flag(b) => json!(b),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Flag(b)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// What a run produced: a flat table, or JSON built by the experiment itself.
pub enum Output {
    Table(Table),
    Json(Value),
}

pub fn to_csv(meta: &[(String, String)], table: &Table) -> String {
    let mut s = String::new();
    for (k, v) in meta {
        s.push_str(&format!("# {k} = {v}\n"));
    }
    s.push_str(&table.columns.join(","));
    s.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(Cell::csv).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

fn meta_json(meta: &[(String, String)]) -> Value {
    Value::Object(meta.iter().map(|(k, v)| (k.clone(), json!(v))).collect::<Map<_, _>>())
}

pub fn to_json(meta: &[(String, String)], output: &Output) -> String {
    let body = match output {
        Output::Table(t) => json!({
            "columns": t.columns,
            "rows": t.rows.iter().map(|r| r.iter().map(Cell::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        }),
        Output::Json(v) => v.clone(),
    };
    let mut doc = json!({ "meta": meta_json(meta) });
    if let (Some(d), Value::Object(b)) = (doc.as_object_mut(), body) {
        d.extend(b);
    }
    let mut s = serde_json::to_string_pretty(&doc).expect("JSON of plain values");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        let x = 0.1 + 0.2;
        let t = Table { columns: vec!["x"], rows: vec![vec![Cell::Num(x)]] };
        let csv = to_csv(&[], &t);
        let back: f64 = csv.lines().nth(1).unwrap().parse().unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn header_lines_are_comments() {
        let csv = to_csv(&[("omega0".into(), "100".into())], &Table::new(&["a", "b"]));
        assert_eq!(csv, "# omega0 = 100\na,b\n");
    }
}
