//! CSV and JSON emission. Numbers are written with 10 significant digits;
//! JSON carries the same rounded values as CSV.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::key_rate::RatePoint;
use crate::optimize::SweepRow;
use crate::pns::PnsCheck;

pub const SWEEP_COLUMNS: [&str; 13] = [
    "distance_km",
    "mu_opt",
    "p_post",
    "p_exp",
    "error_rate",
    "s_m",
    "tau1",
    "ec_cost",
    "gain_raw",
    "gain",
    "bound1",
    "bound2",
    "bound3",
];

pub const RATE_COLUMNS: [&str; 12] = [
    "distance_km",
    "mu",
    "p_post",
    "p_exp",
    "p_signal",
    "error_rate",
    "s_m",
    "tau1",
    "ec_cost",
    "gain_raw",
    "gain",
    "secure",
];

pub const BOUND_COLUMNS: [&str; 10] =
    ["distance_km", "eta1", "mu1", "bound1", "eta2", "mu2", "bound2", "eta3", "mu3", "bound3"];

pub const PNS_COLUMNS: [&str; 8] = [
    "n",
    "polarization",
    "fidelity",
    "ground_population",
    "signal_photons",
    "eve_photons",
    "unitarity_defect",
    "pass",
];

/// One cell of a table.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn opt(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Num)
    }

    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format_number(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => format_number(*v)
                .parse::<f64>()
                .ok()
                .and_then(serde_json::Number::from_f64)
                .map_or(Value::Null, Value::Number),
            Cell::Int(v) => Value::from(*v),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

/// 10 significant digits in scientific notation.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v:.9e}")
    }
}

/// A header plus rows of cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    /// Array of objects keyed by column name.
    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> =
                    self.columns.iter().zip(row).map(|(k, c)| (k.to_string(), c.json())).collect();
                Value::Object(obj)
            })
            .collect();
        serde_json::to_string_pretty(&Value::Array(rows)).expect("json values serialize")
    }
}

pub fn rate_row(distance: f64, mu: Option<f64>, p: &RatePoint) -> Vec<Cell> {
    vec![
        Cell::Num(distance),
        Cell::opt(mu),
        Cell::Num(p.p_post),
        Cell::Num(p.p_exp),
        Cell::Num(p.p_signal),
        Cell::Num(p.e),
        Cell::Num(p.sm),
        Cell::Num(p.tau1),
        Cell::Num(p.ec_cost),
        Cell::Num(p.gain_raw),
        Cell::Num(p.gain),
        Cell::Bool(p.secure),
    ]
}

/// Sweep row; a distance that failed to evaluate keeps only its distance
/// and bounds.
pub fn sweep_row(row: &SweepRow) -> Vec<Cell> {
    let mut cells = vec![Cell::Num(row.distance)];
    match &row.outcome {
        Ok(op) => {
            let p = &op.point;
            cells.extend([
                Cell::opt(op.mu),
                Cell::Num(p.p_post),
                Cell::Num(p.p_exp),
                Cell::Num(p.e),
                Cell::Num(p.sm),
                Cell::Num(p.tau1),
                Cell::Num(p.ec_cost),
                Cell::Num(p.gain_raw),
                Cell::Num(p.gain),
            ]);
        }
        Err(_) => cells.extend(std::iter::repeat_n(Cell::Empty, 9)),
    }
    match row.bounds {
        Some(b) => cells.extend(b.map(Cell::Num)),
        None => cells.extend(std::iter::repeat_n(Cell::Empty, 3)),
    }
    cells
}

pub fn pns_row(c: &PnsCheck) -> Vec<Cell> {
    vec![
        Cell::Int(c.n as u64),
        Cell::Text(c.polarization.to_string()),
        Cell::Num(c.fidelity),
        Cell::Num(c.ground_population),
        Cell::Num(c.signal_photons),
        Cell::Num(c.eve_photons),
        Cell::Num(c.unitarity_defect),
        Cell::Bool(c.passed()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(1.0), "1.000000000e0");
        assert_eq!(format_number(-1.234_567_890_12e-7), "-1.234567890e-7");
    }

    #[test]
    fn csv_and_json_agree() {
        let mut t = Table::new(&["a", "b", "c"]);
        t.push(vec![Cell::Num(1.0 / 3.0), Cell::Empty, Cell::Text("x,y".into())]);
        assert_eq!(t.to_csv(), "a,b,c\n3.333333333e-1,,\"x,y\"\n");
        let v: Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(v[0]["a"].as_f64().unwrap(), 0.3333333333);
        assert!(v[0]["b"].is_null());
    }
}
