//! Tabular output: CSV with a header row, or JSON as an array of records
//! whose keys follow the column order.

use serde_json::{Map, Number, Value};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Null,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
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

/// Shortest decimal that parses back to the same binary64.
pub fn format_real(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:?}")
    }
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Real(v) => format_real(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Null => String::new(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            // non-finite reals have no JSON number form
            Cell::Real(v) => Number::from_f64(*v).map(Value::Number).unwrap_or(Value::Null),
            Cell::Int(v) => Value::Number((*v).into()),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Null => Value::Null,
        }
    }
}

/// Rows under a fixed list of column names.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    /// Appends a row; its width must match the column count.
    pub fn push(&mut self, row: Vec<Cell>) -> Result<(), CliError> {
        if row.len() != self.columns.len() {
            return Err(CliError::Schema(format!("row has {} cells for {} columns", row.len(), self.columns.len())));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Serialize `table` in `format`, ending with a newline.
pub fn emit_table(table: &Table, format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            w.write_record(&table.columns).map_err(|e| CliError::Io(e.to_string()))?;
            for row in &table.rows {
                w.write_record(row.iter().map(Cell::to_csv)).map_err(|e| CliError::Io(e.to_string()))?;
            }
            w.into_inner().map_err(|e| CliError::Io(e.to_string()))
        }
        Format::Json => {
            let records: Vec<Value> = table
                .rows
                .iter()
                .map(|row| Value::Object(table.columns.iter().cloned().zip(row.iter().map(Cell::to_json)).collect::<Map<_, _>>()))
                .collect();
            let mut out = serde_json::to_vec_pretty(&Value::Array(records)).map_err(|e| CliError::Io(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
    }
}
