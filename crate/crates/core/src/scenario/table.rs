//! Typed result tables and their CSV/JSON encodings.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value as Json};

use super::ScenarioError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnType {
    Int,
    Real,
    Bool,
    Text,
}

impl ColumnType {
    fn name(self) -> &'static str {
        match self {
            ColumnType::Int => "int",
            ColumnType::Real => "real",
            ColumnType::Bool => "bool",
            ColumnType::Text => "text",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "int" => ColumnType::Int,
            "real" => ColumnType::Real,
            "bool" => ColumnType::Bool,
            "text" => ColumnType::Text,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub kind: ColumnType,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn kind(&self) -> ColumnType {
        match self {
            Cell::Int(_) => ColumnType::Int,
            Cell::Real(_) => ColumnType::Real,
            Cell::Bool(_) => ColumnType::Bool,
            Cell::Text(_) => ColumnType::Text,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Real(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Cell::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }

    /// Shortest round-trip text; non-finite reals as `NaN`, `inf`, `-inf`.
    fn to_text(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Real(x) => format!("{x:?}"),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Json {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Real(x) if x.is_finite() => json!(x),
            Cell::Real(x) => json!(format!("{x:?}")),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
        }
    }

    fn from_json(v: &Json, kind: ColumnType) -> Option<Self> {
        Some(match kind {
            ColumnType::Int => Cell::Int(v.as_i64()?),
            ColumnType::Real => match v {
                Json::Number(n) => Cell::Real(n.as_f64()?),
                Json::String(s) => Cell::Real(s.parse().ok()?),
                _ => return None,
            },
            ColumnType::Bool => Cell::Bool(v.as_bool()?),
            ColumnType::Text => Cell::Text(v.as_str()?.to_owned()),
        })
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<i64> for Cell {
    fn from(i: i64) -> Self {
        Cell::Int(i)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<u64> for Cell {
    fn from(i: u64) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Metadata {
    pub scenario: String,
    pub scenario_digest: String,
    pub library_version: String,
    pub seed: Option<u64>,
    /// Task-specific notes such as a recorded crossover time.
    pub extra: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    pub metadata: Metadata,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

impl ResultTable {
    pub fn new(columns: &[(&str, ColumnType)]) -> Self {
        ResultTable {
            columns: columns
                .iter()
                .map(|(n, k)| Column {
                    name: (*n).to_owned(),
                    kind: *k,
                })
                .collect(),
            rows: Vec::new(),
            metadata: Metadata {
                library_version: env!("CARGO_PKG_VERSION").to_owned(),
                ..Default::default()
            },
        }
    }

    /// Appends a row; panics on arity or type mismatch, which is a bug in the caller.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row arity");
        for (cell, col) in row.iter().zip(&self.columns) {
            assert_eq!(cell.kind(), col.kind, "column {}", col.name);
        }
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// All cells of one column.
    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn reals(&self, name: &str) -> Option<Vec<f64>> {
        self.column(name)?.into_iter().map(Cell::as_f64).collect()
    }

    pub fn bools(&self, name: &str) -> Option<Vec<bool>> {
        self.column(name)?.into_iter().map(Cell::as_bool).collect()
    }

    /// A table restricted to `names`, in that order.
    pub fn select(&self, names: &[&str]) -> Option<ResultTable> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| self.column_index(n))
            .collect::<Option<_>>()?;
        Some(ResultTable {
            columns: idx.iter().map(|&i| self.columns[i].clone()).collect(),
            rows: self
                .rows
                .iter()
                .map(|r| idx.iter().map(|&i| r[i].clone()).collect())
                .collect(),
            metadata: self.metadata.clone(),
        })
    }

    /// Stamps the digest into the metadata and as a trailing column.
    pub(crate) fn finish(mut self, scenario: &str, digest: &str, seed: Option<u64>) -> Self {
        self.metadata.scenario = scenario.to_owned();
        self.metadata.scenario_digest = digest.to_owned();
        self.metadata.seed = seed;
        if self.column_index("scenario_digest").is_none() {
            self.columns.push(Column {
                name: "scenario_digest".into(),
                kind: ColumnType::Text,
            });
            for row in &mut self.rows {
                row.push(Cell::Text(digest.to_owned()));
            }
        }
        self
    }

    pub fn to_csv(&self) -> Result<String, ScenarioError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(self.columns.iter().map(|c| c.name.as_str()))?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_text))?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| ScenarioError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    pub fn to_json(&self) -> String {
        let m = &self.metadata;
        let mut meta = Map::new();
        meta.insert("scenario".into(), json!(m.scenario));
        meta.insert("scenario_digest".into(), json!(m.scenario_digest));
        meta.insert("library_version".into(), json!(m.library_version));
        meta.insert("seed".into(), json!(m.seed));
        meta.insert("extra".into(), json!(m.extra));
        let doc = json!({
            "metadata": meta,
            "columns": self.columns.iter().map(|c| json!({"name": c.name, "type": c.kind.name()})).collect::<Vec<_>>(),
            "rows": self.rows.iter().map(|r| r.iter().map(Cell::to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let bad = |what: &str| ScenarioError::Validation {
            path: what.to_owned(),
            line: None,
            message: "malformed table".into(),
        };
        let doc: Json = serde_json::from_str(text).map_err(ScenarioError::from_json)?;
        let meta = doc
            .get("metadata")
            .and_then(Json::as_object)
            .ok_or_else(|| bad("metadata"))?;
        let text_of = |k: &str| {
            meta.get(k)
                .and_then(Json::as_str)
                .map(str::to_owned)
                .ok_or_else(|| bad(k))
        };
        let extra = meta
            .get("extra")
            .and_then(Json::as_object)
            .ok_or_else(|| bad("metadata.extra"))?
            .iter()
            .map(|(k, v)| {
                v.as_str()
                    .map(|s| (k.clone(), s.to_owned()))
                    .ok_or_else(|| bad("metadata.extra"))
            })
            .collect::<Result<_, _>>()?;
        let metadata = Metadata {
            scenario: text_of("scenario")?,
            scenario_digest: text_of("scenario_digest")?,
            library_version: text_of("library_version")?,
            seed: meta.get("seed").and_then(Json::as_u64),
            extra,
        };
        let columns = doc
            .get("columns")
            .and_then(Json::as_array)
            .ok_or_else(|| bad("columns"))?
            .iter()
            .map(|c| {
                let name = c
                    .get("name")
                    .and_then(Json::as_str)
                    .ok_or_else(|| bad("columns.name"))?;
                let kind = c
                    .get("type")
                    .and_then(Json::as_str)
                    .and_then(ColumnType::parse)
                    .ok_or_else(|| bad("columns.type"))?;
                Ok(Column {
                    name: name.to_owned(),
                    kind,
                })
            })
            .collect::<Result<Vec<_>, ScenarioError>>()?;
        let rows = doc
            .get("rows")
            .and_then(Json::as_array)
            .ok_or_else(|| bad("rows"))?
            .iter()
            .map(|r| {
                let cells = r
                    .as_array()
                    .filter(|a| a.len() == columns.len())
                    .ok_or_else(|| bad("rows"))?;
                cells
                    .iter()
                    .zip(&columns)
                    .map(|(v, c)| Cell::from_json(v, c.kind).ok_or_else(|| bad(&c.name)))
                    .collect()
            })
            .collect::<Result<Vec<_>, ScenarioError>>()?;
        Ok(ResultTable {
            columns,
            rows,
            metadata,
        })
    }

    pub fn render(&self, format: Format) -> Result<String, ScenarioError> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(self.to_json()),
        }
    }
}

/// Writes `table` to `path`, or to stdout when `path` is `None`.
pub fn emit(table: &ResultTable, format: Format, path: Option<&Path>) -> Result<(), ScenarioError> {
    let text = table.render(format)?;
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResultTable {
        let mut t = ResultTable::new(&[
            ("tau", ColumnType::Real),
            ("ok", ColumnType::Bool),
            ("n", ColumnType::Int),
            ("label", ColumnType::Text),
        ]);
        t.push(vec![0.1.into(), true.into(), 3i64.into(), "a,b".into()]);
        t.push(vec![
            (1.0f64 / 3.0).into(),
            false.into(),
            (-2i64).into(),
            "\"q\"".into(),
        ]);
        t.push(vec![
            f64::INFINITY.into(),
            true.into(),
            0i64.into(),
            "".into(),
        ]);
        t.metadata
            .extra
            .insert("crossover_tau".into(), "0.1".into());
        t.finish("demo", "00ff", Some(7))
    }

    #[test]
    fn empty_table_is_header_only_csv() {
        let t = ResultTable::new(&[("tau", ColumnType::Real), ("bound", ColumnType::Real)]);
        assert_eq!(t.to_csv().unwrap(), "tau,bound\n");
    }

    #[test]
    fn csv_uses_shortest_round_trip_reals() {
        let csv = sample().to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "tau,ok,n,label,scenario_digest");
        assert_eq!(lines.next().unwrap(), "0.1,true,3,\"a,b\",00ff");
        assert!(lines
            .next()
            .unwrap()
            .starts_with("0.3333333333333333,false,-2,"));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn json_round_trip() {
        let t = sample();
        assert_eq!(ResultTable::from_json(&t.to_json()).unwrap(), t);
    }

    #[test]
    fn select_keeps_order() {
        let t = sample().select(&["n", "tau"]).unwrap();
        assert_eq!(t.columns[0].name, "n");
        assert_eq!(t.rows[0][1], Cell::Real(0.1));
        assert!(sample().select(&["missing"]).is_none());
    }

    #[test]
    fn digest_column_is_added_once() {
        let t = sample().finish("demo", "00ff", None);
        assert_eq!(
            t.columns
                .iter()
                .filter(|c| c.name == "scenario_digest")
                .count(),
            1
        );
    }
}
