//! CSV ingestion and export.
//!
//! * prices: wide, `date,<entity>,...`; one row per ISO date.
//! * trade / FDI flows: long, `year,src,dst,value`; absent pairs are zero.
//! * covariates: long, `entity,year,<variable>,...`.
//!
//! Empty cells and `NA` are missing. Lines starting with `#` are comments.
//! Floats are written in shortest round-trip form so re-reading an export
//! reproduces the values bit for bit.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;
use std::path::{Path, PathBuf};

use econet_core::netcore::{LayerKind, LayerMatrix};
use econet_core::timeseries::{align_panel, PricePanel, RawSeries};

use crate::error::{CliError, ParseError, Result};

pub const MISSING: &str = "NA";

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn parse_error(file: &Path, line: u64, column: usize, message: impl Into<String>) -> CliError {
    CliError::Parse(ParseError {
        file: file.to_path_buf(),
        line,
        column,
        message: message.into(),
    })
}

fn csv_error(file: &Path, e: csv::Error) -> CliError {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    parse_error(file, line, 0, e.to_string())
}

/// `None` for an empty or `NA` cell.
fn parse_cell(file: &Path, line: u64, column: usize, cell: &str) -> Result<Option<f64>> {
    if cell.is_empty() || cell == MISSING {
        return Ok(None);
    }
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(parse_error(
            file,
            line,
            column,
            format!("non-numeric value `{cell}`"),
        )),
    }
}

fn parse_year(file: &Path, line: u64, column: usize, cell: &str) -> Result<i32> {
    cell.parse()
        .map_err(|_| parse_error(file, line, column, format!("invalid year `{cell}`")))
}

fn header(file: &Path, r: &mut csv::Reader<std::fs::File>) -> Result<Vec<String>> {
    let h: Vec<String> = r
        .headers()
        .map_err(|e| csv_error(file, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut seen = BTreeSet::new();
    for (k, name) in h.iter().enumerate() {
        if !seen.insert(name) {
            return Err(parse_error(
                file,
                1,
                k + 1,
                format!("duplicate column `{name}`"),
            ));
        }
    }
    Ok(h)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriceTable {
    pub file: PathBuf,
    pub entities: Vec<String>,
    pub dates: Vec<String>,
    /// `values[t][i]` for date `t` and entity `i`.
    pub values: Vec<Vec<Option<f64>>>,
}

impl PriceTable {
    /// Listwise-aligned prices for dates starting with `year`.
    pub fn year_panel(&self, year: i32) -> econet_core::Result<PricePanel> {
        let prefix = year.to_string();
        let raw: Vec<RawSeries> = self
            .entities
            .iter()
            .enumerate()
            .map(|(i, e)| RawSeries {
                entity: e.clone(),
                observations: self
                    .dates
                    .iter()
                    .zip(&self.values)
                    .filter(|(d, _)| d.starts_with(&prefix))
                    .filter_map(|(d, row)| row[i].map(|v| (d.clone(), v)))
                    .collect(),
            })
            .collect();
        align_panel(&raw)
    }

    /// All dates, listwise aligned.
    pub fn panel(&self) -> econet_core::Result<PricePanel> {
        let raw: Vec<RawSeries> = self
            .entities
            .iter()
            .enumerate()
            .map(|(i, e)| RawSeries {
                entity: e.clone(),
                observations: self
                    .dates
                    .iter()
                    .zip(&self.values)
                    .filter_map(|(d, row)| row[i].map(|v| (d.clone(), v)))
                    .collect(),
            })
            .collect();
        align_panel(&raw)
    }
}

pub fn read_prices(path: &Path) -> Result<PriceTable> {
    let mut r = reader(path)?;
    let h = header(path, &mut r)?;
    if h.len() < 2 || h[0] != "date" {
        return Err(parse_error(
            path,
            1,
            1,
            "expected header `date,<entity>,...`",
        ));
    }
    let entities = h[1..].to_vec();
    let mut dates = Vec::new();
    let mut values = Vec::new();
    let mut seen = BTreeSet::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let date = rec.get(0).unwrap_or("").to_string();
        if date.is_empty() {
            return Err(parse_error(path, line, 1, "missing date"));
        }
        if !seen.insert(date.clone()) {
            return Err(parse_error(
                path,
                line,
                1,
                format!("duplicate date `{date}`"),
            ));
        }
        let row = (1..h.len())
            .map(|k| parse_cell(path, line, k + 1, rec.get(k).unwrap_or("")))
            .collect::<Result<Vec<_>>>()?;
        dates.push(date);
        values.push(row);
    }
    let mut order: Vec<usize> = (0..dates.len()).collect();
    order.sort_by(|&a, &b| dates[a].cmp(&dates[b]));
    Ok(PriceTable {
        file: path.to_path_buf(),
        entities,
        dates: order.iter().map(|&t| dates[t].clone()).collect(),
        values: order.iter().map(|&t| values[t].clone()).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FlowTable {
    pub by_year: BTreeMap<i32, BTreeMap<(String, String), f64>>,
}

impl FlowTable {
    /// Flow layer for one year over the sorted set of entities it names.
    pub fn layer(&self, year: i32, kind: LayerKind) -> econet_core::Result<LayerMatrix> {
        let flows = self.by_year.get(&year).ok_or_else(|| {
            econet_core::Error::InvalidInput(format!("no {kind} flows for {year}"))
        })?;
        let entities: Vec<String> = flows
            .keys()
            .flat_map(|(a, b)| [a.clone(), b.clone()])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index: BTreeMap<&String, usize> =
            entities.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let n = entities.len();
        let mut w = vec![vec![0.0; n]; n];
        for ((a, b), v) in flows {
            if a != b {
                w[index[a]][index[b]] = *v;
            }
        }
        LayerMatrix::new(entities, kind, w)
    }
}

pub fn read_flows(path: &Path) -> Result<FlowTable> {
    let mut r = reader(path)?;
    let h = header(path, &mut r)?;
    if h != ["year", "src", "dst", "value"] {
        return Err(parse_error(
            path,
            1,
            1,
            "expected header `year,src,dst,value`",
        ));
    }
    let mut table = FlowTable::default();
    for rec in r.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let year = parse_year(path, line, 1, &rec[0])?;
        let (src, dst) = (rec[1].to_string(), rec[2].to_string());
        if src.is_empty() || dst.is_empty() {
            return Err(parse_error(
                path,
                line,
                if src.is_empty() { 2 } else { 3 },
                "empty entity",
            ));
        }
        let value = parse_cell(path, line, 4, &rec[3])?.unwrap_or(0.0);
        if value < 0.0 {
            return Err(parse_error(
                path,
                line,
                4,
                format!("negative flow `{}`", &rec[3]),
            ));
        }
        if table
            .by_year
            .entry(year)
            .or_default()
            .insert((src.clone(), dst.clone()), value)
            .is_some()
        {
            return Err(parse_error(
                path,
                line,
                1,
                format!("duplicate flow {src} -> {dst} in {year}"),
            ));
        }
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CovariateTable {
    pub names: Vec<String>,
    pub values: BTreeMap<(i32, String), Vec<Option<f64>>>,
}

impl CovariateTable {
    pub fn get(&self, year: i32, entity: &str, name: &str) -> Option<f64> {
        let k = self.names.iter().position(|n| n == name)?;
        self.values.get(&(year, entity.to_string()))?[k]
    }

    pub fn has(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }
}

pub fn read_covariates(path: &Path) -> Result<CovariateTable> {
    let mut r = reader(path)?;
    let h = header(path, &mut r)?;
    if h.len() < 2 || h[0] != "entity" || h[1] != "year" {
        return Err(parse_error(
            path,
            1,
            1,
            "expected header `entity,year,<variable>,...`",
        ));
    }
    let mut table = CovariateTable {
        names: h[2..].to_vec(),
        values: BTreeMap::new(),
    };
    for rec in r.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let entity = rec[0].to_string();
        let year = parse_year(path, line, 2, &rec[1])?;
        let row = (2..h.len())
            .map(|k| parse_cell(path, line, k + 1, rec.get(k).unwrap_or("")))
            .collect::<Result<Vec<_>>>()?;
        if table.values.insert((year, entity.clone()), row).is_some() {
            return Err(parse_error(
                path,
                line,
                1,
                format!("duplicate row {entity} {year}"),
            ));
        }
    }
    Ok(table)
}

/// Wide prices over the concatenated periods of `panels` (same entities).
pub fn prices_csv(panels: &[&PricePanel]) -> String {
    let mut out = String::from("date");
    let Some(first) = panels.first() else {
        out.push('\n');
        return out;
    };
    for e in first.entities() {
        let _ = write!(out, ",{e}");
    }
    out.push('\n');
    for p in panels {
        assert_eq!(
            p.entities(),
            first.entities(),
            "price panels share entities"
        );
        for (t, d) in p.periods().iter().enumerate() {
            out.push_str(d);
            for row in p.prices() {
                let _ = write!(out, ",{}", row[t]);
            }
            out.push('\n');
        }
    }
    out
}

/// Long edge list of every ordered off-diagonal pair.
pub fn flows_csv(layers: &[(i32, &LayerMatrix)]) -> String {
    let mut out = String::from("year,src,dst,value\n");
    for (year, layer) in layers {
        let e = layer.entities();
        for i in 0..e.len() {
            for j in 0..e.len() {
                if i != j {
                    let _ = writeln!(out, "{year},{},{},{}", e[i], e[j], layer.weights()[i][j]);
                }
            }
        }
    }
    out
}

pub fn covariates_csv(table: &CovariateTable) -> String {
    let mut out = String::from("entity,year");
    for n in &table.names {
        let _ = write!(out, ",{n}");
    }
    out.push('\n');
    let mut keys: Vec<&(i32, String)> = table.values.keys().collect();
    keys.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    for key in keys {
        let _ = write!(out, "{},{}", key.1, key.0);
        for v in &table.values[key] {
            match v {
                Some(x) => {
                    let _ = write!(out, ",{x}");
                }
                None => {
                    let _ = write!(out, ",{MISSING}");
                }
            }
        }
        out.push('\n');
    }
    out
}
