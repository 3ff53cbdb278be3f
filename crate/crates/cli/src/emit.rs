//! Writing reports to disk and the long-format heatmap data.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use econet_core::econometrics::table::{fmt_sig3, var_text};
use econet_core::econometrics::{stars, VarResult};
use econet_core::netcore::export::{tree_dot, tree_edge_csv};
use econet_core::netcore::LayerKind;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::ingest::MISSING;
use crate::pipeline::{variable, AnalysisReport, Provenance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Dot,
    Txt,
}

/// Which kinds of file a run writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Formats {
    pub csv: bool,
    pub json: bool,
    pub dot: bool,
    pub txt: bool,
    pub edge_lists: bool,
}

impl Formats {
    pub fn all() -> Self {
        Self {
            csv: true,
            json: true,
            dot: true,
            txt: true,
            edge_lists: true,
        }
    }

    pub fn only(f: Format) -> Self {
        Self {
            csv: f == Format::Csv,
            json: f == Format::Json,
            dot: f == Format::Dot,
            txt: f == Format::Txt,
            edge_lists: f == Format::Csv,
        }
    }
}

/// Creates `dir` and writes files into it, remembering what was written.
pub struct OutDir {
    dir: PathBuf,
    header: String,
    pub written: Vec<PathBuf>,
}

impl OutDir {
    pub fn create(dir: &Path, provenance: &Provenance) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            header: provenance.line(),
            written: Vec::new(),
        })
    }

    fn raw(&mut self, name: &str, body: &str) -> Result<()> {
        let path = self.dir.join(name);
        let mut text = body.to_string();
        if !text.ends_with('\n') {
            text.push('\n');
        }
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    /// CSV with a `#` provenance comment line.
    pub fn csv(&mut self, name: &str, body: &str) -> Result<()> {
        let text = format!("# {}\n{body}", self.header);
        self.raw(name, &text)
    }

    pub fn txt(&mut self, name: &str, body: &str) -> Result<()> {
        let text = format!("# {}\n\n{body}", self.header);
        self.raw(name, &text)
    }

    pub fn dot(&mut self, name: &str, body: &str) -> Result<()> {
        let text = format!("// {}\n{body}", self.header);
        self.raw(name, &text)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let text = serde_json::to_string_pretty(value).expect("report serializes");
        self.raw(name, &text)
    }
}

pub fn var_csv(v: &VarResult) -> String {
    let mut out = String::from("equation,variable,coef,se,t,p,stars,n\n");
    for (name, eq) in v.names.iter().zip(&v.equations) {
        for j in 0..eq.names.len() {
            let _ = writeln!(
                out,
                "{name},{},{},{},{},{},{},{}",
                eq.names[j],
                eq.beta[j],
                eq.se[j],
                eq.t[j],
                eq.p[j],
                stars(eq.p[j]),
                eq.n
            );
        }
    }
    for g in &v.granger {
        let _ = writeln!(
            out,
            "granger,{}->{},{},,,{},{},{}",
            g.cause,
            g.effect,
            g.f,
            g.p,
            stars(g.p),
            v.n
        );
    }
    out
}

pub fn centrality_text(r: &AnalysisReport) -> String {
    let mut out = String::new();
    for y in &r.yearly {
        let c = &y.network.centrality;
        let _ = writeln!(
            out,
            "Eigenvector centrality {} ({:?})",
            y.network.year, c.normalization
        );
        let _ = write!(out, "{:8}", "entity");
        for col in &c.columns {
            let _ = write!(out, "{:>12}", format!("evc_{}", col.kind.tag()));
        }
        let _ = writeln!(out, "{:>8}", "band");
        for (i, e) in c.entities.iter().enumerate() {
            let _ = write!(out, "{e:8}");
            for col in &c.columns {
                let _ = write!(out, "{:>12}", fmt_sig3(col.values[i]));
            }
            let _ = writeln!(out, "{:>8}", y.network.bands[i].to_string());
        }
        out.push('\n');
    }
    out
}

pub fn report_text(r: &AnalysisReport) -> String {
    let mut out = String::new();
    for y in &r.yearly {
        out.push_str(&y.cross_section.to_text());
        out.push('\n');
    }
    if let Some(p) = &r.panel {
        out.push_str(&p.table.to_text());
        let _ = writeln!(out, "{}\n", p.hausman_line);
    }
    for t in &r.iv {
        out.push_str(&t.to_text());
        for (k, m) in t.models.iter().enumerate() {
            for w in &m.warnings {
                let _ = writeln!(out, "({}) {w}", k + 1);
            }
        }
        out.push('\n');
    }
    for v in &r.var {
        out.push_str(&var_text(&v.title, &v.result));
        out.push('\n');
    }
    out.push_str(&centrality_text(r));
    for y in &r.yearly {
        let _ = writeln!(
            out,
            "Minimum spanning tree {} (total {:.6})",
            y.network.year,
            y.network.mst.total_weight()
        );
        out.push_str(&tree_edge_csv(&y.network.mst));
        out.push('\n');
    }
    for n in &r.notes {
        let _ = writeln!(out, "note: {n}");
    }
    out
}

/// Write every enabled artifact of a full report into `dir`.
pub fn write_report(r: &AnalysisReport, dir: &Path, f: Formats) -> Result<Vec<PathBuf>> {
    let mut out = OutDir::create(dir, &r.provenance)?;
    out.json("provenance.json", &r.provenance)?;
    if f.json {
        out.json("report.json", r)?;
    }
    if f.txt {
        out.txt("report.txt", &report_text(r))?;
    }
    for y in &r.yearly {
        let yr = y.network.year;
        if f.csv {
            out.csv(
                &format!("centrality_{yr}.csv"),
                &y.network.centrality.to_csv(),
            )?;
            out.csv(
                &format!("cross_section_{yr}.csv"),
                &y.cross_section.to_csv(),
            )?;
            for p in &y.network.pairs {
                out.csv(&format!("pairs_{yr}_{}.csv", p.origin), &p.to_csv())?;
            }
        }
        if f.edge_lists {
            out.csv(&format!("mst_{yr}.csv"), &tree_edge_csv(&y.network.mst))?;
        }
        if f.dot {
            out.dot(
                &format!("mst_{yr}.dot"),
                &tree_dot(&y.network.mst, &format!("mst_{yr}"), Some(&y.network.bands)),
            )?;
        }
    }
    if f.csv {
        if let Some(p) = &r.panel {
            out.csv("panel.csv", &p.table.to_csv())?;
        }
        for (t, name) in r.iv.iter().zip(["iv_2sls.csv", "iv_liml.csv"]) {
            out.csv(name, &t.to_csv())?;
        }
        for v in &r.var {
            out.csv(&format!("var_{}.csv", v.entity), &var_csv(&v.result))?;
        }
        let h = emit_heatmap_data(std::slice::from_ref(r)).map_err(|source| CliError::Numeric {
            stage: "heatmap".into(),
            source,
        })?;
        out.csv("heatmap.csv", &h.csv)?;
    }
    Ok(out.written)
}

pub const HEATMAP_VARIABLES: [(&str, &str); 3] = [
    ("gdp_per_capita", "gdpcap"),
    ("eci", "eci"),
    ("evc_return", "evc_return"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapData {
    pub csv: String,
    pub rows: usize,
    pub missing: usize,
}

/// Long `entity,year,variable,value` rows for GDP per capita, ECI and
/// return-layer EVC; absent values are written as `NA`.
pub fn emit_heatmap_data(reports: &[AnalysisReport]) -> econet_core::Result<HeatmapData> {
    let mut csv = String::from("entity,year,variable,value\n");
    let (mut rows, mut missing) = (0, 0);
    let reference = reports
        .first()
        .map(|r| r.entities.clone())
        .unwrap_or_default();
    for r in reports {
        for y in &r.yearly {
            let ents = &y.network.entities;
            if ents != &reference {
                let mut diff: Vec<String> = ents
                    .iter()
                    .filter(|e| !reference.contains(e))
                    .chain(reference.iter().filter(|e| !ents.contains(e)))
                    .cloned()
                    .collect();
                diff.sort();
                return Err(econet_core::Error::EntityMismatch(diff));
            }
            let cols: Vec<Option<Vec<Option<f64>>>> = HEATMAP_VARIABLES
                .iter()
                .map(|(_, source)| variable(&y.network.centrality, source))
                .collect();
            for (i, e) in ents.iter().enumerate() {
                for ((label, _), col) in HEATMAP_VARIABLES.iter().zip(&cols) {
                    let v = col.as_ref().and_then(|c| c[i]);
                    let cell = match v {
                        Some(x) => x.to_string(),
                        None => {
                            missing += 1;
                            MISSING.to_string()
                        }
                    };
                    let _ = writeln!(csv, "{e},{},{label},{cell}", y.network.year);
                    rows += 1;
                }
            }
        }
    }
    if missing > 0 {
        log::info!("heatmap: {missing} of {rows} values missing");
    }
    Ok(HeatmapData { csv, rows, missing })
}

/// Column of the return layer, for callers that only need it.
pub fn return_evc(r: &AnalysisReport, year_index: usize) -> Option<&[f64]> {
    r.yearly
        .get(year_index)?
        .network
        .centrality
        .column(&LayerKind::ReturnCorrelation)
}
