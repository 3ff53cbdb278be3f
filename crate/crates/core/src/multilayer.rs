//! Multiplex assembly over a shared country set and cross-layer tables.
//!
//! Every multiplex uses the lexicographic entity order. Pair tables report
//! trade as `log10` of the symmetrized flow `(T_ij + T_ji)/2`; zero flows
//! are kept as missing rows rather than dropped.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::econometrics::{ols, DesignMatrix, RegressionResult};
use crate::error::{Error, Result};
use crate::netcore::{eigenvector_centrality, LayerKind, LayerMatrix, Normalization};

pub const MISSING: &str = "NA";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplexNetwork {
    entities: Vec<String>,
    layers: Vec<LayerMatrix>,
    year: String,
}

impl MultiplexNetwork {
    pub fn entities(&self) -> &[String] {
        &self.entities
    }

    pub fn layers(&self) -> &[LayerMatrix] {
        &self.layers
    }

    pub fn year(&self) -> &str {
        &self.year
    }

    pub fn layer(&self, kind: &LayerKind) -> Option<&LayerMatrix> {
        self.layers.iter().find(|l| l.kind() == kind)
    }
}

pub fn assemble(
    corr: &LayerMatrix,
    trade: &LayerMatrix,
    fdi: &LayerMatrix,
    year: impl Into<String>,
) -> Result<MultiplexNetwork> {
    assemble_layers(&[corr, trade, fdi], year)
}

/// Reindex at least two layers over the same entity set to sorted order.
pub fn assemble_layers(
    layers: &[&LayerMatrix],
    year: impl Into<String>,
) -> Result<MultiplexNetwork> {
    if layers.len() < 2 {
        return Err(Error::InvalidInput(
            "a multiplex needs at least two layers".into(),
        ));
    }
    let sets: Vec<BTreeSet<&String>> = layers
        .iter()
        .map(|l| l.entities().iter().collect())
        .collect();
    let union: BTreeSet<&String> = sets.iter().flatten().copied().collect();
    let common: BTreeSet<&String> = union
        .iter()
        .copied()
        .filter(|e| sets.iter().all(|s| s.contains(e)))
        .collect();
    if common.len() != union.len() {
        return Err(Error::EntityMismatch(
            union.difference(&common).map(|s| s.to_string()).collect(),
        ));
    }
    let entities: Vec<String> = union.into_iter().cloned().collect();
    let layers = layers
        .iter()
        .map(|l| l.reindexed(&entities))
        .collect::<Result<Vec<_>>>()?;
    Ok(MultiplexNetwork {
        entities,
        layers,
        year: year.into(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityColumn {
    pub kind: LayerKind,
    pub values: Vec<f64>,
    pub eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossLayerTable {
    pub year: String,
    pub entities: Vec<String>,
    pub normalization: Normalization,
    pub columns: Vec<CentralityColumn>,
    /// Optional per-entity covariates (ECI, GDP per capita, ...); `None` is missing.
    pub covariates: BTreeMap<String, Vec<Option<f64>>>,
}

impl CrossLayerTable {
    pub fn column(&self, kind: &LayerKind) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|c| &c.kind == kind)
            .map(|c| c.values.as_slice())
    }

    pub fn with_covariate(
        mut self,
        name: impl Into<String>,
        values: Vec<Option<f64>>,
    ) -> Result<Self> {
        let name = name.into();
        if values.len() != self.entities.len() {
            return Err(Error::InvalidInput(format!(
                "covariate `{name}` has {} values for {} entities",
                values.len(),
                self.entities.len()
            )));
        }
        self.covariates.insert(name, values);
        Ok(self)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("year,entity");
        for c in &self.columns {
            let _ = write!(out, ",evc_{}", c.kind.tag());
        }
        for name in self.covariates.keys() {
            let _ = write!(out, ",{name}");
        }
        out.push('\n');
        for (i, e) in self.entities.iter().enumerate() {
            let _ = write!(out, "{},{e}", self.year);
            for c in &self.columns {
                let _ = write!(out, ",{}", c.values[i]);
            }
            for v in self.covariates.values() {
                match v[i] {
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
}

/// One eigenvector-centrality column per layer, in layer order.
pub fn centrality_table(
    m: &MultiplexNetwork,
    normalization: Normalization,
) -> Result<CrossLayerTable> {
    let columns = m
        .layers
        .iter()
        .map(|layer| {
            eigenvector_centrality(layer, normalization)
                .map(|c| CentralityColumn {
                    kind: layer.kind().clone(),
                    values: c.values,
                    eigenvalue: c.eigenvalue,
                })
                .map_err(|e| e.in_layer(layer.kind().tag()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CrossLayerTable {
        year: m.year.clone(),
        entities: m.entities.clone(),
        normalization,
        columns,
        covariates: BTreeMap::new(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRow {
    pub partner: String,
    pub correlation: f64,
    /// `log10` of the symmetrized flow; `None` when the flow is zero.
    pub log10_flow: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairTable {
    pub year: String,
    pub origin: String,
    pub rows: Vec<PairRow>,
}

impl PairTable {
    pub fn missing(&self) -> usize {
        self.rows.iter().filter(|r| r.log10_flow.is_none()).count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("year,origin,partner,correlation,log10_trade\n");
        for r in &self.rows {
            let flow = r
                .log10_flow
                .map(|v| v.to_string())
                .unwrap_or_else(|| MISSING.into());
            let _ = writeln!(
                out,
                "{},{},{},{},{flow}",
                self.year, self.origin, r.partner, r.correlation
            );
        }
        out
    }
}

/// Correlation with `origin` and log10 trade flow for every other entity.
pub fn pair_table(m: &MultiplexNetwork, origin: &str) -> Result<PairTable> {
    let o = m
        .entities
        .iter()
        .position(|e| e == origin)
        .ok_or_else(|| Error::UnknownEntity(origin.to_string()))?;
    let corr = m
        .layer(&LayerKind::ReturnCorrelation)
        .ok_or_else(|| Error::InvalidInput("multiplex has no return-correlation layer".into()))?;
    let trade = m
        .layer(&LayerKind::Trade)
        .ok_or_else(|| Error::InvalidInput("multiplex has no trade layer".into()))?;
    let rows = (0..m.entities.len())
        .filter(|&j| j != o)
        .map(|j| {
            let flow = trade.weights()[o][j];
            PairRow {
                partner: m.entities[j].clone(),
                correlation: corr.weights()[o][j],
                log10_flow: (flow > 0.0).then(|| flow.log10()),
            }
        })
        .collect();
    Ok(PairTable {
        year: m.year.clone(),
        origin: origin.to_string(),
        rows,
    })
}

/// OLS of log10 flow on correlation over the non-missing rows. Returns the
/// fit and the number of rows excluded as missing.
pub fn pair_regression(t: &PairTable) -> Result<(RegressionResult, usize)> {
    let (x, y): (Vec<f64>, Vec<f64>) = t
        .rows
        .iter()
        .filter_map(|r| r.log10_flow.map(|f| (r.correlation, f)))
        .unzip();
    let design = DesignMatrix::from_columns(&[("correlation", &x)], true)?;
    Ok((ols(&y, &design)?, t.missing()))
}
