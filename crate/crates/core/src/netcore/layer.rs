use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::CorrelationMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LayerKind {
    ReturnCorrelation,
    Trade,
    Fdi,
    Other(String),
}

impl LayerKind {
    /// Short tag used in file headers and JSON keys.
    pub fn tag(&self) -> String {
        match self {
            LayerKind::ReturnCorrelation => "return".into(),
            LayerKind::Trade => "trade".into(),
            LayerKind::Fdi => "fdi".into(),
            LayerKind::Other(t) => t.clone(),
        }
    }

    fn is_flow(&self) -> bool {
        !matches!(self, LayerKind::ReturnCorrelation)
    }
}

impl fmt::Display for LayerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

/// A square weighted layer over a named node set.
///
/// Flow layers (trade, FDI, other) must be nonnegative and are symmetrized
/// as `(W + Wᵀ)/2` on construction; correlation layers must already be
/// symmetric with unit diagonal and entries in [−1, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerMatrix {
    entities: Vec<String>,
    kind: LayerKind,
    weights: Vec<Vec<f64>>,
}

impl LayerMatrix {
    pub fn new(entities: Vec<String>, kind: LayerKind, weights: Vec<Vec<f64>>) -> Result<Self> {
        let n = entities.len();
        if weights.len() != n || weights.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput(format!(
                "{kind} layer: weight matrix is not {n}×{n}"
            )));
        }
        if weights.iter().flatten().any(|w| !w.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "{kind} layer: non-finite weight"
            )));
        }
        let mut sorted = entities.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput(format!(
                "{kind} layer: duplicate entity"
            )));
        }
        let weights = if kind.is_flow() {
            if let Some(w) = weights.iter().flatten().find(|w| **w < 0.0) {
                return Err(Error::InvalidInput(format!(
                    "{kind} layer: negative flow {w}"
                )));
            }
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| 0.5 * (weights[i][j] + weights[j][i]))
                        .collect()
                })
                .collect()
        } else {
            CorrelationMatrix::new(entities.clone(), weights)?
                .rho()
                .to_vec()
        };
        Ok(Self {
            entities,
            kind,
            weights,
        })
    }

    pub fn from_correlation(rho: &CorrelationMatrix) -> Self {
        Self {
            entities: rho.entities().to_vec(),
            kind: LayerKind::ReturnCorrelation,
            weights: rho.rho().to_vec(),
        }
    }

    pub fn entities(&self) -> &[String] {
        &self.entities
    }

    pub fn kind(&self) -> &LayerKind {
        &self.kind
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn index_of(&self, entity: &str) -> Option<usize> {
        self.entities.iter().position(|e| e == entity)
    }

    /// Same layer with weights multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.entities.clone(),
            self.kind.clone(),
            self.weights
                .iter()
                .map(|r| r.iter().map(|w| w * factor).collect())
                .collect(),
        )
    }

    /// Reorder nodes so that node `k` of the result is `order[k]`.
    pub fn reindexed(&self, order: &[String]) -> Result<Self> {
        let idx: Vec<usize> = order
            .iter()
            .map(|e| {
                self.index_of(e)
                    .ok_or_else(|| Error::UnknownEntity(e.clone()))
            })
            .collect::<Result<_>>()?;
        if idx.len() != self.len() {
            return Err(Error::InvalidInput("reindex order has wrong length".into()));
        }
        Ok(Self {
            entities: order.to_vec(),
            kind: self.kind.clone(),
            weights: idx
                .iter()
                .map(|&i| idx.iter().map(|&j| self.weights[i][j]).collect())
                .collect(),
        })
    }
}

/// Correlation distances `d = sqrt(2(1 − ρ))`, all in [0, 2].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    entities: Vec<String>,
    d: Vec<Vec<f64>>,
}

impl DistanceMatrix {
    pub fn new(entities: Vec<String>, d: Vec<Vec<f64>>) -> Result<Self> {
        let n = entities.len();
        if d.len() != n || d.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("distance matrix is not N×N".into()));
        }
        for i in 0..n {
            if d[i][i] != 0.0 {
                return Err(Error::InvalidInput(format!("d[{i}][{i}] != 0")));
            }
            for j in 0..n {
                let v = d[i][j];
                if !(0.0..=2.0).contains(&v) || v != d[j][i] {
                    return Err(Error::InvalidInput(format!(
                        "d[{i}][{j}] = {v} is not a symmetric distance in [0, 2]"
                    )));
                }
            }
        }
        Ok(Self { entities, d })
    }

    pub fn entities(&self) -> &[String] {
        &self.entities
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i][j]
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.d
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }
}

pub fn correlation_distance(rho: f64) -> f64 {
    (2.0 * (1.0 - rho)).max(0.0).sqrt()
}

pub fn distance_from_correlation(rho: &CorrelationMatrix) -> DistanceMatrix {
    let n = rho.entities().len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = correlation_distance(rho.get(i, j));
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    DistanceMatrix {
        entities: rho.entities().to_vec(),
        d,
    }
}
