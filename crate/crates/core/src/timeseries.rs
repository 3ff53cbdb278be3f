//! Price panels, log returns, z-scores and Pearson correlation matrices.
//!
//! Alignment across entities is listwise: only periods present in every
//! series survive, so every correlation entry sees the same sample. All
//! dispersion statistics use the n−1 divisor.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Clamping a correlation by more than this is treated as a bug, not rounding.
const CLAMP_SLACK: f64 = 1e-9;

/// Price levels for N entities over T periods, row-major (`prices[i][t]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PricePanel {
    entities: Vec<String>,
    periods: Vec<String>,
    prices: Vec<Vec<f64>>,
}

impl PricePanel {
    pub fn new(entities: Vec<String>, periods: Vec<String>, prices: Vec<Vec<f64>>) -> Result<Self> {
        check_unique(&entities, "entity")?;
        if periods.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(
                "periods must be strictly increasing".into(),
            ));
        }
        if prices.len() != entities.len() {
            return Err(Error::InvalidInput(format!(
                "{} price rows for {} entities",
                prices.len(),
                entities.len()
            )));
        }
        for (entity, row) in entities.iter().zip(&prices) {
            if row.len() != periods.len() {
                return Err(Error::InvalidInput(format!(
                    "{entity}: {} prices for {} periods",
                    row.len(),
                    periods.len()
                )));
            }
            for (period, &value) in periods.iter().zip(row) {
                if !(value > 0.0) || !value.is_finite() {
                    return Err(Error::NonPositivePrice {
                        entity: entity.clone(),
                        period: period.clone(),
                        value,
                    });
                }
            }
        }
        Ok(Self {
            entities,
            periods,
            prices,
        })
    }

    pub fn entities(&self) -> &[String] {
        &self.entities
    }

    pub fn periods(&self) -> &[String] {
        &self.periods
    }

    pub fn prices(&self) -> &[Vec<f64>] {
        &self.prices
    }

    pub fn n_entities(&self) -> usize {
        self.entities.len()
    }

    pub fn n_periods(&self) -> usize {
        self.periods.len()
    }

    /// Sub-panel holding the periods whose label satisfies `keep`.
    pub fn select_periods(&self, keep: impl Fn(&str) -> bool) -> Result<Self> {
        let idx: Vec<usize> = (0..self.periods.len())
            .filter(|&t| keep(&self.periods[t]))
            .collect();
        Self::new(
            self.entities.clone(),
            idx.iter().map(|&t| self.periods[t].clone()).collect(),
            self.prices
                .iter()
                .map(|row| idx.iter().map(|&t| row[t]).collect())
                .collect(),
        )
    }
}

/// Log returns; period `t` is labelled by the later price of the pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnPanel {
    entities: Vec<String>,
    periods: Vec<String>,
    returns: Vec<Vec<f64>>,
}

impl ReturnPanel {
    pub fn new(
        entities: Vec<String>,
        periods: Vec<String>,
        returns: Vec<Vec<f64>>,
    ) -> Result<Self> {
        check_unique(&entities, "entity")?;
        if returns.len() != entities.len() {
            return Err(Error::InvalidInput("return rows != entities".into()));
        }
        for row in &returns {
            if row.len() != periods.len() {
                return Err(Error::InvalidInput("return columns != periods".into()));
            }
            if row.iter().any(|r| !r.is_finite()) {
                return Err(Error::InvalidInput("non-finite return".into()));
            }
        }
        Ok(Self {
            entities,
            periods,
            returns,
        })
    }

    pub fn entities(&self) -> &[String] {
        &self.entities
    }

    pub fn periods(&self) -> &[String] {
        &self.periods
    }

    pub fn returns(&self) -> &[Vec<f64>] {
        &self.returns
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    entities: Vec<String>,
    rho: Vec<Vec<f64>>,
}

impl CorrelationMatrix {
    /// Validates symmetry (1e−12), range and unit diagonal. The diagonal is
    /// forced to exactly 1.
    pub fn new(entities: Vec<String>, mut rho: Vec<Vec<f64>>) -> Result<Self> {
        check_unique(&entities, "entity")?;
        let n = entities.len();
        if rho.len() != n || rho.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("correlation matrix is not N×N".into()));
        }
        for i in 0..n {
            if (rho[i][i] - 1.0).abs() > CLAMP_SLACK {
                return Err(Error::InvalidInput(format!(
                    "diagonal entry {i} is {}",
                    rho[i][i]
                )));
            }
            rho[i][i] = 1.0;
            for j in 0..n {
                let v = rho[i][j];
                if !v.is_finite() || v.abs() > 1.0 || (v - rho[j][i]).abs() > 1e-12 {
                    return Err(Error::InvalidInput(format!(
                        "entry ({i},{j}) = {v} is not a valid symmetric correlation"
                    )));
                }
            }
        }
        Ok(Self { entities, rho })
    }

    pub fn entities(&self) -> &[String] {
        &self.entities
    }

    pub fn rho(&self) -> &[Vec<f64>] {
        &self.rho
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rho[i][j]
    }
}

fn check_unique(ids: &[String], what: &str) -> Result<()> {
    let mut seen = HashSet::new();
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(Error::InvalidInput(format!("duplicate {what} `{id}`")));
        }
    }
    Ok(())
}

/// One raw input series: `(period, price)` observations for an entity.
#[derive(Debug, Clone)]
pub struct RawSeries {
    pub entity: String,
    pub observations: Vec<(String, f64)>,
}

/// Restrict all series to the periods present in every one of them.
pub fn align_panel(raw: &[RawSeries]) -> Result<PricePanel> {
    if raw.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    let mut maps: Vec<BTreeMap<&str, f64>> = Vec::with_capacity(raw.len());
    for series in raw {
        if series.observations.is_empty() {
            return Err(Error::InvalidInput(format!(
                "series {} is empty",
                series.entity
            )));
        }
        let mut map = BTreeMap::new();
        for (period, price) in &series.observations {
            if !(*price > 0.0) || !price.is_finite() {
                return Err(Error::NonPositivePrice {
                    entity: series.entity.clone(),
                    period: period.clone(),
                    value: *price,
                });
            }
            if map.insert(period.as_str(), *price).is_some() {
                return Err(Error::InvalidInput(format!(
                    "{}: duplicate period {period}",
                    series.entity
                )));
            }
        }
        maps.push(map);
    }
    let mut common: BTreeSet<&str> = maps[0].keys().copied().collect();
    for map in &maps[1..] {
        common.retain(|p| map.contains_key(p));
    }
    if common.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    let periods: Vec<String> = common.iter().map(|p| p.to_string()).collect();
    let prices = maps
        .iter()
        .map(|m| common.iter().map(|p| m[p]).collect())
        .collect();
    PricePanel::new(
        raw.iter().map(|s| s.entity.clone()).collect(),
        periods,
        prices,
    )
}

pub fn log_returns(panel: &PricePanel) -> Result<ReturnPanel> {
    let t = panel.n_periods();
    if t < 2 {
        return Err(Error::TooShort { needed: 2, got: t });
    }
    let returns = panel
        .prices
        .iter()
        .map(|row| row.windows(2).map(|w| (w[1] / w[0]).ln()).collect())
        .collect();
    ReturnPanel::new(panel.entities.clone(), panel.periods[1..].to_vec(), returns)
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample (n−1) standard deviation.
pub fn sample_std(values: &[f64]) -> f64 {
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m).powi(2)).sum();
    (ss / (values.len() as f64 - 1.0)).sqrt()
}

pub fn zscore(values: &[f64]) -> Result<Vec<f64>> {
    if values.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: values.len(),
        });
    }
    let first = values[0];
    if values.iter().all(|&v| v == first) {
        return Err(Error::DegenerateVariance("all values are equal".into()));
    }
    let m = mean(values);
    let s = sample_std(values);
    if !(s > 0.0) {
        return Err(Error::DegenerateVariance("sample std is zero".into()));
    }
    Ok(values.iter().map(|v| (v - m) / s).collect())
}

pub fn pearson_correlation(returns: &ReturnPanel) -> Result<CorrelationMatrix> {
    let obs = returns.periods.len();
    if obs < 3 {
        return Err(Error::TooShort {
            needed: 3,
            got: obs,
        });
    }
    let n = returns.entities.len();
    let mut centered = Vec::with_capacity(n);
    let mut sums = Vec::with_capacity(n);
    for (entity, row) in returns.entities.iter().zip(&returns.returns) {
        let m = mean(row);
        let c: Vec<f64> = row.iter().map(|v| v - m).collect();
        let ss: f64 = c.iter().map(|v| v * v).sum();
        if !(ss > 0.0) || row.iter().all(|&v| v == row[0]) {
            return Err(Error::DegenerateVariance(entity.clone()));
        }
        centered.push(c);
        sums.push(ss);
    }
    let mut rho = vec![vec![0.0; n]; n];
    for i in 0..n {
        rho[i][i] = 1.0;
        for j in (i + 1)..n {
            let dot: f64 = centered[i]
                .iter()
                .zip(&centered[j])
                .map(|(a, b)| a * b)
                .sum();
            // sqrt of the product keeps identical rows at exactly 1.
            let r = dot / (sums[i] * sums[j]).sqrt();
            debug_assert!(r.abs() <= 1.0 + CLAMP_SLACK, "correlation {r} out of range");
            let r = r.clamp(-1.0, 1.0);
            rho[i][j] = r;
            rho[j][i] = r;
        }
    }
    CorrelationMatrix::new(returns.entities.clone(), rho)
}
