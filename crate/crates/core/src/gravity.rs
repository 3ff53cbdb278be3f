//! Synthetic economies built on the gravity equation `T_ij ∝ Y_i·Y_j / d_ij`.
//!
//! Sizes are Pareto draws, positions are uniform in the unit square and every
//! pairwise flow carries multiplicative log-normal noise. Returns follow a
//! one-factor model whose loadings grow with each country's share of trade:
//! `β_i = coupling · s_i / max_j s_j`, with `s_i` the trade strength. That
//! coupling is a modelling device of this crate, not an empirical claim.

use chrono::{Days, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netcore::{eigenvector_centrality, LayerKind, LayerMatrix, Normalization};
use crate::stats;
use crate::timeseries::{PricePanel, ReturnPanel};

pub const RNG_ALGORITHM: &str = "ChaCha8Rng";
pub const MIN_DISTANCE: f64 = 0.05;
pub const MIN_PERIODS: usize = 30;
pub const START_PRICE: f64 = 100.0;
/// Daily return scale applied to the unit-variance factor model.
pub const RETURN_SCALE: f64 = 0.01;
/// Per-year log drift and dispersion of sizes in a multi-year sequence.
pub const SIZE_GROWTH: f64 = 0.02;
pub const SIZE_SHOCK: f64 = 0.05;

/// The 18-country sample first, then the remaining EU members.
const COUNTRY_CODES: [&str; 28] = [
    "AUT", "BEL", "CZE", "DEU", "DNK", "ESP", "FRA", "GBR", "HUN", "IRL", "ITA", "LVA", "NLD",
    "POL", "PRT", "ROU", "SVK", "SWE", "BGR", "CYP", "EST", "FIN", "GRC", "HRV", "LTU", "LUX",
    "MLT", "SVN",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GravityParams {
    pub n_countries: usize,
    pub size_tail_exponent: f64,
    pub coupling: f64,
    pub noise_scale: f64,
    pub fdi_trade_elasticity: f64,
    pub seed: u64,
}

impl Default for GravityParams {
    fn default() -> Self {
        Self {
            n_countries: 18,
            size_tail_exponent: 1.05,
            coupling: 2.0,
            noise_scale: 0.2,
            fdi_trade_elasticity: 1.0,
            seed: 0,
        }
    }
}

impl GravityParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_countries < 4 {
            return Err(Error::InvalidParams(format!(
                "n_countries must be >= 4, got {}",
                self.n_countries
            )));
        }
        if !(self.size_tail_exponent > 1.0) || !self.size_tail_exponent.is_finite() {
            return Err(Error::InvalidParams(format!(
                "size_tail_exponent must be > 1, got {}",
                self.size_tail_exponent
            )));
        }
        if !(self.coupling >= 0.0) || !self.coupling.is_finite() {
            return Err(Error::InvalidParams(format!(
                "coupling must be >= 0, got {}",
                self.coupling
            )));
        }
        if !(self.noise_scale > 0.0) || !self.noise_scale.is_finite() {
            return Err(Error::InvalidParams(format!(
                "noise_scale must be > 0, got {}",
                self.noise_scale
            )));
        }
        if !self.fdi_trade_elasticity.is_finite() {
            return Err(Error::InvalidParams(
                "fdi_trade_elasticity must be finite".into(),
            ));
        }
        Ok(())
    }
}

/// Everything the generator drew or fixed, beyond the observable economy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorTruth {
    pub rng: String,
    pub params: GravityParams,
    pub periods: usize,
    pub min_distance: f64,
    pub return_scale: f64,
    /// Trade strength over its maximum, per country.
    pub intensity: Vec<f64>,
    pub loadings: Vec<f64>,
    pub factor: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticEconomy {
    pub entities: Vec<String>,
    pub sizes: Vec<f64>,
    pub positions: Vec<[f64; 2]>,
    pub distances: Vec<Vec<f64>>,
    pub trade: LayerMatrix,
    pub fdi: LayerMatrix,
    pub prices: PricePanel,
    /// The return draws the prices were cumulated from.
    pub returns: ReturnPanel,
    pub truth: GeneratorTruth,
}

pub fn country_names(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| {
            COUNTRY_CODES
                .get(i)
                .map(|c| c.to_string())
                .unwrap_or_else(|| format!("X{:03}", i + 1))
        })
        .collect()
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Euclidean distances with the floor at [`MIN_DISTANCE`]; zero diagonal.
pub fn pairwise_distances(positions: &[[f64; 2]]) -> Vec<Vec<f64>> {
    let n = positions.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        0.0
                    } else {
                        let dx = positions[i][0] - positions[j][0];
                        let dy = positions[i][1] - positions[j][1];
                        dx.hypot(dy).max(MIN_DISTANCE)
                    }
                })
                .collect()
        })
        .collect()
}

/// `T_ij = Y_i·Y_j / d_ij · exp(ε_ij)` for every ordered pair, then
/// symmetrized. Noise is drawn row-major over `i ≠ j`.
pub fn gravity_flows<R: Rng>(
    sizes: &[f64],
    distances: &[Vec<f64>],
    noise_scale: f64,
    rng: &mut R,
) -> Vec<Vec<f64>> {
    let n = sizes.len();
    let mut t = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let eps: f64 = rng.sample::<f64, _>(StandardNormal) * noise_scale;
                t[i][j] = sizes[i] * sizes[j] / distances[i][j] * eps.exp();
            }
        }
    }
    symmetrize(&t)
}

fn symmetrize(t: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = t.len();
    (0..n)
        .map(|i| (0..n).map(|j| 0.5 * (t[i][j] + t[j][i])).collect())
        .collect()
}

fn date_labels(start: NaiveDate, count: usize) -> Vec<String> {
    (0..count)
        .map(|k| {
            start
                .checked_add_days(Days::new(k as u64))
                .expect("date range")
                .format("%Y-%m-%d")
                .to_string()
        })
        .collect()
}

fn draw_layout(params: &GravityParams, rng: &mut ChaCha8Rng) -> (Vec<[f64; 2]>, Vec<f64>) {
    let n = params.n_countries;
    let positions: Vec<[f64; 2]> = (0..n)
        .map(|_| [rng.random::<f64>(), rng.random::<f64>()])
        .collect();
    let sizes = (0..n)
        .map(|_| (1.0 - rng.random::<f64>()).powf(-1.0 / params.size_tail_exponent))
        .collect();
    (positions, sizes)
}

fn economy_from(
    params: &GravityParams,
    periods: usize,
    start: NaiveDate,
    positions: Vec<[f64; 2]>,
    sizes: Vec<f64>,
    rng: &mut ChaCha8Rng,
) -> Result<SyntheticEconomy> {
    let n = sizes.len();
    let entities = country_names(n);
    let distances = pairwise_distances(&positions);
    let trade_w = gravity_flows(&sizes, &distances, params.noise_scale, rng);
    let mut fdi_w = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let eps = normal(rng) * params.noise_scale;
                fdi_w[i][j] = trade_w[i][j].powf(params.fdi_trade_elasticity) * eps.exp();
            }
        }
    }
    let strength: Vec<f64> = trade_w.iter().map(|row| row.iter().sum()).collect();
    let max_strength = strength.iter().cloned().fold(0.0, f64::max);
    let intensity: Vec<f64> = strength.iter().map(|s| s / max_strength).collect();
    let loadings: Vec<f64> = intensity.iter().map(|s| params.coupling * s).collect();

    let factor: Vec<f64> = (0..periods).map(|_| normal(rng)).collect();
    let mut returns = vec![vec![0.0; periods]; n];
    let mut prices = vec![vec![0.0; periods + 1]; n];
    for i in 0..n {
        prices[i][0] = START_PRICE;
        for t in 0..periods {
            let r = RETURN_SCALE * (loadings[i] * factor[t] + normal(rng));
            returns[i][t] = r;
            prices[i][t + 1] = prices[i][t] * r.exp();
        }
    }
    let labels = date_labels(start, periods + 1);
    Ok(SyntheticEconomy {
        trade: LayerMatrix::new(entities.clone(), LayerKind::Trade, trade_w)?,
        fdi: LayerMatrix::new(entities.clone(), LayerKind::Fdi, fdi_w)?,
        prices: PricePanel::new(entities.clone(), labels.clone(), prices)?,
        returns: ReturnPanel::new(entities.clone(), labels[1..].to_vec(), returns)?,
        entities,
        sizes,
        positions,
        distances,
        truth: GeneratorTruth {
            rng: RNG_ALGORITHM.into(),
            params: params.clone(),
            periods,
            min_distance: MIN_DISTANCE,
            return_scale: RETURN_SCALE,
            intensity,
            loadings,
            factor,
        },
    })
}

fn check_periods(periods: usize) -> Result<()> {
    if periods < MIN_PERIODS {
        return Err(Error::InvalidParams(format!(
            "T_periods must be >= {MIN_PERIODS}, got {periods}"
        )));
    }
    Ok(())
}

/// One economy whose price dates start on 2001-01-01.
pub fn generate(params: &GravityParams, periods: usize) -> Result<SyntheticEconomy> {
    params.validate()?;
    check_periods(periods)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let (positions, sizes) = draw_layout(params, &mut rng);
    let start = NaiveDate::from_ymd_opt(2001, 1, 1).expect("valid date");
    economy_from(params, periods, start, positions, sizes, &mut rng)
}

/// One economy per year on fixed positions. Sizes drift as
/// `Y ← Y·exp(g + σ·z)` between years; each year's prices restart at 100 on
/// January 1st, so `periods` is capped at 364. The first year equals
/// `generate` with the same seed when it starts in 2001.
pub fn generate_sequence(
    params: &GravityParams,
    periods: usize,
    years: &[i32],
) -> Result<Vec<SyntheticEconomy>> {
    params.validate()?;
    check_periods(periods)?;
    if periods > 364 {
        return Err(Error::InvalidParams(format!(
            "a yearly block holds at most 364 periods, got {periods}"
        )));
    }
    if years.is_empty() {
        return Err(Error::InvalidParams("no years requested".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let (positions, mut sizes) = draw_layout(params, &mut rng);
    let mut out = Vec::with_capacity(years.len());
    for (k, &year) in years.iter().enumerate() {
        if k > 0 {
            for y in sizes.iter_mut() {
                *y *= (SIZE_GROWTH + SIZE_SHOCK * normal(&mut rng)).exp();
            }
        }
        let start = NaiveDate::from_ymd_opt(year, 1, 1)
            .ok_or_else(|| Error::InvalidParams(format!("invalid year {year}")))?;
        out.push(economy_from(
            params,
            periods,
            start,
            positions.clone(),
            sizes.clone(),
            &mut rng,
        )?);
    }
    Ok(out)
}

/// Pearson and Spearman correlation between sizes and trade-layer EVC.
/// Either is NaN if a side is constant.
pub fn size_centrality_check(e: &SyntheticEconomy) -> Result<(f64, f64)> {
    let evc = eigenvector_centrality(&e.trade, Normalization::UnitL2)?;
    Ok((
        stats::pearson(&e.sizes, &evc.values).unwrap_or(f64::NAN),
        stats::spearman(&e.sizes, &evc.values).unwrap_or(f64::NAN),
    ))
}
