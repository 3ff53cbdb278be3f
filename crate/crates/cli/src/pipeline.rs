//! End-to-end run: per-year multiplex, centralities, spanning trees and
//! cross-section regressions, then panel, IV and per-country VAR stages.

use std::collections::BTreeMap;

use econet_core::econometrics::{
    fixed_effects, hausman, liml, ols, random_effects, table::hausman_text,
    two_stage_least_squares, var2, DesignMatrix, HausmanResult, PanelDataset, RegressionResult,
    RegressionTable, VarResult, MIN_SERIES_LEN, STAR_LEGEND,
};
use econet_core::gravity::{generate_sequence, SyntheticEconomy, RNG_ALGORITHM};
use econet_core::multilayer::{assemble, centrality_table, pair_table, CrossLayerTable, PairTable};
use econet_core::netcore::{
    bands_of, distance_from_correlation, minimum_spanning_tree, Band, LayerKind, LayerMatrix,
    Normalization, SpanningTree,
};
use econet_core::timeseries::{log_returns, pearson_correlation, CorrelationMatrix, PricePanel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, Result, StageExt};
use crate::ingest::{read_covariates, read_flows, read_prices, CovariateTable};

/// Stream offset separating covariate draws from the economy's own draws.
const COVARIATE_STREAM: u64 = 0x5EED_C0DE;

pub const SYNTHETIC_COVARIATES: [&str; 7] = [
    "credit",
    "eci",
    "fdi",
    "gdp",
    "gdpcap",
    "geo_centrality",
    "tradeofgdp",
];

/// Raw inputs for one year, before any estimation.
#[derive(Debug, Clone, PartialEq)]
pub struct YearInputs {
    pub year: i32,
    pub prices: PricePanel,
    pub trade: LayerMatrix,
    pub fdi: LayerMatrix,
    /// Variable → entity → value.
    pub covariates: BTreeMap<String, BTreeMap<String, Option<f64>>>,
}

/// Synthetic country covariates derived from a yearly economy sequence.
///
/// `gdp` is the gravity size; population is fixed per country so `gdpcap`
/// moves with size; `fdi` is log FDI strength; `tradeofgdp` is trade
/// strength over size, scaled to 100 at its maximum; `geo_centrality` is the
/// mean inverse distance to all other countries.
pub fn synthetic_covariates(
    economies: &[SyntheticEconomy],
    years: &[i32],
    seed: u64,
) -> CovariateTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ COVARIATE_STREAM);
    let mut z = move || -> f64 { StandardNormal.sample(&mut rng) };
    let first = &economies[0];
    let n = first.entities.len();
    let population: Vec<f64> = first
        .sizes
        .iter()
        .map(|y| y.powf(0.8) * (0.3 * z()).exp())
        .collect();
    let geo: Vec<f64> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| 1.0 / first.distances[i][j])
                .sum::<f64>()
                / (n - 1) as f64
        })
        .collect();
    let mut table = CovariateTable {
        names: SYNTHETIC_COVARIATES.iter().map(|s| s.to_string()).collect(),
        values: BTreeMap::new(),
    };
    for (e, &year) in economies.iter().zip(years) {
        let strength: Vec<f64> = e.trade.weights().iter().map(|r| r.iter().sum()).collect();
        let fdi_strength: Vec<f64> = e.fdi.weights().iter().map(|r| r.iter().sum()).collect();
        let openness: Vec<f64> = (0..n).map(|i| strength[i] / e.sizes[i]).collect();
        let max_open = openness.iter().cloned().fold(0.0, f64::max);
        for i in 0..n {
            let gdpcap = e.sizes[i] / population[i];
            let credit = 60.0 + 15.0 * gdpcap.ln() + 10.0 * z();
            let eci = 0.5 * gdpcap.ln() + 0.3 * z();
            let row = vec![
                Some(credit),
                Some(eci),
                Some(fdi_strength[i].ln()),
                Some(e.sizes[i]),
                Some(gdpcap),
                Some(geo[i]),
                Some(100.0 * openness[i] / max_open),
            ];
            table.values.insert((year, e.entities[i].clone()), row);
        }
    }
    table
}

fn covariates_for(
    table: &CovariateTable,
    year: i32,
    entities: &[String],
) -> BTreeMap<String, BTreeMap<String, Option<f64>>> {
    table
        .names
        .iter()
        .map(|name| {
            let col = entities
                .iter()
                .map(|e| (e.clone(), table.get(year, e, name)))
                .collect();
            (name.clone(), col)
        })
        .collect()
}

/// A generated economy sequence with its synthetic covariates.
pub fn simulate(cfg: &RunConfig) -> Result<(Vec<SyntheticEconomy>, CovariateTable)> {
    let g = cfg
        .gravity
        .as_ref()
        .ok_or_else(|| CliError::Config("no [gravity] section".into()))?;
    let economies = generate_sequence(&g.params(), g.periods, &cfg.run.years).stage("gravity")?;
    let cov = synthetic_covariates(&economies, &cfg.run.years, g.seed);
    Ok((economies, cov))
}

/// Prices only, per year; flow layers are not required.
pub fn load_prices(cfg: &RunConfig) -> Result<Vec<(i32, PricePanel)>> {
    if let Some(input) = &cfg.input {
        let table = read_prices(&input.prices)?;
        cfg.run
            .years
            .iter()
            .map(|&y| Ok((y, table.year_panel(y).stage(format!("prices {y}"))?)))
            .collect()
    } else {
        let (economies, _) = simulate(cfg)?;
        Ok(cfg
            .run
            .years
            .iter()
            .copied()
            .zip(economies.into_iter().map(|e| e.prices))
            .collect())
    }
}

pub fn load_inputs(cfg: &RunConfig) -> Result<Vec<YearInputs>> {
    cfg.validate()?;
    if let Some(input) = &cfg.input {
        let missing = |what: &str| CliError::Config(format!("[input] needs a `{what}` file"));
        let prices = read_prices(&input.prices)?;
        let trade = read_flows(input.trade.as_ref().ok_or_else(|| missing("trade"))?)?;
        let fdi = read_flows(input.fdi.as_ref().ok_or_else(|| missing("fdi"))?)?;
        let cov = match &input.covariates {
            Some(p) => read_covariates(p)?,
            None => CovariateTable::default(),
        };
        cfg.run
            .years
            .iter()
            .map(|&year| {
                let trade = trade
                    .layer(year, LayerKind::Trade)
                    .stage(format!("trade {year}"))?;
                Ok(YearInputs {
                    year,
                    prices: prices.year_panel(year).stage(format!("prices {year}"))?,
                    covariates: covariates_for(&cov, year, trade.entities()),
                    fdi: fdi
                        .layer(year, LayerKind::Fdi)
                        .stage(format!("fdi {year}"))?,
                    trade,
                })
            })
            .collect()
    } else {
        let (economies, cov) = simulate(cfg)?;
        Ok(economies
            .into_iter()
            .zip(&cfg.run.years)
            .map(|(e, &year)| YearInputs {
                year,
                covariates: covariates_for(&cov, year, &e.entities),
                prices: e.prices,
                trade: e.trade,
                fdi: e.fdi,
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub seed: Option<u64>,
    pub mode: String,
    pub rng: Option<String>,
}

impl Provenance {
    pub fn of(cfg: &RunConfig) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_hash: cfg.hash(),
            seed: cfg.seed(),
            mode: if cfg.gravity.is_some() {
                "gravity"
            } else {
                "files"
            }
            .into(),
            rng: cfg.gravity.as_ref().map(|_| RNG_ALGORITHM.to_string()),
        }
    }

    /// One-line form used as a comment header in text outputs.
    pub fn line(&self) -> String {
        let seed = self
            .seed
            .map(|s| s.to_string())
            .unwrap_or_else(|| "-".into());
        format!(
            "{} {} mode={} config={} seed={seed}",
            self.tool, self.version, self.mode, self.config_hash
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerSummary {
    pub kind: String,
    pub eigenvalue: f64,
    /// Sum of upper-triangle weights.
    pub total_weight: f64,
}

/// The network half of a year: multiplex, centralities and the return MST.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YearNetwork {
    pub year: i32,
    pub entities: Vec<String>,
    pub layers: Vec<LayerSummary>,
    pub centrality: CrossLayerTable,
    pub bands: Vec<Band>,
    pub mst: SpanningTree,
    pub pairs: Vec<PairTable>,
    #[serde(skip)]
    pub correlation: CorrelationMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YearReport {
    #[serde(flatten)]
    pub network: YearNetwork,
    pub cross_section: RegressionTable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PanelReport {
    pub table: RegressionTable,
    pub hausman: HausmanResult,
    pub hausman_line: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarReport {
    pub entity: String,
    pub title: String,
    pub result: VarResult,
    pub legend: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub provenance: Provenance,
    pub entities: Vec<String>,
    pub years: Vec<i32>,
    pub normalization: Normalization,
    pub star_legend: String,
    pub yearly: Vec<YearReport>,
    pub panel: Option<PanelReport>,
    pub iv: Vec<RegressionTable>,
    pub var: Vec<VarReport>,
    pub notes: Vec<String>,
}

pub fn year_network(
    inp: &YearInputs,
    normalization: Normalization,
    origins: &[String],
) -> Result<YearNetwork> {
    let y = inp.year;
    let returns = log_returns(&inp.prices).stage(format!("returns {y}"))?;
    let corr = pearson_correlation(&returns).stage(format!("correlation {y}"))?;
    let corr_layer = LayerMatrix::from_correlation(&corr);
    let m = assemble(&corr_layer, &inp.trade, &inp.fdi, y.to_string())
        .stage(format!("multiplex {y}"))?;
    let mut centrality = centrality_table(&m, normalization).stage(format!("centrality {y}"))?;
    for (name, by_entity) in &inp.covariates {
        let col = m
            .entities()
            .iter()
            .map(|e| by_entity.get(e).copied().flatten())
            .collect();
        centrality = centrality
            .with_covariate(name.clone(), col)
            .stage(format!("covariates {y}"))?;
    }
    let layers = m
        .layers()
        .iter()
        .zip(&centrality.columns)
        .map(|(l, c)| {
            let w = l.weights();
            let total = (0..w.len())
                .flat_map(|i| ((i + 1)..w.len()).map(move |j| (i, j)))
                .map(|(i, j)| w[i][j])
                .sum();
            LayerSummary {
                kind: l.kind().tag(),
                eigenvalue: c.eigenvalue,
                total_weight: total,
            }
        })
        .collect();
    let sorted_corr = CorrelationMatrix::new(
        m.entities().to_vec(),
        m.layer(&LayerKind::ReturnCorrelation)
            .expect("return layer")
            .weights()
            .to_vec(),
    )
    .stage(format!("correlation {y}"))?;
    let mst = minimum_spanning_tree(&distance_from_correlation(&sorted_corr))
        .stage(format!("mst {y}"))?;
    // Terciles need three nodes; smaller networks get no bands.
    let bands = if m.entities().len() < 3 {
        Vec::new()
    } else {
        bands_of(
            centrality
                .column(&LayerKind::ReturnCorrelation)
                .expect("return column"),
        )
        .stage(format!("bands {y}"))?
    };
    let pairs = origins
        .iter()
        .map(|o| pair_table(&m, o).stage(format!("pairs {y}")))
        .collect::<Result<Vec<_>>>()?;
    Ok(YearNetwork {
        year: y,
        entities: m.entities().to_vec(),
        layers,
        centrality,
        bands,
        mst,
        pairs,
        correlation: sorted_corr,
    })
}

/// Values of a centrality column (`evc_<tag>`) or covariate, `None` if missing.
pub fn variable(table: &CrossLayerTable, name: &str) -> Option<Vec<Option<f64>>> {
    if let Some(tag) = name.strip_prefix("evc_") {
        if let Some(c) = table.columns.iter().find(|c| c.kind.tag() == tag) {
            return Some(c.values.iter().map(|&v| Some(v)).collect());
        }
    }
    table.covariates.get(name).cloned()
}

fn columns(
    table: &CrossLayerTable,
    names: &[String],
) -> econet_core::Result<Vec<Vec<Option<f64>>>> {
    names
        .iter()
        .map(|n| {
            variable(table, n)
                .ok_or_else(|| econet_core::Error::NameMismatch(format!("unknown variable `{n}`")))
        })
        .collect()
}

/// Rows where every listed column is present.
fn complete_rows(cols: &[Vec<Option<f64>>]) -> Vec<usize> {
    let n = cols.first().map_or(0, Vec::len);
    (0..n)
        .filter(|&i| cols.iter().all(|c| c[i].is_some()))
        .collect()
}

fn pick(col: &[Option<f64>], rows: &[usize]) -> Vec<f64> {
    rows.iter()
        .map(|&i| col[i].expect("complete row"))
        .collect()
}

fn design(
    names: &[String],
    cols: &[Vec<Option<f64>>],
    rows: &[usize],
    intercept: bool,
) -> econet_core::Result<DesignMatrix> {
    let data: Vec<Vec<f64>> = cols.iter().map(|c| pick(c, rows)).collect();
    let pairs: Vec<(&str, &[f64])> = names
        .iter()
        .map(String::as_str)
        .zip(data.iter().map(Vec::as_slice))
        .collect();
    if pairs.is_empty() {
        return Ok(DesignMatrix::intercept_only(rows.len()));
    }
    DesignMatrix::from_columns(&pairs, intercept)
}

/// OLS of `depvar` on `regressors` with listwise deletion of missing rows.
pub fn cross_section_model(
    table: &CrossLayerTable,
    depvar: &str,
    regressors: &[String],
) -> econet_core::Result<RegressionResult> {
    let mut all = vec![depvar.to_string()];
    all.extend(regressors.iter().cloned());
    let cols = columns(table, &all)?;
    let rows = complete_rows(&cols);
    let y = pick(&cols[0], &rows);
    ols(&y, &design(regressors, &cols[1..], &rows, true)?)
}

fn cross_section(net: &YearNetwork, cfg: &RunConfig) -> Result<RegressionTable> {
    let r = &cfg.regression;
    let specs = r
        .per_year
        .get(&net.year.to_string())
        .unwrap_or(&r.cross_section);
    let models = specs
        .iter()
        .enumerate()
        .map(|(k, spec)| {
            cross_section_model(&net.centrality, &r.depvar, spec).stage(format!(
                "cross-section {} model {}",
                net.year,
                k + 1
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegressionTable::new(
        format!(
            "Cross-section {}: {} on centralities and controls",
            net.year, r.depvar
        ),
        r.depvar.clone(),
        models,
    ))
}

fn panel_stage(yearly: &[YearReport], cfg: &RunConfig) -> Result<PanelReport> {
    let r = &cfg.regression;
    let entities = yearly[0].network.entities.clone();
    if let Some(bad) = yearly.iter().find(|y| y.network.entities != entities) {
        return Err(CliError::Numeric {
            stage: "panel".into(),
            source: econet_core::Error::EntityMismatch(
                bad.network
                    .entities
                    .iter()
                    .filter(|e| !entities.contains(e))
                    .chain(
                        entities
                            .iter()
                            .filter(|e| !bad.network.entities.contains(e)),
                    )
                    .cloned()
                    .collect(),
            ),
        });
    }
    let times: Vec<String> = yearly.iter().map(|y| y.network.year.to_string()).collect();
    let mut panel = PanelDataset::new(entities.clone(), times.clone());
    let mut vars = vec![r.depvar.clone()];
    vars.extend(r.panel.iter().cloned());
    for name in &vars {
        let by_year = yearly
            .iter()
            .map(|y| {
                variable(&y.network.centrality, name).ok_or_else(|| {
                    econet_core::Error::NameMismatch(format!("unknown variable `{name}`"))
                })
            })
            .collect::<econet_core::Result<Vec<_>>>()
            .stage("panel")?;
        let matrix = (0..entities.len())
            .map(|i| {
                by_year
                    .iter()
                    .map(|col| col[i].unwrap_or(f64::NAN))
                    .collect()
            })
            .collect();
        panel = panel.with_variable(name.clone(), matrix).stage("panel")?;
    }
    let xs: Vec<&str> = r.panel.iter().map(String::as_str).collect();
    let fe = fixed_effects(&panel, &r.depvar, &xs).stage("panel FE")?;
    let re = random_effects(&panel, &r.depvar, &xs).stage("panel RE")?;
    let h = hausman(&fe, &re).stage("hausman")?;
    Ok(PanelReport {
        table: RegressionTable::new(
            format!(
                "Panel {}-{}: fixed and random effects",
                times[0],
                times[times.len() - 1]
            ),
            r.depvar.clone(),
            vec![fe, re],
        ),
        hausman_line: hausman_text(&h).trim_end().to_string(),
        hausman: h,
    })
}

fn iv_stage(yearly: &[YearReport], cfg: &RunConfig) -> Result<Vec<RegressionTable>> {
    let r = &cfg.regression;
    let endog = std::slice::from_ref(&r.iv_endogenous);
    let mut tsls = Vec::new();
    let mut limls = Vec::new();
    for y in yearly {
        let stage = format!("IV {}", y.network.year);
        let mut names = vec![r.depvar.clone(), r.iv_endogenous.clone()];
        names.extend(r.iv_controls.iter().cloned());
        names.extend(r.iv_instruments.iter().cloned());
        let cols = columns(&y.network.centrality, &names).stage(&stage)?;
        let rows = complete_rows(&cols);
        let yv = pick(&cols[0], &rows);
        let nc = r.iv_controls.len();
        let endog_d = design(endog, &cols[1..2], &rows, false).stage(&stage)?;
        let exog_d = design(&r.iv_controls, &cols[2..2 + nc], &rows, true).stage(&stage)?;
        let instr_d = design(&r.iv_instruments, &cols[2 + nc..], &rows, false).stage(&stage)?;
        let a =
            two_stage_least_squares(&yv, Some(&endog_d), &exog_d, Some(&instr_d)).stage(&stage)?;
        let b = liml(&yv, Some(&endog_d), &exog_d, Some(&instr_d)).stage(&stage)?;
        for w in a.warnings.iter() {
            log::warn!("{} {w}", y.network.year);
        }
        tsls.push(a);
        limls.push(b);
    }
    let span = format!(
        "{}-{}",
        yearly[0].network.year,
        yearly[yearly.len() - 1].network.year
    );
    Ok(vec![
        RegressionTable::new(
            format!(
                "IV (2SLS) {span}, one column per year; {} instrumented",
                r.iv_endogenous
            ),
            r.depvar.clone(),
            tsls,
        ),
        RegressionTable::new(
            format!(
                "IV (LIML) {span}, one column per year; {} instrumented",
                r.iv_endogenous
            ),
            r.depvar.clone(),
            limls,
        ),
    ])
}

fn var_stage(yearly: &[YearReport]) -> Result<Vec<VarReport>> {
    let entities = &yearly[0].network.entities;
    entities
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let series = |kind: &LayerKind| -> Vec<f64> {
                yearly
                    .iter()
                    .map(|y| y.network.centrality.column(kind).expect("layer column")[i])
                    .collect()
            };
            let lower = e.to_lowercase();
            let result = var2(
                &series(&LayerKind::ReturnCorrelation),
                &series(&LayerKind::Trade),
                (&format!("{lower}_r"), &format!("{lower}_t")),
            )
            .stage(format!("VAR {e}"))?;
            Ok(VarReport {
                entity: e.clone(),
                title: format!("VAR(2) {e}: return and trade centrality"),
                result,
                legend: STAR_LEGEND.into(),
            })
        })
        .collect()
}

pub fn run_pipeline(cfg: &RunConfig) -> Result<AnalysisReport> {
    let inputs = load_inputs(cfg)?;
    run_on_inputs(cfg, &inputs)
}

pub fn run_on_inputs(cfg: &RunConfig, inputs: &[YearInputs]) -> Result<AnalysisReport> {
    let normalization = cfg.normalization();
    let mut notes = Vec::new();
    let yearly = inputs
        .iter()
        .map(|inp| {
            let network = year_network(inp, normalization, &cfg.run.pair_origins)?;
            let cross_section = cross_section(&network, cfg)?;
            Ok(YearReport {
                network,
                cross_section,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let panel = if yearly.len() >= 2 {
        Some(panel_stage(&yearly, cfg)?)
    } else {
        notes.push("panel stage skipped: fewer than two years".to_string());
        None
    };
    let has_instruments = cfg
        .regression
        .iv_instruments
        .iter()
        .all(|n| variable(&yearly[0].network.centrality, n).is_some());
    let iv = if has_instruments && !cfg.regression.iv_instruments.is_empty() {
        iv_stage(&yearly, cfg)?
    } else {
        notes.push("IV stage skipped: instrument column not available".to_string());
        Vec::new()
    };
    let var = if yearly.len() >= MIN_SERIES_LEN {
        var_stage(&yearly)?
    } else {
        notes.push(format!(
            "VAR stage skipped: {} years, at least {MIN_SERIES_LEN} needed",
            yearly.len()
        ));
        Vec::new()
    };
    for n in &notes {
        log::info!("{n}");
    }
    Ok(AnalysisReport {
        provenance: Provenance::of(cfg),
        entities: yearly[0].network.entities.clone(),
        years: inputs.iter().map(|i| i.year).collect(),
        normalization,
        star_legend: STAR_LEGEND.into(),
        yearly,
        panel,
        iv,
        var,
        notes,
    })
}
