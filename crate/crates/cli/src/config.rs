//! Run configuration: a TOML file with `[input]` or `[gravity]`, plus
//! `[run]`, `[emit]` and `[regression]` sections. Command-line flags are
//! applied on top with [`Overrides`].

use std::path::{Path, PathBuf};

use econet_core::gravity::GravityParams;
use econet_core::netcore::Normalization;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputPaths {
    pub prices: PathBuf,
    #[serde(default)]
    pub trade: Option<PathBuf>,
    #[serde(default)]
    pub fdi: Option<PathBuf>,
    #[serde(default)]
    pub covariates: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GravityConfig {
    pub n_countries: usize,
    pub size_tail_exponent: f64,
    pub coupling: f64,
    pub noise_scale: f64,
    pub fdi_trade_elasticity: f64,
    pub seed: u64,
    /// Trading days per simulated year.
    pub periods: usize,
}

impl Default for GravityConfig {
    fn default() -> Self {
        let p = GravityParams::default();
        Self {
            n_countries: p.n_countries,
            size_tail_exponent: p.size_tail_exponent,
            coupling: p.coupling,
            noise_scale: p.noise_scale,
            fdi_trade_elasticity: p.fdi_trade_elasticity,
            seed: p.seed,
            periods: 250,
        }
    }
}

impl GravityConfig {
    pub fn params(&self) -> GravityParams {
        GravityParams {
            n_countries: self.n_countries,
            size_tail_exponent: self.size_tail_exponent,
            coupling: self.coupling,
            noise_scale: self.noise_scale,
            fdi_trade_elasticity: self.fdi_trade_elasticity,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum NormalizationArg {
    L2,
    Max,
}

impl From<NormalizationArg> for Normalization {
    fn from(n: NormalizationArg) -> Self {
        match n {
            NormalizationArg::L2 => Normalization::UnitL2,
            NormalizationArg::Max => Normalization::MaxOne,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub years: Vec<i32>,
    pub normalization: NormalizationArg,
    pub out: PathBuf,
    /// Origins for the correlation/trade pair tables.
    pub pair_origins: Vec<String>,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            years: (2001..=2009).collect(),
            normalization: NormalizationArg::L2,
            out: PathBuf::from("out"),
            pair_origins: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EmitFlags {
    pub edge_lists: bool,
    pub dot: bool,
    pub tables: bool,
    pub json: bool,
}

impl Default for EmitFlags {
    fn default() -> Self {
        Self {
            edge_lists: true,
            dot: true,
            tables: true,
            json: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegressionConfig {
    pub depvar: String,
    /// Nested cross-section specifications, applied to every year.
    pub cross_section: Vec<Vec<String>>,
    /// Per-year replacements for `cross_section`, keyed by year.
    pub per_year: std::collections::BTreeMap<String, Vec<Vec<String>>>,
    pub panel: Vec<String>,
    pub iv_endogenous: String,
    pub iv_instruments: Vec<String>,
    pub iv_controls: Vec<String>,
}

impl Default for RegressionConfig {
    fn default() -> Self {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        Self {
            depvar: "evc_return".into(),
            cross_section: vec![
                s(&["evc_trade"]),
                s(&["evc_trade", "fdi"]),
                s(&["evc_trade", "fdi", "credit"]),
                s(&["evc_trade", "fdi", "credit", "tradeofgdp"]),
                s(&["evc_trade", "fdi", "credit", "tradeofgdp", "gdp"]),
                s(&["evc_trade", "fdi", "credit", "tradeofgdp", "gdpcap"]),
            ],
            per_year: Default::default(),
            panel: s(&["evc_trade", "fdi", "credit", "tradeofgdp"]),
            iv_endogenous: "evc_trade".into(),
            iv_instruments: s(&["geo_centrality"]),
            iv_controls: s(&["credit", "tradeofgdp", "fdi"]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<InputPaths>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gravity: Option<GravityConfig>,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub emit: EmitFlags,
    #[serde(default)]
    pub regression: RegressionConfig,
}

/// Flag values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub years: Option<Vec<i32>>,
    pub normalization: Option<NormalizationArg>,
    pub prices: Option<PathBuf>,
    pub trade: Option<PathBuf>,
    pub fdi: Option<PathBuf>,
    pub covariates: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Parse a config file; relative input paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg = Self::from_toml(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        if let Some(input) = cfg.input.as_mut() {
            let fix = |p: &mut PathBuf| {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            };
            fix(&mut input.prices);
            input.trade.as_mut().map(fix);
            input.fdi.as_mut().map(fix);
            input.covariates.as_mut().map(fix);
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            self.gravity.get_or_insert_with(Default::default).seed = seed;
        }
        if let Some(out) = &o.out {
            self.run.out = out.clone();
        }
        if let Some(years) = &o.years {
            self.run.years = years.clone();
        }
        if let Some(n) = o.normalization {
            self.run.normalization = n;
        }
        if let Some(prices) = &o.prices {
            let input = self.input.get_or_insert_with(|| InputPaths {
                prices: prices.clone(),
                trade: None,
                fdi: None,
                covariates: None,
            });
            input.prices = prices.clone();
        }
        if let Some(input) = self.input.as_mut() {
            if o.trade.is_some() {
                input.trade = o.trade.clone();
            }
            if o.fdi.is_some() {
                input.fdi = o.fdi.clone();
            }
            if o.covariates.is_some() {
                input.covariates = o.covariates.clone();
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.input, &self.gravity) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "give either [input] files or [gravity] parameters, not both".into(),
                ))
            }
            (None, None) => {
                return Err(CliError::Config(
                    "one of [input] files or [gravity] parameters is required".into(),
                ))
            }
            _ => {}
        }
        if self.run.years.is_empty() {
            return Err(CliError::Config("no years to process".into()));
        }
        let mut sorted = self.run.years.clone();
        sorted.sort();
        sorted.dedup();
        if sorted != self.run.years {
            return Err(CliError::Config("years must be strictly increasing".into()));
        }
        if let Some(g) = &self.gravity {
            g.params()
                .validate()
                .map_err(|e| CliError::Config(e.to_string()))?;
        }
        Ok(())
    }

    pub fn normalization(&self) -> Normalization {
        self.run.normalization.into()
    }

    pub fn seed(&self) -> Option<u64> {
        self.gravity.as_ref().map(|g| g.seed)
    }

    /// SHA-256 of the canonical TOML rendering, ignoring the output directory.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.run.out = PathBuf::new();
        let digest = Sha256::digest(canonical.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Parse `2001,2003-2005` into `[2001, 2003, 2004, 2005]`.
pub fn parse_years(s: &str) -> std::result::Result<Vec<i32>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once('-') {
            let a: i32 = a.trim().parse().map_err(|_| format!("bad year `{a}`"))?;
            let b: i32 = b.trim().parse().map_err(|_| format!("bad year `{b}`"))?;
            if b < a {
                return Err(format!("empty range `{part}`"));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| format!("bad year `{part}`"))?);
        }
    }
    if out.is_empty() {
        return Err("no years given".into());
    }
    Ok(out)
}
