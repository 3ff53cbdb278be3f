use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::dist::student_t_two_sided_p;
use super::linalg::least_squares;
use crate::error::{Error, Result};

pub const INTERCEPT: &str = "_cons";

/// Residual sums of squares below this fraction of `Σy²` count as an exact fit.
const EXACT_FIT_RELATIVE: f64 = 1e-24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Estimator {
    #[serde(rename = "OLS")]
    Ols,
    #[serde(rename = "FE")]
    Fe,
    #[serde(rename = "RE")]
    Re,
    #[serde(rename = "TSLS")]
    Tsls,
    #[serde(rename = "LIML")]
    Liml,
    #[serde(rename = "VAREq")]
    VarEq,
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Estimator::Ols => "OLS",
            Estimator::Fe => "FE",
            Estimator::Re => "RE",
            Estimator::Tsls => "TSLS",
            Estimator::Liml => "LIML",
            Estimator::VarEq => "VAREq",
        })
    }
}

/// Named regressors, one column per name. The intercept, when requested, is
/// the last column and is called `_cons`.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    names: Vec<String>,
    x: DMatrix<f64>,
}

impl DesignMatrix {
    pub fn new(names: Vec<String>, x: DMatrix<f64>) -> Result<Self> {
        if names.len() != x.ncols() {
            return Err(Error::InvalidInput(format!(
                "{} names for {} columns",
                names.len(),
                x.ncols()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite regressor value".into()));
        }
        Ok(Self { names, x })
    }

    pub fn from_columns(columns: &[(&str, &[f64])], intercept: bool) -> Result<Self> {
        let n = match columns.first() {
            Some((_, c)) => c.len(),
            None => {
                return Err(Error::InvalidInput(
                    "use DesignMatrix::intercept_only for an empty design".into(),
                ))
            }
        };
        if let Some((name, _)) = columns.iter().find(|(_, c)| c.len() != n) {
            return Err(Error::InvalidInput(format!(
                "column `{name}` has the wrong length"
            )));
        }
        let k = columns.len() + usize::from(intercept);
        let x = DMatrix::from_fn(n, k, |r, c| {
            if c < columns.len() {
                columns[c].1[r]
            } else {
                1.0
            }
        });
        let mut names: Vec<String> = columns.iter().map(|(n, _)| n.to_string()).collect();
        if intercept {
            names.push(INTERCEPT.into());
        }
        Self::new(names, x)
    }

    pub fn intercept_only(n: usize) -> Self {
        Self {
            names: vec![INTERCEPT.into()],
            x: DMatrix::from_element(n, 1, 1.0),
        }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn rows(&self) -> usize {
        self.x.nrows()
    }

    pub fn cols(&self) -> usize {
        self.x.ncols()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.names.iter().position(|n| n == name)?;
        Some(self.x.column(j).iter().copied().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub estimator: Estimator,
    pub names: Vec<String>,
    pub beta: Vec<f64>,
    pub se: Vec<f64>,
    pub t: Vec<f64>,
    pub p: Vec<f64>,
    /// Full coefficient covariance, rows and columns in `names` order.
    pub cov: Vec<Vec<f64>>,
    pub n: usize,
    pub df_resid: usize,
    pub rss: f64,
    pub sigma2: f64,
    pub r2: Option<f64>,
    pub r2_adj: Option<f64>,
    pub exact_fit: bool,
    /// Estimator-specific scalars (first-stage F, κ, θ, variance components).
    #[serde(default)]
    pub diagnostics: BTreeMap<String, f64>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl RegressionResult {
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn coef(&self, name: &str) -> Option<f64> {
        self.index_of(name).map(|j| self.beta[j])
    }
}

pub(crate) struct Inference<'a> {
    pub estimator: Estimator,
    pub names: Vec<String>,
    pub beta: Vec<f64>,
    /// Unscaled covariance, multiplied by `sigma2`.
    pub unscaled_cov: &'a DMatrix<f64>,
    pub residuals: &'a DVector<f64>,
    pub y: &'a DVector<f64>,
    pub df_resid: usize,
    /// Overrides `RSS / df_resid` as the variance scale.
    pub sigma2_override: Option<f64>,
    pub centered_r2: bool,
}

pub(crate) fn finish(inf: Inference<'_>) -> Result<RegressionResult> {
    let n = inf.y.len();
    let k = inf.beta.len();
    if inf.df_resid == 0 {
        return Err(Error::TooFewObservations { n, k });
    }
    let rss = inf.residuals.norm_squared();
    let y_ss = inf.y.norm_squared().max(f64::MIN_POSITIVE);
    let exact_fit = rss <= EXACT_FIT_RELATIVE * y_ss;
    let sigma2 = if exact_fit {
        0.0
    } else {
        inf.sigma2_override.unwrap_or(rss / inf.df_resid as f64)
    };
    let cov: Vec<Vec<f64>> = (0..k)
        .map(|a| (0..k).map(|b| sigma2 * inf.unscaled_cov[(a, b)]).collect())
        .collect();
    let se: Vec<f64> = (0..k).map(|j| cov[j][j].max(0.0).sqrt()).collect();
    let t: Vec<f64> = inf.beta.iter().zip(&se).map(|(b, s)| b / s).collect();
    let df = inf.df_resid as f64;
    let p = t
        .iter()
        .zip(&inf.beta)
        .map(|(&tj, &bj)| {
            if tj.is_nan() {
                Ok(if bj == 0.0 { 1.0 } else { 0.0 })
            } else {
                student_t_two_sided_p(tj, df)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let (r2, r2_adj) = if inf.centered_r2 {
        let mean = inf.y.mean();
        let tss: f64 = inf.y.iter().map(|v| (v - mean).powi(2)).sum();
        if tss > 0.0 {
            let r2 = 1.0 - rss / tss;
            let adj = 1.0 - (1.0 - r2) * (n as f64 - 1.0) / df;
            (Some(r2), Some(adj))
        } else {
            (Some(1.0), Some(1.0))
        }
    } else {
        (None, None)
    };
    Ok(RegressionResult {
        estimator: inf.estimator,
        names: inf.names,
        beta: inf.beta,
        se,
        t,
        p,
        cov,
        n,
        df_resid: inf.df_resid,
        rss,
        sigma2,
        r2,
        r2_adj,
        exact_fit,
        diagnostics: BTreeMap::new(),
        warnings: Vec::new(),
    })
}

/// Classical OLS: `σ̂² = RSS/(n − k)`, covariance `σ̂²(XᵀX)⁻¹`.
pub fn ols(y: &[f64], x: &DesignMatrix) -> Result<RegressionResult> {
    let n = x.rows();
    if y.len() != n {
        return Err(Error::InvalidInput(format!(
            "y has {} rows, X has {n}",
            y.len()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite response value".into()));
    }
    let k = x.cols();
    if n <= k {
        return Err(Error::TooFewObservations { n, k });
    }
    let yv = DVector::from_column_slice(y);
    let fit = least_squares(x.matrix(), &yv, x.names())?;
    let has_intercept = x.names().iter().any(|n| n == INTERCEPT);
    let mut result = finish(Inference {
        estimator: Estimator::Ols,
        names: x.names().to_vec(),
        beta: fit.beta.iter().copied().collect(),
        unscaled_cov: &fit.xtx_inv,
        residuals: &fit.residuals,
        y: &yv,
        df_resid: n - k,
        sigma2_override: None,
        centered_r2: has_intercept,
    })?;
    if !has_intercept {
        // Uncentered R² when the model has no constant.
        let r2 = 1.0 - result.rss / yv.norm_squared().max(f64::MIN_POSITIVE);
        result.r2 = Some(r2);
        result.r2_adj = Some(1.0 - (1.0 - r2) * n as f64 / (n - k) as f64);
    }
    Ok(result)
}
