//! Bivariate VAR(2) estimated equation by equation, with Granger F tests.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::dist::f_sf;
use super::ols::{ols, DesignMatrix, Estimator, RegressionResult};
use crate::error::{Error, Result};

pub const LAGS: usize = 2;
/// Per-equation coefficients: two lags of two series plus a constant.
pub const COEFFICIENTS: usize = 2 * LAGS + 1;
/// Shortest series for which each equation keeps a residual degree of freedom.
pub const MIN_SERIES_LEN: usize = LAGS + COEFFICIENTS + 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GrangerDirection {
    /// Lags of the second series in the first equation.
    SecondCausesFirst,
    /// Lags of the first series in the second equation.
    FirstCausesSecond,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrangerTest {
    pub cause: String,
    pub effect: String,
    pub f: f64,
    pub df1: usize,
    pub df2: usize,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarResult {
    pub names: [String; 2],
    /// Equation for each series, regressors `L.y1, L2.y1, L.y2, L2.y2, _cons`.
    pub equations: [RegressionResult; 2],
    pub resid_cov: [[f64; 2]; 2],
    pub n: usize,
    pub granger: Vec<GrangerTest>,
}

pub fn lag_names(y1: &str, y2: &str) -> Vec<String> {
    vec![
        format!("L.{y1}"),
        format!("L2.{y1}"),
        format!("L.{y2}"),
        format!("L2.{y2}"),
    ]
}

pub fn var2(y1: &[f64], y2: &[f64], names: (&str, &str)) -> Result<VarResult> {
    if y1.len() != y2.len() {
        return Err(Error::InvalidInput("VAR series lengths differ".into()));
    }
    let len = y1.len();
    if len < MIN_SERIES_LEN {
        return Err(Error::TooShort {
            needed: MIN_SERIES_LEN,
            got: len,
        });
    }
    if y1.iter().chain(y2).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite VAR observation".into()));
    }
    for (name, s) in [(names.0, y1), (names.1, y2)] {
        if s.iter().all(|&v| v == s[0]) {
            return Err(Error::NearSingularDesign(format!(
                "series `{name}` is constant"
            )));
        }
    }
    let rows = len - LAGS;
    let col = |s: &[f64], lag: usize| -> Vec<f64> { (LAGS..len).map(|t| s[t - lag]).collect() };
    let l1y1 = col(y1, 1);
    let l2y1 = col(y1, 2);
    let l1y2 = col(y2, 1);
    let l2y2 = col(y2, 2);
    let lag_labels = lag_names(names.0, names.1);
    let design = DesignMatrix::from_columns(
        &[
            (&lag_labels[0], &l1y1),
            (&lag_labels[1], &l2y1),
            (&lag_labels[2], &l1y2),
            (&lag_labels[3], &l2y2),
        ],
        true,
    )?;
    let fit = |y: &[f64]| -> Result<RegressionResult> {
        let target: Vec<f64> = y[LAGS..].to_vec();
        let mut r = ols(&target, &design).map_err(|e| match e {
            Error::RankDeficient(c) => {
                Error::NearSingularDesign(format!("lag regressor `{c}` is collinear"))
            }
            other => other,
        })?;
        r.estimator = Estimator::VarEq;
        Ok(r)
    };
    let eq1 = fit(y1)?;
    let eq2 = fit(y2)?;
    let x = design.matrix();
    let resid = |eq: &RegressionResult, y: &[f64]| -> DVector<f64> {
        DVector::from_column_slice(&y[LAGS..]) - x * DVector::from_column_slice(&eq.beta)
    };
    let u1 = resid(&eq1, y1);
    let u2 = resid(&eq2, y2);
    let df = eq1.df_resid as f64;
    let c12 = u1.dot(&u2) / df;
    let resid_cov = [[u1.norm_squared() / df, c12], [c12, u2.norm_squared() / df]];
    let mut v = VarResult {
        names: [names.0.to_string(), names.1.to_string()],
        equations: [eq1, eq2],
        resid_cov,
        n: rows,
        granger: Vec::new(),
    };
    v.granger = vec![
        granger_wald(&v, GrangerDirection::SecondCausesFirst)?,
        granger_wald(&v, GrangerDirection::FirstCausesSecond)?,
    ];
    Ok(v)
}

/// Wald F for `β_j = 0` for all `j` in `indices`, using the classical
/// covariance: `F = bᵀV⁻¹b / q` with `(q, df_resid)` degrees of freedom.
/// An exact fit with a nonzero restricted block gives `F = ∞`, `p = 0`.
pub fn wald_f(r: &RegressionResult, indices: &[usize]) -> Result<(f64, usize, usize, f64)> {
    let q = indices.len();
    if q == 0 {
        return Err(Error::InvalidInput("empty restriction set".into()));
    }
    let b = DVector::from_fn(q, |a, _| r.beta[indices[a]]);
    let v = DMatrix::from_fn(q, q, |a, c| r.cov[indices[a]][indices[c]]);
    let df2 = r.df_resid;
    if b.iter().all(|&x| x == 0.0) {
        return Ok((0.0, q, df2, 1.0));
    }
    if r.exact_fit {
        return Ok((f64::INFINITY, q, df2, 0.0));
    }
    let f = {
        let v_inv = v
            .clone()
            .cholesky()
            .map(|c| c.inverse())
            .or_else(|| v.try_inverse())
            .ok_or_else(|| Error::NearSingularDesign("restricted covariance is singular".into()))?;
        (b.transpose() * v_inv * &b)[(0, 0)] / q as f64
    };
    let p = f_sf(f, q as f64, df2 as f64)?;
    Ok((f, q, df2, p))
}

pub fn granger_wald(v: &VarResult, direction: GrangerDirection) -> Result<GrangerTest> {
    let (eq, cause, effect) = match direction {
        GrangerDirection::SecondCausesFirst => (&v.equations[0], &v.names[1], &v.names[0]),
        GrangerDirection::FirstCausesSecond => (&v.equations[1], &v.names[0], &v.names[1]),
    };
    let prefix = [format!("L.{cause}"), format!("L2.{cause}")];
    let idx: Vec<usize> = prefix
        .iter()
        .map(|n| {
            eq.index_of(n)
                .ok_or_else(|| Error::NameMismatch(format!("`{n}` missing from VAR equation")))
        })
        .collect::<Result<_>>()?;
    let (f, df1, df2, p) = wald_f(eq, &idx)?;
    Ok(GrangerTest {
        cause: cause.clone(),
        effect: effect.clone(),
        f,
        df1,
        df2,
        p,
    })
}
