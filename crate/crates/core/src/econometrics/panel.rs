//! Balanced-panel fixed and random effects, and the Hausman contrast.
//!
//! FE is the within estimator reported with a grand-mean intercept:
//! `(y_it − ȳ_i + ȳ)` is regressed on `(x_it − x̄_i + x̄)` and a constant,
//! with `n − k − N` residual degrees of freedom (k slopes, N entities).
//!
//! RE uses Swamy–Arora variance components and quasi-demeaning with
//! `θ = 1 − sqrt(σ_e² / (T σ_u² + σ_e²))`. Its covariance is scaled by the
//! within-regression σ_e², the variance of the quasi-demeaned errors under
//! the RE model; with both covariances sharing that scale,
//! `V_FE − V_RE` is positive semidefinite by construction.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::dist::chi2_sf;
use super::linalg::least_squares;
use super::ols::{finish, Estimator, Inference, RegressionResult, INTERCEPT};
use crate::error::{Error, Result};

/// Entity × time values of one variable.
pub type PanelMatrix = Vec<Vec<f64>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelDataset {
    pub entities: Vec<String>,
    pub times: Vec<String>,
    pub variables: BTreeMap<String, PanelMatrix>,
}

impl PanelDataset {
    pub fn new(entities: Vec<String>, times: Vec<String>) -> Self {
        Self {
            entities,
            times,
            variables: BTreeMap::new(),
        }
    }

    /// Add a variable; every (entity, time) cell must be present and finite.
    pub fn with_variable(mut self, name: impl Into<String>, values: PanelMatrix) -> Result<Self> {
        let name = name.into();
        if values.len() != self.entities.len() || values.iter().any(|r| r.len() != self.times.len())
        {
            return Err(Error::InvalidInput(format!(
                "variable `{name}` is not {}×{}",
                self.entities.len(),
                self.times.len()
            )));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "variable `{name}` has missing or non-finite cells"
            )));
        }
        self.variables.insert(name, values);
        Ok(self)
    }

    pub fn n_entities(&self) -> usize {
        self.entities.len()
    }

    pub fn n_times(&self) -> usize {
        self.times.len()
    }

    fn get(&self, name: &str) -> Result<&PanelMatrix> {
        self.variables
            .get(name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown panel variable `{name}`")))
    }
}

fn row_means(m: &PanelMatrix) -> Vec<f64> {
    m.iter()
        .map(|r| r.iter().sum::<f64>() / r.len() as f64)
        .collect()
}

fn grand_mean(m: &PanelMatrix) -> f64 {
    let count: usize = m.iter().map(|r| r.len()).sum();
    m.iter().flatten().sum::<f64>() / count as f64
}

struct Prepared<'a> {
    y: &'a PanelMatrix,
    xs: Vec<&'a PanelMatrix>,
    n_entities: usize,
    n_times: usize,
}

fn prepare<'a>(panel: &'a PanelDataset, yname: &str, xnames: &[&str]) -> Result<Prepared<'a>> {
    if xnames.is_empty() {
        return Err(Error::InvalidInput(
            "panel regression needs at least one regressor".into(),
        ));
    }
    let y = panel.get(yname)?;
    let xs = xnames
        .iter()
        .map(|n| panel.get(n))
        .collect::<Result<Vec<_>>>()?;
    for (name, x) in xnames.iter().zip(&xs) {
        let means = row_means(x);
        let within: f64 = x
            .iter()
            .zip(&means)
            .map(|(r, m)| r.iter().map(|v| (v - m).powi(2)).sum::<f64>())
            .sum();
        let total: f64 = x.iter().flatten().map(|v| v * v).sum();
        if !(within > 1e-24 * total.max(f64::MIN_POSITIVE)) {
            return Err(Error::NoWithinVariation(name.to_string()));
        }
    }
    let n_entities = panel.n_entities();
    let n_times = panel.n_times();
    let n = n_entities * n_times;
    if n <= xnames.len() + n_entities {
        return Err(Error::TooFewObservations {
            n,
            k: xnames.len() + n_entities,
        });
    }
    Ok(Prepared {
        y,
        xs,
        n_entities,
        n_times,
    })
}

fn names_with_intercept(xnames: &[&str]) -> Vec<String> {
    xnames
        .iter()
        .map(|s| s.to_string())
        .chain(std::iter::once(INTERCEPT.to_string()))
        .collect()
}

/// Transformed design `[x̃₁ … x̃ₖ, c]` where each `x̃ = x − λ·x̄_i + μ·x̄`.
fn transformed(
    p: &Prepared<'_>,
    lambda: f64,
    add_grand_mean: bool,
    intercept_value: f64,
) -> (DMatrix<f64>, DVector<f64>) {
    let n = p.n_entities * p.n_times;
    let k = p.xs.len();
    let shift = |m: &PanelMatrix| -> Vec<f64> {
        let means = row_means(m);
        let g = if add_grand_mean { grand_mean(m) } else { 0.0 };
        m.iter()
            .zip(&means)
            .flat_map(|(r, mi)| r.iter().map(move |v| v - lambda * mi + g))
            .collect()
    };
    let mut x = DMatrix::from_element(n, k + 1, intercept_value);
    for (c, xm) in p.xs.iter().enumerate() {
        x.set_column(c, &DVector::from_vec(shift(xm)));
    }
    (x, DVector::from_vec(shift(p.y)))
}

pub fn fixed_effects(
    panel: &PanelDataset,
    yname: &str,
    xnames: &[&str],
) -> Result<RegressionResult> {
    let p = prepare(panel, yname, xnames)?;
    let names = names_with_intercept(xnames);
    let (x, y) = transformed(&p, 1.0, true, 1.0);
    let fit = least_squares(&x, &y, &names)?;
    let n = y.len();
    let k = xnames.len();
    let df = n - k - p.n_entities;
    let mut r = finish(Inference {
        estimator: Estimator::Fe,
        names,
        beta: fit.beta.iter().copied().collect(),
        unscaled_cov: &fit.xtx_inv,
        residuals: &fit.residuals,
        y: &y,
        df_resid: df,
        sigma2_override: None,
        centered_r2: false,
    })?;
    let y_within: f64 =
        p.y.iter()
            .zip(row_means(p.y))
            .map(|(row, m)| row.iter().map(|v| (v - m).powi(2)).sum::<f64>())
            .sum();
    if y_within > 0.0 {
        let r2_within = 1.0 - r.rss / y_within;
        r.r2 = Some(r2_within);
        r.r2_adj = Some(1.0 - (1.0 - r2_within) * (n as f64 - 1.0) / df as f64);
    }
    r.diagnostics
        .insert("n_entities".into(), p.n_entities as f64);
    r.diagnostics.insert("sigma2_e".into(), r.sigma2);
    Ok(r)
}

/// Entity intercepts `α_i = ȳ_i − x̄_iᵀb` implied by a fixed-effects fit.
pub fn entity_effects(
    panel: &PanelDataset,
    yname: &str,
    xnames: &[&str],
    fe: &RegressionResult,
) -> Result<Vec<f64>> {
    let y = panel.get(yname)?;
    let mut alpha = row_means(y);
    for name in xnames {
        let b = fe
            .coef(name)
            .ok_or_else(|| Error::NameMismatch(format!("`{name}` not in FE result")))?;
        for (a, m) in alpha.iter_mut().zip(row_means(panel.get(name)?)) {
            *a -= b * m;
        }
    }
    Ok(alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceComponents {
    pub sigma2_e: f64,
    /// Clamped at zero.
    pub sigma2_u: f64,
    pub theta: f64,
    /// True when the raw Swamy–Arora estimate of σ_u² was negative.
    pub clamped: bool,
}

pub fn swamy_arora(
    panel: &PanelDataset,
    yname: &str,
    xnames: &[&str],
) -> Result<VarianceComponents> {
    let p = prepare(panel, yname, xnames)?;
    swamy_arora_prepared(&p, xnames)
}

fn swamy_arora_prepared(p: &Prepared<'_>, xnames: &[&str]) -> Result<VarianceComponents> {
    let names = names_with_intercept(xnames);
    let k = xnames.len();
    let n = p.n_entities * p.n_times;
    let (xw, yw) = transformed(p, 1.0, true, 1.0);
    let within = least_squares(&xw, &yw, &names)?;
    let sigma2_e = within.rss / (n - k - p.n_entities) as f64;

    if p.n_entities <= k + 1 {
        return Err(Error::TooFewObservations {
            n: p.n_entities,
            k: k + 1,
        });
    }
    let mut xb = DMatrix::from_element(p.n_entities, k + 1, 1.0);
    for (c, xm) in p.xs.iter().enumerate() {
        xb.set_column(c, &DVector::from_vec(row_means(xm)));
    }
    let yb = DVector::from_vec(row_means(p.y));
    let between = least_squares(&xb, &yb, &names)?;
    let sigma2_between = between.rss / (p.n_entities - k - 1) as f64;
    let raw_u = sigma2_between - sigma2_e / p.n_times as f64;
    let sigma2_u = raw_u.max(0.0);
    let theta = if sigma2_e > 0.0 {
        1.0 - (sigma2_e / (p.n_times as f64 * sigma2_u + sigma2_e)).sqrt()
    } else {
        1.0
    };
    Ok(VarianceComponents {
        sigma2_e,
        sigma2_u,
        theta,
        clamped: raw_u < 0.0,
    })
}

/// Feasible GLS random effects for a given θ (exposed for oracle checks).
pub fn quasi_demeaned_gls(
    panel: &PanelDataset,
    yname: &str,
    xnames: &[&str],
    theta: f64,
    sigma2_e: f64,
) -> Result<RegressionResult> {
    let p = prepare(panel, yname, xnames)?;
    re_fit(&p, xnames, theta, sigma2_e)
}

fn re_fit(
    p: &Prepared<'_>,
    xnames: &[&str],
    theta: f64,
    sigma2_e: f64,
) -> Result<RegressionResult> {
    let names = names_with_intercept(xnames);
    let (x, y) = transformed(p, theta, false, 1.0 - theta);
    let fit = least_squares(&x, &y, &names)?;
    let n = y.len();
    finish(Inference {
        estimator: Estimator::Re,
        names,
        beta: fit.beta.iter().copied().collect(),
        unscaled_cov: &fit.xtx_inv,
        residuals: &fit.residuals,
        y: &y,
        df_resid: n - xnames.len() - 1,
        sigma2_override: Some(sigma2_e),
        centered_r2: false,
    })
}

pub fn random_effects(
    panel: &PanelDataset,
    yname: &str,
    xnames: &[&str],
) -> Result<RegressionResult> {
    let p = prepare(panel, yname, xnames)?;
    let vc = swamy_arora_prepared(&p, xnames)?;
    let mut r = re_fit(&p, xnames, vc.theta, vc.sigma2_e)?;
    r.diagnostics.insert("theta".into(), vc.theta);
    r.diagnostics.insert("sigma2_e".into(), vc.sigma2_e);
    r.diagnostics.insert("sigma2_u".into(), vc.sigma2_u);
    if vc.clamped {
        r.warnings
            .push("negative Swamy-Arora sigma_u^2 clamped to 0; RE equals pooled OLS".into());
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HausmanResult {
    pub names: Vec<String>,
    pub statistic: f64,
    pub df: usize,
    pub p: f64,
    /// True when `V_FE − V_RE` was not positive definite and a pseudo-inverse
    /// over its positive eigenvalues was used.
    pub pseudo_inverse: bool,
}

/// `H = (b_FE − b_RE)ᵀ (V_FE − V_RE)⁻¹ (b_FE − b_RE)` over the common slopes.
pub fn hausman(fe: &RegressionResult, re: &RegressionResult) -> Result<HausmanResult> {
    let slopes = |r: &RegressionResult| -> Vec<(usize, String)> {
        r.names
            .iter()
            .enumerate()
            .filter(|(_, n)| *n != INTERCEPT)
            .map(|(i, n)| (i, n.clone()))
            .collect()
    };
    let fs = slopes(fe);
    let rs = slopes(re);
    let fe_names: Vec<&String> = fs.iter().map(|(_, n)| n).collect();
    let re_names: Vec<&String> = rs.iter().map(|(_, n)| n).collect();
    if fe_names != re_names || fs.is_empty() {
        return Err(Error::NameMismatch(format!("{fe_names:?} vs {re_names:?}")));
    }
    let k = fs.len();
    let d = DVector::from_fn(k, |a, _| fe.beta[fs[a].0] - re.beta[rs[a].0]);
    let v = DMatrix::from_fn(k, k, |a, b| {
        fe.cov[fs[a].0][fs[b].0] - re.cov[rs[a].0][rs[b].0]
    });
    let v = (&v + v.transpose()) * 0.5;
    let eig = SymmetricEigen::new(v);
    let scale = eig.eigenvalues.iter().fold(0.0_f64, |m, e| m.max(e.abs()));
    let tol = 1e-12 * scale.max(f64::MIN_POSITIVE);
    let pseudo_inverse = eig.eigenvalues.iter().any(|&e| e <= tol);
    let mut h = 0.0;
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > tol {
            let proj = eig.eigenvectors.column(j).dot(&d);
            h += proj * proj / lambda;
        }
    }
    if d.iter().all(|&x| x == 0.0) {
        h = 0.0;
    }
    let p = chi2_sf(h, k as f64)?;
    Ok(HausmanResult {
        names: fe_names.into_iter().cloned().collect(),
        statistic: h,
        df: k,
        p,
        pseudo_inverse,
    })
}
