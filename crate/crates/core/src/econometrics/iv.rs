//! Instrumental-variable estimators: 2SLS and LIML.
//!
//! Regressors are ordered `[endogenous…, exogenous…]`; the exogenous design
//! carries the intercept when one is wanted. The full instrument set is
//! `Z = [exogenous, excluded instruments]`. Standard errors use residuals
//! computed with the original regressors, never the first-stage fits.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::dist::f_sf;
use super::linalg::{annihilate, hstack, least_squares};
use super::ols::{finish, DesignMatrix, Estimator, Inference, RegressionResult};
use crate::error::{Error, Result};

/// First-stage F below this triggers a weak-instrument warning.
pub const WEAK_INSTRUMENT_F: f64 = 10.0;

struct IvSetup {
    names: Vec<String>,
    z_names: Vec<String>,
    exog_names: Vec<String>,
    y: DVector<f64>,
    x: DMatrix<f64>,
    z: DMatrix<f64>,
    exog: DMatrix<f64>,
    n_endog: usize,
}

fn setup(
    y: &[f64],
    endog: Option<&DesignMatrix>,
    exog: &DesignMatrix,
    instruments: Option<&DesignMatrix>,
) -> Result<IvSetup> {
    let n = y.len();
    let parts = [endog, Some(exog), instruments];
    if parts.iter().flatten().any(|d| d.rows() != n) {
        return Err(Error::InvalidInput(
            "IV inputs have different row counts".into(),
        ));
    }
    let n_endog = endog.map_or(0, |d| d.cols());
    let n_instr = instruments.map_or(0, |d| d.cols());
    if n_instr < n_endog {
        return Err(Error::UnderIdentified {
            instruments: n_instr,
            endogenous: n_endog,
        });
    }
    let empty = DMatrix::zeros(n, 0);
    let endog_m = endog.map_or(&empty, |d| d.matrix());
    let instr_m = instruments.map_or(&empty, |d| d.matrix());
    let names: Vec<String> = endog
        .map(|d| d.names().to_vec())
        .unwrap_or_default()
        .into_iter()
        .chain(exog.names().iter().cloned())
        .collect();
    let z_names: Vec<String> = exog
        .names()
        .iter()
        .cloned()
        .chain(instruments.map(|d| d.names().to_vec()).unwrap_or_default())
        .collect();
    let x = hstack(endog_m, exog.matrix());
    let z = hstack(exog.matrix(), instr_m);
    let k = x.ncols();
    if n <= z.ncols() || n <= k {
        return Err(Error::TooFewObservations {
            n,
            k: z.ncols().max(k),
        });
    }
    Ok(IvSetup {
        names,
        z_names,
        exog_names: exog.names().to_vec(),
        y: DVector::from_column_slice(y),
        x,
        z,
        exog: exog.matrix().clone(),
        n_endog,
    })
}

/// F statistic of the excluded instruments in each first-stage regression.
fn first_stage_f(s: &IvSetup) -> Result<Vec<f64>> {
    let n = s.y.len();
    let q = s.z.ncols() - s.exog.ncols();
    let df2 = n - s.z.ncols();
    (0..s.n_endog)
        .map(|c| {
            let col: DVector<f64> = s.x.column(c).into();
            let full = least_squares(&s.z, &col, &s.z_names)?;
            let restricted = if s.exog.ncols() == 0 {
                col.norm_squared()
            } else {
                least_squares(&s.exog, &col, &s.exog_names)?.rss
            };
            Ok(((restricted - full.rss) / q as f64) / (full.rss / df2 as f64))
        })
        .collect()
}

fn attach_first_stage(r: &mut RegressionResult, s: &IvSetup) -> Result<()> {
    for (c, f) in first_stage_f(s)?.into_iter().enumerate() {
        let name = &s.names[c];
        r.diagnostics.insert(format!("first_stage_f:{name}"), f);
        let q = (s.z.ncols() - s.exog.ncols()) as f64;
        let df2 = (s.y.len() - s.z.ncols()) as f64;
        if let Ok(p) = f_sf(f, q, df2) {
            r.diagnostics.insert(format!("first_stage_p:{name}"), p);
        }
        if !(f >= WEAK_INSTRUMENT_F) {
            r.warnings.push(format!(
                "WeakInstrumentWarning: first-stage F for `{name}` is {f:.3} < {WEAK_INSTRUMENT_F}"
            ));
        }
    }
    Ok(())
}

fn rank_to_identification(e: Error, s: &IvSetup) -> Error {
    match e {
        Error::RankDeficient(_) => Error::UnderIdentified {
            instruments: s.z.ncols() - s.exog.ncols(),
            endogenous: s.n_endog,
        },
        other => other,
    }
}

pub fn two_stage_least_squares(
    y: &[f64],
    endog: Option<&DesignMatrix>,
    exog: &DesignMatrix,
    instruments: Option<&DesignMatrix>,
) -> Result<RegressionResult> {
    let s = setup(y, endog, exog, instruments)?;
    // Z itself must have full column rank.
    least_squares(&s.z, &s.y, &s.z_names)?;
    let mut x_hat = s.x.clone();
    for c in 0..s.n_endog {
        let col: DVector<f64> = s.x.column(c).into();
        let fit = least_squares(&s.z, &col, &s.z_names)?;
        x_hat.set_column(c, &(col - fit.residuals));
    }
    let second =
        least_squares(&x_hat, &s.y, &s.names).map_err(|e| rank_to_identification(e, &s))?;
    let residuals = &s.y - &s.x * &second.beta;
    let n = s.y.len();
    let mut r = finish(Inference {
        estimator: Estimator::Tsls,
        names: s.names.clone(),
        beta: second.beta.iter().copied().collect(),
        unscaled_cov: &second.xtx_inv,
        residuals: &residuals,
        y: &s.y,
        df_resid: n - s.x.ncols(),
        sigma2_override: None,
        centered_r2: true,
    })?;
    attach_first_stage(&mut r, &s)?;
    Ok(r)
}

/// LIML κ: smallest root of `|W₁ − κW₂| = 0` with `W₁ = Y*ᵀM_exog Y*`,
/// `W₂ = Y*ᵀM_Z Y*` and `Y* = [y, X_endog]`.
fn liml_kappa(s: &IvSetup) -> Result<f64> {
    if s.n_endog == 0 {
        return Ok(1.0);
    }
    let n = s.y.len();
    let mut ystar = DMatrix::zeros(n, 1 + s.n_endog);
    ystar.set_column(0, &s.y);
    for c in 0..s.n_endog {
        ystar.set_column(1 + c, &s.x.column(c));
    }
    let m_exog = if s.exog.ncols() == 0 {
        ystar.clone()
    } else {
        annihilate(&s.exog, &ystar, &s.exog_names)?
    };
    let m_z = annihilate(&s.z, &ystar, &s.z_names)?;
    let w1 = m_exog.transpose() * &m_exog;
    let w2 = m_z.transpose() * &m_z;
    let chol = w2.clone().cholesky().ok_or_else(|| {
        Error::NearSingularDesign("W2 of the LIML eigenproblem is singular".into())
    })?;
    let l_inv = chol
        .l()
        .solve_lower_triangular(&DMatrix::identity(w2.nrows(), w2.nrows()))
        .ok_or_else(|| Error::NearSingularDesign("W2 factor is singular".into()))?;
    let c = &l_inv * w1 * l_inv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    Ok(eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min))
}

pub fn liml(
    y: &[f64],
    endog: Option<&DesignMatrix>,
    exog: &DesignMatrix,
    instruments: Option<&DesignMatrix>,
) -> Result<RegressionResult> {
    let s = setup(y, endog, exog, instruments)?;
    least_squares(&s.z, &s.y, &s.z_names)?;
    let kappa = liml_kappa(&s)?;
    let mz_x = annihilate(&s.z, &s.x, &s.z_names)?;
    let mz_y = annihilate(
        &s.z,
        &DMatrix::from_column_slice(s.y.len(), 1, s.y.as_slice()),
        &s.z_names,
    )?;
    let a = s.x.transpose() * &s.x - (mz_x.transpose() * &mz_x) * kappa;
    let b = s.x.transpose() * &s.y - (mz_x.transpose() * mz_y.column(0)) * kappa;
    let a = (&a + a.transpose()) * 0.5;
    let a_inv = a
        .clone()
        .cholesky()
        .map(|c| c.inverse())
        .or_else(|| a.clone().try_inverse())
        .ok_or_else(|| rank_to_identification(Error::RankDeficient(String::new()), &s))?;
    let beta = &a_inv * b;
    let residuals = &s.y - &s.x * &beta;
    let n = s.y.len();
    let mut r = finish(Inference {
        estimator: Estimator::Liml,
        names: s.names.clone(),
        beta: beta.iter().copied().collect(),
        unscaled_cov: &a_inv,
        residuals: &residuals,
        y: &s.y,
        df_resid: n - s.x.ncols(),
        sigma2_override: None,
        centered_r2: true,
    })?;
    r.diagnostics.insert("kappa".into(), kappa);
    attach_first_stage(&mut r, &s)?;
    Ok(r)
}
