//! Student-t, χ² and F distribution functions from the regularized
//! incomplete beta and gamma functions.

use statrs::function::beta::beta_reg;
use statrs::function::gamma::{gamma_lr, gamma_ur};

use crate::error::{Error, Result};

fn check_df(df: f64) -> Result<()> {
    if df.is_finite() && df >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidDf(df))
    }
}

pub fn student_t_cdf(x: f64, df: f64) -> Result<f64> {
    check_df(df)?;
    if x.is_nan() {
        return Err(Error::InvalidInput("t statistic is NaN".into()));
    }
    let tail = 0.5 * beta_reg(df / 2.0, 0.5, df / (df + x * x));
    Ok(if x >= 0.0 { 1.0 - tail } else { tail })
}

/// `P(|T| ≥ |t|)`.
pub fn student_t_two_sided_p(t: f64, df: f64) -> Result<f64> {
    check_df(df)?;
    if t.is_nan() {
        return Err(Error::InvalidInput("t statistic is NaN".into()));
    }
    if t.is_infinite() {
        return Ok(0.0);
    }
    Ok(beta_reg(df / 2.0, 0.5, df / (df + t * t)).clamp(0.0, 1.0))
}

pub fn chi2_cdf(x: f64, df: f64) -> Result<f64> {
    check_df(df)?;
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    Ok(gamma_lr(df / 2.0, x / 2.0))
}

pub fn chi2_sf(x: f64, df: f64) -> Result<f64> {
    check_df(df)?;
    if x <= 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok(gamma_ur(df / 2.0, x / 2.0))
}

pub fn f_cdf(x: f64, d1: f64, d2: f64) -> Result<f64> {
    check_df(d1)?;
    check_df(d2)?;
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    Ok(beta_reg(d1 / 2.0, d2 / 2.0, d1 * x / (d1 * x + d2)))
}

pub fn f_sf(x: f64, d1: f64, d2: f64) -> Result<f64> {
    check_df(d1)?;
    check_df(d2)?;
    if x <= 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok(beta_reg(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * x)))
}
