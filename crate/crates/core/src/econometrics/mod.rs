//! Cross-sectional OLS, panel FE/RE with the Hausman test, 2SLS/LIML and
//! bivariate VAR(2) with Granger tests.
//!
//! Every estimator reports classical (homoskedastic) standard errors and
//! exact small-sample Student-t inference with the estimator's own residual
//! degrees of freedom.

pub mod dist;
mod iv;
pub mod linalg;
mod ols;
mod panel;
pub mod table;
mod var;

pub use dist::{chi2_cdf, chi2_sf, f_cdf, f_sf, student_t_cdf, student_t_two_sided_p};
pub use iv::{liml, two_stage_least_squares, WEAK_INSTRUMENT_F};
pub use ols::{ols, DesignMatrix, Estimator, RegressionResult, INTERCEPT};
pub use panel::{
    entity_effects, fixed_effects, hausman, quasi_demeaned_gls, random_effects, swamy_arora,
    HausmanResult, PanelDataset, PanelMatrix, VarianceComponents,
};
pub use table::{stars, RegressionTable, STAR_LEGEND};
pub use var::{
    granger_wald, lag_names, var2, wald_f, GrangerDirection, GrangerTest, VarResult, COEFFICIENTS,
    LAGS, MIN_SERIES_LEN,
};
