//! Regression tables in a plain-text layout (coefficient row, t statistic in
//! parentheses underneath, N and adjusted R² footer, significance legend)
//! and a flat CSV form.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::ols::{RegressionResult, INTERCEPT};
use super::panel::HausmanResult;
use super::var::VarResult;

pub const STAR_LEGEND: &str = "* p<0.05, ** p<0.01, *** p<0.001";
pub const T_LEGEND: &str = "t statistics in parentheses";

pub fn stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

/// Three significant digits without exponent notation.
pub fn fmt_sig3(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            ".".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (2 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // Rounding can carry into a new digit (0.09996 -> 0.100).
    let rounded: f64 = s.parse().unwrap_or(x);
    let exp2 = rounded.abs().log10().floor() as i32;
    if exp2 != exp && rounded != 0.0 {
        let decimals = (2 - exp2).max(0) as usize;
        return format!("{rounded:.decimals$}");
    }
    s
}

fn fmt_t(t: f64) -> String {
    if t.is_finite() {
        format!("({t:.2})")
    } else {
        "(.)".into()
    }
}

/// Several models of the same dependent variable side by side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTable {
    pub title: String,
    pub depvar: String,
    pub models: Vec<RegressionResult>,
    pub legend: String,
}

impl RegressionTable {
    pub fn new(
        title: impl Into<String>,
        depvar: impl Into<String>,
        models: Vec<RegressionResult>,
    ) -> Self {
        Self {
            title: title.into(),
            depvar: depvar.into(),
            models,
            legend: STAR_LEGEND.into(),
        }
    }

    /// Row order: first appearance across models, intercept last.
    pub fn row_names(&self) -> Vec<String> {
        let mut rows: Vec<String> = Vec::new();
        for m in &self.models {
            for n in &m.names {
                if n != INTERCEPT && !rows.contains(n) {
                    rows.push(n.clone());
                }
            }
        }
        if self
            .models
            .iter()
            .any(|m| m.names.iter().any(|n| n == INTERCEPT))
        {
            rows.push(INTERCEPT.into());
        }
        rows
    }

    pub fn to_text(&self) -> String {
        let width = 16;
        let label = 14;
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.title);
        let rule_len = label + width * self.models.len();
        let _ = writeln!(out, "{}", "=".repeat(rule_len));
        let _ = write!(out, "{:label$}", "");
        for k in 0..self.models.len() {
            let _ = write!(out, "{:>width$}", format!("({})", k + 1));
        }
        out.push('\n');
        let _ = write!(out, "{:label$}", "");
        for m in &self.models {
            let _ = write!(
                out,
                "{:>width$}",
                self.depvar.clone() + " " + &m.estimator.to_string()
            );
        }
        out.push('\n');
        let _ = writeln!(out, "{}", "-".repeat(rule_len));
        for row in self.row_names() {
            let _ = write!(out, "{row:label$}");
            for m in &self.models {
                let cell = m
                    .index_of(&row)
                    .map(|j| format!("{}{:<3}", fmt_sig3(m.beta[j]), stars(m.p[j])))
                    .unwrap_or_default();
                let _ = write!(out, "{cell:>width$}");
            }
            out.push('\n');
            let _ = write!(out, "{:label$}", "");
            for m in &self.models {
                let cell = m
                    .index_of(&row)
                    .map(|j| fmt_t(m.t[j]) + "   ")
                    .unwrap_or_default();
                let _ = write!(out, "{cell:>width$}");
            }
            out.push_str("\n\n");
        }
        let _ = writeln!(out, "{}", "-".repeat(rule_len));
        let _ = write!(out, "{:label$}", "N");
        for m in &self.models {
            let _ = write!(out, "{:>width$}", format!("{}   ", m.n));
        }
        out.push('\n');
        let _ = write!(out, "{:label$}", "adj. R2");
        for m in &self.models {
            let cell = m.r2_adj.map(|r| format!("{r:.3}   ")).unwrap_or_default();
            let _ = write!(out, "{cell:>width$}");
        }
        out.push('\n');
        let _ = writeln!(out, "{}", "=".repeat(rule_len));
        let _ = writeln!(out, "{T_LEGEND}");
        let _ = writeln!(out, "{}", self.legend);
        out
    }

    /// One row per (model, variable) plus `N` and `adj_r2` rows per model.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("table,model,estimator,depvar,variable,coef,se,t,p,stars,n,r2_adj\n");
        let title = csv_field(&self.title);
        for (k, m) in self.models.iter().enumerate() {
            let r2 = m.r2_adj.map(|r| r.to_string()).unwrap_or_default();
            for j in 0..m.names.len() {
                let _ = writeln!(
                    out,
                    "{title},{},{},{},{},{},{},{},{},{},{},{r2}",
                    k + 1,
                    m.estimator,
                    self.depvar,
                    m.names[j],
                    m.beta[j],
                    m.se[j],
                    m.t[j],
                    m.p[j],
                    stars(m.p[j]),
                    m.n,
                );
            }
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn hausman_text(h: &HausmanResult) -> String {
    let mut s = format!(
        "Hausman test: chi2({}) = {:.4}, Prob > chi2 = {:.4}",
        h.df, h.statistic, h.p
    );
    if h.pseudo_inverse {
        s.push_str(" (V_FE - V_RE not positive definite; pseudo-inverse used)");
    }
    s.push('\n');
    s
}

pub fn var_text(title: &str, v: &VarResult) -> String {
    let label = 14;
    let width = 16;
    let mut out = String::new();
    let _ = writeln!(out, "{title}");
    let _ = writeln!(out, "{}", "=".repeat(label + width));
    let _ = writeln!(out, "{:label$}{:>width$}", "", "(1)");
    let _ = writeln!(out, "{:label$}{:>width$}", "", v.names[0]);
    let _ = writeln!(out, "{}", "-".repeat(label + width));
    for (name, eq) in v.names.iter().zip(&v.equations) {
        let _ = writeln!(out, "{name}");
        for j in 0..eq.names.len() {
            let cell = format!("{}{:<3}", fmt_sig3(eq.beta[j]), stars(eq.p[j]));
            let _ = writeln!(out, "{:label$}{cell:>width$}", eq.names[j]);
            let _ = writeln!(out, "{:label$}{:>width$}", "", fmt_t(eq.t[j]) + "   ");
            out.push('\n');
        }
        let _ = writeln!(out, "{}", "-".repeat(label + width));
    }
    let _ = writeln!(out, "{:label$}{:>width$}", "N", format!("{}   ", v.n));
    for g in &v.granger {
        let _ = writeln!(
            out,
            "Granger {} -> {}: F({}, {}) = {:.4}, p = {:.4}",
            g.cause, g.effect, g.df1, g.df2, g.f, g.p
        );
    }
    let _ = writeln!(out, "{}", "=".repeat(label + width));
    let _ = writeln!(out, "{T_LEGEND}");
    let _ = writeln!(out, "{STAR_LEGEND}");
    out
}
