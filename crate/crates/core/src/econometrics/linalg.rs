//! Least squares through Householder QR with column pivoting.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Rank tolerance relative to the largest pivot.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct LeastSquares {
    /// Coefficients in the original column order.
    pub beta: DVector<f64>,
    /// `(XᵀX)⁻¹` in the original column order.
    pub xtx_inv: DMatrix<f64>,
    pub residuals: DVector<f64>,
    pub rss: f64,
}

/// Solve `min ‖y − Xβ‖` for full-column-rank `X`. A column whose pivot falls
/// below `RANK_TOLERANCE × |R₀₀|` is reported by name.
pub fn least_squares(x: &DMatrix<f64>, y: &DVector<f64>, names: &[String]) -> Result<LeastSquares> {
    let (n, k) = x.shape();
    if y.len() != n {
        return Err(Error::InvalidInput(format!(
            "design has {n} rows, response has {}",
            y.len()
        )));
    }
    if n <= k {
        return Err(Error::TooFewObservations { n, k });
    }
    let mut a = x.clone();
    let mut qty = y.clone();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut col_norms: Vec<f64> = (0..k).map(|j| a.column(j).norm_squared()).collect();
    let mut first_pivot = 0.0;

    for j in 0..k {
        // Recompute trailing norms exactly; k is small so this is cheap and
        // avoids the cancellation of downdated norms.
        for (c, norm) in col_norms.iter_mut().enumerate().skip(j) {
            *norm = a.view((j, c), (n - j, 1)).norm_squared();
        }
        let p = (j..k)
            .max_by(|&a_, &b_| col_norms[a_].total_cmp(&col_norms[b_]).then(b_.cmp(&a_)))
            .unwrap();
        if p != j {
            a.swap_columns(j, p);
            perm.swap(j, p);
            col_norms.swap(j, p);
        }
        let norm = col_norms[j].sqrt();
        if j == 0 {
            first_pivot = norm;
        }
        if !(norm > RANK_TOLERANCE * first_pivot) || norm == 0.0 {
            return Err(Error::RankDeficient(
                names
                    .get(perm[j])
                    .cloned()
                    .unwrap_or_else(|| format!("x{}", perm[j])),
            ));
        }
        let head = a[(j, j)];
        let alpha = if head >= 0.0 { -norm } else { norm };
        let mut v: DVector<f64> = a.view((j, j), (n - j, 1)).clone_owned().column(0).into();
        v[0] -= alpha;
        let vnorm2 = v.norm_squared();
        if vnorm2 > 0.0 {
            for c in j..k {
                let mut col = a.view_mut((j, c), (n - j, 1));
                let s = 2.0 * v.dot(&col.column(0)) / vnorm2;
                col.column_mut(0).axpy(-s, &v, 1.0);
            }
            let mut tail = qty.rows_mut(j, n - j);
            let s = 2.0 * v.dot(&tail) / vnorm2;
            tail.axpy(-s, &v, 1.0);
        }
        a[(j, j)] = alpha;
        for r in (j + 1)..n {
            a[(r, j)] = 0.0;
        }
    }

    let r = a.view((0, 0), (k, k)).upper_triangle();
    let rhs = qty.rows(0, k).clone_owned();
    let z = r
        .solve_upper_triangular(&rhs)
        .ok_or_else(|| Error::RankDeficient(names.first().cloned().unwrap_or_default()))?;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| Error::RankDeficient(names.first().cloned().unwrap_or_default()))?;
    let inv_perm = &r_inv * r_inv.transpose();

    let mut beta = DVector::zeros(k);
    let mut xtx_inv = DMatrix::zeros(k, k);
    for a_ in 0..k {
        beta[perm[a_]] = z[a_];
        for b_ in 0..k {
            xtx_inv[(perm[a_], perm[b_])] = inv_perm[(a_, b_)];
        }
    }
    let residuals = y - x * &beta;
    let rss = residuals.norm_squared();
    Ok(LeastSquares {
        beta,
        xtx_inv,
        residuals,
        rss,
    })
}

/// Residuals of every column of `m` after projection on the column space of `z`.
pub fn annihilate(z: &DMatrix<f64>, m: &DMatrix<f64>, z_names: &[String]) -> Result<DMatrix<f64>> {
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for c in 0..m.ncols() {
        let col: DVector<f64> = m.column(c).into();
        let fit = least_squares(z, &col, z_names)?;
        out.set_column(c, &fit.residuals);
    }
    Ok(out)
}

pub fn matrix_from_columns(cols: &[&[f64]]) -> DMatrix<f64> {
    let n = cols.first().map_or(0, |c| c.len());
    DMatrix::from_fn(n, cols.len(), |r, c| cols[c][r])
}

pub fn hstack(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    out
}
