//! Independent reference implementations and data generators for tests.
//!
//! Nothing here calls into the estimators under test: eigenpairs come from
//! cyclic Jacobi rotations, spanning trees from Prüfer enumeration, least
//! squares from normal equations with Gauss–Jordan inversion and p values
//! from adaptive quadrature of the Student-t density.
#![allow(dead_code)]

use econet_core::econometrics::PanelDataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(r: &mut ChaCha8Rng) -> f64 {
    r.sample(StandardNormal)
}

pub fn uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * r.random::<f64>()
}

pub fn random_symmetric(r: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = uniform(r, lo, hi);
            a[i][j] = v;
            a[j][i] = v;
        }
    }
    a
}

/// All eigenvalues (ascending) and matching unit eigenvectors (as columns
/// `vecs[k]`) of a symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let scale: f64 = m
        .iter()
        .flatten()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(1e-300);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| m[a][a].total_cmp(&m[b][b]));
    let vals = order.iter().map(|&k| m[k][k]).collect();
    let vecs = order
        .iter()
        .map(|&k| (0..n).map(|i| v[i][k]).collect())
        .collect();
    (vals, vecs)
}

/// Decode a Prüfer sequence over `n` labels into its tree's edge list.
pub fn prufer_edges(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (0..n).find(|&i| degree[i] == 1).expect("leaf");
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&i| degree[i] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Minimum total weight over all `n^(n-2)` labeled spanning trees.
pub fn exhaustive_mst_weight(w: &[Vec<f64>]) -> f64 {
    let n = w.len();
    if n == 2 {
        return w[0][1];
    }
    let len = n - 2;
    let total = n.pow(len as u32);
    let mut best = f64::INFINITY;
    let mut seq = vec![0usize; len];
    for code in 0..total {
        let mut c = code;
        for s in seq.iter_mut() {
            *s = c % n;
            c /= n;
        }
        let weight: f64 = prufer_edges(&seq, n).iter().map(|&(a, b)| w[a][b]).sum();
        best = best.min(weight);
    }
    best
}

/// Inverse by Gauss–Jordan elimination with partial pivoting.
pub fn gauss_jordan_inverse(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        let d = m[col][col];
        for v in m[col].iter_mut() {
            *v /= d;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                if f != 0.0 {
                    for c in 0..2 * n {
                        m[r][c] -= f * m[col][c];
                    }
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_t_mat(x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = x[0].len();
    let mut out = vec![vec![0.0; k]; k];
    for row in x {
        for a in 0..k {
            for b in 0..k {
                out[a][b] += row[a] * row[b];
            }
        }
    }
    out
}

pub fn mat_t_vec(x: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let k = x[0].len();
    let mut out = vec![0.0; k];
    for (row, yi) in x.iter().zip(y) {
        for a in 0..k {
            out[a] += row[a] * yi;
        }
    }
    out
}

pub fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// ln Γ(x) for x > 0 via the Lanczos approximation (g = 7, n = 9).
#[allow(clippy::excessive_precision)]
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

pub fn t_density(x: f64, df: f64) -> f64 {
    let c =
        ln_gamma((df + 1.0) / 2.0) - ln_gamma(df / 2.0) - 0.5 * (df * std::f64::consts::PI).ln();
    (c - (df + 1.0) / 2.0 * (1.0 + x * x / df).ln()).exp()
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
            + rec(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    rec(f, a, fa, b, fb, m, fm, whole, tol, depth)
}

/// Two-sided Student-t p value by quadrature of the density over `[0, |t|]`.
pub fn t_two_sided_p_quadrature(t: f64, df: f64) -> f64 {
    let a = t.abs();
    if a == 0.0 {
        return 1.0;
    }
    // Split the range so the adaptive rule sees the peak and the tail separately.
    let f = |x: f64| t_density(x, df);
    let mut area = 0.0;
    let mut lo = 0.0;
    for hi in [1.0, 4.0, 16.0, 64.0, 256.0, f64::INFINITY] {
        let top = a.min(hi);
        if top > lo {
            area += adaptive_simpson(&f, lo, top, 1e-15, 40);
        }
        lo = top;
        if a <= hi {
            break;
        }
    }
    (1.0 - 2.0 * area).clamp(0.0, 1.0)
}

#[derive(Debug, Clone)]
pub struct OlsOracle {
    pub beta: Vec<f64>,
    pub se: Vec<f64>,
    pub t: Vec<f64>,
    pub p: Vec<f64>,
    pub r2_adj: f64,
    pub rss: f64,
}

/// OLS via `(XᵀX)⁻¹Xᵀy`; `x` rows include the intercept column if any.
/// Adjusted R² is centered, so the design must include an intercept.
pub fn ols_oracle(x: &[Vec<f64>], y: &[f64]) -> OlsOracle {
    let n = x.len();
    let k = x[0].len();
    let inv = gauss_jordan_inverse(&mat_t_mat(x)).expect("nonsingular design");
    let beta = mat_vec(&inv, &mat_t_vec(x, y));
    let resid: Vec<f64> = x
        .iter()
        .zip(y)
        .map(|(row, yi)| yi - row.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>())
        .collect();
    let rss: f64 = resid.iter().map(|e| e * e).sum();
    let df = (n - k) as f64;
    let s2 = rss / df;
    let se: Vec<f64> = (0..k).map(|j| (s2 * inv[j][j]).sqrt()).collect();
    let t: Vec<f64> = beta.iter().zip(&se).map(|(b, s)| b / s).collect();
    let p = t
        .iter()
        .map(|&tj| t_two_sided_p_quadrature(tj, df))
        .collect();
    let ybar = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - ybar) * (v - ybar)).sum();
    let r2 = 1.0 - rss / tss;
    OlsOracle {
        beta,
        se,
        t,
        p,
        r2_adj: 1.0 - (1.0 - r2) * (n as f64 - 1.0) / df,
        rss,
    }
}

/// Slopes of `y` on `xs` plus one dummy per entity (no common intercept).
pub fn lsdv_slopes(panel: &PanelDataset, y: &str, xs: &[&str]) -> Vec<f64> {
    let n_e = panel.entities.len();
    let n_t = panel.times.len();
    let mut rows = Vec::new();
    let mut yv = Vec::new();
    for i in 0..n_e {
        for t in 0..n_t {
            let mut row: Vec<f64> = xs.iter().map(|x| panel.variables[*x][i][t]).collect();
            row.extend((0..n_e).map(|e| if e == i { 1.0 } else { 0.0 }));
            rows.push(row);
            yv.push(panel.variables[y][i][t]);
        }
    }
    let inv = gauss_jordan_inverse(&mat_t_mat(&rows)).expect("LSDV design");
    mat_vec(&inv, &mat_t_vec(&rows, &yv))[..xs.len()].to_vec()
}

/// Balanced panel: `y = 1 + β·x + u_i + e_it`, with `x1 = z + γ·u_i` and
/// an exogenous `x2`. `γ = 0` makes random effects valid.
pub fn effects_panel(
    seed: u64,
    n_e: usize,
    n_t: usize,
    gamma: f64,
    beta: [f64; 2],
) -> PanelDataset {
    let mut r = rng(seed);
    let entities: Vec<String> = (0..n_e).map(|i| format!("E{i:02}")).collect();
    let times: Vec<String> = (0..n_t).map(|t| format!("{}", 2001 + t)).collect();
    let mut y = vec![vec![0.0; n_t]; n_e];
    let mut x1 = vec![vec![0.0; n_t]; n_e];
    let mut x2 = vec![vec![0.0; n_t]; n_e];
    for i in 0..n_e {
        let u = normal(&mut r);
        for t in 0..n_t {
            x1[i][t] = normal(&mut r) + gamma * u;
            x2[i][t] = normal(&mut r);
            y[i][t] = 1.0 + beta[0] * x1[i][t] + beta[1] * x2[i][t] + u + normal(&mut r);
        }
    }
    PanelDataset::new(entities, times)
        .with_variable("y", y)
        .unwrap()
        .with_variable("x1", x1)
        .unwrap()
        .with_variable("x2", x2)
        .unwrap()
}

/// Noiseless VAR(2) path with the given equation coefficients in the order
/// `[L.y1, L2.y1, L.y2, L2.y2, _cons]`.
pub fn var2_path(
    a1: [f64; 5],
    a2: [f64; 5],
    start: [[f64; 2]; 2],
    len: usize,
) -> (Vec<f64>, Vec<f64>) {
    let mut y1 = vec![start[0][0], start[1][0]];
    let mut y2 = vec![start[0][1], start[1][1]];
    for t in 2..len {
        let next = |a: &[f64; 5]| {
            a[0] * y1[t - 1] + a[1] * y1[t - 2] + a[2] * y2[t - 1] + a[3] * y2[t - 2] + a[4]
        };
        let v1 = next(&a1);
        let v2 = next(&a2);
        y1.push(v1);
        y2.push(v2);
    }
    (y1, y2)
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

/// GLS with the true error covariance `Ω_i = σ_e²I + σ_u²J`, built from
/// `Ω⁻¹ = (I − φJ)/σ_e²` with `φ = σ_u²/(σ_e² + Tσ_u²)`. Coefficients are
/// ordered `[xs…, intercept]`.
pub fn true_omega_gls(panel: &PanelDataset, y: &str, xs: &[&str], s2u: f64, s2e: f64) -> Vec<f64> {
    let n_t = panel.times.len();
    let phi = s2u / (s2e + n_t as f64 * s2u);
    let k = xs.len() + 1;
    let mut a = vec![vec![0.0; k]; k];
    let mut b = vec![0.0; k];
    for i in 0..panel.entities.len() {
        let rows: Vec<Vec<f64>> = (0..n_t)
            .map(|t| {
                xs.iter()
                    .map(|x| panel.variables[*x][i][t])
                    .chain(std::iter::once(1.0))
                    .collect()
            })
            .collect();
        let yi: Vec<f64> = panel.variables[y][i].clone();
        let col_sum: Vec<f64> = (0..k).map(|c| rows.iter().map(|r| r[c]).sum()).collect();
        let y_sum: f64 = yi.iter().sum();
        for p in 0..k {
            for q in 0..k {
                let xx: f64 = rows.iter().map(|r| r[p] * r[q]).sum();
                a[p][q] += (xx - phi * col_sum[p] * col_sum[q]) / s2e;
            }
            let xy: f64 = rows.iter().zip(&yi).map(|(r, v)| r[p] * v).sum();
            b[p] += (xy - phi * col_sum[p] * y_sum) / s2e;
        }
    }
    mat_vec(&gauss_jordan_inverse(&a).expect("GLS moment matrix"), &b)
}

/// `M_A B` for column blocks given as rows: residuals of `B` on `A`.
pub fn annihilate_rows(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let inv = gauss_jordan_inverse(&mat_t_mat(a)).expect("full rank");
    let m = b[0].len();
    let mut out = b.to_vec();
    for c in 0..m {
        let col: Vec<f64> = b.iter().map(|r| r[c]).collect();
        let coef = mat_vec(&inv, &mat_t_vec(a, &col));
        for (row, arow) in out.iter_mut().zip(a) {
            row[c] -= arow.iter().zip(&coef).map(|(x, g)| x * g).sum::<f64>();
        }
    }
    out
}

/// Smallest κ with `det(W₁ − κW₂) = 0` for one endogenous regressor, found
/// by scanning upward from 0 and bisecting the first sign change.
pub fn liml_kappa_scan(y: &[f64], x: &[f64], exog: &[Vec<f64>], z_full: &[Vec<f64>]) -> f64 {
    let ystar: Vec<Vec<f64>> = y.iter().zip(x).map(|(a, b)| vec![*a, *b]).collect();
    let m1 = annihilate_rows(exog, &ystar);
    let m2 = annihilate_rows(z_full, &ystar);
    let w1 = mat_t_mat(&m1);
    let w2 = mat_t_mat(&m2);
    let det = |k: f64| {
        let a = |p: usize, q: usize| w1[p][q] - k * w2[p][q];
        a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)
    };
    let step = 1e-3;
    let mut lo = 0.0;
    let d0 = det(lo);
    loop {
        let hi = lo + step;
        if det(hi).signum() != d0.signum() {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if det(mid).signum() == d0.signum() {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            return 0.5 * (a + b);
        }
        lo = hi;
        assert!(lo < 1e6, "no root found");
    }
}

/// `y1_t = b·y2_{t−1} + e_t` with `y2` white noise.
pub fn lagged_pair(seed: u64, n: usize, b: f64) -> (Vec<f64>, Vec<f64>) {
    let mut r = rng(seed);
    let y2: Vec<f64> = (0..n).map(|_| normal(&mut r)).collect();
    let mut y1 = vec![normal(&mut r)];
    for t in 1..n {
        y1.push(b * y2[t - 1] + normal(&mut r));
    }
    (y1, y2)
}

/// Share of `p` values below 5%.
pub fn rejection_rate(ps: &[f64]) -> f64 {
    ps.iter().filter(|p| **p < 0.05).count() as f64 / ps.len() as f64
}

pub type Var2Instance = ([f64; 5], [f64; 5], Vec<f64>, Vec<f64>);

/// Random VAR(2) coefficients whose noiseless path neither explodes nor
/// settles within `len` steps, plus that path.
pub fn random_var2_instance(seed: u64, len: usize) -> Var2Instance {
    let mut r = rng(seed);
    loop {
        let mut draw = || {
            [
                uniform(&mut r, -0.9, 0.9),
                uniform(&mut r, -0.5, 0.5),
                uniform(&mut r, -0.9, 0.9),
                uniform(&mut r, -0.5, 0.5),
                uniform(&mut r, -1.0, 1.0),
            ]
        };
        let a1 = draw();
        let a2 = draw();
        let start = [
            [uniform(&mut r, -2.0, 2.0), uniform(&mut r, -2.0, 2.0)],
            [uniform(&mut r, -2.0, 2.0), uniform(&mut r, -2.0, 2.0)],
        ];
        let (y1, y2) = var2_path(a1, a2, start, len);
        let tail = len - len / 3;
        let spread = |s: &[f64]| {
            let t = &s[tail..];
            let m = t.iter().sum::<f64>() / t.len() as f64;
            (t.iter().map(|v| (v - m).powi(2)).sum::<f64>() / t.len() as f64).sqrt()
        };
        let max = y1.iter().chain(&y2).map(|v| v.abs()).fold(0.0, f64::max);
        if max < 1e3 && spread(&y1) > 0.05 && spread(&y2) > 0.05 {
            return (a1, a2, y1, y2);
        }
    }
}

/// Hausman 5% rejection rate on [`effects_panel`] draws at 18×9.
pub fn hausman_rejection_rate(seeds: std::ops::Range<u64>, gamma: f64) -> f64 {
    use econet_core::econometrics::{fixed_effects, hausman, random_effects};
    let ps: Vec<f64> = seeds
        .map(|s| {
            let panel = effects_panel(s, 18, 9, gamma, [1.0, -0.5]);
            let fe = fixed_effects(&panel, "y", &["x1", "x2"]).unwrap();
            let re = random_effects(&panel, "y", &["x1", "x2"]).unwrap();
            hausman(&fe, &re).unwrap().p
        })
        .collect();
    rejection_rate(&ps)
}

/// Granger 5% rejection rates `(y2 → y1, y1 → y2)` on [`lagged_pair`] draws.
pub fn granger_rejection_rates(seeds: std::ops::Range<u64>, n: usize, b: f64) -> (f64, f64) {
    use econet_core::econometrics::{granger_wald, var2, GrangerDirection};
    let (mut to_first, mut to_second) = (Vec::new(), Vec::new());
    for s in seeds {
        let (y1, y2) = lagged_pair(s, n, b);
        let v = var2(&y1, &y2, ("y1", "y2")).unwrap();
        to_first.push(
            granger_wald(&v, GrangerDirection::SecondCausesFirst)
                .unwrap()
                .p,
        );
        to_second.push(
            granger_wald(&v, GrangerDirection::FirstCausesSecond)
                .unwrap()
                .p,
        );
    }
    (rejection_rate(&to_first), rejection_rate(&to_second))
}

/// Seeds (of 100) where the return-layer centrality regressed on the
/// trade-layer centrality has a positive slope with `p < 0.05`.
pub fn coupling_detections(coupling: f64) -> usize {
    use econet_core::econometrics::{ols, DesignMatrix};
    use econet_core::gravity::{generate, GravityParams};
    use econet_core::netcore::{eigenvector_centrality, LayerMatrix, Normalization};
    use econet_core::timeseries::{log_returns, pearson_correlation};
    (0..100)
        .filter(|&seed| {
            let p = GravityParams {
                seed,
                coupling,
                ..Default::default()
            };
            let e = generate(&p, 250).unwrap();
            let rho = pearson_correlation(&log_returns(&e.prices).unwrap()).unwrap();
            let ret =
                eigenvector_centrality(&LayerMatrix::from_correlation(&rho), Normalization::MaxOne);
            let trade = eigenvector_centrality(&e.trade, Normalization::MaxOne).unwrap();
            let Ok(ret) = ret else { return false };
            let x = DesignMatrix::from_columns(&[("evc_trade", &trade.values)], true).unwrap();
            let fit = ols(&ret.values, &x).unwrap();
            fit.beta[0] > 0.0 && fit.p[0] < 0.05
        })
        .count()
}

/// Mean slope of OLS and 2SLS on an endogenous regressor with true slope 2,
/// averaged over `seeds`.
pub fn iv_and_ols_mean_slopes(seeds: std::ops::Range<u64>, n: usize) -> (f64, f64) {
    use econet_core::econometrics::{ols, two_stage_least_squares, DesignMatrix};
    let count = seeds.end - seeds.start;
    let (mut b_ols, mut b_iv) = (0.0, 0.0);
    for s in seeds {
        let mut r = rng(s);
        let mut z = Vec::with_capacity(n);
        let mut x = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        for _ in 0..n {
            let zi = normal(&mut r);
            let v = normal(&mut r);
            let u = 0.8 * v + 0.6 * normal(&mut r);
            let xi = zi + v;
            z.push(zi);
            x.push(xi);
            y.push(1.0 + 2.0 * xi + u);
        }
        let xd = DesignMatrix::from_columns(&[("x", &x)], true).unwrap();
        b_ols += ols(&y, &xd).unwrap().beta[0];
        let endog = DesignMatrix::from_columns(&[("x", &x)], false).unwrap();
        let inst = DesignMatrix::from_columns(&[("z", &z)], false).unwrap();
        let fit = two_stage_least_squares(
            &y,
            Some(&endog),
            &DesignMatrix::intercept_only(n),
            Some(&inst),
        )
        .unwrap();
        b_iv += fit.coef("x").unwrap();
    }
    (b_ols / count as f64, b_iv / count as f64)
}
