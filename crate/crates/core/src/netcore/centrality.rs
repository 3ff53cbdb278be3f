//! Eigenvector centrality by shifted power iteration.
//!
//! The iteration runs on `W + sI` where `s` is the Gershgorin bound that
//! makes the shifted matrix positive semidefinite. The largest algebraic
//! eigenvalue of `W` then dominates in magnitude, so correlation matrices,
//! signed matrices and bipartite flow graphs (whose spectrum is symmetric
//! around zero) all converge to the right eigenpair.

use serde::{Deserialize, Serialize};

use super::layer::{LayerKind, LayerMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Normalization {
    UnitL2,
    MaxOne,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityVector {
    pub entities: Vec<String>,
    pub values: Vec<f64>,
    pub eigenvalue: f64,
    pub normalization: Normalization,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerIteration {
    /// Stop when successive normalized iterates differ by less than this in L∞.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Relative gap below which the top two eigenvalues count as equal.
    pub degeneracy_tolerance: f64,
}

impl Default for PowerIteration {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 100_000,
            degeneracy_tolerance: 1e-10,
        }
    }
}

impl PowerIteration {
    /// Dominant (largest algebraic) eigenpair of a symmetric matrix. The
    /// eigenvector has unit L2 norm and a nonnegative entry sum.
    pub fn dominant_eigenpair(&self, w: &[Vec<f64>]) -> Result<(f64, Vec<f64>)> {
        let n = w.len();
        if n == 0 {
            return Err(Error::TooFewNodes { needed: 1, got: 0 });
        }
        if n == 1 {
            return Ok((w[0][0], vec![1.0]));
        }
        let shift = (0..n)
            .map(|i| {
                let off: f64 = (0..n).filter(|&j| j != i).map(|j| w[i][j].abs()).sum();
                off - w[i][i]
            })
            .fold(0.0_f64, f64::max);

        // A start vector that is not orthogonal to any eigenvector except on
        // a measure-zero set of inputs.
        let mut x: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * 0.618_033_988_749_895).fract())
            .collect();
        normalize_l2(&mut x);
        let mut y = vec![0.0; n];
        let mut converged = false;
        for _ in 0..self.max_iterations {
            shifted_product(w, shift, &x, &mut y);
            if normalize_l2(&mut y) == 0.0 {
                // x lies in the null space of W + sI; W = −sI on that span.
                converged = true;
                break;
            }
            let diff = x
                .iter()
                .zip(&y)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            std::mem::swap(&mut x, &mut y);
            if diff < self.tolerance {
                converged = true;
                break;
            }
        }
        let lambda = rayleigh_quotient(w, &x);
        if let Some(lambda2) = self.second_eigenvalue_if_tied(w, shift, lambda, &x) {
            return Err(Error::DegenerateDominantPair {
                lambda1: lambda,
                lambda2,
            });
        }
        if !converged {
            return Err(Error::NoConvergence {
                iterations: self.max_iterations,
            });
        }
        if x.iter().sum::<f64>() < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        Ok((lambda, x))
    }

    /// Power iteration restricted to the orthogonal complement of `e`. The
    /// Rayleigh quotient there is a lower bound on λ₂ that increases
    /// monotonically, so reaching λ₁ proves a tie.
    fn second_eigenvalue_if_tied(
        &self,
        w: &[Vec<f64>],
        shift: f64,
        lambda: f64,
        e: &[f64],
    ) -> Option<f64> {
        let n = w.len();
        let tol = self.degeneracy_tolerance * lambda.abs().max(1.0);
        let mut z: Vec<f64> = (0..n)
            .map(|i| 1.0 + ((i as f64 + 1.0) * 0.414_213_562_373_095).fract())
            .collect();
        let mut out = vec![0.0; n];
        let mut best = f64::NEG_INFINITY;
        for _ in 0..2_000 {
            project_out(&mut z, e);
            if normalize_l2(&mut z) == 0.0 {
                return None;
            }
            let rq = rayleigh_quotient(w, &z);
            best = best.max(rq);
            if lambda - best <= tol {
                return Some(best);
            }
            shifted_product(w, shift, &z, &mut out);
            std::mem::swap(&mut z, &mut out);
        }
        None
    }
}

fn shifted_product(w: &[Vec<f64>], shift: f64, x: &[f64], out: &mut [f64]) {
    for (i, row) in w.iter().enumerate() {
        out[i] = row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + shift * x[i];
    }
}

fn normalize_l2(x: &mut [f64]) -> f64 {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
    norm
}

fn project_out(z: &mut [f64], e: &[f64]) {
    let dot: f64 = z.iter().zip(e).map(|(a, b)| a * b).sum();
    z.iter_mut().zip(e).for_each(|(a, b)| *a -= dot * b);
}

fn rayleigh_quotient(w: &[Vec<f64>], x: &[f64]) -> f64 {
    let num: f64 = w
        .iter()
        .zip(x)
        .map(|(row, xi)| xi * row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>())
        .sum();
    let den: f64 = x.iter().map(|v| v * v).sum();
    num / den
}

/// Nodes with at least one nonzero link to another node.
pub fn linked_nodes(w: &[Vec<f64>]) -> Vec<usize> {
    (0..w.len())
        .filter(|&i| (0..w.len()).any(|j| j != i && w[i][j] != 0.0))
        .collect()
}

pub fn eigenvector_centrality(
    layer: &LayerMatrix,
    normalization: Normalization,
) -> Result<CentralityVector> {
    eigenvector_centrality_with(layer, normalization, &PowerIteration::default())
}

/// Isolated nodes of flow layers get centrality 0 and are excluded from the
/// iteration; correlation layers always use every node.
pub fn eigenvector_centrality_with(
    layer: &LayerMatrix,
    normalization: Normalization,
    solver: &PowerIteration,
) -> Result<CentralityVector> {
    let w = layer.weights();
    let n = w.len();
    if n == 0 {
        return Err(Error::TooFewNodes { needed: 1, got: 0 });
    }
    let active: Vec<usize> = match layer.kind() {
        LayerKind::ReturnCorrelation => (0..n).collect(),
        _ => linked_nodes(w),
    };
    if active.is_empty() {
        return Err(Error::InvalidInput(format!(
            "{} layer has no links",
            layer.kind()
        )));
    }
    let sub: Vec<Vec<f64>> = active
        .iter()
        .map(|&i| active.iter().map(|&j| w[i][j]).collect())
        .collect();
    let (eigenvalue, vector) = solver.dominant_eigenpair(&sub)?;
    let mut values = vec![0.0; n];
    for (k, &i) in active.iter().enumerate() {
        values[i] = vector[k];
    }
    apply_normalization(&mut values, normalization);
    Ok(CentralityVector {
        entities: layer.entities().to_vec(),
        values,
        eigenvalue,
        normalization,
    })
}

/// Rescale a vector with nonnegative entry sum to the requested normalization.
pub fn apply_normalization(values: &mut [f64], normalization: Normalization) {
    let scale = match normalization {
        Normalization::UnitL2 => values.iter().map(|v| v * v).sum::<f64>().sqrt(),
        Normalization::MaxOne => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    };
    if scale > 0.0 {
        values.iter_mut().for_each(|v| *v /= scale);
    }
}
