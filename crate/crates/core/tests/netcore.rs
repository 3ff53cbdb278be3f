mod common;

use common::{exhaustive_mst_weight, jacobi_eigen, random_symmetric, rng, uniform};
use econet_core::netcore::export::{layer_edge_csv, tree_dot, tree_edge_csv};
use econet_core::netcore::{
    bands_of, correlation_distance, distance_from_correlation, eigenvector_centrality,
    minimum_spanning_tree, spanning_tree_of, Band, DistanceMatrix, LayerKind, LayerMatrix,
    Normalization, PowerIteration,
};
use econet_core::timeseries::CorrelationMatrix;
use econet_core::Error;
use proptest::prelude::*;

fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("N{i}")).collect()
}

fn random_distances(r: &mut rand_chacha::ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    let mut d = random_symmetric(r, n, 0.0, 2.0);
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    d
}

/// Oracle eigenvector for the largest eigenvalue, signed so Σe ≥ 0.
fn oracle_top(w: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let (vals, vecs) = jacobi_eigen(w);
    let k = vals.len() - 1;
    let mut v = vecs[k].clone();
    if v.iter().sum::<f64>() < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    (vals[k], v)
}

#[test]
fn distance_endpoints_are_exact() {
    assert_eq!(correlation_distance(1.0), 0.0);
    assert_eq!(correlation_distance(0.5), 1.0);
    assert_eq!(correlation_distance(-1.0), 2.0);
}

#[test]
fn distance_is_monotone_decreasing() {
    let grid: Vec<f64> = (0..=200).map(|k| -1.0 + k as f64 / 100.0).collect();
    for w in grid.windows(2) {
        assert!(correlation_distance(w[0]) > correlation_distance(w[1]));
    }
}

#[test]
fn distance_matrix_from_correlation() {
    let rho = CorrelationMatrix::new(
        ids(3),
        vec![
            vec![1.0, 0.5, -1.0],
            vec![0.5, 1.0, 0.0],
            vec![-1.0, 0.0, 1.0],
        ],
    )
    .unwrap();
    let d = distance_from_correlation(&rho);
    assert_eq!(d.get(0, 1), 1.0);
    assert_eq!(d.get(0, 2), 2.0);
    assert_eq!(d.get(1, 2), 2f64.sqrt());
    for i in 0..3 {
        assert_eq!(d.get(i, i), 0.0);
    }
}

#[test]
fn mst_three_nodes() {
    // 3 exceeds the correlation-distance range, so use the general entry point.
    let t = spanning_tree_of(
        &["A".into(), "B".into(), "C".into()],
        &[
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 3.0],
            vec![2.0, 3.0, 0.0],
        ],
    )
    .unwrap();
    assert_eq!(t.edge_set(), vec![(0, 1), (0, 2)]);
    assert_eq!(t.total_weight(), 3.0);
    assert_eq!(tree_edge_csv(&t), "src,dst,weight\nA,B,1\nA,C,2\n");
}

#[test]
fn mst_equal_distances_is_a_star_on_the_first_node() {
    let n = 5;
    let d: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
        .collect();
    let t = spanning_tree_of(&ids(n), &d).unwrap();
    assert_eq!(t.edge_set(), vec![(0, 1), (0, 2), (0, 3), (0, 4)]);
}

#[test]
fn mst_needs_two_nodes() {
    assert_eq!(
        spanning_tree_of(&ids(1), &[vec![0.0]]),
        Err(Error::TooFewNodes { needed: 2, got: 1 })
    );
}

#[test]
fn mst_matches_cayley_enumeration_on_six_nodes() {
    let mut r = rng(11);
    for _ in 0..40 {
        let d = random_distances(&mut r, 6);
        let t = spanning_tree_of(&ids(6), &d).unwrap();
        assert_eq!(t.edges.len(), 5);
        let best = exhaustive_mst_weight(&d);
        assert!(
            (t.total_weight() - best).abs() <= 1e-12,
            "{} vs {best}",
            t.total_weight()
        );
    }
}

#[test]
fn two_by_two_correlation_eigenpair() {
    let layer = LayerMatrix::new(
        ids(2),
        LayerKind::ReturnCorrelation,
        vec![vec![1.0, 0.5], vec![0.5, 1.0]],
    )
    .unwrap();
    let c = eigenvector_centrality(&layer, Normalization::UnitL2).unwrap();
    assert!((c.eigenvalue - 1.5).abs() < 1e-12);
    for v in &c.values {
        assert!((v - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }
}

#[test]
fn star_graph_hub_dominates() {
    let mut w = vec![vec![0.0; 4]; 4];
    for leaf in 1..4 {
        w[0][leaf] = 1.0;
        w[leaf][0] = 1.0;
    }
    let layer = LayerMatrix::new(ids(4), LayerKind::Trade, w).unwrap();
    let c = eigenvector_centrality(&layer, Normalization::MaxOne).unwrap();
    assert_eq!(c.values[0], 1.0);
    assert!(c.values[1] < 1.0);
    assert!((c.values[1] - c.values[2]).abs() < 1e-10);
    assert!((c.values[2] - c.values[3]).abs() < 1e-10);
    assert!((c.eigenvalue - 3f64.sqrt()).abs() < 1e-10);
}

#[test]
fn isolated_nodes_get_zero() {
    let w = vec![
        vec![0.0, 2.0, 1.0, 0.0],
        vec![2.0, 0.0, 1.0, 0.0],
        vec![1.0, 1.0, 0.0, 0.0],
        vec![0.0, 0.0, 0.0, 0.0],
    ];
    let layer = LayerMatrix::new(ids(4), LayerKind::Fdi, w).unwrap();
    let c = eigenvector_centrality(&layer, Normalization::UnitL2).unwrap();
    assert_eq!(c.values[3], 0.0);
    assert!(c.values[..3].iter().all(|v| *v > 0.0));
}

#[test]
fn tied_dominant_pair_is_reported() {
    // Two disconnected equal edges: eigenvalue 1 twice.
    let w = vec![
        vec![0.0, 1.0, 0.0, 0.0],
        vec![1.0, 0.0, 0.0, 0.0],
        vec![0.0, 0.0, 0.0, 1.0],
        vec![0.0, 0.0, 1.0, 0.0],
    ];
    let layer = LayerMatrix::new(ids(4), LayerKind::Trade, w).unwrap();
    assert!(matches!(
        eigenvector_centrality(&layer, Normalization::UnitL2),
        Err(Error::DegenerateDominantPair { .. })
    ));
}

#[test]
fn flow_layers_are_symmetrized() {
    let layer = LayerMatrix::new(
        ids(2),
        LayerKind::Trade,
        vec![vec![0.0, 4.0], vec![2.0, 0.0]],
    )
    .unwrap();
    assert_eq!(layer.weights(), [vec![0.0, 3.0], vec![3.0, 0.0]]);
    assert_eq!(layer_edge_csv(&layer), "src,dst,weight\nN0,N1,3\n");
}

#[test]
fn nonnegative_five_by_five_matches_jacobi() {
    let mut r = rng(5);
    for _ in 0..200 {
        let w = random_symmetric(&mut r, 5, 0.0, 1.0);
        let (lambda, e) = PowerIteration::default().dominant_eigenpair(&w).unwrap();
        let (ol, ov) = oracle_top(&w);
        assert!((lambda - ol).abs() <= 1e-8);
        for (a, b) in e.iter().zip(&ov) {
            assert!((a - b).abs() <= 1e-8);
        }
        // Perron–Frobenius: a positive matrix has a positive eigenvector.
        assert!(e.iter().all(|v| *v > 0.0));
    }
}

#[test]
fn eigen_residual_bound() {
    let mut r = rng(9);
    for n in 2..=12 {
        let w = random_symmetric(&mut r, n, -1.0, 1.0);
        let (lambda, e) = PowerIteration::default().dominant_eigenpair(&w).unwrap();
        let fro: f64 = w.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
        let res: f64 = (0..n)
            .map(|i| {
                let we: f64 = (0..n).map(|j| w[i][j] * e[j]).sum();
                (we - lambda * e[i]).powi(2)
            })
            .sum::<f64>()
            .sqrt();
        assert!(res <= 1e-8 * fro, "n={n} residual {res}");
        assert!(e.iter().sum::<f64>() >= 0.0);
    }
}

#[test]
fn band_examples() {
    assert_eq!(
        bands_of(&[0.1, 0.5, 0.9]).unwrap(),
        vec![Band::Low, Band::Mid, Band::High]
    );
    assert_eq!(bands_of(&[0.3; 5]).unwrap(), vec![Band::High; 5]);
    let b = bands_of(&[0.6, 0.1, 0.5, 0.2, 0.4, 0.3]).unwrap();
    for band in [Band::Low, Band::Mid, Band::High] {
        assert_eq!(b.iter().filter(|x| **x == band).count(), 2);
    }
    assert_eq!(
        bands_of(&[1.0, 2.0]),
        Err(Error::TooFewNodes { needed: 3, got: 2 })
    );
}

#[test]
fn dot_carries_bands() {
    let d = DistanceMatrix::new(
        ids(3),
        vec![
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.5],
            vec![2.0, 1.5, 0.0],
        ],
    )
    .unwrap();
    let t = minimum_spanning_tree(&d).unwrap();
    let dot = tree_dot(&t, "mst", Some(&[Band::Low, Band::Mid, Band::High]));
    assert!(dot.starts_with("graph \"mst\" {\n"));
    assert!(dot.contains("\"N2\" [band=high];"));
    assert!(dot.contains("\"N0\" -- \"N1\" [weight=1];"));
    assert!(dot.ends_with("}\n"));
}

fn symmetric_strategy(n: usize, lo: f64, hi: f64) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(lo..hi, n * (n + 1) / 2).prop_map(move |upper| {
        let mut w = vec![vec![0.0; n]; n];
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                w[i][j] = upper[k];
                w[j][i] = upper[k];
                k += 1;
            }
        }
        w
    })
}

proptest! {
    #[test]
    fn evc_is_scale_invariant(w in symmetric_strategy(6, 0.01, 1.0), c in 0.001f64..1000.0) {
        let mut w = w;
        for (i, row) in w.iter_mut().enumerate() {
            row[i] = 0.0;
        }
        let layer = LayerMatrix::new(ids(6), LayerKind::Trade, w).unwrap();
        let a = eigenvector_centrality(&layer, Normalization::UnitL2).unwrap();
        let b = eigenvector_centrality(&layer.scaled(c).unwrap(), Normalization::UnitL2).unwrap();
        prop_assert!((b.eigenvalue - c * a.eigenvalue).abs() <= 1e-10 * (c * a.eigenvalue).abs());
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
        let norm: f64 = a.values.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!((norm - 1.0).abs() <= 1e-10);
        let m = eigenvector_centrality(&layer, Normalization::MaxOne).unwrap();
        prop_assert_eq!(m.values.iter().copied().fold(f64::MIN, f64::max), 1.0);
    }

    #[test]
    fn mst_edge_set_survives_squaring(d in symmetric_strategy(7, 0.0, 2.0)) {
        let mut d = d;
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0.0;
        }
        let sq: Vec<Vec<f64>> = d.iter().map(|r| r.iter().map(|x| x * x).collect()).collect();
        let a = spanning_tree_of(&ids(7), &d).unwrap();
        let b = spanning_tree_of(&ids(7), &sq).unwrap();
        prop_assert_eq!(a.edge_set(), b.edge_set());
    }

    #[test]
    fn mst_is_a_spanning_tree(d in symmetric_strategy(8, 0.0, 2.0)) {
        let t = spanning_tree_of(&ids(8), &d).unwrap();
        prop_assert_eq!(t.edges.len(), 7);
        // Connected with N−1 edges means acyclic.
        let mut reach = [false; 8];
        reach[0] = true;
        for _ in 0..8 {
            for e in &t.edges {
                if reach[e.src] || reach[e.dst] {
                    reach[e.src] = true;
                    reach[e.dst] = true;
                }
            }
        }
        prop_assert!(reach.iter().all(|x| *x));
    }

    #[test]
    fn tercile_sizes_differ_by_at_most_one(v in prop::collection::hash_set(0u32..1_000_000, 3..40)) {
        let values: Vec<f64> = v.into_iter().map(f64::from).collect();
        let b = bands_of(&values).unwrap();
        let counts: Vec<usize> = [Band::Low, Band::Mid, Band::High]
            .iter()
            .map(|band| b.iter().filter(|x| *x == band).count())
            .collect();
        let max = *counts.iter().max().unwrap();
        let min = *counts.iter().min().unwrap();
        prop_assert!(max - min <= 1, "{counts:?}");
    }
}

#[test]
fn random_signed_matrices_match_jacobi() {
    let mut r = rng(3);
    for _ in 0..200 {
        let n = 2 + (uniform(&mut r, 0.0, 11.0) as usize).min(10);
        let w = random_symmetric(&mut r, n, -1.0, 1.0);
        let (lambda, e) = PowerIteration::default().dominant_eigenpair(&w).unwrap();
        let (ol, ov) = oracle_top(&w);
        assert!((lambda - ol).abs() <= 1e-8);
        let err = e
            .iter()
            .zip(&ov)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-8, "n={n} err={err}");
    }
}
