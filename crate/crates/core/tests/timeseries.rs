use econet_core::timeseries::{
    align_panel, log_returns, mean, pearson_correlation, sample_std, zscore, PricePanel, RawSeries,
    ReturnPanel,
};
use econet_core::Error;
use proptest::prelude::*;

fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("E{i}")).collect()
}

fn periods(n: usize) -> Vec<String> {
    (0..n).map(|t| format!("t{t:04}")).collect()
}

fn returns(rows: Vec<Vec<f64>>) -> ReturnPanel {
    let t = rows[0].len();
    ReturnPanel::new(ids(rows.len()), periods(t), rows).unwrap()
}

#[test]
#[allow(clippy::approx_constant)]
fn log_return_examples() {
    let one = |p: Vec<f64>| {
        let panel = PricePanel::new(ids(1), periods(p.len()), vec![p]).unwrap();
        log_returns(&panel).unwrap().returns()[0].clone()
    };
    assert!((one(vec![100.0, 110.0])[0] - 0.0953102).abs() < 1e-7);
    assert_eq!(one(vec![50.0, 50.0, 50.0]), vec![0.0, 0.0]);
    assert!((one(vec![100.0, 50.0])[0] + 0.6931472).abs() < 1e-7);
}

#[test]
fn log_returns_need_two_periods() {
    let panel = PricePanel::new(ids(1), periods(1), vec![vec![1.0]]).unwrap();
    assert_eq!(
        log_returns(&panel),
        Err(Error::TooShort { needed: 2, got: 1 })
    );
}

#[test]
#[allow(clippy::approx_constant)]
fn zscore_examples() {
    assert_eq!(zscore(&[1.0, 2.0, 3.0]).unwrap(), vec![-1.0, 0.0, 1.0]);
    assert!(matches!(
        zscore(&[5.0, 5.0, 5.0]),
        Err(Error::DegenerateVariance(_))
    ));
    let z = zscore(&[0.0, 10.0]).unwrap();
    assert!((z[0] + 0.70710678).abs() < 1e-8);
    assert!((z[1] - 0.70710678).abs() < 1e-8);
}

#[test]
fn correlation_examples() {
    let r = pearson_correlation(&returns(vec![vec![0.1, -0.2, 0.3, 0.0]; 2])).unwrap();
    assert_eq!(r.get(0, 1), 1.0);
    let r = pearson_correlation(&returns(vec![
        vec![0.1, -0.2, 0.3, 0.0],
        vec![-0.1, 0.2, -0.3, -0.0],
    ]))
    .unwrap();
    assert_eq!(r.get(0, 1), -1.0);
}

/// Two-pass covariance on the raw data: means first, then cross products.
fn two_pass_rho(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let cov: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - ma) * (y - mb))
        .sum::<f64>()
        / (n - 1.0);
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum::<f64>() / (n - 1.0);
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum::<f64>() / (n - 1.0);
    cov / (va * vb).sqrt()
}

#[test]
fn correlation_matches_two_pass_oracle() {
    let a = vec![1.0, 2.0, 3.0, 4.0];
    let b = vec![1.0, 3.0, 2.0, 5.0];
    let expected = two_pass_rho(&a, &b);
    // Σ(a−ā)(b−b̄) = 5.5, Σ(a−ā)² = 5, Σ(b−b̄)² = 8.75
    assert!((expected - 5.5 / 43.75f64.sqrt()).abs() < 1e-15);
    let r = pearson_correlation(&returns(vec![a, b])).unwrap();
    assert!((r.get(0, 1) - expected).abs() < 1e-12);
}

#[test]
fn correlation_names_degenerate_entity() {
    let err = pearson_correlation(&returns(vec![vec![0.1, 0.2, 0.3], vec![0.0; 3]])).unwrap_err();
    assert_eq!(err, Error::DegenerateVariance("E1".into()));
}

#[test]
fn alignment_is_listwise() {
    let raw = vec![
        RawSeries {
            entity: "A".into(),
            observations: vec![("d1".into(), 1.0), ("d2".into(), 2.0), ("d3".into(), 3.0)],
        },
        RawSeries {
            entity: "B".into(),
            observations: vec![("d3".into(), 6.0), ("d1".into(), 4.0)],
        },
    ];
    let p = align_panel(&raw).unwrap();
    assert_eq!(p.periods(), ["d1", "d3"]);
    assert_eq!(p.prices(), [vec![1.0, 3.0], vec![4.0, 6.0]]);

    let disjoint = vec![
        RawSeries {
            entity: "A".into(),
            observations: vec![("d1".into(), 1.0)],
        },
        RawSeries {
            entity: "B".into(),
            observations: vec![("d2".into(), 1.0)],
        },
    ];
    assert_eq!(align_panel(&disjoint), Err(Error::EmptyIntersection));
}

fn return_rows(n: usize, t: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-0.2f64..0.2, t), n)
}

proptest! {
    #[test]
    fn cumulated_returns_reproduce_prices(
        first in prop::collection::vec(1.0f64..1000.0, 3),
        rows in return_rows(3, 20),
    ) {
        let prices: Vec<Vec<f64>> = first
            .iter()
            .zip(&rows)
            .map(|(p0, r)| {
                let mut path = vec![*p0];
                for x in r {
                    path.push(path.last().unwrap() * x.exp());
                }
                path
            })
            .collect();
        let panel = PricePanel::new(ids(3), periods(21), prices.clone()).unwrap();
        let ret = log_returns(&panel).unwrap();
        for (i, row) in ret.returns().iter().enumerate() {
            let mut acc = 0.0;
            for (t, r) in row.iter().enumerate() {
                acc += r;
                let rebuilt = prices[i][0] * acc.exp();
                prop_assert!((rebuilt - prices[i][t + 1]).abs() <= 1e-10 * prices[i][t + 1]);
            }
        }
    }

    #[test]
    fn correlation_is_affine_invariant(
        rows in return_rows(4, 12),
        scale in prop::collection::vec(0.01f64..100.0, 4),
        shift in prop::collection::vec(-10.0f64..10.0, 4),
    ) {
        let base = pearson_correlation(&returns(rows.clone()));
        prop_assume!(base.is_ok());
        let base = base.unwrap();
        let moved: Vec<Vec<f64>> = rows
            .iter()
            .enumerate()
            .map(|(i, r)| r.iter().map(|x| scale[i] * x + shift[i]).collect())
            .collect();
        let other = pearson_correlation(&returns(moved)).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                prop_assert!((base.get(i, j) - other.get(i, j)).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn correlation_is_symmetric_with_unit_diagonal(rows in return_rows(5, 8)) {
        if let Ok(r) = pearson_correlation(&returns(rows)) {
            for i in 0..5 {
                prop_assert_eq!(r.get(i, i), 1.0);
                for j in 0..5 {
                    prop_assert_eq!(r.get(i, j), r.get(j, i));
                    prop_assert!(r.get(i, j).abs() <= 1.0);
                }
            }
        }
    }

    #[test]
    fn zscore_is_idempotent(v in prop::collection::vec(-1e3f64..1e3, 2..40)) {
        prop_assume!(sample_std(&v) > 1e-6);
        let z = zscore(&v).unwrap();
        prop_assert!(mean(&z).abs() <= 1e-12);
        prop_assert!((sample_std(&z) - 1.0).abs() <= 1e-12);
        let zz = zscore(&z).unwrap();
        for (a, b) in z.iter().zip(&zz) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }
}
