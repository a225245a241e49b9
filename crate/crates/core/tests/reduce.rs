use cuelex::reduce::{minkowski, mds, pca, MdsOptions, PcaOptions, ScoreMatrix};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ScoreMatrix<f64> {
    let values = (0..rows * cols).map(|_| rng.gen_range(0.0..3.0)).collect();
    ScoreMatrix::new(
        (0..rows).map(|r| format!("w{r}")).collect(),
        (0..cols).map(|c| format!("c{c}")).collect(),
        values,
    )
    .unwrap()
}

/// Cyclic Jacobi eigenvalues of a symmetric matrix, descending.
#[allow(clippy::needless_range_loop)]
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j].powi(2)).sum();
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let (c, s) = (1.0 / (t * t + 1.0).sqrt(), t / (t * t + 1.0).sqrt());
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

fn correlation(m: &ScoreMatrix<f64>) -> Vec<Vec<f64>> {
    let (n, p) = (m.rows(), m.cols());
    let cols: Vec<Vec<f64>> = (0..p).map(|c| (0..n).map(|r| m.get(r, c)).collect()).collect();
    let z: Vec<Vec<f64>> = cols
        .iter()
        .map(|c| {
            let mean = c.iter().sum::<f64>() / n as f64;
            let sd = (c.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
            c.iter().map(|x| (x - mean) / sd).collect()
        })
        .collect();
    (0..p)
        .map(|i| (0..p).map(|j| z[i].iter().zip(&z[j]).map(|(a, b)| a * b).sum::<f64>() / (n - 1) as f64).collect())
        .collect()
}

#[test]
fn pca_eigenvalues_match_jacobi() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    for _ in 0..10 {
        let m = random_matrix(&mut rng, 30, 6);
        let r = pca(&m, &PcaOptions { n_components: 6, standardize: true }).unwrap();
        let want = jacobi_eigenvalues(correlation(&m));
        for (g, w) in r.explained_variance.iter().zip(&want) {
            assert!((g - w).abs() < 1e-9, "{g} vs {w}");
        }
        assert!((r.explained_variance_ratio.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn pca_full_rank_reconstructs_standardized_input() {
    let mut rng = ChaCha8Rng::seed_from_u64(52);
    let m = random_matrix(&mut rng, 12, 4);
    let r = pca(&m, &PcaOptions { n_components: 4, standardize: true }).unwrap();
    let rec = r.reconstruct();
    for (i, row) in rec.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            let z = (m.get(i, c) - r.mean[c]) / r.scale[c];
            assert!((v - z).abs() < 1e-9);
        }
    }
}

#[test]
fn mds_stress_trace_never_increases() {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    for p in [1.0, 2.0, 3.0, f64::INFINITY] {
        let m = random_matrix(&mut rng, 8, 7);
        let r = mds(&m, &MdsOptions { p, ..Default::default() }).unwrap();
        assert!(r.stress_trace.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        assert_eq!(r.stress, *r.stress_trace.last().unwrap());
        for d in 0..2 {
            assert!(r.coordinates.iter().map(|c| c[d]).sum::<f64>().abs() < 1e-9);
        }
    }
}

fn vec_strategy(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0f64..100.0, len)
}

proptest! {
    #[test]
    fn minkowski_is_a_metric(a in vec_strategy(6), b in vec_strategy(6), c in vec_strategy(6), p in 1.0f64..6.0) {
        let d = |x: &[f64], y: &[f64]| minkowski(x, y, p).unwrap();
        prop_assert_eq!(d(&a, &a), 0.0);
        prop_assert!(d(&a, &b) >= 0.0);
        prop_assert!((d(&a, &b) - d(&b, &a)).abs() < 1e-9);
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-9);
        let inf = minkowski(&a, &b, f64::INFINITY).unwrap();
        prop_assert!(inf <= d(&a, &b) + 1e-9);
    }

    #[test]
    fn pca_ignores_row_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_matrix(&mut rng, 15, 5);
        let mut order: Vec<usize> = (0..15).collect();
        order.shuffle(&mut rng);
        let rows: Vec<Vec<f64>> = order.iter().map(|&r| m.row(r).to_vec()).collect();
        let labels = order.iter().map(|&r| m.row_labels()[r].clone()).collect();
        let shuffled = ScoreMatrix::from_rows(labels, m.col_labels().to_vec(), &rows).unwrap();
        let opts = PcaOptions { n_components: 3, standardize: true };
        let (a, b) = (pca(&m, &opts).unwrap(), pca(&shuffled, &opts).unwrap());
        for (x, y) in a.explained_variance.iter().zip(&b.explained_variance) {
            prop_assert!((x - y).abs() < 1e-9);
        }
        for (pos, &orig) in order.iter().enumerate() {
            for j in 0..3 {
                prop_assert!((a.loadings[orig][j] - b.loadings[pos][j]).abs() < 1e-7);
            }
        }
    }
}
