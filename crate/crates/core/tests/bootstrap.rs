mod support;

use geomedian::bootstrap::{
    multiplier_mean, multiplier_spatial_median, replicate_signs, BootstrapTarget,
};
use geomedian::{
    bootstrap_mean, bootstrap_spatial_median, quantile, spatial_median, with_workers,
    BootstrapDraws, Sample64, SolverConfig,
};
use support::{all_signs, gaussian_rows, ks_distance, max_abs, median_oracle, rng, upper_quantile};

fn cfg() -> SolverConfig<f64> {
    SolverConfig::default()
}

fn residual_rows(sample: &Sample64, center: &[f64]) -> Vec<Vec<f64>> {
    sample.rows().map(|x| x.iter().zip(center).map(|(a, c)| a - c).collect()).collect()
}

fn signed(rows: &[Vec<f64>], signs: &[bool]) -> Vec<Vec<f64>> {
    rows.iter()
        .zip(signs)
        .map(|(r, &plus)| r.iter().map(|&v| if plus { v } else { -v }).collect())
        .collect()
}

fn iqr(values: &[f64]) -> f64 {
    upper_quantile(values, 0.75) - upper_quantile(values, 0.25)
}

#[test]
fn median_bootstrap_matches_exact_enumeration() {
    let mut r = rng(30);
    let sample = Sample64::from_rows(&gaussian_rows(&mut r, 8, 2)).unwrap();
    let fit = spatial_median(&sample, &cfg()).unwrap();
    let res = residual_rows(&sample, &fit.theta_hat);
    let sqrt_n = 8f64.sqrt();
    let exact: Vec<f64> =
        all_signs(8).map(|z| sqrt_n * max_abs(&median_oracle(&signed(&res, &z)))).collect();
    assert_eq!(exact.len(), 256);

    let draws = bootstrap_spatial_median(&sample, &fit, 10_000, 7, &cfg()).unwrap();
    let ks = ks_distance(&draws.stats, &exact);
    assert!(ks <= 0.03, "KS distance {ks}");
    let tol = 0.05 * iqr(&exact);
    for level in [0.90, 0.95] {
        let got = quantile(&draws, level).unwrap();
        let want = upper_quantile(&exact, level);
        assert!((got - want).abs() <= tol, "level {level}: {got} vs {want} (tol {tol})");
    }
}

#[test]
fn each_replicate_solves_its_own_signed_problem() {
    let mut r = rng(31);
    let sample = Sample64::from_rows(&gaussian_rows(&mut r, 9, 3)).unwrap();
    let fit = spatial_median(&sample, &cfg()).unwrap();
    let res = residual_rows(&sample, &fit.theta_hat);
    let draws = bootstrap_spatial_median(&sample, &fit, 20, 3, &cfg()).unwrap();
    for (b, &stat) in draws.stats.iter().enumerate() {
        let z = replicate_signs(3, BootstrapTarget::SpatialMedian, b, 9);
        let want = 3.0 * max_abs(&median_oracle(&signed(&res, &z)));
        assert!((stat - want).abs() <= 1e-6, "replicate {b}: {stat} vs {want}");
    }
}

#[test]
fn mean_bootstrap_matches_exact_enumeration() {
    let mut r = rng(32);
    let sample = Sample64::from_rows(&gaussian_rows(&mut r, 10, 3)).unwrap();
    let res = residual_rows(&sample, &sample.mean());
    let sqrt_n = 10f64.sqrt();
    let exact: Vec<f64> = all_signs(10)
        .map(|z| {
            let s = signed(&res, &z);
            let m: Vec<f64> = (0..3).map(|j| s.iter().map(|x| x[j]).sum::<f64>() / 10.0).collect();
            sqrt_n * max_abs(&m)
        })
        .collect();
    let draws = bootstrap_mean(&sample, 10_000, 8).unwrap();
    let ks = ks_distance(&draws.stats, &exact);
    assert!(ks <= 0.03, "KS distance {ks}");
}

#[test]
fn mirror_pair_mean_law() {
    // residuals ±r: the multiplier mean is 0 or ±r with probabilities 1/2, 1/4, 1/4
    let sample = Sample64::from_rows(&[[1.0, -2.0], [-1.0, 2.0]]).unwrap();
    let b = 4000;
    let draws = bootstrap_mean(&sample, b, 5).unwrap();
    let big = 2f64.sqrt() * 2.0;
    let zeros = draws.stats.iter().filter(|&&s| s == 0.0).count();
    let bigs = draws.stats.iter().filter(|&&s| (s - big).abs() < 1e-12).count();
    assert_eq!(zeros + bigs, b);
    let sigma = (0.25 / b as f64).sqrt();
    let freq = zeros as f64 / b as f64;
    assert!((freq - 0.5).abs() <= 3.0 * sigma, "P(0) estimated as {freq}");
}

#[test]
fn draws_do_not_depend_on_worker_count() {
    let mut r = rng(33);
    let sample = Sample64::from_rows(&gaussian_rows(&mut r, 40, 25)).unwrap();
    let fit = spatial_median(&sample, &cfg()).unwrap();
    let run = |w: usize| -> (BootstrapDraws<f64>, BootstrapDraws<f64>) {
        with_workers(w, || {
            (
                bootstrap_spatial_median(&sample, &fit, 300, 11, &cfg()).unwrap(),
                bootstrap_mean(&sample, 300, 11).unwrap(),
            )
        })
        .unwrap()
    };
    let one = run(1);
    let four = run(4);
    let bits = |d: &BootstrapDraws<f64>| d.stats.iter().map(|s| s.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&one.0), bits(&four.0));
    assert_eq!(bits(&one.1), bits(&four.1));
    assert_eq!(run(1).0, one.0);
    assert_ne!(one.0.stats, one.1.stats);
}

#[test]
fn draws_are_translation_invariant() {
    let mut r = rng(34);
    let sample = Sample64::from_rows(&gaussian_rows(&mut r, 30, 6)).unwrap();
    let shifted = sample.translate(&[5.0, -3.0, 0.5, 2.0, -7.0, 1.0]).unwrap();
    let a_fit = spatial_median(&sample, &cfg()).unwrap();
    let b_fit = spatial_median(&shifted, &cfg()).unwrap();
    let a = bootstrap_spatial_median(&sample, &a_fit, 200, 2, &cfg()).unwrap();
    let b = bootstrap_spatial_median(&shifted, &b_fit, 200, 2, &cfg()).unwrap();
    for (x, y) in a.stats.iter().zip(&b.stats) {
        assert!((x - y).abs() <= 1e-9, "{x} vs {y}");
    }
    let a = bootstrap_mean(&sample, 200, 2).unwrap();
    let b = bootstrap_mean(&shifted, 200, 2).unwrap();
    for (x, y) in a.stats.iter().zip(&b.stats) {
        assert!((x - y).abs() <= 1e-9, "{x} vs {y}");
    }
}

#[test]
fn negating_residuals_equals_flipping_signs() {
    let mut r = rng(35);
    let rows = gaussian_rows(&mut r, 12, 4);
    let flat: Vec<f64> = rows.concat();
    let neg: Vec<f64> = flat.iter().map(|v| -v).collect();
    for b in 0..10 {
        let z = replicate_signs(9, BootstrapTarget::SpatialMedian, b, 12);
        let flipped: Vec<bool> = z.iter().map(|s| !s).collect();
        let x = multiplier_spatial_median(&neg, 4, &z, &cfg()).unwrap();
        let y = multiplier_spatial_median(&flat, 4, &flipped, &cfg()).unwrap();
        assert_eq!(x, y);
        assert_eq!(multiplier_mean(&neg, 4, &z), multiplier_mean(&flat, 4, &flipped));
    }
}

#[test]
fn quantile_is_ceiling_order_statistic() {
    let draws = BootstrapDraws {
        stats: (1..=100).map(f64::from).collect(),
        seed: 0,
        target: BootstrapTarget::Mean,
        scheme: geomedian::MultiplierScheme::Rademacher,
        n: 4,
    };
    assert_eq!(quantile(&draws, 0.95).unwrap(), 95.0);
    assert_eq!(quantile(&draws, 0.951).unwrap(), 96.0);
    assert_eq!(quantile(&draws, 0.001).unwrap(), 1.0);
}
