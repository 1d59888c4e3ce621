//! Property and invariance suites: inverse-function roundtrips, partition
//! laws, metric range conformance, and translation/scale behavior.

use proptest::prelude::*;

use uqcal::binning::{partition_equal_count_by_sigma, partition_equal_width_by_variance};
use uqcal::gaussian::{standard_normal_cdf, standard_normal_quantile};
use uqcal::metrics::{self, names, MetricConfig};
use uqcal::{ConfidenceLevels, GaussianPredictionSet};

fn gaussian_set(y: Vec<f64>, y_hat: Vec<f64>, sigma: Vec<f64>) -> GaussianPredictionSet {
    GaussianPredictionSet::new(y, y_hat, sigma).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cdf_and_quantile_are_mutual_inverses(p in 1e-7f64..=0.9999999f64) {
        let q = standard_normal_quantile(p).unwrap();
        prop_assert!((standard_normal_cdf(q) - p).abs() < 1e-9);
    }

    #[test]
    fn quantile_is_monotone(p in 1e-7f64..0.999999f64, step in 1e-7f64..1e-3f64) {
        let hi = (p + step).min(1.0 - 1e-9);
        let a = standard_normal_quantile(p).unwrap();
        let b = standard_normal_quantile(hi).unwrap();
        prop_assert!(a <= b);
    }

    #[test]
    fn intervals_widen_with_level(
        mu in -50.0f64..50.0,
        sigma in 0.01f64..20.0,
        lo in 0.05f64..0.90,
        bump in 0.01f64..0.09,
    ) {
        let preds = gaussian_set(vec![mu], vec![mu], vec![sigma]);
        let narrow = preds.to_intervals(lo).unwrap();
        let wide = preds.to_intervals(lo + bump).unwrap();
        prop_assert!(wide.upper()[0] - wide.lower()[0] >= narrow.upper()[0] - narrow.lower()[0]);
    }

    #[test]
    fn pit_is_affine_invariant(
        ys in prop::collection::vec(-20.0f64..20.0, 1..20),
        shifts in prop::collection::vec(-3.0f64..3.0, 1..20),
        scale in 0.1f64..10.0,
        offset in -100.0f64..100.0,
    ) {
        let n = ys.len().min(shifts.len());
        let y: Vec<f64> = ys[..n].to_vec();
        let y_hat: Vec<f64> = y.iter().zip(&shifts[..n]).map(|(a, s)| a + s).collect();
        let sigma = vec![1.7; n];
        let base = gaussian_set(y.clone(), y_hat.clone(), sigma.clone());
        let transformed = gaussian_set(
            y.iter().map(|v| scale * v + offset).collect(),
            y_hat.iter().map(|v| scale * v + offset).collect(),
            sigma.iter().map(|v| scale * v).collect(),
        );
        for (a, b) in base.pit().iter().zip(transformed.pit()) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn equal_count_partition_is_permutation_covariant(
        base in prop::collection::vec(0.0f64..1000.0, 4..40),
        n_bins in 1usize..5,
    ) {
        // distinct sigmas so stable tie-breaking cannot interfere
        let mut sigma = base.clone();
        sigma.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sigma.dedup();
        prop_assume!(sigma.len() >= n_bins);
        // reverse as the permutation: index i maps to n-1-i
        let n = sigma.len();
        let reversed: Vec<f64> = sigma.iter().rev().copied().collect();
        let p1 = partition_equal_count_by_sigma(&sigma, n_bins).unwrap();
        let p2 = partition_equal_count_by_sigma(&reversed, n_bins).unwrap();
        for (b1, b2) in p1.bins().iter().zip(p2.bins()) {
            let mapped: Vec<usize> = b1.iter().map(|&i| n - 1 - i).collect();
            let mut sorted_mapped = mapped.clone();
            sorted_mapped.sort_unstable();
            let mut sorted_b2 = b2.clone();
            sorted_b2.sort_unstable();
            prop_assert_eq!(sorted_mapped, sorted_b2);
        }
    }

    #[test]
    fn partitions_conserve_samples_and_reject_empties(
        sigma in prop::collection::vec(0.01f64..100.0, 1..50),
        n_bins in 1usize..12,
    ) {
        if n_bins <= sigma.len() {
            let p = partition_equal_count_by_sigma(&sigma, n_bins).unwrap();
            prop_assert_eq!(p.total(), sigma.len());
            prop_assert!(p.bins().iter().all(|b| !b.is_empty()));
        }
        let variance: Vec<f64> = sigma.iter().map(|s| s * s).collect();
        let p = partition_equal_width_by_variance(&variance, n_bins).unwrap();
        prop_assert_eq!(p.total(), sigma.len());
        prop_assert!(p.bins().iter().all(|b| !b.is_empty()));
    }

    #[test]
    fn equal_count_partition_only_sees_ranks(
        base in prop::collection::vec(0.01f64..5.0, 4..30),
        n_bins in 1usize..4,
    ) {
        let mut sigma = base.clone();
        sigma.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sigma.dedup();
        prop_assume!(sigma.len() >= n_bins);
        // exp is strictly monotone, so ranks are unchanged
        let transformed: Vec<f64> = sigma.iter().map(|s| s.exp()).collect();
        let p1 = partition_equal_count_by_sigma(&sigma, n_bins).unwrap();
        let p2 = partition_equal_count_by_sigma(&transformed, n_bins).unwrap();
        prop_assert_eq!(p1.bins(), p2.bins());
    }

    #[test]
    fn metric_ranges_conform(
        raw in prop::collection::vec((-30.0f64..30.0, -30.0f64..30.0, 0.05f64..15.0), 10..60),
    ) {
        let y: Vec<f64> = raw.iter().map(|t| t.0).collect();
        let y_hat: Vec<f64> = raw.iter().map(|t| t.1).collect();
        let sigma: Vec<f64> = raw.iter().map(|t| t.2).collect();
        let preds = gaussian_set(y, y_hat, sigma);
        let cfg = MetricConfig::default();
        let report = metrics::evaluate_all(&preds, &cfg).unwrap();

        for name in [names::PICP, names::ECPE, names::QCE, names::CALS_RMSE] {
            let v = report.get(name).unwrap();
            prop_assert!((0.0..=1.0).contains(&v), "{} = {} out of [0,1]", name, v);
        }
        for name in [names::INTERVAL_SCORE, names::CALS, names::ENCE, names::UCE,
                     names::RMSE, names::SHARPNESS, names::PINBALL] {
            let v = report.get(name).unwrap();
            prop_assert!(v >= 0.0, "{} = {} negative", name, v);
        }
        if let Some(v) = report.get(names::CWC) {
            prop_assert!(v >= 0.0);
        }
        // CRPS is strictly positive for any nondegenerate Gaussian forecast
        prop_assert!(report.get(names::CRPS).unwrap() > 0.0);
    }

    #[test]
    fn cals_is_bounded_by_total_weight(
        pits in prop::collection::vec(-4.0f64..4.0, 5..40),
    ) {
        let n = pits.len();
        let preds = gaussian_set(pits, vec![0.0; n], vec![1.0; n]);
        let levels = ConfidenceLevels::default_deciles();
        let v = metrics::cals(&preds, &levels);
        let total: f64 = levels.weights().iter().sum();
        prop_assert!(v >= 0.0 && v <= total);
    }
}

/// Data whose values and shifted values share one binade, so every shifted
/// floating-point operation lands on the same grid and metrics must agree
/// bit for bit.
fn translation_fixture() -> GaussianPredictionSet {
    let y_hat = vec![
        38.0, 39.25, 40.5, 41.75, 42.25, 38.75, 40.0, 41.0, 39.5, 42.5, 38.25, 40.75,
    ];
    let resid = vec![
        0.25, -0.5, 0.0, 0.25, -0.25, 0.75, -0.75, 0.5, 0.0, -0.25, 1.0, -1.0,
    ];
    let sigma = vec![
        0.5, 0.25, 0.5, 0.5, 0.25, 0.5, 0.5, 0.25, 0.5, 0.25, 0.5, 0.5,
    ];
    let y: Vec<f64> = y_hat.iter().zip(&resid).map(|(m, r)| m + r).collect();
    gaussian_set(y, y_hat, sigma)
}

#[test]
fn every_metric_is_translation_invariant_bit_for_bit() {
    let base = translation_fixture();
    let cfg = MetricConfig::default();
    let reference = metrics::evaluate_all(&base, &cfg).unwrap();

    for shift in [-100.0, 7.0] {
        let shifted = gaussian_set(
            base.y().iter().map(|v| v + shift).collect(),
            base.y_hat().iter().map(|v| v + shift).collect(),
            base.sigma().to_vec(),
        );
        let report = metrics::evaluate_all(&shifted, &cfg).unwrap();
        for (name, value) in &reference.values {
            let a = value.unwrap();
            let b = report.values[name].unwrap();
            assert_eq!(
                a.to_bits(),
                b.to_bits(),
                "{name} changed under shift {shift}: {a} vs {b}"
            );
        }
    }
}

#[test]
fn scale_equivariance_by_power_of_two_is_exact() {
    let base = translation_fixture();
    let cfg = MetricConfig::default();
    let reference = metrics::evaluate_all(&base, &cfg).unwrap();

    let c = 4.0;
    let scaled = gaussian_set(
        base.y().iter().map(|v| c * v).collect(),
        base.y_hat().iter().map(|v| c * v).collect(),
        base.sigma().iter().map(|v| c * v).collect(),
    );
    let report = metrics::evaluate_all(&scaled, &cfg).unwrap();

    let invariant = [
        names::PICP,
        names::ECPE,
        names::QCE,
        names::ENCE,
        names::CALS,
        names::CALS_RMSE,
        names::CWC,
    ];
    for name in invariant {
        assert_eq!(
            reference.get(name).unwrap().to_bits(),
            report.get(name).unwrap().to_bits(),
            "{name} should be scale invariant"
        );
    }
    let equivariant = [
        names::INTERVAL_SCORE,
        names::CRPS,
        names::RMSE,
        names::SHARPNESS,
        names::PINBALL,
    ];
    for name in equivariant {
        assert_eq!(
            (c * reference.get(name).unwrap()).to_bits(),
            report.get(name).unwrap().to_bits(),
            "{name} should scale linearly"
        );
    }
    assert_eq!(
        (c * c * reference.get(names::UCE).unwrap()).to_bits(),
        report.get(names::UCE).unwrap().to_bits(),
        "uce should scale quadratically"
    );
    let nll_shift = report.get(names::NLL).unwrap() - reference.get(names::NLL).unwrap();
    assert!(
        (nll_shift - c.ln()).abs() < 1e-12,
        "nll should shift by ln(c)"
    );
}

#[test]
fn scale_equivariance_holds_for_generic_factors() {
    let base = translation_fixture();
    let cfg = MetricConfig::default();
    let reference = metrics::evaluate_all(&base, &cfg).unwrap();

    for c in [0.1, 3.0, 1000.0] {
        let scaled = gaussian_set(
            base.y().iter().map(|v| c * v).collect(),
            base.y_hat().iter().map(|v| c * v).collect(),
            base.sigma().iter().map(|v| c * v).collect(),
        );
        let report = metrics::evaluate_all(&scaled, &cfg).unwrap();

        for name in [
            names::PICP,
            names::ECPE,
            names::QCE,
            names::ENCE,
            names::CALS,
            names::CALS_RMSE,
            names::CWC,
        ] {
            let a = reference.get(name).unwrap();
            let b = report.get(name).unwrap();
            assert!(
                (a - b).abs() <= 1e-12 * a.abs().max(1.0),
                "{name} drifted under scale {c}: {a} vs {b}"
            );
        }
        for name in [
            names::INTERVAL_SCORE,
            names::CRPS,
            names::RMSE,
            names::SHARPNESS,
            names::PINBALL,
        ] {
            let a = c * reference.get(name).unwrap();
            let b = report.get(name).unwrap();
            assert!(
                (a - b).abs() <= 1e-12 * a.abs().max(1.0),
                "{name} not linear under scale {c}: {a} vs {b}"
            );
        }
        let a = c * c * reference.get(names::UCE).unwrap();
        let b = report.get(names::UCE).unwrap();
        assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        let nll_shift = report.get(names::NLL).unwrap() - reference.get(names::NLL).unwrap();
        assert!((nll_shift - c.ln()).abs() < 1e-12);
    }
}
