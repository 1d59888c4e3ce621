//! Scalar calibration metrics plus the accuracy and sharpness extras,
//! each a pure function of a prediction set and configuration.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::binning::{partition_equal_count_by_sigma, partition_equal_width_by_variance};
use crate::error::{Error, Result};
use crate::gaussian::{
    chi2_1_quantile, standard_normal_cdf, standard_normal_pdf, standard_normal_quantile,
};
use crate::predictions::{ConfidenceLevels, GaussianPredictionSet, IntervalPredictionSet};

/// Canonical metric names used in reports and verdicts.
pub mod names {
    pub const PICP: &str = "picp";
    pub const MPIW: &str = "mpiw";
    pub const NMPIW: &str = "nmpiw";
    pub const CWC: &str = "cwc";
    pub const INTERVAL_SCORE: &str = "interval_score";
    pub const CRPS: &str = "crps";
    pub const NLL: &str = "nll";
    pub const CALS: &str = "cals";
    pub const CALS_RMSE: &str = "cals_rmse";
    pub const ENCE: &str = "ence";
    pub const ECPE: &str = "ecpe";
    pub const UCE: &str = "uce";
    pub const QCE: &str = "qce";
    pub const RMSE: &str = "rmse";
    pub const SHARPNESS: &str = "sharpness";
    pub const PINBALL: &str = "pinball";

    /// The full report for Gaussian inputs, in canonical order.
    pub const GAUSSIAN_SUITE: [&str; 14] = [
        PICP,
        CWC,
        INTERVAL_SCORE,
        CRPS,
        NLL,
        CALS,
        CALS_RMSE,
        ENCE,
        ECPE,
        UCE,
        QCE,
        RMSE,
        SHARPNESS,
        PINBALL,
    ];

    /// The subset computable from bare intervals, in canonical order.
    pub const INTERVAL_SUITE: [&str; 5] = [PICP, MPIW, NMPIW, CWC, INTERVAL_SCORE];
}

/// Shared metric configuration.
///
/// Defaults: 10 bins, nominal level 0.95, eta 50, alpha 0.05, and the ten
/// mid-decile confidence levels (j - 0.5)/10 reused as the tau grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    pub n_bins: usize,
    pub nominal_level: f64,
    pub eta: f64,
    pub levels: ConfidenceLevels,
    pub alpha: f64,
    pub tau_grid: Vec<f64>,
}

impl Default for MetricConfig {
    fn default() -> Self {
        let levels = ConfidenceLevels::default_deciles();
        let tau_grid = levels.levels().to_vec();
        Self {
            n_bins: 10,
            nominal_level: 0.95,
            eta: 50.0,
            levels,
            alpha: 0.05,
            tau_grid,
        }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_bins == 0 {
            return Err(Error::Config("n_bins must be at least 1".into()));
        }
        if !(self.nominal_level > 0.0 && self.nominal_level < 1.0) {
            return Err(Error::ProbabilityOutOfRange {
                name: "nominal_level",
                value: self.nominal_level,
            });
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::Config(format!(
                "eta must be positive, got {}",
                self.eta
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::ProbabilityOutOfRange {
                name: "alpha",
                value: self.alpha,
            });
        }
        if self.tau_grid.is_empty() {
            return Err(Error::Config("tau_grid must not be empty".into()));
        }
        for &t in &self.tau_grid {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::ProbabilityOutOfRange {
                    name: "tau",
                    value: t,
                });
            }
        }
        Ok(())
    }
}

/// Named metric values with the configuration that produced them.
///
/// Undefined results (degenerate target range, for instance) are explicit
/// `None` markers rather than NaN.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub values: IndexMap<String, Option<f64>>,
    pub config: MetricConfig,
    pub n_samples: usize,
}

impl MetricReport {
    /// Look up a metric value; `None` if missing or undefined.
    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied().flatten()
    }

    pub fn metric_names(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for v in values {
        sum += v;
        count += 1;
    }
    sum / count as f64
}

/// Fraction of observations enclosed by their prediction interval,
/// bounds inclusive.
pub fn picp(ints: &IntervalPredictionSet) -> f64 {
    let covered = ints
        .y()
        .iter()
        .zip(ints.lower())
        .zip(ints.upper())
        .filter(|((&y, &l), &u)| l <= y && y <= u)
        .count();
    covered as f64 / ints.len() as f64
}

/// Mean prediction-interval width.
pub fn mpiw(ints: &IntervalPredictionSet) -> f64 {
    mean(ints.upper().iter().zip(ints.lower()).map(|(&u, &l)| u - l))
}

/// Mean width normalized by the target range.
pub fn nmpiw(ints: &IntervalPredictionSet, target_range: f64) -> Result<f64> {
    if target_range.is_nan() || target_range <= 0.0 {
        return Err(Error::Config(format!(
            "target range must be positive, got {target_range}"
        )));
    }
    Ok(mpiw(ints) / target_range)
}

/// Coverage width-based criterion. The nominal level comes from the
/// interval set itself; `cfg` supplies the penalty strength eta.
///
/// Equals NMPIW exactly (same code path) whenever PICP >= lambda.
pub fn cwc(ints: &IntervalPredictionSet, cfg: &MetricConfig, target_range: f64) -> Result<f64> {
    let base = nmpiw(ints, target_range)?;
    let coverage = picp(ints);
    let lambda = ints.nominal_level();
    if coverage >= lambda {
        Ok(base)
    } else {
        Ok(base * (1.0 + (-cfg.eta * (coverage - lambda)).exp()))
    }
}

/// Mean interval score at miscoverage rate `alpha`: width plus 2/alpha
/// times the distance by which the observation escapes the interval.
pub fn interval_score(ints: &IntervalPredictionSet, alpha: f64) -> f64 {
    let penalty = 2.0 / alpha;
    let mut total = 0.0;
    for ((&y, &l), &u) in ints.y().iter().zip(ints.lower()).zip(ints.upper()) {
        let mut s = u - l;
        if y < l {
            s += penalty * (l - y);
        }
        if y > u {
            s += penalty * (y - u);
        }
        total += s;
    }
    total / ints.len() as f64
}

/// Mean continuous ranked probability score for Gaussian forecasts,
/// closed form: sigma * [z(2*Phi(z) - 1) + 2*phi(z) - 1/sqrt(pi)].
pub fn crps_gaussian(preds: &GaussianPredictionSet) -> f64 {
    let inv_sqrt_pi = std::f64::consts::FRAC_2_SQRT_PI / 2.0;
    mean(
        preds
            .y()
            .iter()
            .zip(preds.y_hat())
            .zip(preds.sigma())
            .map(|((&y, &m), &s)| {
                let z = (y - m) / s;
                s * (z * (2.0 * standard_normal_cdf(z) - 1.0) + 2.0 * standard_normal_pdf(z)
                    - inv_sqrt_pi)
            }),
    )
}

/// Reference CRPS by trapezoid integration of the defining integral
/// of (F(z) - 1{z >= y})^2, at the default step of 1e-4 standardized units.
pub fn crps_integral_oracle(mu: f64, sigma: f64, y: f64) -> f64 {
    crps_integral_oracle_with_step(mu, sigma, y, 1e-4)
}

/// Trapezoid integration of the CRPS defining integral in standardized
/// units over +-12 sigma, split at the observation so the indicator jump
/// never crosses a trapezoid. Beyond 12 sigma the integrand is below
/// 1e-10; the composite trapezoid error is O(step^2).
///
/// Supports |y - mu| <= 12 sigma; intended as an independent check of the
/// closed form, not for production scoring.
pub fn crps_integral_oracle_with_step(mu: f64, sigma: f64, y: f64, step: f64) -> f64 {
    assert!(sigma > 0.0, "sigma must be positive");
    assert!(step > 0.0 && step <= 0.01, "step must be in (0, 0.01]");
    let u_y = (y - mu) / sigma;
    assert!(
        u_y.abs() <= 12.0,
        "observation outside the oracle's 12-sigma integration window"
    );
    let below = |u: f64| {
        let d = standard_normal_cdf(u);
        d * d
    };
    let above = |u: f64| {
        let d = standard_normal_cdf(u) - 1.0;
        d * d
    };
    sigma * (trapezoid(-12.0, u_y, step, below) + trapezoid(u_y, 12.0, step, above))
}

fn trapezoid(a: f64, b: f64, step: f64, f: impl Fn(f64) -> f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let steps = ((b - a) / step).ceil() as usize;
    let h = (b - a) / steps as f64;
    let mut sum = 0.5 * (f(a) + f(b));
    for k in 1..steps {
        sum += f(a + h * k as f64);
    }
    sum * h
}

/// Mean Gaussian negative log-likelihood:
/// (y - y_hat)^2 / (2 sigma^2) + log(2 pi sigma^2) / 2 per sample.
pub fn nll_gaussian(preds: &GaussianPredictionSet) -> f64 {
    mean(
        preds
            .y()
            .iter()
            .zip(preds.y_hat())
            .zip(preds.sigma())
            .map(|((&y, &m), &s)| {
                let r = y - m;
                r * r / (2.0 * s * s) + 0.5 * (2.0 * std::f64::consts::PI * s * s).ln()
            }),
    )
}

fn empirical_pit_frequencies(preds: &GaussianPredictionSet, levels: &ConfidenceLevels) -> Vec<f64> {
    let pit = preds.pit();
    let n = pit.len() as f64;
    levels
        .levels()
        .iter()
        .map(|&p| pit.iter().filter(|&&v| v <= p).count() as f64 / n)
        .collect()
}

/// Calibration score: weighted squared gaps between nominal levels and
/// empirical PIT frequencies.
pub fn cals(preds: &GaussianPredictionSet, levels: &ConfidenceLevels) -> f64 {
    let freqs = empirical_pit_frequencies(preds, levels);
    levels
        .levels()
        .iter()
        .zip(levels.weights())
        .zip(&freqs)
        .map(|((&p, &w), &f)| {
            let gap = p - f;
            w * gap * gap
        })
        .sum()
}

/// Root-mean-square variant of the calibration score (unweighted),
/// bounded in [0, 1].
pub fn cals_rmse(preds: &GaussianPredictionSet, levels: &ConfidenceLevels) -> f64 {
    let freqs = empirical_pit_frequencies(preds, levels);
    mean(levels.levels().iter().zip(&freqs).map(|(&p, &f)| {
        let gap = p - f;
        gap * gap
    }))
    .sqrt()
}

/// Expected normalized calibration error over equal-count sigma bins:
/// mean of |RMV - RMSE| / RMV per bin.
pub fn ence(preds: &GaussianPredictionSet, n_bins: usize) -> Result<f64> {
    let partition = partition_equal_count_by_sigma(preds.sigma(), n_bins)?;
    let y = preds.y();
    let y_hat = preds.y_hat();
    let sigma = preds.sigma();
    let total: f64 = partition
        .bins()
        .iter()
        .map(|bin| {
            let m = bin.len() as f64;
            let mv = bin.iter().map(|&i| sigma[i] * sigma[i]).sum::<f64>() / m;
            let mse = bin
                .iter()
                .map(|&i| {
                    let r = y[i] - y_hat[i];
                    r * r
                })
                .sum::<f64>()
                / m;
            let rmv = mv.sqrt();
            (rmv - mse.sqrt()).abs() / rmv
        })
        .sum();
    Ok(total / partition.n_bins() as f64)
}

/// Expectation of coverage probability error: mean absolute gap between
/// each nominal level and the PICP of the central Gaussian interval built
/// at that level.
pub fn ecpe(preds: &GaussianPredictionSet, levels: &ConfidenceLevels) -> f64 {
    mean(levels.levels().iter().map(|&p| {
        let ints = preds
            .to_intervals(p)
            .expect("confidence levels lie strictly inside (0, 1)");
        (p - picp(&ints)).abs()
    }))
}

/// Uncertainty calibration error over equal-width variance bins:
/// sample-weighted absolute gap between mean squared error and mean
/// predicted variance.
pub fn uce(preds: &GaussianPredictionSet, n_bins: usize) -> Result<f64> {
    let variance: Vec<f64> = preds.sigma().iter().map(|&s| s * s).collect();
    let partition = partition_equal_width_by_variance(&variance, n_bins)?;
    let y = preds.y();
    let y_hat = preds.y_hat();
    let weighted: f64 = partition
        .bins()
        .iter()
        .map(|bin| {
            let m = bin.len() as f64;
            let err = bin
                .iter()
                .map(|&i| {
                    let r = y[i] - y_hat[i];
                    r * r
                })
                .sum::<f64>()
                / m;
            let uncert = bin.iter().map(|&i| variance[i]).sum::<f64>() / m;
            m * (err - uncert).abs()
        })
        .sum();
    Ok(weighted / preds.len() as f64)
}

/// Quantile calibration error at level `tau`: bins samples by sigma
/// (equal count) and compares the in-bin frequency of normalized squared
/// errors below the chi-squared(1) quantile of tau against tau itself.
pub fn qce(preds: &GaussianPredictionSet, tau: f64, n_bins: usize) -> Result<f64> {
    let threshold = chi2_1_quantile(tau)?;
    let partition = partition_equal_count_by_sigma(preds.sigma(), n_bins)?;
    let y = preds.y();
    let y_hat = preds.y_hat();
    let sigma = preds.sigma();
    let weighted: f64 = partition
        .bins()
        .iter()
        .map(|bin| {
            let within = bin
                .iter()
                .filter(|&&i| {
                    let z = (y[i] - y_hat[i]) / sigma[i];
                    z * z <= threshold
                })
                .count();
            let freq = within as f64 / bin.len() as f64;
            bin.len() as f64 * (freq - tau).abs()
        })
        .sum();
    Ok(weighted / preds.len() as f64)
}

/// Arithmetic mean of [`qce`] over a tau grid, for single-number reporting.
pub fn qce_mean(preds: &GaussianPredictionSet, tau_grid: &[f64], n_bins: usize) -> Result<f64> {
    if tau_grid.is_empty() {
        return Err(Error::Config("tau_grid must not be empty".into()));
    }
    let mut total = 0.0;
    for &tau in tau_grid {
        total += qce(preds, tau, n_bins)?;
    }
    Ok(total / tau_grid.len() as f64)
}

/// Root mean squared error of the point predictions.
pub fn rmse(preds: &GaussianPredictionSet) -> f64 {
    mean(preds.y().iter().zip(preds.y_hat()).map(|(&y, &m)| {
        let r = y - m;
        r * r
    }))
    .sqrt()
}

/// Sharpness: root mean predicted variance, independent of the truths.
pub fn sharpness(preds: &GaussianPredictionSet) -> f64 {
    mean(preds.sigma().iter().map(|&s| s * s)).sqrt()
}

/// Mean pinball (check) loss over samples and the tau grid, with quantile
/// predictions y_hat + sigma * Phi^-1(tau).
pub fn pinball(preds: &GaussianPredictionSet, tau_grid: &[f64]) -> Result<f64> {
    if tau_grid.is_empty() {
        return Err(Error::Config("tau_grid must not be empty".into()));
    }
    let mut total = 0.0;
    for &tau in tau_grid {
        let z = standard_normal_quantile(tau)?;
        for ((&y, &m), &s) in preds.y().iter().zip(preds.y_hat()).zip(preds.sigma()) {
            let q = m + s * z;
            let diff = y - q;
            total += if y >= q {
                tau * diff
            } else {
                (tau - 1.0) * diff
            };
        }
    }
    Ok(total / (tau_grid.len() * preds.len()) as f64)
}

/// Evaluate the full 14-metric suite on a Gaussian prediction set.
///
/// Intervals for PICP/CWC/IS are central intervals at the nominal level;
/// the target range is max(y) - min(y). A degenerate range (zero) marks
/// CWC undefined while every other metric is still computed. Equal-count
/// bin counts are capped at the sample count.
pub fn evaluate_all(preds: &GaussianPredictionSet, cfg: &MetricConfig) -> Result<MetricReport> {
    cfg.validate()?;
    let bins = cfg.n_bins.min(preds.len());
    let range = preds.target_range();
    let ints = preds.to_intervals(cfg.nominal_level)?;

    let mut values: IndexMap<String, Option<f64>> = IndexMap::with_capacity(14);
    values.insert(names::PICP.into(), Some(picp(&ints)));
    let cwc_value = if range > 0.0 {
        Some(cwc(&ints, cfg, range)?)
    } else {
        None
    };
    values.insert(names::CWC.into(), cwc_value);
    values.insert(
        names::INTERVAL_SCORE.into(),
        Some(interval_score(&ints, cfg.alpha)),
    );
    values.insert(names::CRPS.into(), Some(crps_gaussian(preds)));
    values.insert(names::NLL.into(), Some(nll_gaussian(preds)));
    values.insert(names::CALS.into(), Some(cals(preds, &cfg.levels)));
    values.insert(names::CALS_RMSE.into(), Some(cals_rmse(preds, &cfg.levels)));
    values.insert(names::ENCE.into(), Some(ence(preds, bins)?));
    values.insert(names::ECPE.into(), Some(ecpe(preds, &cfg.levels)));
    values.insert(names::UCE.into(), Some(uce(preds, bins)?));
    values.insert(
        names::QCE.into(),
        Some(qce_mean(preds, &cfg.tau_grid, bins)?),
    );
    values.insert(names::RMSE.into(), Some(rmse(preds)));
    values.insert(names::SHARPNESS.into(), Some(sharpness(preds)));
    values.insert(names::PINBALL.into(), Some(pinball(preds, &cfg.tau_grid)?));

    Ok(MetricReport {
        values,
        config: cfg.clone(),
        n_samples: preds.len(),
    })
}

/// Evaluate the interval-only subset (PICP, MPIW, NMPIW, CWC, IS).
///
/// NMPIW and CWC are undefined when the target range is zero.
pub fn evaluate_intervals(
    ints: &IntervalPredictionSet,
    cfg: &MetricConfig,
) -> Result<MetricReport> {
    cfg.validate()?;
    let range = ints.target_range();

    let mut values: IndexMap<String, Option<f64>> = IndexMap::with_capacity(5);
    values.insert(names::PICP.into(), Some(picp(ints)));
    values.insert(names::MPIW.into(), Some(mpiw(ints)));
    let (nmpiw_value, cwc_value) = if range > 0.0 {
        (Some(nmpiw(ints, range)?), Some(cwc(ints, cfg, range)?))
    } else {
        (None, None)
    };
    values.insert(names::NMPIW.into(), nmpiw_value);
    values.insert(names::CWC.into(), cwc_value);
    values.insert(
        names::INTERVAL_SCORE.into(),
        Some(interval_score(ints, cfg.alpha)),
    );

    Ok(MetricReport {
        values,
        config: cfg.clone(),
        n_samples: ints.len(),
    })
}
