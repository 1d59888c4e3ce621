//! Cross-dataset normalization, before/after change verdicts, and the
//! seeded detection-rate study.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{evaluate_all, names, MetricConfig, MetricReport};
use crate::rng::derive_seed;
use crate::synth::{apply_scenario, generate_calibrated, CalibratedGenConfig, Scenario};

/// Default relative-change threshold separating negligible from real change.
pub const DEFAULT_CHANGE_THRESHOLD: f64 = 0.03;
/// Baselines below this magnitude switch to absolute-change classification.
pub const NEAR_ZERO_BASELINE: f64 = 1e-12;
/// Absolute-change threshold used in the near-zero fallback.
pub const ABSOLUTE_CHANGE_THRESHOLD: f64 = 1e-9;

/// Direction of a metric change; every reported metric is
/// lower-is-better once PICP has been mapped to its gap |PICP - lambda|.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChangeClass {
    Improved,
    Degraded,
    Negligible,
}

/// Per-metric before/after comparison for one perturbation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioVerdict {
    pub metric: String,
    pub before: f64,
    pub after: f64,
    /// `None` when the baseline was numerically zero and the verdict came
    /// from the absolute-change fallback.
    pub relative_change: Option<f64>,
    pub classification: ChangeClass,
}

fn classify_value(before: f64, after: f64, threshold: f64) -> (Option<f64>, ChangeClass) {
    if before.abs() < NEAR_ZERO_BASELINE {
        let delta = after - before;
        let class = if delta > ABSOLUTE_CHANGE_THRESHOLD {
            ChangeClass::Degraded
        } else if delta < -ABSOLUTE_CHANGE_THRESHOLD {
            ChangeClass::Improved
        } else {
            ChangeClass::Negligible
        };
        (None, class)
    } else {
        let rel = (after - before) / before.abs();
        let class = if rel > threshold {
            ChangeClass::Degraded
        } else if rel < -threshold {
            ChangeClass::Improved
        } else {
            ChangeClass::Negligible
        };
        (Some(rel), class)
    }
}

/// Compare two reports metric by metric at the given relative threshold.
///
/// PICP is compared through its gap to the nominal level on both sides;
/// all other metrics are compared directly (lower is better). Metrics that
/// are undefined on either side are skipped.
pub fn classify_change(
    before: &MetricReport,
    after: &MetricReport,
    lambda: f64,
    threshold: f64,
) -> Result<Vec<ScenarioVerdict>> {
    if before.config != after.config {
        return Err(Error::ConfigMismatch(
            "before/after reports were produced with different configurations".into(),
        ));
    }
    let before_names: Vec<&str> = before.metric_names().collect();
    let after_names: Vec<&str> = after.metric_names().collect();
    if before_names != after_names {
        return Err(Error::ConfigMismatch(
            "before/after reports contain different metric sets".into(),
        ));
    }

    let mut verdicts = Vec::with_capacity(before_names.len());
    for name in before_names {
        let (Some(b_raw), Some(a_raw)) = (before.get(name), after.get(name)) else {
            continue;
        };
        let (b, a) = if name == names::PICP {
            ((b_raw - lambda).abs(), (a_raw - lambda).abs())
        } else {
            (b_raw, a_raw)
        };
        let (relative_change, classification) = classify_value(b, a, threshold);
        verdicts.push(ScenarioVerdict {
            metric: name.to_string(),
            before: b,
            after: a,
            relative_change,
            classification,
        });
    }
    Ok(verdicts)
}

/// Dataset-by-metric matrix of normalized values.
///
/// Each column is divided by its cross-dataset mean; PICP columns hold the
/// normalized gap |PICP - lambda|. Columns whose mean is exactly zero (or
/// that contain no defined values) are marked undefined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedTable {
    pub metrics: Vec<String>,
    /// Row per dataset, in input order.
    pub values: Vec<Vec<Option<f64>>>,
    /// Per-metric mean used for normalization.
    pub means: Vec<Option<f64>>,
}

/// Normalize a collection of reports for cross-dataset comparison.
pub fn normalize_across_datasets(reports: &[MetricReport], lambda: f64) -> Result<NormalizedTable> {
    if reports.is_empty() {
        return Err(Error::EmptyInput);
    }
    let metric_names: Vec<String> = reports[0].metric_names().map(str::to_string).collect();
    for (i, report) in reports.iter().enumerate().skip(1) {
        let other: Vec<&str> = report.metric_names().collect();
        if other != metric_names.iter().map(String::as_str).collect::<Vec<_>>() {
            return Err(Error::ConfigMismatch(format!(
                "report {i} contains a different metric set"
            )));
        }
    }

    let mut values: Vec<Vec<Option<f64>>> = vec![vec![None; metric_names.len()]; reports.len()];
    let mut means: Vec<Option<f64>> = Vec::with_capacity(metric_names.len());
    for (col, name) in metric_names.iter().enumerate() {
        let raw: Vec<Option<f64>> = reports
            .iter()
            .map(|r| {
                r.get(name).map(|v| {
                    if name == names::PICP {
                        (v - lambda).abs()
                    } else {
                        v
                    }
                })
            })
            .collect();
        let defined: Vec<f64> = raw.iter().flatten().copied().collect();
        if defined.is_empty() {
            means.push(None);
            continue;
        }
        let mean = defined.iter().sum::<f64>() / defined.len() as f64;
        if mean == 0.0 {
            means.push(None);
            continue;
        }
        means.push(Some(mean));
        for (row, v) in raw.iter().enumerate() {
            values[row][col] = v.map(|v| v / mean);
        }
    }

    Ok(NormalizedTable {
        metrics: metric_names,
        values,
        means,
    })
}

/// Pairwise Spearman rank correlations between metric columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankAgreement {
    /// Columns included, in table order.
    pub metrics: Vec<String>,
    /// Columns dropped because they contained undefined values.
    pub excluded: Vec<String>,
    /// Symmetric correlation matrix with unit diagonal.
    pub matrix: Vec<Vec<f64>>,
}

/// Ranks with ties averaged, 1-based.
fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).expect("finite values"));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            ranks[order[k]] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman correlation via Pearson on average ranks. Two all-tied columns
/// have identical rank vectors and correlate perfectly; a single all-tied
/// column carries no ordering information and correlates at zero.
fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let ra = average_ranks(a);
    let rb = average_ranks(b);
    let n = ra.len() as f64;
    let ma = ra.iter().sum::<f64>() / n;
    let mb = rb.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in ra.iter().zip(&rb) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va == 0.0 && vb == 0.0 {
        return 1.0; // all ranks tied on both sides: identical orderings
    }
    if va == 0.0 || vb == 0.0 {
        return 0.0;
    }
    cov / (va * vb).sqrt()
}

/// Spearman rank agreement between every metric pair's dataset ordering.
/// Requires at least three datasets.
pub fn rank_agreement(table: &NormalizedTable) -> Result<RankAgreement> {
    if table.values.len() < 3 {
        return Err(Error::Config(format!(
            "rank agreement needs at least 3 datasets, got {}",
            table.values.len()
        )));
    }
    let mut included = Vec::new();
    let mut excluded = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for (col, name) in table.metrics.iter().enumerate() {
        let cells: Option<Vec<f64>> = table.values.iter().map(|row| row[col]).collect();
        match cells {
            Some(column) => {
                included.push(name.clone());
                columns.push(column);
            }
            None => excluded.push(name.clone()),
        }
    }

    let m = columns.len();
    let mut matrix = vec![vec![0.0; m]; m];
    for i in 0..m {
        matrix[i][i] = 1.0;
        for j in (i + 1)..m {
            let r = spearman(&columns[i], &columns[j]);
            matrix[i][j] = r;
            matrix[j][i] = r;
        }
    }
    Ok(RankAgreement {
        metrics: included,
        excluded,
        matrix,
    })
}

/// A labeled vector of regression targets for the detection study.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSource {
    pub id: String,
    pub y: Vec<f64>,
}

/// Detection frequencies from the repeated miscalibration benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionSummary {
    pub scenario: Scenario,
    pub repeats: usize,
    pub datasets: Vec<String>,
    pub metrics: Vec<String>,
    /// Metric-by-dataset fraction of repeats classified as degraded.
    pub frequencies: Vec<Vec<f64>>,
    /// Metric-by-dataset verdict counts across repeats.
    pub degraded: Vec<Vec<u32>>,
    pub improved: Vec<Vec<u32>>,
    pub negligible: Vec<Vec<u32>>,
}

/// Run the seeded detection study: for every repeat and target vector,
/// generate calibrated predictions, evaluate, perturb with the scenario,
/// re-evaluate, classify, and tally degraded verdicts per metric.
///
/// Each (repeat, dataset) pair owns an independent stream derived from
/// `base_seed`, so results are reproducible bit-for-bit regardless of how
/// many threads execute the repeats.
pub fn detection_study(
    sources: &[TargetSource],
    scenario: Scenario,
    repeats: usize,
    base_seed: u64,
    cfg: &MetricConfig,
    threshold: f64,
) -> Result<DetectionSummary> {
    if sources.is_empty() {
        return Err(Error::EmptyInput);
    }
    if repeats == 0 {
        return Err(Error::Config("repeats must be at least 1".into()));
    }
    cfg.validate()?;

    type RunVerdicts = Vec<Vec<ChangeClass>>; // dataset x metric
    let runs: Vec<Result<RunVerdicts>> = (0..repeats)
        .into_par_iter()
        .map(|repeat| {
            sources
                .iter()
                .map(|source| {
                    let seed = derive_seed(base_seed, repeat as u64, &source.id);
                    let preds = generate_calibrated(&source.y, &CalibratedGenConfig::new(seed))?;
                    let before = evaluate_all(&preds, cfg)?;
                    let perturbed = apply_scenario(&preds, scenario);
                    let after = evaluate_all(&perturbed, cfg)?;
                    let verdicts = classify_change(&before, &after, cfg.nominal_level, threshold)?;
                    Ok(verdicts.into_iter().map(|v| v.classification).collect())
                })
                .collect()
        })
        .collect();

    let metric_names: Vec<String> = names::GAUSSIAN_SUITE
        .iter()
        .map(|s| s.to_string())
        .collect();
    let n_metrics = metric_names.len();
    let n_datasets = sources.len();
    let mut degraded = vec![vec![0u32; n_datasets]; n_metrics];
    let mut improved = vec![vec![0u32; n_datasets]; n_metrics];
    let mut negligible = vec![vec![0u32; n_datasets]; n_metrics];

    // Sequential fold in repeat order keeps the tally independent of the
    // parallel execution schedule.
    for run in runs {
        let run = run?;
        for (d, classes) in run.iter().enumerate() {
            debug_assert_eq!(classes.len(), n_metrics);
            for (m, class) in classes.iter().enumerate() {
                match class {
                    ChangeClass::Degraded => degraded[m][d] += 1,
                    ChangeClass::Improved => improved[m][d] += 1,
                    ChangeClass::Negligible => negligible[m][d] += 1,
                }
            }
        }
    }

    let frequencies = degraded
        .iter()
        .map(|row| row.iter().map(|&c| c as f64 / repeats as f64).collect())
        .collect();

    Ok(DetectionSummary {
        scenario,
        repeats,
        datasets: sources.iter().map(|s| s.id.clone()).collect(),
        metrics: metric_names,
        frequencies,
        degraded,
        improved,
        negligible,
    })
}
