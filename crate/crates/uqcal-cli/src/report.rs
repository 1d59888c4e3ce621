//! JSON report schema. Reports carry no timestamps or hostnames, so a
//! rerun with identical flags produces byte-identical output.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use uqcal::analysis::{NormalizedTable, RankAgreement};
use uqcal::metrics::{MetricConfig, MetricReport};
use uqcal::ConfidenceLevels;

use crate::error::{CliError, CliResult};

/// Configuration echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub n_bins: usize,
    pub confidence: f64,
    pub eta: f64,
    pub alpha: f64,
    pub levels: Vec<f64>,
    pub level_weights: Vec<f64>,
    pub tau_grid: Vec<f64>,
    pub seed: Option<u64>,
    pub threshold: Option<f64>,
}

impl ConfigEcho {
    pub fn new(cfg: &MetricConfig, seed: Option<u64>, threshold: Option<f64>) -> Self {
        Self {
            n_bins: cfg.n_bins,
            confidence: cfg.nominal_level,
            eta: cfg.eta,
            alpha: cfg.alpha,
            levels: cfg.levels.levels().to_vec(),
            level_weights: cfg.levels.weights().to_vec(),
            tau_grid: cfg.tau_grid.clone(),
            seed,
            threshold,
        }
    }

    pub fn to_metric_config(&self) -> CliResult<MetricConfig> {
        let levels = ConfidenceLevels::new(self.levels.clone(), self.level_weights.clone())
            .map_err(|e| CliError::Data(format!("invalid levels in report config: {e}")))?;
        let cfg = MetricConfig {
            n_bins: self.n_bins,
            nominal_level: self.confidence,
            eta: self.eta,
            alpha: self.alpha,
            levels,
            tau_grid: self.tau_grid.clone(),
        };
        cfg.validate()
            .map_err(|e| CliError::Data(format!("invalid report config: {e}")))?;
        Ok(cfg)
    }

    /// The fields that must agree for reports to be comparable (seed and
    /// threshold are run parameters, not metric configuration).
    pub fn comparable_key(&self) -> impl PartialEq + '_ {
        (
            self.n_bins,
            self.confidence.to_bits(),
            self.eta.to_bits(),
            self.alpha.to_bits(),
            self.levels.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            self.level_weights
                .iter()
                .map(|v| v.to_bits())
                .collect::<Vec<_>>(),
            self.tau_grid
                .iter()
                .map(|v| v.to_bits())
                .collect::<Vec<_>>(),
        )
    }
}

/// Verdict tallies from the benchmark, metric-by-dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictCounts {
    pub degraded: Vec<Vec<u32>>,
    pub improved: Vec<Vec<u32>>,
    pub negligible: Vec<Vec<u32>>,
}

/// Normalized cross-dataset table with its row labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedSection {
    pub datasets: Vec<String>,
    pub metrics: Vec<String>,
    /// Row per dataset; null marks undefined cells.
    pub values: Vec<Vec<Option<f64>>>,
    /// Per-metric mean used for normalization; null marks undefined columns.
    pub means: Vec<Option<f64>>,
}

impl NormalizedSection {
    pub fn new(datasets: Vec<String>, table: NormalizedTable) -> Self {
        Self {
            datasets,
            metrics: table.metrics,
            values: table.values,
            means: table.means,
        }
    }
}

/// Spearman rank-agreement matrix between metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankSection {
    pub metrics: Vec<String>,
    pub excluded: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
}

impl From<RankAgreement> for RankSection {
    fn from(r: RankAgreement) -> Self {
        Self {
            metrics: r.metrics,
            excluded: r.excluded,
            matrix: r.matrix,
        }
    }
}

/// The report document written by every subcommand that emits JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub version: String,
    pub kind: String,
    pub config: ConfigEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_format: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<IndexMap<String, Option<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repeats: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub datasets: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric_names: Option<Vec<String>>,
    /// Metric-by-dataset detection frequencies in [0, 1].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detection_frequency: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict_counts: Option<VerdictCounts>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalized: Option<NormalizedSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank_agreement: Option<RankSection>,
}

impl ReportFile {
    pub fn skeleton(kind: &str, config: ConfigEcho) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            kind: kind.to_string(),
            config,
            input_format: None,
            n_samples: None,
            metrics: None,
            scenario: None,
            repeats: None,
            datasets: None,
            metric_names: None,
            detection_frequency: None,
            verdict_counts: None,
            normalized: None,
            rank_agreement: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut body = serde_json::to_string_pretty(self).expect("report serializes");
        body.push('\n');
        body
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Data(format!("invalid report JSON: {e}")))
    }

    /// Rebuild the library-level metric report from an evaluate report.
    pub fn to_metric_report(&self) -> CliResult<MetricReport> {
        let values = self
            .metrics
            .clone()
            .ok_or_else(|| CliError::Data("report has no metrics section".into()))?;
        Ok(MetricReport {
            values,
            config: self.config.to_metric_config()?,
            n_samples: self.n_samples.unwrap_or(0),
        })
    }
}
