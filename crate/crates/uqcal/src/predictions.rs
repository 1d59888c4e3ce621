//! Prediction-set types shared by every metric.
//!
//! All types are immutable value objects: fields are validated once at
//! construction and only exposed through slice accessors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{standard_normal_cdf, standard_normal_quantile};

fn check_finite(values: &[f64], field: &'static str) -> Result<()> {
    for (index, v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite { field, index });
        }
    }
    Ok(())
}

fn check_same_length(a: usize, b: usize, context: &'static str) -> Result<()> {
    if a != b {
        return Err(Error::LengthMismatch {
            left: a,
            right: b,
            context,
        });
    }
    Ok(())
}

/// Paired truths, predicted means, and predicted standard deviations.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPredictionSet {
    y: Vec<f64>,
    y_hat: Vec<f64>,
    sigma: Vec<f64>,
}

impl GaussianPredictionSet {
    /// Build a prediction set, validating lengths, finiteness, and
    /// strictly positive standard deviations.
    pub fn new(y: Vec<f64>, y_hat: Vec<f64>, sigma: Vec<f64>) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::EmptyInput);
        }
        check_same_length(y.len(), y_hat.len(), "y vs y_hat")?;
        check_same_length(y.len(), sigma.len(), "y vs sigma")?;
        check_finite(&y, "y")?;
        check_finite(&y_hat, "y_hat")?;
        check_finite(&sigma, "sigma")?;
        for (index, &s) in sigma.iter().enumerate() {
            if s <= 0.0 {
                return Err(Error::NonPositiveSigma { value: s, index });
            }
        }
        Ok(Self { y, y_hat, sigma })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires at least one sample
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn y_hat(&self) -> &[f64] {
        &self.y_hat
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// Range of the true targets, max(y) - min(y).
    pub fn target_range(&self) -> f64 {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &v in &self.y {
            min = min.min(v);
            max = max.max(v);
        }
        max - min
    }

    /// Probability integral transform: element i is Phi((y_i - y_hat_i) / sigma_i).
    pub fn pit(&self) -> Vec<f64> {
        self.y
            .iter()
            .zip(&self.y_hat)
            .zip(&self.sigma)
            .map(|((&y, &m), &s)| standard_normal_cdf((y - m) / s))
            .collect()
    }

    /// Central prediction intervals at the given confidence level:
    /// y_hat_i +- z * sigma_i with z = Phi^-1((1 + level) / 2).
    pub fn to_intervals(&self, level: f64) -> Result<IntervalPredictionSet> {
        let z = standard_normal_quantile((1.0 + level) / 2.0)?;
        let lower: Vec<f64> = self
            .y_hat
            .iter()
            .zip(&self.sigma)
            .map(|(&m, &s)| m - z * s)
            .collect();
        let upper: Vec<f64> = self
            .y_hat
            .iter()
            .zip(&self.sigma)
            .map(|(&m, &s)| m + z * s)
            .collect();
        IntervalPredictionSet::new(self.y.clone(), lower, upper, level)
    }
}

/// Paired truths with lower/upper interval bounds at a nominal confidence
/// level.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalPredictionSet {
    y: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    nominal_level: f64,
}

impl IntervalPredictionSet {
    pub fn new(y: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>, nominal_level: f64) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::EmptyInput);
        }
        check_same_length(y.len(), lower.len(), "y vs lower")?;
        check_same_length(y.len(), upper.len(), "y vs upper")?;
        check_finite(&y, "y")?;
        check_finite(&lower, "lower")?;
        check_finite(&upper, "upper")?;
        if !(nominal_level > 0.0 && nominal_level < 1.0) {
            return Err(Error::ProbabilityOutOfRange {
                name: "nominal_level",
                value: nominal_level,
            });
        }
        for index in 0..y.len() {
            if lower[index] > upper[index] {
                return Err(Error::IntervalOrder { index });
            }
        }
        Ok(Self {
            y,
            lower,
            upper,
            nominal_level,
        })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn nominal_level(&self) -> f64 {
        self.nominal_level
    }

    /// Range of the true targets, max(y) - min(y).
    pub fn target_range(&self) -> f64 {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &v in &self.y {
            min = min.min(v);
            max = max.max(v);
        }
        max - min
    }
}

/// Ordered confidence levels with nonnegative weights, used by CalS and
/// ECPE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConfidenceLevels")]
pub struct ConfidenceLevels {
    levels: Vec<f64>,
    weights: Vec<f64>,
}

/// Serde shadow type so deserialized levels pass the same validation as
/// constructed ones.
#[derive(Deserialize)]
struct RawConfidenceLevels {
    levels: Vec<f64>,
    weights: Vec<f64>,
}

impl TryFrom<RawConfidenceLevels> for ConfidenceLevels {
    type Error = Error;

    fn try_from(raw: RawConfidenceLevels) -> Result<Self> {
        Self::new(raw.levels, raw.weights)
    }
}

impl ConfidenceLevels {
    /// Levels must be strictly increasing inside (0, 1); weights must be
    /// nonnegative and match in length.
    pub fn new(levels: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::EmptyInput);
        }
        check_same_length(levels.len(), weights.len(), "levels vs weights")?;
        for &p in &levels {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::ProbabilityOutOfRange {
                    name: "level",
                    value: p,
                });
            }
        }
        for pair in levels.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::Config(format!(
                    "levels must be strictly increasing, got {} then {}",
                    pair[0], pair[1]
                )));
            }
        }
        for &w in &weights {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::Config(format!(
                    "weights must be nonnegative, got {w}"
                )));
            }
        }
        Ok(Self { levels, weights })
    }

    /// Levels with unit weights.
    pub fn uniform(levels: Vec<f64>) -> Result<Self> {
        let weights = vec![1.0; levels.len()];
        Self::new(levels, weights)
    }

    /// The default ten mid-decile levels (j - 0.5)/10 for j = 1..10.
    pub fn default_deciles() -> Self {
        let levels: Vec<f64> = (1..=10).map(|j| (j as f64 - 0.5) / 10.0).collect();
        Self::uniform(levels).expect("static levels are valid")
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl Default for ConfidenceLevels {
    fn default() -> Self {
        Self::default_deciles()
    }
}
