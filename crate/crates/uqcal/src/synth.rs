//! Perfectly calibrated prediction generator, the four miscalibration
//! scenarios, and synthetic target functions.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::predictions::GaussianPredictionSet;
use crate::rng::SeededStream;

/// Configuration for [`generate_calibrated`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibratedGenConfig {
    pub seed: u64,
    /// Floor applied to generated sigmas; `None` means 1e-6 times the
    /// target range.
    pub epsilon_floor: Option<f64>,
}

impl CalibratedGenConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            epsilon_floor: None,
        }
    }
}

/// Structured component of the generated uncertainty:
/// 0.05 * R + sin^2(2 pi y / R).
fn epistemic_sigma(y: f64, range: f64) -> f64 {
    0.05 * range + (2.0 * PI * y / range).sin().powi(2)
}

/// Draw perfectly calibrated predictions over the given targets.
///
/// Per sample: sigma is the epistemic term plus N(0, (0.05 R)^2) noise,
/// floored at epsilon, and the predicted mean is drawn from N(y, sigma^2).
/// Because the mean is drawn with the same sigma that is reported, the
/// output is calibrated by construction. Deterministic given the seed.
pub fn generate_calibrated(y: &[f64], cfg: &CalibratedGenConfig) -> Result<GaussianPredictionSet> {
    if y.len() < 2 {
        return Err(Error::Config(format!(
            "calibrated generation needs at least 2 targets, got {}",
            y.len()
        )));
    }
    for (index, v) in y.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite { field: "y", index });
        }
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in y {
        min = min.min(v);
        max = max.max(v);
    }
    let range = max - min;
    if range <= 0.0 {
        return Err(Error::Domain(
            "target range is zero; calibrated generation needs spread in y".into(),
        ));
    }
    let eps = cfg.epsilon_floor.unwrap_or(1e-6 * range);
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Config(format!(
            "epsilon floor must be positive and finite, got {eps}"
        )));
    }

    let mut stream = SeededStream::new(cfg.seed);
    let noise_scale = 0.05 * range;
    let mut sigma = Vec::with_capacity(y.len());
    let mut y_hat = Vec::with_capacity(y.len());
    for &yi in y {
        let aleatoric = noise_scale * stream.standard_normal();
        let s = (epistemic_sigma(yi, range) + aleatoric).max(eps);
        sigma.push(s);
        y_hat.push(yi + s * stream.standard_normal());
    }
    GaussianPredictionSet::new(y.to_vec(), y_hat, sigma)
}

/// The four miscalibration scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    /// All sigmas scaled by 0.9: systematic underestimation of uncertainty.
    #[serde(rename = "s1-const-sigma")]
    ConstSigma,
    /// Sigmas scaled by factors ramping linearly from 0.9 to 1.1 in index
    /// order.
    #[serde(rename = "s2-hetero-sigma")]
    HeteroSigma,
    /// All predicted means scaled by 0.9: biased point predictions.
    #[serde(rename = "s3-const-mean")]
    ConstMean,
    /// Means ramp 0.9 to 1.1 while sigmas ramp inversely 1.1 to 0.9.
    #[serde(rename = "s4-hetero-both")]
    HeteroBoth,
}

const SCENARIO_SHRINK: f64 = 0.9;
const RAMP_LO: f64 = 0.9;
const RAMP_HI: f64 = 1.1;

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::ConstSigma,
        Scenario::HeteroSigma,
        Scenario::ConstMean,
        Scenario::HeteroBoth,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Scenario::ConstSigma => "s1-const-sigma",
            Scenario::HeteroSigma => "s2-hetero-sigma",
            Scenario::ConstMean => "s3-const-mean",
            Scenario::HeteroBoth => "s4-hetero-both",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "s1" | "s1-const-sigma" => Ok(Scenario::ConstSigma),
            "s2" | "s2-hetero-sigma" => Ok(Scenario::HeteroSigma),
            "s3" | "s3-const-mean" => Ok(Scenario::ConstMean),
            "s4" | "s4-hetero-both" => Ok(Scenario::HeteroBoth),
            other => Err(Error::Config(format!(
                "unknown scenario '{other}' (expected s1, s2, s3, or s4)"
            ))),
        }
    }
}

/// Linear factor ramp over sample indices; a single sample takes the lower
/// endpoint.
fn ramp(index: usize, n: usize) -> f64 {
    if n <= 1 {
        RAMP_LO
    } else {
        RAMP_LO + (RAMP_HI - RAMP_LO) * index as f64 / (n - 1) as f64
    }
}

/// Apply a miscalibration scenario, returning a new prediction set.
/// Ramped factors follow dataset index order.
pub fn apply_scenario(preds: &GaussianPredictionSet, scenario: Scenario) -> GaussianPredictionSet {
    let n = preds.len();
    let mut y_hat = preds.y_hat().to_vec();
    let mut sigma = preds.sigma().to_vec();
    match scenario {
        Scenario::ConstSigma => {
            for s in &mut sigma {
                *s *= SCENARIO_SHRINK;
            }
        }
        Scenario::HeteroSigma => {
            for (i, s) in sigma.iter_mut().enumerate() {
                *s *= ramp(i, n);
            }
        }
        Scenario::ConstMean => {
            for m in &mut y_hat {
                *m *= SCENARIO_SHRINK;
            }
        }
        Scenario::HeteroBoth => {
            for i in 0..n {
                let h = ramp(i, n);
                y_hat[i] *= h;
                sigma[i] *= 2.0 - h;
            }
        }
    }
    GaussianPredictionSet::new(preds.y().to_vec(), y_hat, sigma)
        .expect("scenario factors keep sigmas positive and values finite")
}

/// Noise-free synthetic target functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthTarget {
    /// y = sqrt(a^2 + b^2), features uniform on [0, 1]^2.
    Euclidean,
    /// y = arctan(x), feature uniform on [0, 1].
    Arctan,
    /// The Friedman #1 benchmark, features uniform on [0, 1]^5.
    Friedman1,
    /// The Friedman #2 benchmark with its conventional feature ranges.
    Friedman2,
    /// The Friedman #3 benchmark with its conventional feature ranges.
    Friedman3,
}

impl SynthTarget {
    pub const ALL: [SynthTarget; 5] = [
        SynthTarget::Euclidean,
        SynthTarget::Arctan,
        SynthTarget::Friedman1,
        SynthTarget::Friedman2,
        SynthTarget::Friedman3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SynthTarget::Euclidean => "euclidean",
            SynthTarget::Arctan => "arctan",
            SynthTarget::Friedman1 => "friedman1",
            SynthTarget::Friedman2 => "friedman2",
            SynthTarget::Friedman3 => "friedman3",
        }
    }

    pub fn feature_dim(self) -> usize {
        match self {
            SynthTarget::Euclidean => 2,
            SynthTarget::Arctan => 1,
            SynthTarget::Friedman1 => 5,
            SynthTarget::Friedman2 | SynthTarget::Friedman3 => 4,
        }
    }

    /// Evaluate the target function at a feature vector of length
    /// [`feature_dim`](Self::feature_dim).
    pub fn eval(self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.feature_dim(), "feature dimension mismatch");
        match self {
            SynthTarget::Euclidean => (x[0] * x[0] + x[1] * x[1]).sqrt(),
            SynthTarget::Arctan => x[0].atan(),
            SynthTarget::Friedman1 => {
                10.0 * (PI * x[0] * x[1]).sin()
                    + 20.0 * (x[2] - 0.5) * (x[2] - 0.5)
                    + 10.0 * x[3]
                    + 5.0 * x[4]
            }
            SynthTarget::Friedman2 => {
                let t = x[1] * x[2] - 1.0 / (x[1] * x[3]);
                (x[0] * x[0] + t * t).sqrt()
            }
            SynthTarget::Friedman3 => {
                let t = x[1] * x[2] - 1.0 / (x[1] * x[3]);
                (t / x[0]).atan()
            }
        }
    }

    /// Draw `n` feature vectors and return the noise-free targets,
    /// deterministic per seed.
    pub fn sample_targets(self, n: usize, seed: u64) -> Vec<f64> {
        let mut stream = SeededStream::new(seed);
        let mut features = vec![0.0; self.feature_dim()];
        (0..n)
            .map(|_| {
                self.fill_features(&mut stream, &mut features);
                self.eval(&features)
            })
            .collect()
    }

    fn fill_features(self, stream: &mut SeededStream, out: &mut [f64]) {
        match self {
            SynthTarget::Friedman2 | SynthTarget::Friedman3 => {
                out[0] = stream.uniform_range(0.0, 100.0);
                out[1] = stream.uniform_range(40.0 * PI, 560.0 * PI);
                out[2] = stream.uniform_open01();
                out[3] = stream.uniform_range(1.0, 11.0);
            }
            _ => {
                for v in out.iter_mut() {
                    *v = stream.uniform_open01();
                }
            }
        }
    }
}

impl fmt::Display for SynthTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SynthTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SynthTarget::ALL
            .iter()
            .copied()
            .find(|t| t.name() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown synthetic target '{s}' (expected one of euclidean, arctan, \
                     friedman1, friedman2, friedman3)"
                ))
            })
    }
}
