//! Calibration metrics for regression uncertainty, plus a controlled
//! miscalibration benchmark.
//!
//! The crate is organized around three inputs: Gaussian prediction sets
//! (truth, predicted mean, predicted standard deviation), interval
//! prediction sets (truth, lower, upper, nominal level), and confidence
//! level grids. On top of those it provides:
//!
//! - the full metric suite (PICP, CWC, interval score, CRPS, NLL, CalS,
//!   ENCE, ECPE, UCE, QCE, RMSE, sharpness, pinball loss) in [`metrics`];
//! - perfectly calibrated synthetic predictions and four miscalibration
//!   scenarios in [`synth`];
//! - cross-dataset normalization, before/after verdicts, and the seeded
//!   detection-rate study in [`analysis`].
//!
//! Everything is deterministic: randomness flows through named, seedable
//! ChaCha streams and all aggregation is order-independent.

pub mod analysis;
pub mod binning;
pub mod error;
pub mod gaussian;
pub mod metrics;
pub mod predictions;
pub mod rng;
pub mod synth;

pub use error::{Error, Result};
pub use metrics::{evaluate_all, evaluate_intervals, MetricConfig, MetricReport};
pub use predictions::{ConfidenceLevels, GaussianPredictionSet, IntervalPredictionSet};
pub use synth::{CalibratedGenConfig, Scenario, SynthTarget};
