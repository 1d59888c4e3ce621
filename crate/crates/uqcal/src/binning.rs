//! Bin-partition strategies shared by ENCE, UCE, and QCE.

use crate::error::{Error, Result};

/// How a partition was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinStrategy {
    /// Samples sorted by predicted standard deviation, split into bins of
    /// near-equal count.
    EqualCountBySigma,
    /// Predicted variance range split into intervals of equal width.
    EqualWidthByVariance,
}

/// An assignment of sample indices to bins.
///
/// Bins are disjoint, nonempty, and jointly cover all input indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinPartition {
    bins: Vec<Vec<usize>>,
    strategy: BinStrategy,
}

impl BinPartition {
    pub fn bins(&self) -> &[Vec<usize>] {
        &self.bins
    }

    pub fn n_bins(&self) -> usize {
        self.bins.len()
    }

    pub fn strategy(&self) -> BinStrategy {
        self.strategy
    }

    /// Total number of samples across all bins.
    pub fn total(&self) -> usize {
        self.bins.iter().map(Vec::len).sum()
    }
}

/// Sort samples by sigma ascending (ties broken by original index) and cut
/// into `n_bins` bins whose sizes differ by at most one: the first
/// `N mod n_bins` bins take the larger size.
pub fn partition_equal_count_by_sigma(sigma: &[f64], n_bins: usize) -> Result<BinPartition> {
    let n = sigma.len();
    if n_bins == 0 {
        return Err(Error::Config("n_bins must be at least 1".into()));
    }
    if n_bins > n {
        return Err(Error::Config(format!(
            "n_bins ({n_bins}) exceeds sample count ({n})"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sigma[a].partial_cmp(&sigma[b]).expect("finite sigma"));

    let base = n / n_bins;
    let remainder = n % n_bins;
    let mut bins = Vec::with_capacity(n_bins);
    let mut start = 0;
    for j in 0..n_bins {
        let size = base + usize::from(j < remainder);
        bins.push(order[start..start + size].to_vec());
        start += size;
    }
    Ok(BinPartition {
        bins,
        strategy: BinStrategy::EqualCountBySigma,
    })
}

/// Split the range [min(variance), max(variance)] into `n_bins` intervals of
/// equal width; interior right edges are exclusive, the last bin's right
/// edge is inclusive. Empty bins are dropped. A degenerate range (all
/// variances identical) collapses to a single bin.
pub fn partition_equal_width_by_variance(variance: &[f64], n_bins: usize) -> Result<BinPartition> {
    let n = variance.len();
    if n_bins == 0 {
        return Err(Error::Config("n_bins must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in variance {
        min = min.min(v);
        max = max.max(v);
    }
    let width = (max - min) / n_bins as f64;

    let mut bins: Vec<Vec<usize>> = vec![Vec::new(); n_bins];
    if width <= 0.0 {
        // degenerate width: everything lands in one bin
        bins[0] = (0..n).collect();
    } else {
        for (i, &v) in variance.iter().enumerate() {
            let idx = (((v - min) / width) as usize).min(n_bins - 1);
            bins[idx].push(i);
        }
    }
    bins.retain(|b| !b.is_empty());
    Ok(BinPartition {
        bins,
        strategy: BinStrategy::EqualWidthByVariance,
    })
}
