//! Ordered samples and the quantile machinery built on them.
//!
//! The percentile convention throughout is mean-rank (Hazen): the i-th order
//! statistic of an n-point sample sits at plotting position 100·(i − 0.5)/n,
//! ties get weight 0.5, and `percentile_of` / `value_at_percentile` are exact
//! inverses of each other at the sample points.

use std::collections::BTreeMap;

use crate::{Error, Result};

/// A sorted multiset of real values. The universal object for all
/// distribution math in this crate.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedSample {
    values: Vec<f64>,
}

impl OrderedSample {
    /// Sorts `values` ascending. Rejects empty input and non-finite values.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue);
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(OrderedSample { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// Sample standard deviation (n − 1 denominator).
    pub fn std_dev(&self) -> f64 {
        let n = self.len();
        if n < 2 {
            return 0.0;
        }
        let m = self.mean();
        let ss: f64 = self.values.iter().map(|v| (v - m) * (v - m)).sum();
        (ss / (n - 1) as f64).sqrt()
    }

    /// Plotting position of the i-th order statistic (1-based), in [0, 100].
    pub fn plotting_position(&self, i: usize) -> f64 {
        debug_assert!(i >= 1 && i <= self.len());
        100.0 * (i as f64 - 0.5) / self.len() as f64
    }

    /// Percentile of `v` under the mean-rank convention:
    /// 100·(count(< v) + 0.5·count(= v))/n.
    pub fn percentile_of(&self, v: f64) -> f64 {
        let lt = self.values.partition_point(|x| *x < v);
        let le = self.values.partition_point(|x| *x <= v);
        let eq = le - lt;
        100.0 * (lt as f64 + 0.5 * eq as f64) / self.len() as f64
    }

    /// Inverse of `percentile_of` at sample points: linear interpolation on
    /// plotting positions, clamped to the extreme order statistics outside
    /// [p₁, pₙ].
    pub fn value_at_percentile(&self, p: f64) -> Result<f64> {
        if !(0.0..=100.0).contains(&p) || p.is_nan() {
            return Err(Error::InvalidPercentile(p));
        }
        let n = self.len();
        // Fractional 1-based rank implied by p. Snap to an integer rank when
        // p is a plotting position up to roundoff, so the inverse is exact.
        let mut t = p / 100.0 * n as f64 + 0.5;
        let r = t.round();
        if (t - r).abs() < 1e-9 {
            t = r;
        }
        if t <= 1.0 {
            return Ok(self.values[0]);
        }
        if t >= n as f64 {
            return Ok(self.values[n - 1]);
        }
        let k = t.floor() as usize; // 1-based lower rank
        let frac = t - k as f64;
        Ok(self.values[k - 1] + frac * (self.values[k] - self.values[k - 1]))
    }
}

/// Histogram with fixed-width bins; value v lands in bin
/// floor((v − origin)/width).
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramBins {
    pub width: f64,
    pub origin: f64,
    pub counts: BTreeMap<i64, u64>,
}

impl HistogramBins {
    pub fn bin_bounds(&self, index: i64) -> (f64, f64) {
        let lo = self.origin + index as f64 * self.width;
        (lo, lo + self.width)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// All bins from the lowest to the highest occupied index, with empty
    /// interior bins reported as zero.
    pub fn dense(&self) -> Vec<(i64, u64)> {
        let (lo, hi) = match (self.counts.keys().next(), self.counts.keys().next_back()) {
            (Some(&lo), Some(&hi)) => (lo, hi),
            _ => return Vec::new(),
        };
        (lo..=hi)
            .map(|i| (i, self.counts.get(&i).copied().unwrap_or(0)))
            .collect()
    }
}

pub fn histogram(s: &OrderedSample, width: f64, origin: f64) -> Result<HistogramBins> {
    if !(width > 0.0) {
        return Err(Error::InvalidBinWidth(width));
    }
    let mut counts = BTreeMap::new();
    for &v in s.values() {
        let idx = ((v - origin) / width).floor() as i64;
        *counts.entry(idx).or_insert(0u64) += 1;
    }
    Ok(HistogramBins { width, origin, counts })
}

/// Build the hypothetical league-average sample from per-team samples.
///
/// Pools every value and sorts. When the pool size divides evenly into
/// `target_len` groups of size g, the ⌈g/2⌉-th smallest of each consecutive
/// group is emitted (for g = 30 that is the 15th smallest). Otherwise falls
/// back to quantile interpolation on the pooled sample.
pub fn league_average(teams: &[OrderedSample], target_len: usize) -> Result<OrderedSample> {
    if teams.is_empty() || target_len == 0 {
        return Err(Error::EmptySample);
    }
    let mut pool: Vec<f64> = teams.iter().flat_map(|t| t.values().iter().copied()).collect();
    pool.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let total = pool.len();

    let values = if total % target_len == 0 {
        let g = total / target_len;
        let mid = g.div_ceil(2); // 1-based rank within the group
        (0..target_len).map(|k| pool[k * g + mid - 1]).collect()
    } else {
        let pooled = OrderedSample::new(pool)?;
        (1..=target_len)
            .map(|i| pooled.value_at_percentile(100.0 * (i as f64 - 0.5) / target_len as f64))
            .collect::<Result<Vec<_>>>()?
    };
    OrderedSample::new(values)
}

/// Two-sample Kolmogorov-Smirnov statistic: the sup-norm distance between the
/// empirical CDFs.
pub fn ks_statistic(a: &OrderedSample, b: &OrderedSample) -> f64 {
    let (xs, ys) = (a.values(), b.values());
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d.min(1.0)
}
