//! QQ-plots, Pearson correlation, and least-squares lines.

use crate::sample::OrderedSample;
use crate::{Error, Result};

/// Paired order statistics of two samples. Monotone in both coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct QQPlot {
    pub points: Vec<(f64, f64)>,
}

/// Least-squares line through a qq-plot (y on x) plus its Pearson r.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub pearson_r: f64,
}

impl LinearFit {
    pub fn apply(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

/// Pair `a` (x) against `b` (y). Equal lengths pair i-th order statistics;
/// otherwise the larger sample is evaluated at the smaller one's plotting
/// positions by interpolation.
pub fn qq_pairs(a: &OrderedSample, b: &OrderedSample) -> Result<QQPlot> {
    let points = if a.len() == b.len() {
        a.values().iter().zip(b.values()).map(|(&x, &y)| (x, y)).collect()
    } else if a.len() < b.len() {
        (1..=a.len())
            .map(|i| Ok((a.values()[i - 1], b.value_at_percentile(a.plotting_position(i))?)))
            .collect::<Result<Vec<_>>>()?
    } else {
        (1..=b.len())
            .map(|i| Ok((a.value_at_percentile(b.plotting_position(i))?, b.values()[i - 1])))
            .collect::<Result<Vec<_>>>()?
    };
    Ok(QQPlot { points })
}

fn centered_moments(q: &QQPlot) -> Result<(f64, f64, f64, f64, f64)> {
    if q.points.len() < 2 {
        return Err(Error::DegenerateCorrelation);
    }
    let n = q.points.len() as f64;
    let mx = q.points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = q.points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for &(x, y) in &q.points {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateCorrelation);
    }
    Ok((mx, my, sxx, syy, sxy))
}

/// Product-moment correlation of the qq points.
pub fn pearson(q: &QQPlot) -> Result<f64> {
    let (_, _, sxx, syy, sxy) = centered_moments(q)?;
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Ordinary least-squares y-on-x fit plus Pearson r.
pub fn linear_fit(q: &QQPlot) -> Result<LinearFit> {
    let (mx, my, sxx, syy, sxy) = centered_moments(q)?;
    let slope = sxy / sxx;
    Ok(LinearFit {
        slope,
        intercept: my - slope * mx,
        pearson_r: (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0),
    })
}
