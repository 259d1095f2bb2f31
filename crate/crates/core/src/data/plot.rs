//! Plot data for the UI: histograms, box-plot statistics and KDE curves.

use serde::{Deserialize, Serialize};

use super::summary::quantile_sorted;
use super::DataError;

const MAX_BINS: usize = 1000;
const KDE_GRID: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "rule", content = "bins")]
pub enum BinRule {
    #[default]
    FreedmanDiaconis,
    EqualWidth(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramData {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCurve {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub bandwidth: f64,
}

/// Box-plot geometry with Tukey fences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub lower_fence: f64,
    pub upper_fence: f64,
    /// Most extreme values still inside the fences.
    pub whisker_low: f64,
    pub whisker_high: f64,
}

fn sorted_copy(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

pub fn histogram(values: &[f64], rule: BinRule) -> Result<HistogramData, DataError> {
    if values.is_empty() {
        return Err(DataError::InvalidArgument(
            "histogram of an empty column".into(),
        ));
    }
    let sorted = sorted_copy(values);
    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
    if min == max {
        return Ok(HistogramData {
            bin_edges: vec![min - 0.5, max + 0.5],
            counts: vec![values.len()],
        });
    }
    let bins = match rule {
        BinRule::EqualWidth(k) => k.max(1),
        BinRule::FreedmanDiaconis => {
            let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
            if iqr > 0.0 {
                let width = 2.0 * iqr / (values.len() as f64).cbrt();
                (((max - min) / width).ceil() as usize).clamp(1, MAX_BINS)
            } else {
                10
            }
        }
    };
    let width = (max - min) / bins as f64;
    let mut bin_edges: Vec<f64> = (0..bins).map(|i| min + i as f64 * width).collect();
    bin_edges.push(max);
    let mut counts = vec![0usize; bins];
    for &v in values {
        let idx = (((v - min) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    Ok(HistogramData { bin_edges, counts })
}

pub fn box_stats(values: &[f64]) -> Option<BoxStats> {
    if values.is_empty() {
        return None;
    }
    let sorted = sorted_copy(values);
    let q1 = quantile_sorted(&sorted, 0.25);
    let q3 = quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    let lower_fence = q1 - 1.5 * iqr;
    let upper_fence = q3 + 1.5 * iqr;
    let mut inside = sorted
        .iter()
        .copied()
        .filter(|v| *v >= lower_fence && *v <= upper_fence);
    let whisker_low = inside.clone().next().unwrap_or(q1);
    let whisker_high = inside.next_back().unwrap_or(q3);
    Some(BoxStats {
        q1,
        median: quantile_sorted(&sorted, 0.5),
        q3,
        lower_fence,
        upper_fence,
        whisker_low,
        whisker_high,
    })
}

/// Gaussian KDE with Silverman's bandwidth on a 256-point grid spanning
/// `[min - 3h, max + 3h]`.
pub fn kde(values: &[f64]) -> Result<DensityCurve, DataError> {
    let sorted = sorted_copy(values);
    let n = sorted.len();
    if n < 2 || sorted[0] == sorted[n - 1] {
        return Err(DataError::InvalidArgument(
            "density estimate needs at least two distinct values".into(),
        ));
    }
    let nf = n as f64;
    let mean = sorted.iter().sum::<f64>() / nf;
    let std = (sorted.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0)).sqrt();
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let spread = if iqr > 0.0 { std.min(iqr / 1.34) } else { std };
    let h = 0.9 * spread * nf.powf(-0.2);

    let lo = sorted[0] - 3.0 * h;
    let hi = sorted[n - 1] + 3.0 * h;
    let step = (hi - lo) / (KDE_GRID - 1) as f64;
    let norm = 1.0 / (nf * h * (2.0 * std::f64::consts::PI).sqrt());
    // Contributions beyond 8 bandwidths are below 1e-14 of the peak.
    let cutoff = 8.0 * h;

    let xs: Vec<f64> = (0..KDE_GRID).map(|i| lo + i as f64 * step).collect();
    let ys = xs
        .iter()
        .map(|&x| {
            let start = sorted.partition_point(|v| *v < x - cutoff);
            let end = sorted.partition_point(|v| *v <= x + cutoff);
            let sum: f64 = sorted[start..end]
                .iter()
                .map(|v| {
                    let z = (x - v) / h;
                    (-0.5 * z * z).exp()
                })
                .sum();
            sum * norm
        })
        .collect();
    Ok(DensityCurve {
        xs,
        ys,
        bandwidth: h,
    })
}
