use serde::{Deserialize, Serialize};

use super::{DataError, Dataset};

/// Descriptive statistics over the non-missing values of a numeric column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub count: usize,
    pub missing_count: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for a single value.
    pub std: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    /// Most frequent value; ties resolve to the smallest value.
    pub mode_value: f64,
    pub mode_frequency: usize,
}

/// Type-7 quantile: linear interpolation between order statistics at rank
/// `(n - 1) * q`.
pub fn quantile(values: &[f64], q: f64) -> Result<f64, DataError> {
    if values.is_empty() {
        return Err(DataError::InvalidArgument(
            "quantile of an empty sequence".into(),
        ));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(DataError::InvalidArgument(format!(
            "quantile level {q} outside [0, 1]"
        )));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(quantile_sorted(&sorted, q))
}

pub(crate) fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = h - lo as f64;
    if frac == 0.0 {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

/// Summary of a plain slice of values (no missing markers).
pub fn summarize(values: &[f64]) -> Option<SummaryStats> {
    if values.is_empty() {
        return None;
    }
    let n = values.len();
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);

    let mean = values.iter().sum::<f64>() / n as f64;
    let std = if n > 1 {
        let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    } else {
        0.0
    };

    let (mut mode_value, mut mode_frequency) = (sorted[0], 0);
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && sorted[j] == sorted[i] {
            j += 1;
        }
        if j - i > mode_frequency {
            mode_value = sorted[i];
            mode_frequency = j - i;
        }
        i = j;
    }

    Some(SummaryStats {
        count: n,
        missing_count: 0,
        mean,
        std,
        min: sorted[0],
        q1: quantile_sorted(&sorted, 0.25),
        median: quantile_sorted(&sorted, 0.5),
        q3: quantile_sorted(&sorted, 0.75),
        max: sorted[n - 1],
        mode_value,
        mode_frequency,
    })
}

pub fn column_summary(dataset: &Dataset, column: &str) -> Result<SummaryStats, DataError> {
    let col = dataset.column(column)?;
    let values = col.present_values()?;
    let mut stats = summarize(&values).ok_or_else(|| DataError::EmptyColumn(column.into()))?;
    stats.missing_count = col.missing_count();
    Ok(stats)
}
