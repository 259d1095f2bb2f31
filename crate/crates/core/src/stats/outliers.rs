use serde::{Deserialize, Serialize};

use super::StatsError;
use crate::data::quantile_sorted;

/// Tukey-fence outlier scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierReport {
    /// Non-missing values examined.
    pub n: usize,
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
    pub lower_fence: f64,
    pub upper_fence: f64,
    pub outlier_count: usize,
    /// Positions in the input sequence (missing cells keep their position).
    pub outlier_row_indices: Vec<usize>,
}

impl OutlierReport {
    pub fn outlier_fraction(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.outlier_count as f64 / self.n as f64
        }
    }
}

/// Flags values strictly outside `[q1 - 1.5 iqr, q3 + 1.5 iqr]`, with type-7
/// quartiles. Missing cells are skipped.
pub fn iqr_outliers(values: &[Option<f64>]) -> Result<OutlierReport, StatsError> {
    let mut sorted: Vec<f64> = values.iter().flatten().copied().collect();
    if sorted.len() < 4 {
        return Err(StatsError::InsufficientData {
            what: "outlier detection",
            needed: 4,
            got: sorted.len(),
        });
    }
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile_sorted(&sorted, 0.25);
    let q3 = quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    let lower_fence = q1 - 1.5 * iqr;
    let upper_fence = q3 + 1.5 * iqr;
    let outlier_row_indices: Vec<usize> = values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| {
            v.filter(|x| *x < lower_fence || *x > upper_fence)
                .map(|_| i)
        })
        .collect();
    Ok(OutlierReport {
        n: sorted.len(),
        q1,
        q3,
        iqr,
        lower_fence,
        upper_fence,
        outlier_count: outlier_row_indices.len(),
        outlier_row_indices,
    })
}

/// [`iqr_outliers`] for data without missing values.
pub fn iqr_outliers_dense(values: &[f64]) -> Result<OutlierReport, StatsError> {
    let wrapped: Vec<Option<f64>> = values.iter().map(|&v| Some(v)).collect();
    iqr_outliers(&wrapped)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_data_has_no_outliers() {
        let r = iqr_outliers_dense(&[5.0; 4]).unwrap();
        assert_eq!(r.outlier_count, 0);
        assert_eq!(r.iqr, 0.0);
    }

    #[test]
    fn hand_computed_fences() {
        let r = iqr_outliers_dense(&[1.0, 2.0, 2.0, 3.0, 3.0, 3.0, 4.0, 100.0]).unwrap();
        assert_eq!((r.q1, r.q3), (2.0, 3.25));
        assert_eq!((r.lower_fence, r.upper_fence), (0.125, 5.125));
        assert_eq!(r.outlier_row_indices, vec![7]);
        assert_eq!(r.outlier_count, 1);
    }

    #[test]
    fn indices_follow_original_rows_with_missing() {
        let v = vec![
            Some(1.0),
            None,
            Some(2.0),
            Some(2.0),
            Some(3.0),
            None,
            Some(50.0),
        ];
        let r = iqr_outliers(&v).unwrap();
        assert_eq!(r.n, 5);
        assert_eq!(r.outlier_row_indices, vec![6]);
    }

    #[test]
    fn needs_four_values() {
        assert!(matches!(
            iqr_outliers(&[Some(1.0), None, Some(2.0), Some(3.0)]),
            Err(StatsError::InsufficientData { got: 3, .. })
        ));
    }
}
