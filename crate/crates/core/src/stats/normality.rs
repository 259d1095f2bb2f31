use serde::{Deserialize, Serialize};

use super::{mean, StatsError};

/// Group sizes above this are treated as large enough for the t-test to be
/// robust to non-normality.
pub const LARGE_SAMPLE_THRESHOLD: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityReport {
    pub n: usize,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub large_sample: bool,
    pub verdict: String,
}

/// Shape summary plus the large-sample rule of thumb. No formal test is run.
pub fn normality_check(values: &[f64]) -> Result<NormalityReport, StatsError> {
    let n = values.len();
    if n < 3 {
        return Err(StatsError::InsufficientData {
            what: "normality check",
            needed: 3,
            got: n,
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::Domain("non-finite value in sample".into()));
    }
    let m = mean(values);
    let moment = |k: i32| values.iter().map(|v| (v - m).powi(k)).sum::<f64>() / n as f64;
    let m2 = moment(2);
    let (skewness, excess_kurtosis) = if m2 > 0.0 {
        (moment(3) / m2.powf(1.5), moment(4) / (m2 * m2) - 3.0)
    } else {
        (0.0, 0.0)
    };
    let large_sample = n > LARGE_SAMPLE_THRESHOLD;
    let verdict = if large_sample {
        format!(
            "n = {n} exceeds {LARGE_SAMPLE_THRESHOLD}: by the rule of thumb the sample is large \
             enough for the t-test to be robust to non-normality"
        )
    } else {
        format!(
            "n = {n} is at most {LARGE_SAMPLE_THRESHOLD}: the rule of thumb does not apply, so \
             normality must be judged from the distribution shape \
             (skewness {skewness:.3}, excess kurtosis {excess_kurtosis:.3})"
        )
    };
    Ok(NormalityReport {
        n,
        skewness,
        excess_kurtosis,
        large_sample,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_sample_has_zero_skew() {
        let r = normality_check(&[-2.0, -1.0, 0.0, 1.0, 2.0]).unwrap();
        assert_eq!(r.skewness, 0.0);
        // m2 = 2, m4 = 6.8 → 6.8 / 4 - 3.
        assert!((r.excess_kurtosis - (1.7 - 3.0)).abs() < 1e-12);
        assert!(!r.large_sample);
    }

    #[test]
    fn threshold_is_strict() {
        let v: Vec<f64> = (0..30).map(f64::from).collect();
        assert!(!normality_check(&v).unwrap().large_sample);
        let v: Vec<f64> = (0..31).map(f64::from).collect();
        assert!(normality_check(&v).unwrap().large_sample);
    }

    #[test]
    fn too_few_values() {
        assert!(normality_check(&[1.0, 2.0]).is_err());
    }
}
