use serde::{Deserialize, Serialize};

use super::special::f_sf;
use super::{mean, StatsError};
use crate::data::quantile_sorted;

/// Location each group's absolute deviations are measured from. `Median`
/// gives the Brown–Forsythe variant, which is less sensitive to skew.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LeveneCenter {
    #[default]
    Mean,
    Median,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeveneResult {
    pub w: f64,
    pub df1: usize,
    pub df2: usize,
    pub p: f64,
    pub center: LeveneCenter,
}

fn center_of(g: &[f64], center: LeveneCenter) -> f64 {
    match center {
        LeveneCenter::Mean => mean(g),
        LeveneCenter::Median => {
            let mut s = g.to_vec();
            s.sort_by(f64::total_cmp);
            quantile_sorted(&s, 0.5)
        }
    }
}

/// Levene's test for equal variances of two groups.
pub fn levene_test(a: &[f64], b: &[f64], center: LeveneCenter) -> Result<LeveneResult, StatsError> {
    let groups = [a, b];
    for g in groups {
        if g.len() < 2 {
            return Err(StatsError::InsufficientData {
                what: "each group of Levene's test",
                needed: 2,
                got: g.len(),
            });
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::Domain("non-finite value in group".into()));
        }
    }
    let z: Vec<Vec<f64>> = groups
        .iter()
        .map(|g| {
            let c = center_of(g, center);
            g.iter().map(|v| (v - c).abs()).collect()
        })
        .collect();
    let k = z.len();
    let n_total: usize = z.iter().map(Vec::len).sum();
    let group_means: Vec<f64> = z.iter().map(|g| mean(g)).collect();
    let grand = z.iter().flatten().sum::<f64>() / n_total as f64;

    let between: f64 = z
        .iter()
        .zip(&group_means)
        .map(|(g, m)| g.len() as f64 * (m - grand).powi(2))
        .sum();
    let within: f64 = z
        .iter()
        .zip(&group_means)
        .map(|(g, m)| g.iter().map(|v| (v - m).powi(2)).sum::<f64>())
        .sum();

    // Equal deviations within every group (always the case for two-point
    // groups) leave only rounding residue in `within`; treat that as zero so
    // the statistic does not depend on where the data happen to sit.
    let scale: f64 = z.iter().flatten().map(|v| v * v).sum();

    let (df1, df2) = (k - 1, n_total - k);
    let (w, p) = if between == 0.0 {
        (0.0, 1.0)
    } else if within <= 1e-12 * scale {
        (f64::INFINITY, 0.0)
    } else {
        let w = (df2 as f64 * between) / (df1 as f64 * within);
        (w, f_sf(w, df1 as f64, df2 as f64)?)
    };
    Ok(LeveneResult {
        w,
        df1,
        df2,
        p,
        center,
    })
}
