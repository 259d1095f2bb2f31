use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::linalg::Qr;
use super::{Named, StatsError};

/// Auxiliary R² at or above `1 - PERFECT_FIT_TOL` is treated as a perfect fit.
const PERFECT_FIT_TOL: f64 = 1e-12;

/// A variance inflation factor. Perfect collinearity serialises as the
/// string `"inf"` so the value survives JSON.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VifValue {
    Finite(f64),
    Infinite,
}

impl VifValue {
    pub fn as_f64(self) -> f64 {
        match self {
            VifValue::Finite(v) => v,
            VifValue::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, VifValue::Infinite)
    }
}

impl std::fmt::Display for VifValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VifValue::Finite(v) => write!(f, "{v:.2}"),
            VifValue::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for VifValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            VifValue::Finite(v) => s.serialize_f64(*v),
            VifValue::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for VifValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(VifValue::Finite(v)),
            Raw::Text(t) if t == "inf" => Ok(VifValue::Infinite),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("invalid VIF `{t}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VifEntry {
    pub variable: String,
    pub vif: VifValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VifOptions {
    /// Include an intercept in each auxiliary regression (centered VIF).
    /// Without it, R² is uncentered and the VIF also reflects how far each
    /// predictor's mean sits from zero.
    pub intercept: bool,
}

impl Default for VifOptions {
    fn default() -> Self {
        VifOptions { intercept: true }
    }
}

/// Centered VIF for each predictor.
pub fn vif(predictors: &[Named]) -> Result<Vec<VifEntry>, StatsError> {
    vif_with(predictors, VifOptions::default())
}

pub fn vif_with(predictors: &[Named], options: VifOptions) -> Result<Vec<VifEntry>, StatsError> {
    if predictors.len() < 2 {
        return Err(StatsError::Arity(format!(
            "VIF needs at least 2 predictors, got {}",
            predictors.len()
        )));
    }
    let n = predictors[0].1.len();
    if let Some((name, _)) = predictors.iter().find(|(_, c)| c.len() != n) {
        return Err(StatsError::LengthMismatch(format!("`{name}`")));
    }
    if predictors
        .iter()
        .any(|(_, c)| c.iter().any(|v| !v.is_finite()))
    {
        return Err(StatsError::Domain("non-finite value in VIF input".into()));
    }
    if n < 2 {
        return Err(StatsError::InsufficientData {
            what: "VIF",
            needed: 2,
            got: n,
        });
    }

    let ones = vec![1.0; n];
    predictors
        .iter()
        .enumerate()
        .map(|(j, (name, target))| {
            let mut cols: Vec<&[f64]> = Vec::with_capacity(predictors.len());
            if options.intercept {
                cols.push(&ones);
            }
            cols.extend(
                predictors
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != j)
                    .map(|(_, (_, c))| *c),
            );
            let r2 = auxiliary_r_squared(&cols, target, options.intercept);
            let vif = if 1.0 - r2 < PERFECT_FIT_TOL {
                VifValue::Infinite
            } else {
                VifValue::Finite(1.0 / (1.0 - r2))
            };
            Ok(VifEntry {
                variable: name.to_string(),
                vif,
            })
        })
        .collect()
}

/// R² of `target` regressed on `cols`. Dependent regressors are simply left
/// out; they add nothing to the column space.
fn auxiliary_r_squared(cols: &[&[f64]], target: &[f64], centered: bool) -> f64 {
    let tss: f64 = if centered {
        let m = super::mean(target);
        target.iter().map(|v| (v - m).powi(2)).sum()
    } else {
        target.iter().map(|v| v * v).sum()
    };
    // A target with no variation is explained perfectly by the intercept
    // (or is identically zero).
    let scale = target.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if tss <= (f64::EPSILON * scale).powi(2) * target.len() as f64 {
        return 1.0;
    }
    let qr = Qr::decompose(cols);
    let z = qr.apply_qt(target);
    let rss: f64 = z[qr.rank().min(z.len())..].iter().map(|v| v * v).sum();
    (1.0 - rss / tss).clamp(0.0, 1.0)
}
