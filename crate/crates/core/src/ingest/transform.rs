use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::NetworkTimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    #[default]
    Identity,
    Log1p,
    Sqrt,
    /// Per-column standardisation.
    Zscore,
}

impl std::str::FromStr for TransformKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" | "identity" => Ok(TransformKind::Identity),
            "log" | "log1p" => Ok(TransformKind::Log1p),
            "sqrt" => Ok(TransformKind::Sqrt),
            "zscore" | "normalize" => Ok(TransformKind::Zscore),
            other => Err(Error::InvalidArgument(format!("unknown transform '{other}'"))),
        }
    }
}

/// A transform with whatever parameters it needs to be inverted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transform {
    pub kind: TransformKind,
    /// `(mean, scale)` per column; only used by [`TransformKind::Zscore`].
    pub columns: Vec<(f64, f64)>,
}

impl Transform {
    /// Estimates parameters from `values` (rows = time, columns = nodes).
    pub fn fit(kind: TransformKind, values: &Array2<f64>) -> Transform {
        let columns = match kind {
            TransformKind::Zscore => values
                .axis_iter(Axis(1))
                .map(|col| {
                    let n = col.len() as f64;
                    let mean = col.sum() / n;
                    let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
                    let scale = if var > 0.0 { var.sqrt() } else { 1.0 };
                    (mean, scale)
                })
                .collect(),
            _ => Vec::new(),
        };
        Transform { kind, columns }
    }

    pub fn apply_values(&self, values: &Array2<f64>) -> Result<Array2<f64>> {
        match self.kind {
            TransformKind::Identity => Ok(values.clone()),
            TransformKind::Log1p => non_negative(values, "log1p").map(|_| values.mapv(f64::ln_1p)),
            TransformKind::Sqrt => non_negative(values, "sqrt").map(|_| values.mapv(f64::sqrt)),
            TransformKind::Zscore => {
                self.check_columns(values)?;
                let mut out = values.clone();
                for (mut col, &(mean, scale)) in out.axis_iter_mut(Axis(1)).zip(&self.columns) {
                    col.mapv_inplace(|v| (v - mean) / scale);
                }
                Ok(out)
            }
        }
    }

    pub fn invert_values(&self, values: &Array2<f64>) -> Result<Array2<f64>> {
        match self.kind {
            TransformKind::Identity => Ok(values.clone()),
            TransformKind::Log1p => Ok(values.mapv(f64::exp_m1)),
            TransformKind::Sqrt => Ok(values.mapv(|v| v * v)),
            TransformKind::Zscore => {
                self.check_columns(values)?;
                let mut out = values.clone();
                for (mut col, &(mean, scale)) in out.axis_iter_mut(Axis(1)).zip(&self.columns) {
                    col.mapv_inplace(|v| v * scale + mean);
                }
                Ok(out)
            }
        }
    }

    pub fn apply(&self, series: &NetworkTimeSeries) -> Result<NetworkTimeSeries> {
        series.with_values(self.apply_values(series.values())?)
    }

    pub fn invert(&self, series: &NetworkTimeSeries) -> Result<NetworkTimeSeries> {
        series.with_values(self.invert_values(series.values())?)
    }

    fn check_columns(&self, values: &Array2<f64>) -> Result<()> {
        if self.columns.len() != values.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "transform fitted on {} columns, applied to {}",
                self.columns.len(),
                values.ncols()
            )));
        }
        Ok(())
    }
}

fn non_negative(values: &Array2<f64>, kind: &'static str) -> Result<()> {
    match values.iter().find(|&&v| v < 0.0) {
        Some(&value) => Err(Error::NegativeInput { kind, value }),
        None => Ok(()),
    }
}

/// Fits `kind` on the whole series and applies it.
pub fn transform(series: &NetworkTimeSeries, kind: TransformKind) -> Result<(NetworkTimeSeries, Transform)> {
    let t = Transform::fit(kind, series.values());
    Ok((t.apply(series)?, t))
}

pub fn invert(series: &NetworkTimeSeries, t: &Transform) -> Result<NetworkTimeSeries> {
    t.invert(series)
}
