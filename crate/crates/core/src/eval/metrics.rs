use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_lengths(lens: &[usize]) -> Result<()> {
    if lens.iter().any(|&l| l != lens[0]) {
        return Err(Error::DimensionMismatch(format!("metric inputs have lengths {lens:?}")));
    }
    if lens[0] == 0 {
        return Err(Error::InsufficientData("metric inputs are empty".into()));
    }
    Ok(())
}

/// Mean absolute percentage error `mean |(Y − F) / Y|`, as a fraction.
///
/// Terms with `Y = 0` are skipped; returns `(value, excluded_count)`.
pub fn mape(actual: &[f64], forecast: &[f64]) -> Result<(f64, usize)> {
    check_lengths(&[actual.len(), forecast.len()])?;
    let mut total = 0.0;
    let mut used = 0usize;
    for (&y, &f) in actual.iter().zip(forecast) {
        if y == 0.0 {
            continue;
        }
        total += ((y - f) / y).abs();
        used += 1;
    }
    if used == 0 {
        return Err(Error::UndefinedMetric("MAPE"));
    }
    Ok((total / used as f64, actual.len() - used))
}

/// Per-term scaled error `mean |(Y_t − F_t) / (Y_t − Y_{t−1})|`.
///
/// `previous[k]` is the observation one step before `actual[k]`. Flat steps
/// (`Y_t = Y_{t−1}`) are skipped; returns `(value, excluded_count)`. The
/// naïve forecast `F_t = Y_{t−1}` scores exactly 1.
pub fn mase(actual: &[f64], forecast: &[f64], previous: &[f64]) -> Result<(f64, usize)> {
    check_lengths(&[actual.len(), forecast.len(), previous.len()])?;
    let mut total = 0.0;
    let mut used = 0usize;
    for ((&y, &f), &prev) in actual.iter().zip(forecast).zip(previous) {
        let step = y - prev;
        if step == 0.0 {
            continue;
        }
        total += ((y - f) / step).abs();
        used += 1;
    }
    if used == 0 {
        return Err(Error::UndefinedMetric("MASE"));
    }
    Ok((total / used as f64, actual.len() - used))
}

/// Conventional scaled error: total absolute error over total absolute
/// naïve error. No term is excluded; errors only if every step is flat.
pub fn mase_scaled(actual: &[f64], forecast: &[f64], previous: &[f64]) -> Result<(f64, usize)> {
    check_lengths(&[actual.len(), forecast.len(), previous.len()])?;
    let err: f64 = actual.iter().zip(forecast).map(|(y, f)| (y - f).abs()).sum();
    let naive: f64 = actual.iter().zip(previous).map(|(y, p)| (y - p).abs()).sum();
    if naive == 0.0 {
        return Err(Error::UndefinedMetric("MASE"));
    }
    Ok((err / naive, 0))
}

/// Qualitative reading of a MAPE value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapeBand {
    HighlyAccurate,
    Good,
    Reasonable,
    Inaccurate,
}

impl MapeBand {
    /// `(lower, upper)` in percent; the upper bound belongs to the band.
    pub fn bounds(self) -> (f64, Option<f64>) {
        match self {
            MapeBand::HighlyAccurate => (0.0, Some(10.0)),
            MapeBand::Good => (10.0, Some(20.0)),
            MapeBand::Reasonable => (20.0, Some(50.0)),
            MapeBand::Inaccurate => (50.0, None),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            MapeBand::HighlyAccurate => "highly_accurate",
            MapeBand::Good => "good",
            MapeBand::Reasonable => "reasonable",
            MapeBand::Inaccurate => "inaccurate",
        }
    }
}

/// Band for a MAPE given as a fraction. Boundary values go to the
/// lower-error band, so exactly 10% is highly accurate.
pub fn mape_band(value: f64) -> Result<MapeBand> {
    if value.is_nan() || value < 0.0 {
        return Err(Error::NegativeInput {
            kind: "MAPE band",
            value,
        });
    }
    let percent = value * 100.0;
    Ok(if percent <= 10.0 {
        MapeBand::HighlyAccurate
    } else if percent <= 20.0 {
        MapeBand::Good
    } else if percent <= 50.0 {
        MapeBand::Reasonable
    } else {
        MapeBand::Inaccurate
    })
}
