use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{mape, mase, mase_scaled};
use crate::error::{Error, Result};
use crate::graph::CountyNetwork;
use crate::ingest::{Transform, TransformKind};
use crate::model::{fit, forecast, GnarOrder};
use crate::series::NetworkTimeSeries;

/// `F_t = Y_{t−1}`: rows `1..T` of the output are rows `0..T−1` of the
/// input, dated from the second period.
pub fn naive_forecast(series: &NetworkTimeSeries) -> Result<NetworkTimeSeries> {
    let t_len = series.len();
    if t_len < 2 {
        return Err(Error::InsufficientData("naïve forecast needs at least 2 rows".into()));
    }
    let mut out = series.slice_rows(0, t_len - 1)?;
    out.start_date = series.date_of(1);
    Ok(out)
}

/// A model scored by [`rolling_horizon`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Forecaster {
    Gnar(GnarOrder),
    Naive,
}

impl Forecaster {
    fn min_history(&self) -> usize {
        match self {
            Forecaster::Gnar(order) => order.p + 1,
            Forecaster::Naive => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MaseVariant {
    /// Mean of per-term ratios to the one-step naïve error.
    #[default]
    PerTerm,
    /// Total absolute error over total naïve error.
    Scaled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Each period scores the nodes at that period only.
    #[default]
    CrossSectional,
    /// Each period scores every term from the first test period onward.
    Cumulative,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvalOptions {
    /// Applied before fitting (parameters from the training window only) and
    /// inverted before scoring.
    pub transform: TransformKind,
    /// Node indices that are scored; `None` scores every node.
    pub scored_nodes: Option<Vec<usize>>,
    pub mase_variant: MaseVariant,
    pub aggregation: Aggregation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodScore {
    /// 1-based test period.
    pub period: usize,
    /// Panel row being forecast.
    pub row: usize,
    /// `None` when every term was excluded.
    pub mape: Option<f64>,
    pub mase: Option<f64>,
    pub excluded_mape_terms: usize,
    pub excluded_mase_terms: usize,
    pub evaluated_terms: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: f64,
    pub median: f64,
    /// Sample variance (`N − 1` denominator); 0 for a single period.
    pub variance: f64,
    pub periods: usize,
}

impl MetricSummary {
    /// Summary of the defined values, `None` if there are none.
    pub fn from_values(values: &[f64]) -> Option<MetricSummary> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let variance = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len() % 2 == 1 {
            sorted[mid]
        } else {
            (sorted[mid - 1] + sorted[mid]) / 2.0
        };
        Some(MetricSummary {
            mean,
            median,
            variance,
            periods: values.len(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mape: Option<MetricSummary>,
    pub mase: Option<MetricSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastEvaluation {
    pub per_period: Vec<PeriodScore>,
    pub summary: Summary,
}

impl ForecastEvaluation {
    pub fn from_periods(per_period: Vec<PeriodScore>) -> Self {
        let mapes: Vec<f64> = per_period.iter().filter_map(|p| p.mape).collect();
        let mases: Vec<f64> = per_period.iter().filter_map(|p| p.mase).collect();
        ForecastEvaluation {
            summary: Summary {
                mape: MetricSummary::from_values(&mapes),
                mase: MetricSummary::from_values(&mases),
            },
            per_period,
        }
    }
}

/// A model has predictive power when its mean MASE is strictly below the
/// naïve forecast's 1.
pub fn predictive_power(evaluation: &ForecastEvaluation) -> bool {
    evaluation.summary.mase.as_ref().is_some_and(|m| m.mean < 1.0)
}

// Scored terms of one test period.
struct Terms {
    actual: Vec<f64>,
    predicted: Vec<f64>,
    previous: Vec<f64>,
}

/// Refits on every row before each of the final `test_periods` rows and
/// scores the one-step forecast of that row.
///
/// Periods are independent and computed in parallel; records come back in
/// period order. A failure names the period it occurred in.
pub fn rolling_horizon(
    series: &NetworkTimeSeries,
    net: &CountyNetwork,
    forecaster: &Forecaster,
    test_periods: usize,
    options: &EvalOptions,
) -> Result<ForecastEvaluation> {
    series.check_aligned(net)?;
    let t_len = series.len();
    if test_periods == 0 {
        return Err(Error::InvalidArgument("test_periods must be at least 1".into()));
    }
    if t_len < test_periods + forecaster.min_history() {
        return Err(Error::InsufficientData(format!(
            "{t_len} rows cannot hold {test_periods} test periods after {} training rows",
            forecaster.min_history()
        )));
    }
    let scored: Vec<usize> = match &options.scored_nodes {
        Some(nodes) => nodes.clone(),
        None => (0..series.shape().1).collect(),
    };
    if let Some(&bad) = scored.iter().find(|&&k| k >= series.shape().1) {
        return Err(Error::InvalidArgument(format!("scored node index {bad} out of range")));
    }
    let first = t_len - test_periods;

    let terms: Vec<Terms> = (first..t_len)
        .into_par_iter()
        .map(|row| {
            period_terms(series, net, forecaster, row, &scored, options.transform).map_err(|e| Error::Period {
                period: row - first + 1,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;

    let mut per_period = Vec::with_capacity(test_periods);
    let mut pooled = Terms {
        actual: Vec::new(),
        predicted: Vec::new(),
        previous: Vec::new(),
    };
    for (k, t) in terms.iter().enumerate() {
        let scored_terms = match options.aggregation {
            Aggregation::CrossSectional => t,
            Aggregation::Cumulative => {
                pooled.actual.extend(&t.actual);
                pooled.predicted.extend(&t.predicted);
                pooled.previous.extend(&t.previous);
                &pooled
            }
        };
        per_period.push(score(k + 1, first + k, scored_terms, options.mase_variant)?);
    }
    Ok(ForecastEvaluation::from_periods(per_period))
}

fn score(period: usize, row: usize, t: &Terms, variant: MaseVariant) -> Result<PeriodScore> {
    let wrap = |e: Error| Error::Period {
        period,
        source: Box::new(e),
    };
    let n = t.actual.len();
    let (mape_value, mape_excl) = match mape(&t.actual, &t.predicted) {
        Ok((v, ex)) => (Some(v), ex),
        Err(Error::UndefinedMetric(_)) => (None, n),
        Err(e) => return Err(wrap(e)),
    };
    let mase_fn = match variant {
        MaseVariant::PerTerm => mase,
        MaseVariant::Scaled => mase_scaled,
    };
    let (mase_value, mase_excl) = match mase_fn(&t.actual, &t.predicted, &t.previous) {
        Ok((v, ex)) => (Some(v), ex),
        Err(Error::UndefinedMetric(_)) => (None, n),
        Err(e) => return Err(wrap(e)),
    };
    Ok(PeriodScore {
        period,
        row,
        mape: mape_value,
        mase: mase_value,
        excluded_mape_terms: mape_excl,
        excluded_mase_terms: mase_excl,
        evaluated_terms: n,
    })
}

fn period_terms(
    series: &NetworkTimeSeries,
    net: &CountyNetwork,
    forecaster: &Forecaster,
    row: usize,
    scored: &[usize],
    transform: TransformKind,
) -> Result<Terms> {
    let actual_row = series.row(row);
    let previous_row = series.row(row - 1);
    let predicted_row = match forecaster {
        Forecaster::Naive => previous_row.to_owned(),
        Forecaster::Gnar(order) => {
            let train = series.slice_rows(0, row)?;
            let t = Transform::fit(transform, train.values());
            let train = t.apply(&train)?;
            let fitted = fit(&train, net, order)?;
            let next = forecast(&fitted, &train, net, 1)?;
            t.invert_values(next.values())?.row(0).to_owned()
        }
    };
    Ok(Terms {
        actual: scored.iter().map(|&k| actual_row[k]).collect(),
        predicted: scored.iter().map(|&k| predicted_row[k]).collect(),
        previous: scored.iter().map(|&k| previous_row[k]).collect(),
    })
}
