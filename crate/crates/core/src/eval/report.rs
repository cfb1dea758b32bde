//! Plot-ready and summary outputs of an evaluation sweep.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::rolling::{predictive_power, ForecastEvaluation, MetricSummary};
use crate::error::Result;

pub const PERIOD_CSV_HEADER: [&str; 6] = ["period", "week_index", "metric", "model", "value", "excluded_terms"];

/// Long-format per-period scores, two rows (MAPE then MASE) per period.
/// Undefined scores leave `value` empty.
pub fn period_csv(evaluation: &ForecastEvaluation, model: &str) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(PERIOD_CSV_HEADER)?;
    for p in &evaluation.per_period {
        for (metric, value, excluded) in [
            ("MAPE", p.mape, p.excluded_mape_terms),
            ("MASE", p.mase, p.excluded_mase_terms),
        ] {
            w.write_record([
                p.period.to_string(),
                p.row.to_string(),
                metric.to_string(),
                model.to_string(),
                value.map(|v| v.to_string()).unwrap_or_default(),
                excluded.to_string(),
            ])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricCell {
    pub mean: f64,
    pub variance: f64,
    pub median: f64,
}

impl From<&MetricSummary> for MetricCell {
    fn from(m: &MetricSummary) -> Self {
        MetricCell {
            mean: m.mean,
            variance: m.variance,
            median: m.median,
        }
    }
}

/// One `(state, target, model)` entry of the summary table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CellReport {
    Scored {
        #[serde(rename = "MASE")]
        mase: Option<MetricCell>,
        #[serde(rename = "MAPE")]
        mape: Option<MetricCell>,
        predictive_power: bool,
    },
    Failed {
        error: String,
    },
}

impl From<&ForecastEvaluation> for CellReport {
    fn from(ev: &ForecastEvaluation) -> Self {
        CellReport::Scored {
            mase: ev.summary.mase.as_ref().map(MetricCell::from),
            mape: ev.summary.mape.as_ref().map(MetricCell::from),
            predictive_power: predictive_power(ev),
        }
    }
}

/// state → target → model → cell.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SummaryTable(pub BTreeMap<String, BTreeMap<String, BTreeMap<String, CellReport>>>);

impl SummaryTable {
    pub fn insert(&mut self, state: &str, target: &str, model: &str, cell: CellReport) {
        self.0
            .entry(state.to_string())
            .or_default()
            .entry(target.to_string())
            .or_default()
            .insert(model.to_string(), cell);
    }

    pub fn get(&self, state: &str, target: &str, model: &str) -> Option<&CellReport> {
        self.0.get(state)?.get(target)?.get(model)
    }

    pub fn failures(&self) -> usize {
        self.0
            .values()
            .flat_map(|t| t.values())
            .flat_map(|m| m.values())
            .filter(|c| matches!(c, CellReport::Failed { .. }))
            .count()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
