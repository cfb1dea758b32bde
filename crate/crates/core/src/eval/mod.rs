//! Forecast scoring and rolling-horizon evaluation.

mod metrics;
pub mod report;
mod rolling;

pub use metrics::{mape, mape_band, mase, mase_scaled, MapeBand};
pub use rolling::{
    naive_forecast, predictive_power, rolling_horizon, Aggregation, EvalOptions, ForecastEvaluation,
    Forecaster, MaseVariant, MetricSummary, PeriodScore, Summary,
};
