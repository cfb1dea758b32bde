//! Network autoregressive forecasting on geographic commuting networks.
//!
//! The crate is organised in four layers:
//!
//! - [`graph`]: static weighted county networks, stage neighbourhoods,
//!   normalised connection weights, graph statistics and the triangular
//!   lattice reference topology.
//! - [`model`]: GNAR(p, [s]) processes: design construction, least-squares
//!   fitting, simulation, forecasting and order selection.
//! - [`eval`]: MAPE / MASE scoring and the rolling-horizon evaluation
//!   against the naïve forecast.
//! - [`ingest`]: commuting-flow and case/death CSV parsing, panel
//!   alignment, weekly aggregation and value transforms.
//!
//! ```
//! use netgnar::{graph::triangular_lattice, model::{preset, simulate, GnarCoefficients}};
//!
//! let net = triangular_lattice(3, 3).unwrap();
//! let order = preset(1).unwrap();
//! let coef = GnarCoefficients::global(&order, vec![0.3], vec![vec![0.2]]).unwrap();
//! let series = simulate(&net, &order, &coef, 20, 1.0, 7).unwrap();
//! assert_eq!(series.shape(), (20, 9));
//! ```

pub mod error;
pub mod eval;
pub mod graph;
pub mod ingest;
pub mod model;
pub mod series;

pub use error::{Error, Result};
pub use eval::{
    mape, mape_band, mase, naive_forecast, predictive_power, rolling_horizon, EvalOptions,
    ForecastEvaluation, Forecaster, MapeBand, MetricSummary,
};
pub use graph::{
    haversine_km, network_stats, triangular_lattice, CountyNetwork, NetworkStats, NodeAttrs,
    NodeId, StageNeighborhood, WeightMode,
};
pub use model::{
    fit, forecast, model_selection, preset, simulate, AlphaMode, GnarCoefficients, GnarFit,
    GnarOrder, SelectionCriterion,
};
pub use series::{Frequency, NetworkTimeSeries};
