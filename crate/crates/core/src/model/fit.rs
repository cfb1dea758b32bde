use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::design::{design_from, Design};
use super::{lstsq, Alpha, AlphaMode, ColumnDescriptor, GnarCoefficients, GnarOrder};
use crate::error::{Error, Result};
use crate::graph::CountyNetwork;
use crate::series::NetworkTimeSeries;

/// A fitted GNAR model.
#[derive(Debug, Clone, PartialEq)]
pub struct GnarFit {
    /// Effective order; per-node `α` may have fallen back to global.
    pub order: GnarOrder,
    pub coefficients: GnarCoefficients,
    /// Observed minus fitted, `(T - p) × n`.
    pub residuals: Array2<f64>,
    pub sigma2_hat: f64,
    pub design_columns: Vec<ColumnDescriptor>,
    pub dropped_columns: Vec<ColumnDescriptor>,
    pub rank: usize,
    pub node_order_hash: String,
}

/// Serialised form of a fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitArtifact {
    pub order: GnarOrder,
    pub alpha: Alpha,
    pub beta: Vec<Vec<f64>>,
    pub sigma2_hat: f64,
    pub dropped_columns: Vec<ColumnDescriptor>,
    pub node_order_hash: String,
}

impl GnarFit {
    /// Fitted values on the training window, `(T - p) × n`.
    pub fn fitted(&self, series: &NetworkTimeSeries) -> Array2<f64> {
        let p = self.order.p;
        &series.values().slice(ndarray::s![p.., ..]) - &self.residuals
    }

    pub fn artifact(&self) -> FitArtifact {
        FitArtifact {
            order: self.order.clone(),
            alpha: self.coefficients.alpha.clone(),
            beta: self.coefficients.beta.clone(),
            sigma2_hat: self.sigma2_hat,
            dropped_columns: self.dropped_columns.clone(),
            node_order_hash: self.node_order_hash.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.artifact())?)
    }
}

impl FitArtifact {
    pub fn coefficients(&self) -> GnarCoefficients {
        GnarCoefficients {
            alpha: self.alpha.clone(),
            beta: self.beta.clone(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let artifact: FitArtifact = serde_json::from_str(text)?;
        artifact.coefficients().validate(&artifact.order, None)?;
        Ok(artifact)
    }
}

/// Ordinary least squares on the stacked GNAR system.
///
/// Per-node `α` falls back to a shared `α` when the stacked system has fewer
/// rows than columns. Linearly dependent columns are dropped (their
/// coefficients stay zero) and listed in [`GnarFit::dropped_columns`].
pub fn fit(series: &NetworkTimeSeries, net: &CountyNetwork, order: &GnarOrder) -> Result<GnarFit> {
    order.validate()?;
    series.check_aligned(net)?;
    let (t_len, n) = series.shape();
    if t_len <= order.p {
        return Err(Error::InsufficientData(format!(
            "{t_len} time steps cannot support {} lags",
            order.p
        )));
    }
    let rows = (t_len - order.p) * n;
    let mut order = order.clone();
    if order.alpha_mode == AlphaMode::PerNode && rows < order.column_count(n) {
        log::warn!(
            "{rows} observations for {} columns; using a shared alpha per lag",
            order.column_count(n)
        );
        order.alpha_mode = AlphaMode::Global;
    }
    if rows < order.column_count(n) {
        return Err(Error::InsufficientData(format!(
            "{rows} observations for {} coefficients",
            order.column_count(n)
        )));
    }
    let table = net.weight_table(order.max_stage());
    let design = design_from(series.values().view(), &table, &order, series.nodes())?;
    fit_design(&design, &order, n, series.node_order_hash())
}

fn fit_design(design: &Design, order: &GnarOrder, n: usize, hash: String) -> Result<GnarFit> {
    let solution = lstsq::solve(&design.regressors, &design.response);
    if !solution.dropped.is_empty() {
        log::warn!(
            "design is rank deficient: dropped {} of {} columns",
            solution.dropped.len(),
            design.columns.len()
        );
    }
    let beta_b = &solution.coefficients;
    let mut coefficients = GnarCoefficients::zeros(order, n);
    let mut k = 0;
    if !order.alpha_zero {
        match &mut coefficients.alpha {
            Alpha::Global(a) => {
                for v in a.iter_mut() {
                    *v = beta_b[k];
                    k += 1;
                }
            }
            Alpha::PerNode(rows) => {
                for v in rows.iter_mut().flatten() {
                    *v = beta_b[k];
                    k += 1;
                }
            }
        }
    }
    for v in coefficients.beta.iter_mut().flatten() {
        *v = beta_b[k];
        k += 1;
    }

    let resid = &design.response - &design.regressors.dot(beta_b);
    let rss: f64 = resid.iter().map(|e| e * e).sum();
    let dof = resid.len().saturating_sub(solution.rank);
    let sigma2_hat = if dof > 0 { rss / dof as f64 } else { 0.0 };
    let residuals = resid
        .into_shape_with_order((design.response.len() / n.max(1), n))
        .map_err(|e| Error::DimensionMismatch(e.to_string()))?;
    Ok(GnarFit {
        order: order.clone(),
        coefficients,
        residuals,
        sigma2_hat,
        dropped_columns: solution.dropped.iter().map(|&c| design.columns[c].clone()).collect(),
        design_columns: design.columns.clone(),
        rank: solution.rank,
        node_order_hash: hash,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::{network, path3};
    use crate::model::{build_design, preset, simulate_with, SimulateOptions};
    use ndarray::Array1;

    fn ring(n: usize) -> CountyNetwork {
        let edges: Vec<_> = (0..n)
            .flat_map(|i| [(i, (i + 1) % n, 1.0 + i as f64), (i, (i + 3) % n, 2.0)])
            .collect();
        network(n, &edges)
    }

    fn noiseless() -> SimulateOptions {
        SimulateOptions {
            burn_in: 0,
            initial_level: 0.0,
            initial_sd: Some(1.0),
        }
    }

    #[test]
    fn recovers_global_ar1() {
        let net = path3();
        let order = GnarOrder::new(1, vec![0], AlphaMode::Global, false).unwrap();
        let coef = GnarCoefficients::global(&order, vec![0.5], vec![vec![]]).unwrap();
        let series = simulate_with(&net, &order, &coef, 40, 0.0, 3, &noiseless()).unwrap();
        let fit = fit(&series, &net, &order).unwrap();
        assert!((fit.coefficients.alpha(0, 1) - 0.5).abs() < 1e-8);
    }

    #[test]
    fn recovers_gnar_1_1() {
        let net = ring(10);
        let order = GnarOrder::new(1, vec![1], AlphaMode::Global, false).unwrap();
        let coef = GnarCoefficients::global(&order, vec![0.2], vec![vec![0.3]]).unwrap();
        let series = simulate_with(&net, &order, &coef, 200, 0.0, 5, &noiseless()).unwrap();
        let fit = fit(&series, &net, &order).unwrap();
        assert!((fit.coefficients.alpha(0, 1) - 0.2).abs() < 1e-6);
        assert!((fit.coefficients.beta(1, 1) - 0.3).abs() < 1e-6);
        assert!(fit.residuals.iter().all(|e| e.abs() < 1e-9));
    }

    #[test]
    fn zero_series_gives_zero_coefficients() {
        let net = ring(6);
        let series = NetworkTimeSeries::for_network(Array2::zeros((12, 6)), &net).unwrap();
        let fit = fit(&series, &net, &preset(3).unwrap()).unwrap();
        assert_eq!(fit.rank, 0);
        assert_eq!(fit.dropped_columns.len(), fit.design_columns.len());
        assert!(fit.coefficients.beta.iter().flatten().all(|&b| b == 0.0));
        assert_eq!(fit.sigma2_hat, 0.0);
    }

    #[test]
    fn per_node_falls_back_to_global() {
        let net = ring(6);
        let series =
            NetworkTimeSeries::for_network(Array2::from_shape_fn((3, 6), |(t, i)| (t + i) as f64 + 1.0), &net)
                .unwrap();
        // 2 * 6 = 12 rows vs 6 * 2 + 2 = 14 columns
        let fit = fit(&series, &net, &preset(3).unwrap()).unwrap();
        assert_eq!(fit.order.alpha_mode, AlphaMode::Global);
        let short = series.slice_rows(0, 2).unwrap();
        assert!(matches!(
            super::fit(&short, &net, &preset(3).unwrap()),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn residuals_match_design() {
        let net = ring(5);
        let order = preset(1).unwrap();
        let values = Array2::from_shape_fn((30, 5), |(t, i)| ((t * 7 + i * 3) % 11) as f64);
        let series = NetworkTimeSeries::for_network(values, &net).unwrap();
        let fit = fit(&series, &net, &order).unwrap();
        let design = build_design(&series, &net, &order).unwrap();
        let mut flat = Vec::new();
        if let Alpha::PerNode(rows) = &fit.coefficients.alpha {
            flat.extend(rows.iter().flatten());
        }
        flat.extend(fit.coefficients.beta.iter().flatten());
        let resid = &design.response - &design.regressors.dot(&Array1::from(flat));
        for (a, b) in resid.iter().zip(fit.residuals.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn artifact_round_trip() {
        let net = ring(4);
        let series = NetworkTimeSeries::for_network(
            Array2::from_shape_fn((20, 4), |(t, i)| ((t + 2 * i) % 5) as f64),
            &net,
        )
        .unwrap();
        let fit = fit(&series, &net, &preset(1).unwrap()).unwrap();
        let text = fit.to_json().unwrap();
        let back = FitArtifact::from_json(&text).unwrap();
        assert_eq!(back, fit.artifact());
        let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        for key in ["order", "alpha", "beta", "sigma2_hat", "dropped_columns", "node_order_hash"] {
            assert!(doc.get(key).is_some(), "{key}");
        }
        assert_eq!(doc["node_order_hash"], net.node_order_hash());
    }
}
