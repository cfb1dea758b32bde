use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use super::{AlphaMode, GnarCoefficients, GnarOrder};
use crate::error::{Error, Result};
use crate::graph::{CountyNetwork, NodeId};
use crate::series::NetworkTimeSeries;

/// What a regressor column represents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColumnDescriptor {
    /// Own-lag term; `node` is `None` in global mode.
    Alpha { node: Option<NodeId>, lag: usize },
    /// Stage-`stage` neighbour average at lag `lag`.
    Beta { lag: usize, stage: usize },
}

/// Stacked regression system: one row per `(t, i)` with `t ≥ p`, row index
/// `(t - p) * n + i`.
#[derive(Debug, Clone)]
pub struct Design {
    pub response: Array1<f64>,
    pub regressors: Array2<f64>,
    pub columns: Vec<ColumnDescriptor>,
}

/// Normalised stage weights, `table[i][r - 1]`.
pub(crate) type WeightTable = Vec<Vec<Vec<(usize, f64)>>>;

pub(crate) fn neighbor_average(table: &WeightTable, i: usize, r: usize, row: ArrayView1<f64>) -> f64 {
    table[i][r - 1].iter().map(|&(q, w)| w * row[q]).sum()
}

pub(crate) fn columns_for(order: &GnarOrder, nodes: &[NodeId]) -> Vec<ColumnDescriptor> {
    let mut cols = Vec::with_capacity(order.column_count(nodes.len()));
    if !order.alpha_zero {
        match order.alpha_mode {
            AlphaMode::Global => {
                cols.extend((1..=order.p).map(|lag| ColumnDescriptor::Alpha { node: None, lag }))
            }
            AlphaMode::PerNode => {
                for id in nodes {
                    cols.extend((1..=order.p).map(|lag| ColumnDescriptor::Alpha {
                        node: Some(id.clone()),
                        lag,
                    }));
                }
            }
        }
    }
    for (j, &s) in order.s.iter().enumerate() {
        cols.extend((1..=s).map(|stage| ColumnDescriptor::Beta { lag: j + 1, stage }));
    }
    cols
}

pub fn build_design(series: &NetworkTimeSeries, net: &CountyNetwork, order: &GnarOrder) -> Result<Design> {
    order.validate()?;
    series.check_aligned(net)?;
    let table = net.weight_table(order.max_stage());
    design_from(series.values().view(), &table, order, series.nodes())
}

pub(crate) fn design_from(
    values: ArrayView2<f64>,
    table: &WeightTable,
    order: &GnarOrder,
    nodes: &[NodeId],
) -> Result<Design> {
    let (t_len, n) = values.dim();
    let p = order.p;
    if t_len <= p {
        return Err(Error::InsufficientData(format!(
            "{t_len} time steps cannot support {p} lags"
        )));
    }
    let columns = columns_for(order, nodes);
    let rows = (t_len - p) * n;
    let mut regressors = Array2::zeros((rows, columns.len()));
    let mut response = Array1::zeros(rows);
    let alpha_cols = order.alpha_columns(n);
    for t in p..t_len {
        for i in 0..n {
            let row = (t - p) * n + i;
            response[row] = values[[t, i]];
            let mut x = regressors.row_mut(row);
            if !order.alpha_zero {
                for j in 1..=p {
                    let col = match order.alpha_mode {
                        AlphaMode::Global => j - 1,
                        AlphaMode::PerNode => i * p + j - 1,
                    };
                    x[col] = values[[t - j, i]];
                }
            }
            let mut col = alpha_cols;
            for (j0, &s) in order.s.iter().enumerate() {
                let lagged = values.row(t - j0 - 1);
                for r in 1..=s {
                    x[col] = neighbor_average(table, i, r, lagged);
                    col += 1;
                }
            }
        }
    }
    Ok(Design {
        response,
        regressors,
        columns,
    })
}

/// One-step prediction for every node from the `p` rows preceding `t`
/// (`values.row(t - j)` is lag `j`).
pub(crate) fn predict_row(
    values: ArrayView2<f64>,
    t: usize,
    table: &WeightTable,
    order: &GnarOrder,
    coef: &GnarCoefficients,
) -> Array1<f64> {
    let n = values.ncols();
    Array1::from_shape_fn(n, |i| {
        let mut acc = 0.0;
        for j in 1..=order.p {
            let lagged = values.row(t - j);
            if !order.alpha_zero {
                acc += coef.alpha(i, j) * lagged[i];
            }
            for r in 1..=order.s[j - 1] {
                acc += coef.beta(j, r) * neighbor_average(table, i, r, lagged);
            }
        }
        acc
    })
}
