use ndarray::Array2;

use super::design::predict_row;
use super::{GnarCoefficients, GnarFit, GnarOrder};
use crate::error::{Error, Result};
use crate::graph::CountyNetwork;
use crate::series::NetworkTimeSeries;

/// Iterated `h`-step forecast from the end of `history`.
///
/// Step 1 uses observed lags; later steps feed back earlier forecasts with
/// the innovation set to zero. The returned panel starts one period after
/// the last history row.
pub fn forecast(
    fit: &GnarFit,
    history: &NetworkTimeSeries,
    net: &CountyNetwork,
    h: usize,
) -> Result<NetworkTimeSeries> {
    if history.node_order_hash() != fit.node_order_hash {
        return Err(Error::NodeOrderMismatch);
    }
    forecast_with(&fit.order, &fit.coefficients, history, net, h)
}

pub(crate) fn forecast_with(
    order: &GnarOrder,
    coef: &GnarCoefficients,
    history: &NetworkTimeSeries,
    net: &CountyNetwork,
    h: usize,
) -> Result<NetworkTimeSeries> {
    history.check_aligned(net)?;
    if h == 0 {
        return Err(Error::InvalidArgument("forecast horizon must be at least 1".into()));
    }
    let (t_len, n) = history.shape();
    if t_len < order.p {
        return Err(Error::InsufficientData(format!(
            "{t_len} history rows for {} lags",
            order.p
        )));
    }
    let table = net.weight_table(order.max_stage());
    let mut buffer = Array2::zeros((order.p + h, n));
    buffer
        .slice_mut(ndarray::s![..order.p, ..])
        .assign(&history.values().slice(ndarray::s![t_len - order.p.., ..]));
    for t in order.p..order.p + h {
        let row = predict_row(buffer.view(), t, &table, order, coef);
        buffer.row_mut(t).assign(&row);
    }
    let out = buffer.slice(ndarray::s![order.p.., ..]).to_owned();
    let mut series = history.with_values(out)?;
    series.start_date = history.date_of(t_len);
    Ok(series)
}
