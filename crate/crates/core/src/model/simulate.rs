use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::design::predict_row;
use super::{GnarCoefficients, GnarOrder};
use crate::error::{Error, Result};
use crate::graph::CountyNetwork;
use crate::series::NetworkTimeSeries;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateOptions {
    /// Leading steps generated and then discarded.
    pub burn_in: usize,
    /// Mean of the initial `p` rows.
    pub initial_level: f64,
    /// Standard deviation of the initial rows; `None` uses the innovation σ.
    pub initial_sd: Option<f64>,
}

impl Default for SimulateOptions {
    fn default() -> Self {
        SimulateOptions {
            burn_in: 50,
            initial_level: 0.0,
            initial_sd: None,
        }
    }
}

/// Simulates `steps` rows with i.i.d. `N(0, σ²)` innovations and the default
/// [`SimulateOptions`].
pub fn simulate(
    net: &CountyNetwork,
    order: &GnarOrder,
    coef: &GnarCoefficients,
    steps: usize,
    sigma: f64,
    seed: u64,
) -> Result<NetworkTimeSeries> {
    simulate_with(net, order, coef, steps, sigma, seed, &SimulateOptions::default())
}

/// Draws the first `p` rows around `initial_level`, then runs the GNAR
/// recursion forward. Output is identical for identical seeds.
pub fn simulate_with(
    net: &CountyNetwork,
    order: &GnarOrder,
    coef: &GnarCoefficients,
    steps: usize,
    sigma: f64,
    seed: u64,
    options: &SimulateOptions,
) -> Result<NetworkTimeSeries> {
    let n = net.node_count();
    coef.validate(order, Some(n))?;
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!("sigma must be non-negative, got {sigma}")));
    }
    let init_sd = options.initial_sd.unwrap_or(sigma);
    let total = (options.burn_in + steps).max(order.p);
    let table = net.weight_table(order.max_stage());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Array2::zeros((total, n));
    for t in 0..total {
        let mut row = if t < order.p {
            ndarray::Array1::from_elem(n, options.initial_level)
        } else {
            predict_row(values.view(), t, &table, order, coef)
        };
        let sd = if t < order.p { init_sd } else { sigma };
        for x in row.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *x += sd * z;
        }
        values.row_mut(t).assign(&row);
    }
    let keep = values.slice(ndarray::s![total - steps.min(total).., ..]).to_owned();
    NetworkTimeSeries::for_network(keep, net)
}
