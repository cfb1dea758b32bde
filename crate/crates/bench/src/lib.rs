//! Shared inputs for the criterion benchmarks in `benches/`.

use netgnar::graph::{triangular_lattice, CountyNetwork};
use netgnar::model::{preset, simulate, GnarCoefficients};
use netgnar::series::NetworkTimeSeries;

/// A `rows × cols` lattice with a simulated model-1 panel of `steps` rows.
pub fn lattice_panel(rows: usize, cols: usize, steps: usize) -> (CountyNetwork, NetworkTimeSeries) {
    let net = triangular_lattice(rows, cols).expect("valid lattice size");
    let order = preset(1).expect("preset exists");
    let coef = GnarCoefficients::global(&order, vec![0.3], vec![vec![0.4]]).expect("matching shape");
    let series = simulate(&net, &order, &coef, steps, 1.0, 1).expect("simulation runs");
    (net, series)
}
