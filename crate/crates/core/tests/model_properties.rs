mod common;

use common::{median, random_connected};
use netgnar::graph::{CountyNetwork, NodeAttrs, WeightMode};
use netgnar::model::{
    fit, model_selection, preset, simulate, simulate_with, AlphaMode, GnarCoefficients, GnarOrder,
    SelectionCriterion, SimulateOptions,
};
use netgnar::series::NetworkTimeSeries;
use proptest::prelude::*;

fn noiseless() -> SimulateOptions {
    SimulateOptions {
        burn_in: 0,
        initial_level: 0.0,
        initial_sd: Some(1.0),
    }
}

fn max_coef_error(net: &CountyNetwork, series: &NetworkTimeSeries, order: &GnarOrder, coef: &GnarCoefficients) -> f64 {
    let fitted = fit(series, net, order).unwrap();
    let mut err: f64 = 0.0;
    for i in 0..net.node_count() {
        for j in 1..=order.p {
            err = err.max((fitted.coefficients.alpha(i, j) - coef.alpha(i, j)).abs());
        }
    }
    for j in 1..=order.p {
        for r in 1..=order.s[j - 1] {
            err = err.max((fitted.coefficients.beta(j, r) - coef.beta(j, r)).abs());
        }
    }
    err
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn noiseless_fit_recovers_parameters(
        n in 4usize..12,
        seed in any::<u64>(),
        alpha in -0.4f64..0.4,
        beta in -0.4f64..0.4,
    ) {
        let net = random_connected(n, seed);
        let order = preset(1).unwrap();
        let coef = GnarCoefficients::global(&order, vec![alpha], vec![vec![beta]]).unwrap();
        let series = simulate_with(&net, &order, &coef, 25, 0.0, seed, &noiseless()).unwrap();
        prop_assert!(max_coef_error(&net, &series, &order, &coef) < 1e-6);
    }

    #[test]
    fn two_lag_noiseless_recovery(seed in any::<u64>()) {
        let net = random_connected(8, seed);
        let order = preset(3).unwrap();
        let coef = GnarCoefficients::global(&order, vec![0.3, -0.2], vec![vec![0.2], vec![0.1]]).unwrap();
        let series = simulate_with(&net, &order, &coef, 30, 0.0, seed, &noiseless()).unwrap();
        prop_assert!(max_coef_error(&net, &series, &order, &coef) < 1e-6);
    }
}

#[test]
fn estimates_converge_with_length() {
    let net = random_connected(10, 3);
    let order = GnarOrder::new(1, vec![1], AlphaMode::Global, false).unwrap();
    let coef = GnarCoefficients::global(&order, vec![0.2], vec![vec![0.3]]).unwrap();
    let medians: Vec<f64> = [100usize, 400, 1600]
        .iter()
        .map(|&t| {
            median(
                (0..20)
                    .map(|s| {
                        let series = simulate(&net, &order, &coef, t, 1.0, 1000 + s).unwrap();
                        max_coef_error(&net, &series, &order, &coef)
                    })
                    .collect(),
            )
        })
        .collect();
    assert!(medians[1] < medians[0] && medians[2] < medians[1], "{medians:?}");
    // error shrinks roughly like T^-1/2: quadrupling T should at least
    // not leave it above 3/4 of its previous value
    assert!(medians[2] < 0.75 * medians[1], "{medians:?}");
}

#[test]
fn relabelling_nodes_permutes_the_fit() {
    let net = random_connected(9, 11);
    let order = preset(1).unwrap();
    let coef = GnarCoefficients::global(&order, vec![0.25], vec![vec![0.35]]).unwrap();
    let series = simulate(&net, &order, &coef, 150, 1.0, 5).unwrap();
    let base = fit(&series, &net, &order).unwrap();

    let perm = [4usize, 7, 0, 8, 2, 1, 6, 3, 5];
    let nodes: Vec<_> = perm.iter().map(|&k| net.nodes()[k].clone()).collect();
    let edges = net
        .edges()
        .iter()
        .map(|e| (net.nodes()[e.from].clone(), net.nodes()[e.to].clone(), e.mu))
        .collect();
    let relabelled = CountyNetwork::new(
        nodes.iter().map(|k| (k.clone(), NodeAttrs::for_id(k))).collect(),
        edges,
        WeightMode::Commuters,
    )
    .unwrap();
    let moved = series.permute_columns(&perm).unwrap();
    let other = fit(&moved, &relabelled, &order).unwrap();

    assert!((base.coefficients.beta(1, 1) - other.coefficients.beta(1, 1)).abs() < 1e-10);
    for (new_i, &old_i) in perm.iter().enumerate() {
        let a = base.coefficients.alpha(old_i, 1);
        let b = other.coefficients.alpha(new_i, 1);
        assert!((a - b).abs() < 1e-10, "node {old_i}: {a} vs {b}");
        for t in 0..base.residuals.nrows() {
            assert!((base.residuals[[t, old_i]] - other.residuals[[t, new_i]]).abs() < 1e-10);
        }
    }
    assert!((base.sigma2_hat - other.sigma2_hat).abs() < 1e-10);
}

#[test]
fn selection_finds_generating_order() {
    let net = random_connected(10, 21);
    let order = preset(1).unwrap();
    let coef = GnarCoefficients::global(&order, vec![0.2], vec![vec![0.3]]).unwrap();
    let series = simulate(&net, &order, &coef, 200, 1.0, 77).unwrap();
    let ranking = model_selection(&series, &net, 2, SelectionCriterion::Bic).unwrap();
    assert_eq!((ranking[0].alpha_order, ranking[0].beta_order), (1, 1));
    assert_eq!(ranking.len(), 9);
}

#[test]
fn selection_on_white_noise_prefers_empty_model() {
    let net = random_connected(10, 22);
    let order = preset(1).unwrap();
    let coef = GnarCoefficients::global(&order, vec![0.0], vec![vec![0.0]]).unwrap();
    let series = simulate(&net, &order, &coef, 200, 1.0, 78).unwrap();
    let ranking = model_selection(&series, &net, 2, SelectionCriterion::Bic).unwrap();
    assert_eq!((ranking[0].alpha_order, ranking[0].beta_order), (0, 0));
}

#[test]
fn holdout_selection_ranks_the_true_order_above_the_empty_model() {
    let net = random_connected(10, 23);
    let order = preset(1).unwrap();
    let coef = GnarCoefficients::global(&order, vec![0.4], vec![vec![0.4]]).unwrap();
    let series = simulate(&net, &order, &coef, 200, 1.0, 79).unwrap();
    let ranking = model_selection(&series, &net, 2, SelectionCriterion::HoldoutMase).unwrap();
    let pos = |a, b| ranking.iter().position(|e| (e.alpha_order, e.beta_order) == (a, b)).unwrap();
    assert!(pos(1, 1) < pos(0, 0));
    assert!(ranking.iter().all(|e| e.score.is_some()));
}
