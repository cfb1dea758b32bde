use std::collections::BTreeMap;
use std::path::Path;

use netgnar::eval::{predictive_power, rolling_horizon, EvalOptions, Forecaster};
use netgnar::graph::{NodeAttrs, NodeId};
use netgnar::ingest::{
    aggregate_weekly, build_network_from_flows, parse_cases_str, parse_flows_str, to_panel, write_cases_csv,
    write_flows_csv,
};
use netgnar::model::{preset, simulate_with, GnarCoefficients, SimulateOptions};

const FLOWS: &str = "\
from_fips,to_fips,commuters
44001,44003,120
44003,44001,80
44003,44007,300
44007,44003,250
44007,25005,40
25005,44007,60
25005,25021,500
25021,25005,450
44001,44001,900
bogus,44003,1
44001,44007,x
";

fn attrs() -> BTreeMap<NodeId, NodeAttrs> {
    ["44001", "44003", "44007", "25005", "25021"]
        .iter()
        .map(|c| {
            let id = NodeId::new(*c).unwrap();
            (id.clone(), NodeAttrs::for_id(&id))
        })
        .collect()
}

#[test]
fn flows_to_forecasts() {
    let parsed = parse_flows_str(FLOWS, Path::new("flows.csv")).unwrap();
    assert_eq!(parsed.records.len(), 9);
    assert_eq!(parsed.report.row_errors.len(), 2);
    assert_eq!(parsed.report.row_errors[0].line, 11);
    let (net, missing) = build_network_from_flows(&parsed.records, &attrs()).unwrap();
    assert!(missing.is_empty());
    assert_eq!((net.node_count(), net.edge_count()), (5, 8));

    let again = parse_flows_str(&write_flows_csv(&net).unwrap(), Path::new("w.csv")).unwrap();
    let (rebuilt, _) = build_network_from_flows(&again.records, &attrs()).unwrap();
    assert_eq!(rebuilt.edges(), net.edges());

    let order = preset(1).unwrap();
    let coef = GnarCoefficients::global(&order, vec![0.6], vec![vec![0.41]]).unwrap();
    let options = SimulateOptions {
        burn_in: 0,
        initial_level: 100.0,
        initial_sd: Some(5.0),
    };
    let daily = simulate_with(&net, &order, &coef, 70, 1.0, 9, &options).unwrap();
    let text = write_cases_csv(&daily).unwrap();
    let cases = parse_cases_str(&text, Path::new("cases.csv")).unwrap();
    let (panel, missing) = to_panel(&cases.table, &net).unwrap();
    assert!(missing.is_empty());
    assert_eq!(panel, daily);

    let weekly = aggregate_weekly(&panel).unwrap();
    assert_eq!(weekly.len(), 10);

    let ri = net.extract_state_subnetwork("RI", true).unwrap();
    assert_eq!(ri.internal_nodes().len(), 3);
    let cols: Vec<usize> = ri.nodes().iter().map(|k| net.index_of(k).unwrap()).collect();
    let ri_series = netgnar::series::NetworkTimeSeries::new(
        panel.values().select(ndarray::Axis(1), &cols),
        ri.nodes().to_vec(),
        panel.frequency,
        panel.start_date,
    )
    .unwrap();
    let opts = EvalOptions {
        scored_nodes: Some(ri.internal_nodes()),
        ..Default::default()
    };
    let naive = rolling_horizon(&ri_series, &ri, &Forecaster::Naive, 20, &opts).unwrap();
    assert!(!predictive_power(&naive));
    let model = rolling_horizon(&ri_series, &ri, &Forecaster::Gnar(order), 20, &opts).unwrap();
    assert_eq!(model.per_period.len(), 20);
    assert!(model.per_period.iter().all(|p| p.evaluated_terms == 3));
}
