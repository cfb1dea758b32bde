use ndarray::Array2;

use super::CaseTable;
use crate::error::{Error, Result};
use crate::graph::{CountyNetwork, NodeId};
use crate::series::{Frequency, NetworkTimeSeries};

/// Aligns table rows to the network's node order.
///
/// Network nodes absent from the table become zero columns and are
/// returned alongside the panel. Table rows without a network node
/// (including unallocated rows) are ignored.
pub fn to_panel(table: &CaseTable, net: &CountyNetwork) -> Result<(NetworkTimeSeries, Vec<NodeId>)> {
    let t_len = table.dates.len();
    let mut values = Array2::zeros((t_len, net.node_count()));
    let mut missing = Vec::new();
    for (i, id) in net.nodes().iter().enumerate() {
        match table.row(id) {
            Some(row) => values.column_mut(i).assign(&ndarray::ArrayView1::from(&row.counts)),
            None => missing.push(id.clone()),
        }
    }
    let start = *table
        .dates
        .first()
        .ok_or_else(|| Error::InsufficientData("case table has no dates".into()))?;
    let series = NetworkTimeSeries::new(values, net.nodes().to_vec(), Frequency::Daily, start)?;
    Ok((series, missing))
}

/// Weekly levels of a daily cumulative panel: rows `0, 7, 14, …`, one per
/// complete week; a trailing partial week is dropped.
pub fn aggregate_weekly(daily: &NetworkTimeSeries) -> Result<NetworkTimeSeries> {
    if daily.frequency != Frequency::Daily {
        return Err(Error::InvalidArgument("weekly aggregation needs a daily series".into()));
    }
    let weeks = daily.len() / 7;
    if weeks == 0 {
        return Err(Error::InsufficientData(format!(
            "{} daily rows do not make a week",
            daily.len()
        )));
    }
    let rows: Vec<usize> = (0..weeks).map(|w| 7 * w).collect();
    let values = daily.values().select(ndarray::Axis(0), &rows);
    NetworkTimeSeries::new(values, daily.nodes().to_vec(), Frequency::Weekly, daily.start_date)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::network;
    use crate::ingest::{parse_cases_str, CaseRow};
    use proptest::prelude::*;
    use std::path::Path;

    fn daily(t_len: usize, n: usize) -> NetworkTimeSeries {
        let values = Array2::from_shape_fn((t_len, n), |(t, i)| (t * 10 + i) as f64);
        NetworkTimeSeries::for_network(values, &network(n, &[])).unwrap()
    }

    #[test]
    fn weekly_sampling() {
        let w = aggregate_weekly(&daily(14, 2)).unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(w.values().column(0).to_vec(), vec![0.0, 70.0]);
        assert_eq!(w.frequency, Frequency::Weekly);
        assert_eq!(aggregate_weekly(&daily(378, 1)).unwrap().len(), 54);
        assert_eq!(aggregate_weekly(&daily(20, 1)).unwrap().len(), 2);
        assert!(aggregate_weekly(&daily(6, 1)).is_err());
        assert!(aggregate_weekly(&w).is_err());
        let flat = daily(21, 1).with_values(Array2::from_elem((21, 1), 4.0)).unwrap();
        assert!(aggregate_weekly(&flat).unwrap().values().iter().all(|&v| v == 4.0));
    }

    #[test]
    fn panel_alignment() {
        let net = network(3, &[]);
        let text = "countyFIPS,County Name,State,StateFIPS,2020-03-01,2020-03-02\n\
                    2,C,XX,0,5,6\n0,U,XX,0,1,1\n1,B,XX,0,3,4\n";
        let table = parse_cases_str(text, Path::new("c.csv")).unwrap().table;
        let (panel, missing) = to_panel(&table, &net).unwrap();
        // node 00000 matches the unallocated row, 00001 and 00002 reorder
        assert_eq!(panel.values(), &ndarray::array![[1.0, 3.0, 5.0], [1.0, 4.0, 6.0]]);
        assert!(missing.is_empty());
        assert_eq!(panel.node_order_hash(), net.node_order_hash());

        let mut partial = table.clone();
        partial.rows.retain(|r: &CaseRow| r.fips.as_str() != "00001");
        let (panel, missing) = to_panel(&partial, &net).unwrap();
        assert_eq!(missing, vec![NodeId::new("00001").unwrap()]);
        assert!(panel.values().column(1).iter().all(|&v| v == 0.0));
    }

    proptest! {
        #[test]
        fn weekly_commutes_with_permutation(t_len in 7usize..60, seed in 0usize..100) {
            let s = daily(t_len, 4);
            let perm: Vec<usize> = (0..4).map(|k| (k + seed) % 4).collect();
            let a = aggregate_weekly(&s.permute_columns(&perm).unwrap()).unwrap();
            let b = aggregate_weekly(&s).unwrap().permute_columns(&perm).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn normalize_is_idempotent(code in 0u32..100000) {
            let once = NodeId::normalize(&code.to_string()).unwrap();
            let twice = NodeId::normalize(once.as_str()).unwrap();
            prop_assert_eq!(once, twice);
        }
    }
}
