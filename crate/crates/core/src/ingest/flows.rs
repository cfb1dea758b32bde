use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use super::{read_file, DataQualityReport};
use crate::error::{Error, Result};
use crate::graph::{CountyNetwork, Edge, NodeAttrs, NodeId, WeightMode};

pub const FLOW_HEADER: [&str; 3] = ["from_fips", "to_fips", "commuters"];

/// One origin-destination commuting count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowRecord {
    pub from: NodeId,
    pub to: NodeId,
    pub commuters: u64,
}

impl FlowRecord {
    pub fn is_self_flow(&self) -> bool {
        self.from == self.to
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowParse {
    pub records: Vec<FlowRecord>,
    pub report: DataQualityReport,
}

pub fn parse_flows(path: &Path) -> Result<FlowParse> {
    parse_flows_str(&read_file(path)?, path)
}

/// Parses flow CSV text; `path` only labels diagnostics.
///
/// Every data line ends up either as a record or as a line-numbered entry in
/// the report. Self-flows are kept as records and flagged.
pub fn parse_flows_str(text: &str, path: &Path) -> Result<FlowParse> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = reader.records();
    let header_err = || Error::Header {
        path: path.to_path_buf(),
        expected: FLOW_HEADER.join(","),
    };
    let header = rows.next().ok_or_else(header_err)??;
    let fields: Vec<&str> = header.iter().map(|f| f.trim_start_matches('\u{feff}')).collect();
    if fields != FLOW_HEADER {
        return Err(header_err());
    }

    let mut report = DataQualityReport::new(path.display().to_string());
    let mut records = Vec::new();
    for row in rows {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        if row.len() != 3 {
            report.error(line, format!("expected 3 fields, found {}", row.len()));
            continue;
        }
        let parsed = (|| -> std::result::Result<FlowRecord, String> {
            let from = NodeId::normalize(&row[0]).map_err(|e| e.to_string())?;
            let to = NodeId::normalize(&row[1]).map_err(|e| e.to_string())?;
            let raw = &row[2];
            if raw.starts_with('-') {
                return Err(format!("negative commuters '{raw}'"));
            }
            let commuters = raw
                .parse::<u64>()
                .map_err(|_| format!("non-numeric commuters '{raw}'"))?;
            Ok(FlowRecord { from, to, commuters })
        })();
        match parsed {
            Ok(rec) => {
                if rec.is_self_flow() {
                    report.flag(rec.from.to_string(), "self_flow");
                }
                records.push(rec);
            }
            Err(reason) => report.error(line, reason),
        }
    }
    Ok(FlowParse { records, report })
}

/// Directed network with `μ` = total commuters per origin-destination pair.
///
/// Nodes are every flow endpoint, sorted by id. Duplicate pairs are summed;
/// self-flows and zero totals produce no edge. Endpoints without an entry in
/// `node_attrs` get attributes derived from their id; their ids are
/// returned so callers can warn before coordinates are needed.
pub fn build_network_from_flows(
    records: &[FlowRecord],
    node_attrs: &BTreeMap<NodeId, NodeAttrs>,
) -> Result<(CountyNetwork, Vec<NodeId>)> {
    if records.is_empty() {
        return Err(Error::EmptyNetwork);
    }
    let mut totals: BTreeMap<(&NodeId, &NodeId), u64> = BTreeMap::new();
    let mut ids = BTreeSet::new();
    for r in records {
        ids.insert(&r.from);
        ids.insert(&r.to);
        if !r.is_self_flow() {
            *totals.entry((&r.from, &r.to)).or_insert(0) += r.commuters;
        }
    }
    let nodes: Vec<NodeId> = ids.into_iter().cloned().collect();
    let mut missing = Vec::new();
    let attrs = nodes
        .iter()
        .map(|id| {
            node_attrs.get(id).cloned().unwrap_or_else(|| {
                missing.push(id.clone());
                NodeAttrs::for_id(id)
            })
        })
        .collect();
    let position: BTreeMap<&NodeId, usize> = nodes.iter().enumerate().map(|(k, id)| (id, k)).collect();
    let edges = totals
        .into_iter()
        .filter(|&(_, total)| total > 0)
        .map(|((from, to), total)| Edge {
            from: position[from],
            to: position[to],
            mu: total as f64,
            commuters: Some(total as f64),
        })
        .collect();
    let net = CountyNetwork::from_parts(nodes, attrs, edges, WeightMode::Commuters)?;
    Ok((net, missing))
}

/// Reads centroid coordinates from a `fips,lat,lon` CSV. The state code is
/// taken from the id.
pub fn parse_centroids(path: &Path) -> Result<BTreeMap<NodeId, NodeAttrs>> {
    let text = read_file(path)?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if headers != ["fips", "lat", "lon"] {
        return Err(Error::Header {
            path: path.to_path_buf(),
            expected: "fips,lat,lon".into(),
        });
    }
    let mut out = BTreeMap::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let fail = |reason: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            reason,
        };
        let id = NodeId::normalize(&row[0]).map_err(|e| fail(e.to_string()))?;
        let lat: f64 = row[1].parse().map_err(|_| fail(format!("bad latitude '{}'", &row[1])))?;
        let lon: f64 = row[2].parse().map_err(|_| fail(format!("bad longitude '{}'", &row[2])))?;
        let attrs = NodeAttrs::for_id(&id).with_coords(lat, lon);
        out.insert(id, attrs);
    }
    Ok(out)
}

/// Writes the edges of `net` as a flow CSV using each edge's commuter count
/// (or its weight when no count is recorded).
pub fn write_flows_csv(net: &CountyNetwork) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(FLOW_HEADER)?;
    for e in net.edges() {
        let count = e.commuters.unwrap_or(e.mu).round() as u64;
        w.write_record([
            net.nodes()[e.from].as_str(),
            net.nodes()[e.to].as_str(),
            &count.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("utf-8"))
}
