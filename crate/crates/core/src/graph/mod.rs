//! Static weighted county networks.
//!
//! Nodes are kept in a fixed order chosen at construction; that order is the
//! column order of every [`NetworkTimeSeries`](crate::NetworkTimeSeries)
//! aligned to the network. Neighbour queries follow out-edges; graph
//! statistics use the undirected view.

mod geo;
mod lattice;
mod states;
mod stats;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use geo::{haversine_km, EARTH_RADIUS_KM};
pub use lattice::triangular_lattice;
pub use states::{state_fips, state_postal};
pub use stats::{degree_histogram, network_stats, NetworkStats};

/// Five-digit FIPS-style node identifier (2 state digits, 3 unit digits).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct NodeId(String);

impl NodeId {
    pub fn new(code: impl Into<String>) -> Result<Self> {
        let code = code.into();
        if code.len() == 5 && code.bytes().all(|b| b.is_ascii_digit()) {
            Ok(NodeId(code))
        } else {
            Err(Error::InvalidNodeId(code))
        }
    }

    /// Left-pads a numeric code with zeros, so `1001` becomes `01001`.
    ///
    /// Already-normalised codes pass through unchanged.
    pub fn normalize(raw: &str) -> Result<Self> {
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.len() > 5 || !trimmed.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::InvalidNodeId(raw.to_string()));
        }
        NodeId::new(format!("{trimmed:0>5}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The two leading state digits.
    pub fn state(&self) -> &str {
        &self.0[..2]
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for NodeId {
    type Error = Error;
    fn try_from(value: String) -> Result<Self> {
        NodeId::new(value)
    }
}

impl From<NodeId> for String {
    fn from(id: NodeId) -> String {
        id.0
    }
}

impl std::str::FromStr for NodeId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        NodeId::new(s)
    }
}

/// Per-node attributes. Coordinates are centroid degrees.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NodeAttrs {
    pub lat: Option<f64>,
    pub lon: Option<f64>,
    /// Two-digit state code.
    pub state: String,
    /// Set on out-of-state boundary nodes kept by
    /// [`CountyNetwork::extract_state_subnetwork`].
    pub external: bool,
}

impl NodeAttrs {
    /// Attributes with the state taken from the id and no coordinates.
    pub fn for_id(id: &NodeId) -> Self {
        NodeAttrs {
            state: id.state().to_string(),
            ..Default::default()
        }
    }

    pub fn with_coords(mut self, lat: f64, lon: f64) -> Self {
        self.lat = Some(lat);
        self.lon = Some(lon);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    Binary,
    #[default]
    Commuters,
    GreatCircleKm,
}

impl std::str::FromStr for WeightMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" => Ok(WeightMode::Binary),
            "commuters" => Ok(WeightMode::Commuters),
            "great_circle_km" | "great-circle" | "great_circle" => Ok(WeightMode::GreatCircleKm),
            other => Err(Error::InvalidArgument(format!("unknown weight mode '{other}'"))),
        }
    }
}

/// A directed edge between node indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub mu: f64,
    /// Original flow count, kept across reweighting when known.
    pub commuters: Option<f64>,
}

/// Nodes at unweighted out-distance exactly `r` from `root`, for `r = 1..=r_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageNeighborhood {
    pub root: NodeId,
    /// `stages[r - 1]` holds the stage-`r` set.
    pub stages: Vec<BTreeSet<NodeId>>,
}

impl StageNeighborhood {
    pub fn stage(&self, r: usize) -> Option<&BTreeSet<NodeId>> {
        r.checked_sub(1).and_then(|k| self.stages.get(k))
    }
}

/// Static directed weighted graph keyed by [`NodeId`].
#[derive(Debug, Clone, PartialEq)]
pub struct CountyNetwork {
    nodes: Vec<NodeId>,
    attrs: Vec<NodeAttrs>,
    index: HashMap<NodeId, usize>,
    // sorted by (from, to)
    edges: Vec<Edge>,
    // out[i] is the contiguous range of `edges` leaving node i
    out: Vec<std::ops::Range<usize>>,
    weight_mode: WeightMode,
}

impl CountyNetwork {
    /// Builds a network from named nodes and weighted edges.
    ///
    /// In [`WeightMode::Commuters`] the edge weights are also recorded as
    /// the original flow counts.
    pub fn new(
        nodes: Vec<(NodeId, NodeAttrs)>,
        edges: Vec<(NodeId, NodeId, f64)>,
        weight_mode: WeightMode,
    ) -> Result<Self> {
        let (ids, attrs): (Vec<_>, Vec<_>) = nodes.into_iter().unzip();
        let index = build_index(&ids)?;
        let mut indexed = Vec::with_capacity(edges.len());
        for (from, to, mu) in edges {
            let f = *index.get(&from).ok_or_else(|| Error::UnknownNode(from.to_string()))?;
            let t = *index.get(&to).ok_or_else(|| Error::UnknownNode(to.to_string()))?;
            let commuters = (weight_mode == WeightMode::Commuters).then_some(mu);
            indexed.push(Edge {
                from: f,
                to: t,
                mu,
                commuters,
            });
        }
        Self::from_parts(ids, attrs, indexed, weight_mode)
    }

    pub(crate) fn from_parts(
        nodes: Vec<NodeId>,
        attrs: Vec<NodeAttrs>,
        mut edges: Vec<Edge>,
        weight_mode: WeightMode,
    ) -> Result<Self> {
        if nodes.len() != attrs.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} nodes but {} attribute records",
                nodes.len(),
                attrs.len()
            )));
        }
        let index = build_index(&nodes)?;
        edges.sort_by_key(|e| (e.from, e.to));
        for pair in edges.windows(2) {
            if pair[0].from == pair[1].from && pair[0].to == pair[1].to {
                return Err(Error::DuplicateEdge(
                    nodes[pair[0].from].to_string(),
                    nodes[pair[0].to].to_string(),
                ));
            }
        }
        for e in &edges {
            if e.from >= nodes.len() || e.to >= nodes.len() {
                return Err(Error::DimensionMismatch("edge endpoint out of range".into()));
            }
            if e.from == e.to {
                return Err(Error::SelfLoop(nodes[e.from].to_string()));
            }
            if !(e.mu > 0.0 && e.mu.is_finite()) {
                return Err(Error::NonPositiveWeight {
                    from: nodes[e.from].to_string(),
                    to: nodes[e.to].to_string(),
                    mu: e.mu,
                });
            }
        }
        let mut out = vec![0..0; nodes.len()];
        let mut start = 0;
        while start < edges.len() {
            let from = edges[start].from;
            let mut end = start;
            while end < edges.len() && edges[end].from == from {
                end += 1;
            }
            out[from] = start..end;
            start = end;
        }
        Ok(CountyNetwork {
            nodes,
            attrs,
            index,
            edges,
            out,
            weight_mode,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Number of directed edges.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn attrs(&self, i: usize) -> &NodeAttrs {
        &self.attrs[i]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn weight_mode(&self) -> WeightMode {
        self.weight_mode
    }

    pub fn index_of(&self, id: &NodeId) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    /// Out-edges of node `i`, sorted by target.
    pub fn out_edges(&self, i: usize) -> &[Edge] {
        &self.edges[self.out[i].clone()]
    }

    /// Edge weight for `from -> to`, if the edge exists.
    pub fn mu(&self, from: usize, to: usize) -> Option<f64> {
        let out = self.out_edges(from);
        out.binary_search_by_key(&to, |e| e.to).ok().map(|k| out[k].mu)
    }

    /// Hex SHA-256 over the ordered node ids.
    ///
    /// Two networks (or a network and a panel) share a hash exactly when
    /// their node order agrees.
    pub fn node_order_hash(&self) -> String {
        node_order_hash(&self.nodes)
    }

    /// Undirected neighbour lists (sorted, deduplicated).
    pub fn undirected_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.from].push(e.to);
            adj[e.to].push(e.from);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// `{ j ∉ a | i -> j for some i ∈ a }`.
    pub fn neighbor_set(&self, a: &[NodeId]) -> Result<BTreeSet<NodeId>> {
        let members = a
            .iter()
            .map(|id| self.index_of(id))
            .collect::<Result<BTreeSet<_>>>()?;
        let mut result = BTreeSet::new();
        for &i in &members {
            for e in self.out_edges(i) {
                if !members.contains(&e.to) {
                    result.insert(self.nodes[e.to].clone());
                }
            }
        }
        Ok(result)
    }

    pub fn stage_neighbors(&self, root: &NodeId, r_max: usize) -> Result<StageNeighborhood> {
        if r_max < 1 {
            return Err(Error::InvalidArgument("r_max must be at least 1".into()));
        }
        let i = self.index_of(root)?;
        let stages = self
            .stage_sets(i, r_max)
            .into_iter()
            .map(|s| s.into_iter().map(|k| self.nodes[k].clone()).collect())
            .collect();
        Ok(StageNeighborhood {
            root: root.clone(),
            stages,
        })
    }

    /// Stage sets of node `i` by index, `result[r - 1]` sorted ascending.
    ///
    /// Each stage is the out-neighbourhood of the previous stage minus every
    /// node already reached, which is the BFS layer at depth `r`.
    pub fn stage_sets(&self, i: usize, r_max: usize) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.nodes.len()];
        seen[i] = true;
        let mut frontier = vec![i];
        let mut stages = Vec::with_capacity(r_max);
        for _ in 0..r_max {
            let mut next = Vec::new();
            for &u in &frontier {
                for e in self.out_edges(u) {
                    if !seen[e.to] {
                        seen[e.to] = true;
                        next.push(e.to);
                    }
                }
            }
            next.sort_unstable();
            stages.push(next.clone());
            frontier = next;
        }
        stages
    }

    /// Normalised connection weights of node `i` over its stage-`r` set.
    ///
    /// Stage-1 nodes use their edge weight. A stage-`r` node for `r > 1` is
    /// not adjacent to `i`; its weight is taken as the reciprocal of its path
    /// length, `1 / r`. An empty stage yields an empty map.
    pub fn connection_weights(&self, i: &NodeId, r: usize) -> Result<BTreeMap<NodeId, f64>> {
        if r < 1 {
            return Err(Error::InvalidArgument("stage must be at least 1".into()));
        }
        let idx = self.index_of(i)?;
        let stage = self.stage_sets(idx, r).pop().unwrap_or_default();
        Ok(self
            .normalized_weights(idx, r, &stage)
            .into_iter()
            .map(|(k, w)| (self.nodes[k].clone(), w))
            .collect())
    }

    pub(crate) fn normalized_weights(&self, i: usize, r: usize, stage: &[usize]) -> Vec<(usize, f64)> {
        let raw: Vec<(usize, f64)> = stage
            .iter()
            .map(|&k| {
                let mu = if r == 1 {
                    self.mu(i, k).expect("stage-1 node is an out-neighbour")
                } else {
                    1.0 / r as f64
                };
                (k, mu)
            })
            .collect();
        let total: f64 = raw.iter().map(|&(_, mu)| mu).sum();
        raw.into_iter().map(|(k, mu)| (k, mu / total)).collect()
    }

    /// Per-node normalised weights for stages `1..=r_max`:
    /// `table[i][r - 1]` lists `(neighbour, weight)`.
    pub fn weight_table(&self, r_max: usize) -> Vec<Vec<Vec<(usize, f64)>>> {
        (0..self.nodes.len())
            .map(|i| {
                self.stage_sets(i, r_max)
                    .iter()
                    .enumerate()
                    .map(|(k, stage)| self.normalized_weights(i, k + 1, stage))
                    .collect()
            })
            .collect()
    }

    /// Same edge set under a different weight interpretation.
    pub fn reweight(&self, mode: WeightMode) -> Result<CountyNetwork> {
        let mut edges = self.edges.clone();
        for e in &mut edges {
            e.mu = match mode {
                WeightMode::Binary => 1.0,
                WeightMode::Commuters => e.commuters.ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "edge {} -> {} has no recorded commuter count",
                        self.nodes[e.from], self.nodes[e.to]
                    ))
                })?,
                WeightMode::GreatCircleKm => {
                    let (a, b) = (&self.attrs[e.from], &self.attrs[e.to]);
                    let coords = |attrs: &NodeAttrs, k: usize| {
                        attrs
                            .lat
                            .zip(attrs.lon)
                            .ok_or_else(|| Error::MissingCoordinates(self.nodes[k].to_string()))
                    };
                    let (lat1, lon1) = coords(a, e.from)?;
                    let (lat2, lon2) = coords(b, e.to)?;
                    let d = haversine_km(lat1, lon1, lat2, lon2)?;
                    if d <= 0.0 {
                        return Err(Error::ZeroDistance {
                            from: self.nodes[e.from].to_string(),
                            to: self.nodes[e.to].to_string(),
                        });
                    }
                    d
                }
            };
        }
        CountyNetwork::from_parts(self.nodes.clone(), self.attrs.clone(), edges, mode)
    }

    /// Restricts the network to one state.
    ///
    /// `state` is a two-digit code or a postal abbreviation. With
    /// `include_external`, out-of-state nodes sharing an edge with an
    /// in-state node are kept (flagged [`NodeAttrs::external`]) together with
    /// every edge touching the state; otherwise only in-state nodes and
    /// edges between them remain. Node order follows the parent network.
    pub fn extract_state_subnetwork(&self, state: &str, include_external: bool) -> Result<CountyNetwork> {
        let code = state_fips(state).unwrap_or(state);
        let inside: Vec<bool> = self.attrs.iter().map(|a| a.state == code).collect();
        if !inside.iter().any(|&x| x) {
            return Err(Error::UnknownState(state.to_string()));
        }
        let mut keep = inside.clone();
        let mut kept_edges = Vec::new();
        for e in &self.edges {
            let touches = inside[e.from] || inside[e.to];
            let internal = inside[e.from] && inside[e.to];
            if internal || (include_external && touches) {
                keep[e.from] = true;
                keep[e.to] = true;
                kept_edges.push(*e);
            }
        }
        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        let mut attrs = Vec::new();
        for (k, id) in self.nodes.iter().enumerate() {
            if keep[k] {
                remap[k] = nodes.len();
                nodes.push(id.clone());
                let mut a = self.attrs[k].clone();
                a.external = !inside[k];
                attrs.push(a);
            }
        }
        let edges = kept_edges
            .into_iter()
            .map(|e| Edge {
                from: remap[e.from],
                to: remap[e.to],
                ..e
            })
            .collect();
        CountyNetwork::from_parts(nodes, attrs, edges, self.weight_mode)
    }

    /// Indices of nodes not flagged external.
    pub fn internal_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&k| !self.attrs[k].external).collect()
    }

    pub fn to_document(&self) -> NetworkDocument {
        NetworkDocument {
            nodes: self
                .nodes
                .iter()
                .zip(&self.attrs)
                .map(|(id, a)| NodeRecord {
                    fips: id.clone(),
                    lat: a.lat,
                    lon: a.lon,
                    state: a.state.clone(),
                    external: a.external,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeRecord {
                    from: self.nodes[e.from].clone(),
                    to: self.nodes[e.to].clone(),
                    mu: e.mu,
                    commuters: e.commuters,
                })
                .collect(),
            weight_mode: self.weight_mode,
        }
    }

    pub fn from_document(doc: NetworkDocument) -> Result<Self> {
        let (nodes, attrs): (Vec<_>, Vec<_>) = doc
            .nodes
            .into_iter()
            .map(|n| {
                let attrs = NodeAttrs {
                    lat: n.lat,
                    lon: n.lon,
                    state: n.state,
                    external: n.external,
                };
                (n.fips, attrs)
            })
            .unzip();
        let index = build_index(&nodes)?;
        let edges = doc
            .edges
            .into_iter()
            .map(|e| {
                Ok(Edge {
                    from: *index.get(&e.from).ok_or_else(|| Error::UnknownNode(e.from.to_string()))?,
                    to: *index.get(&e.to).ok_or_else(|| Error::UnknownNode(e.to.to_string()))?,
                    mu: e.mu,
                    commuters: e.commuters,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        CountyNetwork::from_parts(nodes, attrs, edges, doc.weight_mode)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_document(serde_json::from_str(text)?)
    }

    /// Unweighted out-distances from `i` (BFS), `None` when unreachable.
    pub fn bfs_depths(&self, i: usize) -> Vec<Option<usize>> {
        let mut depth = vec![None; self.nodes.len()];
        depth[i] = Some(0);
        let mut queue = VecDeque::from([i]);
        while let Some(u) = queue.pop_front() {
            let du = depth[u].unwrap();
            for e in self.out_edges(u) {
                if depth[e.to].is_none() {
                    depth[e.to] = Some(du + 1);
                    queue.push_back(e.to);
                }
            }
        }
        depth
    }
}

pub fn node_order_hash(nodes: &[NodeId]) -> String {
    let mut hasher = Sha256::new();
    for id in nodes {
        hasher.update(id.as_str().as_bytes());
        hasher.update(b",");
    }
    hex::encode(hasher.finalize())
}

fn build_index(nodes: &[NodeId]) -> Result<HashMap<NodeId, usize>> {
    let mut index = HashMap::with_capacity(nodes.len());
    for (k, id) in nodes.iter().enumerate() {
        if index.insert(id.clone(), k).is_some() {
            return Err(Error::DuplicateNode(id.to_string()));
        }
    }
    Ok(index)
}

/// JSON form of a [`CountyNetwork`]. Node order in `nodes` is authoritative.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct NetworkDocument {
    pub nodes: Vec<NodeRecord>,
    pub edges: Vec<EdgeRecord>,
    pub weight_mode: WeightMode,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct NodeRecord {
    pub fips: NodeId,
    pub lat: Option<f64>,
    pub lon: Option<f64>,
    pub state: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub external: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EdgeRecord {
    pub from: NodeId,
    pub to: NodeId,
    pub mu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub commuters: Option<f64>,
}
