use std::collections::{BTreeMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::CountyNetwork;
use crate::error::{Error, Result};

// Sources per work unit. Fixed so partial sums always combine in the same
// order, whatever the thread count.
const SOURCE_BLOCK: usize = 64;

/// Graph metrics over the undirected view of a network.
///
/// `closeness` and `betweenness` are means of normalised node centralities.
/// `diameter` and `avg_shortest_path` are taken over the largest connected
/// component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkStats {
    pub node_count: usize,
    pub edge_count: usize,
    pub avg_degree: f64,
    pub closeness: f64,
    pub betweenness: f64,
    pub clustering_coefficient: f64,
    pub density: f64,
    pub diameter: usize,
    pub avg_shortest_path: f64,
    pub component_count: usize,
}

impl NetworkStats {
    /// `(metric, value)` rows in display order.
    pub fn rows(&self) -> Vec<(&'static str, String)> {
        vec![
            ("nodes", self.node_count.to_string()),
            ("edges", self.edge_count.to_string()),
            ("avg_degree", self.avg_degree.to_string()),
            ("closeness", self.closeness.to_string()),
            ("betweenness", self.betweenness.to_string()),
            ("clustering_coefficient", self.clustering_coefficient.to_string()),
            ("density", self.density.to_string()),
            ("diameter", self.diameter.to_string()),
            ("avg_shortest_path", self.avg_shortest_path.to_string()),
            ("components", self.component_count.to_string()),
        ]
    }
}

struct SourceSweep {
    betweenness: Vec<f64>,
    closeness: Vec<f64>,
    // (sum of distances, eccentricity) per source
    paths: Vec<(u64, usize)>,
}

pub fn network_stats(net: &CountyNetwork) -> Result<NetworkStats> {
    let n = net.node_count();
    if n == 0 {
        return Err(Error::EmptyNetwork);
    }
    let adj = net.undirected_adjacency();
    let edge_count = adj.iter().map(Vec::len).sum::<usize>() / 2;
    let nf = n as f64;
    let avg_degree = 2.0 * edge_count as f64 / nf;
    let density = if n > 1 {
        2.0 * edge_count as f64 / (nf * (nf - 1.0))
    } else {
        0.0
    };

    let clustering = (0..n).map(|v| local_clustering(&adj, v)).sum::<f64>() / nf;

    let (component, component_count) = components(&adj);
    let mut sizes = vec![0usize; component_count];
    for &c in &component {
        sizes[c] += 1;
    }
    // first component of maximal size
    let largest = (0..component_count).fold(0, |best, c| if sizes[c] > sizes[best] { c } else { best });

    let sources: Vec<usize> = (0..n).collect();
    let sweeps: Vec<SourceSweep> = sources
        .par_chunks(SOURCE_BLOCK)
        .map(|block| sweep_block(&adj, block))
        .collect();

    let mut betweenness = vec![0.0; n];
    let mut closeness_sum = 0.0;
    let mut path_sum = 0u64;
    let mut diameter = 0usize;
    let mut offset = 0;
    for sweep in &sweeps {
        for (b, x) in betweenness.iter_mut().zip(&sweep.betweenness) {
            *b += x;
        }
        closeness_sum += sweep.closeness.iter().sum::<f64>();
        for (k, &(sum, ecc)) in sweep.paths.iter().enumerate() {
            if component[offset + k] == largest {
                path_sum += sum;
                diameter = diameter.max(ecc);
            }
        }
        offset += sweep.paths.len();
    }

    let betweenness = if n > 2 {
        // each unordered pair is counted from both ends
        let scale = 1.0 / ((nf - 1.0) * (nf - 2.0));
        betweenness.iter().map(|b| b * scale).sum::<f64>() / nf
    } else {
        0.0
    };
    let c = sizes[largest] as f64;
    let avg_shortest_path = if sizes[largest] > 1 {
        path_sum as f64 / (c * (c - 1.0))
    } else {
        0.0
    };

    Ok(NetworkStats {
        node_count: n,
        edge_count,
        avg_degree,
        closeness: closeness_sum / nf,
        betweenness,
        clustering_coefficient: clustering,
        density,
        diameter,
        avg_shortest_path,
        component_count,
    })
}

fn local_clustering(adj: &[Vec<usize>], v: usize) -> f64 {
    let k = adj[v].len();
    if k < 2 {
        return 0.0;
    }
    let mut links = 0usize;
    for (a_pos, &a) in adj[v].iter().enumerate() {
        for &b in &adj[v][a_pos + 1..] {
            if adj[a].binary_search(&b).is_ok() {
                links += 1;
            }
        }
    }
    2.0 * links as f64 / (k * (k - 1)) as f64
}

fn components(adj: &[Vec<usize>]) -> (Vec<usize>, usize) {
    let mut label = vec![usize::MAX; adj.len()];
    let mut count = 0;
    for start in 0..adj.len() {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = count;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if label[w] == usize::MAX {
                    label[w] = count;
                    queue.push_back(w);
                }
            }
        }
        count += 1;
    }
    (label, count)
}

// Brandes accumulation plus distance sums for a block of sources.
fn sweep_block(adj: &[Vec<usize>], sources: &[usize]) -> SourceSweep {
    let n = adj.len();
    let mut betweenness = vec![0.0; n];
    let mut closeness = Vec::with_capacity(sources.len());
    let mut paths = Vec::with_capacity(sources.len());

    let mut dist = vec![usize::MAX; n];
    let mut sigma = vec![0.0f64; n];
    let mut delta = vec![0.0f64; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::with_capacity(n);

    for &s in sources {
        for &v in &order {
            dist[v] = usize::MAX;
            sigma[v] = 0.0;
            delta[v] = 0.0;
        }
        order.clear();
        dist[s] = 0;
        sigma[s] = 1.0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &w in &adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[u] + 1 {
                    sigma[w] += sigma[u];
                }
            }
        }
        for &w in order.iter().rev() {
            for &u in &adj[w] {
                if dist[u] != usize::MAX && dist[u] + 1 == dist[w] {
                    delta[u] += sigma[u] / sigma[w] * (1.0 + delta[w]);
                }
            }
            if w != s {
                betweenness[w] += delta[w];
            }
        }

        let reached = order.len() - 1;
        let total: u64 = order.iter().map(|&v| dist[v] as u64).sum();
        let ecc = order.last().map_or(0, |&v| dist[v]);
        paths.push((total, ecc));
        closeness.push(if total > 0 && n > 1 {
            let r = reached as f64;
            (r / total as f64) * (r / (n - 1) as f64)
        } else {
            0.0
        });
    }
    SourceSweep {
        betweenness,
        closeness,
        paths,
    }
}

/// Undirected degree → number of nodes with that degree, for every degree
/// from 0 to the maximum (zero counts included). Empty for an empty network.
pub fn degree_histogram(net: &CountyNetwork) -> BTreeMap<usize, usize> {
    let degrees: Vec<usize> = net.undirected_adjacency().iter().map(Vec::len).collect();
    let mut hist: BTreeMap<usize, usize> = match degrees.iter().max() {
        Some(&max) => (0..=max).map(|d| (d, 0)).collect(),
        None => BTreeMap::new(),
    };
    for d in degrees {
        *hist.entry(d).or_insert(0) += 1;
    }
    hist
}
