#![allow(dead_code)]

use netgnar::graph::{CountyNetwork, NodeAttrs, NodeId, WeightMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn id(k: usize) -> NodeId {
    NodeId::new(format!("{k:05}")).unwrap()
}

/// Directed Erdős–Rényi graph with weights drawn from `[0.5, 50)`.
pub fn random_network(n: usize, p_edge: f64, seed: u64) -> CountyNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = (0..n).map(|k| (id(k), NodeAttrs::for_id(&id(k)))).collect();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b && rng.random_bool(p_edge) {
                edges.push((id(a), id(b), rng.random_range(0.5..50.0)));
            }
        }
    }
    CountyNetwork::new(nodes, edges, WeightMode::Commuters).unwrap()
}

/// Random graph in which every node has at least one out-neighbour.
pub fn random_connected(n: usize, seed: u64) -> CountyNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let nodes = (0..n).map(|k| (id(k), NodeAttrs::for_id(&id(k)))).collect();
    let mut edges = Vec::new();
    for a in 0..n {
        let ring = (a + 1) % n;
        for b in 0..n {
            if a != b && (b == ring || rng.random_bool(0.2)) {
                edges.push((id(a), id(b), rng.random_range(1.0..20.0)));
            }
        }
    }
    CountyNetwork::new(nodes, edges, WeightMode::Commuters).unwrap()
}

/// All-pairs directed hop distances by edge relaxation to a fixed point.
pub fn relaxation_distances(net: &CountyNetwork) -> Vec<Vec<Option<usize>>> {
    let n = net.node_count();
    let mut d = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(0);
    }
    loop {
        let mut changed = false;
        for row in d.iter_mut() {
            for e in net.edges() {
                if let Some(du) = row[e.from] {
                    let cand = du + 1;
                    if row[e.to].is_none_or(|dv| cand < dv) {
                        row[e.to] = Some(cand);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return d;
        }
    }
}

pub fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        0.5 * (xs[m - 1] + xs[m])
    }
}
