#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use netgnar::graph::{CountyNetwork, NodeAttrs, NodeId, WeightMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/synthetic")
}

pub fn netgnar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netgnar"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

/// Every file in `dir` with its contents, sorted by name.
pub fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

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

/// Hop distance from `root` along out-edges, by edge relaxation.
pub fn relaxation_depths(net: &CountyNetwork, root: usize) -> Vec<Option<usize>> {
    let mut d = vec![None; net.node_count()];
    d[root] = Some(0);
    loop {
        let mut changed = false;
        for e in net.edges() {
            if let Some(du) = d[e.from] {
                if d[e.to].is_none_or(|dv: usize| du + 1 < dv) {
                    d[e.to] = Some(du + 1);
                    changed = true;
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
