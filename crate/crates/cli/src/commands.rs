//! The four subcommands. Each computes everything in memory first and
//! returns the staged [`Outputs`]; nothing is written on failure.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, ensure, Context};
use log::{info, warn};
use ndarray::Axis;
use netgnar::eval::report::{period_csv, CellReport, SummaryTable};
use netgnar::eval::{rolling_horizon, EvalOptions, Forecaster};
use netgnar::graph::{degree_histogram, network_stats, triangular_lattice, CountyNetwork, NodeAttrs};
use netgnar::ingest::{
    aggregate_weekly, build_network_from_flows, parse_cases, parse_centroids, parse_flows, to_panel,
    write_cases_csv, DataQualityReport, QualityFlag,
};
use netgnar::model::{model_selection, simulate_with, GnarCoefficients, GnarOrder, SimulateOptions};
use netgnar::series::{Frequency, NetworkTimeSeries};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ModelSpec, RunConfig};
use crate::output::Outputs;

/// Cell results of an evaluation or selection sweep.
#[derive(Debug)]
pub struct Staged {
    pub outputs: Outputs,
    pub failures: usize,
}

impl From<Outputs> for Staged {
    fn from(outputs: Outputs) -> Self {
        Staged { outputs, failures: 0 }
    }
}

fn csv_text(rows: impl IntoIterator<Item = Vec<String>>) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(&row)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?)?)
}

fn report_json(reports: &[DataQualityReport]) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(reports)? + "\n")
}

/// Builds the network named by `--flows` or `--lattice` and applies
/// `--weight-mode`.
pub fn load_network(cfg: &RunConfig, quality: &mut Vec<DataQualityReport>) -> anyhow::Result<CountyNetwork> {
    let net = match (&cfg.flows, cfg.lattice) {
        (Some(_), Some(_)) => bail!("--flows and --lattice are mutually exclusive"),
        (None, None) => bail!("a network source is required: --flows PATH or --lattice MxN"),
        (None, Some(l)) => triangular_lattice(l.rows, l.cols)?,
        (Some(path), None) => {
            let parsed = parse_flows(path)?;
            let mut report = parsed.report;
            if let Some(first) = report.row_errors.first() {
                if !cfg.skip_bad_rows.unwrap_or(false) {
                    bail!(
                        "{}:{}: {} ({} malformed row(s); --skip-bad-rows ignores them)",
                        path.display(),
                        first.line,
                        first.reason,
                        report.row_errors.len()
                    );
                }
                warn!("{}: skipping {} malformed row(s)", path.display(), report.row_errors.len());
            }
            let attrs: BTreeMap<_, NodeAttrs> = match &cfg.centroids {
                Some(c) => parse_centroids(c)?,
                None => BTreeMap::new(),
            };
            let (net, missing) = build_network_from_flows(&parsed.records, &attrs)?;
            if cfg.centroids.is_some() {
                for id in missing {
                    report.flags.push(QualityFlag {
                        fips: id.to_string(),
                        kind: "missing_centroid".into(),
                    });
                }
            }
            quality.push(report);
            net
        }
    };
    match cfg.weight_mode {
        Some(mode) if mode != net.weight_mode() => Ok(net.reweight(mode)?),
        _ => Ok(net),
    }
}

fn load_panel(
    path: &Path,
    net: &CountyNetwork,
    frequency: Frequency,
    quality: &mut Vec<DataQualityReport>,
) -> anyhow::Result<NetworkTimeSeries> {
    let parsed = parse_cases(path)?;
    let (panel, missing) = to_panel(&parsed.table, net)?;
    let mut report = parsed.report;
    if !missing.is_empty() {
        warn!("{}: {} network node(s) have no series; using zeros", path.display(), missing.len());
    }
    for id in missing {
        report.flags.push(QualityFlag {
            fips: id.to_string(),
            kind: "missing_series".into(),
        });
    }
    quality.push(report);
    Ok(match frequency {
        Frequency::Daily => panel,
        Frequency::Weekly => aggregate_weekly(&panel).with_context(|| format!("aggregating {}", path.display()))?,
    })
}

/// Targets given on the command line, in fixed order.
fn load_targets(
    cfg: &RunConfig,
    net: &CountyNetwork,
    quality: &mut Vec<DataQualityReport>,
) -> anyhow::Result<Vec<(&'static str, NetworkTimeSeries)>> {
    let frequency = cfg.frequency.unwrap_or_default();
    let mut targets = Vec::new();
    for (name, path) in [("cases", &cfg.cases), ("deaths", &cfg.deaths)] {
        if let Some(p) = path {
            targets.push((name, load_panel(p, net, frequency, quality)?));
        }
    }
    ensure!(!targets.is_empty(), "at least one of --cases or --deaths is required");
    Ok(targets)
}

/// A state (or the whole network) with its panels restricted to it.
struct Region {
    key: String,
    net: CountyNetwork,
    scored: Vec<usize>,
    series: Vec<(&'static str, NetworkTimeSeries)>,
}

fn regions(
    cfg: &RunConfig,
    net: &CountyNetwork,
    targets: &[(&'static str, NetworkTimeSeries)],
) -> anyhow::Result<Vec<Region>> {
    let Some(states) = cfg.states.as_ref().filter(|s| !s.is_empty()) else {
        return Ok(vec![Region {
            key: "ALL".into(),
            net: net.clone(),
            scored: net.internal_nodes(),
            series: targets.to_vec(),
        }]);
    };
    let mut out: Vec<Region> = Vec::new();
    for state in states {
        let key = state.trim().to_uppercase();
        if out.iter().any(|r| r.key == key) {
            continue;
        }
        let sub = net
            .extract_state_subnetwork(&key, true)
            .with_context(|| format!("--states {key}"))?;
        let cols: Vec<usize> = sub
            .nodes()
            .iter()
            .map(|id| net.index_of(id))
            .collect::<Result<_, _>>()?;
        let series = targets
            .iter()
            .map(|(name, s)| {
                let values = s.values().select(Axis(1), &cols);
                Ok((*name, NetworkTimeSeries::new(values, sub.nodes().to_vec(), s.frequency, s.start_date)?))
            })
            .collect::<anyhow::Result<Vec<_>>>()?;
        out.push(Region {
            key,
            scored: sub.internal_nodes(),
            net: sub,
            series,
        });
    }
    Ok(out)
}

fn pool(cfg: &RunConfig) -> anyhow::Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.unwrap_or(0))
        .build()?)
}

pub fn network(cfg: &RunConfig) -> anyhow::Result<Staged> {
    cfg.check_paths()?;
    let mut quality = Vec::new();
    let net = load_network(cfg, &mut quality)?;
    let stats = network_stats(&net)?;
    info!("network: {} nodes, {} edges", stats.node_count, stats.edge_count);

    let mut outputs = Outputs::default();
    outputs.add("network.json", net.to_json()? + "\n");
    let mut rows = vec![vec!["metric".to_string(), "value".to_string()]];
    rows.extend(stats.rows().into_iter().map(|(k, v)| vec![k.to_string(), v]));
    outputs.add("stats.csv", csv_text(rows)?);
    let mut rows = vec![vec!["degree".to_string(), "count".to_string()]];
    rows.extend(degree_histogram(&net).into_iter().map(|(d, c)| vec![d.to_string(), c.to_string()]));
    outputs.add("degree_hist.csv", csv_text(rows)?);
    if !quality.is_empty() {
        outputs.add("quality.json", report_json(&quality)?);
    }
    Ok(outputs.into())
}

struct CellJob<'a> {
    region: &'a Region,
    target: usize,
    model: String,
    forecaster: Forecaster,
}

pub fn evaluate(cfg: &RunConfig) -> anyhow::Result<Staged> {
    cfg.check_paths()?;
    let test_periods = cfg.test_periods()?;
    let mut quality = Vec::new();
    let net = load_network(cfg, &mut quality)?;
    let targets = load_targets(cfg, &net, &mut quality)?;
    let regions = regions(cfg, &net, &targets)?;

    let mut models: Vec<(String, Forecaster)> = Vec::new();
    for spec in cfg.models() {
        models.push((spec.name(), Forecaster::Gnar(spec.order()?)));
    }
    models.push(("naive".into(), Forecaster::Naive));

    let mut jobs = Vec::new();
    for region in &regions {
        for target in 0..region.series.len() {
            for (model, forecaster) in &models {
                jobs.push(CellJob {
                    region,
                    target,
                    model: model.clone(),
                    forecaster: forecaster.clone(),
                });
            }
        }
    }
    let transform = cfg.transform.unwrap_or_default();
    let results: Vec<_> = pool(cfg)?.install(|| {
        jobs.par_iter()
            .map(|job| {
                let options = EvalOptions {
                    transform,
                    scored_nodes: Some(job.region.scored.clone()),
                    ..Default::default()
                };
                let (_, series) = &job.region.series[job.target];
                rolling_horizon(series, &job.region.net, &job.forecaster, test_periods, &options)
            })
            .collect()
    });

    let mut summary = SummaryTable::default();
    let mut outputs = Outputs::default();
    for (job, result) in jobs.iter().zip(results) {
        let target = job.region.series[job.target].0;
        let cell = match result {
            Ok(ev) => {
                let name = format!("periods_{}_{}_{}.csv", job.region.key, target, job.model);
                outputs.add(name, period_csv(&ev, &job.model)?);
                CellReport::from(&ev)
            }
            Err(e) => {
                warn!("{} / {} / {}: {e}", job.region.key, target, job.model);
                CellReport::Failed { error: e.to_string() }
            }
        };
        summary.insert(&job.region.key, target, &job.model, cell);
    }
    let failures = summary.failures();
    outputs.add("summary.json", summary.to_json()? + "\n");
    outputs.add("quality.json", report_json(&quality)?);
    Ok(Staged { outputs, failures })
}

#[derive(Serialize)]
struct Truth<'a> {
    order: &'a GnarOrder,
    alpha: Vec<f64>,
    beta: &'a [Vec<f64>],
    sigma: f64,
    seed: u64,
    steps: usize,
    burn_in: usize,
    initial_level: f64,
    initial_sd: f64,
    node_order_hash: String,
}

fn split_beta(order: &GnarOrder, flat: &[f64]) -> anyhow::Result<Vec<Vec<f64>>> {
    let need: usize = order.s.iter().sum();
    ensure!(
        flat.len() == need,
        "--beta needs {need} value(s) for s = {:?} (lag-major), got {}",
        order.s,
        flat.len()
    );
    let mut rest = flat;
    Ok(order
        .s
        .iter()
        .map(|&s| {
            let (head, tail) = rest.split_at(s);
            rest = tail;
            head.to_vec()
        })
        .collect())
}

pub fn simulate(cfg: &RunConfig) -> anyhow::Result<Staged> {
    cfg.check_paths()?;
    let mut quality = Vec::new();
    let net = load_network(cfg, &mut quality)?;
    let order = cfg.model.clone().unwrap_or(ModelSpec::Preset(1)).order()?;
    let alpha = match &cfg.alpha {
        Some(a) => a.clone(),
        None if order.alpha_zero => Vec::new(),
        None => bail!("--alpha is required for {}", order.label()),
    };
    if order.alpha_zero && alpha.iter().any(|&a| a != 0.0) {
        bail!("{} pins alpha to zero; drop --alpha", order.label());
    }
    let alpha = if order.alpha_zero { Vec::new() } else { alpha };
    let beta = split_beta(&order, cfg.beta.as_deref().context("--beta is required")?)?;
    let coef = GnarCoefficients::global(&order, alpha.clone(), beta.clone())?;
    let sigma = cfg.sigma.unwrap_or(1.0);
    ensure!(sigma >= 0.0 && sigma.is_finite(), "--sigma must be a non-negative number");
    let defaults = SimulateOptions::default();
    let options = SimulateOptions {
        burn_in: cfg.burn_in.unwrap_or(defaults.burn_in),
        initial_level: cfg.initial_level.unwrap_or(defaults.initial_level),
        initial_sd: cfg.initial_sd,
    };
    let steps = cfg.steps.unwrap_or(100);
    let seed = cfg.seed.unwrap_or(0);
    let series = simulate_with(&net, &order, &coef, steps, sigma, seed, &options)?;

    let truth = Truth {
        order: &order,
        alpha: if order.alpha_zero { vec![0.0; order.p] } else { alpha },
        beta: &beta,
        sigma,
        seed,
        steps,
        burn_in: options.burn_in,
        initial_level: options.initial_level,
        initial_sd: options.initial_sd.unwrap_or(sigma),
        node_order_hash: net.node_order_hash(),
    };
    let mut outputs = Outputs::default();
    outputs.add("panel.csv", write_cases_csv(&series)?);
    outputs.add("truth.json", serde_json::to_string_pretty(&truth)? + "\n");
    outputs.add("network.json", net.to_json()? + "\n");
    Ok(outputs.into())
}

pub fn select(cfg: &RunConfig) -> anyhow::Result<Staged> {
    cfg.check_paths()?;
    let mut quality = Vec::new();
    let net = load_network(cfg, &mut quality)?;
    let targets = load_targets(cfg, &net, &mut quality)?;
    let regions = regions(cfg, &net, &targets)?;
    let grid_max = cfg.grid_max.unwrap_or(3);
    let criterion = cfg.criterion();

    let jobs: Vec<(&Region, usize)> = regions
        .iter()
        .flat_map(|r| (0..r.series.len()).map(move |t| (r, t)))
        .collect();
    let results: Vec<_> = pool(cfg)?.install(|| {
        jobs.par_iter()
            .map(|(region, t)| model_selection(&region.series[*t].1, &region.net, grid_max, criterion))
            .collect()
    });

    let mut rows = vec![["state", "target", "rank", "alpha_order", "beta_order", "model", "score", "note"]
        .map(String::from)
        .to_vec()];
    let mut failures = 0;
    for ((region, t), result) in jobs.iter().zip(results) {
        let target = region.series[*t].0.to_string();
        match result {
            Ok(entries) => {
                for (rank, e) in entries.iter().enumerate() {
                    rows.push(vec![
                        region.key.clone(),
                        target.clone(),
                        (rank + 1).to_string(),
                        e.alpha_order.to_string(),
                        e.beta_order.to_string(),
                        e.order.label(),
                        e.score.map(|s| s.to_string()).unwrap_or_default(),
                        e.note.clone().unwrap_or_default(),
                    ]);
                }
            }
            Err(err) => {
                warn!("{} / {target}: {err}", region.key);
                failures += 1;
                let mut row = vec![region.key.clone(), target, String::new(), String::new(), String::new()];
                row.extend([String::new(), String::new(), err.to_string()]);
                rows.push(row);
            }
        }
    }
    let mut outputs = Outputs::default();
    outputs.add("selection.csv", csv_text(rows)?);
    outputs.add("quality.json", report_json(&quality)?);
    Ok(Staged { outputs, failures })
}
