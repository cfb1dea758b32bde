use serde::{Deserialize, Serialize};

use super::{fit, forecast, AlphaMode, GnarOrder};
use crate::error::{Error, Result};
use crate::eval::mase;
use crate::graph::CountyNetwork;
use crate::series::NetworkTimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SelectionCriterion {
    /// One-step MASE over the final fifth of the series, model fitted once
    /// on the leading four fifths.
    #[default]
    HoldoutMase,
    /// Bayesian information criterion of the full-sample fit.
    Bic,
}

impl std::str::FromStr for SelectionCriterion {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mase" | "holdout_mase" => Ok(SelectionCriterion::HoldoutMase),
            "bic" => Ok(SelectionCriterion::Bic),
            other => Err(Error::InvalidArgument(format!("unknown criterion '{other}'"))),
        }
    }
}

/// One grid cell of [`model_selection`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionEntry {
    pub alpha_order: usize,
    pub beta_order: usize,
    pub order: GnarOrder,
    /// `None` when the cell could not be evaluated.
    pub score: Option<f64>,
    pub note: Option<String>,
}

/// Maps an `(alphaOrder, betaOrder)` grid cell to a model order.
///
/// `a ≥ 1` gives `a` lags with stages up to `b` at each lag and per-node
/// `α`. `(0, b)` with `b ≥ 1` keeps a single lag of neighbour terms with `α`
/// pinned to zero. `(0, 0)` is the empty model, which forecasts zero.
pub fn grid_order(alpha_order: usize, beta_order: usize) -> GnarOrder {
    match (alpha_order, beta_order) {
        (0, 0) => GnarOrder {
            p: 0,
            s: vec![],
            alpha_mode: AlphaMode::PerNode,
            alpha_zero: false,
        },
        (0, b) => GnarOrder {
            p: 1,
            s: vec![b],
            alpha_mode: AlphaMode::PerNode,
            alpha_zero: true,
        },
        (a, b) => GnarOrder {
            p: a,
            s: vec![b; a],
            alpha_mode: AlphaMode::PerNode,
            alpha_zero: false,
        },
    }
}

/// Scores every cell `0 ≤ a, b ≤ grid_max` and ranks them, best first.
///
/// Ties are broken by smaller `a`, then smaller `b`. Cells that cannot be
/// fitted are kept at the end with `score = None`.
pub fn model_selection(
    series: &NetworkTimeSeries,
    net: &CountyNetwork,
    grid_max: usize,
    criterion: SelectionCriterion,
) -> Result<Vec<SelectionEntry>> {
    series.check_aligned(net)?;
    let mut entries = Vec::with_capacity((grid_max + 1).pow(2));
    for a in 0..=grid_max {
        for b in 0..=grid_max {
            let order = grid_order(a, b);
            let (score, note) = match score_cell(series, net, &order, criterion) {
                Ok(s) => (Some(s), None),
                Err(e) => (None, Some(e.to_string())),
            };
            entries.push(SelectionEntry {
                alpha_order: a,
                beta_order: b,
                order,
                score,
                note,
            });
        }
    }
    entries.sort_by(|x, y| {
        let by_score = match (x.score, y.score) {
            (Some(p), Some(q)) => p.total_cmp(&q),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => std::cmp::Ordering::Equal,
        };
        by_score.then((x.alpha_order, x.beta_order).cmp(&(y.alpha_order, y.beta_order)))
    });
    Ok(entries)
}

fn score_cell(
    series: &NetworkTimeSeries,
    net: &CountyNetwork,
    order: &GnarOrder,
    criterion: SelectionCriterion,
) -> Result<f64> {
    let t_len = series.len();
    match criterion {
        SelectionCriterion::Bic => {
            let fitted = fit(series, net, order)?;
            let obs = fitted.residuals.len() as f64;
            let rss: f64 = fitted.residuals.iter().map(|e| e * e).sum();
            Ok(obs * (rss / obs).ln() + fitted.rank as f64 * obs.ln())
        }
        SelectionCriterion::HoldoutMase => {
            let holdout = (t_len / 5).max(1);
            let train_len = t_len - holdout;
            if train_len <= order.p || train_len < 2 {
                return Err(Error::InsufficientData(format!(
                    "{train_len} training rows for {} lags",
                    order.p
                )));
            }
            let fitted = fit(&series.slice_rows(0, train_len)?, net, order)?;
            let (mut actual, mut predicted, mut previous) = (Vec::new(), Vec::new(), Vec::new());
            for t in train_len..t_len {
                let f = forecast(&fitted, &series.slice_rows(0, t)?, net, 1)?;
                actual.extend(series.row(t).iter());
                previous.extend(series.row(t - 1).iter());
                predicted.extend(f.row(0).iter());
            }
            Ok(mase(&actual, &predicted, &previous)?.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::network;
    use crate::model::{simulate, GnarCoefficients};
    use ndarray::Array2;

    #[test]
    fn grid_mapping() {
        assert!(grid_order(0, 0).is_empty());
        let o = grid_order(0, 1);
        assert_eq!((o.p, o.s.clone(), o.alpha_zero), (1, vec![1], true));
        let o = grid_order(1, 1);
        assert_eq!(o, crate::model::preset(1).unwrap());
        let o = grid_order(2, 1);
        assert_eq!(o, crate::model::preset(3).unwrap());
        let o = grid_order(3, 0);
        assert_eq!((o.p, o.s), (3, vec![0, 0, 0]));
    }

    #[test]
    fn single_cell_grid() {
        let net = network(3, &[(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]);
        let values = Array2::from_shape_fn((20, 3), |(t, i)| 1.0 + t as f64 + i as f64);
        let series = NetworkTimeSeries::for_network(values, &net).unwrap();
        let ranked = model_selection(&series, &net, 0, SelectionCriterion::HoldoutMase).unwrap();
        assert_eq!(ranked.len(), 1);
        assert_eq!((ranked[0].alpha_order, ranked[0].beta_order), (0, 0));
        assert!(ranked[0].score.is_some());
    }

    #[test]
    fn short_series_marks_cells_unavailable() {
        let net = network(2, &[(0, 1, 1.0), (1, 0, 1.0)]);
        let values = Array2::from_shape_fn((6, 2), |(t, i)| (t * 2 + i) as f64 + 1.0);
        let series = NetworkTimeSeries::for_network(values, &net).unwrap();
        let ranked = model_selection(&series, &net, 5, SelectionCriterion::Bic).unwrap();
        assert_eq!(ranked.len(), 36);
        let unavailable: Vec<_> = ranked.iter().filter(|e| e.score.is_none()).collect();
        assert!(!unavailable.is_empty());
        assert!(ranked.iter().rev().take(unavailable.len()).all(|e| e.score.is_none()));
    }

    #[test]
    fn ranking_is_sorted_with_tie_break() {
        let net = network(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]);
        let order = grid_order(1, 1);
        let coef = GnarCoefficients::global(
            &GnarOrder { alpha_mode: AlphaMode::Global, ..order.clone() },
            vec![0.3],
            vec![vec![0.4]],
        )
        .unwrap();
        let series = simulate(&net, &order, &coef, 80, 1.0, 2).unwrap();
        let ranked = model_selection(&series, &net, 2, SelectionCriterion::Bic).unwrap();
        for pair in ranked.windows(2) {
            let (x, y) = (pair[0].score.unwrap(), pair[1].score.unwrap());
            assert!(x < y || (x == y && (pair[0].alpha_order, pair[0].beta_order) < (pair[1].alpha_order, pair[1].beta_order)));
        }
    }
}
