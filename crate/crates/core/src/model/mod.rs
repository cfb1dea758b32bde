//! GNAR(p, [s]) processes on a [`CountyNetwork`](crate::CountyNetwork).
//!
//! For node `i` at time `t` the one-step predictor is
//!
//! ```text
//! Σ_j ( α_ij X_i,t-j  +  Σ_{r ≤ s_j} β_jr Σ_{q ∈ N_r(i)} w_iq X_q,t-j )
//! ```
//!
//! where `N_r(i)` is the stage-`r` neighbourhood of `i` and `w_iq` its
//! normalised connection weights. Orders `(p, [s])` are chosen by the user;
//! `α` and `β` are estimated by least squares on the stacked system.

mod design;
mod fit;
mod forecast;
pub mod lstsq;
mod select;
mod simulate;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use design::{build_design, ColumnDescriptor, Design};
pub use fit::{fit, FitArtifact, GnarFit};
pub use forecast::forecast;
pub use select::{grid_order, model_selection, SelectionCriterion, SelectionEntry};
pub use simulate::{simulate, simulate_with, SimulateOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AlphaMode {
    /// One autoregressive coefficient per node and lag.
    #[default]
    PerNode,
    /// One autoregressive coefficient per lag, shared by all nodes.
    Global,
}

/// Model order `(p, [s])`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GnarOrder {
    pub p: usize,
    /// Maximum neighbour stage for each lag; `s.len() == p`.
    pub s: Vec<usize>,
    pub alpha_mode: AlphaMode,
    /// Pins every `α` to zero, leaving only neighbour terms.
    pub alpha_zero: bool,
}

impl GnarOrder {
    pub fn new(p: usize, s: Vec<usize>, alpha_mode: AlphaMode, alpha_zero: bool) -> Result<Self> {
        let order = GnarOrder {
            p,
            s,
            alpha_mode,
            alpha_zero,
        };
        order.validate()?;
        Ok(order)
    }

    pub fn validate(&self) -> Result<()> {
        if self.s.len() != self.p {
            return Err(Error::InvalidArgument(format!(
                "order has p = {} but {} stage limits",
                self.p,
                self.s.len()
            )));
        }
        if self.alpha_zero && self.s.iter().all(|&s| s == 0) {
            return Err(Error::InvalidArgument(
                "alpha pinned to zero with no neighbour terms leaves an empty model".into(),
            ));
        }
        Ok(())
    }

    /// Largest neighbour stage used at any lag.
    pub fn max_stage(&self) -> usize {
        self.s.iter().copied().max().unwrap_or(0)
    }

    pub fn alpha_columns(&self, n: usize) -> usize {
        match (self.alpha_zero, self.alpha_mode) {
            (true, _) => 0,
            (false, AlphaMode::Global) => self.p,
            (false, AlphaMode::PerNode) => n * self.p,
        }
    }

    pub fn beta_columns(&self) -> usize {
        self.s.iter().sum()
    }

    pub fn column_count(&self, n: usize) -> usize {
        self.alpha_columns(n) + self.beta_columns()
    }

    pub fn is_empty(&self) -> bool {
        self.column_count(1) == 0
    }

    /// Compact label, e.g. `p=2,s=[1,1],alpha=per_node`.
    pub fn label(&self) -> String {
        let s: Vec<String> = self.s.iter().map(|v| v.to_string()).collect();
        let alpha = match (self.alpha_zero, self.alpha_mode) {
            (true, _) => "zero",
            (false, AlphaMode::Global) => "global",
            (false, AlphaMode::PerNode) => "per_node",
        };
        format!("p={},s=[{}],alpha={alpha}", self.p, s.join(","))
    }
}

/// The three named models.
///
/// - 1: one lag, stage-1 neighbours, per-node `α`.
/// - 2: one lag, stage-1 neighbours, `α` pinned to zero.
/// - 3: two lags with stage-1 neighbours at each, per-node `α`.
pub fn preset(model_id: u8) -> Result<GnarOrder> {
    match model_id {
        1 => GnarOrder::new(1, vec![1], AlphaMode::PerNode, false),
        2 => GnarOrder::new(1, vec![1], AlphaMode::PerNode, true),
        3 => GnarOrder::new(2, vec![1, 1], AlphaMode::PerNode, false),
        other => Err(Error::InvalidArgument(format!("unknown model preset {other}"))),
    }
}

/// Autoregressive coefficients, shaped by [`AlphaMode`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Alpha {
    /// `alpha[j - 1]` for lag `j`.
    Global(Vec<f64>),
    /// `alpha[i][j - 1]` for node `i`, lag `j`.
    PerNode(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnarCoefficients {
    pub alpha: Alpha,
    /// `beta[j - 1][r - 1]` for lag `j`, stage `r`.
    pub beta: Vec<Vec<f64>>,
}

impl GnarCoefficients {
    /// Coefficients with a shared `α` per lag. Under `alpha_zero` the
    /// supplied `alpha` must be all zeros (or empty).
    pub fn global(order: &GnarOrder, alpha: Vec<f64>, beta: Vec<Vec<f64>>) -> Result<Self> {
        let alpha = if alpha.is_empty() && order.alpha_zero {
            vec![0.0; order.p]
        } else {
            alpha
        };
        let coef = GnarCoefficients {
            alpha: Alpha::Global(alpha),
            beta,
        };
        coef.validate(order, None)?;
        Ok(coef)
    }

    pub fn per_node(order: &GnarOrder, alpha: Vec<Vec<f64>>, beta: Vec<Vec<f64>>) -> Result<Self> {
        let n = alpha.len();
        let coef = GnarCoefficients {
            alpha: Alpha::PerNode(alpha),
            beta,
        };
        coef.validate(order, Some(n))?;
        Ok(coef)
    }

    pub(crate) fn zeros(order: &GnarOrder, n: usize) -> Self {
        let alpha = match order.alpha_mode {
            AlphaMode::Global => Alpha::Global(vec![0.0; order.p]),
            AlphaMode::PerNode => Alpha::PerNode(vec![vec![0.0; order.p]; n]),
        };
        GnarCoefficients {
            alpha,
            beta: order.s.iter().map(|&s| vec![0.0; s]).collect(),
        }
    }

    /// Checks shapes against `order` and, when given, the node count.
    pub fn validate(&self, order: &GnarOrder, n: Option<usize>) -> Result<()> {
        order.validate()?;
        let mismatch = |msg: String| Err(Error::DimensionMismatch(msg));
        match &self.alpha {
            Alpha::Global(a) => {
                if a.len() != order.p {
                    return mismatch(format!("{} alpha values for p = {}", a.len(), order.p));
                }
            }
            Alpha::PerNode(rows) => {
                if let Some(n) = n {
                    if rows.len() != n {
                        return mismatch(format!("{} alpha rows for {n} nodes", rows.len()));
                    }
                }
                if rows.iter().any(|r| r.len() != order.p) {
                    return mismatch(format!("alpha rows must have p = {} entries", order.p));
                }
            }
        }
        if order.alpha_zero && self.alpha_values().any(|a| a != 0.0) {
            return mismatch("alpha must be zero under alpha_zero".into());
        }
        if self.beta.len() != order.p
            || self.beta.iter().zip(&order.s).any(|(b, &s)| b.len() != s)
        {
            return mismatch(format!("beta shape does not match s = {:?}", order.s));
        }
        Ok(())
    }

    /// `α` for node `i` (0-based) at lag `j` (1-based). Coefficients with
    /// `α` pinned to zero store no `α` values and report 0.
    pub fn alpha(&self, i: usize, j: usize) -> f64 {
        let value = match &self.alpha {
            Alpha::Global(a) => a.get(j - 1),
            Alpha::PerNode(rows) => rows.get(i).and_then(|r| r.get(j - 1)),
        };
        value.copied().unwrap_or(0.0)
    }

    /// `β` at lag `j`, stage `r` (both 1-based).
    pub fn beta(&self, j: usize, r: usize) -> f64 {
        self.beta[j - 1][r - 1]
    }

    fn alpha_values(&self) -> Box<dyn Iterator<Item = f64> + '_> {
        match &self.alpha {
            Alpha::Global(a) => Box::new(a.iter().copied()),
            Alpha::PerNode(rows) => Box::new(rows.iter().flatten().copied()),
        }
    }
}
