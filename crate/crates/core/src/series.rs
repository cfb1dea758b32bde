//! Node-aligned panels of observations.

use chrono::NaiveDate;
use ndarray::{Array2, ArrayView1, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{node_order_hash, CountyNetwork, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Frequency {
    #[default]
    Daily,
    Weekly,
}

impl Frequency {
    pub fn days(self) -> i64 {
        match self {
            Frequency::Daily => 1,
            Frequency::Weekly => 7,
        }
    }
}

impl std::str::FromStr for Frequency {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "daily" => Ok(Frequency::Daily),
            "weekly" => Ok(Frequency::Weekly),
            other => Err(Error::InvalidArgument(format!("unknown frequency '{other}'"))),
        }
    }
}

/// A `T × n` panel: row `t` is a time step, column `i` is the `i`-th node of
/// the network the panel is aligned to.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkTimeSeries {
    values: Array2<f64>,
    nodes: Vec<NodeId>,
    pub frequency: Frequency,
    pub start_date: NaiveDate,
}

impl NetworkTimeSeries {
    pub fn new(
        values: Array2<f64>,
        nodes: Vec<NodeId>,
        frequency: Frequency,
        start_date: NaiveDate,
    ) -> Result<Self> {
        if values.ncols() != nodes.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} columns for {} nodes",
                values.ncols(),
                nodes.len()
            )));
        }
        if values.nrows() == 0 {
            return Err(Error::InsufficientData("a series needs at least one row".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite value {bad} in series")));
        }
        Ok(NetworkTimeSeries {
            values,
            nodes,
            frequency,
            start_date,
        })
    }

    /// Panel aligned to `net`, starting on an arbitrary fixed date.
    pub fn for_network(values: Array2<f64>, net: &CountyNetwork) -> Result<Self> {
        Self::new(values, net.nodes().to_vec(), Frequency::Daily, default_start())
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// `(T, n)`.
    pub fn shape(&self) -> (usize, usize) {
        self.values.dim()
    }

    pub fn len(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.values.nrows() == 0
    }

    pub fn row(&self, t: usize) -> ArrayView1<'_, f64> {
        self.values.row(t)
    }

    pub fn node_order_hash(&self) -> String {
        node_order_hash(&self.nodes)
    }

    pub fn check_aligned(&self, net: &CountyNetwork) -> Result<()> {
        if self.nodes.as_slice() != net.nodes() {
            return Err(Error::NodeOrderMismatch);
        }
        Ok(())
    }

    /// Rows `start..end`, keeping the calendar axis consistent.
    pub fn slice_rows(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.len() {
            return Err(Error::InvalidArgument(format!(
                "row range {start}..{end} outside 0..{}",
                self.len()
            )));
        }
        Ok(NetworkTimeSeries {
            values: self.values.slice(ndarray::s![start..end, ..]).to_owned(),
            nodes: self.nodes.clone(),
            frequency: self.frequency,
            start_date: self.date_of(start),
        })
    }

    pub fn with_values(&self, values: Array2<f64>) -> Result<Self> {
        Self::new(values, self.nodes.clone(), self.frequency, self.start_date)
    }

    pub fn date_of(&self, t: usize) -> NaiveDate {
        self.start_date + chrono::Duration::days(self.frequency.days() * t as i64)
    }

    /// Reorders columns by `perm`: new column `k` is old column `perm[k]`.
    pub fn permute_columns(&self, perm: &[usize]) -> Result<Self> {
        let values = self.values.select(Axis(1), perm);
        let nodes = perm.iter().map(|&k| self.nodes[k].clone()).collect();
        Self::new(values, nodes, self.frequency, self.start_date)
    }
}

pub(crate) fn default_start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2020, 1, 22).expect("valid date")
}
