//! Input files and panel preparation.
//!
//! Flow files use the header `from_fips,to_fips,commuters`; case and death
//! files use the county-by-date layout
//! `countyFIPS,County Name,State,StateFIPS,<dates...>`. Parsers collect
//! recoverable problems into a [`DataQualityReport`] instead of failing.

mod cases;
mod flows;
mod panel;
mod transform;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use cases::{parse_cases, parse_cases_str, write_cases_csv, CaseParse, CaseRow, CaseTable};
pub use flows::{
    build_network_from_flows, parse_centroids, parse_flows, parse_flows_str, write_flows_csv, FlowParse,
    FlowRecord,
};
pub use panel::{aggregate_weekly, to_panel};
pub use transform::{invert, transform, Transform, TransformKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowError {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QualityFlag {
    pub fips: String,
    pub kind: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DataQualityReport {
    pub file: String,
    pub row_errors: Vec<RowError>,
    pub flags: Vec<QualityFlag>,
}

impl DataQualityReport {
    pub fn new(file: impl Into<String>) -> Self {
        DataQualityReport {
            file: file.into(),
            ..Default::default()
        }
    }

    pub(crate) fn error(&mut self, line: usize, reason: impl Into<String>) {
        self.row_errors.push(RowError {
            line,
            reason: reason.into(),
        });
    }

    pub(crate) fn flag(&mut self, fips: impl Into<String>, kind: &str) {
        self.flags.push(QualityFlag {
            fips: fips.into(),
            kind: kind.to_string(),
        });
    }

    pub fn is_clean(&self) -> bool {
        self.row_errors.is_empty()
    }
}

pub(crate) fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
