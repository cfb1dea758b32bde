use std::collections::BTreeSet;
use std::path::Path;

use chrono::NaiveDate;

use super::{read_file, DataQualityReport};
use crate::error::{Error, Result};
use crate::graph::{state_postal, NodeId};
use crate::series::NetworkTimeSeries;

pub const CASE_HEADER: [&str; 4] = ["countyFIPS", "County Name", "State", "StateFIPS"];

/// Cumulative daily counts for one county.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseRow {
    pub fips: NodeId,
    pub name: String,
    pub state: String,
    pub state_fips: String,
    pub counts: Vec<f64>,
}

impl CaseRow {
    /// Rows with FIPS 0 hold counts not yet assigned to a county.
    pub fn is_unallocated(&self) -> bool {
        self.fips.as_str() == "00000"
    }
}

/// County × day table on a consecutive daily axis.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseTable {
    pub dates: Vec<NaiveDate>,
    pub rows: Vec<CaseRow>,
}

impl CaseTable {
    pub fn row(&self, fips: &NodeId) -> Option<&CaseRow> {
        self.rows.iter().find(|r| &r.fips == fips)
    }

    /// Clamps every cumulative series to its running maximum.
    pub fn repair_monotone(&mut self) {
        for row in &mut self.rows {
            let mut level = f64::NEG_INFINITY;
            for v in &mut row.counts {
                level = level.max(*v);
                *v = level;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseParse {
    pub table: CaseTable,
    pub report: DataQualityReport,
}

pub fn parse_cases(path: &Path) -> Result<CaseParse> {
    parse_cases_str(&read_file(path)?, path)
}

fn parse_date(raw: &str) -> Option<NaiveDate> {
    ["%Y-%m-%d", "%m/%d/%y", "%m/%d/%Y"]
        .iter()
        .find_map(|fmt| NaiveDate::parse_from_str(raw.trim(), fmt).ok())
}

/// Parses a county-by-date CSV; `path` only labels diagnostics.
///
/// Structural problems (header, dates, ragged or non-numeric rows) are
/// errors. Negative, fractional and decreasing counts, unallocated rows and
/// duplicate counties are accepted and flagged; only the first row of a
/// duplicated county is kept.
pub fn parse_cases_str(text: &str, path: &Path) -> Result<CaseParse> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let header_err = || Error::Header {
        path: path.to_path_buf(),
        expected: format!("{},<dates...>", CASE_HEADER.join(",")),
    };
    let header = records.next().ok_or_else(header_err)??;
    let fields: Vec<&str> = header.iter().map(|f| f.trim_start_matches('\u{feff}')).collect();
    if fields.len() < 5 || fields[..4] != CASE_HEADER {
        return Err(header_err());
    }
    let fail = |line: usize, reason: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let dates = fields[4..]
        .iter()
        .map(|raw| parse_date(raw).ok_or_else(|| fail(1, format!("unparseable date '{raw}'"))))
        .collect::<Result<Vec<_>>>()?;
    for pair in dates.windows(2) {
        if pair[1] - pair[0] != chrono::Duration::days(1) {
            return Err(fail(
                1,
                format!("date axis must advance one day at a time: {} then {}", pair[0], pair[1]),
            ));
        }
    }

    let mut report = DataQualityReport::new(path.display().to_string());
    let mut rows = Vec::new();
    let mut seen = BTreeSet::new();
    for record in records {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != fields.len() {
            return Err(fail(line, format!("expected {} fields, found {}", fields.len(), record.len())));
        }
        let fips = NodeId::normalize(&record[0]).map_err(|e| fail(line, e.to_string()))?;
        let counts = record
            .iter()
            .skip(4)
            .map(|raw| raw.parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| fail(line, "non-numeric count".into()))?;
        if counts.iter().any(|&v| v < 0.0) {
            report.flag(fips.to_string(), "negative");
        }
        if counts.iter().any(|v| v.fract() != 0.0) {
            report.flag(fips.to_string(), "non_integer");
        }
        if counts.windows(2).any(|w| w[1] < w[0]) {
            report.flag(fips.to_string(), "non_monotone");
        }
        let row = CaseRow {
            fips,
            name: record[1].to_string(),
            state: record[2].to_string(),
            state_fips: record[3].to_string(),
            counts,
        };
        if row.is_unallocated() {
            report.flag(row.fips.to_string(), "unallocated");
        }
        if !seen.insert(row.fips.clone()) {
            report.flag(row.fips.to_string(), "duplicate");
            continue;
        }
        rows.push(row);
    }
    Ok(CaseParse {
        table: CaseTable { dates, rows },
        report,
    })
}

/// Writes a panel in the county-by-date layout read by [`parse_cases`].
/// Values use the shortest representation that parses back exactly.
pub fn write_cases_csv(series: &NetworkTimeSeries) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = CASE_HEADER.iter().map(|s| s.to_string()).collect();
    header.extend((0..series.len()).map(|t| series.date_of(t).format("%Y-%m-%d").to_string()));
    w.write_record(&header)?;
    for (i, id) in series.nodes().iter().enumerate() {
        let state = id.state();
        let mut record = vec![
            id.as_str().trim_start_matches('0').to_string(),
            format!("Unit {id}"),
            state_postal(state).unwrap_or(state).to_string(),
            state.trim_start_matches('0').to_string(),
        ];
        if record[0].is_empty() {
            record[0] = "0".into();
        }
        record.extend(series.values().column(i).iter().map(|v| v.to_string()));
        w.write_record(&record)?;
    }
    let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("utf-8"))
}
