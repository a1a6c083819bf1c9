//! Percent-error comparison of a level table against reference values.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::LevelTable;
use crate::error::{Error, Result};
use crate::format::{fixed3, pretty_table, ser15, sig15};

/// Marker on a reference row whose computed value is known to be unreliable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mark {
    Star,
    Dagger,
}

impl FromStr for Mark {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "star" | "★" | "*" => Ok(Mark::Star),
            "dagger" | "†" | "+" => Ok(Mark::Dagger),
            other => Err(Error::Parse(format!("unknown row mark '{other}'"))),
        }
    }
}

impl fmt::Display for Mark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mark::Star => "star",
            Mark::Dagger => "dagger",
        })
    }
}

/// One row of a reference table. `m` is `|m|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRow {
    pub row: usize,
    pub label: Option<(u32, u32, u32)>,
    pub ps: Option<f64>,
    pub ns: Option<f64>,
    pub percent_error: Option<f64>,
    pub mark: Option<Mark>,
}

/// Which reference column to compare against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ReferenceColumn {
    Ps,
    #[default]
    Ns,
}

impl FromStr for ReferenceColumn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ps" => Ok(ReferenceColumn::Ps),
            "ns" | "value" => Ok(ReferenceColumn::Ns),
            other => Err(Error::Parse(format!("unknown reference column '{other}'"))),
        }
    }
}

/// Reference spectrum read from CSV.
///
/// Recognised header columns: `row`, `n`, `l`, `m`, `ps`, `ns`, `percent_error`,
/// `mark`, and `value` (alias of `ns`). Lines starting with `#` are skipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceTable {
    pub rows: Vec<ReferenceRow>,
}

impl ReferenceTable {
    pub fn from_values(values: &[f64]) -> Self {
        Self {
            rows: values
                .iter()
                .enumerate()
                .map(|(i, v)| ReferenceRow {
                    row: i + 1,
                    label: None,
                    ps: None,
                    ns: Some(*v),
                    percent_error: None,
                    mark: None,
                })
                .collect(),
        }
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header: Vec<String> = rdr
            .headers()
            .map_err(csv_error)?
            .iter()
            .map(str::to_ascii_lowercase)
            .collect();
        let col = |name: &str| header.iter().position(|h| h == name);
        let (c_row, c_n, c_l, c_m) = (col("row"), col("n"), col("l"), col("m"));
        let (c_ps, c_ns, c_pe, c_mark) = (col("ps"), col("ns").or(col("value")), col("percent_error"), col("mark"));
        if c_ps.is_none() && c_ns.is_none() {
            return Err(Error::Parse("reference table needs a ps, ns or value column".into()));
        }
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(csv_error)?;
            let cell = |c: Option<usize>| c.and_then(|c| rec.get(c)).filter(|s| !s.is_empty());
            let num = |c: Option<usize>| -> Result<Option<f64>> {
                cell(c)
                    .map(|s| {
                        s.parse::<f64>()
                            .map_err(|_| Error::Parse(format!("reference record {}: '{s}' is not a number", i + 1)))
                    })
                    .transpose()
            };
            let int = |c: Option<usize>| -> Result<Option<u32>> {
                cell(c)
                    .map(|s| {
                        s.parse::<i64>()
                            .map(|v| v.unsigned_abs() as u32)
                            .map_err(|_| Error::Parse(format!("reference record {}: '{s}' is not an integer", i + 1)))
                    })
                    .transpose()
            };
            let label = match (int(c_n)?, int(c_l)?, int(c_m)?) {
                (Some(n), Some(l), Some(m)) => Some((n, l, m)),
                _ => None,
            };
            rows.push(ReferenceRow {
                row: int(c_row)?.map(|r| r as usize).unwrap_or(i + 1),
                label,
                ps: num(c_ps)?,
                ns: num(c_ns)?,
                percent_error: num(c_pe)?,
                mark: cell(c_mark).map(str::parse).transpose()?,
            });
        }
        Ok(Self { rows })
    }

    pub fn column(&self, which: ReferenceColumn) -> Result<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| {
                match which {
                    ReferenceColumn::Ps => r.ps,
                    ReferenceColumn::Ns => r.ns,
                }
                .ok_or_else(|| Error::Parse(format!("reference row {} has no {which:?} value", r.row)))
            })
            .collect()
    }

    fn labelled(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.label.is_some())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub rank: usize,
    pub n: u32,
    pub l: u32,
    pub m: i32,
    #[serde(serialize_with = "ser15")]
    pub computed: f64,
    #[serde(serialize_with = "ser15")]
    pub reference: f64,
    #[serde(serialize_with = "ser15")]
    pub percent_error: f64,
    /// Percent error printed alongside the reference, when present.
    pub printed_error: Option<f64>,
    pub flagged: bool,
}

/// Statistics over the unflagged rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSummary {
    pub count: usize,
    pub flagged: usize,
    #[serde(serialize_with = "ser15")]
    pub max_percent_error: f64,
    #[serde(serialize_with = "ser15")]
    pub mean_percent_error: f64,
    /// Rank of the row with the largest error.
    pub max_rank: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub summary: ComparisonSummary,
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    Error::Parse(format!("csv: {e}"))
}

/// CSV text with the given header.
pub(crate) fn write_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn percent(computed: f64, reference: f64) -> f64 {
    ((reference - computed) / reference).abs() * 100.0
}

/// Positional comparison of the table totals against `reference`.
pub fn compare(table: &LevelTable, reference: &[f64]) -> Result<ComparisonReport> {
    compare_reference(table, &ReferenceTable::from_values(reference), ReferenceColumn::Ns)
}

/// Comparison against a reference table.
///
/// Rows carrying `(n, l, |m|)` labels are matched to computed levels with the
/// same quantum numbers; unlabelled tables are compared by position. Computed
/// levels with a near-resonance flag and marked reference rows are excluded
/// from the summary.
pub fn compare_reference(
    table: &LevelTable,
    reference: &ReferenceTable,
    which: ReferenceColumn,
) -> Result<ComparisonReport> {
    if table.rows.len() != reference.rows.len() {
        return Err(Error::LengthMismatch {
            computed: table.rows.len(),
            reference: reference.rows.len(),
        });
    }
    let values = reference.column(which)?;
    let mut used = vec![false; table.rows.len()];
    let mut rows = Vec::with_capacity(values.len());
    for (k, (rr, value)) in reference.rows.iter().zip(&values).enumerate() {
        let i = match rr.label {
            Some((n, l, m)) if reference.labelled() => (0..table.rows.len())
                .find(|&i| {
                    let r = &table.rows[i];
                    !used[i] && r.n == n && r.l == l && r.m.unsigned_abs() == m
                })
                .ok_or(Error::UnmatchedReference { n, l, m })?,
            _ => k,
        };
        used[i] = true;
        let lr = &table.rows[i];
        rows.push(ComparisonRow {
            rank: lr.rank,
            n: lr.n,
            l: lr.l,
            m: lr.m,
            computed: lr.total,
            reference: *value,
            percent_error: percent(lr.total, *value),
            printed_error: if which == ReferenceColumn::Ns { rr.percent_error } else { None },
            flagged: lr.is_flagged() || rr.mark.is_some(),
        });
    }
    let summary = summarize(&rows);
    Ok(ComparisonReport { rows, summary })
}

fn summarize(rows: &[ComparisonRow]) -> ComparisonSummary {
    let kept: Vec<&ComparisonRow> = rows.iter().filter(|r| !r.flagged).collect();
    let max = kept.iter().copied().fold(None::<&ComparisonRow>, |best, r| match best {
        Some(b) if b.percent_error >= r.percent_error => Some(b),
        _ => Some(r),
    });
    let mean = if kept.is_empty() {
        0.0
    } else {
        kept.iter().map(|r| r.percent_error).sum::<f64>() / kept.len() as f64
    };
    ComparisonSummary {
        count: kept.len(),
        flagged: rows.len() - kept.len(),
        max_percent_error: max.map_or(0.0, |r| r.percent_error),
        mean_percent_error: mean,
        max_rank: max.map(|r| r.rank),
    }
}

pub const COMPARISON_COLUMNS: [&str; 9] =
    ["rank", "n", "l", "m", "computed", "reference", "percent_error", "printed_error", "flagged"];

impl ComparisonReport {
    /// True when the largest unflagged error is below `gate` percent.
    pub fn passes(&self, gate: f64) -> bool {
        self.summary.max_percent_error < gate
    }

    fn cells(&self, num: impl Fn(f64) -> String) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.rank.to_string(),
                    r.n.to_string(),
                    r.l.to_string(),
                    r.m.to_string(),
                    num(r.computed),
                    num(r.reference),
                    num(r.percent_error),
                    r.printed_error.map(&num).unwrap_or_default(),
                    r.flagged.to_string(),
                ]
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        write_csv(&COMPARISON_COLUMNS, &self.cells(sig15))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_pretty(&self) -> String {
        let s = &self.summary;
        format!(
            "{}max {}% (rank {}), mean {}% over {} rows; {} flagged\n",
            pretty_table(&COMPARISON_COLUMNS, &self.cells(fixed3)),
            fixed3(s.max_percent_error),
            s.max_rank.map_or("-".into(), |r| r.to_string()),
            fixed3(s.mean_percent_error),
            s.count,
            s.flagged
        )
    }
}
