//! Benchmark rows and their CSV form.
//!
//! The file starts with a `# ssc-bench v1 ...` comment, then a header and
//! one `TRIAL` row per (cell, trial, method) followed by `AGG` rows with
//! the per-method mean, standard error and median of each cell.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use super::config::{Method, Scenario};
use crate::error::{invalid, Result, SscError};
use crate::pipeline::StageTimings;

pub const SCHEMA_VERSION: &str = "ssc-bench v1";

pub const COLUMNS: [&str; 25] = [
    "kind",
    "scenario",
    "cell",
    "nodes",
    "n",
    "k",
    "beta",
    "zeta",
    "delta",
    "pi",
    "method",
    "trial",
    "seed",
    "rate",
    "se",
    "median",
    "t_sampling",
    "t_laplacian",
    "t_eig",
    "t_kmeans",
    "t_total",
    "coverage",
    "degenerate",
    "status",
    "trend",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Trial,
    Agg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Full spectral clustering not run because N exceeds the dense guard.
    Skipped,
}

/// Direction of a cell's mean rate relative to the previous cell of the
/// same method along the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    Nonincreasing,
    Increasing,
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub kind: RowKind,
    pub scenario: Scenario,
    pub cell: usize,
    pub nodes: usize,
    /// Sample size; equals `nodes` for full spectral clustering.
    pub n: usize,
    pub k: usize,
    pub beta: f64,
    pub zeta: f64,
    pub delta: f64,
    pub pi: Vec<f64>,
    pub method: Method,
    pub trial: Option<usize>,
    pub seed: Option<u64>,
    /// Trial rate, or the mean over trials on `AGG` rows.
    pub rate: Option<f64>,
    pub se: Option<f64>,
    pub median: Option<f64>,
    /// Trial timings, or their means on `AGG` rows.
    pub timings: Option<StageTimings>,
    /// Whether the sample met every community; the covered fraction on
    /// `AGG` rows.
    pub coverage: Option<f64>,
    /// 1 for a trial without signal; the count of such trials on `AGG` rows.
    pub degenerate: usize,
    pub status: Status,
    pub trend: Option<Trend>,
}

impl fmt::Display for RowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowKind::Trial => "TRIAL",
            RowKind::Agg => "AGG",
        })
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ok => "ok",
            Status::Skipped => "skipped",
        })
    }
}

impl fmt::Display for Trend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Trend::Nonincreasing => "nonincreasing",
            Trend::Increasing => "increasing",
        })
    }
}

fn opt<T: fmt::Display>(x: Option<T>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}

fn secs(x: f64) -> String {
    format!("{x:.6}")
}

impl Record {
    fn fields(&self) -> Vec<String> {
        let t = self.timings;
        vec![
            self.kind.to_string(),
            self.scenario.to_string(),
            self.cell.to_string(),
            self.nodes.to_string(),
            self.n.to_string(),
            self.k.to_string(),
            self.beta.to_string(),
            self.zeta.to_string(),
            self.delta.to_string(),
            self.pi.iter().map(|p| format!("{p:.6}")).collect::<Vec<_>>().join(";"),
            self.method.to_string(),
            opt(self.trial),
            opt(self.seed),
            opt(self.rate),
            opt(self.se),
            opt(self.median),
            opt(t.map(|t| secs(t.sampling))),
            opt(t.map(|t| secs(t.laplacian))),
            opt(t.map(|t| secs(t.eig))),
            opt(t.map(|t| secs(t.kmeans))),
            opt(t.map(|t| secs(t.total()))),
            opt(self.coverage),
            self.degenerate.to_string(),
            self.status.to_string(),
            opt(self.trend),
        ]
    }
}

/// Writes the version comment, header and rows.
pub fn write_records_to(mut w: impl Write, comment: &str, records: &[Record]) -> Result<()> {
    writeln!(w, "# {SCHEMA_VERSION} {comment}")?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(COLUMNS).map_err(csv_err)?;
    for r in records {
        csv.write_record(r.fields()).map_err(csv_err)?;
    }
    csv.flush()?;
    Ok(())
}

/// Writes to a temporary sibling and renames, so a failed run leaves no
/// partial file behind.
pub fn write_records(path: impl AsRef<Path>, comment: &str, records: &[Record]) -> Result<()> {
    let path = path.as_ref();
    let tmp = path.with_extension("csv.partial");
    {
        let f = std::io::BufWriter::new(std::fs::File::create(&tmp)?);
        write_records_to(f, comment, records)?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn csv_err(e: csv::Error) -> SscError {
    SscError::InvalidInput(format!("csv: {e}"))
}

fn cell(row: &csv::StringRecord, idx: usize, line: usize) -> Result<&str> {
    row.get(idx).ok_or(SscError::Parse {
        line,
        msg: format!("missing column {}", COLUMNS[idx]),
    })
}

fn req<T: FromStr>(row: &csv::StringRecord, idx: usize, line: usize) -> Result<T> {
    let s = cell(row, idx, line)?;
    s.parse().map_err(|_| SscError::Parse {
        line,
        msg: format!("bad {} value {s:?}", COLUMNS[idx]),
    })
}

fn optional<T: FromStr>(row: &csv::StringRecord, idx: usize, line: usize) -> Result<Option<T>> {
    if cell(row, idx, line)?.is_empty() {
        Ok(None)
    } else {
        req(row, idx, line).map(Some)
    }
}

/// Parses a file written by [`write_records_to`].
pub fn read_records_from(r: impl Read) -> Result<Vec<Record>> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
    let header = reader.headers().map_err(csv_err)?.clone();
    if header.iter().ne(COLUMNS.iter().copied()) {
        return invalid("unrecognized benchmark CSV header");
    }
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(csv_err)?;
        let line = i + 3;
        let kind = match cell(&row, 0, line)? {
            "TRIAL" => RowKind::Trial,
            "AGG" => RowKind::Agg,
            other => {
                return Err(SscError::Parse {
                    line,
                    msg: format!("unknown row kind {other:?}"),
                })
            }
        };
        let times: [Option<f64>; 4] = [
            optional(&row, 16, line)?,
            optional(&row, 17, line)?,
            optional(&row, 18, line)?,
            optional(&row, 19, line)?,
        ];
        let timings = match times {
            [Some(sampling), Some(laplacian), Some(eig), Some(kmeans)] => Some(StageTimings {
                sampling,
                laplacian,
                eig,
                kmeans,
            }),
            _ => None,
        };
        let pi_text = cell(&row, 9, line)?;
        let pi = pi_text
            .split(';')
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse().map_err(|_| SscError::Parse {
                    line,
                    msg: format!("bad pi entry {s:?}"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        out.push(Record {
            kind,
            scenario: req(&row, 1, line)?,
            cell: req(&row, 2, line)?,
            nodes: req(&row, 3, line)?,
            n: req(&row, 4, line)?,
            k: req(&row, 5, line)?,
            beta: req(&row, 6, line)?,
            zeta: req(&row, 7, line)?,
            delta: req(&row, 8, line)?,
            pi,
            method: req(&row, 10, line)?,
            trial: optional(&row, 11, line)?,
            seed: optional(&row, 12, line)?,
            rate: optional(&row, 13, line)?,
            se: optional(&row, 14, line)?,
            median: optional(&row, 15, line)?,
            timings,
            coverage: optional(&row, 21, line)?,
            degenerate: req(&row, 22, line)?,
            status: match cell(&row, 23, line)? {
                "ok" => Status::Ok,
                "skipped" => Status::Skipped,
                other => {
                    return Err(SscError::Parse {
                        line,
                        msg: format!("unknown status {other:?}"),
                    })
                }
            },
            trend: match cell(&row, 24, line)? {
                "" => None,
                "nonincreasing" => Some(Trend::Nonincreasing),
                "increasing" => Some(Trend::Increasing),
                other => {
                    return Err(SscError::Parse {
                        line,
                        msg: format!("unknown trend {other:?}"),
                    })
                }
            },
        });
    }
    Ok(out)
}

pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<Record>> {
    read_records_from(std::fs::File::open(path)?)
}

/// Sample mean, standard error `s / √T` and median.
pub fn summarize(values: &[f64]) -> Option<(f64, f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let t = values.len() as f64;
    let mean = values.iter().sum::<f64>() / t;
    let se = if values.len() > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (t - 1.0);
        (var / t).sqrt()
    } else {
        0.0
    };
    Some((mean, se, median(values)))
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}
