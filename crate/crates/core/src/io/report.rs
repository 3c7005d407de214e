//! Run reports (JSON) and tabular outputs (CSV).

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::diagnostics::Metrics;
use crate::error::{Error, Result};
use crate::filter::FilterStats;

/// Per-iteration error histories of the three drivers of a `compare` run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CompareHistory {
    pub feast: Vec<f64>,
    pub feast2: Vec<f64>,
    pub f2p: Vec<f64>,
}

/// Everything a run produced. Field order is the JSON key order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub n: usize,
    pub metrics: Metrics,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub err_hist: Vec<f64>,
    pub num_ay_hist: Vec<usize>,
    pub inner: FilterStats,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub windows: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<CompareHistory>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub scan: Vec<[f64; 2]>,
    /// Wall time in seconds per phase.
    pub timings: BTreeMap<String, f64>,
    pub error: Option<String>,
}

impl RunReport {
    pub fn new(config: RunConfig) -> Self {
        RunReport {
            config,
            n: 0,
            metrics: Metrics::default(),
            eigenvalues: Vec::new(),
            residuals: Vec::new(),
            err_hist: Vec::new(),
            num_ay_hist: Vec::new(),
            inner: FilterStats::default(),
            converged: false,
            windows: Vec::new(),
            compare: None,
            scan: Vec::new(),
            timings: BTreeMap::new(),
            error: None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut buf = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision::default());
        self.serialize(&mut ser)
            .map_err(|e| Error::Config(format!("cannot serialize report: {e}")))?;
        buf.push(b'\n');
        Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })
    }
}

/// `{:.16e}`: 17 significant digits, enough to round-trip any `f64`.
pub fn format_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// Pretty printer that writes every float with [`format_f64`].
struct FullPrecision<'a>(serde_json::ser::PrettyFormatter<'a>);

impl Default for FullPrecision<'_> {
    fn default() -> Self {
        FullPrecision(serde_json::ser::PrettyFormatter::with_indent(b"  "))
    }
}

macro_rules! forward {
    ($($name:ident($($arg:ident: $ty:ty),*);)*) => {
        $(
            fn $name<W: ?Sized + Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                self.0.$name(w $(, $arg)*)
            }
        )*
    };
}

impl serde_json::ser::Formatter for FullPrecision<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(format_f64(value).as_bytes())
    }

    forward! {
        begin_array();
        end_array();
        begin_array_value(first: bool);
        end_array_value();
        begin_object();
        end_object();
        begin_object_key(first: bool);
        begin_object_value();
        end_object_value();
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_report(report: &RunReport, path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), &report.to_json()?)
}

fn err_cell(e: f64) -> String {
    if e == -1.0 {
        "-1".to_string()
    } else {
        format_f64(e)
    }
}

/// Columns `iter,err,num_ay`; iterations count from 1.
pub fn write_history_csv(err_hist: &[f64], num_ay_hist: &[usize], path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from("iter,err,num_ay\n");
    for (i, e) in err_hist.iter().enumerate() {
        let ay = num_ay_hist.get(i).map(usize::to_string).unwrap_or_default();
        out.push_str(&format!("{},{},{}\n", i + 1, err_cell(*e), ay));
    }
    write_text(path.as_ref(), &out)
}

/// Columns `iter,feast,feast2,f2p`; shorter histories leave empty cells.
pub fn write_compare_csv(h: &CompareHistory, path: impl AsRef<Path>) -> Result<()> {
    let rows = h.feast.len().max(h.feast2.len()).max(h.f2p.len());
    let cell = |v: &[f64], i: usize| v.get(i).map(|&e| err_cell(e)).unwrap_or_default();
    let mut out = String::from("iter,feast,feast2,f2p\n");
    for i in 0..rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            i + 1,
            cell(&h.feast, i),
            cell(&h.feast2, i),
            cell(&h.f2p, i)
        ));
    }
    write_text(path.as_ref(), &out)
}

/// Columns `lambda,h`.
pub fn write_scan_csv(scan: &[[f64; 2]], path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from("lambda,h\n");
    for [l, h] in scan {
        out.push_str(&format!("{},{}\n", format_f64(*l), format_f64(*h)));
    }
    write_text(path.as_ref(), &out)
}

/// One eigenvalue per line under the header `eigenvalue`.
pub fn write_spectrum_csv(values: &[f64], path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from("eigenvalue\n");
    for v in values {
        out.push_str(&format_f64(*v));
        out.push('\n');
    }
    write_text(path.as_ref(), &out)
}

/// Reads the first column of a CSV of eigenvalues, skipping a non-numeric
/// header and blank lines. The values are returned in decreasing order.
pub fn read_reference(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut vals = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let cell = line.split(',').next().unwrap_or("").trim();
        if cell.is_empty() || cell.starts_with('#') {
            continue;
        }
        match cell.parse::<f64>() {
            Ok(v) => vals.push(v),
            Err(_) if i == 0 => {}
            Err(e) => {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("`{cell}`: {e}"),
                })
            }
        }
    }
    vals.sort_by(|x, y| y.total_cmp(x));
    Ok(vals)
}
