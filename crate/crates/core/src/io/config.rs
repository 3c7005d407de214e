//! Run configuration: flat `key = value` files with command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::eigen::F2PConfig;
use crate::error::{Error, Result};
use crate::filter::IntervalSpec;
use crate::linalg::{SparseSymMatrix, MAX_ORDER};
use crate::solver::SolverConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Feast,
    Feast2,
    Psi,
    F2p,
    Sweep,
    Compare,
    FilterScan,
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "feast" => Algorithm::Feast,
            "feast2" => Algorithm::Feast2,
            "psi" => Algorithm::Psi,
            "f2p" => Algorithm::F2p,
            "sweep" => Algorithm::Sweep,
            "compare" => Algorithm::Compare,
            "filter-scan" | "filter_scan" => Algorithm::FilterScan,
            other => return Err(Error::Config(format!("unknown algorithm `{other}`"))),
        })
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Algorithm::Feast => "feast",
            Algorithm::Feast2 => "feast2",
            Algorithm::Psi => "psi",
            Algorithm::F2p => "f2p",
            Algorithm::Sweep => "sweep",
            Algorithm::Compare => "compare",
            Algorithm::FilterScan => "filter-scan",
        };
        f.write_str(s)
    }
}

/// Every knob of a run. Serialized verbatim into the report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Matrix Market path, or `diag:N` / `laplacian:N` for bundled test
    /// matrices.
    pub matrix: String,
    pub algorithm: Algorithm,
    #[serde(with = "extended_f64")]
    pub a: f64,
    #[serde(with = "extended_f64")]
    pub b: f64,
    /// Shared radius of the two circles; defaults to `(b - a) / 2`.
    pub radius: Option<f64>,
    pub q: usize,
    pub m: usize,
    /// Defaults to `m / 2`.
    pub num_cmp: Option<usize>,
    /// Defaults to `num_cmp`.
    pub num_out: Option<usize>,
    pub num_eigm: usize,
    #[serde(with = "extended_f64")]
    pub min_eig: f64,
    pub max_it: usize,
    pub sub_max_it: usize,
    pub sub_tol: f64,
    /// Convergence tolerance of the feast/feast2/psi drivers.
    pub tol: f64,
    pub inner_tol: f64,
    pub inner_max_iter: Option<usize>,
    pub seed: u64,
    pub parallel_inner: bool,
    pub output: Option<PathBuf>,
    /// Per-iteration history CSV.
    pub history: Option<PathBuf>,
    /// Decreasing reference eigenvalues for the eigenvalue-error metric.
    pub reference: Option<PathBuf>,
    /// filter-scan: circle center; defaults to `(a + b) / 2`.
    pub center: Option<f64>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub points: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            matrix: String::new(),
            algorithm: Algorithm::F2p,
            a: f64::NAN,
            b: f64::NAN,
            radius: None,
            q: 8,
            m: 20,
            num_cmp: None,
            num_out: None,
            num_eigm: 5,
            min_eig: f64::NEG_INFINITY,
            max_it: 50,
            sub_max_it: 100,
            sub_tol: 1e-1,
            tol: 1e-10,
            inner_tol: 1e-10,
            inner_max_iter: None,
            seed: 0,
            parallel_inner: false,
            output: None,
            history: None,
            reference: None,
            center: None,
            lambda_min: -5.0,
            lambda_max: 5.0,
            points: 201,
        }
    }
}

/// JSON has no infinities or NaN; those are written as strings.
mod extended_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str(&crate::io::format_f64(*v))
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    v.trim()
        .parse()
        .map_err(|e| Error::Config(format!("{key} = {v}: {e}")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(Error::Config(format!("{key} = {v}: expected a boolean"))),
    }
}

fn opt<T: FromStr>(key: &str, v: &str) -> Result<Option<T>>
where
    T::Err: fmt::Display,
{
    let t = v.trim();
    if t.is_empty() || t.eq_ignore_ascii_case("none") {
        Ok(None)
    } else {
        parse_value(key, t).map(Some)
    }
}

impl RunConfig {
    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let k = key.trim().replace('-', "_");
        let v = value.trim();
        match k.as_str() {
            "matrix" | "matrix_path" => self.matrix = v.to_string(),
            "algorithm" => self.algorithm = v.parse()?,
            "a" => self.a = parse_value(&k, v)?,
            "b" => self.b = parse_value(&k, v)?,
            "radius" | "r" => self.radius = opt(&k, v)?,
            "q" => self.q = parse_value(&k, v)?,
            "m" => self.m = parse_value(&k, v)?,
            "num_cmp" => self.num_cmp = opt(&k, v)?,
            "num_out" => self.num_out = opt(&k, v)?,
            "num_eigm" => self.num_eigm = parse_value(&k, v)?,
            "min_eig" => self.min_eig = parse_value(&k, v)?,
            "max_it" => self.max_it = parse_value(&k, v)?,
            "sub_max_it" => self.sub_max_it = parse_value(&k, v)?,
            "sub_tol" => self.sub_tol = parse_value(&k, v)?,
            "tol" => self.tol = parse_value(&k, v)?,
            "inner_tol" => self.inner_tol = parse_value(&k, v)?,
            "inner_max_iter" => self.inner_max_iter = opt(&k, v)?,
            "seed" => self.seed = parse_value(&k, v)?,
            "parallel_inner" => self.parallel_inner = parse_bool(&k, v)?,
            "output" | "output_path" => self.output = opt(&k, v)?,
            "history" => self.history = opt(&k, v)?,
            "reference" => self.reference = opt(&k, v)?,
            "center" | "c" => self.center = opt(&k, v)?,
            "lambda_min" => self.lambda_min = parse_value(&k, v)?,
            "lambda_max" => self.lambda_max = parse_value(&k, v)?,
            "points" => self.points = parse_value(&k, v)?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse_kv(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        cfg.apply_kv(text)?;
        Ok(cfg)
    }

    pub fn apply_kv(&mut self, text: &str) -> Result<()> {
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", ln + 1))
            })?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_kv(&text)
    }

    pub fn radius_or_default(&self) -> f64 {
        self.radius.unwrap_or(0.5 * (self.b - self.a))
    }

    pub fn num_cmp_or_default(&self) -> usize {
        self.num_cmp.unwrap_or((self.m / 2).max(1))
    }

    pub fn num_out_or_default(&self) -> usize {
        self.num_out.unwrap_or_else(|| self.num_cmp_or_default())
    }

    pub fn f2p_config(&self) -> F2PConfig {
        F2PConfig {
            m: self.m,
            num_cmp: self.num_cmp_or_default(),
            num_out: self.num_out_or_default(),
            num_eigm: self.num_eigm,
            min_eig: self.min_eig,
            max_it: self.max_it,
            sub_max_it: self.sub_max_it,
            sub_tol: self.sub_tol,
            q: self.q,
            seed: self.seed,
        }
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            tol: self.inner_tol,
            max_iter: self.inner_max_iter,
            diag_precond: false,
            parallel: self.parallel_inner,
        }
    }

    pub fn interval_spec(&self) -> Result<IntervalSpec> {
        IntervalSpec::new(self.a, self.b, self.radius_or_default())
    }

    /// Rejects every invalid setting before any computation.
    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_ORDER).contains(&self.q) {
            return Err(Error::InvalidOrder(self.q));
        }
        if !(self.inner_tol > 0.0) {
            return Err(Error::Config("inner_tol must be positive".into()));
        }
        match self.algorithm {
            Algorithm::FilterScan => {
                if !(self.lambda_min < self.lambda_max) || self.points < 2 {
                    return Err(Error::Config(
                        "filter-scan needs lambda_min < lambda_max and points >= 2".into(),
                    ));
                }
                if self.center.is_none() && !(self.a < self.b) {
                    return Err(Error::Config("filter-scan needs a center or an interval".into()));
                }
                if let Some(r) = self.radius {
                    if !(r > 0.0) {
                        return Err(Error::Config("radius must be positive".into()));
                    }
                } else if self.center.is_some() {
                    return Err(Error::Config("filter-scan with a center needs a radius".into()));
                }
                return Ok(());
            }
            Algorithm::Psi => {
                if self.max_it < 1 || self.m < 1 {
                    return Err(Error::Config("psi needs m >= 1 and max_it >= 1".into()));
                }
            }
            _ => {
                self.interval_spec()?;
                if !(self.tol > 0.0) {
                    return Err(Error::Config("tol must be positive".into()));
                }
                self.f2p_config().validate()?;
            }
        }
        if self.matrix.trim().is_empty() {
            return Err(Error::Config("no matrix given".into()));
        }
        Ok(())
    }
}

/// Loads a matrix from a path or a bundled synthetic source.
pub fn load_matrix(source: &str) -> Result<SparseSymMatrix> {
    let size = |s: &str| -> Result<usize> {
        s.parse()
            .map_err(|e| Error::Config(format!("matrix `{source}`: {e}")))
    };
    if let Some(n) = source.strip_prefix("diag:") {
        let n = size(n)?;
        let d: Vec<f64> = (1..=n).map(|i| i as f64).collect();
        return Ok(SparseSymMatrix::from_diagonal(&d));
    }
    if let Some(n) = source.strip_prefix("laplacian:") {
        return Ok(SparseSymMatrix::laplacian_1d(size(n)?));
    }
    super::read_matrix_market(source)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kv_roundtrip_and_overrides() {
        let text = "matrix = diag:100\n# comment\nalgorithm = f2p\na = 89.5\nb = 100.5  # inline\nradius = 10\nm = 20\nnum_cmp = 10\nnum_out = 5\nparallel_inner = true\n";
        let mut cfg = RunConfig::parse_kv(text).unwrap();
        assert_eq!(cfg.matrix, "diag:100");
        assert_eq!(cfg.radius, Some(10.0));
        assert_eq!(cfg.num_out_or_default(), 5);
        assert!(cfg.parallel_inner);
        cfg.validate().unwrap();
        cfg.set("num-out", "11").unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn defaults_follow_block_width() {
        let cfg = RunConfig {
            m: 70,
            ..RunConfig::default()
        };
        assert_eq!(cfg.num_cmp_or_default(), 35);
        assert_eq!(cfg.num_out_or_default(), 35);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(RunConfig::parse_kv("bogus = 1").is_err());
        assert!(RunConfig::parse_kv("m = x").is_err());
        assert!(RunConfig::parse_kv("no equals sign").is_err());
        assert!(RunConfig::parse_kv("algorithm = lanczos").is_err());
        let cfg = RunConfig::parse_kv("matrix = diag:10\na = 2\nb = 1").unwrap();
        assert!(matches!(cfg.validate(), Err(Error::EmptyInterval { .. })));
        let cfg = RunConfig::parse_kv("matrix = diag:10\na = 0\nb = 4\nradius = 1").unwrap();
        assert!(matches!(cfg.validate(), Err(Error::CirclesDoNotCover { .. })));
        let cfg = RunConfig::parse_kv("matrix = diag:10\na = 0\nb = 4\nq = 65").unwrap();
        assert!(matches!(cfg.validate(), Err(Error::InvalidOrder(65))));
    }

    #[test]
    fn synthetic_sources() {
        let a = load_matrix("diag:5").unwrap();
        assert_eq!(a.diagonal(), vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        let l = load_matrix("laplacian:4").unwrap();
        assert_eq!(l.nnz(), 10);
        assert!(load_matrix("diag:x").is_err());
    }
}
