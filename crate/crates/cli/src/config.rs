//! Run configuration: defaults, a flat `key = value` file, then flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use qdirac::qscalar::QParam;
use qdirac::{Hp, HalfInt};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub q: String,
    pub precision: u32,
    /// SU_q(2) and U_q(2) truncation.
    pub j_max: HalfInt,
    /// Podleś truncation.
    pub l_max: HalfInt,
    pub c_max: HalfInt,
    /// Truncation for the F_q power-law fit, which needs a longer spectrum.
    pub fredholm_j_max: HalfInt,
    pub probe_order: u32,
    pub t_grid: usize,
    /// Random b₊ samples for the SU_q(3) covariance check.
    pub samples: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub golden: Option<PathBuf>,
    pub timings: bool,
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            q: "0.5".into(),
            precision: QParam::<Hp>::max_bits(),
            j_max: HalfInt::int(4),
            l_max: HalfInt::from_twice(7),
            c_max: HalfInt::int(6),
            fredholm_j_max: HalfInt::int(6),
            probe_order: 2,
            t_grid: 11,
            samples: 4,
            format: Format::Json,
            out: None,
            golden: None,
            timings: false,
            tolerances: BTreeMap::new(),
        }
    }
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

fn half(key: &str, v: &str) -> Result<HalfInt, ConfigError> {
    match v.parse::<HalfInt>() {
        Ok(h) if h.twice() >= 0 => Ok(h),
        _ => err(format!("{key}: expected a non-negative half-integer, got {v:?}")),
    }
}

fn number<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse().or_else(|_| err(format!("{key}: cannot parse {v:?}")))
}

impl RunConfig {
    /// Apply one setting; keys are the long flag names.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value.trim();
        match key {
            "q" => self.q = v.to_string(),
            "precision" => self.precision = number(key, v)?,
            "jmax" => self.j_max = half(key, v)?,
            "lmax" => self.l_max = half(key, v)?,
            "cmax" => self.c_max = half(key, v)?,
            "fredholm-jmax" => self.fredholm_j_max = half(key, v)?,
            "probe-order" => self.probe_order = number(key, v)?,
            "t-grid" => self.t_grid = number(key, v)?,
            "samples" => self.samples = number(key, v)?,
            "format" => {
                self.format = match v {
                    "json" => Format::Json,
                    "csv" => Format::Csv,
                    _ => return err(format!("format: expected json or csv, got {v:?}")),
                }
            }
            "out" => self.out = Some(PathBuf::from(v)),
            "golden" => self.golden = Some(PathBuf::from(v)),
            "timings" => self.timings = number(key, v)?,
            _ => match key.strip_prefix("tol.") {
                Some(check) if !check.is_empty() => {
                    self.tolerances.insert(check.to_string(), number(key, v)?);
                }
                _ => return err(format!("unknown key {key:?}")),
            },
        }
        Ok(())
    }

    /// Settings from a flat text file: `key = value`, `#` comments. An empty file is an error.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path).or_else(|e| err(format!("{}: {e}", path.display())))?;
        let mut seen = 0;
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return err(format!("{}:{}: expected key = value", path.display(), n + 1));
            };
            self.set(k.trim(), v).map_err(|e| ConfigError(format!("{}:{}: {e}", path.display(), n + 1)))?;
            seen += 1;
        }
        if seen == 0 {
            return err(format!("{}: config file has no settings", path.display()));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.qparam()?;
        if self.probe_order == 0 || self.probe_order > 3 {
            return err("probe-order must be 1, 2 or 3");
        }
        if self.t_grid < 2 {
            return err("t-grid needs at least two points");
        }
        if self.samples == 0 {
            return err("samples must be positive");
        }
        if self.j_max.twice() < 2 || self.fredholm_j_max.twice() < 2 {
            return err("jmax must be at least 1");
        }
        if self.c_max.twice() < 2 {
            return err("cmax must be at least 1");
        }
        if self.l_max.is_integer() || self.l_max.twice() < 3 {
            return err("lmax must be a half-odd integer of at least 3/2");
        }
        for (k, t) in &self.tolerances {
            if !(t.is_finite() && *t > 0.0) {
                return err(format!("tolerance for {k} must be positive"));
            }
        }
        Ok(())
    }

    pub fn qparam(&self) -> Result<QParam<Hp>, ConfigError> {
        QParam::with_precision(&self.q, self.precision).map_err(|e| ConfigError(e.to_string()))
    }

    pub fn tolerance(&self, check: &str, default: f64) -> f64 {
        self.tolerances.get(check).copied().unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn file_then_flags() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "# comment\nq = 0.7\njmax = 5/2\ntol.su2.spectrum = 1e-18\n").unwrap();
        let mut c = RunConfig::default();
        c.apply_file(f.path()).unwrap();
        assert_eq!(c.q, "0.7");
        assert_eq!(c.j_max.twice(), 5);
        assert_eq!(c.tolerance("su2.spectrum", 1.0), 1e-18);
        c.set("q", "0.3").unwrap();
        assert_eq!(c.q, "0.3");
        c.validate().unwrap();
    }

    #[test]
    fn rejects_bad_input() {
        let f = tempfile::NamedTempFile::new().unwrap();
        assert!(RunConfig::default().apply_file(f.path()).is_err());
        let mut c = RunConfig::default();
        assert!(c.set("bogus", "1").is_err());
        assert!(c.set("jmax", "-1").is_err());
        c.set("q", "1.5").unwrap();
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.set("tol.x", "-1").unwrap();
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.set("precision", "32").unwrap();
        assert!(c.validate().is_err());
    }
}
