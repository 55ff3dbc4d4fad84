//! On-disk cache of sign tables and exact spectral coefficients.
//!
//! Layout under the cache root:
//!
//! ```text
//! legendre/<p>.txt        one line per k in 0..p, "+1" or "-1"
//! coeffs/<digest>.txt     one line per element, "<support> -> <num>/<den>"
//! ```
//!
//! A support is written as `n:r` pairs joined by commas, or `-` for zero.
//! Every write goes to a temporary file in the target directory and is then
//! renamed into place, so readers never see a partial file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use nonat_core::char_sums::{epsilon_table, LegendreTable};
use nonat_core::group::{GroupConfig, GroupElement};
use num_bigint::BigInt;
use num_rational::BigRational;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone)]
pub struct Cache {
    root: Option<PathBuf>,
}

impl Cache {
    pub fn new(root: Option<PathBuf>) -> Self {
        Self { root }
    }

    /// Legendre table for `p`, read from the cache when present and written
    /// to it otherwise. Cached tables are validated before use.
    pub fn legendre(&self, p: u64) -> Result<LegendreTable, CliError> {
        let Some(root) = &self.root else {
            return Ok(epsilon_table(p)?);
        };
        let path = root.join("legendre").join(format!("{p}.txt"));
        if path.exists() {
            let text = fs::read_to_string(&path).map_err(|e| CliError::io(path.display().to_string(), e))?;
            let values = parse_signs(&text).map_err(|message| CliError::Cache {
                path: path.clone(),
                message,
            })?;
            return LegendreTable::from_values(p, values).map_err(|e| CliError::Cache {
                path,
                message: e.to_string(),
            });
        }
        let table = epsilon_table(p)?;
        write_atomic(&path, &format_signs(table.values()))?;
        Ok(table)
    }

    pub fn legendre_tables(&self, cfg: &GroupConfig) -> Result<Vec<LegendreTable>, CliError> {
        cfg.primes().iter().map(|&p| self.legendre(p)).collect()
    }

    /// Exact coefficients for `elements`, computing only on a cache miss.
    pub fn coefficients(
        &self,
        cfg: &GroupConfig,
        elements: &[GroupElement],
        compute: impl FnOnce() -> Result<Vec<BigRational>, CliError>,
    ) -> Result<Vec<BigRational>, CliError> {
        let Some(root) = &self.root else {
            return compute();
        };
        let path = root.join("coeffs").join(format!("{}.txt", coeff_digest(cfg, elements)));
        if path.exists() {
            let text = fs::read_to_string(&path).map_err(|e| CliError::io(path.display().to_string(), e))?;
            return parse_coefficients(&text, elements).map_err(|message| CliError::Cache { path, message });
        }
        let values = compute()?;
        write_atomic(&path, &format_coefficients(elements, &values))?;
        Ok(values)
    }
}

fn coeff_digest(cfg: &GroupConfig, elements: &[GroupElement]) -> String {
    let mut h = Sha256::new();
    for p in cfg.primes() {
        h.update(format!("{p},"));
    }
    h.update("|");
    for g in elements {
        h.update(format_support(g));
        h.update(";");
    }
    hex::encode(h.finalize())
}

pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display().to_string(), e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir.display().to_string(), e))?;
    tmp.write_all(contents.as_bytes())
        .and_then(|_| tmp.as_file().sync_all())
        .map_err(|e| CliError::io(path.display().to_string(), e))?;
    tmp.persist(path)
        .map_err(|e| CliError::io(path.display().to_string(), e.error))?;
    Ok(())
}

pub fn format_signs(values: &[i8]) -> String {
    values.iter().map(|&v| if v > 0 { "+1\n" } else { "-1\n" }).collect()
}

pub fn parse_signs(text: &str) -> Result<Vec<i8>, String> {
    text.lines()
        .enumerate()
        .map(|(i, line)| match line.trim() {
            "+1" => Ok(1),
            "-1" => Ok(-1),
            other => Err(format!("line {}: expected +1 or -1, found {other:?}", i + 1)),
        })
        .collect()
}

pub fn format_support(g: &GroupElement) -> String {
    if g.is_zero() {
        return "-".into();
    }
    g.support()
        .iter()
        .map(|(n, r)| format!("{n}:{r}"))
        .collect::<Vec<_>>()
        .join(",")
}

pub fn format_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_rational(s: &str) -> Option<BigRational> {
    let (n, d) = s.split_once('/')?;
    let n: BigInt = n.trim().parse().ok()?;
    let d: BigInt = d.trim().parse().ok()?;
    (d != BigInt::from(0)).then(|| BigRational::new(n, d))
}

fn format_coefficients(elements: &[GroupElement], values: &[BigRational]) -> String {
    elements
        .iter()
        .zip(values)
        .map(|(g, v)| format!("{} -> {}\n", format_support(g), format_rational(v)))
        .collect()
}

fn parse_coefficients(text: &str, elements: &[GroupElement]) -> Result<Vec<BigRational>, String> {
    let lines: Vec<&str> = text.lines().collect();
    if lines.len() != elements.len() {
        return Err(format!("expected {} lines, found {}", elements.len(), lines.len()));
    }
    lines
        .iter()
        .zip(elements)
        .enumerate()
        .map(|(i, (line, g))| {
            let (support, value) = line
                .split_once(" -> ")
                .ok_or_else(|| format!("line {}: missing \" -> \"", i + 1))?;
            if support != format_support(g) {
                return Err(format!(
                    "line {}: element {support} does not match {}",
                    i + 1,
                    format_support(g)
                ));
            }
            parse_rational(value).ok_or_else(|| format!("line {}: bad rational {value:?}", i + 1))
        })
        .collect()
}
