//! Run configuration: an optional flat key-value file overlaid by command-line
//! flags.

use std::fs;
use std::path::{Path, PathBuf};

use nonat_core::group::{GroupConfig, Mode};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimeSpec {
    Explicit(Vec<u64>),
    /// `theorem:<count>`: the least primes `p_n >= 5^(2(n+1))`.
    Theorem(usize),
}

impl PrimeSpec {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        if let Some(count) = s.strip_prefix("theorem:") {
            let count = count
                .trim()
                .parse()
                .map_err(|_| CliError::usage("primes", format!("bad theorem count in {s:?}")))?;
            return Ok(PrimeSpec::Theorem(count));
        }
        let primes = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| CliError::usage("primes", format!("malformed entry {:?}", t.trim())))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PrimeSpec::Explicit(primes))
    }

    pub fn group_config(&self) -> Result<GroupConfig, CliError> {
        let cfg = match self {
            PrimeSpec::Explicit(p) => GroupConfig::new(p, Mode::Experimental),
            PrimeSpec::Theorem(0) => return Err(CliError::usage("theorem", "count must be at least 1".into())),
            PrimeSpec::Theorem(count) => GroupConfig::theorem(*count),
        };
        cfg.map_err(|e| CliError::usage("primes", e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchConfig {
    pub k_max: usize,
    pub budget: Option<u128>,
    pub seed: u64,
    pub restarts: usize,
}

/// Fully resolved configuration for one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub primes: PrimeSpec,
    pub level: Option<usize>,
    pub tolerance_numeric: f64,
    pub tolerance_transcendental: f64,
    pub search: SearchConfig,
    pub epsilon: Option<String>,
    pub split_level: Option<usize>,
    pub tail_bound: Option<f64>,
    pub elements: Option<String>,
    pub max_prime: u64,
    #[serde(skip)]
    pub histogram_out: Option<PathBuf>,
    #[serde(skip)]
    pub cache_dir: Option<PathBuf>,
    #[serde(skip)]
    pub output: OutputFormat,
}

/// Keys accepted in a configuration file. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub primes: Option<String>,
    pub theorem: Option<usize>,
    pub level: Option<usize>,
    pub tolerance_numeric: Option<f64>,
    pub tolerance_transcendental: Option<f64>,
    pub k_max: Option<usize>,
    pub budget: Option<u64>,
    pub seed: Option<u64>,
    pub restarts: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub epsilon: Option<String>,
    pub split_level: Option<usize>,
    pub tail_bound: Option<f64>,
    pub elements: Option<String>,
    pub max_prime: Option<u64>,
    pub histogram_out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text =
            fs::read_to_string(path).map_err(|e| CliError::usage("config", format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::usage("config", e.message().to_string()))
    }
}

/// Flag values; `None` means "not given on the command line".
#[derive(Debug, Default, Clone, clap::Args)]
pub struct Flags {
    /// Configuration file with flat `key = value` lines
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated increasing odd primes, or `theorem:<count>`
    #[arg(long, conflicts_with = "theorem")]
    pub primes: Option<String>,
    /// Use the least primes with p_n >= 5^(2(n+1)) for n < COUNT
    #[arg(long, value_name = "COUNT")]
    pub theorem: Option<usize>,
    /// Tower level n (names, coeffs, sbh-search)
    #[arg(long)]
    pub level: Option<usize>,
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Work budget: exhaustive probes for sbh-search, names for names, points for coeffs
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Ball radius for the name diagnostic, as `a/b` or a decimal
    #[arg(long)]
    pub epsilon: Option<String>,
    #[arg(long)]
    pub tolerance_numeric: Option<f64>,
    #[arg(long)]
    pub tolerance_transcendental: Option<f64>,
    /// Coordinates below this level are scanned exactly (certify)
    #[arg(long)]
    pub split_level: Option<usize>,
    /// Caller-supplied bound on the density tail beyond the split level (certify)
    #[arg(long)]
    pub tail_bound: Option<f64>,
    /// `level:<n>` or `;`-separated residue vectors such as `1,0;1,1` (coeffs)
    #[arg(long)]
    pub elements: Option<String>,
    /// Upper limit for the prime range of gauss-check
    #[arg(long)]
    pub max_prime: Option<u64>,
    /// Write the name-distance histogram as CSV to this path (names)
    #[arg(long)]
    pub histogram_out: Option<PathBuf>,
}

impl RunConfig {
    /// Merges the optional config file with flags; flags take precedence.
    pub fn resolve(flags: &Flags) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let primes = match (&flags.primes, flags.theorem) {
            (Some(p), _) => PrimeSpec::parse(p)?,
            (None, Some(t)) => PrimeSpec::Theorem(t),
            (None, None) => match (&file.primes, file.theorem) {
                (Some(_), Some(_)) => {
                    return Err(CliError::usage("primes", "config sets both primes and theorem".into()))
                }
                (Some(p), None) => PrimeSpec::parse(p)?,
                (None, Some(t)) => PrimeSpec::Theorem(t),
                (None, None) => PrimeSpec::Theorem(3),
            },
        };
        let cfg = RunConfig {
            primes,
            level: flags.level.or(file.level),
            tolerance_numeric: flags.tolerance_numeric.or(file.tolerance_numeric).unwrap_or(1e-12),
            tolerance_transcendental: flags
                .tolerance_transcendental
                .or(file.tolerance_transcendental)
                .unwrap_or(1e-9),
            search: SearchConfig {
                k_max: flags.k_max.or(file.k_max).unwrap_or(4),
                budget: flags.budget.or(file.budget).map(u128::from),
                seed: flags.seed.or(file.seed).unwrap_or(0),
                restarts: flags.restarts.or(file.restarts).unwrap_or(32),
            },
            epsilon: flags.epsilon.clone().or(file.epsilon),
            split_level: flags.split_level.or(file.split_level),
            tail_bound: flags.tail_bound.or(file.tail_bound),
            elements: flags.elements.clone().or(file.elements),
            max_prime: flags.max_prime.or(file.max_prime).unwrap_or(500),
            histogram_out: flags.histogram_out.clone().or(file.histogram_out),
            cache_dir: flags.cache_dir.clone().or(file.cache_dir),
            output: flags.format.or(file.format).unwrap_or(OutputFormat::Json),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.tolerance_numeric.is_nan() || self.tolerance_numeric <= 0.0 {
            return Err(CliError::usage("tolerance_numeric", "must be positive".into()));
        }
        if self.tolerance_transcendental.is_nan() || self.tolerance_transcendental <= 0.0 {
            return Err(CliError::usage("tolerance_transcendental", "must be positive".into()));
        }
        if self.search.k_max == 0 {
            return Err(CliError::usage("k_max", "must be at least 1".into()));
        }
        if self.search.restarts == 0 {
            return Err(CliError::usage("restarts", "must be at least 1".into()));
        }
        if let Some(e) = &self.epsilon {
            parse_ratio(e).map_err(|m| CliError::usage("epsilon", m))?;
        }
        if let Some(t) = self.tail_bound {
            if !(t >= 1.0 && t.is_finite()) {
                return Err(CliError::usage("tail_bound", "must be a finite number >= 1".into()));
            }
        }
        Ok(())
    }

    /// SHA-256 over the canonical JSON form of the configuration.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

/// Parses `a/b`, an integer, or a plain decimal such as `0.05`.
pub fn parse_ratio(s: &str) -> Result<Ratio<u64>, String> {
    let s = s.trim();
    let bad = || format!("cannot parse {s:?} as a non-negative rational");
    if let Some((n, d)) = s.split_once('/') {
        let n: u64 = n.trim().parse().map_err(|_| bad())?;
        let d: u64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.len() > 18 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let den = 10u64.pow(frac.len() as u32);
        let num: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        let whole = int.checked_mul(den).and_then(|w| w.checked_add(num)).ok_or_else(bad)?;
        return Ok(Ratio::new(whole, den));
    }
    s.parse::<u64>().map(Ratio::from_integer).map_err(|_| bad())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_specs() {
        assert_eq!(
            PrimeSpec::parse("5, 7,11").unwrap(),
            PrimeSpec::Explicit(vec![5, 7, 11])
        );
        assert_eq!(PrimeSpec::parse("theorem:3").unwrap(), PrimeSpec::Theorem(3));
        assert!(PrimeSpec::parse("5,x").is_err());
        assert!(PrimeSpec::parse("5,9").unwrap().group_config().is_err());
        assert!(PrimeSpec::Theorem(0).group_config().is_err());
    }

    #[test]
    fn ratios() {
        assert_eq!(parse_ratio("1/20").unwrap(), Ratio::new(1, 20));
        assert_eq!(parse_ratio("0.05").unwrap(), Ratio::new(1, 20));
        assert_eq!(parse_ratio("1").unwrap(), Ratio::from_integer(1));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("-1").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(&path, "primes = \"5,7\"\nseed = 3\nk_max = 2\n").unwrap();
        let flags = Flags {
            config: Some(path.clone()),
            seed: Some(9),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(&flags).unwrap();
        assert_eq!(cfg.primes, PrimeSpec::Explicit(vec![5, 7]));
        assert_eq!(cfg.search.seed, 9);
        assert_eq!(cfg.search.k_max, 2);

        fs::write(&path, "unknown_key = 1\n").unwrap();
        assert!(RunConfig::resolve(&flags).is_err());
    }
}
