//! Fourier coefficients of the spectral measure `σ_0` of `1_{P_0} - 1_{P_1}`,
//! bounds on its density with respect to Haar measure, and the resulting
//! non-AT verdict.
//!
//! Two routes compute `σ̂_0(g)`. The direct route integrates the cocycle:
//! `σ̂_0(g) = ∫ φ_g dμ`, which factors over the support of `g` into exact
//! autocorrelations of the sign tables. The product route takes Fourier
//! coefficients of the evaluated densities `|P_n|²`. They agree exactly in
//! theory and are kept computationally independent.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::char_sums::{autocorrelation_numerator, epsilon_table, flatness_report_for, DensityFactor, FlatnessReport};
use crate::cocycle::{flip, skew_step, CocycleContext, ExtensionPoint};
use crate::error::{Error, Result};
use crate::group::{enumerate_level_group, GroupElement, Mode, TruncatedPoint};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralCoefficient {
    pub element: GroupElement,
    pub value: BigRational,
}

/// `σ̂_0(g) = ∏_{n ∈ supp g} c_{p_n}(g_n)`, exactly.
pub fn fourier_coeff_direct(g: &GroupElement, ctx: &CocycleContext) -> Result<SpectralCoefficient> {
    g.validate(ctx.config())?;
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for &(n, r) in g.support() {
        num *= autocorrelation_numerator(ctx.table(n), r);
        den *= ctx.config().prime(n);
    }
    Ok(SpectralCoefficient {
        element: g.clone(),
        value: BigRational::new(num, den),
    })
}

/// The evaluated densities `|P_n|²` for every retained coordinate.
#[derive(Debug, Clone)]
pub struct ProductRoute {
    factors: Vec<DensityFactor>,
}

impl ProductRoute {
    pub fn new(ctx: &CocycleContext) -> Self {
        Self {
            factors: ctx.tables().iter().map(DensityFactor::new).collect(),
        }
    }

    pub fn factor(&self, n: usize) -> &DensityFactor {
        &self.factors[n]
    }

    /// Fourier coefficient at `g` of `⊗_n |P_n|² m_{Z/p_n}`.
    pub fn coefficient(&self, g: &GroupElement) -> Result<f64> {
        let mut value = 1.0;
        for &(n, r) in g.support() {
            let factor = self.factors.get(n).ok_or(Error::CoordinateOutOfLevel {
                index: n,
                level: self.factors.len(),
            })?;
            if r >= factor.prime() {
                return Err(Error::ResidueNotReduced {
                    index: n,
                    residue: r,
                    prime: factor.prime(),
                });
            }
            value *= factor.fourier(r);
        }
        Ok(value)
    }
}

/// Product-route coefficient, building only the factors `g` touches.
pub fn fourier_coeff_product(g: &GroupElement, ctx: &CocycleContext) -> Result<f64> {
    g.validate(ctx.config())?;
    Ok(g.support()
        .iter()
        .map(|&(n, r)| DensityFactor::new(ctx.table(n)).fourier(r))
        .product())
}

/// `x ↦ ∏_{k<n} |P_k(x_k)|²` tabulated over `G_n` in enumeration order.
#[derive(Debug, Clone)]
pub struct DensityMarginal {
    pub level: usize,
    pub values: Vec<f64>,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl DensityMarginal {
    /// Each truncated point of the level-`n` tower paired with its density value.
    pub fn points<'a>(&'a self, ctx: &'a CocycleContext) -> impl Iterator<Item = (TruncatedPoint, f64)> + 'a {
        let cfg = ctx.config();
        enumerate_level_group(self.level, cfg)
            .expect("level was validated on construction")
            .zip(self.values.iter().copied())
            .map(move |(g, v)| (TruncatedPoint::new(g.to_dense(cfg.level()), cfg).expect("in range"), v))
    }
}

pub fn density_marginal(n: usize, ctx: &CocycleContext, budget: u128) -> Result<DensityMarginal> {
    let cfg = ctx.config();
    if n > cfg.level() {
        return Err(Error::LevelTooLarge {
            requested: n,
            level: cfg.level(),
        });
    }
    let size = cfg.level_order(n).unwrap_or(u128::MAX);
    if size > budget {
        return Err(Error::BudgetExceeded { required: size, budget });
    }
    let mut values = vec![1.0f64];
    for k in 0..n {
        let density = DensityFactor::new(ctx.table(k));
        values = values
            .iter()
            .flat_map(|&v| density.density().iter().map(move |&d| v * d))
            .collect();
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(0.0, f64::max);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    Ok(DensityMarginal {
        level: n,
        values,
        min,
        max,
        mean,
    })
}

/// `exp(a / (1 - a))`, an upper bound for `∏_{n>=1} (1 + a^n)` when `0 < a < 1`.
pub fn geometric_tail_bound(a: f64) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::OutOfRange("geometric ratio"));
    }
    Ok(libm::exp(a / (1.0 - a)))
}

/// `∏_{n=1}^{terms} (1 + a^n)`.
pub fn geometric_partial_product(a: f64, terms: u32) -> f64 {
    (1..=terms).map(|n| 1.0 + libm::pow(a, n as f64)).product()
}

/// Bound on `∏_{n>=split} (1 + p_n^{-1/2})²` when every such `p_n` satisfies
/// `√p_n >= 5^{n+1}`: with `ln(1+t) <= t` the product is at most
/// `exp(2 Σ_{n>=split} 5^{-(n+1)}) = exp(5^{-split} / 2)`.
pub fn theorem_tail_bound(split: usize) -> f64 {
    libm::exp(0.5 * libm::pow(5.0, -(split as f64)))
}

/// How coordinates at and beyond the split level are bounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailRule {
    /// Every coordinate obeys `p_n >= 5^{2(n+1)}`.
    Theorem,
    /// A caller-supplied bound on `∏_{n>=split} (1 + p_n^{-1/2})²`.
    Explicit(f64),
    Unavailable,
}

impl TailRule {
    pub fn for_config(ctx: &CocycleContext) -> Self {
        match ctx.config().mode() {
            Mode::TheoremGrade => TailRule::Theorem,
            Mode::Experimental => TailRule::Unavailable,
        }
    }
}

/// Relative allowance applied to each scanned `max |P_n|²` for rounding in the transform.
pub const SCAN_ROUNDING: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateStatus {
    Certified,
    /// Conclusive bound, but not below 2.
    NotCertified,
    /// No tail hypothesis; nothing is claimed.
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct DensityCertificate {
    pub split_level: usize,
    pub scans: Vec<FlatnessReport>,
    /// `∏_{n<split} max_x |P_n(x)|²`.
    pub finite_sup: f64,
    /// `∏_{n<split} (1 + p_n^{-1/2})²`, the window-based bound on the same factors.
    pub finite_window: f64,
    pub tail_bound: Option<f64>,
    pub total_bound: Option<f64>,
    pub status: CertificateStatus,
}

impl DensityCertificate {
    pub fn sbh_certified(&self) -> bool {
        self.status == CertificateStatus::Certified
    }
}

/// Upper bound on `‖dσ_0 / dm_X‖_∞`: exact scans below `split_level`, an
/// analytic bound above it.
pub fn density_certificate(ctx: &CocycleContext, split_level: usize, rule: TailRule) -> Result<DensityCertificate> {
    let cfg = ctx.config();
    if split_level > cfg.level() {
        return Err(Error::LevelTooLarge {
            requested: split_level,
            level: cfg.level(),
        });
    }
    let mut scans = Vec::with_capacity(split_level);
    for &p in &cfg.primes()[..split_level] {
        let table = epsilon_table(p)?;
        scans.push(flatness_report_for(&table)?);
    }
    let finite_sup = scans
        .iter()
        .map(|s| s.sup_density * (1.0 + SCAN_ROUNDING))
        .product::<f64>();
    let finite_window = scans
        .iter()
        .map(|s| {
            let w = 1.0 + 1.0 / libm::sqrt(s.prime as f64);
            w * w
        })
        .product();
    let tail_bound = match rule {
        TailRule::Theorem if cfg.mode() == Mode::TheoremGrade => Some(theorem_tail_bound(split_level)),
        TailRule::Theorem | TailRule::Unavailable => None,
        TailRule::Explicit(b) if b >= 1.0 && b.is_finite() => Some(b),
        TailRule::Explicit(_) => return Err(Error::OutOfRange("explicit tail bound")),
    };
    let total_bound = tail_bound.map(|t| finite_sup * t);
    let status = match total_bound {
        None => CertificateStatus::Inconclusive,
        Some(t) if t < 2.0 => CertificateStatus::Certified,
        Some(_) => CertificateStatus::NotCertified,
    };
    Ok(DensityCertificate {
        split_level,
        scans,
        finite_sup,
        finite_window,
        tail_bound,
        total_bound,
        status,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    NonAtCertified,
    Inconclusive,
}

/// Statements reported alongside a verdict but never computed.
pub const CITED_FACTS: [&str; 3] = [
    "the representation on the odd subspace L1 has simple spectrum for every Morse cocycle (Guenais)",
    "purity law: the spectral type on L1 is discrete, continuous singular, or Haar (Helson)",
    "the base translation action is ergodic (assumed)",
];

#[derive(Debug, Clone)]
pub struct SbhVerdict {
    pub certificate: DensityCertificate,
    /// The flip `S` commutes with every sampled skew-product step.
    pub flip_commutes: bool,
    pub verdict: Verdict,
    pub reasons: Vec<String>,
}

const FLIP_SAMPLES: usize = 256;
const FLIP_SEED: u64 = 0x666c_6970;

/// Bundles the density certificate with the structural preconditions of the
/// non-AT criterion: a measure-preserving `S` commuting with the action and
/// swapping `P_0` and `P_1`, and `σ_0` being SBH.
pub fn sbh_verdict(ctx: &CocycleContext, certificate: DensityCertificate) -> Result<SbhVerdict> {
    let cfg = ctx.config();
    let mut rng = ChaCha8Rng::seed_from_u64(FLIP_SEED);
    let mut flip_commutes = true;
    for _ in 0..FLIP_SAMPLES {
        let base: Vec<u64> = cfg.primes().iter().map(|&p| rng.random_range(0..p)).collect();
        let g: Vec<u64> = cfg.primes().iter().map(|&p| rng.random_range(0..p)).collect();
        let fiber = if rng.random::<bool>() { 1 } else { -1 };
        let pt = ExtensionPoint::new(TruncatedPoint::new(base, cfg)?, fiber)?;
        let g = GroupElement::from_dense(&g, cfg)?;
        let a = skew_step(&flip(&pt), &g, ctx)?;
        let b = flip(&skew_step(&pt, &g, ctx)?);
        flip_commutes &= a == b && flip(&pt).in_p0() != pt.in_p0();
    }

    let mut reasons = Vec::new();
    if !flip_commutes {
        reasons.push(String::from("flip map failed to commute with the skew product"));
    }
    match (certificate.status, certificate.total_bound) {
        (CertificateStatus::Certified, Some(t)) => {
            reasons.push(format!("density of sigma_0 bounded by {t:.6} < 2, so sigma_0 is SBH"))
        }
        (CertificateStatus::NotCertified, Some(t)) => reasons.push(format!(
            "density bound {t:.6} is not below 2; the sufficient condition does not apply"
        )),
        _ => reasons.push(String::from(
            "no tail hypothesis for coordinates beyond the split level; density bound unavailable",
        )),
    }
    let verdict = if flip_commutes && certificate.sbh_certified() {
        Verdict::NonAtCertified
    } else {
        Verdict::Inconclusive
    };
    Ok(SbhVerdict {
        certificate,
        flip_commutes,
        verdict,
        reasons,
    })
}
