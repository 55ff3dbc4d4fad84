//! The Morse cocycle `φ_g(x) = ∏_n ε_n(x_n) ε_n(x_n + g_n)` and the skew
//! product it defines on `X × {-1, 1}`.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::char_sums::{epsilon_table, SignTable};
use crate::error::{Error, Result};
use crate::group::{add, translate, GroupConfig, GroupElement, TruncatedPoint};

/// Scans of at most this many points are exhaustive; larger ones are sampled.
pub const EXHAUSTIVE_SCAN_LIMIT: u128 = 1_000_000;
const SAMPLED_SCAN_POINTS: usize = 4096;
const SAMPLED_SCAN_SEED: u64 = 0x6c65_7665_6c73;

#[derive(Debug, Clone)]
pub struct CocycleContext {
    cfg: GroupConfig,
    tables: Vec<SignTable>,
}

impl CocycleContext {
    /// The Legendre cocycle: `ε_n(k) = (k/p_n)`, `ε_n(0) = 1`.
    pub fn legendre(cfg: &GroupConfig) -> Result<Self> {
        let tables = cfg
            .primes()
            .iter()
            .map(|&p| epsilon_table(p).map(|t| t.into_inner()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            cfg: cfg.clone(),
            tables,
        })
    }

    /// Any `±1` tables with `ε_n(0) = 1`, one per coordinate.
    pub fn with_tables(cfg: &GroupConfig, tables: Vec<SignTable>) -> Result<Self> {
        if tables.len() != cfg.level() {
            return Err(Error::ShapeMismatch {
                expected: cfg.level(),
                got: tables.len(),
            });
        }
        for (index, (t, &p)) in tables.iter().zip(cfg.primes()).enumerate() {
            if t.prime() != p {
                return Err(Error::NotPrime {
                    index,
                    value: t.prime(),
                });
            }
        }
        Ok(Self {
            cfg: cfg.clone(),
            tables,
        })
    }

    pub fn config(&self) -> &GroupConfig {
        &self.cfg
    }

    pub fn tables(&self) -> &[SignTable] {
        &self.tables
    }

    pub fn table(&self, n: usize) -> &SignTable {
        &self.tables[n]
    }
}

/// `φ_g(x)`. Coordinates outside the support of `g` contribute `ε(x_n)² = 1`
/// and are skipped.
pub fn phi(x: &TruncatedPoint, g: &GroupElement, ctx: &CocycleContext) -> Result<i8> {
    if x.len() != ctx.cfg.level() {
        return Err(Error::ShapeMismatch {
            expected: ctx.cfg.level(),
            got: x.len(),
        });
    }
    g.validate(&ctx.cfg)?;
    Ok(phi_unchecked(x.coords(), g, ctx))
}

#[inline]
fn phi_unchecked(x: &[u64], g: &GroupElement, ctx: &CocycleContext) -> i8 {
    g.support().iter().fold(1i8, |acc, &(n, r)| {
        let t = &ctx.tables[n];
        acc * t.get(x[n]) * t.get(x[n] + r)
    })
}

/// `φ_g(0) = ∏_k ε_k(g_k)`.
pub fn phi_at_zero(g: &GroupElement, ctx: &CocycleContext) -> Result<i8> {
    g.validate(&ctx.cfg)?;
    Ok(g.support().iter().fold(1i8, |acc, &(n, r)| acc * ctx.tables[n].get(r)))
}

/// `φ(x, g + g') = φ(x, g) φ(T_g x, g')`.
pub fn check_cocycle_identity(
    x: &TruncatedPoint,
    g: &GroupElement,
    g2: &GroupElement,
    ctx: &CocycleContext,
) -> Result<bool> {
    let sum = add(g, g2, &ctx.cfg)?;
    let lhs = phi(x, &sum, ctx)?;
    let moved = translate(x, g, &ctx.cfg)?;
    Ok(lhs == phi(x, g, ctx)? * phi(&moved, g2, ctx)?)
}

/// Checks that `φ_g` is constant on the level `T_h F_n` and equal to
/// `φ_{g+h}(0) φ_h(0)` there, for `g, h ∈ G_n`. Exhaustive when the level has
/// at most [`EXHAUSTIVE_SCAN_LIMIT`] truncated points, sampled otherwise.
pub fn check_level_constancy(n: usize, g: &GroupElement, h: &GroupElement, ctx: &CocycleContext) -> Result<bool> {
    let cfg = &ctx.cfg;
    if n > cfg.level() {
        return Err(Error::LevelTooLarge {
            requested: n,
            level: cfg.level(),
        });
    }
    if !g.in_level(n) || !h.in_level(n) {
        return Err(Error::NotInLevelGroup { level: n });
    }
    let expected = phi_at_zero(&add(g, h, cfg)?, ctx)? * phi_at_zero(h, ctx)?;

    let free = &cfg.primes()[n..];
    let level_size = free.iter().try_fold(1u128, |acc, &p| acc.checked_mul(p as u128));
    let mut x = h.to_dense(cfg.level());

    match level_size {
        Some(size) if size <= EXHAUSTIVE_SCAN_LIMIT => {
            // odometer over the free coordinates
            loop {
                if phi_unchecked(&x, g, ctx) != expected {
                    return Ok(false);
                }
                let mut pos = cfg.level();
                loop {
                    if pos == n {
                        return Ok(true);
                    }
                    pos -= 1;
                    x[pos] += 1;
                    if x[pos] < cfg.prime(pos) {
                        break;
                    }
                    x[pos] = 0;
                }
            }
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(SAMPLED_SCAN_SEED);
            for _ in 0..SAMPLED_SCAN_POINTS {
                for (k, &p) in free.iter().enumerate() {
                    x[n + k] = rng.random_range(0..p);
                }
                if phi_unchecked(&x, g, ctx) != expected {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// A point `(x, γ)` of the `Z_2`-extension.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtensionPoint {
    pub base: TruncatedPoint,
    fiber: i8,
}

impl ExtensionPoint {
    pub fn new(base: TruncatedPoint, fiber: i8) -> Result<Self> {
        if fiber != 1 && fiber != -1 {
            return Err(Error::OutOfRange("fiber"));
        }
        Ok(Self { base, fiber })
    }

    pub fn fiber(&self) -> i8 {
        self.fiber
    }

    /// True iff the point lies in `P_0 = X × {1}`.
    pub fn in_p0(&self) -> bool {
        self.fiber == 1
    }
}

/// `(x, γ) ↦ (T_g x, φ_g(x) γ)`.
pub fn skew_step(pt: &ExtensionPoint, g: &GroupElement, ctx: &CocycleContext) -> Result<ExtensionPoint> {
    let sign = phi(&pt.base, g, ctx)?;
    Ok(ExtensionPoint {
        base: translate(&pt.base, g, &ctx.cfg)?,
        fiber: sign * pt.fiber,
    })
}

/// The fiber flip `S(x, γ) = (x, -γ)`, which maps `P_0` onto `P_1`.
pub fn flip(pt: &ExtensionPoint) -> ExtensionPoint {
    ExtensionPoint {
        base: pt.base.clone(),
        fiber: -pt.fiber,
    }
}
