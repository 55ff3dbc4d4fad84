//! Funny words, Hamming distances and the `P`-names of the `Z_2`-extension
//! restricted to `Λ = G_n`.
//!
//! For `g, h ∈ G_n` the cocycle `φ_g` is constant on the level `T_h F_n`, so
//! every point of `T_h F_n × {γ}` carries the same name on `Λ = G_n`:
//! bit `g` is `0` iff `φ_{g+h}(0) φ_h(0) γ = 1`. The `2|G_n|` names and their
//! pairwise distances are therefore finite, exact objects.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_rational::Ratio;

use crate::cocycle::{phi_at_zero, CocycleContext};
use crate::error::{Error, Result};
use crate::group::{enumerate_level_group, level_index, GroupElement};

/// A `{0,1}`-word indexed by a finite subset `Λ` of `G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunnyWord {
    domain: Arc<[GroupElement]>,
    bits: Vec<u8>,
}

impl FunnyWord {
    pub fn new(domain: Arc<[GroupElement]>, bits: Vec<u8>) -> Result<Self> {
        if domain.len() != bits.len() {
            return Err(Error::ShapeMismatch {
                expected: domain.len(),
                got: bits.len(),
            });
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::OutOfRange("word bit"));
        }
        let mut sorted = domain.to_vec();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DuplicateElement);
        }
        Ok(Self { domain, bits })
    }

    pub fn domain(&self) -> &[GroupElement] {
        &self.domain
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn complement(&self) -> Self {
        Self {
            domain: self.domain.clone(),
            bits: self.bits.iter().map(|b| 1 - b).collect(),
        }
    }
}

/// Normalized Hamming distance `|{g ∈ Λ : W_g ≠ W'_g}| / |Λ|`.
pub fn hamming(w1: &FunnyWord, w2: &FunnyWord) -> Result<Ratio<u64>> {
    if !Arc::ptr_eq(&w1.domain, &w2.domain) && w1.domain != w2.domain {
        return Err(Error::DomainMismatch);
    }
    if w1.is_empty() {
        return Err(Error::OutOfRange("empty word"));
    }
    let differing = w1.bits.iter().zip(&w2.bits).filter(|(a, b)| a != b).count() as u64;
    Ok(Ratio::new(differing, w1.len() as u64))
}

/// `v ↦ φ_v(0)` over `G_n` in enumeration order.
fn level_signs(n: usize, ctx: &CocycleContext) -> Vec<i8> {
    let mut signs = alloc::vec![1i8];
    for k in 0..n {
        let t = ctx.table(k);
        signs = signs
            .iter()
            .flat_map(|&s| t.values().iter().map(move |&e| s * e))
            .collect();
    }
    signs
}

fn level_domain(n: usize, ctx: &CocycleContext) -> Result<Arc<[GroupElement]>> {
    Ok(enumerate_level_group(n, ctx.config())?.collect::<Vec<_>>().into())
}

fn check_gamma(gamma: i8) -> Result<()> {
    if gamma != 1 && gamma != -1 {
        return Err(Error::OutOfRange("fiber sign"));
    }
    Ok(())
}

/// The common name on `Λ = G_n` of the points of `T_h F_n × {γ}`.
pub fn name_word(h: &GroupElement, gamma: i8, n: usize, ctx: &CocycleContext) -> Result<FunnyWord> {
    check_gamma(gamma)?;
    let cfg = ctx.config();
    if n > cfg.level() {
        return Err(Error::LevelTooLarge {
            requested: n,
            level: cfg.level(),
        });
    }
    if !h.in_level(n) {
        return Err(Error::NotInLevelGroup { level: n });
    }
    let domain = level_domain(n, ctx)?;
    let at_h = phi_at_zero(h, ctx)?;
    let bits = domain
        .iter()
        .map(|g| {
            let v = crate::group::add(g, h, cfg)?;
            Ok(u8::from(phi_at_zero(&v, ctx)? * at_h * gamma != 1))
        })
        .collect::<Result<Vec<_>>>()?;
    FunnyWord::new(domain, bits)
}

/// All `2|G_n|` names, keyed by `(h, γ)` with `h` in enumeration order and
/// `γ = +1` before `γ = -1`.
#[derive(Debug, Clone)]
pub struct NameAtlas {
    pub level: usize,
    pub names: Vec<(GroupElement, i8, FunnyWord)>,
}

impl NameAtlas {
    /// Each `(h, γ)` class `T_h F_n × {γ}` has measure `1 / (2|G_n|)`.
    pub fn class_measure(&self) -> Ratio<u64> {
        Ratio::new(1, self.names.len() as u64)
    }

    pub fn lambda_size(&self) -> u64 {
        self.names.len() as u64 / 2
    }
}

fn check_name_budget(n: usize, ctx: &CocycleContext, max_names: u128) -> Result<usize> {
    let cfg = ctx.config();
    if n > cfg.level() {
        return Err(Error::LevelTooLarge {
            requested: n,
            level: cfg.level(),
        });
    }
    let names = cfg.level_order(n).and_then(|o| o.checked_mul(2)).unwrap_or(u128::MAX);
    if names > max_names {
        return Err(Error::BudgetExceeded {
            required: names,
            budget: max_names,
        });
    }
    Ok(names as usize / 2)
}

pub fn name_atlas(n: usize, ctx: &CocycleContext, max_names: u128) -> Result<NameAtlas> {
    let size = check_name_budget(n, ctx, max_names)?;
    let cfg = ctx.config();
    let signs = level_signs(n, ctx);
    let domain = level_domain(n, ctx)?;
    let mut names = Vec::with_capacity(2 * size);
    for h in domain.iter() {
        let hi = level_index(h, n, cfg)?;
        let bits: Vec<u8> = domain
            .iter()
            .map(|g| {
                let v = crate::group::add(g, h, cfg)?;
                Ok(u8::from(signs[level_index(&v, n, cfg)?] * signs[hi] != 1))
            })
            .collect::<Result<_>>()?;
        let word = FunnyWord::new(domain.clone(), bits)?;
        let flipped = word.complement();
        names.push((h.clone(), 1, word));
        names.push((h.clone(), -1, flipped));
    }
    Ok(NameAtlas { level: n, names })
}

/// Pairwise separation of the names at one level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NameSeparation {
    pub level: usize,
    /// `|Λ| = |G_n|`, the common denominator of every distance.
    pub length: u64,
    pub names: u64,
    pub pairs: u64,
    pub delta_min: Ratio<u64>,
    /// Number of differing positions ↦ number of name pairs at that distance.
    pub histogram: BTreeMap<u64, u64>,
}

impl NameSeparation {
    /// Histogram keyed by exact distance.
    pub fn distances(&self) -> impl Iterator<Item = (Ratio<u64>, u64)> + '_ {
        self.histogram.iter().map(|(&d, &c)| (Ratio::new(d, self.length), c))
    }
}

fn pack(bits: &[u8]) -> Vec<u64> {
    let mut out = alloc::vec![0u64; bits.len().div_ceil(64)];
    for (i, &b) in bits.iter().enumerate() {
        out[i / 64] |= (b as u64) << (i % 64);
    }
    out
}

/// Minimum pairwise distance and full distance histogram over all unordered
/// pairs of distinct names.
pub fn name_separation(n: usize, ctx: &CocycleContext, max_names: u128) -> Result<NameSeparation> {
    let atlas = name_atlas(n, ctx, max_names)?;
    Ok(separation_of(&atlas))
}

pub fn separation_of(atlas: &NameAtlas) -> NameSeparation {
    let packed: Vec<Vec<u64>> = atlas.names.iter().map(|(_, _, w)| pack(w.bits())).collect();
    let mut histogram = BTreeMap::new();
    for (i, a) in packed.iter().enumerate() {
        for b in &packed[i + 1..] {
            let d: u64 = a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones() as u64).sum();
            *histogram.entry(d).or_insert(0u64) += 1;
        }
    }
    let length = atlas.lambda_size();
    let names = atlas.names.len() as u64;
    let min = histogram.keys().next().copied().unwrap_or(length);
    NameSeparation {
        level: atlas.level,
        length,
        names,
        pairs: names * (names - 1) / 2,
        delta_min: Ratio::new(min, length),
        histogram,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AtBallBound {
    pub epsilon: Ratio<u64>,
    /// Upper bound on `sup_W |Λ| μ{x : d̄_Λ(π(x)|_Λ, W) < ε}`.
    pub bound: Ratio<u64>,
    /// True when `ε < δ_min / 2` and the counting argument applies.
    pub separated: bool,
}

impl AtBallBound {
    /// The AT witness inequality `bound > 1 - ε` is ruled out for this `Λ`.
    pub fn excludes_witness(&self) -> bool {
        self.epsilon < Ratio::from_integer(1) && self.bound <= Ratio::from_integer(1) - self.epsilon
    }
}

/// When names are pairwise at least `δ_min` apart and `ε < δ_min/2`, a word
/// `W` is `ε`-close to at most one name class, of measure `1/(2|G_n|)`; with
/// `|Λ| = |G_n|` the bound is `1/2`. Otherwise only the trivial bound `|Λ|`.
pub fn at_ball_bound_from(sep: &NameSeparation, epsilon: Ratio<u64>) -> AtBallBound {
    if epsilon * 2 < sep.delta_min {
        AtBallBound {
            epsilon,
            bound: Ratio::new(sep.length, sep.names),
            separated: true,
        }
    } else {
        AtBallBound {
            epsilon,
            bound: Ratio::from_integer(sep.length),
            separated: false,
        }
    }
}

pub fn at_ball_bound(n: usize, epsilon: Ratio<u64>, ctx: &CocycleContext, max_names: u128) -> Result<AtBallBound> {
    let sep = name_separation(n, ctx, max_names)?;
    Ok(at_ball_bound_from(&sep, epsilon))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{add, GroupConfig, Mode};

    fn ctx(primes: &[u64]) -> CocycleContext {
        CocycleContext::legendre(&GroupConfig::new(primes, Mode::Experimental).unwrap()).unwrap()
    }

    #[test]
    fn name_examples() {
        let c = ctx(&[5]);
        let w = name_word(&GroupElement::zero(), 1, 1, &c).unwrap();
        assert_eq!(w.bits(), &[0, 0, 1, 1, 0]);
        let w2 = name_word(&GroupElement::zero(), -1, 1, &c).unwrap();
        assert_eq!(w2, w.complement());
        assert!(name_word(&GroupElement::zero(), 0, 1, &c).is_err());
    }

    #[test]
    fn hamming_examples() {
        let c = ctx(&[5]);
        let w = name_word(&GroupElement::zero(), 1, 1, &c).unwrap();
        let other = FunnyWord::new(w.domain.clone(), alloc::vec![0, 1, 1, 0, 0]).unwrap();
        assert_eq!(hamming(&w, &w).unwrap(), Ratio::from_integer(0));
        assert_eq!(hamming(&w, &w.complement()).unwrap(), Ratio::from_integer(1));
        assert_eq!(hamming(&w, &other).unwrap(), Ratio::new(2, 5));
        let c57 = ctx(&[5, 7]);
        let elsewhere = name_word(&GroupElement::zero(), 1, 2, &c57).unwrap();
        assert_eq!(hamming(&w, &elsewhere), Err(Error::DomainMismatch));
    }

    #[test]
    fn atlas_matches_name_word() {
        let c = ctx(&[5, 7]);
        let atlas = name_atlas(2, &c, 1000).unwrap();
        assert_eq!(atlas.names.len(), 70);
        assert_eq!(atlas.class_measure() * atlas.names.len() as u64, Ratio::from_integer(1));
        for (h, gamma, word) in &atlas.names {
            assert_eq!(word, &name_word(h, *gamma, 2, &c).unwrap());
        }
    }

    #[test]
    fn separation_small_levels() {
        let c = ctx(&[5, 7]);
        let s0 = name_separation(0, &c, 1000).unwrap();
        assert_eq!(s0.names, 2);
        assert_eq!(s0.delta_min, Ratio::from_integer(1));
        let s1 = name_separation(1, &c, 1000).unwrap();
        assert_eq!((s1.names, s1.pairs), (10, 45));
        assert_eq!(s1.histogram.values().sum::<u64>(), 45);
        let s2 = name_separation(2, &c, 1000).unwrap();
        assert_eq!(s2.pairs, 2415);
        assert_eq!(s2.histogram.values().sum::<u64>(), 2415);
        assert!(matches!(
            name_separation(2, &c, 69),
            Err(Error::BudgetExceeded { required: 70, .. })
        ));
    }

    #[test]
    fn separation_matches_brute_force_pairs() {
        let c = ctx(&[3, 5]);
        let atlas = name_atlas(2, &c, 1000).unwrap();
        let mut min = Ratio::from_integer(1u64);
        let mut hist: BTreeMap<Ratio<u64>, u64> = BTreeMap::new();
        for i in 0..atlas.names.len() {
            for j in i + 1..atlas.names.len() {
                let d = hamming(&atlas.names[i].2, &atlas.names[j].2).unwrap();
                min = min.min(d);
                *hist.entry(d).or_default() += 1;
            }
        }
        let sep = separation_of(&atlas);
        assert_eq!(sep.delta_min, min);
        assert_eq!(sep.distances().collect::<BTreeMap<_, _>>(), hist);
    }

    #[test]
    fn distance_pairs_depend_only_on_difference() {
        // d(name(h,+), name(h',+)) itself carries the sign φ_h(0)φ_h'(0); the
        // pair {d, 1 - d} and |1 - 2d| = |σ̂_0(h - h')| are translation invariant
        for primes in [&[7u64][..], &[5, 7][..]] {
            let c = ctx(primes);
            let cfg = c.config();
            let n = primes.len();
            let atlas = name_atlas(n, &c, 1000).unwrap();
            let word = |h: &GroupElement, g: i8| {
                atlas
                    .names
                    .iter()
                    .find(|(x, y, _)| x == h && *y == g)
                    .map(|t| t.2.clone())
                    .unwrap()
            };
            let elems: Vec<_> = enumerate_level_group(n, cfg).unwrap().collect();
            let mut by_diff: BTreeMap<GroupElement, (Ratio<u64>, Ratio<u64>)> = BTreeMap::new();
            for h in &elems {
                assert_eq!(hamming(&word(h, 1), &word(h, -1)).unwrap(), Ratio::from_integer(1));
                for h2 in &elems {
                    let d = hamming(&word(h, 1), &word(h2, 1)).unwrap();
                    let pair = (d.min(Ratio::from_integer(1) - d), d.max(Ratio::from_integer(1) - d));
                    let diff = add(h, &h2.neg(cfg).unwrap(), cfg).unwrap();
                    assert_eq!(*by_diff.entry(diff.clone()).or_insert(pair), pair);

                    let coeff = crate::spectral::fourier_coeff_direct(&diff, &c).unwrap().value;
                    let gap =
                        Ratio::from_integer(1i64) - Ratio::new(2 * *pair.0.numer() as i64, *pair.0.denom() as i64);
                    assert_eq!(
                        num_rational::BigRational::new((*gap.numer()).into(), (*gap.denom()).into()),
                        num_traits::Signed::abs(&coeff)
                    );
                }
            }
        }
    }

    #[test]
    fn delta_min_from_largest_coefficient() {
        // over [5, 7] the largest |σ̂_0| off the identity is 3/5, at (2, 0)
        let c = ctx(&[5, 7]);
        let sep = name_separation(2, &c, 1000).unwrap();
        assert_eq!(sep.delta_min, Ratio::new(1, 5));
    }

    #[test]
    fn ball_bounds() {
        let c = ctx(&[5, 7]);
        let b0 = at_ball_bound(0, Ratio::new(1, 4), &c, 1000).unwrap();
        assert_eq!(b0.bound, Ratio::new(1, 2));
        let sep = name_separation(2, &c, 1000).unwrap();
        let small = at_ball_bound_from(&sep, sep.delta_min / 4);
        assert!(small.separated && small.excludes_witness());
        assert_eq!(small.bound, Ratio::new(1, 2));
        let big = at_ball_bound_from(&sep, Ratio::from_integer(1));
        assert_eq!(big.bound, Ratio::from_integer(35));
        assert!(!big.excludes_witness());
    }
}
