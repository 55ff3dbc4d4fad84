//! The quadratic form behind the strong Blum-Hanson condition,
//!
//! ```text
//! Q(Θ, η) = k^{-1} Σ_{θ,θ' ∈ Θ} η_θ η_θ' σ̂_0(θ - θ') = ∫ |k^{-1/2} Σ_θ η_θ χ(θ)|² dσ_0(χ),
//! ```
//!
//! and a search that lower-bounds its supremum over `Θ ⊆ G_n` of size `k`.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::char_sums::autocorrelation_numerator;
use crate::cocycle::CocycleContext;
use crate::error::{Error, Result};
use crate::group::{add, element_at_level_index, GroupElement};
use crate::spectral::fourier_coeff_direct;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SbhProbe {
    pub theta: Vec<GroupElement>,
    pub signs: Vec<i8>,
    pub value: BigRational,
}

impl SbhProbe {
    pub fn k(&self) -> usize {
        self.theta.len()
    }
}

/// Exact `Q(Θ, η)` from direct-route coefficients.
pub fn sbh_quadratic_form(theta: &[GroupElement], signs: &[i8], ctx: &CocycleContext) -> Result<BigRational> {
    if theta.is_empty() {
        return Err(Error::OutOfRange("probe size"));
    }
    if theta.len() != signs.len() {
        return Err(Error::ShapeMismatch {
            expected: theta.len(),
            got: signs.len(),
        });
    }
    if signs.iter().any(|&s| s != 1 && s != -1) {
        return Err(Error::OutOfRange("probe sign"));
    }
    let mut sorted = theta.to_vec();
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DuplicateElement);
    }
    let cfg = ctx.config();
    let mut sum = BigRational::from_integer(BigInt::from(0));
    for (a, &sa) in theta.iter().zip(signs) {
        for (b, &sb) in theta.iter().zip(signs) {
            let diff = add(a, &b.neg(cfg)?, cfg)?;
            let c = fourier_coeff_direct(&diff, ctx)?.value;
            sum += c * BigInt::from(sa * sb);
        }
    }
    Ok(sum / BigInt::from(theta.len()))
}

pub fn make_probe(theta: Vec<GroupElement>, signs: Vec<i8>, ctx: &CocycleContext) -> Result<SbhProbe> {
    let value = sbh_quadratic_form(&theta, &signs, ctx)?;
    Ok(SbhProbe { theta, signs, value })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub k: usize,
    /// Exhaustive enumeration runs when `C(|G_n|, k) 2^k` is at most this.
    pub budget: u128,
    pub seed: u64,
    pub restarts: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            k: 1,
            budget: 1_000_000,
            seed: 0,
            restarts: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub level: usize,
    pub probe: SbhProbe,
    pub exhaustive: bool,
    /// Probes (exhaustive) or local-search steps evaluated.
    pub evaluated: u128,
}

/// Largest `|G_n|` the search will tabulate coefficients for.
pub const MAX_SEARCH_GROUP: u128 = 1 << 24;

/// Integer numerators of `σ̂_0` on `G_n` over the common denominator `|G_n|`,
/// indexed in enumeration order.
struct LevelTable {
    primes: Vec<u64>,
    order: usize,
    numerators: Vec<i64>,
}

impl LevelTable {
    fn new(n: usize, ctx: &CocycleContext) -> Result<Self> {
        let cfg = ctx.config();
        let order = cfg.level_order(n).unwrap_or(u128::MAX);
        if order > MAX_SEARCH_GROUP {
            return Err(Error::BudgetExceeded {
                required: order,
                budget: MAX_SEARCH_GROUP,
            });
        }
        let mut numerators = alloc::vec![1i64];
        for k in 0..n {
            let p = cfg.prime(k);
            let row: Vec<i64> = (0..p).map(|j| autocorrelation_numerator(ctx.table(k), j)).collect();
            numerators = numerators
                .iter()
                .flat_map(|&v| row.iter().map(move |&a| v * a))
                .collect();
        }
        Ok(Self {
            primes: cfg.primes()[..n].to_vec(),
            order: order as usize,
            numerators,
        })
    }

    /// Index of `g_a - g_b`.
    fn diff(&self, mut a: usize, mut b: usize) -> usize {
        let mut out = 0;
        let mut scale = 1;
        for &p in self.primes.iter().rev() {
            let p = p as usize;
            let d = (a % p + p - b % p) % p;
            out += d * scale;
            scale *= p;
            a /= p;
            b /= p;
        }
        out
    }

    fn coeff(&self, a: usize, b: usize) -> i64 {
        self.numerators[self.diff(a, b)]
    }

    fn form(&self, idx: &[usize], signs: &[i8]) -> i128 {
        let mut s = 0i128;
        for (i, &a) in idx.iter().enumerate() {
            for (j, &b) in idx.iter().enumerate() {
                s += (signs[i] * signs[j]) as i128 * self.coeff(a, b) as i128;
            }
        }
        s
    }
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Candidate with its integer form value; ordering prefers larger values, then
/// the lexicographically smaller `(indices, signs)`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Candidate {
    form: i128,
    idx: Vec<usize>,
    signs: Vec<i8>,
}

impl Candidate {
    /// Sorted by index, first sign `+1` (`Q` is invariant under a global flip).
    fn canonical(mut idx: Vec<usize>, mut signs: Vec<i8>, form: i128) -> Self {
        let mut pairs: Vec<(usize, i8)> = idx.iter().copied().zip(signs.iter().copied()).collect();
        pairs.sort_unstable();
        let flip = if pairs[0].1 < 0 { -1 } else { 1 };
        idx = pairs.iter().map(|&(i, _)| i).collect();
        signs = pairs.iter().map(|&(_, s)| s * flip).collect();
        Self { form, idx, signs }
    }

    fn better_than(&self, other: &Candidate) -> bool {
        match self.form.cmp(&other.form) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => (&self.idx, &self.signs) < (&other.idx, &other.signs),
        }
    }
}

/// Maximizes `Q` over `Θ ⊆ G_n`, `|Θ| = k`, and all sign patterns.
/// Exhaustive within the budget, otherwise hill climbing over single swaps and
/// sign flips from seeded random starts. Deterministic for a fixed seed.
pub fn sbh_adversarial_search(n: usize, opts: &SearchOptions, ctx: &CocycleContext) -> Result<SearchOutcome> {
    let cfg = ctx.config();
    if n > cfg.level() {
        return Err(Error::LevelTooLarge {
            requested: n,
            level: cfg.level(),
        });
    }
    if opts.k == 0 {
        return Err(Error::OutOfRange("probe size"));
    }
    let table = LevelTable::new(n, ctx)?;
    let m = table.order;
    if opts.k > m {
        return Err(Error::SubsetTooLarge {
            k: opts.k,
            available: m,
        });
    }
    let work = binomial(m as u128, opts.k as u128).and_then(|c| c.checked_mul(1u128.checked_shl(opts.k as u32)?));
    let (best, exhaustive, evaluated) = match work {
        Some(w) if w <= opts.budget => {
            let (best, count) = exhaustive_search(&table, opts.k);
            (best, true, count)
        }
        _ => {
            let (best, steps) = local_search(&table, opts);
            (best, false, steps)
        }
    };
    let theta = best
        .idx
        .iter()
        .map(|&i| element_at_level_index(i, n, cfg))
        .collect::<Result<Vec<_>>>()?;
    let denom = BigInt::from(opts.k as u64) * BigInt::from(m as u64);
    let value = BigRational::new(BigInt::from(best.form), denom);
    Ok(SearchOutcome {
        level: n,
        probe: SbhProbe {
            theta,
            signs: best.signs,
            value,
        },
        exhaustive,
        evaluated,
    })
}

fn exhaustive_search(table: &LevelTable, k: usize) -> (Candidate, u128) {
    let m = table.order;
    let mut idx: Vec<usize> = (0..k).collect();
    let mut best: Option<Candidate> = None;
    let mut count = 0u128;
    let mut signs = alloc::vec![1i8; k];
    loop {
        // first sign fixed to +1; the rest run from all -1 upward
        for mask in 0..(1u64 << (k - 1)) {
            let rest = k - 1;
            for (bit, s) in signs[1..].iter_mut().enumerate() {
                *s = if mask >> (rest - 1 - bit) & 1 == 1 { 1 } else { -1 };
            }
            count += 1;
            let form = table.form(&idx, &signs);
            let cand = Candidate {
                form,
                idx: idx.clone(),
                signs: signs.clone(),
            };
            if best.as_ref().is_none_or(|b| cand.better_than(b)) {
                best = Some(cand);
            }
        }
        // next combination in lexicographic order
        let mut i = k;
        loop {
            if i == 0 {
                return (best.expect("k <= m guarantees one combination"), count);
            }
            i -= 1;
            if idx[i] < m - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn local_search(table: &LevelTable, opts: &SearchOptions) -> (Candidate, u128) {
    let m = table.order;
    let k = opts.k;
    let mut best: Option<Candidate> = None;
    let mut steps = 0u128;
    for restart in 0..opts.restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(restart as u64);
        let mut idx: Vec<usize> = sample(&mut rng, m, k).into_vec();
        let mut signs: Vec<i8> = (0..k).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
        let mut member = alloc::vec![false; m];
        for &i in &idx {
            member[i] = true;
        }
        loop {
            steps += 1;
            // field[a] = Σ_{b≠a} η_b N(θ_a - θ_b)
            let field: Vec<i128> = (0..k)
                .map(|a| {
                    (0..k)
                        .filter(|&b| b != a)
                        .map(|b| signs[b] as i128 * table.coeff(idx[a], idx[b]) as i128)
                        .sum()
                })
                .collect();
            // (gain, position, new element, new sign)
            let mut best_move: Option<(i128, usize, usize, i8)> = None;
            let mut consider = |mv: (i128, usize, usize, i8)| {
                if mv.0 > 0 && best_move.is_none_or(|b| mv.0 > b.0) {
                    best_move = Some(mv);
                }
            };
            for a in 0..k {
                consider((-4 * signs[a] as i128 * field[a], a, idx[a], -signs[a]));
            }
            for (t, _) in member.iter().enumerate().filter(|(_, &inside)| !inside) {
                let total: i128 = (0..k).map(|b| signs[b] as i128 * table.coeff(t, idx[b]) as i128).sum();
                for a in 0..k {
                    let without = total - signs[a] as i128 * table.coeff(t, idx[a]) as i128;
                    let s: i8 = if without >= 0 { 1 } else { -1 };
                    let gain = 2 * (s as i128 * without - signs[a] as i128 * field[a]);
                    consider((gain, a, t, s));
                }
            }
            match best_move {
                Some((_, a, t, s)) => {
                    member[idx[a]] = false;
                    member[t] = true;
                    idx[a] = t;
                    signs[a] = s;
                }
                None => break,
            }
        }
        let form = table.form(&idx, &signs);
        let cand = Candidate::canonical(idx, signs, form);
        if best.as_ref().is_none_or(|b| cand.better_than(b)) {
            best = Some(cand);
        }
    }
    (best.expect("at least one restart"), steps)
}
