//! The group `G = ⊕ Z/p_n Z` truncated to finitely many coordinates, its
//! translation action on the (truncated) dual `X = ∏ Z/p_n Z`, and the tower
//! partitions `{T_h F_n : h ∈ G_n}`.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::primes::{is_prime, theorem_lower_bound, theorem_primes};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Experimental,
    /// Enforces `p_n >= 5^(2(n+1))` on every retained coordinate.
    TheoremGrade,
}

/// A validated, strictly increasing list of odd primes. The number of primes
/// is the truncation level `N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupConfig {
    primes: Vec<u64>,
    mode: Mode,
}

impl GroupConfig {
    pub fn new(primes: &[u64], mode: Mode) -> Result<Self> {
        if primes.is_empty() {
            return Err(Error::EmptyPrimes);
        }
        for (index, &value) in primes.iter().enumerate() {
            if !is_prime(value) {
                return Err(Error::NotPrime { index, value });
            }
            if value == 2 {
                return Err(Error::EvenPrime { index });
            }
            if index > 0 && primes[index - 1] >= value {
                return Err(Error::NotIncreasing {
                    index,
                    previous: primes[index - 1],
                    value,
                });
            }
            if mode == Mode::TheoremGrade && theorem_lower_bound(index) > value.into() {
                return Err(Error::TheoremGrowth { index, value });
            }
        }
        Ok(Self {
            primes: primes.to_vec(),
            mode,
        })
    }

    /// Theorem-grade configuration built from the least admissible primes.
    pub fn theorem(count: usize) -> Result<Self> {
        let primes = theorem_primes(count)
            .iter()
            .map(|p| p.to_u64().ok_or(Error::OutOfRange("theorem prime")))
            .collect::<Result<Vec<_>>>()?;
        Self::new(&primes, Mode::TheoremGrade)
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn prime(&self, n: usize) -> u64 {
        self.primes[n]
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Truncation level `N`.
    pub fn level(&self) -> usize {
        self.primes.len()
    }

    /// `|G_n| = p_0 ⋯ p_{n-1}`, or `None` on overflow.
    pub fn level_order(&self, n: usize) -> Option<u128> {
        self.primes[..n.min(self.level())]
            .iter()
            .try_fold(1u128, |acc, &p| acc.checked_mul(p as u128))
    }

    fn check_level(&self, n: usize) -> Result<()> {
        if n > self.level() {
            return Err(Error::LevelTooLarge {
                requested: n,
                level: self.level(),
            });
        }
        Ok(())
    }
}

/// A finitely supported element of `G`. Stored sparsely as `(coordinate,
/// residue)` pairs, sorted by coordinate, with zero residues omitted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GroupElement {
    coords: Vec<(usize, u64)>,
}

impl GroupElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: &[(usize, u64)], cfg: &GroupConfig) -> Result<Self> {
        let mut coords: Vec<(usize, u64)> = Vec::with_capacity(pairs.len());
        for &(index, residue) in pairs {
            check_residue(index, residue, cfg)?;
            if residue != 0 {
                coords.push((index, residue));
            }
        }
        coords.sort_unstable_by_key(|&(i, _)| i);
        if coords.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateElement);
        }
        Ok(Self { coords })
    }

    /// Builds an element from its leading residues `(g_0, g_1, …)`.
    pub fn from_dense(residues: &[u64], cfg: &GroupConfig) -> Result<Self> {
        let mut coords = Vec::new();
        for (index, &residue) in residues.iter().enumerate() {
            check_residue(index, residue, cfg)?;
            if residue != 0 {
                coords.push((index, residue));
            }
        }
        Ok(Self { coords })
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coord(&self, n: usize) -> u64 {
        match self.coords.binary_search_by_key(&n, |&(i, _)| i) {
            Ok(pos) => self.coords[pos].1,
            Err(_) => 0,
        }
    }

    /// Nonzero `(coordinate, residue)` pairs in increasing coordinate order.
    pub fn support(&self) -> &[(usize, u64)] {
        &self.coords
    }

    /// Dense residues for coordinates `0..len`.
    pub fn to_dense(&self, len: usize) -> Vec<u64> {
        let mut out = alloc::vec![0; len];
        for &(i, r) in &self.coords {
            if i < len {
                out[i] = r;
            }
        }
        out
    }

    /// True iff the support lies in `{0, …, n-1}`, i.e. `self ∈ G_n`.
    pub fn in_level(&self, n: usize) -> bool {
        self.coords.last().is_none_or(|&(i, _)| i < n)
    }

    pub fn validate(&self, cfg: &GroupConfig) -> Result<()> {
        for &(index, residue) in &self.coords {
            check_residue(index, residue, cfg)?;
        }
        Ok(())
    }

    pub fn neg(&self, cfg: &GroupConfig) -> Result<Self> {
        self.validate(cfg)?;
        let coords = self.coords.iter().map(|&(i, r)| (i, cfg.prime(i) - r)).collect();
        Ok(Self { coords })
    }
}

/// Lexicographic order on `(g_0, g_1, …)`, the enumeration order of `G_n`.
impl Ord for GroupElement {
    fn cmp(&self, other: &Self) -> Ordering {
        let (mut a, mut b) = (self.coords.iter().peekable(), other.coords.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&&(i, x)), Some(&&(j, y))) => match i.cmp(&j) {
                    // first differing coordinate is i: self has x > 0, other has 0
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match x.cmp(&y) {
                        Ordering::Equal => {
                            a.next();
                            b.next();
                        }
                        ord => return ord,
                    },
                },
            }
        }
    }
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn check_residue(index: usize, residue: u64, cfg: &GroupConfig) -> Result<()> {
    if index >= cfg.level() {
        return Err(Error::CoordinateOutOfLevel {
            index,
            level: cfg.level(),
        });
    }
    let prime = cfg.prime(index);
    if residue >= prime {
        return Err(Error::ResidueNotReduced { index, residue, prime });
    }
    Ok(())
}

/// Componentwise sum modulo `p_n`.
pub fn add(g: &GroupElement, h: &GroupElement, cfg: &GroupConfig) -> Result<GroupElement> {
    g.validate(cfg)?;
    h.validate(cfg)?;
    let mut coords = Vec::with_capacity(g.coords.len() + h.coords.len());
    let (mut a, mut b) = (g.coords.iter().peekable(), h.coords.iter().peekable());
    loop {
        let next = match (a.peek(), b.peek()) {
            (None, None) => break,
            (Some(&&x), None) => {
                a.next();
                x
            }
            (None, Some(&&y)) => {
                b.next();
                y
            }
            (Some(&&(i, x)), Some(&&(j, y))) => match i.cmp(&j) {
                Ordering::Less => {
                    a.next();
                    (i, x)
                }
                Ordering::Greater => {
                    b.next();
                    (j, y)
                }
                Ordering::Equal => {
                    a.next();
                    b.next();
                    (i, (x + y) % cfg.prime(i))
                }
            },
        };
        if next.1 != 0 {
            coords.push(next);
        }
    }
    Ok(GroupElement { coords })
}

/// Iterator over `G_n` in lexicographic order of `(g_0, …, g_{n-1})`.
#[derive(Debug, Clone)]
pub struct LevelGroupIter<'a> {
    primes: &'a [u64],
    current: Option<Vec<u64>>,
}

impl Iterator for LevelGroupIter<'_> {
    type Item = GroupElement;

    fn next(&mut self) -> Option<GroupElement> {
        let digits = self.current.as_mut()?;
        let coords = digits
            .iter()
            .enumerate()
            .filter(|&(_, &r)| r != 0)
            .map(|(i, &r)| (i, r))
            .collect();
        let item = GroupElement { coords };
        let mut pos = digits.len();
        loop {
            if pos == 0 {
                self.current = None;
                break;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < self.primes[pos] {
                break;
            }
            digits[pos] = 0;
        }
        Some(item)
    }
}

/// Enumerates the `p_0 ⋯ p_{n-1}` elements of `G_n`.
pub fn enumerate_level_group(n: usize, cfg: &GroupConfig) -> Result<LevelGroupIter<'_>> {
    cfg.check_level(n)?;
    Ok(LevelGroupIter {
        primes: &cfg.primes[..n],
        current: Some(alloc::vec![0; n]),
    })
}

/// Position of `g ∈ G_n` in the enumeration order of [`enumerate_level_group`].
pub fn level_index(g: &GroupElement, n: usize, cfg: &GroupConfig) -> Result<usize> {
    cfg.check_level(n)?;
    if !g.in_level(n) {
        return Err(Error::NotInLevelGroup { level: n });
    }
    g.validate(cfg)?;
    let mut idx = 0usize;
    for k in 0..n {
        idx = idx * cfg.prime(k) as usize + g.coord(k) as usize;
    }
    Ok(idx)
}

/// Inverse of [`level_index`].
pub fn element_at_level_index(mut idx: usize, n: usize, cfg: &GroupConfig) -> Result<GroupElement> {
    cfg.check_level(n)?;
    let mut coords = Vec::new();
    for k in (0..n).rev() {
        let p = cfg.prime(k) as usize;
        let r = idx % p;
        idx /= p;
        if r != 0 {
            coords.push((k, r as u64));
        }
    }
    if idx != 0 {
        return Err(Error::OutOfRange("level index"));
    }
    coords.reverse();
    Ok(GroupElement { coords })
}

/// A point of `X` truncated to the first `N` coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruncatedPoint {
    coords: Vec<u64>,
}

impl TruncatedPoint {
    pub fn new(coords: Vec<u64>, cfg: &GroupConfig) -> Result<Self> {
        if coords.len() != cfg.level() {
            return Err(Error::ShapeMismatch {
                expected: cfg.level(),
                got: coords.len(),
            });
        }
        for (index, &residue) in coords.iter().enumerate() {
            check_residue(index, residue, cfg)?;
        }
        Ok(Self { coords })
    }

    pub fn origin(cfg: &GroupConfig) -> Self {
        Self {
            coords: alloc::vec![0; cfg.level()],
        }
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn coord(&self, n: usize) -> u64 {
        self.coords[n]
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    fn check_shape(&self, cfg: &GroupConfig) -> Result<()> {
        if self.coords.len() != cfg.level() {
            return Err(Error::ShapeMismatch {
                expected: cfg.level(),
                got: self.coords.len(),
            });
        }
        Ok(())
    }
}

/// `T_g x = x + g`.
pub fn translate(x: &TruncatedPoint, g: &GroupElement, cfg: &GroupConfig) -> Result<TruncatedPoint> {
    x.check_shape(cfg)?;
    g.validate(cfg)?;
    let mut coords = x.coords.clone();
    for &(i, r) in g.support() {
        coords[i] = (coords[i] + r) % cfg.prime(i);
    }
    Ok(TruncatedPoint { coords })
}

/// The `h ∈ G_n` with `x ∈ T_h F_n`: the first `n` coordinates of `x`.
pub fn tower_level(x: &TruncatedPoint, n: usize, cfg: &GroupConfig) -> Result<GroupElement> {
    cfg.check_level(n)?;
    x.check_shape(cfg)?;
    let coords = x.coords[..n]
        .iter()
        .enumerate()
        .filter(|&(_, &r)| r != 0)
        .map(|(i, &r)| (i, r))
        .collect();
    Ok(GroupElement { coords })
}

/// Iterator over every truncated point, lexicographically.
pub fn enumerate_points(cfg: &GroupConfig) -> impl Iterator<Item = TruncatedPoint> + '_ {
    enumerate_level_group(cfg.level(), cfg)
        .expect("full level is always valid")
        .map(move |g| TruncatedPoint {
            coords: g.to_dense(cfg.level()),
        })
}
