//! Legendre symbols, the `ε` sign tables of the Morse cocycle, quadratic Gauss
//! sums and the ultraflat polynomials
//!
//! ```text
//! P(x) = p^{-1/2} (1 + Σ_{k=1}^{p-1} (k/p) e^{-2πi kx/p}),
//! ```
//!
//! together with the exact autocorrelations of their coefficient sequences.
//!
//! Every exponential in this module uses the `e^{-2πi ·/p}` convention. Under it
//! the quadratic Gauss sum is `Σ_k e^{-2πi k²x/p} = (x/p) δ̄ √p`, where `δ = 1`
//! for `p ≡ 1 (mod 4)` and `δ = i` for `p ≡ 3 (mod 4)`; the phase returned by
//! [`DeltaClass::phase`] is already conjugated.

use alloc::vec::Vec;
use core::ops::Deref;

use num_complex::Complex64;
use num_rational::Ratio;

use crate::dft::{dft, roots_of_unity};
use crate::error::{Error, Result};
use crate::primes::{is_prime, pow_mod};

/// Legendre symbol `(k/p)` by Euler's criterion. `p` must be an odd prime.
pub fn legendre(k: i64, p: u64) -> i8 {
    let r = k.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    match pow_mod(r, (p - 1) / 2, p) {
        1 => 1,
        e if e == p - 1 => -1,
        _ => unreachable!("Euler's criterion for a prime modulus yields ±1"),
    }
}

fn check_odd_prime(p: u64) -> Result<()> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotPrime { index: 0, value: p });
    }
    Ok(())
}

/// A `±1` sequence `ε(0), …, ε(p-1)` with `ε(0) = 1`: the data defining one
/// coordinate of a Morse cocycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignTable {
    prime: u64,
    values: Vec<i8>,
}

impl SignTable {
    pub fn new(prime: u64, values: Vec<i8>) -> Result<Self> {
        check_odd_prime(prime)?;
        if values.len() as u64 != prime {
            return Err(Error::ShapeMismatch {
                expected: prime as usize,
                got: values.len(),
            });
        }
        if values[0] != 1 || values.iter().any(|&v| v != 1 && v != -1) {
            return Err(Error::OutOfRange("sign table entry"));
        }
        Ok(Self { prime, values })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    /// `ε(k)`, with `k` reduced mod `p`.
    #[inline]
    pub fn get(&self, k: u64) -> i8 {
        self.values[(k % self.prime) as usize]
    }
}

/// The Legendre instance: `ε(0) = 1` and `ε(k) = (k/p)` for `0 < k < p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LegendreTable(SignTable);

impl LegendreTable {
    pub fn into_inner(self) -> SignTable {
        self.0
    }

    /// Accepts externally stored values after checking they are the Legendre table.
    pub fn from_values(prime: u64, values: Vec<i8>) -> Result<Self> {
        let table = SignTable::new(prime, values)?;
        let ok = table.values[1..]
            .iter()
            .enumerate()
            .all(|(i, &v)| v == legendre(i as i64 + 1, prime));
        if !ok {
            return Err(Error::OutOfRange("Legendre table entry"));
        }
        Ok(Self(table))
    }
}

impl Deref for LegendreTable {
    type Target = SignTable;

    fn deref(&self) -> &SignTable {
        &self.0
    }
}

pub fn epsilon_table(p: u64) -> Result<LegendreTable> {
    check_odd_prime(p)?;
    let mut values = Vec::with_capacity(p as usize);
    values.push(1);
    values.extend((1..p).map(|k| legendre(k as i64, p)));
    Ok(LegendreTable(SignTable { prime: p, values }))
}

/// Phase class of the Gauss sum, fixed by `p mod 4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeltaClass {
    One,
    ImaginaryUnit,
}

impl DeltaClass {
    pub fn of(p: u64) -> Self {
        if p % 4 == 1 {
            DeltaClass::One
        } else {
            DeltaClass::ImaginaryUnit
        }
    }

    /// The phase multiplying `(x/p) √p` in the `e^{-2πi}` Gauss sum: `1` or `-i`.
    pub fn phase(self) -> Complex64 {
        match self {
            DeltaClass::One => Complex64::new(1.0, 0.0),
            DeltaClass::ImaginaryUnit => Complex64::new(0.0, -1.0),
        }
    }
}

/// `Σ_{k=0}^{p-1} e^{-2πi k² x/p}` by direct summation.
pub fn gauss_sum(p: u64, x: u64) -> Result<Complex64> {
    check_odd_prime(p)?;
    let roots = roots_of_unity(p as usize);
    gauss_sum_with(&roots, x)
}

/// [`gauss_sum`] over a precomputed `e^{-2πi k/p}` table.
pub fn gauss_sum_with(roots: &[Complex64], x: u64) -> Result<Complex64> {
    let p = roots.len() as u64;
    if x.is_multiple_of(p) {
        return Err(Error::ZeroResidue);
    }
    let x = x % p;
    Ok((0..p).fold(Complex64::new(0.0, 0.0), |acc, k| {
        acc + roots[((k * k % p) * x % p) as usize]
    }))
}

/// The closed form `(x/p) δ̄ √p` of [`gauss_sum`].
pub fn gauss_formula(p: u64, x: u64) -> Complex64 {
    DeltaClass::of(p).phase() * (legendre(x as i64, p) as f64 * libm::sqrt(p as f64))
}

/// `P(x)` by direct summation over a root table of length `p`.
pub fn eval_p_with(table: &SignTable, roots: &[Complex64], x: u64) -> Complex64 {
    let p = table.prime;
    let x = x % p;
    let sum = table
        .values
        .iter()
        .enumerate()
        .fold(Complex64::new(0.0, 0.0), |acc, (k, &e)| {
            acc + roots[(k as u64 * x % p) as usize] * e as f64
        });
    sum / libm::sqrt(p as f64)
}

pub fn eval_p(p: u64, x: u64) -> Result<Complex64> {
    let table = epsilon_table(p)?;
    let roots = roots_of_unity(p as usize);
    Ok(eval_p_with(&table, &roots, x))
}

/// `P(x)` at every `x ∈ Z/pZ`, from one length-`p` transform.
pub fn eval_p_all(table: &SignTable) -> Vec<Complex64> {
    let input: Vec<Complex64> = table.values.iter().map(|&e| Complex64::new(e as f64, 0.0)).collect();
    let scale = 1.0 / libm::sqrt(table.prime as f64);
    dft(&input).into_iter().map(|v| v * scale).collect()
}

/// Absolute slack allowed when checking the flatness window numerically.
pub const WINDOW_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatnessReport {
    pub prime: u64,
    /// Extremes of `|P(x)|` over `x ≠ 0`.
    pub min_modulus: f64,
    pub max_modulus: f64,
    /// `max_x |P(x)|²` over all `x`, including `x = 0`.
    pub sup_density: f64,
    pub delta_sign: DeltaClass,
}

impl FlatnessReport {
    pub fn window(&self) -> (f64, f64) {
        let r = 1.0 / libm::sqrt(self.prime as f64);
        (1.0 - r, 1.0 + r)
    }
}

/// Exhaustive scan of `|P|` over `Z/pZ`, checked against the window
/// `1 - p^{-1/2} <= |P(x)| <= 1 + p^{-1/2}` for `x ≠ 0`.
pub fn flatness_report(p: u64) -> Result<FlatnessReport> {
    let table = epsilon_table(p)?;
    flatness_report_for(&table)
}

pub fn flatness_report_for(table: &LegendreTable) -> Result<FlatnessReport> {
    let p = table.prime;
    let values = eval_p_all(table);
    let mut min_modulus = f64::INFINITY;
    let mut max_modulus = 0.0f64;
    let mut sup_density = 0.0f64;
    for (x, v) in values.iter().enumerate() {
        let m2 = v.norm_sqr();
        sup_density = sup_density.max(m2);
        if x != 0 {
            let m = libm::sqrt(m2);
            min_modulus = min_modulus.min(m);
            max_modulus = max_modulus.max(m);
        }
    }
    let report = FlatnessReport {
        prime: p,
        min_modulus,
        max_modulus,
        sup_density,
        delta_sign: DeltaClass::of(p),
    };
    let (lo, hi) = report.window();
    if min_modulus < lo - WINDOW_SLACK || max_modulus > hi + WINDOW_SLACK {
        return Err(Error::WindowViolation { prime: p });
    }
    Ok(report)
}

/// `Σ_x ε(x) ε(x+j)`.
pub fn autocorrelation_numerator(table: &SignTable, j: u64) -> i64 {
    let p = table.prime as usize;
    let j = (j % table.prime) as usize;
    let v = &table.values;
    let head: i64 = (0..p - j).map(|x| (v[x] * v[x + j]) as i64).sum();
    let tail: i64 = (p - j..p).map(|x| (v[x] * v[x + j - p]) as i64).sum();
    head + tail
}

/// `c_p(j) = p^{-1} Σ_x ε(x) ε(x+j)`, exactly.
pub fn autocorrelation(table: &SignTable, j: u64) -> Ratio<i64> {
    Ratio::new(autocorrelation_numerator(table, j), table.prime as i64)
}

/// `|P|²` on `Z/pZ` with the means to take its Fourier coefficients with
/// respect to the uniform measure.
#[derive(Debug, Clone)]
pub struct DensityFactor {
    prime: u64,
    density: Vec<f64>,
    roots: Vec<Complex64>,
}

impl DensityFactor {
    pub fn new(table: &SignTable) -> Self {
        let density = eval_p_all(table).iter().map(|v| v.norm_sqr()).collect();
        Self {
            prime: table.prime,
            density,
            roots: roots_of_unity(table.prime as usize),
        }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// `p^{-1} Σ_x |P(x)|² e^{2πi jx/p}` (real up to rounding).
    pub fn fourier(&self, j: u64) -> f64 {
        let p = self.prime;
        let j = j % p;
        let sum = self
            .density
            .iter()
            .enumerate()
            .fold(Complex64::new(0.0, 0.0), |acc, (x, &d)| {
                acc + self.roots[(j * x as u64 % p) as usize].conj() * d
            });
        sum.re / p as f64
    }
}

pub fn fourier_of_density_factor(p: u64, j: u64) -> Result<f64> {
    let table = epsilon_table(p)?;
    Ok(DensityFactor::new(&table).fourier(j))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn odd_primes_below(limit: u64) -> impl Iterator<Item = u64> {
        (3..limit).filter(|&p| is_prime(p))
    }

    fn squares(p: u64) -> Vec<bool> {
        let mut sq = alloc::vec![false; p as usize];
        for k in 1..p {
            sq[(k * k % p) as usize] = true;
        }
        sq
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre(0, 5), 0);
        assert_eq!(legendre(4, 5), 1);
        assert_eq!(legendre(2, 5), -1);
        assert_eq!(legendre(-1, 5), 1);
        assert_eq!(legendre(-1, 7), -1);
    }

    #[test]
    fn euler_matches_square_enumeration() {
        for p in odd_primes_below(500) {
            let sq = squares(p);
            for k in 1..p {
                assert_eq!(legendre(k as i64, p) == 1, sq[k as usize], "k={k} p={p}");
            }
        }
    }

    #[test]
    fn tables() {
        assert_eq!(epsilon_table(5).unwrap().values(), &[1, 1, -1, -1, 1]);
        assert_eq!(epsilon_table(7).unwrap().values(), &[1, 1, 1, -1, 1, -1, -1]);
        for p in odd_primes_below(500) {
            let t = epsilon_table(p).unwrap();
            assert_eq!(t.get(0), 1);
            assert!(t.values().iter().all(|&v| v * v == 1));
            assert_eq!(t.values()[1..].iter().map(|&v| v as i64).sum::<i64>(), 0);
        }
        assert!(epsilon_table(9).is_err());
        assert!(LegendreTable::from_values(5, alloc::vec![1, 1, -1, -1, 1]).is_ok());
        assert!(LegendreTable::from_values(5, alloc::vec![1, 1, -1, 1, 1]).is_err());
        assert!(SignTable::new(5, alloc::vec![-1, 1, -1, 1, 1]).is_err());
    }

    #[test]
    fn gauss_sum_examples() {
        let g5 = gauss_sum(5, 1).unwrap();
        assert!((g5.re - libm::sqrt(5.0)).abs() < 1e-9 && g5.im.abs() < 1e-9);
        let g7 = gauss_sum(7, 1).unwrap();
        assert!(g7.re.abs() < 1e-9);
        assert!((g7.norm() - 2.6457513110645907).abs() < 1e-9);
        assert_eq!(gauss_sum(7, 0), Err(Error::ZeroResidue));
    }

    #[test]
    fn gauss_sum_closed_form() {
        for p in odd_primes_below(500) {
            let roots = roots_of_unity(p as usize);
            for x in 1..p {
                let g = gauss_sum_with(&roots, x).unwrap();
                assert!((g - gauss_formula(p, x)).norm() < 1e-9, "p={p} x={x}");
            }
        }
    }

    #[test]
    fn polynomial_values() {
        for p in [5u64, 7, 29] {
            let p0 = eval_p(p, 0).unwrap();
            assert!((p0.re - 1.0 / libm::sqrt(p as f64)).abs() < 1e-12 && p0.im.abs() < 1e-12);
        }
        let v = eval_p(5, 1).unwrap();
        assert!((v.norm() - 1.4472135954999579).abs() < 1e-12);
        // fast and direct evaluations agree
        for p in [5u64, 7, 67, 71, 331] {
            let t = epsilon_table(p).unwrap();
            let roots = roots_of_unity(p as usize);
            let all = eval_p_all(&t);
            for x in 0..p {
                assert!((all[x as usize] - eval_p_with(&t, &roots, x)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn flatness_examples() {
        let r5 = flatness_report(5).unwrap();
        assert!((r5.max_modulus - (1.0 + 1.0 / libm::sqrt(5.0))).abs() < 1e-12);
        assert_eq!(r5.delta_sign, DeltaClass::One);
        let r7 = flatness_report(7).unwrap();
        assert_eq!(r7.delta_sign, DeltaClass::ImaginaryUnit);
        let (lo, hi) = r7.window();
        assert!(lo <= r7.min_modulus && r7.max_modulus <= hi);
        assert!(flatness_report(29).is_ok());
        for p in odd_primes_below(500) {
            flatness_report(p).unwrap();
        }
    }

    #[test]
    fn autocorrelation_examples() {
        let t5 = epsilon_table(5).unwrap();
        let t7 = epsilon_table(7).unwrap();
        assert_eq!(autocorrelation(&t5, 0), Ratio::from_integer(1));
        assert_eq!(autocorrelation(&t5, 1), Ratio::new(1, 5));
        assert_eq!(autocorrelation(&t7, 1), Ratio::new(-1, 7));
    }

    #[test]
    fn autocorrelation_closed_form() {
        for p in odd_primes_below(500) {
            let t = epsilon_table(p).unwrap();
            for j in 1..p {
                let closed = -1 + legendre(j as i64, p) as i64 + legendre(-(j as i64), p) as i64;
                assert_eq!(autocorrelation_numerator(&t, j), closed, "p={p} j={j}");
            }
        }
    }

    #[test]
    fn density_fourier_examples() {
        assert!((fourier_of_density_factor(5, 0).unwrap() - 1.0).abs() < 1e-12);
        assert!((fourier_of_density_factor(5, 1).unwrap() - 0.2).abs() < 1e-12);
        assert!((fourier_of_density_factor(7, 1).unwrap() + 1.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn density_fourier_matches_autocorrelation() {
        for p in odd_primes_below(500) {
            let t = epsilon_table(p).unwrap();
            let d = DensityFactor::new(&t);
            for j in 0..p {
                let exact = autocorrelation_numerator(&t, j) as f64 / p as f64;
                assert!((d.fourier(j) - exact).abs() < 1e-12, "p={p} j={j}");
            }
        }
    }
}
