//! Discrete Fourier transform of arbitrary length with the `e^{-2πi kx/n}`
//! kernel. Prime lengths go through Bluestein's chirp-z reduction to a
//! power-of-two convolution.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

/// Below this length the quadratic sum is cheaper than the chirp-z setup.
const DIRECT_LIMIT: usize = 64;

/// `e^{-2πi k/n}` for `k < n`.
pub fn roots_of_unity(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| {
            let (s, c) = libm::sincos(2.0 * PI * k as f64 / n as f64);
            Complex64::new(c, -s)
        })
        .collect()
}

/// `X[x] = Σ_k a[k] e^{-2πi kx/n}` by direct summation.
pub fn dft_direct(input: &[Complex64]) -> Vec<Complex64> {
    let n = input.len();
    let roots = roots_of_unity(n);
    (0..n)
        .map(|x| {
            input
                .iter()
                .enumerate()
                .fold(Complex64::new(0.0, 0.0), |acc, (k, &a)| acc + a * roots[(k * x) % n])
        })
        .collect()
}

/// `X[x] = Σ_k a[k] e^{-2πi kx/n}` in `O(n log n)`.
pub fn dft(input: &[Complex64]) -> Vec<Complex64> {
    let n = input.len();
    if n <= DIRECT_LIMIT {
        return dft_direct(input);
    }
    if n.is_power_of_two() {
        let mut buf = input.to_vec();
        fft_pow2(&mut buf, false);
        return buf;
    }
    // chirp w_k = e^{-πi k²/n}; k² is reduced mod 2n before the angle is formed
    let two_n = 2 * n as u128;
    let chirp: Vec<Complex64> = (0..n)
        .map(|k| {
            let q = (k as u128 * k as u128 % two_n) as f64;
            let (s, c) = libm::sincos(PI * q / n as f64);
            Complex64::new(c, -s)
        })
        .collect();

    let m = (2 * n - 1).next_power_of_two();
    let mut a = alloc::vec![Complex64::new(0.0, 0.0); m];
    for k in 0..n {
        a[k] = input[k] * chirp[k];
    }
    let mut b = alloc::vec![Complex64::new(0.0, 0.0); m];
    b[0] = chirp[0].conj();
    for k in 1..n {
        b[k] = chirp[k].conj();
        b[m - k] = chirp[k].conj();
    }
    fft_pow2(&mut a, false);
    fft_pow2(&mut b, false);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= *y;
    }
    fft_pow2(&mut a, true);
    let scale = 1.0 / m as f64;
    (0..n).map(|x| a[x] * scale * chirp[x]).collect()
}

/// In-place radix-2 transform; `inverse` flips the kernel sign and leaves the
/// `1/n` scaling to the caller.
fn fft_pow2(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    if n <= 1 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if i < j {
            buf.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let twiddles: Vec<Complex64> = (0..n / 2)
        .map(|k| {
            let (s, c) = libm::sincos(2.0 * PI * k as f64 / n as f64);
            Complex64::new(c, sign * s)
        })
        .collect();
    let mut len = 2;
    while len <= n {
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..len / 2 {
                let w = twiddles[k * stride];
                let u = buf[start + k];
                let v = buf[start + k + len / 2] * w;
                buf[start + k] = u + v;
                buf[start + k + len / 2] = u - v;
            }
        }
        len <<= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn signal(n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|k| Complex64::new(((k * 7 + 3) % 11) as f64 - 5.0, ((k * 5) % 3) as f64))
            .collect()
    }

    #[test]
    fn fast_matches_direct() {
        for n in [1, 2, 5, 64, 65, 97, 128, 331, 1000, 1031] {
            let x = signal(n);
            let fast = dft(&x);
            let slow = dft_direct(&x);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).norm() < 1e-9, "n = {n}");
            }
        }
    }
}
