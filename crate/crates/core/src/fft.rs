//! Complex DFTs used by the grid scans of the correlation sums.
//!
//! Prime-length transforms (the natural size for sums over F_p) go through
//! Bluestein's chirp-z reduction to a power-of-two FFT.

use num_complex::Complex64;
use std::f64::consts::PI;

/// In-place radix-2 FFT; `data.len()` must be a power of two.
/// `inverse` applies the conjugate transform without the 1/n scaling.
pub fn fft_pow2(data: &mut [Complex64], inverse: bool) {
    let n = data.len();
    assert!(n.is_power_of_two(), "radix-2 FFT needs power-of-two length");
    // bit reversal permutation
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            data.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * PI / len as f64;
        let wlen = Complex64::new(ang.cos(), ang.sin());
        for chunk in data.chunks_mut(len) {
            let mut w = Complex64::new(1.0, 0.0);
            let half = len / 2;
            for i in 0..half {
                let u = chunk[i];
                let v = chunk[i + half] * w;
                chunk[i] = u + v;
                chunk[i + half] = u - v;
                w *= wlen;
            }
        }
        len <<= 1;
    }
}

/// DFT of arbitrary length n: `out[k] = Σ_j in[j]·e(-jk/n)`.
///
/// Power-of-two inputs use the radix-2 kernel directly, everything else goes
/// through Bluestein. Twiddles for Bluestein use the quadratic index
/// `j²/2 mod n` evaluated with exact integer arithmetic mod 2n to avoid
/// accuracy loss at large j.
pub fn dft(input: &[Complex64]) -> Vec<Complex64> {
    let n = input.len();
    if n == 0 {
        return Vec::new();
    }
    if n.is_power_of_two() {
        let mut buf = input.to_vec();
        fft_pow2(&mut buf, false);
        return buf;
    }
    // Bluestein: x_k = e(-k²/2n) Σ_j [in_j e(-j²/2n)]·[e(+(k-j)²/2n)]
    let m = (2 * n - 1).next_power_of_two();
    let chirp: Vec<Complex64> = (0..n)
        .map(|j| {
            let idx = (j as u64 * j as u64) % (2 * n as u64);
            let ang = -PI * idx as f64 / n as f64;
            Complex64::new(ang.cos(), ang.sin())
        })
        .collect();
    let mut a = vec![Complex64::new(0.0, 0.0); m];
    for j in 0..n {
        a[j] = input[j] * chirp[j];
    }
    let mut b = vec![Complex64::new(0.0, 0.0); m];
    b[0] = chirp[0].conj();
    for j in 1..n {
        let c = chirp[j].conj();
        b[j] = c;
        b[m - j] = c;
    }
    fft_pow2(&mut a, false);
    fft_pow2(&mut b, false);
    for i in 0..m {
        a[i] *= b[i];
    }
    fft_pow2(&mut a, true);
    let scale = 1.0 / m as f64;
    (0..n).map(|k| a[k] * chirp[k] * scale).collect()
}

/// Reference quadratic-time DFT, kept as the oracle for the fast paths.
pub fn dft_naive(input: &[Complex64]) -> Vec<Complex64> {
    let n = input.len();
    (0..n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &x) in input.iter().enumerate() {
                let ang = -2.0 * PI * (j as u64 * k as u64 % n as u64) as f64 / n as f64;
                acc += x * Complex64::new(ang.cos(), ang.sin());
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn max_err(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn matches_naive_on_assorted_lengths() {
        let mut rng = Rng::new(3);
        for n in [1usize, 2, 3, 5, 7, 8, 12, 13, 17, 61, 64, 100, 127] {
            let input: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.f64() - 0.5, rng.f64() - 0.5))
                .collect();
            let fast = dft(&input);
            let slow = dft_naive(&input);
            let scale = (n as f64).sqrt();
            assert!(
                max_err(&fast, &slow) < 1e-9 * scale.max(1.0),
                "length {n} disagrees"
            );
        }
    }

    #[test]
    fn delta_transforms_to_ones() {
        let mut input = vec![Complex64::new(0.0, 0.0); 13];
        input[0] = Complex64::new(1.0, 0.0);
        for v in dft(&input) {
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }
}
