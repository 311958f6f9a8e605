//! Modular arithmetic primitives: Legendre/Jacobi symbols, prime
//! enumeration, modular inverses and CRT coefficients.
//!
//! Symbols are table-cached per modulus where scans need them; the generic
//! entry points work on `i128` so that norm-form values from desk-scale
//! boxes (well below 2^127) never need big-integer reduction in hot loops.

/// Legendre symbol (a/p) for an odd prime p, via Euler's criterion.
pub fn legendre(a: i128, p: u64) -> i8 {
    debug_assert!(p > 2 && p % 2 == 1);
    let r = a.rem_euclid(p as i128) as u64;
    if r == 0 {
        return 0;
    }
    let e = pow_mod(r, (p - 1) / 2, p);
    if e == 1 {
        1
    } else {
        -1
    }
}

/// Full table `t[a] = (a/p)` for `a` in `0..p`.
pub fn legendre_table(p: u64) -> Vec<i8> {
    let mut t = vec![-1i8; p as usize];
    t[0] = 0;
    // squares get +1; everything else stays -1
    for a in 1..p {
        let sq = (a as u128 * a as u128 % p as u128) as usize;
        t[sq] = 1;
    }
    t
}

/// Jacobi symbol (a/m) for odd positive m (not necessarily square-free).
/// Handles negative `a` through (-1/m) = (-1)^((m-1)/2).
pub fn jacobi(a: i128, m: u64) -> i8 {
    assert!(m % 2 == 1 && m > 0, "Jacobi symbol needs odd positive modulus");
    let mut acc = 1i8;
    let mut num = a.rem_euclid(m as i128) as u64;
    let mut den = m;
    if den == 1 {
        return 1;
    }
    loop {
        num %= den;
        if num == 0 {
            return if den == 1 { acc } else { 0 };
        }
        while num % 2 == 0 {
            num /= 2;
            if den % 8 == 3 || den % 8 == 5 {
                acc = -acc;
            }
        }
        if num == 1 {
            return acc;
        }
        if num % 4 == 3 && den % 4 == 3 {
            acc = -acc;
        }
        std::mem::swap(&mut num, &mut den);
    }
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

/// Modular inverse of `a` mod `m` for gcd(a, m) = 1.
pub fn inv_mod(a: u64, m: u64) -> u64 {
    let (g, x, _) = ext_gcd(a as i128, m as i128);
    assert_eq!(g, 1, "inv_mod of non-unit {a} mod {m}");
    x.rem_euclid(m as i128) as u64
}

pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a.abs(), if a >= 0 { 1 } else { -1 }, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// gcd of three residues with the modulus last, e.g. (s, t, p).
pub fn gcd3(a: u64, b: u64, m: u64) -> u64 {
    gcd_u64(gcd_u64(a, b), m)
}

/// All primes in the inclusive range `[lo, hi]` by a segmented sieve.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || hi < lo {
        return Vec::new();
    }
    let lo = lo.max(2);
    let root = (hi as f64).sqrt() as u64 + 1;
    let mut small = vec![true; (root + 1) as usize];
    let mut base = Vec::new();
    for i in 2..=root {
        if small[i as usize] {
            base.push(i);
            let mut j = i * i;
            while j <= root {
                small[j as usize] = false;
                j += i;
            }
        }
    }
    let mut seg = vec![true; (hi - lo + 1) as usize];
    for &p in &base {
        let start = lo.div_ceil(p).max(2) * p;
        let mut j = start;
        while j <= hi {
            seg[(j - lo) as usize] = false;
            j += p;
        }
    }
    (lo..=hi).filter(|&x| seg[(x - lo) as usize]).collect()
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    // deterministic Miller-Rabin for u64 with the standard witness set
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// CRT unit scalings for a modulus r = p·q of two coprime factors:
/// returns (q̄ mod p, p̄ mod q).
pub fn crt_units(p: u64, q: u64) -> (u64, u64) {
    (inv_mod(q % p, p), inv_mod(p % q, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_small_oracles() {
        // (1/p) = 1 always
        for p in [3u64, 5, 7, 11, 13] {
            assert_eq!(legendre(1, p), 1);
        }
        // 3^2 = 2 mod 7, so 2 is a residue; QR set mod 7 is {1,2,4}
        assert_eq!(legendre(2, 7), 1);
        assert_eq!(legendre(3, 7), -1);
        assert_eq!(legendre(4, 7), 1);
        assert_eq!(legendre(5, 7), -1);
        // QR set mod 5 is {1,4}
        assert_eq!(legendre(2, 5), -1);
        assert_eq!(legendre(0, 11), 0);
    }

    #[test]
    fn legendre_table_matches_euler() {
        for p in [3u64, 7, 13, 31] {
            let t = legendre_table(p);
            for a in 0..p {
                assert_eq!(t[a as usize], legendre(a as i128, p), "a={a} p={p}");
            }
        }
    }

    #[test]
    fn jacobi_factors_over_primes() {
        for (p, q) in [(3u64, 5u64), (7, 11), (5, 13)] {
            for n in -40i128..40 {
                let lhs = jacobi(n, p * q);
                let rhs = legendre(n, p) * legendre(n, q);
                assert_eq!(lhs, rhs, "n={n} pq={}", p * q);
            }
        }
    }

    #[test]
    fn jacobi_known_values() {
        assert_eq!(jacobi(1001, 9907), -1);
        assert_eq!(jacobi(2, 45), -1);
        assert_eq!(jacobi(3, 45), 0);
        assert_eq!(jacobi(-1, 5), 1);
        assert_eq!(jacobi(-1, 7), -1);
    }

    #[test]
    fn primes_in_interval() {
        assert_eq!(primes_in(10, 30), vec![11, 13, 17, 19, 23, 29]);
        assert_eq!(primes_in(2, 2), vec![2]);
        assert!(primes_in(90, 96).is_empty());
        for p in primes_in(2, 500) {
            assert!(is_prime_u64(p));
        }
    }

    #[test]
    fn inverse_and_crt() {
        for m in [5u64, 7, 97, 101] {
            for a in 1..m {
                assert_eq!(mul_mod(a, inv_mod(a, m), m), 1);
            }
        }
        let (qb, pb) = crt_units(7, 11);
        assert_eq!(mul_mod(qb, 11 % 7, 7), 1);
        assert_eq!(mul_mod(pb, 7, 11), 1);
    }
}
