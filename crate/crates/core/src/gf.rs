//! Finite-field arithmetic: the prime fields F_p and explicit extensions
//! F_{p^m} = F_p[t]/(g), together with the univariate polynomial machinery
//! needed to split norm forms into linear factors — square-free tests,
//! distinct-degree factor profiles, and root extraction in a given
//! extension by equal-degree splitting.

use crate::modarith::{inv_mod, mul_mod};
use crate::rng::Rng;
use num_bigint::BigUint;
use num_traits::{One, Zero};

// ---------------------------------------------------------------------------
// univariate polynomials over F_p  (Vec<u64>, lowest first)
// ---------------------------------------------------------------------------

pub fn fp_norm(p: u64, mut f: Vec<u64>) -> Vec<u64> {
    for c in f.iter_mut() {
        *c %= p;
    }
    while f.len() > 1 && *f.last().unwrap() == 0 {
        f.pop();
    }
    if f.is_empty() {
        f.push(0);
    }
    f
}

pub fn fp_deg(f: &[u64]) -> usize {
    for i in (0..f.len()).rev() {
        if f[i] != 0 {
            return i;
        }
    }
    0
}

pub fn fp_is_zero(f: &[u64]) -> bool {
    f.iter().all(|&c| c == 0)
}

pub fn fp_mul(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    if fp_is_zero(a) || fp_is_zero(b) {
        return vec![0];
    }
    let mut out = vec![0u64; fp_deg(a) + fp_deg(b) + 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y == 0 {
                continue;
            }
            out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    fp_norm(p, out)
}

pub fn fp_div_rem(p: u64, a: &[u64], b: &[u64]) -> (Vec<u64>, Vec<u64>) {
    assert!(!fp_is_zero(b));
    let db = fp_deg(b);
    let lc_inv = inv_mod(b[db], p);
    let mut rem = fp_norm(p, a.to_vec());
    let mut quo = vec![0u64; a.len()];
    loop {
        let dr = fp_deg(&rem);
        if fp_is_zero(&rem) || dr < db {
            break;
        }
        let c = mul_mod(rem[dr], lc_inv, p);
        quo[dr - db] = c;
        for k in 0..=db {
            let t = mul_mod(c, b[k] % p, p);
            rem[dr - db + k] = (rem[dr - db + k] + p - t) % p;
        }
    }
    (fp_norm(p, quo), fp_norm(p, rem))
}

pub fn fp_gcd(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut x = fp_norm(p, a.to_vec());
    let mut y = fp_norm(p, b.to_vec());
    while !fp_is_zero(&y) {
        let (_, r) = fp_div_rem(p, &x, &y);
        x = y;
        y = r;
    }
    if !fp_is_zero(&x) {
        let inv = inv_mod(x[fp_deg(&x)], p);
        x = fp_norm(p, x.iter().map(|&c| mul_mod(c, inv, p)).collect());
    }
    x
}

pub fn fp_derivative(p: u64, f: &[u64]) -> Vec<u64> {
    if f.len() <= 1 {
        return vec![0];
    }
    fp_norm(
        p,
        f.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| mul_mod(c % p, i as u64 % p, p))
            .collect(),
    )
}

pub fn fp_is_squarefree(p: u64, f: &[u64]) -> bool {
    let d = fp_derivative(p, f);
    if fp_is_zero(&d) {
        return fp_deg(f) == 0;
    }
    fp_deg(&fp_gcd(p, f, &d)) == 0
}

/// `base(x)^e mod f` with a big exponent.
pub fn fp_pow_mod_big(p: u64, base: &[u64], e: &BigUint, f: &[u64]) -> Vec<u64> {
    if e.is_zero() {
        return vec![1];
    }
    let mut acc = vec![1u64];
    let b = fp_div_rem(p, base, f).1;
    let bits = e.bits();
    for i in (0..bits).rev() {
        acc = fp_div_rem(p, &fp_mul(p, &acc, &acc), f).1;
        if e.bit(i) {
            acc = fp_div_rem(p, &fp_mul(p, &acc, &b), f).1;
        }
    }
    acc
}

/// `x^(p^k) mod f` by k successive p-power maps.
fn fp_pow_x_pk(p: u64, f: &[u64], k: usize) -> Vec<u64> {
    let mut acc = vec![0, 1]; // x
    for _ in 0..k {
        acc = fp_pow_mod_big(p, &acc, &BigUint::from(p), f);
    }
    acc
}

/// Degrees of the irreducible factors of a square-free `f` over F_p
/// (distinct-degree profile, degrees listed with multiplicity).
pub fn fp_factor_degrees(p: u64, f: &[u64]) -> Vec<usize> {
    let mut h = fp_norm(p, f.to_vec());
    let lc = h[fp_deg(&h)];
    if lc != 1 {
        let inv = inv_mod(lc, p);
        h = fp_norm(p, h.iter().map(|&c| mul_mod(c, inv, p)).collect());
    }
    let mut degrees = Vec::new();
    let mut d = 0usize;
    let mut xq = vec![0u64, 1]; // x^(p^d) mod h, updated as h shrinks
    while fp_deg(&h) > 0 {
        d += 1;
        if 2 * d > fp_deg(&h) {
            degrees.push(fp_deg(&h));
            break;
        }
        xq = fp_pow_mod_big(p, &xq, &BigUint::from(p), &h);
        // gcd(x^(p^d) - x, h)
        let mut diff = xq.clone();
        if diff.len() < 2 {
            diff.resize(2, 0);
        }
        diff[1] = (diff[1] + p - 1) % p;
        let g = fp_gcd(p, &diff, &h);
        let gd = fp_deg(&g);
        if gd > 0 {
            for _ in 0..gd / d {
                degrees.push(d);
            }
            let (q, r) = fp_div_rem(p, &h, &g);
            debug_assert!(fp_is_zero(&r));
            h = q;
            if fp_deg(&h) == 0 {
                break;
            }
            xq = fp_div_rem(p, &xq, &h).1;
        }
    }
    degrees.sort_unstable();
    degrees
}

/// Least m such that a square-free `f` splits completely over F_{p^m}.
pub fn fp_splitting_degree(p: u64, f: &[u64]) -> usize {
    fp_factor_degrees(p, f).into_iter().fold(1, num_integer::lcm)
}

pub fn fp_is_irreducible(p: u64, g: &[u64]) -> bool {
    let m = fp_deg(g);
    if m == 0 {
        return false;
    }
    if m == 1 {
        return true;
    }
    // x^(p^m) ≡ x mod g, and gcd(x^(p^(m/ℓ)) - x, g) = 1 for primes ℓ | m
    let xq = fp_pow_x_pk(p, g, m);
    let mut diff = xq;
    if diff.len() < 2 {
        diff.resize(2, 0);
    }
    diff[1] = (diff[1] + p - 1) % p;
    if !fp_is_zero(&fp_div_rem(p, &diff, g).1) {
        return false;
    }
    let mut mm = m;
    let mut ell = 2;
    let mut prime_divs = Vec::new();
    while mm > 1 {
        if mm % ell == 0 {
            prime_divs.push(ell);
            while mm % ell == 0 {
                mm /= ell;
            }
        }
        ell += 1;
    }
    for ell in prime_divs {
        let k = m / ell;
        let xk = fp_pow_x_pk(p, g, k);
        let mut d = xk;
        if d.len() < 2 {
            d.resize(2, 0);
        }
        d[1] = (d[1] + p - 1) % p;
        if fp_deg(&fp_gcd(p, &d, g)) > 0 {
            return false;
        }
    }
    true
}

/// Deterministic monic irreducible polynomial of degree m over F_p.
pub fn irreducible_poly(p: u64, m: usize) -> Vec<u64> {
    assert!(m >= 1);
    if m == 1 {
        return vec![0, 1];
    }
    // sparse candidates first, then a fixed pseudo-random walk
    for c in 1..p.min(64) {
        let mut g = vec![0u64; m + 1];
        g[0] = c;
        g[m] = 1;
        if fp_is_irreducible(p, &g) {
            return g;
        }
        g[1] = 1;
        if fp_is_irreducible(p, &g) {
            return g;
        }
    }
    let mut rng = Rng::new(p ^ ((m as u64) << 32) ^ 0x5eed);
    loop {
        let mut g: Vec<u64> = (0..m).map(|_| rng.below(p)).collect();
        g.push(1);
        if fp_is_irreducible(p, &g) {
            return g;
        }
    }
}

// ---------------------------------------------------------------------------
// the extension field F_{p^m}
// ---------------------------------------------------------------------------

/// Explicit extension F_{p^m} = F_p[t]/(g).
#[derive(Clone, Debug)]
pub struct GfCtx {
    pub p: u64,
    pub m: usize,
    pub modulus: Vec<u64>,
}

/// Element of F_{p^m}: exactly `m` coefficients over F_p, lowest first.
pub type GfEl = Vec<u64>;

impl GfCtx {
    pub fn new(p: u64, m: usize) -> Self {
        let modulus = irreducible_poly(p, m);
        GfCtx { p, m, modulus }
    }

    pub fn order(&self) -> BigUint {
        BigUint::from(self.p).pow(self.m as u32)
    }

    pub fn zero(&self) -> GfEl {
        vec![0; self.m]
    }

    pub fn one(&self) -> GfEl {
        let mut e = self.zero();
        e[0] = 1;
        e
    }

    pub fn from_u64(&self, c: u64) -> GfEl {
        let mut e = self.zero();
        e[0] = c % self.p;
        e
    }

    pub fn is_zero(&self, a: &GfEl) -> bool {
        a.iter().all(|&c| c == 0)
    }

    /// Lies in the prime field (all higher coefficients vanish)?
    pub fn in_prime_field(&self, a: &GfEl) -> Option<u64> {
        if a[1..].iter().all(|&c| c == 0) {
            Some(a[0])
        } else {
            None
        }
    }

    pub fn add(&self, a: &GfEl, b: &GfEl) -> GfEl {
        a.iter().zip(b).map(|(&x, &y)| (x + y) % self.p).collect()
    }

    pub fn sub(&self, a: &GfEl, b: &GfEl) -> GfEl {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| (x + self.p - y) % self.p)
            .collect()
    }

    pub fn neg(&self, a: &GfEl) -> GfEl {
        a.iter().map(|&x| (self.p - x) % self.p).collect()
    }

    pub fn mul(&self, a: &GfEl, b: &GfEl) -> GfEl {
        let prod = fp_mul(self.p, a, b);
        let (_, mut r) = fp_div_rem(self.p, &prod, &self.modulus);
        r.resize(self.m, 0);
        r
    }

    pub fn scale(&self, a: &GfEl, k: u64) -> GfEl {
        a.iter().map(|&x| mul_mod(x, k % self.p, self.p)).collect()
    }

    pub fn inv(&self, a: &GfEl) -> GfEl {
        assert!(!self.is_zero(a), "inverse of zero in GF(p^m)");
        let p = self.p;
        let mut r0 = self.modulus.clone();
        let mut r1 = fp_norm(p, a.clone());
        let mut s0 = vec![0u64];
        let mut s1 = vec![1u64];
        while !fp_is_zero(&r1) {
            let (q, r) = fp_div_rem(p, &r0, &r1);
            let qs = fp_mul(p, &q, &s1);
            let mut ns = s0.clone();
            ns.resize(ns.len().max(qs.len()), 0);
            for (i, &c) in qs.iter().enumerate() {
                ns[i] = (ns[i] + p - c) % p;
            }
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = fp_norm(p, ns);
        }
        let lc = r0[fp_deg(&r0)];
        let inv = inv_mod(lc, p);
        let mut out = fp_norm(p, s0.iter().map(|&c| mul_mod(c, inv, p)).collect());
        out.resize(self.m, 0);
        out
    }

    pub fn div(&self, a: &GfEl, b: &GfEl) -> GfEl {
        self.mul(a, &self.inv(b))
    }

    pub fn pow_big(&self, a: &GfEl, e: &BigUint) -> GfEl {
        let mut acc = self.one();
        if e.is_zero() {
            return acc;
        }
        let bits = e.bits();
        for i in (0..bits).rev() {
            acc = self.mul(&acc, &acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    /// Quadratic character of a (1, -1, or 0) via a^((q-1)/2).
    pub fn quadratic_char(&self, a: &GfEl) -> i8 {
        if self.is_zero(a) {
            return 0;
        }
        let e = (self.order() - BigUint::one()) / BigUint::from(2u8);
        let v = self.pow_big(a, &e);
        if v == self.one() {
            1
        } else {
            -1
        }
    }

    /// Flat index of an element (coefficients as base-p digits), for
    /// indexing fiber-count arrays over F_{p^m}.
    pub fn index(&self, a: &GfEl) -> usize {
        let mut idx = 0usize;
        for &c in a.iter().rev() {
            idx = idx * self.p as usize + c as usize;
        }
        idx
    }

    pub fn from_index(&self, mut idx: usize) -> GfEl {
        let mut e = self.zero();
        for c in e.iter_mut() {
            *c = (idx % self.p as usize) as u64;
            idx /= self.p as usize;
        }
        e
    }

    // -- polynomial utilities over this field (coefficients lowest first) --

    pub fn poly_norm(&self, mut f: Vec<GfEl>) -> Vec<GfEl> {
        while f.len() > 1 && self.is_zero(f.last().unwrap()) {
            f.pop();
        }
        if f.is_empty() {
            f.push(self.zero());
        }
        f
    }

    pub fn poly_deg(&self, f: &[GfEl]) -> usize {
        for i in (0..f.len()).rev() {
            if !self.is_zero(&f[i]) {
                return i;
            }
        }
        0
    }

    pub fn poly_is_zero(&self, f: &[GfEl]) -> bool {
        f.iter().all(|c| self.is_zero(c))
    }

    pub fn poly_mul(&self, a: &[GfEl], b: &[GfEl]) -> Vec<GfEl> {
        if self.poly_is_zero(a) || self.poly_is_zero(b) {
            return vec![self.zero()];
        }
        let mut out = vec![self.zero(); self.poly_deg(a) + self.poly_deg(b) + 1];
        for (i, x) in a.iter().enumerate() {
            if self.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if self.is_zero(y) {
                    continue;
                }
                let t = self.mul(x, y);
                out[i + j] = self.add(&out[i + j], &t);
            }
        }
        self.poly_norm(out)
    }

    pub fn poly_div_rem(&self, a: &[GfEl], b: &[GfEl]) -> (Vec<GfEl>, Vec<GfEl>) {
        assert!(!self.poly_is_zero(b));
        let db = self.poly_deg(b);
        let lc_inv = self.inv(&b[db]);
        let mut rem: Vec<GfEl> = a.to_vec();
        let mut quo = vec![self.zero(); a.len()];
        loop {
            let dr = self.poly_deg(&rem);
            if self.poly_is_zero(&rem) || dr < db {
                break;
            }
            let c = self.mul(&rem[dr], &lc_inv);
            quo[dr - db] = c.clone();
            for k in 0..=db {
                let t = self.mul(&c, &b[k]);
                rem[dr - db + k] = self.sub(&rem[dr - db + k], &t);
            }
        }
        (self.poly_norm(quo), self.poly_norm(rem))
    }

    pub fn poly_gcd(&self, a: &[GfEl], b: &[GfEl]) -> Vec<GfEl> {
        let mut x = self.poly_norm(a.to_vec());
        let mut y = self.poly_norm(b.to_vec());
        while !self.poly_is_zero(&y) {
            let (_, r) = self.poly_div_rem(&x, &y);
            x = y;
            y = r;
        }
        if !self.poly_is_zero(&x) {
            let inv = self.inv(&x[self.poly_deg(&x)]);
            x = self.poly_norm(x.iter().map(|c| self.mul(c, &inv)).collect());
        }
        x
    }

    pub fn poly_pow_mod(&self, base: &[GfEl], e: &BigUint, f: &[GfEl]) -> Vec<GfEl> {
        if e.is_zero() {
            return vec![self.one()];
        }
        let mut acc = vec![self.one()];
        let b = self.poly_div_rem(base, f).1;
        let bits = e.bits();
        for i in (0..bits).rev() {
            acc = self.poly_div_rem(&self.poly_mul(&acc, &acc), f).1;
            if e.bit(i) {
                acc = self.poly_div_rem(&self.poly_mul(&acc, &b), f).1;
            }
        }
        acc
    }

    pub fn poly_eval(&self, f: &[GfEl], x: &GfEl) -> GfEl {
        let mut acc = self.zero();
        for c in f.iter().rev() {
            acc = self.add(&self.mul(&acc, x), c);
        }
        acc
    }

    /// All distinct roots of `f` in this field, by splitting the
    /// roots-in-field part with random quadratic-residue probes.
    pub fn poly_roots(&self, f: &[GfEl], rng: &mut Rng) -> Vec<GfEl> {
        let f = self.poly_norm(f.to_vec());
        if self.poly_deg(&f) == 0 {
            return Vec::new();
        }
        // isolate ∏ (x - root in field): gcd(x^q - x, f)
        let x = vec![self.zero(), self.one()];
        let xq = self.poly_pow_mod(&x, &self.order(), &f);
        let mut diff = xq;
        diff.resize(diff.len().max(2), self.zero());
        diff[1] = self.sub(&diff[1], &self.one());
        let lin = self.poly_gcd(&diff, &f);
        let mut roots = Vec::new();
        self.split_linear(&lin, rng, &mut roots);
        roots.sort();
        roots
    }

    fn split_linear(&self, f: &[GfEl], rng: &mut Rng, out: &mut Vec<GfEl>) {
        let d = self.poly_deg(f);
        if d == 0 {
            return;
        }
        if d == 1 {
            let r = self.neg(&self.div(&f[0], &f[1]));
            out.push(r);
            return;
        }
        if self.is_zero(&f[0]) {
            out.push(self.zero());
            let (q, _) = self.poly_div_rem(f, &[self.zero(), self.one()]);
            self.split_linear(&q, rng, out);
            return;
        }
        let e = (self.order() - BigUint::one()) / BigUint::from(2u8);
        loop {
            // gcd((x+δ)^((q-1)/2) - 1, f) splits for most random δ
            let delta: GfEl = (0..self.m).map(|_| rng.below(self.p)).collect();
            let base = vec![delta, self.one()];
            let mut w = self.poly_pow_mod(&base, &e, f);
            if w.is_empty() {
                w.push(self.zero());
            }
            w[0] = self.sub(&w[0], &self.one());
            let g = self.poly_gcd(&w, f);
            let dg = self.poly_deg(&g);
            if dg > 0 && dg < d {
                let (q, _) = self.poly_div_rem(f, &g);
                self.split_linear(&g, rng, out);
                self.split_linear(&q, rng, out);
                return;
            }
        }
    }

    /// Lift an F_p polynomial into this field's coefficient ring.
    pub fn lift_poly(&self, f: &[u64]) -> Vec<GfEl> {
        f.iter().map(|&c| self.from_u64(c)).collect()
    }
}
