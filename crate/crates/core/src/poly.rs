//! Exact polynomial arithmetic over the integers and rationals, plus the
//! generic polynomial numerics (floating root finding and high-precision
//! refinement) that the field layer builds on.
//!
//! Univariate polynomials store coefficients lowest-degree first. Bivariate
//! integer polynomials are dense rectangular grids `coeff[i][j]·X^i·Y^j`.

use crate::bigfloat::{Bf, Cf};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

// ---------------------------------------------------------------------------
// univariate over Q
// ---------------------------------------------------------------------------

/// Univariate polynomial over the rationals, coefficients lowest first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QPoly(pub Vec<BigRational>);

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl QPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.len() > 1 && coeffs.last().unwrap().is_zero() {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigRational::zero());
        }
        QPoly(coeffs)
    }

    pub fn zero() -> Self {
        QPoly(vec![BigRational::zero()])
    }

    pub fn from_int_slice(c: &[i64]) -> Self {
        QPoly::new(c.iter().map(|&x| q(x)).collect())
    }

    pub fn from_bigint_slice(c: &[BigInt]) -> Self {
        QPoly::new(c.iter().map(|x| BigRational::from_integer(x.clone())).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn degree(&self) -> usize {
        for i in (0..self.0.len()).rev() {
            if !self.0[i].is_zero() {
                return i;
            }
        }
        0
    }

    pub fn lc(&self) -> BigRational {
        self.0[self.degree()].clone()
    }

    pub fn is_monic(&self) -> bool {
        !self.is_zero() && self.lc().is_one()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> QPoly {
        if self.degree() == 0 {
            return QPoly::zero();
        }
        QPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn add(&self, o: &QPoly) -> QPoly {
        let n = self.0.len().max(o.0.len());
        QPoly::new(
            (0..n)
                .map(|i| {
                    let a = self.0.get(i).cloned().unwrap_or_else(BigRational::zero);
                    let b = o.0.get(i).cloned().unwrap_or_else(BigRational::zero);
                    a + b
                })
                .collect(),
        )
    }

    pub fn sub(&self, o: &QPoly) -> QPoly {
        self.add(&o.scale(&-BigRational::one()))
    }

    pub fn scale(&self, k: &BigRational) -> QPoly {
        QPoly::new(self.0.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, o: &QPoly) -> QPoly {
        if self.is_zero() || o.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.degree() + o.degree() + 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = &out[i + j] + a * b;
            }
        }
        QPoly::new(out)
    }

    /// Division with remainder; divisor must be nonzero.
    pub fn div_rem(&self, d: &QPoly) -> (QPoly, QPoly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.degree();
        let lc_inv = BigRational::one() / d.lc();
        let mut rem = self.0.clone();
        let mut quo = vec![BigRational::zero(); self.0.len()];
        let mut rd = self.degree();
        while !QPoly(rem.clone()).is_zero() && rd >= dd {
            let coef = &rem[rd] * &lc_inv;
            if !coef.is_zero() {
                quo[rd - dd] = coef.clone();
                for (k, dc) in d.0.iter().enumerate() {
                    rem[rd - dd + k] = &rem[rd - dd + k] - &coef * dc;
                }
            }
            if rd == 0 {
                break;
            }
            rd -= 1;
        }
        (QPoly::new(quo), QPoly::new(rem))
    }

    /// Monic gcd via the Euclidean algorithm.
    pub fn gcd(&self, o: &QPoly) -> QPoly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            let lc = a.lc();
            a.scale(&(BigRational::one() / lc))
        }
    }

    /// Resultant of `self` and `o` by the Euclidean recursion.
    pub fn resultant(&self, o: &QPoly) -> BigRational {
        fn go(f: &QPoly, g: &QPoly) -> BigRational {
            if f.is_zero() || g.is_zero() {
                return BigRational::zero();
            }
            let (df, dg) = (f.degree(), g.degree());
            if dg == 0 {
                return pow_q(&g.0[0], df as u32);
            }
            if df == 0 {
                return pow_q(&f.0[0], dg as u32);
            }
            if df < dg {
                let sign = if (df * dg) % 2 == 1 { -BigRational::one() } else { BigRational::one() };
                return sign * go(g, f);
            }
            let (_, r) = f.div_rem(g);
            if r.is_zero() {
                return BigRational::zero();
            }
            let dr = r.degree();
            let sign = if (df * dg) % 2 == 1 { -BigRational::one() } else { BigRational::one() };
            sign * pow_q(&g.lc(), (df - dr) as u32) * go(g, &r)
        }
        go(self, o)
    }

    /// Discriminant `(-1)^(n(n-1)/2) · res(f, f') / lc(f)`.
    pub fn discriminant(&self) -> BigRational {
        let n = self.degree();
        if n == 0 {
            return BigRational::zero();
        }
        let res = self.resultant(&self.derivative());
        let sign = if (n * (n - 1) / 2) % 2 == 1 {
            -BigRational::one()
        } else {
            BigRational::one()
        };
        sign * res / self.lc()
    }

    /// Evaluate at a complex point in f64.
    pub fn eval_c64(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.0.iter().rev() {
            acc = acc * z + Complex64::new(rational_to_f64(c), 0.0);
        }
        acc
    }

    /// Evaluate at a high-precision complex point.
    pub fn eval_cf(&self, z: &Cf, prec: u32) -> Cf {
        let mut acc = Cf::zero();
        for c in self.0.iter().rev() {
            let cf = Cf::new(Bf::from_ratio(c, prec), Bf::zero());
            acc = acc.mul(z, prec).add(&cf, prec);
        }
        acc
    }
}

pub fn pow_q(b: &BigRational, e: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= b;
    }
    acc
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    Bf::from_ratio(r, 64).to_f64()
}

// ---------------------------------------------------------------------------
// integer univariate helpers
// ---------------------------------------------------------------------------

/// Monic integer polynomial, coefficients lowest first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IPoly(pub Vec<BigInt>);

impl IPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.len() > 1 && coeffs.last().unwrap().is_zero() {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigInt::zero());
        }
        IPoly(coeffs)
    }

    pub fn from_i64(c: &[i64]) -> Self {
        IPoly::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn degree(&self) -> usize {
        for i in (0..self.0.len()).rev() {
            if !self.0[i].is_zero() {
                return i;
            }
        }
        0
    }

    pub fn is_monic(&self) -> bool {
        self.0[self.degree()].is_one()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn to_qpoly(&self) -> QPoly {
        QPoly::from_bigint_slice(&self.0)
    }

    /// Compose: self(g(x)) reduced mod `modulus` (all monic integer polys).
    pub fn compose_mod(&self, g: &QPoly, modulus: &QPoly) -> QPoly {
        let mut acc = QPoly::zero();
        for c in self.0.iter().rev() {
            acc = acc.mul(g);
            acc = acc.add(&QPoly::new(vec![BigRational::from_integer(c.clone())]));
            let (_, r) = acc.div_rem(modulus);
            acc = r;
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// numerical roots
// ---------------------------------------------------------------------------

/// All complex roots of a monic polynomial by Durand–Kerner in f64.
/// Assumes simple roots (every caller factors or verifies square-freeness).
pub fn roots_f64(f: &QPoly) -> Vec<Complex64> {
    let n = f.degree();
    assert!(n >= 1);
    let lc = rational_to_f64(&f.lc());
    let coeffs: Vec<f64> = f.0.iter().map(rational_to_f64).collect();
    let bound = 1.0
        + coeffs[..n]
            .iter()
            .map(|c| (c / lc).abs())
            .fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| seed.powu(k as u32 + 1) * bound)
        .collect();
    for _ in 0..600 {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let mut denom = Complex64::new(lc, 0.0);
            for j in 0..n {
                if j != i {
                    denom *= z[i] - z[j];
                }
            }
            let w = f.eval_c64(z[i]) / denom;
            z[i] -= w;
            worst = worst.max(w.norm());
        }
        if worst < 1e-13 * bound.max(1.0) {
            break;
        }
    }
    // deterministic order: by real part, then imaginary part
    z.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    z
}

/// Newton-refine f64 root seeds to `prec` bits; returns roots with
/// inclusion radii `n·|f(z)| / ∏_{j≠i} |z - z_j|` (a standard
/// Weierstrass-correction disk, reported with a 2x safety factor).
pub fn refine_roots(f: &QPoly, seeds: &[Complex64], prec: u32) -> (Vec<Cf>, Vec<Bf>) {
    let df = f.derivative();
    let iters = 3 + (prec as f64 / 40.0).log2().ceil().max(0.0) as usize;
    let mut roots: Vec<Cf> = seeds
        .iter()
        .map(|z| {
            let mut zc = Cf::from_f64(z.re, z.im);
            for _ in 0..iters {
                let fz = f.eval_cf(&zc, prec);
                let dz = df.eval_cf(&zc, prec);
                zc = zc.sub(&fz.div(&dz, prec), prec);
            }
            zc
        })
        .collect();
    // symmetrize conjugate pairs so real polynomials keep exact symmetry
    for z in roots.iter_mut() {
        if z.im.abs().lt(&Bf::pow2(-(prec as i64) / 2)) {
            z.im = Bf::zero();
        }
    }
    let n = roots.len();
    let radii: Vec<Bf> = (0..n)
        .map(|i| {
            let fz = f.eval_cf(&roots[i], prec).abs(prec);
            let mut denom = Bf::from_ratio(&f.lc(), prec).abs();
            for j in 0..n {
                if j != i {
                    denom = denom.mul(&roots[i].sub(&roots[j], prec).abs(prec), prec);
                }
            }
            fz.div(&denom, prec).mul_i64(2 * n as i64, prec)
        })
        .collect();
    (roots, radii)
}

// ---------------------------------------------------------------------------
// irreducibility over Q (monic integer polynomials)
// ---------------------------------------------------------------------------

/// Test irreducibility of a monic integer polynomial over the rationals.
///
/// Any monic integer factor's coefficients are elementary symmetric sums of
/// a subset of the complex roots, so each subset either rounds to an integer
/// polynomial that exactly divides `f`, or its coefficients sit away from
/// the integers by more than the certified root error. Root precision
/// escalates until every subset is decided.
pub fn irreducible_factor(f: &IPoly) -> Option<IPoly> {
    let n = f.degree();
    assert!(f.is_monic(), "irreducibility test expects monic input");
    if n <= 1 {
        return None;
    }
    let fq = f.to_qpoly();
    let seeds = roots_f64(&fq);
    let mut prec = 128u32;
    loop {
        let (roots, radii) = refine_roots(&fq, &seeds, prec);
        let max_rad = radii
            .iter()
            .fold(Bf::zero(), |a, b| if a.lt(b) { b.clone() } else { a });
        // coefficient error from root error: crude bound 4^n · maxroot^n · rad
        let max_abs = roots
            .iter()
            .map(|z| z.abs(prec))
            .fold(Bf::from_i64(1), |a, b| if a.lt(&b) { b } else { a });
        let mut blow = Bf::from_i64(1);
        for _ in 0..n {
            blow = blow.mul(&max_abs.mul(&Bf::from_i64(4), prec), prec);
        }
        let coeff_err = blow.mul(&max_rad, prec);
        if Bf::pow2(-8).lt(&coeff_err) {
            prec *= 2;
            assert!(prec <= 1 << 14, "root precision runaway in irreducibility test");
            continue;
        }
        let mut undecided = false;
        for mask in 1u32..(1 << n) - 1 {
            let size = mask.count_ones() as usize;
            if size > n / 2 || (size == n - size && mask & 1 == 0) {
                continue; // complementary subset covers it
            }
            // build monic product over the subset
            let mut coeffs = vec![Cf::zero(); size + 1];
            coeffs[0] = Cf::new(Bf::from_i64(1), Bf::zero());
            let mut used = 0usize;
            for (i, root) in roots.iter().enumerate() {
                if mask >> i & 1 == 0 {
                    continue;
                }
                used += 1;
                for k in (0..used).rev() {
                    let t = coeffs[k].mul(root, prec);
                    coeffs[k + 1] = coeffs[k + 1].sub(&t, prec);
                }
            }
            coeffs.reverse(); // lowest-degree first
            let mut int_coeffs = Vec::with_capacity(size + 1);
            let mut near_integer = true;
            for c in &coeffs {
                let (int, defect) = c.re.round_int();
                let off_axis = coeff_err.lt(&c.im.abs());
                let far = coeff_err.lt(&defect) && Bf::pow2(-6).lt(&defect);
                if off_axis || far {
                    near_integer = false;
                    break;
                }
                // ambiguous zone: defect above certified error but below 2^-6
                if coeff_err.lt(&defect) {
                    undecided = true;
                    near_integer = false;
                    break;
                }
                int_coeffs.push(int);
            }
            if near_integer {
                let cand = IPoly::new(int_coeffs);
                if cand.degree() >= 1 && divides_exactly(f, &cand) {
                    return Some(cand);
                }
            }
        }
        if !undecided {
            return None;
        }
        prec *= 2;
        assert!(prec <= 1 << 14, "root precision runaway in irreducibility test");
    }
}

fn divides_exactly(f: &IPoly, g: &IPoly) -> bool {
    let (_, r) = f.to_qpoly().div_rem(&g.to_qpoly());
    r.is_zero()
}

// ---------------------------------------------------------------------------
// bivariate over Z
// ---------------------------------------------------------------------------

/// Dense bivariate integer polynomial: `coeff[i][j]·X^i·Y^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IPoly2 {
    pub coeff: Vec<Vec<BigInt>>,
}

impl IPoly2 {
    pub fn new(coeff: Vec<Vec<BigInt>>) -> Self {
        IPoly2 { coeff }
    }

    pub fn zero() -> Self {
        IPoly2 { coeff: vec![vec![BigInt::zero()]] }
    }

    pub fn deg_x(&self) -> usize {
        for i in (0..self.coeff.len()).rev() {
            if self.coeff[i].iter().any(|c| !c.is_zero()) {
                return i;
            }
        }
        0
    }

    pub fn deg_y(&self) -> usize {
        let mut d = 0;
        for row in &self.coeff {
            for (j, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    d = d.max(j);
                }
            }
        }
        d
    }

    pub fn total_degree(&self) -> usize {
        let mut d = 0;
        for (i, row) in self.coeff.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    d = d.max(i + j);
                }
            }
        }
        d
    }

    pub fn get(&self, i: usize, j: usize) -> BigInt {
        self.coeff
            .get(i)
            .and_then(|r| r.get(j))
            .cloned()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        // Horner in X of Horner-in-Y rows
        let mut acc = BigInt::zero();
        for row in self.coeff.iter().rev() {
            let mut rv = BigInt::zero();
            for c in row.iter().rev() {
                rv = rv * y + c;
            }
            acc = acc * x + rv;
        }
        acc
    }

    /// `i128` evaluation for hot loops; `None` on overflow.
    pub fn eval_i128(&self, x: i128, y: i128) -> Option<i128> {
        let mut acc: i128 = 0;
        for row in self.coeff.iter().rev() {
            let mut rv: i128 = 0;
            for c in row.iter().rev() {
                let ci = big_to_i128(c)?;
                rv = rv.checked_mul(y)?.checked_add(ci)?;
            }
            acc = acc.checked_mul(x)?.checked_add(rv)?;
        }
        Some(acc)
    }

    /// Substitute a rational value for Y, returning a polynomial in X.
    pub fn eval_y(&self, y: &BigRational) -> QPoly {
        QPoly::new(
            self.coeff
                .iter()
                .map(|row| {
                    let mut rv = BigRational::zero();
                    for c in row.iter().rev() {
                        rv = rv * y + BigRational::from_integer(c.clone());
                    }
                    rv
                })
                .collect(),
        )
    }

    pub fn is_homogeneous(&self, d: usize) -> bool {
        for (i, row) in self.coeff.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if !c.is_zero() && i + j != d {
                    return false;
                }
            }
        }
        true
    }

    /// Square root attempt: returns G with G² = self, treating self as a
    /// monic polynomial of even degree in X over Q[Y]. `None` when self is
    /// not a perfect square.
    pub fn monic_sqrt(&self) -> Option<IPoly2> {
        let n = self.deg_x();
        if n % 2 != 0 || n == 0 {
            return None;
        }
        if !self.get(n, 0).is_one() || (1..=self.deg_y()).any(|j| !self.get(n, j).is_zero()) {
            return None; // not monic in X
        }
        let h = n / 2;
        // rows of self as rational Y-polynomials, index = X-degree
        let a: Vec<QPoly> = (0..=n)
            .map(|i| {
                QPoly::new(
                    (0..=self.deg_y())
                        .map(|j| BigRational::from_integer(self.get(i, j)))
                        .collect(),
                )
            })
            .collect();
        let mut c: Vec<QPoly> = vec![QPoly::zero(); h + 1];
        c[h] = QPoly::new(vec![BigRational::one()]);
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        for k in 1..=h {
            // coefficient of X^(n-k): 2·C_{h-k} + Σ_{i+j=n-k, h-k<i,j<h} C_i·C_j
            let mut acc = QPoly::zero();
            for i in (h - k + 1)..h {
                let j = n - k - i;
                if j <= h && j > h - k && j < h + 1 {
                    if j >= c.len() {
                        continue;
                    }
                    acc = acc.add(&c[i].mul(&c[j]));
                }
            }
            let ck = a[n - k].sub(&acc).scale(&half);
            c[h - k] = ck;
        }
        // verify G² = self exactly and that G has integer coefficients
        let gy = c.iter().map(|p| p.degree()).max().unwrap_or(0);
        let mut g_int = vec![vec![BigInt::zero(); gy + 1]; h + 1];
        for (i, p) in c.iter().enumerate() {
            for (j, v) in p.0.iter().enumerate() {
                if !v.is_zero() {
                    if !v.denom().is_one() {
                        return None;
                    }
                    g_int[i][j] = v.numer().clone();
                }
            }
        }
        let g = IPoly2::new(g_int);
        if g.mul(&g) == self.normalized() {
            Some(g)
        } else {
            None
        }
    }

    fn normalized(&self) -> IPoly2 {
        let dx = self.deg_x();
        let dy = self.deg_y();
        IPoly2::new(
            (0..=dx)
                .map(|i| (0..=dy).map(|j| self.get(i, j)).collect())
                .collect(),
        )
    }

    pub fn mul(&self, o: &IPoly2) -> IPoly2 {
        let dx = self.deg_x() + o.deg_x();
        let dy = self.deg_y() + o.deg_y();
        let mut out = vec![vec![BigInt::zero(); dy + 1]; dx + 1];
        for (i1, r1) in self.coeff.iter().enumerate() {
            for (j1, c1) in r1.iter().enumerate() {
                if c1.is_zero() {
                    continue;
                }
                for (i2, r2) in o.coeff.iter().enumerate() {
                    for (j2, c2) in r2.iter().enumerate() {
                        if c2.is_zero() {
                            continue;
                        }
                        out[i1 + i2][j1 + j2] += c1 * c2;
                    }
                }
            }
        }
        IPoly2::new(out).normalized()
    }

    /// Discriminant with respect to X, as a polynomial in Y, computed by
    /// evaluation at integer nodes and exact Lagrange interpolation.
    pub fn disc_x_poly(&self) -> QPoly {
        let n = self.deg_x();
        let dy = self.deg_y();
        // disc has Y-degree at most (2n-1)·dy
        let pts = (2 * n - 1) * dy + 1;
        let nodes: Vec<BigRational> = (0..pts as i64).map(q).collect();
        let vals: Vec<BigRational> = nodes
            .iter()
            .map(|y| self.eval_y(y).discriminant())
            .collect();
        lagrange_interpolate(&nodes, &vals)
    }
}

fn big_to_i128(b: &BigInt) -> Option<i128> {
    let (sign, digits) = b.to_u64_digits();
    match digits.len() {
        0 => Some(0),
        1 => Some(digits[0] as i128 * sign_val(sign)),
        2 => {
            let mag = (digits[1] as u128) << 64 | digits[0] as u128;
            if mag > i128::MAX as u128 {
                None
            } else {
                Some(mag as i128 * sign_val(sign))
            }
        }
        _ => None,
    }
}

fn sign_val(s: num_bigint::Sign) -> i128 {
    match s {
        num_bigint::Sign::Minus => -1,
        _ => 1,
    }
}

/// Exact Lagrange interpolation through distinct rational nodes.
pub fn lagrange_interpolate(xs: &[BigRational], ys: &[BigRational]) -> QPoly {
    assert_eq!(xs.len(), ys.len());
    let mut acc = QPoly::zero();
    for (i, yi) in ys.iter().enumerate() {
        if yi.is_zero() {
            continue;
        }
        let mut basis = QPoly::new(vec![BigRational::one()]);
        let mut denom = BigRational::one();
        for (j, xj) in xs.iter().enumerate() {
            if j == i {
                continue;
            }
            basis = basis.mul(&QPoly::new(vec![-xj.clone(), BigRational::one()]));
            denom *= &xs[i] - xj;
        }
        acc = acc.add(&basis.scale(&(yi / denom)));
    }
    acc
}
