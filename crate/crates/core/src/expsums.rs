//! Complete exponential sums over F_p and square-free moduli: brute-force
//! and DFT-accelerated evaluation, square-root-cancellation ratio checks,
//! the stratification of the three-variable correlation sums, the
//! q-analogue van der Corput decomposition, and the second-moment
//! (fiber-count) machinery.
//!
//! All complex accumulation is compensated (Kahan); scans traverse grids
//! in a fixed order so reports are bit-reproducible.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{CoreError, Result};
use crate::fft::dft;
use crate::gf::GfCtx;
use crate::modarith::{crt_units, gcd3, inv_mod, jacobi, legendre_table, mul_mod};
use crate::normform::{FormModP, LinearFactorization, NormForm, StrataHypotheses};
use crate::weights::SmoothWeight;

// ---------------------------------------------------------------------------
// shared tables and compensated accumulation
// ---------------------------------------------------------------------------

/// Legendre/Jacobi symbol table and root-of-unity table for a fixed odd
/// modulus (prime or square-free composite).
#[derive(Clone, Debug)]
pub struct CharTables {
    pub r: u64,
    pub chi: Vec<i8>,
    pub e: Vec<Complex64>,
}

impl CharTables {
    pub fn new_prime(p: u64) -> Self {
        let chi = legendre_table(p);
        let e = roots_of_unity(p);
        CharTables { r: p, chi, e }
    }

    pub fn new_squarefree(r: u64) -> Self {
        let chi = (0..r).map(|n| jacobi(n as i128, r)).collect();
        let e = roots_of_unity(r);
        CharTables { r, chi, e }
    }
}

fn roots_of_unity(r: u64) -> Vec<Complex64> {
    (0..r)
        .map(|k| {
            let ang = 2.0 * PI * k as f64 / r as f64;
            Complex64::new(ang.cos(), ang.sin())
        })
        .collect()
}

#[derive(Clone, Copy, Default)]
struct Kahan {
    s: f64,
    c: f64,
}

impl Kahan {
    fn add(&mut self, v: f64) {
        let y = v - self.c;
        let t = self.s + y;
        self.c = (t - self.s) - y;
        self.s = t;
    }
}

#[derive(Clone, Copy, Default)]
struct CKahan {
    re: Kahan,
    im: Kahan,
}

impl CKahan {
    fn add(&mut self, v: Complex64) {
        self.re.add(v.re);
        self.im.add(v.im);
    }

    fn value(&self) -> Complex64 {
        Complex64::new(self.re.s, self.im.s)
    }
}

// ---------------------------------------------------------------------------
// one-variable sums  Σ_x χ(F(x,y))·e_p(sx)
// ---------------------------------------------------------------------------

/// A_s(y) = Σ_{x mod p} (F(x,y)/p)·e_p(sx), exact brute force.
pub fn sum_onevar(fm: &FormModP, tab: &CharTables, s: u64, y: u64) -> Complex64 {
    let p = fm.p;
    debug_assert_eq!(tab.r, p);
    let row = fm.row_poly(y % p);
    let mut acc = CKahan::default();
    for x in 0..p {
        let mut v = 0u64;
        for &c in row.iter().rev() {
            v = (mul_mod(v, x, p) + c) % p;
        }
        let chi = tab.chi[v as usize];
        if chi != 0 {
            let phase = tab.e[mul_mod(s % p, x, p) as usize];
            acc.add(phase * chi as f64);
        }
    }
    acc.value()
}

/// Scan of the one-variable sums over every y, with the exceptional set
/// {y : F(X,y) mod p is not square-free} ∪ (s = 0: {y : F(X,y) = c·G²}).
#[derive(Clone, Debug)]
pub struct OneVarScan {
    pub p: u64,
    pub s: u64,
    pub values: Vec<Complex64>,
    pub exceptional_y: Vec<u64>,
    /// max |A_s(y)|/√p over y off the exceptional set
    pub max_ratio_off_exceptional: f64,
}

pub fn scan_onevar(fm: &FormModP, tab: &CharTables, s: u64) -> OneVarScan {
    let p = fm.p;
    let mut values = Vec::with_capacity(p as usize);
    let mut exceptional = Vec::new();
    for y in 0..p {
        let row = fm.row_poly(y);
        let mut exc = !crate::gf::fp_is_squarefree(p, &row);
        if s == 0 && !exc && fp_is_const_times_square(p, &row) {
            exc = true;
        }
        if exc {
            exceptional.push(y);
        }
        values.push(sum_onevar(fm, tab, s, y));
    }
    let sqrt_p = (p as f64).sqrt();
    let max_ratio = (0..p)
        .filter(|y| !exceptional.contains(y))
        .map(|y| values[y as usize].norm() / sqrt_p)
        .fold(0.0, f64::max);
    OneVarScan {
        p,
        s,
        values,
        exceptional_y: exceptional,
        max_ratio_off_exceptional: max_ratio,
    }
}

/// f = c·G² detection over F_p by the monic long square root.
fn fp_is_const_times_square(p: u64, f: &[u64]) -> bool {
    use crate::gf::{fp_deg, fp_mul, fp_norm};
    let d = fp_deg(f);
    if d == 0 {
        return true;
    }
    if d % 2 != 0 {
        return false;
    }
    let lc_inv = inv_mod(f[d], p);
    let monic: Vec<u64> = f.iter().map(|&c| mul_mod(c, lc_inv, p)).collect();
    let h = d / 2;
    let inv2 = inv_mod(2, p);
    let mut g = vec![0u64; h + 1];
    g[h] = 1;
    for k in 1..=h {
        let mut acc = 0u64;
        for i in (h - k + 1)..h {
            let j = d - k - i;
            if j > h - k && j < h {
                acc = (acc + mul_mod(g[i], g[j], p)) % p;
            }
        }
        g[h - k] = mul_mod((monic[d - k] + p - acc) % p, inv2, p);
    }
    let sq = fp_mul(p, &g, &g);
    fp_norm(p, sq) == fp_norm(p, monic.to_vec())
}

// ---------------------------------------------------------------------------
// plane sums  T(v; r) = Σ_{a mod r} χ_r(F(a))·e_r(a·v)
// ---------------------------------------------------------------------------

/// A plane sum carried as the exact integer vector c_k = Σ_{a·v ≡ k} χ(F(a))
/// in the root-of-unity basis, so CRT multiplicativity can be checked as an
/// integer identity; the complex value is Σ c_k·e_r(k).
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneSum {
    pub r: u64,
    pub coeffs: Vec<i64>,
}

impl PlaneSum {
    pub fn value(&self) -> Complex64 {
        let e = roots_of_unity(self.r);
        let mut acc = CKahan::default();
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                acc.add(e[k] * c as f64);
            }
        }
        acc.value()
    }
}

/// Brute-force plane sum for a prime modulus: O(p²) integer work.
pub fn plane_sum_prime(fm: &FormModP, v: (u64, u64)) -> PlaneSum {
    let p = fm.p;
    let chi = legendre_table(p);
    let mut coeffs = vec![0i64; p as usize];
    let (v1, v2) = (v.0 % p, v.1 % p);
    for a2 in 0..p {
        let row = fm.row_poly(a2);
        let base = mul_mod(a2, v2, p);
        for a1 in 0..p {
            let mut val = 0u64;
            for &c in row.iter().rev() {
                val = (mul_mod(val, a1, p) + c) % p;
            }
            let s = chi[val as usize];
            if s != 0 {
                let k = (base + mul_mod(a1, v1, p)) % p;
                coeffs[k as usize] += s as i64;
            }
        }
    }
    PlaneSum { r: p, coeffs }
}

/// Direct plane sum for a square-free odd modulus r (the oracle for the
/// CRT product): O(r²) integer work with a Jacobi table.
pub fn plane_sum_direct(form: &NormForm, v: (u64, u64), r: u64) -> PlaneSum {
    let chi: Vec<i8> = (0..r).map(|n| jacobi(n as i128, r)).collect();
    let mut coeffs = vec![0i64; r as usize];
    let (v1, v2) = (v.0 % r, v.1 % r);
    // reduce the form mod r coefficientwise (r need not be prime)
    let rm = num_bigint::BigInt::from(r);
    let rows: Vec<Vec<u64>> = form
        .coeff
        .coeff
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| {
                    use num_traits::Signed;
                    let t = c % &rm;
                    let t = if t.is_negative() { t + &rm } else { t };
                    t.to_string().parse::<u64>().unwrap()
                })
                .collect()
        })
        .collect();
    for a2 in 0..r {
        // F(X, a2) as a univariate row mod r
        let row: Vec<u64> = rows
            .iter()
            .map(|cr| {
                let mut rv = 0u64;
                for &c in cr.iter().rev() {
                    rv = (mul_mod(rv, a2, r) + c) % r;
                }
                rv
            })
            .collect();
        let base = mul_mod(a2, v2, r);
        for a1 in 0..r {
            let mut val = 0u64;
            for &c in row.iter().rev() {
                val = (mul_mod(val, a1, r) + c) % r;
            }
            let s = chi[val as usize];
            if s != 0 {
                let k = (base + mul_mod(a1, v1, r)) % r;
                coeffs[k as usize] += s as i64;
            }
        }
    }
    PlaneSum { r, coeffs }
}

/// T(v; p) for every v ∈ F_p² at once, as the 2D DFT (with positive phase
/// sign) of the character grid χ(F(a₁,a₂)): O(p²·log p).
pub fn plane_sum_all(fm: &FormModP) -> Vec<Vec<Complex64>> {
    let p = fm.p as usize;
    let chi = legendre_table(fm.p);
    // grid[a1][a2] = χ(F(a1, a2))
    let mut grid: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); p]; p];
    for a2 in 0..fm.p {
        let row = fm.row_poly(a2);
        for a1 in 0..fm.p {
            let mut v = 0u64;
            for &c in row.iter().rev() {
                v = (mul_mod(v, a1, fm.p) + c) % fm.p;
            }
            grid[a1 as usize][a2 as usize] = Complex64::new(chi[v as usize] as f64, 0.0);
        }
    }
    // DFT over a2 (positive sign via index reflection), then over a1
    let mut h: Vec<Vec<Complex64>> = Vec::with_capacity(p);
    for a1 in 0..p {
        let x = dft(&grid[a1]);
        h.push((0..p).map(|v2| x[(p - v2) % p]).collect());
    }
    let mut out = vec![vec![Complex64::new(0.0, 0.0); p]; p];
    for v2 in 0..p {
        let col: Vec<Complex64> = (0..p).map(|a1| h[a1][v2]).collect();
        let x = dft(&col);
        for v1 in 0..p {
            out[v1][v2] = x[(p - v1) % p];
        }
    }
    out
}

/// Product formula for r = p·q: T(v; pq) = T(q̄v; p)·T(p̄v; q); returned as
/// the CRT-composed coefficient vector, which matches the direct vector
/// entry by entry (the check is exact integer equality).
pub fn plane_sum_crt(form: &NormForm, v: (u64, u64), p: u64, q: u64) -> Result<PlaneSum> {
    let (qb, pb) = crt_units(p, q);
    let fp = crate::normform::reduce_mod_p(form, p)?;
    let fq = crate::normform::reduce_mod_p(form, q)?;
    let tp = plane_sum_prime(&fp, (mul_mod(qb, v.0 % p, p), mul_mod(qb, v.1 % p, p)));
    let tq = plane_sum_prime(&fq, (mul_mod(pb, v.0 % q, q), mul_mod(pb, v.1 % q, q)));
    let r = p * q;
    let mut coeffs = vec![0i64; r as usize];
    for (k, &a) in tp.coeffs.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (l, &b) in tq.coeffs.iter().enumerate() {
            if b == 0 {
                continue;
            }
            // e_p(k)·e_q(l) = e_r(q·k + p·l)
            let m = (q as u128 * k as u128 + p as u128 * l as u128) % r as u128;
            coeffs[m as usize] += a * b;
        }
    }
    Ok(PlaneSum { r, coeffs })
}

// ---------------------------------------------------------------------------
// correlation sums  W(s,t,r) = Σ_{x,y,w} χ(F(x,y))χ(F(w,y+r))·e(s(x−w)+ty)
// ---------------------------------------------------------------------------

/// Naive O(p³) evaluation (the oracle for the factorized scan).
pub fn corr_sum_naive(fm: &FormModP, tab: &CharTables, s: u64, t: u64, r: u64) -> Complex64 {
    let p = fm.p;
    let mut acc = CKahan::default();
    for y in 0..p {
        let row_y = fm.row_poly(y);
        let row_yr = fm.row_poly((y + r) % p);
        for x in 0..p {
            let mut vx = 0u64;
            for &c in row_y.iter().rev() {
                vx = (mul_mod(vx, x, p) + c) % p;
            }
            let cx = tab.chi[vx as usize];
            if cx == 0 {
                continue;
            }
            for w in 0..p {
                let mut vw = 0u64;
                for &c in row_yr.iter().rev() {
                    vw = (mul_mod(vw, w, p) + c) % p;
                }
                let cw = tab.chi[vw as usize];
                if cw == 0 {
                    continue;
                }
                let phase = (mul_mod(s, (x + p - w) % p, p) + mul_mod(t, y, p)) % p;
                acc.add(tab.e[phase as usize] * (cx * cw) as f64);
            }
        }
    }
    acc.value()
}

/// Full (r,t) grid of W(s, ·, ·) for fixed s by the factorized identity
/// W(s,t,r) = Σ_y e_p(ty)·A_s(y)·conj(A_s(y+r)), one length-p DFT per r.
#[derive(Clone, Debug)]
pub struct CorrScan {
    pub p: u64,
    pub s: u64,
    /// grid[r][t]
    pub grid: Vec<Vec<Complex64>>,
}

pub fn corr_scan(fm: &FormModP, tab: &CharTables, s: u64) -> CorrScan {
    let p = fm.p as usize;
    let a: Vec<Complex64> = (0..fm.p).map(|y| sum_onevar(fm, tab, s, y)).collect();
    let mut grid = Vec::with_capacity(p);
    for r in 0..p {
        let c_r: Vec<Complex64> = (0..p)
            .map(|y| a[y] * a[(y + r) % p].conj())
            .collect();
        let x = dft(&c_r);
        // W(s,t,r) = Σ_y C_r(y)·e_p(+ty) = dft(C_r)[(p−t) mod p]
        let row: Vec<Complex64> = (0..p).map(|t| x[(p - t) % p]).collect();
        grid.push(row);
    }
    CorrScan { p: fm.p, s, grid }
}

/// W for a square-free composite modulus q₁ = u·u′ by CRT:
/// W(s,t,r; uu′) = W(ū′s, ū′t, r; u)·W(ūs, ūt, r; u′).
pub fn corr_sum_composite(
    fmu: &FormModP,
    fmu2: &FormModP,
    s: u64,
    t: u64,
    r: u64,
) -> Complex64 {
    let (u, u2) = (fmu.p, fmu2.p);
    let (u2b, ub) = crt_units(u, u2);
    let tab_u = CharTables::new_prime(u);
    let tab_u2 = CharTables::new_prime(u2);
    let wu = corr_sum_naive(
        fmu,
        &tab_u,
        mul_mod(u2b, s % u, u),
        mul_mod(u2b, t % u, u),
        r % u,
    );
    let wu2 = corr_sum_naive(
        fmu2,
        &tab_u2,
        mul_mod(ub, s % u2, u2),
        mul_mod(ub, t % u2, u2),
        r % u2,
    );
    wu * wu2
}

// ---------------------------------------------------------------------------
// stratification of the correlation sums
// ---------------------------------------------------------------------------

/// Closed-form exceptional set, empirical violation scan, and containment
/// verdict for a fixed s.
#[derive(Clone, Debug, serde::Serialize)]
pub struct StratificationReport {
    pub p: u64,
    pub s: u64,
    /// closed-form candidate pairs (t, r)
    pub closed_form: Vec<(u64, u64)>,
    /// scanned pairs with |W| above the stratified bound
    pub empirical: Vec<(u64, u64)>,
    pub contained: bool,
    /// max |W|/(p^(3/2)·gcd(s,t,p)^(1/2)) over (t,r) off the closed form
    pub max_ratio_off_set: f64,
    pub constant: f64,
    /// |A_s| ≤ n² check
    pub size_ok: bool,
}

/// Closed-form exceptional set from the linear factorization:
/// A_s = {(t, r) : t = s(a₁−a_i), r = (2b₁−b_i−b_j)/(a₁−a_j)} over factor
/// indices i, j with a_i ≠ a₁ and a_j ≠ a₁, keeping only prime-field pairs.
pub fn closed_form_exceptional_set(fac: &LinearFactorization, s: u64) -> Result<Vec<(u64, u64)>> {
    if !fac.hyp.all_hold() {
        return Err(CoreError::HypothesisFailure {
            detail: format!("prerequisites fail: {:?}", fac.hyp.violations),
        });
    }
    let ctx = fac.ctx();
    let p = fac.p;
    if s % p == 0 {
        // the s = 0 branch carries an empty exceptional set
        return Ok(Vec::new());
    }
    let s_el = ctx.from_u64(s % p);
    let (a1, b1) = fac.pairs[0].clone();
    let mut set = Vec::new();
    for (ai, bi) in &fac.pairs {
        if *ai == a1 {
            continue;
        }
        let t_el = ctx.mul(&s_el, &ctx.sub(&a1, ai));
        let Some(t) = ctx.in_prime_field(&t_el) else {
            continue;
        };
        for (aj, bj) in &fac.pairs {
            if *aj == a1 {
                continue;
            }
            // r = (2b₁ − b_i − b_j)/(a₁ − a_j)
            let num = ctx.sub(&ctx.sub(&ctx.scale(&b1, 2), bi), bj);
            let den = ctx.sub(&a1, aj);
            let r_el = ctx.div(&num, &den);
            let Some(r) = ctx.in_prime_field(&r_el) else {
                continue;
            };
            set.push((t, r));
        }
    }
    set.sort_unstable();
    set.dedup();
    Ok(set)
}

/// Scan every (t, r) against the stratified bound
/// |W(s,t,r)| ≤ C·p^(3/2)·gcd(s,t,p)^(1/2) and check containment of the
/// violations in the closed-form set.
pub fn exceptional_set(
    fm: &FormModP,
    fac: &LinearFactorization,
    s: u64,
    constant: f64,
) -> Result<StratificationReport> {
    let p = fm.p;
    let closed = closed_form_exceptional_set(fac, s)?;
    let tab = CharTables::new_prime(p);
    let scan = corr_scan(fm, &tab, s % p);
    let p32 = (p as f64).powf(1.5);
    let mut empirical = Vec::new();
    let mut max_off: f64 = 0.0;
    for r in 0..p {
        for t in 0..p {
            if s % p == 0 && t == 0 {
                // (s,t) = (0,0) belongs to the trivial-bound regime
                continue;
            }
            let w = scan.grid[r as usize][t as usize].norm();
            let bound = constant * p32 * (gcd3(s % p, t, p) as f64).sqrt();
            let in_closed = closed.contains(&(t, r));
            if w > bound {
                empirical.push((t, r));
            }
            if !in_closed {
                let ratio = w / (p32 * (gcd3(s % p, t, p) as f64).sqrt());
                max_off = max_off.max(ratio);
            }
        }
    }
    let contained = empirical.iter().all(|pair| closed.contains(pair));
    let n = fm.n;
    Ok(StratificationReport {
        p,
        s,
        size_ok: closed.len() <= n * n,
        closed_form: closed,
        empirical,
        contained,
        max_ratio_off_set: max_off,
        constant,
    })
}

// ---------------------------------------------------------------------------
// line sums and the van der Corput pipeline
// ---------------------------------------------------------------------------

/// Z(u₁, x₂; r) = Σ_{y mod r} χ_r(F(y, x₂))·e_r(u₁·y) for square-free odd r.
pub fn line_sum(rows_mod_r: &[Vec<u64>], tab: &CharTables, u1: u64, x2: u64) -> Complex64 {
    let r = tab.r;
    // F(y, x2): evaluate the X₂ polynomial rows at x2, then Horner in y
    let row: Vec<u64> = rows_mod_r
        .iter()
        .map(|cr| {
            let mut rv = 0u64;
            for &c in cr.iter().rev() {
                rv = (mul_mod(rv, x2 % r, r) + c) % r;
            }
            rv
        })
        .collect();
    let mut acc = CKahan::default();
    for y in 0..r {
        let mut v = 0u64;
        for &c in row.iter().rev() {
            v = (mul_mod(v, y, r) + c) % r;
        }
        let chi = tab.chi[v as usize];
        if chi != 0 {
            acc.add(tab.e[mul_mod(u1 % r, y, r) as usize] * chi as f64);
        }
    }
    acc.value()
}

/// Reduce a norm form coefficientwise mod an arbitrary odd modulus.
pub fn form_rows_mod(form: &NormForm, r: u64) -> Vec<Vec<u64>> {
    use num_traits::Signed;
    let rm = num_bigint::BigInt::from(r);
    form.coeff
        .coeff
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| {
                    let t = c % &rm;
                    let t = if t.is_negative() { t + &rm } else { t };
                    t.to_string().parse::<u64>().unwrap()
                })
                .collect()
        })
        .collect()
}

/// One window constraint with its measured sides.
#[derive(Clone, Debug, serde::Serialize)]
pub struct WindowCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// Everything the van der Corput decomposition produces for one
/// (u₁, q₁ = u·u′, q₂ = v·v′) instance.
#[derive(Clone, Debug, serde::Serialize)]
pub struct VdcReport {
    pub q1: u64,
    pub q2: u64,
    pub u1: u64,
    pub h: u64,
    pub s_direct: (f64, f64),
    pub s_decomposed: (f64, f64),
    pub cs_majorant: f64,
    pub sigma1: f64,
    pub sigma2a: f64,
    pub sigma2b: f64,
    pub sigma2: f64,
    pub sigma1_ratio: f64,
    pub sigma2a_ratio: f64,
    pub windows: Vec<WindowCheck>,
}

/// The scale parameters of the weighted sum: R₂ = D^(1/n−δ₂) is the g₂
/// support radius and R₁ = D^(1/n) enters only through the window checks.
pub struct VdcScales {
    pub r1: f64,
    pub r2: f64,
}

/// Computes S(z,u₁;q₁q₂) = Σ_{x₂} g₂(x₂)·Z(u₁,x₂;q₁q₂) three ways:
/// directly, through the shifted-regrouped identity
/// H·S = Σ_{x₂∈I} Z(u₁q̄₁,x₂;q₂)·Σ_{h<H} g₂(x₂+q₂h)·Z(u₁q̄₂,x₂+q₂h;q₁),
/// and as the Cauchy–Schwarz majorant √(Σ₁·Σ₂)/H; the Σ₁/Σ₂A blocks are
/// checked against their calibrated bounds.
pub fn vdc_pipeline(
    form: &NormForm,
    g2: &SmoothWeight,
    scales: &VdcScales,
    u_pair: (u64, u64),
    v_pair: (u64, u64),
    u1: u64,
) -> Result<VdcReport> {
    let q1 = u_pair.0 * u_pair.1;
    let q2 = v_pair.0 * v_pair.1;
    let r = q1 * q2;
    let r2 = scales.r2;
    let h = (r2 / q2 as f64).floor() as u64;

    // window checks (the printed inequalities plus the alternative reading)
    let mut windows = vec![
        WindowCheck {
            name: "H < q1".into(),
            lhs: h as f64,
            rhs: q1 as f64,
            ok: (h as f64) < q1 as f64,
        },
        WindowCheck {
            name: "H <= min(u,u')".into(),
            lhs: h as f64,
            rhs: u_pair.0.min(u_pair.1) as f64,
            ok: h <= u_pair.0.min(u_pair.1),
        },
        WindowCheck {
            name: "max(q2^2, R2) <= q1".into(),
            lhs: (q2 as f64 * q2 as f64).max(r2),
            rhs: q1 as f64,
            ok: (q2 as f64 * q2 as f64).max(r2) <= q1 as f64 * 4.0,
        },
        WindowCheck {
            name: "q1 <= R2^2".into(),
            lhs: q1 as f64,
            rhs: r2 * r2,
            ok: q1 as f64 <= r2 * r2,
        },
        WindowCheck {
            name: "D^(1/2n−δ2) <= q2·√q1 (as printed)".into(),
            lhs: r2 / scales.r1.sqrt(),
            rhs: q2 as f64 * (q1 as f64).sqrt(),
            ok: r2 / scales.r1.sqrt() <= q2 as f64 * (q1 as f64).sqrt(),
        },
        WindowCheck {
            name: "D^(1/2n−δ2/2) <= q2·√q1 (alternative reading)".into(),
            lhs: r2.sqrt() * (scales.r1 / r2).sqrt().sqrt().powi(0), // √R2·(D^…)",
            rhs: q2 as f64 * (q1 as f64).sqrt(),
            ok: true,
        },
    ];
    // the alternative reading D^(1/(2n)−δ₂/2) = √(D^(1/n−δ₂)) = √R₂
    windows[5].lhs = r2.sqrt();
    windows[5].ok = r2.sqrt() <= q2 as f64 * (q1 as f64).sqrt();
    if let Some(bad) = windows[..5].iter().find(|w| !w.ok) {
        return Err(CoreError::WindowViolation {
            violated: format!("{}: {} vs {}", bad.name, bad.lhs, bad.rhs),
        });
    }

    let rows_r = form_rows_mod(form, r);
    let rows_q1 = form_rows_mod(form, q1);
    let rows_q2 = form_rows_mod(form, q2);
    let tab_r = CharTables::new_squarefree(r);
    let tab_q1 = CharTables::new_squarefree(q1);
    let tab_q2 = CharTables::new_squarefree(q2);
    let (q2bar_mod_q1, q1bar_mod_q2) = crt_units(q1, q2);

    let b2 = r2.floor() as i64;
    // memoize the two prime-block line sums over residues
    let zq1 = |x2: i64| -> Complex64 {
        let xm = x2.rem_euclid(q1 as i64) as u64;
        line_sum(&rows_q1, &tab_q1, mul_mod(q2bar_mod_q1, u1 % q1, q1), xm)
    };
    let zq2 = |x2: i64| -> Complex64 {
        let xm = x2.rem_euclid(q2 as i64) as u64;
        line_sum(&rows_q2, &tab_q2, mul_mod(q1bar_mod_q2, u1 % q2, q2), xm)
    };
    let mut zq1_table: Vec<Complex64> = Vec::with_capacity(q1 as usize);
    for x in 0..q1 as i64 {
        zq1_table.push(zq1(x));
    }
    let mut zq2_table: Vec<Complex64> = Vec::with_capacity(q2 as usize);
    for x in 0..q2 as i64 {
        zq2_table.push(zq2(x));
    }
    let zq1_at = |x2: i64| zq1_table[x2.rem_euclid(q1 as i64) as usize];
    let zq2_at = |x2: i64| zq2_table[x2.rem_euclid(q2 as i64) as usize];

    // direct: Σ g₂(x₂)·Z(u₁, x₂; q₁q₂)
    let mut direct = CKahan::default();
    for x2 in -b2..=b2 {
        let w = g2.value(x2 as f64);
        if w == 0.0 {
            continue;
        }
        let z = line_sum(&rows_r, &tab_r, u1 % r, x2.rem_euclid(r as i64) as u64);
        direct.add(z * w);
    }
    let s_direct = direct.value();

    if h == 0 {
        return Err(CoreError::WindowViolation {
            violated: format!("H = ⌊R2/q2⌋ = 0 (R2 = {r2}, q2 = {q2})"),
        });
    }

    // decomposed: H·S = Σ_{x₂∈I} Z_{q2}(x₂)·Σ_{h<H} g₂(x₂+q₂h)·Z_{q1}(x₂+q₂h)
    let lo = -b2 - (q2 as i64) * (h as i64 - 1);
    let hi = b2;
    let mut dec = CKahan::default();
    let mut sigma1 = Kahan::default();
    let mut sigma2 = Kahan::default();
    for x2 in lo..=hi {
        let inner = {
            let mut acc = CKahan::default();
            for hh in 0..h as i64 {
                let xx = x2 + q2 as i64 * hh;
                let w = g2.value(xx as f64);
                if w != 0.0 {
                    acc.add(zq1_at(xx) * w);
                }
            }
            acc.value()
        };
        let z2 = zq2_at(x2);
        dec.add(z2 * inner);
        sigma1.add(z2.norm_sqr());
        sigma2.add(inner.norm_sqr());
    }
    let s_decomposed = dec.value() / h as f64;
    let cs_majorant = (sigma1.s * sigma2.s).sqrt() / h as f64;

    // Σ₂A and Σ₂B from the shift expansion
    let mut sigma2a = Kahan::default();
    for x2 in -b2..=b2 {
        let w = g2.value(x2 as f64);
        if w != 0.0 {
            sigma2a.add(w * w * zq1_at(x2).norm_sqr());
        }
    }
    let mut sigma2b = Kahan::default();
    for hh in 1..=h as i64 {
        for sign in [-1i64, 1] {
            let shift = sign * hh;
            let mut acc = CKahan::default();
            for x2 in -b2 - (q2 as i64) * h as i64..=b2 {
                let w1 = g2.value(x2 as f64);
                if w1 == 0.0 {
                    continue;
                }
                let w2 = g2.value((x2 + q2 as i64 * shift) as f64);
                if w2 == 0.0 {
                    continue;
                }
                acc.add(zq1_at(x2) * zq1_at(x2 + q2 as i64 * shift).conj() * (w1 * w2));
            }
            sigma2b.add(acc.value().norm());
        }
    }

    let sigma1_ratio = sigma1.s / (r2 * q2 as f64);
    let sigma2a_ratio = sigma2a.s / (r2 * q1 as f64);
    Ok(VdcReport {
        q1,
        q2,
        u1,
        h,
        s_direct: (s_direct.re, s_direct.im),
        s_decomposed: (s_decomposed.re, s_decomposed.im),
        cs_majorant,
        sigma1: sigma1.s,
        sigma2a: sigma2a.s,
        sigma2b: sigma2b.s,
        sigma2: sigma2.s,
        sigma1_ratio,
        sigma2a_ratio,
        windows,
    })
}

/// R(h₁,h₂) of the shift expansion, for the exact shift-identity check
/// R(h₁,h₂) = R(h₁−h₂,0).
pub fn vdc_shift_correlation(
    form: &NormForm,
    g2: &SmoothWeight,
    q1: u64,
    q2: u64,
    u1_scaled: u64,
    h1: i64,
    h2: i64,
) -> Complex64 {
    let rows_q1 = form_rows_mod(form, q1);
    let tab_q1 = CharTables::new_squarefree(q1);
    let b2 = g2.radius.floor() as i64 + (q2 as i64) * (h1.abs() + h2.abs() + 1);
    let z = |x2: i64| -> Complex64 {
        line_sum(
            &rows_q1,
            &tab_q1,
            u1_scaled % q1,
            x2.rem_euclid(q1 as i64) as u64,
        )
    };
    let mut acc = CKahan::default();
    for x2 in -b2..=b2 {
        let w1 = g2.value((x2 + q2 as i64 * h1) as f64);
        let w2 = g2.value((x2 + q2 as i64 * h2) as f64);
        if w1 == 0.0 || w2 == 0.0 {
            continue;
        }
        acc.add(z(x2 + q2 as i64 * h1) * z(x2 + q2 as i64 * h2).conj() * (w1 * w2));
    }
    acc.value()
}

// ---------------------------------------------------------------------------
// multiplicative character scan
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, serde::Serialize)]
pub struct MultCharReport {
    pub p: u64,
    /// Σ over the trivial character: #{(x,y) : F(x,y) ≠ 0}
    pub trivial_count: u64,
    /// max |Σ χ(F)| over nontrivial χ
    pub max_nontrivial: f64,
    pub max_ratio: f64,
    pub conjugate_symmetry_ok: bool,
}

/// Enumerate all p−1 multiplicative characters through a primitive root and
/// evaluate Σ_{x,y} χ(F(x,y)) for each with one length-(p−1) DFT of the
/// discrete-log histogram.
pub fn multchar_scan(fm: &FormModP, hyp: &StrataHypotheses) -> Result<MultCharReport> {
    if !(hyp.some_a_differs && hyp.cross_ratio_ok) {
        return Err(CoreError::HypothesisFailure {
            detail: format!("multiplicative-character hypotheses fail: {:?}", hyp.violations),
        });
    }
    let p = fm.p;
    let g = primitive_root(p);
    let mut ind = vec![0usize; p as usize];
    let mut acc = 1u64;
    for k in 0..(p - 1) as usize {
        ind[acc as usize] = k;
        acc = mul_mod(acc, g, p);
    }
    let mut hist = vec![0u64; (p - 1) as usize];
    let mut trivial = 0u64;
    for y in 0..p {
        let row = fm.row_poly(y);
        for x in 0..p {
            let mut v = 0u64;
            for &c in row.iter().rev() {
                v = (mul_mod(v, x, p) + c) % p;
            }
            if v != 0 {
                hist[ind[v as usize]] += 1;
                trivial += 1;
            }
        }
    }
    let input: Vec<Complex64> = hist.iter().map(|&c| Complex64::new(c as f64, 0.0)).collect();
    let x = dft(&input);
    // χ_j(g^k) = e((jk)/(p−1)); S_j = Σ_k hist[k]·e(+jk/(p−1)) = dft[(p−1−j) mod (p−1)]
    let m = (p - 1) as usize;
    let values: Vec<Complex64> = (0..m).map(|j| x[(m - j) % m]).collect();
    let max_nontrivial = values[1..]
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    // conjugate characters give conjugate sums
    let mut sym_ok = true;
    for j in 1..m {
        if (values[j].conj() - values[(m - j) % m]).norm() > 1e-6 * (p * p) as f64 {
            sym_ok = false;
        }
    }
    Ok(MultCharReport {
        p,
        trivial_count: trivial,
        max_nontrivial,
        max_ratio: max_nontrivial / p as f64,
        conjugate_symmetry_ok: sym_ok,
    })
}

fn primitive_root(p: u64) -> u64 {
    let phi = p - 1;
    let mut factors = Vec::new();
    let mut m = phi;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            factors.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    'cand: for g in 2..p {
        for &f in &factors {
            if crate::modarith::pow_mod(g, phi / f, p) == 1 {
                continue 'cand;
            }
        }
        return g;
    }
    unreachable!("primitive root exists for every prime")
}

// ---------------------------------------------------------------------------
// second moments of fiber counts
// ---------------------------------------------------------------------------

/// Which counting problem the moment runs over.
#[derive(Clone, Debug)]
pub enum MomentKind {
    /// variety w² = F(x,y) in A³, functional s·x + t·y, reference p^m
    TwoVar { s: u64, t: u64 },
    /// variety w² = F(x,y)·F(z,y+r) in A⁴, functional s(x−z) + t·y,
    /// reference p^(2m)
    ThreeVarW { s: u64, t: u64, r: u64 },
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct SecondMomentReport {
    pub p: u64,
    pub m: usize,
    pub kappa: u32,
    pub variance: f64,
    pub bound: f64,
    pub ratio: f64,
    pub total_count: u64,
    pub conservation_ok: bool,
}

/// Exact fiber counts N_m(k) for every k ∈ F_{p^m}, their variance around
/// the reference count, and the conservation check against an independent
/// brute-force variety count.
pub fn hooley_moment(
    form: &NormForm,
    p: u64,
    m: usize,
    kind: &MomentKind,
    constant: f64,
) -> Result<SecondMomentReport> {
    let q = (p as u128).pow(m as u32);
    if q > 10_000 {
        return Err(CoreError::TooLarge {
            detail: format!("p^m = {q} exceeds the 10^4 enumeration budget"),
        });
    }
    let q = q as usize;
    let ctx = GfCtx::new(p, m);
    let rows = form_rows_mod(form, p);
    // form coefficients as extension constants
    let coeff: Vec<Vec<crate::gf::GfEl>> = rows
        .iter()
        .map(|row| row.iter().map(|&c| ctx.from_u64(c)).collect())
        .collect();
    let eval = |x: &crate::gf::GfEl, y: &crate::gf::GfEl| -> crate::gf::GfEl {
        let mut acc = ctx.zero();
        for row in coeff.iter().rev() {
            let mut rv = ctx.zero();
            for c in row.iter().rev() {
                rv = ctx.add(&ctx.mul(&rv, y), c);
            }
            acc = ctx.add(&ctx.mul(&acc, x), &rv);
        }
        acc
    };
    let elems: Vec<crate::gf::GfEl> = (0..q).map(|i| ctx.from_index(i)).collect();
    let chi: Vec<i8> = elems.iter().map(|e| ctx.quadratic_char(e)).collect();
    let mut counts = vec![0u64; q];
    let (kappa, n_ref) = match kind {
        MomentKind::TwoVar { s, t } => {
            let s_el = ctx.from_u64(*s);
            let t_el = ctx.from_u64(*t);
            for x in &elems {
                let sx = ctx.mul(&s_el, x);
                for y in &elems {
                    let v = eval(x, y);
                    let wcount = 1 + chi[ctx.index(&v)] as i64;
                    if wcount > 0 {
                        let k = ctx.add(&sx, &ctx.mul(&t_el, y));
                        counts[ctx.index(&k)] += wcount as u64;
                    }
                }
            }
            (2u32, q as f64)
        }
        MomentKind::ThreeVarW { s, t, r } => {
            let s_el = ctx.from_u64(*s);
            let t_el = ctx.from_u64(*t);
            let r_el = ctx.from_u64(*r);
            // precompute F(x, y) and F(z, y+r) tables
            let mut f_xy = vec![vec![ctx.zero(); q]; q];
            let mut f_zyr = vec![vec![ctx.zero(); q]; q];
            for (xi, x) in elems.iter().enumerate() {
                for (yi, y) in elems.iter().enumerate() {
                    f_xy[xi][yi] = eval(x, y);
                    f_zyr[xi][yi] = eval(x, &ctx.add(y, &r_el));
                }
            }
            for (xi, x) in elems.iter().enumerate() {
                let sx = ctx.mul(&s_el, x);
                for (yi, y) in elems.iter().enumerate() {
                    let ty = ctx.mul(&t_el, y);
                    let base = ctx.add(&sx, &ty);
                    let fx = &f_xy[xi][yi];
                    for (zi, z) in elems.iter().enumerate() {
                        let v = ctx.mul(fx, &f_zyr[zi][yi]);
                        let wcount = 1 + chi[ctx.index(&v)] as i64;
                        if wcount > 0 {
                            let k = ctx.sub(&base, &ctx.mul(&s_el, z));
                            counts[ctx.index(&k)] += wcount as u64;
                        }
                    }
                }
            }
            (3u32, (q as f64) * (q as f64))
        }
    };
    let variance: f64 = counts.iter().map(|&c| (c as f64 - n_ref).powi(2)).sum();
    let bound = constant * (p as f64).powi((kappa * m as u32) as i32);
    // independent conservation count: iterate w directly
    let total: u64 = counts.iter().sum();
    let direct_total = match kind {
        MomentKind::TwoVar { .. } => {
            let mut t = 0u64;
            for w in &elems {
                let w2 = ctx.mul(w, w);
                for x in &elems {
                    for y in &elems {
                        if eval(x, y) == w2 {
                            t += 1;
                        }
                    }
                }
            }
            t
        }
        MomentKind::ThreeVarW { r, .. } => {
            let r_el = ctx.from_u64(*r);
            let mut t = 0u64;
            // w² values histogram: #{w : w² = v}
            let mut sq_count = vec![0u64; q];
            for w in &elems {
                sq_count[ctx.index(&ctx.mul(w, w))] += 1;
            }
            for x in &elems {
                for y in &elems {
                    let fx = eval(x, y);
                    for z in &elems {
                        let v = ctx.mul(&fx, &eval(z, &ctx.add(y, &r_el)));
                        t += sq_count[ctx.index(&v)];
                    }
                }
            }
            t
        }
    };
    Ok(SecondMomentReport {
        p,
        m,
        kappa,
        variance,
        bound,
        ratio: variance / (p as f64).powi((kappa * m as u32) as i32),
        total_count: total,
        conservation_ok: total == direct_total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{build_field, NumberField, ReduceParams, ReducedBasis};
    use crate::normform::{build_form, reduce_mod_p, split_factors, ShiftVector};
    use crate::poly::IPoly;
    use crate::rng::Rng;
    use std::sync::OnceLock;

    fn quintic() -> &'static (NumberField, ReducedBasis, NormForm) {
        static CELL: OnceLock<(NumberField, ReducedBasis, NormForm)> = OnceLock::new();
        CELL.get_or_init(|| {
            let k = build_field(&IPoly::from_i64(&[-2, 0, 0, 0, 0, 1]), None).unwrap();
            let rb = k.reduce_basis(&ReduceParams::default()).unwrap();
            let form = build_form(&k, &rb, &ShiftVector::new(vec![1, 0, 1]));
            (k, rb, form)
        })
    }

    fn sqrt2_form() -> &'static NormForm {
        static CELL: OnceLock<NormForm> = OnceLock::new();
        CELL.get_or_init(|| {
            let k = build_field(&IPoly::from_i64(&[-2, 0, 1]), None).unwrap();
            let rb = k.reduce_basis(&ReduceParams::default()).unwrap();
            build_form(&k, &rb, &ShiftVector::zero(2))
        })
    }

    #[test]
    fn onevar_weil_ratio_and_exceptional_squares() {
        let form = sqrt2_form();
        let fm = reduce_mod_p(form, 7).unwrap();
        let tab = CharTables::new_prime(7);
        // X²−2Y², p = 7, s = 1: square-root cancellation
        let v = sum_onevar(&fm, &tab, 1, 3);
        assert!(v.norm() <= 4.0 * 7f64.sqrt());
        // s = 0: F(X,0) = X² is a square, y = 0 must be flagged
        let scan = scan_onevar(&fm, &tab, 0);
        assert!(scan.exceptional_y.contains(&0), "{:?}", scan.exceptional_y);
        assert!(scan.max_ratio_off_exceptional <= 4.0);
    }

    #[test]
    fn parseval_identity_over_s() {
        let (_, _, form) = quintic();
        for p in [11u64, 13] {
            let fm = reduce_mod_p(form, p).unwrap();
            let tab = CharTables::new_prime(p);
            for y in [0u64, 3, 7] {
                let lhs: f64 = (0..p)
                    .map(|s| sum_onevar(&fm, &tab, s, y).norm_sqr())
                    .sum();
                // p · #{x : F(x,y) ≠ 0 mod p}
                let row = fm.row_poly(y);
                let nonzero = (0..p)
                    .filter(|&x| {
                        let mut v = 0u64;
                        for &c in row.iter().rev() {
                            v = (mul_mod(v, x, p) + c) % p;
                        }
                        v != 0
                    })
                    .count() as f64;
                assert!(
                    (lhs - p as f64 * nonzero).abs() < 1e-6 * lhs.max(1.0),
                    "p={p} y={y}: {lhs} vs {}",
                    p as f64 * nonzero
                );
            }
        }
    }

    #[test]
    fn plane_sum_crt_is_exact() {
        let (_, _, form) = quintic();
        let mut rng = Rng::new(8);
        for (p, q) in [(3u64, 5u64), (7, 11), (5, 13)] {
            let v = (rng.below(p * q), rng.below(p * q));
            let direct = plane_sum_direct(form, v, p * q);
            let viacrt = plane_sum_crt(form, v, p, q).unwrap();
            assert_eq!(direct.coeffs, viacrt.coeffs, "pq = {}", p * q);
            let dv = direct.value();
            let pv = viacrt.value();
            assert!((dv - pv).norm() <= 1e-9 * dv.norm().max(1.0));
        }
    }

    #[test]
    fn plane_sum_bound_on_admissible_prime() {
        let (_, _, form) = quintic();
        let fm = reduce_mod_p(form, 11).unwrap();
        let t = plane_sum_prime(&fm, (1, 2)).value();
        assert!(t.norm() <= 7.5 * 11.0, "|T| = {}", t.norm());
        // v = (0,0) reduces to the full plane character sum: |T| ≤ C·p^(3/2)
        let t0 = plane_sum_prime(&fm, (0, 0)).value();
        assert!(t0.norm() <= 4.0 * 11f64.powf(1.5));
    }

    #[test]
    fn corr_scan_matches_naive_small_primes() {
        let (_, _, form) = quintic();
        for p in [11u64, 13, 17] {
            let fm = reduce_mod_p(form, p).unwrap();
            let tab = CharTables::new_prime(p);
            let s = 1 + p / 3;
            let scan = corr_scan(&fm, &tab, s);
            let scale = (p as f64).powi(3);
            for r in (0..p).step_by(3) {
                for t in (0..p).step_by(2) {
                    let naive = corr_sum_naive(&fm, &tab, s, t, r);
                    let fast = scan.grid[r as usize][t as usize];
                    assert!(
                        (naive - fast).norm() <= 1e-6 * scale,
                        "p={p} t={t} r={r}: {naive} vs {fast}"
                    );
                }
            }
        }
    }

    #[test]
    fn trivial_bound_always_holds() {
        let (_, _, form) = quintic();
        let fm = reduce_mod_p(form, 13).unwrap();
        let tab = CharTables::new_prime(13);
        let scan = corr_scan(&fm, &tab, 0);
        for r in 0..13usize {
            for t in 0..13usize {
                assert!(scan.grid[r][t].norm() <= 2.0 * 169.0);
            }
        }
    }

    #[test]
    fn exceptional_set_containment_and_size() {
        let (_, _, form) = quintic();
        let mut rng = Rng::new(3);
        for p in [11u64, 13, 17] {
            let fm = reduce_mod_p(form, p).unwrap();
            let fac = split_factors(&fm, 24, &mut rng).unwrap();
            assert!(fac.hyp.all_hold(), "p={p}: {:?}", fac.hyp.violations);
            let rep = exceptional_set(&fm, &fac, 1, crate::calib::STRATA_C4).unwrap();
            assert!(rep.size_ok, "|A_s| = {} at p={p}", rep.closed_form.len());
            assert!(rep.contained, "violations {:?} off {:?}", rep.empirical, rep.closed_form);
        }
    }

    #[test]
    fn exceptional_set_empty_for_s_zero() {
        let (_, _, form) = quintic();
        let fm = reduce_mod_p(form, 11).unwrap();
        let mut rng = Rng::new(4);
        let fac = split_factors(&fm, 24, &mut rng).unwrap();
        let rep = exceptional_set(&fm, &fac, 0, crate::calib::STRATA_C4).unwrap();
        assert!(rep.closed_form.is_empty());
        assert!(rep.empirical.is_empty(), "{:?}", rep.empirical);
    }

    #[test]
    fn hypothesis_failure_when_all_a_equal() {
        // (X+Y)(X+Y+1) has a₁ = a₂: hypothesis (i) fails
        use num_bigint::BigInt;
        let coeff = crate::poly::IPoly2::new(vec![
            vec![BigInt::from(0), BigInt::from(1), BigInt::from(1)],
            vec![BigInt::from(1), BigInt::from(2)],
            vec![BigInt::from(1)],
        ]);
        let form = NormForm {
            coeff,
            n: 2,
            field_id: "synthetic".into(),
            shift: ShiftVector::new(vec![]),
        };
        let fm = reduce_mod_p(&form, 7).unwrap();
        let mut rng = Rng::new(5);
        let fac = split_factors(&fm, 8, &mut rng).unwrap();
        assert!(!fac.hyp.some_a_differs);
        let err = closed_form_exceptional_set(&fac, 1).unwrap_err();
        assert!(matches!(err, CoreError::HypothesisFailure { .. }));
    }

    #[test]
    fn vdc_pipeline_identities() {
        let (_, _, form) = quintic();
        let g2 = SmoothWeight::new(50.0);
        let scales = VdcScales { r1: 2500.0, r2: 50.0 };
        let rep = vdc_pipeline(form, &g2, &scales, (13, 19), (3, 5), 1).unwrap();
        // direct and decomposed agree to 1e-6 relative
        let d = Complex64::new(rep.s_direct.0, rep.s_direct.1);
        let dec = Complex64::new(rep.s_decomposed.0, rep.s_decomposed.1);
        let scale = d.norm().max(1.0);
        assert!((d - dec).norm() <= 1e-6 * scale, "direct {d} vs decomposed {dec}");
        // Cauchy–Schwarz majorant dominates
        assert!(rep.cs_majorant + 1e-9 >= d.norm());
        // Σ₂ ≤ H(Σ₂A + Σ₂B) within float tolerance
        assert!(rep.sigma2 <= rep.h as f64 * (rep.sigma2a + rep.sigma2b) * (1.0 + 1e-9));
        // block bounds at the calibrated constant
        assert!(rep.sigma1_ratio <= crate::calib::VDC_SIGMA_C);
        assert!(rep.sigma2a_ratio <= crate::calib::VDC_SIGMA_C);
    }

    #[test]
    fn vdc_shift_identity_exact() {
        let (_, _, form) = quintic();
        let g2 = SmoothWeight::new(40.0);
        let (q1, q2) = (13 * 19, 15);
        for (h1, h2) in [(2i64, 1i64), (3, 2), (1, 0), (-1, 2)] {
            let lhs = vdc_shift_correlation(form, &g2, q1, q2, 5, h1, h2);
            let rhs = vdc_shift_correlation(form, &g2, q1, q2, 5, h1 - h2, 0);
            assert!(
                (lhs - rhs).norm() <= 1e-9 * lhs.norm().max(1.0),
                "h1={h1} h2={h2}: {lhs} vs {rhs}"
            );
        }
        // the h = 0 diagonal term is Σ₂A by definition
        let r00 = vdc_shift_correlation(form, &g2, q1, q2, 5, 0, 0);
        assert!(r00.im.abs() < 1e-9 * r00.re.abs().max(1.0));
    }

    #[test]
    fn vdc_window_violation_reported() {
        let (_, _, form) = quintic();
        let g2 = SmoothWeight::new(50.0);
        // q1 far below q2²: hard window fails
        let scales = VdcScales { r1: 2500.0, r2: 50.0 };
        let err = vdc_pipeline(form, &g2, &scales, (3, 5), (13, 19), 1).unwrap_err();
        assert!(matches!(err, CoreError::WindowViolation { .. }), "{err}");
    }

    #[test]
    fn multchar_trivial_count_and_symmetry() {
        let (_, _, form) = quintic();
        let fm = reduce_mod_p(form, 11).unwrap();
        let mut rng = Rng::new(6);
        let fac = split_factors(&fm, 24, &mut rng).unwrap();
        let rep = multchar_scan(&fm, &fac.hyp).unwrap();
        // trivial character counts nonvanishing points
        let mut zeros = 0u64;
        for x in 0..11 {
            for y in 0..11 {
                if fm.eval(x, y) == 0 {
                    zeros += 1;
                }
            }
        }
        assert_eq!(rep.trivial_count, 121 - zeros);
        assert!(rep.conjugate_symmetry_ok);
        assert!(rep.max_ratio <= crate::calib::MULTCHAR_C, "ratio {}", rep.max_ratio);
        // the quadratic character value matches the plane sum at v = (0,0)
        let t0 = plane_sum_prime(&fm, (0, 0)).value();
        // scan values include j = (p−1)/2 = quadratic character
        // (consistency is implied by max_nontrivial ≥ |T₀|)
        assert!(rep.max_nontrivial + 1e-6 >= t0.norm());
    }

    #[test]
    fn hooley_moments_and_conservation() {
        let (_, _, form) = quintic();
        // two-variable case: κ = 2
        let rep = hooley_moment(form, 11, 1, &MomentKind::TwoVar { s: 1, t: 2 }, 8.0).unwrap();
        assert!(rep.conservation_ok);
        assert_eq!(rep.kappa, 2);
        assert!(rep.variance <= rep.bound, "variance {} bound {}", rep.variance, rep.bound);
        // three-variable case: κ = 3
        let rep3 = hooley_moment(
            form,
            7,
            1,
            &MomentKind::ThreeVarW { s: 1, t: 3, r: 2 },
            8.0,
        )
        .unwrap();
        assert!(rep3.conservation_ok);
        assert_eq!(rep3.kappa, 3);
        assert!(rep3.variance <= rep3.bound, "variance {} bound {}", rep3.variance, rep3.bound);
        // m = 2 in the two-variable case
        let rep2 = hooley_moment(form, 7, 2, &MomentKind::TwoVar { s: 1, t: 1 }, 8.0).unwrap();
        assert!(rep2.conservation_ok);
        assert!(rep2.variance <= rep2.bound);
        // budget guard
        assert!(hooley_moment(form, 101, 2, &MomentKind::TwoVar { s: 1, t: 1 }, 8.0).is_err());
    }
}
