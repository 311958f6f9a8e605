//! Exact arithmetic in a number field K = Q[x]/(f) presented by an integral
//! basis, its complex embeddings at configurable precision, and reduction
//! of the integral basis under the archimedean size ‖x‖ = Σ_σ |σ(x)|.
//!
//! The reduction is a greedy successive-minima search (LLL seed on the
//! Minkowski embedding, then local pair/triple moves ranked directly by the
//! ℓ¹ size), which is all the counting experiments need: sizes correct up
//! to the calibrated constants, never exact minima.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::bigfloat::{Bf, Cf};
use crate::error::{CoreError, Result};
use crate::lll;
use crate::poly::{irreducible_factor, refine_roots, roots_f64, IPoly, QPoly};

fn q_zero() -> BigRational {
    BigRational::zero()
}

fn q_one() -> BigRational {
    BigRational::one()
}

/// Element of K, stored as exact rational coordinates over the field's
/// integral basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElement {
    pub coords: Vec<BigRational>,
}

impl FieldElement {
    pub fn from_integers(c: &[i64]) -> Self {
        FieldElement {
            coords: c.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| c.denom().is_one())
    }
}

/// Degree-n number field with exact multiplication table and discriminant.
#[derive(Clone, Debug)]
pub struct NumberField {
    pub n: usize,
    pub poly: IPoly,
    /// Basis rows over the power basis (β_i = Σ_k basis[i][k]·θ^k), β_1 = 1.
    pub basis: Vec<Vec<BigRational>>,
    basis_inv: Vec<Vec<BigRational>>,
    /// mult_table[i][j] = coordinates of β_i·β_j over the basis.
    pub mult_table: Vec<Vec<Vec<BigRational>>>,
    /// Signed determinant of the trace form over the basis.
    pub disc_signed: BigInt,
    /// D_K: absolute value of the lattice discriminant.
    pub d_k: BigInt,
    /// Best-effort flag: disc(f) carries a square factor, so the power
    /// basis may generate a non-maximal order (warning only).
    pub disc_square_factor: bool,
    pub field_id: String,
}

// ---------------------------------------------------------------------------
// exact linear algebra helpers (small n, BigRational)
// ---------------------------------------------------------------------------

fn mat_det(mat: &[Vec<BigRational>]) -> BigRational {
    let n = mat.len();
    let mut m: Vec<Vec<BigRational>> = mat.to_vec();
    let mut det = q_one();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero());
        let piv = match piv {
            Some(p) => p,
            None => return q_zero(),
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= m[col][col].clone();
        let inv = q_one() / m[col][col].clone();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone() * &inv;
            for c in col..n {
                let t = m[col][c].clone();
                m[r][c] = &m[r][c] - &factor * t;
            }
        }
    }
    det
}

fn mat_inverse(mat: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = mat.len();
    let mut m: Vec<Vec<BigRational>> = mat
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { q_one() } else { q_zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(piv, col);
        let inv = q_one() / m[col][col].clone();
        for c in 0..2 * n {
            m[col][c] = &m[col][c] * &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in 0..2 * n {
                    let t = m[col][c].clone();
                    m[r][c] = &m[r][c] - &factor * t;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Solve x·A = b for a row vector x (A square, invertible).
fn solve_row(a_inv: &[Vec<BigRational>], b: &[BigRational]) -> Vec<BigRational> {
    let n = b.len();
    (0..n)
        .map(|j| (0..n).map(|i| &b[i] * &a_inv[i][j]).sum())
        .collect()
}

/// Exact kernel basis of a rational matrix (rows × cols), as row vectors in
/// the column space.
pub fn kernel_basis(mat: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    if mat.is_empty() {
        return Vec::new();
    }
    let rows = mat.len();
    let cols = mat[0].len();
    let mut m = mat.to_vec();
    let mut pivot_col_of_row = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        let piv = (r..rows).find(|&i| !m[i][c].is_zero());
        if let Some(p) = piv {
            m.swap(p, r);
            let inv = q_one() / m[r][c].clone();
            for cc in 0..cols {
                m[r][cc] = &m[r][cc] * &inv;
            }
            for i in 0..rows {
                if i != r && !m[i][c].is_zero() {
                    let factor = m[i][c].clone();
                    for cc in 0..cols {
                        let t = m[r][cc].clone();
                        m[i][cc] = &m[i][cc] - &factor * t;
                    }
                }
            }
            pivot_col_of_row.push(c);
            r += 1;
            if r == rows {
                break;
            }
        }
    }
    let pivot_cols: Vec<usize> = pivot_col_of_row.clone();
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = vec![q_zero(); cols];
        v[free] = q_one();
        for (row_idx, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -m[row_idx][free].clone();
        }
        basis.push(v);
    }
    basis
}

// ---------------------------------------------------------------------------
// construction
// ---------------------------------------------------------------------------

/// Best-effort square-factor detection by trial division (documented as a
/// warning heuristic, not a primality certificate).
fn has_square_factor(n: &BigInt) -> bool {
    let mut m = n.abs();
    if m.is_zero() || m.is_one() {
        return false;
    }
    let mut p = BigInt::from(2);
    let limit = BigInt::from(100_000u32);
    while &p * &p <= m && p <= limit {
        if (&m % &p).is_zero() {
            m /= &p;
            if (&m % &p).is_zero() {
                return true;
            }
        } else {
            p += 1;
        }
    }
    // remaining cofactor a perfect square?
    let s = m.sqrt();
    &s * &s == m && m > BigInt::one()
}

/// Build a number field from a monic integer polynomial and an optional
/// integral basis (rows over the power basis). Without a basis the power
/// basis is used and D_K := |disc(f)| under a documented monogenicity
/// assumption (square factors of disc(f) only raise a warning flag).
pub fn build_field(f: &IPoly, basis: Option<Vec<Vec<BigRational>>>) -> Result<NumberField> {
    let n = f.degree();
    assert!(n >= 2, "field degree must be at least 2");
    assert!(f.is_monic(), "defining polynomial must be monic");
    if let Some(factor) = irreducible_factor(f) {
        return Err(CoreError::NotIrreducible {
            factor: format!("{:?}", factor.0.iter().map(|c| c.to_string()).collect::<Vec<_>>()),
        });
    }
    let basis: Vec<Vec<BigRational>> = match basis {
        Some(b) => {
            if b.len() != n || b.iter().any(|row| row.len() != n) {
                return Err(CoreError::BadBasis {
                    detail: format!("expected {n}x{n} basis matrix"),
                });
            }
            b
        }
        None => (0..n)
            .map(|i| (0..n).map(|j| if i == j { q_one() } else { q_zero() }).collect())
            .collect(),
    };
    // β_1 must be the element 1
    if !(basis[0][0].is_one() && basis[0][1..].iter().all(|c| c.is_zero())) {
        return Err(CoreError::BadBasis {
            detail: "first basis element must be 1".into(),
        });
    }
    let basis_inv = mat_inverse(&basis).ok_or_else(|| CoreError::BadBasis {
        detail: "basis matrix is singular".into(),
    })?;

    // multiplication table: β_i·β_j in power coords, then back into basis coords
    let fq = f.to_qpoly();
    let mut mult_table = vec![vec![Vec::new(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let pi = QPoly::new(basis[i].clone());
            let pj = QPoly::new(basis[j].clone());
            let (_, prod) = pi.mul(&pj).div_rem(&fq);
            let mut pc = prod.0.clone();
            pc.resize(n, q_zero());
            let coords = solve_row(&basis_inv, &pc);
            // a ring basis multiplies into integer coordinates
            if coords.iter().any(|c| !c.denom().is_one()) {
                return Err(CoreError::BadBasis {
                    detail: format!("product β_{}·β_{} leaves the Z-span", i + 1, j + 1),
                });
            }
            mult_table[i][j] = coords.clone();
            mult_table[j][i] = coords;
        }
    }

    let mut field = NumberField {
        n,
        poly: f.clone(),
        basis,
        basis_inv,
        mult_table,
        disc_signed: BigInt::zero(),
        d_k: BigInt::zero(),
        disc_square_factor: false,
        field_id: String::new(),
    };
    // trace form determinant
    let tr_mat: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let prod = FieldElement { coords: field.mult_table[i][j].clone() };
                    field.trace(&prod)
                })
                .collect()
        })
        .collect();
    let det = mat_det(&tr_mat);
    if !det.denom().is_one() {
        return Err(CoreError::BadBasis {
            detail: "trace form determinant is not an integer".into(),
        });
    }
    field.disc_signed = det.numer().clone();
    field.d_k = field.disc_signed.abs();
    field.disc_square_factor = has_square_factor(&field.disc_signed);
    field.field_id = format!(
        "n{}_f{}",
        n,
        f.0.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("_")
    );
    Ok(field)
}

// ---------------------------------------------------------------------------
// element arithmetic
// ---------------------------------------------------------------------------

impl NumberField {
    pub fn zero(&self) -> FieldElement {
        FieldElement { coords: vec![q_zero(); self.n] }
    }

    pub fn one(&self) -> FieldElement {
        let mut e = self.zero();
        e.coords[0] = q_one();
        e
    }

    /// The image of the power-basis generator θ as a field element.
    pub fn theta(&self) -> FieldElement {
        let mut pc = vec![q_zero(); self.n];
        pc[1] = q_one();
        self.from_power_coords(&pc)
    }

    pub fn from_power_coords(&self, pc: &[BigRational]) -> FieldElement {
        FieldElement { coords: solve_row(&self.basis_inv, pc) }
    }

    pub fn to_power_coords(&self, x: &FieldElement) -> Vec<BigRational> {
        (0..self.n)
            .map(|k| (0..self.n).map(|i| &x.coords[i] * &self.basis[i][k]).sum())
            .collect()
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement {
            coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement {
            coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x - y).collect(),
        }
    }

    pub fn scale(&self, a: &FieldElement, k: &BigRational) -> FieldElement {
        FieldElement { coords: a.coords.iter().map(|x| x * k).collect() }
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let mut out = vec![q_zero(); self.n];
        for i in 0..self.n {
            if a.coords[i].is_zero() {
                continue;
            }
            for j in 0..self.n {
                if b.coords[j].is_zero() {
                    continue;
                }
                let w = &a.coords[i] * &b.coords[j];
                for (k, t) in self.mult_table[i][j].iter().enumerate() {
                    if !t.is_zero() {
                        out[k] = &out[k] + &w * t;
                    }
                }
            }
        }
        FieldElement { coords: out }
    }

    /// Matrix of multiplication by x over the basis (columns are x·β_j).
    pub fn mult_matrix(&self, x: &FieldElement) -> Vec<Vec<BigRational>> {
        let mut m = vec![vec![q_zero(); self.n]; self.n];
        for j in 0..self.n {
            let mut col = vec![q_zero(); self.n];
            for i in 0..self.n {
                if x.coords[i].is_zero() {
                    continue;
                }
                for (k, t) in self.mult_table[i][j].iter().enumerate() {
                    col[k] = &col[k] + &x.coords[i] * t;
                }
            }
            for k in 0..self.n {
                m[k][j] = col[k].clone();
            }
        }
        m
    }

    /// Field norm: determinant of the multiplication-by-x matrix.
    /// N(x) = 0 iff x = 0; integral x gives an integer norm.
    pub fn norm(&self, x: &FieldElement) -> BigRational {
        if x.is_zero() {
            return q_zero();
        }
        mat_det(&self.mult_matrix(x))
    }

    pub fn trace(&self, x: &FieldElement) -> BigRational {
        let m = self.mult_matrix(x);
        (0..self.n).map(|i| m[i][i].clone()).sum()
    }

    /// Monic minimal polynomial of x, by exact linear algebra on the powers
    /// 1, x, x², … (first linear dependency).
    pub fn minpoly(&self, x: &FieldElement) -> QPoly {
        let mut powers: Vec<FieldElement> = vec![self.one()];
        for _ in 0..self.n {
            let last = powers.last().unwrap();
            powers.push(self.mul(last, x));
        }
        for d in 1..=self.n {
            // solve c_0·1 + c_1·x + … + c_{d-1}·x^{d-1} = -x^d
            let mat: Vec<Vec<BigRational>> = (0..self.n)
                .map(|row| (0..d).map(|j| powers[j].coords[row].clone()).collect())
                .collect();
            let rhs: Vec<BigRational> = (0..self.n).map(|row| -powers[d].coords[row].clone()).collect();
            if let Some(sol) = solve_least(&mat, &rhs) {
                let mut coeffs = sol;
                coeffs.push(q_one());
                return QPoly::new(coeffs);
            }
        }
        unreachable!("degree-n power relation always exists");
    }
}

/// Solve an overdetermined exact system M·c = rhs (columns d ≤ rows), or
/// None when inconsistent.
fn solve_least(mat: &[Vec<BigRational>], rhs: &[BigRational]) -> Option<Vec<BigRational>> {
    let rows = mat.len();
    let cols = mat[0].len();
    let mut m: Vec<Vec<BigRational>> = mat
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut row = r.clone();
            row.push(b.clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        if let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) {
            m.swap(p, r);
            let inv = q_one() / m[r][c].clone();
            for cc in 0..=cols {
                m[r][cc] = &m[r][cc] * &inv;
            }
            for i in 0..rows {
                if i != r && !m[i][c].is_zero() {
                    let factor = m[i][c].clone();
                    for cc in 0..=cols {
                        let t = m[r][cc].clone();
                        m[i][cc] = &m[i][cc] - &factor * t;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
    }
    // inconsistent if any zero-row has nonzero rhs
    for i in r..rows {
        if !m[i][cols].is_zero() {
            return None;
        }
    }
    if pivots.len() < cols {
        return None; // underdetermined: an earlier power already depends
    }
    let mut sol = vec![q_zero(); cols];
    for (row_idx, &pc) in pivots.iter().enumerate() {
        sol[pc] = m[row_idx][cols].clone();
    }
    Some(sol)
}

// ---------------------------------------------------------------------------
// embeddings
// ---------------------------------------------------------------------------

/// Complex embeddings of K at a working precision, with certified
/// per-root inclusion radii. Embedding 0 is the distinguished one
/// (a real root when one exists) used wherever "the" copy of K in C
/// is needed.
#[derive(Clone, Debug)]
pub struct EmbeddingSet {
    pub prec_bits: u32,
    pub roots: Vec<Cf>,
    pub radii: Vec<Bf>,
    /// basis_embeds[j][i] = σ_j(β_i)
    pub basis_embeds: Vec<Vec<Cf>>,
    pub basis_embeds_f64: Vec<Vec<Complex64>>,
    /// crude per-element derivative bound for error propagation
    embed_err: Vec<Vec<Bf>>,
}

impl NumberField {
    /// Compute the embedding set at the requested precision.
    /// Roots are refined until pairwise separation exceeds twice the sum of
    /// inclusion radii; failure to reach that at `prec_cap` is
    /// `PrecisionExhausted`.
    pub fn embeddings(&self, prec_bits: u32) -> Result<EmbeddingSet> {
        let fq = self.poly.to_qpoly();
        let seeds = roots_f64(&fq);
        let mut prec = prec_bits.max(64);
        let cap = 4096u32;
        loop {
            let (mut roots, radii) = refine_roots(&fq, &seeds, prec);
            // distinguished embedding first: real root if one exists
            let mut order: Vec<usize> = (0..roots.len()).collect();
            order.sort_by_key(|&i| (!roots[i].im.is_zero()) as u8);
            let roots_sorted: Vec<Cf> = order.iter().map(|&i| roots[i].clone()).collect();
            let radii_sorted: Vec<Bf> = order.iter().map(|&i| radii[i].clone()).collect();
            roots = roots_sorted;
            let radii = radii_sorted;
            // separation check
            let mut ok = true;
            'sep: for i in 0..roots.len() {
                for j in 0..i {
                    let dist = roots[i].sub(&roots[j], prec).abs(prec);
                    let lim = radii[i].add(&radii[j], prec).mul_i64(2, prec);
                    if dist.lt(&lim) {
                        ok = false;
                        break 'sep;
                    }
                }
            }
            if !ok {
                if prec >= cap {
                    return Err(CoreError::PrecisionExhausted { needed: prec * 2, cap });
                }
                prec *= 2;
                continue;
            }
            let mut basis_embeds = Vec::with_capacity(self.n);
            let mut basis_embeds_f64 = Vec::with_capacity(self.n);
            let mut embed_err = Vec::with_capacity(self.n);
            for root_j in 0..self.n {
                let z = &roots[root_j];
                let zabs = z.abs(prec).add(&Bf::from_i64(1), prec);
                let mut row = Vec::with_capacity(self.n);
                let mut row64 = Vec::with_capacity(self.n);
                let mut errs = Vec::with_capacity(self.n);
                for i in 0..self.n {
                    let poly_i = QPoly::new(self.basis[i].clone());
                    let v = poly_i.eval_cf(z, prec);
                    row64.push(v.to_c64());
                    // |d/dz Σ b_k z^k| ≤ Σ |b_k|·k·|z|^(k-1); times radius
                    let mut deriv_bound = Bf::zero();
                    let mut zpow = Bf::from_i64(1);
                    for (k, c) in self.basis[i].iter().enumerate() {
                        if k >= 1 && !c.is_zero() {
                            let ck = Bf::from_ratio(c, prec).abs().mul_i64(k as i64, prec);
                            deriv_bound = deriv_bound.add(&ck.mul(&zpow, prec), prec);
                        }
                        zpow = zpow.mul(&zabs, prec);
                    }
                    errs.push(deriv_bound.mul(&radii[root_j], prec));
                    row.push(v);
                }
                basis_embeds.push(row);
                basis_embeds_f64.push(row64);
                embed_err.push(errs);
            }
            return Ok(EmbeddingSet {
                prec_bits: prec,
                roots,
                radii,
                basis_embeds,
                basis_embeds_f64,
                embed_err,
            });
        }
    }
}

impl EmbeddingSet {
    pub fn n(&self) -> usize {
        self.roots.len()
    }

    /// σ_j(x) at full precision together with an error bound.
    pub fn embed(&self, x: &FieldElement, j: usize) -> (Cf, Bf) {
        let prec = self.prec_bits;
        let mut acc = Cf::zero();
        let mut err = Bf::zero();
        for (i, c) in x.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cb = Bf::from_ratio(c, prec);
            acc = acc.add(&self.basis_embeds[j][i].scale(&cb, prec), prec);
            err = err.add(&cb.abs().mul(&self.embed_err[j][i], prec), prec);
        }
        (acc, err)
    }

    pub fn embed_f64(&self, x: &FieldElement, j: usize) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, c) in x.coords.iter().enumerate() {
            if !c.is_zero() {
                acc += self.basis_embeds_f64[j][i] * crate::poly::rational_to_f64(c);
            }
        }
        acc
    }

    /// Archimedean size ‖x‖ = Σ_j |σ_j(x)| with a certified error bound.
    pub fn arch_size(&self, x: &FieldElement) -> (Bf, Bf) {
        let prec = self.prec_bits;
        let mut total = Bf::zero();
        let mut err = Bf::zero();
        for j in 0..self.n() {
            let (v, e) = self.embed(x, j);
            total = total.add(&v.abs(prec), prec);
            err = err.add(&e, prec);
        }
        (total, err)
    }

    /// Archimedean size meeting an absolute error tolerance.
    pub fn arch_size_with_tol(&self, x: &FieldElement, tol: f64) -> Result<f64> {
        let (v, e) = self.arch_size(x);
        if e.to_f64() > tol {
            return Err(CoreError::PrecisionExhausted {
                needed: self.prec_bits * 2,
                cap: self.prec_bits,
            });
        }
        Ok(v.to_f64())
    }
}

// ---------------------------------------------------------------------------
// reduced basis and the δ-ledger
// ---------------------------------------------------------------------------

/// Reduction output: the new integral basis (α_1 = 1 pinned), archimedean
/// sizes in nondecreasing order, exponents δ_i = log‖α_i‖ / log D_K, and
/// the tail sum E_{K,3} = Σ_{3≤j≤⌊2n/3⌋} (1/n − δ_j).
#[derive(Clone, Debug, Serialize)]
pub struct ReducedBasis {
    #[serde(skip)]
    pub elements: Vec<FieldElement>,
    pub sizes: Vec<f64>,
    pub deltas: Vec<f64>,
    pub e_k3: f64,
    pub product_ratio: f64,
    pub slack: f64,
    pub bounds_ok: bool,
}

impl ReducedBasis {
    /// δ_{2,K}, the exponent of the second basis element.
    pub fn delta2(&self) -> f64 {
        self.deltas[1]
    }

    pub fn delta(&self, i: usize) -> f64 {
        self.deltas[i - 1]
    }
}

/// Tunables for reduction and certification.
#[derive(Clone, Debug)]
pub struct ReduceParams {
    pub prec_bits: u32,
    /// window constant C: ∏‖α_i‖/√D_K must land in [1/C, C]
    pub window_c: f64,
    /// slack constant: δ bounds get slack log(C_slack)/log D_K
    pub slack_c: f64,
    pub max_rounds: usize,
}

impl Default for ReduceParams {
    fn default() -> Self {
        ReduceParams {
            prec_bits: 128,
            window_c: crate::calib::BASIS_PRODUCT_WINDOW_C,
            slack_c: crate::calib::DELTA_SLACK_C,
            max_rounds: 64,
        }
    }
}

impl NumberField {
    /// Greedy size-reduction of the integral basis under ‖·‖, seeded by LLL
    /// on the Minkowski embedding, with α_1 = 1 pinned. Certifies the
    /// product window and the δ bounds with the configured slack.
    pub fn reduce_basis(&self, params: &ReduceParams) -> Result<ReducedBasis> {
        let n = self.n;
        assert!(self.d_k > BigInt::one(), "reduction needs D_K > 1");
        let emb = self.embeddings(params.prec_bits)?;

        // Minkowski rows (all embeddings as re/im pairs; conjugate
        // duplication only rescales the quadratic form)
        let mut rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut v = Vec::with_capacity(2 * n);
                for j in 0..n {
                    let z = emb.basis_embeds_f64[j][i];
                    v.push(z.re);
                    v.push(z.im);
                }
                v
            })
            .collect();
        let mut coords: Vec<Vec<BigInt>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect();
        lll::lll_f64(&mut rows, &mut coords, 0.99);

        // move 1 into the first slot by completing its (primitive)
        // coordinate vector to a unimodular transform
        let one_coords = self.coords_in(&coords, &self.one());
        let v = complete_unimodular(&one_coords);
        let coords: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|k| (0..n).map(|j| &v[i][j] * &coords[j][k]).sum())
                    .collect()
            })
            .collect();

        let elem = |c: &Vec<BigInt>| FieldElement {
            coords: c.iter().map(|x| BigRational::from_integer(x.clone())).collect(),
        };
        let size_of = |e: &FieldElement| -> f64 {
            let (v, _) = emb.arch_size(e);
            v.to_f64()
        };

        let mut els: Vec<Vec<BigInt>> = coords;
        debug_assert_eq!(elem(&els[0]), self.one());

        // greedy local moves: α_i ← α_i + q·α_j (i ≥ 1), ranked by ‖·‖
        let mut sizes: Vec<f64> = els.iter().map(|c| size_of(&elem(c))).collect();
        for _round in 0..params.max_rounds {
            let mut improved = false;
            for i in 1..n {
                // single-partner moves
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    loop {
                        let mut best: Option<(i64, f64)> = None;
                        for q in [-2i64, -1, 1, 2] {
                            let mut cand = els[i].clone();
                            for k in 0..n {
                                cand[k] = &cand[k] + BigInt::from(q) * &els[j][k];
                            }
                            let s = size_of(&elem(&cand));
                            if s < sizes[i] * (1.0 - 1e-12) && best.map_or(true, |(_, bs)| s < bs) {
                                best = Some((q, s));
                            }
                        }
                        match best {
                            Some((q, s)) => {
                                for k in 0..n {
                                    els[i][k] = &els[i][k] + BigInt::from(q) * &els[j][k];
                                }
                                sizes[i] = s;
                                improved = true;
                            }
                            None => break,
                        }
                    }
                }
                // triple moves with unit coefficients
                for j in 0..n {
                    for k in 0..n {
                        if j == i || k == i || j == k {
                            continue;
                        }
                        for (qj, qk) in [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1)] {
                            let mut cand = els[i].clone();
                            for d in 0..n {
                                cand[d] = &cand[d]
                                    + BigInt::from(qj) * &els[j][d]
                                    + BigInt::from(qk) * &els[k][d];
                            }
                            let s = size_of(&elem(&cand));
                            if s < sizes[i] * (1.0 - 1e-12) {
                                els[i] = cand;
                                sizes[i] = s;
                                improved = true;
                            }
                        }
                    }
                }
            }
            if !improved {
                break;
            }
        }

        // sort by size, 1 pinned first; ties broken on exact coordinates
        let mut order: Vec<usize> = (1..n).collect();
        order.sort_by(|&a, &b| {
            sizes[a]
                .partial_cmp(&sizes[b])
                .unwrap()
                .then_with(|| els[a].cmp(&els[b]))
        });
        let mut final_coords = vec![els[0].clone()];
        final_coords.extend(order.iter().map(|&i| els[i].clone()));

        // unimodularity of the whole transformation
        let tr_mat: Vec<Vec<BigRational>> = final_coords
            .iter()
            .map(|row| row.iter().map(|c| BigRational::from_integer(c.clone())).collect())
            .collect();
        let det = mat_det(&tr_mat);
        if !(det.clone().abs().is_one()) {
            return Err(CoreError::ReductionStalled {
                detail: format!("transformation determinant {det} is not ±1"),
            });
        }

        let elements: Vec<FieldElement> = final_coords.iter().map(&elem).collect();
        let sizes: Vec<f64> = elements.iter().map(&size_of).collect();
        let ln_d = bigint_ln(&self.d_k);
        let deltas: Vec<f64> = sizes.iter().map(|s| s.ln() / ln_d).collect();
        let two_thirds = (2 * n) / 3;
        let e_k3: f64 = (3..=two_thirds).map(|j| 1.0 / n as f64 - deltas[j - 1]).sum();

        let log_prod: f64 = sizes[1..].iter().map(|s| s.ln()).sum();
        let product_ratio = (log_prod - 0.5 * ln_d).exp();
        let slack = params.slack_c.ln() / ln_d;

        let window_ok =
            product_ratio <= params.window_c && product_ratio >= 1.0 / params.window_c;
        let delta_ok = deltas[1..]
            .iter()
            .all(|&d| d <= 1.0 / n as f64 + slack)
            && deltas[1] <= 1.0 / (2.0 * (n as f64 - 1.0)) + slack;
        if !window_ok {
            return Err(CoreError::ReductionStalled {
                detail: format!(
                    "no further unimodular improvement; ∏‖α_i‖/√D = {product_ratio:.4} outside [1/{0}, {0}]",
                    params.window_c
                ),
            });
        }
        Ok(ReducedBasis {
            elements,
            sizes,
            deltas,
            e_k3,
            product_ratio,
            slack,
            bounds_ok: delta_ok,
        })
    }

    /// Exact coordinates of x in a basis given by integer coordinate rows
    /// over this field's basis.
    fn coords_in(&self, rows: &[Vec<BigInt>], x: &FieldElement) -> Vec<BigInt> {
        let mat: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|r| r.iter().map(|c| BigRational::from_integer(c.clone())).collect())
            .collect();
        let inv = mat_inverse(&mat).expect("basis rows are unimodular");
        let sol = solve_row(&inv, &x.coords);
        sol.into_iter()
            .map(|c| {
                assert!(c.denom().is_one(), "coordinates must be integral");
                c.numer().clone()
            })
            .collect()
    }
}

pub fn bigint_ln(v: &BigInt) -> f64 {
    let bits = v.magnitude().bits();
    if bits <= 52 {
        return v.to_f64().unwrap().ln();
    }
    let top = (v.magnitude() >> (bits - 52)).to_f64().unwrap();
    top.ln() + (bits - 52) as f64 * std::f64::consts::LN_2
}

/// Complete a primitive integer vector to a unimodular matrix having it as
/// the first row (column-reduction by extended gcd steps, then inversion).
fn complete_unimodular(c: &[BigInt]) -> Vec<Vec<BigInt>> {
    let n = c.len();
    let mut w: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut v = c.to_vec();
    // reduce v to ±e_1 by integer column operations mirrored on w
    loop {
        let nonzero: Vec<usize> = (0..n).filter(|&i| !v[i].is_zero()).collect();
        if nonzero.len() == 1 {
            let i = nonzero[0];
            if i != 0 {
                v.swap(0, i);
                for row in w.iter_mut() {
                    row.swap(0, i);
                }
            }
            if v[0].is_negative() {
                v[0] = -v[0].clone();
                for row in w.iter_mut() {
                    row[0] = -row[0].clone();
                }
            }
            assert!(v[0].is_one(), "vector is not primitive");
            break;
        }
        // pick the two smallest nonzero entries and reduce
        let mut idx = nonzero.clone();
        idx.sort_by_key(|&i| v[i].abs());
        let (a, b) = (idx[0], idx[1]);
        let qq = &v[b] / &v[a];
        let t = &v[a] * &qq;
        v[b] -= t;
        for row in w.iter_mut() {
            let t = &row[a] * &qq;
            row[b] = &row[b] - t;
        }
    }
    // v = c·W = e_1 (after ops); the wanted matrix is W^{-1}, whose first
    // row is c itself
    let wq: Vec<Vec<BigRational>> = w
        .iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();
    let winv = mat_inverse(&wq).expect("unimodular by construction");
    winv.into_iter()
        .map(|row| {
            row.into_iter()
                .map(|x| {
                    assert!(x.denom().is_one());
                    x.numer().clone()
                })
                .collect()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// fixed spaces, automorphisms, index-2 subfields
// ---------------------------------------------------------------------------

/// Result of the kernel computation for the twisted-equalizer space
/// V = {x : x = (1/(1-λ))σ(x) − (λ/(1-λ))τ(x)}.
///
/// `dim` is the certified rational kernel dimension (zero columns with an
/// integrality certificate, plus exactly certified lattice relations);
/// `real_kernel_dim` is the kernel of the real 2×n relaxation of the one
/// complex condition, an upper bound that degenerates to n−1 whenever σ
/// and τ are complex-conjugate embeddings.
#[derive(Clone, Debug, Serialize)]
pub struct FixedSpaceDim {
    pub dim: usize,
    pub real_kernel_dim: usize,
    pub singular_values: Vec<f64>,
    /// certified dim ≤ ⌊2n/3⌋ held?
    pub bound_ok: bool,
}

impl NumberField {
    /// Kernel dimension of φ(x) = x − (1/(1-λ))σ(x) + (λ/(1-λ))τ(x) with
    /// λ the cross-ratio (σ(g)−g)/(τ(g)−g) of a given integral element g
    /// (the shape every application here uses; g = α₂ typically).
    ///
    /// The rational dimension is certified constructively: a candidate
    /// x = Σ c_i β_i lies in V iff the cleared defect
    /// (τ(g)−g)(x−σ(x)) − (σ(g)−g)(x−τ(x)) vanishes, and that value is an
    /// algebraic integer, so vanishing is decided by the conjugate-product
    /// gap bound. The singular values of the 2×n real relaxation are
    /// reported with the configured threshold semantics.
    pub fn fixed_space_dim(
        &self,
        emb: &EmbeddingSet,
        sigma: usize,
        tau: usize,
        lambda_gen: &FieldElement,
    ) -> Result<FixedSpaceDim> {
        assert!(sigma != tau, "fixed_space_dim needs σ ≠ τ");
        let n = self.n;
        // precision for certification: conjugate products of degree ≤ n³
        let mg = self.max_embed_abs(emb, lambda_gen);
        let need = (n as u32).pow(3) * (mg.log2().max(1.0) as u32 + 4) + 128;
        let hi;
        let emb = if emb.prec_bits >= need {
            emb
        } else {
            hi = self.embeddings(need)?;
            &hi
        };
        let prec = emb.prec_bits;
        let (g_i, _) = emb.embed(lambda_gen, 0);
        let (g_s, _) = emb.embed(lambda_gen, sigma);
        let (g_t, _) = emb.embed(lambda_gen, tau);
        let num = g_s.sub(&g_i, prec);
        let den = g_t.sub(&g_i, prec);
        // λ ∉ {0, 1} and defined: σ(g) ≠ g, τ(g) ≠ g, σ(g) ≠ τ(g)
        for (d, what) in [(&num, "σ(g) = g gives λ = 0"), (&den, "τ(g) = g leaves λ undefined")] {
            if self.certify_zero_element_difference(emb, d, lambda_gen)? {
                return Err(CoreError::Inconclusive { detail: what.into() });
            }
        }
        let st = g_s.sub(&g_t, prec);
        if self.certify_zero_element_difference(emb, &st, lambda_gen)? {
            return Err(CoreError::Inconclusive {
                detail: "σ(g) = τ(g) gives λ = 1 (pole of 1/(1-λ))".into(),
            });
        }
        let lambda = num.div(&den, prec);

        // φ values per basis element, at full precision
        let one = Cf::new(Bf::from_i64(1), Bf::zero());
        let inv_one_minus = one.sub(&lambda, prec);
        let phis: Vec<Cf> = (0..n)
            .map(|i| {
                let a = emb.basis_embeds[0][i].clone();
                let b = emb.basis_embeds[sigma][i].clone();
                let c = emb.basis_embeds[tau][i].clone();
                // x − σ(x)/(1−λ) + λτ(x)/(1−λ), assembled as
                // ((1−λ)x − σ(x) + λτ(x)) / (1−λ)
                let top = inv_one_minus
                    .mul(&a, prec)
                    .sub(&b, prec)
                    .add(&lambda.mul(&c, prec), prec);
                top.div(&inv_one_minus, prec)
            })
            .collect();

        // singular values of the real 2×n relaxation (f64 view)
        let mut mat = vec![vec![0.0f64; n]; 2];
        let mut scale: f64 = 0.0;
        for (i, phi) in phis.iter().enumerate() {
            let z = phi.to_c64();
            mat[0][i] = z.re;
            mat[1][i] = z.im;
            scale = scale.max(z.norm());
        }
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let g00 = dot(&mat[0], &mat[0]);
        let g01 = dot(&mat[0], &mat[1]);
        let g11 = dot(&mat[1], &mat[1]);
        let tr = g00 + g11;
        let det = g00 * g11 - g01 * g01;
        let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
        let s1 = ((tr + disc) / 2.0).max(0.0).sqrt();
        let s2 = ((tr - disc) / 2.0).max(0.0).sqrt();
        let thr = 1e-9 * scale.max(1e-300);
        let band = 1e3;
        let mut rank = 0usize;
        for &s in &[s1, s2] {
            if s > thr * band {
                rank += 1;
            } else if s > thr / band {
                return Err(CoreError::IllConditioned {
                    value: s,
                    lo: thr / band,
                    hi: thr * band,
                });
            }
        }
        let real_kernel_dim = n - rank;

        // certified kernel: zero columns first
        let mut zero_cols = Vec::new();
        let mut live_cols = Vec::new();
        for i in 0..n {
            let unit = {
                let mut e = self.zero();
                e.coords[i] = q_one();
                e
            };
            if self.certify_in_twisted_kernel(emb, lambda_gen, sigma, tau, &unit)? {
                zero_cols.push(i);
            } else {
                live_cols.push(i);
            }
        }
        let mut certified_extra: Vec<Vec<BigInt>> = Vec::new();
        if live_cols.len() >= 2 {
            let vals: Vec<Cf> = live_cols.iter().map(|&i| phis[i].clone()).collect();
            let cands = lll::relation_candidates(
                &vals,
                (prec as i64 / 2).max(160),
                &(BigInt::one() << 48),
            );
            for c in cands {
                let mut w = self.zero();
                for (k, &i) in live_cols.iter().enumerate() {
                    w.coords[i] = BigRational::from_integer(c[k].clone());
                }
                if self.certify_in_twisted_kernel(emb, lambda_gen, sigma, tau, &w)? {
                    certified_extra.push(c);
                }
            }
        }
        let extra_rank = if certified_extra.is_empty() {
            0
        } else {
            rank_of(
                &certified_extra
                    .iter()
                    .map(|r| {
                        r.iter()
                            .map(|x| BigRational::from_integer(x.clone()))
                            .collect::<Vec<_>>()
                    })
                    .collect::<Vec<_>>(),
            )
        };
        let dim = zero_cols.len() + extra_rank;
        Ok(FixedSpaceDim {
            dim,
            real_kernel_dim,
            singular_values: vec![s1, s2],
            bound_ok: dim <= 2 * n / 3,
        })
    }

    /// Certified membership of x in the twisted kernel: the cleared defect
    /// (τ(g)−g)(x−σ(x)) − (σ(g)−g)(x−τ(x)) vanishes exactly. The defect is
    /// an algebraic integer of degree at most n(n−1)(n−2) with conjugates
    /// bounded by 8·M_g·M_x, so the gap bound decides vanishing.
    fn certify_in_twisted_kernel(
        &self,
        emb: &EmbeddingSet,
        g: &FieldElement,
        sigma: usize,
        tau: usize,
        x: &FieldElement,
    ) -> Result<bool> {
        let prec = emb.prec_bits;
        let (g_i, eg_i) = emb.embed(g, 0);
        let (g_s, eg_s) = emb.embed(g, sigma);
        let (g_t, eg_t) = emb.embed(g, tau);
        let (x_i, ex_i) = emb.embed(x, 0);
        let (x_s, ex_s) = emb.embed(x, sigma);
        let (x_t, ex_t) = emb.embed(x, tau);
        let a = g_t.sub(&g_i, prec);
        let ea = eg_t.add(&eg_i, prec);
        let b = x_i.sub(&x_s, prec);
        let eb = ex_i.add(&ex_s, prec);
        let c = g_s.sub(&g_i, prec);
        let ec = eg_s.add(&eg_i, prec);
        let d = x_i.sub(&x_t, prec);
        let ed = ex_i.add(&ex_t, prec);
        let defect = a.mul(&b, prec).sub(&c.mul(&d, prec), prec);
        // |Δ(ab−cd)| ≤ |a|·eb + |b|·ea + |c|·ed + |d|·ec + cross terms
        let err = a
            .abs(prec)
            .mul(&eb, prec)
            .add(&b.abs(prec).mul(&ea, prec), prec)
            .add(&c.abs(prec).mul(&ed, prec), prec)
            .add(&d.abs(prec).mul(&ec, prec), prec)
            .add(&ea.mul(&eb, prec), prec)
            .add(&ec.mul(&ed, prec), prec)
            .add(&Bf::pow2(8 - prec as i64), prec);
        let mg = self.max_embed_abs(emb, g);
        let mx = self.max_embed_abs(emb, x);
        let bound = Bf::from_f64((8.0 * mg * mx).max(2.0));
        let n = self.n as i64;
        let degree = n * (n - 1) * (n - 2);
        certify_zero_gap(&defect, &err, &bound, degree, prec)
    }

    fn max_embed_abs(&self, emb: &EmbeddingSet, x: &FieldElement) -> f64 {
        (0..self.n)
            .map(|j| emb.embed_f64(x, j).norm())
            .fold(1.0, f64::max)
    }

    /// Public entry for the cleared cross-ratio defect certificate (used by
    /// the norm-form diagnostics).
    pub fn certify_in_twisted_kernel_public(
        &self,
        emb: &EmbeddingSet,
        g: &FieldElement,
        sigma: usize,
        tau: usize,
        x: &FieldElement,
    ) -> Result<bool> {
        self.certify_in_twisted_kernel(emb, g, sigma, tau, x)
    }

    /// Public entry for the difference-of-conjugates vanishing certificate.
    pub fn certify_zero_element_difference_public(
        &self,
        emb: &EmbeddingSet,
        diff: &Cf,
        w: &FieldElement,
    ) -> Result<bool> {
        self.certify_zero_element_difference(emb, diff, w)
    }

    /// If σ_j extends to a field automorphism (σ_j(K) = K), return the
    /// polynomial g with σ(θ) = g(θ), certified exactly by f | f∘g.
    pub fn automorphism_poly(&self, emb: &EmbeddingSet, j: usize) -> Option<QPoly> {
        let prec = emb.prec_bits.max(192);
        let n = self.n;
        // candidate relation: θ_j = Σ c_i·θ_0^i with rational c_i; search
        // integer relations among {1, θ_0, …, θ_0^(n-1), θ_j} and read off
        // the candidate with a nonzero last coefficient
        let theta0 = &emb.roots[0];
        let mut vals: Vec<Cf> = Vec::with_capacity(n + 1);
        let mut acc = Cf::new(Bf::from_i64(1), Bf::zero());
        for _ in 0..n {
            vals.push(acc.clone());
            acc = acc.mul(theta0, prec);
        }
        vals.push(emb.roots[j].clone());
        let height = BigInt::one() << 64;
        let cands = lll::relation_candidates(&vals, (prec as i64 - 32).max(160), &height);
        for c in cands {
            let d = &c[n];
            if d.is_zero() {
                continue;
            }
            // θ_j = -(1/d)·Σ c_i θ^i
            let dq = BigRational::from_integer(d.clone());
            let g = QPoly::new(
                c[..n]
                    .iter()
                    .map(|ci| -BigRational::from_integer(ci.clone()) / dq.clone())
                    .collect(),
            );
            // exact certificate: f(g(x)) ≡ 0 mod f(x)
            let comp = self.poly.compose_mod(&g, &self.poly.to_qpoly());
            if comp.is_zero() {
                return Some(g);
            }
        }
        None
    }

    /// Exact matrix of an automorphism given by its polynomial (basis → basis).
    fn automorphism_matrix(&self, g: &QPoly) -> Vec<Vec<BigRational>> {
        let fq = self.poly.to_qpoly();
        (0..self.n)
            .map(|i| {
                // β_i(θ) ↦ β_i(g(θ)) mod f, then into basis coordinates
                let bi = IPolyLike(&self.basis[i]);
                let image = bi.compose_mod(g, &fq);
                let mut pc = image.0;
                pc.resize(self.n, q_zero());
                solve_row(&self.basis_inv, &pc)
            })
            .collect()
    }

    /// Dimension of the equalizer {x ∈ K : σ_j(x) = σ_0(x)}.
    ///
    /// When σ_j is certified as an automorphism the kernel of (A − I) is
    /// computed exactly. Otherwise columns that vanish to certified
    /// precision give basis vectors, LLL suggests extra rational relations,
    /// and every candidate is certified through the algebraic-integer gap
    /// bound (a nonzero algebraic integer with conjugates bounded by M has
    /// absolute value ≥ M^(1-deg)).
    pub fn fixed_field_dim(&self, emb: &EmbeddingSet, j: usize) -> Result<usize> {
        assert!(j != 0, "σ must differ from the distinguished embedding");
        if let Some(g) = self.automorphism_poly(emb, j) {
            let a = self.automorphism_matrix(&g);
            let n = self.n;
            let m: Vec<Vec<BigRational>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|k| {
                            let delta = if i == k { q_one() } else { q_zero() };
                            &a[i][k] - delta
                        })
                        .collect()
                })
                .collect();
            // kernel of x ↦ x·(A − I) on row vectors: transpose for kernel_basis
            let mt: Vec<Vec<BigRational>> = (0..n)
                .map(|c| (0..n).map(|r| m[r][c].clone()).collect())
                .collect();
            return Ok(kernel_basis(&mt).len());
        }
        // non-automorphism path: certified numerical equalizer
        let n = self.n;
        let prec = emb.prec_bits;
        let gammas: Vec<Cf> = (0..n)
            .map(|i| emb.basis_embeds[j][i].sub(&emb.basis_embeds[0][i], prec))
            .collect();
        let mut dim = 0usize;
        let mut nonzero_idx = Vec::new();
        for (i, g) in gammas.iter().enumerate() {
            if self.certify_zero_difference(emb, g, i)? {
                dim += 1;
            } else {
                nonzero_idx.push(i);
            }
        }
        if nonzero_idx.len() >= 2 {
            let vals: Vec<Cf> = nonzero_idx.iter().map(|&i| gammas[i].clone()).collect();
            let cands =
                lll::relation_candidates(&vals, (prec as i64 - 32).max(128), &(BigInt::one() << 48));
            let mut certified: Vec<Vec<BigInt>> = Vec::new();
            for c in cands {
                // w = Σ c_k β_{idx k}: certify σ(w) = ι(w)
                let mut w = self.zero();
                for (k, &i) in nonzero_idx.iter().enumerate() {
                    let mut unit = self.zero();
                    unit.coords[i] = BigRational::from_integer(c[k].clone());
                    w = self.add(&w, &unit);
                }
                let (vj, _) = emb.embed(&w, j);
                let (v0, _) = emb.embed(&w, 0);
                let diff = vj.sub(&v0, prec);
                if self.certify_zero_element_difference(emb, &diff, &w)? {
                    certified.push(c);
                }
            }
            // rational rank of the certified relation set
            if !certified.is_empty() {
                let matq: Vec<Vec<BigRational>> = certified
                    .iter()
                    .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
                    .collect();
                dim += rank_of(&matq);
            }
        }
        if n % dim.max(1) != 0 {
            return Err(CoreError::Inconclusive {
                detail: format!("equalizer dimension {dim} does not divide n = {n}"),
            });
        }
        Ok(dim)
    }

    /// Certified-zero test for γ = σ_j(β_i) − σ_0(β_i).
    fn certify_zero_difference(&self, emb: &EmbeddingSet, g: &Cf, i: usize) -> Result<bool> {
        let prec = emb.prec_bits;
        let mut m = Bf::from_i64(1);
        for k in 0..self.n {
            let a = emb.basis_embeds[k][i].abs(prec);
            if m.lt(&a) {
                m = a;
            }
        }
        let two_m = m.mul_i64(2, prec).add(&Bf::from_i64(1), prec);
        let err = emb.embed_err[0][i]
            .add(&emb.embed_err[1][i], prec)
            .add(&Bf::pow2(8 - prec as i64), prec);
        let n = self.n as i64;
        certify_zero_gap(g, &err, &two_m, n * (n - 1), prec)
    }

    fn certify_zero_element_difference(
        &self,
        emb: &EmbeddingSet,
        diff: &Cf,
        w: &FieldElement,
    ) -> Result<bool> {
        let prec = emb.prec_bits;
        let mut m = Bf::from_i64(1);
        let mut err = Bf::pow2(8 - prec as i64);
        for k in 0..self.n {
            let (v, e) = emb.embed(w, k);
            let a = v.abs(prec);
            if m.lt(&a) {
                m = a;
            }
            err = err.add(&e, prec);
        }
        let two_m = m.mul_i64(2, prec).add(&Bf::from_i64(1), prec);
        let n = self.n as i64;
        certify_zero_gap(diff, &err, &two_m, n * (n - 1), prec)
    }

    /// Search for a proper index-2 subfield Q ⊊ F ⊊ K ([K:F] = 2).
    ///
    /// A degree-2 extension K/F is generated by a square root, so it always
    /// carries an order-2 automorphism of K fixing exactly F; candidate
    /// automorphisms come from root pairings (certified exactly through
    /// f | f∘g), and the witness subfield is the exact kernel of τ − id.
    pub fn detect_index2_subfield(&self, emb: &EmbeddingSet) -> Result<Index2Report> {
        let n = self.n;
        if n % 2 != 0 || n < 4 {
            // odd degree cannot contain one; n = 2 only has F = Q, which is
            // not a proper intermediate field (documented convention)
            return Ok(Index2Report { found: false, witness_minpoly: None, automorphism: None });
        }
        for j in 1..n {
            let Some(g) = self.automorphism_poly(emb, j) else {
                continue;
            };
            // order 2: g(g(x)) ≡ x mod f
            let fq = self.poly.to_qpoly();
            let gg = compose_qpoly_mod(&g, &g, &fq);
            let x_poly = QPoly::from_int_slice(&[0, 1]);
            if gg != x_poly {
                continue;
            }
            let a = self.automorphism_matrix(&g);
            let m: Vec<Vec<BigRational>> = (0..n)
                .map(|c| {
                    (0..n)
                        .map(|r| {
                            let delta = if r == c { q_one() } else { q_zero() };
                            &a[r][c] - delta
                        })
                        .collect()
                })
                .collect();
            let ker = kernel_basis(&m);
            if ker.len() == n / 2 {
                // witness: an element of the kernel with minimal polynomial
                // of degree n/2
                let mut witness = None;
                'search: for v in &ker {
                    let cand = FieldElement { coords: v.clone() };
                    let mp = self.minpoly(&cand);
                    if mp.degree() == n / 2 {
                        witness = Some(mp);
                        break 'search;
                    }
                }
                if witness.is_none() {
                    // small combinations of kernel vectors
                    'outer: for a1 in -2i64..=2 {
                        for a2 in -2i64..=2 {
                            if ker.len() < 2 {
                                break 'outer;
                            }
                            let mut coords = vec![q_zero(); n];
                            for (k, c) in coords.iter_mut().enumerate() {
                                *c = BigRational::from_integer(BigInt::from(a1)) * &ker[0][k]
                                    + BigRational::from_integer(BigInt::from(a2)) * &ker[1][k];
                            }
                            let cand = FieldElement { coords };
                            let mp = self.minpoly(&cand);
                            if mp.degree() == n / 2 {
                                witness = Some(mp);
                                break 'outer;
                            }
                        }
                    }
                }
                return Ok(Index2Report {
                    found: true,
                    witness_minpoly: witness,
                    automorphism: Some(g),
                });
            }
        }
        Ok(Index2Report { found: false, witness_minpoly: None, automorphism: None })
    }
}

/// Outcome of the index-2 subfield search.
#[derive(Clone, Debug)]
pub struct Index2Report {
    pub found: bool,
    pub witness_minpoly: Option<QPoly>,
    pub automorphism: Option<QPoly>,
}

/// A nonzero algebraic integer with `degree` conjugates each bounded by
/// `conj_bound` has absolute value at least conj_bound^(1−degree); decide
/// vanishing of `v` (computed with absolute error ≤ `err`) against that gap.
fn certify_zero_gap(v: &Cf, err: &Bf, conj_bound: &Bf, degree: i64, prec: u32) -> Result<bool> {
    let mut denom = Bf::from_i64(1);
    for _ in 0..(degree - 1).max(1) {
        denom = denom.mul(conj_bound, prec);
    }
    let threshold = Bf::from_i64(1).div(&denom, prec);
    let val = v.abs(prec);
    if val.add(err, prec).lt(&threshold) {
        return Ok(true);
    }
    if threshold.lt(&val.sub(err, prec)) {
        return Ok(false);
    }
    Err(CoreError::Inconclusive {
        detail: "value straddles the integrality gap threshold".into(),
    })
}

/// Exact rank of a rational matrix by row echelon reduction.
fn rank_of(mat: &[Vec<BigRational>]) -> usize {
    if mat.is_empty() {
        return 0;
    }
    let rows = mat.len();
    let cols = mat[0].len();
    let mut m = mat.to_vec();
    let mut rank = 0usize;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        if let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) {
            m.swap(p, rank);
            let inv = q_one() / m[rank][c].clone();
            for cc in 0..cols {
                m[rank][cc] = &m[rank][cc] * &inv;
            }
            for r in 0..rows {
                if r != rank && !m[r][c].is_zero() {
                    let factor = m[r][c].clone();
                    for cc in 0..cols {
                        let t = m[rank][cc].clone();
                        m[r][cc] = &m[r][cc] - &factor * t;
                    }
                }
            }
            rank += 1;
        }
    }
    rank
}

/// Wrapper to reuse compose_mod for rational coefficient rows.
struct IPolyLike<'a>(&'a [BigRational]);

impl IPolyLike<'_> {
    fn compose_mod(&self, g: &QPoly, modulus: &QPoly) -> QPoly {
        let mut acc = QPoly::zero();
        for c in self.0.iter().rev() {
            acc = acc.mul(g);
            acc = acc.add(&QPoly::new(vec![c.clone()]));
            let (_, r) = acc.div_rem(modulus);
            acc = r;
        }
        acc
    }
}

fn compose_qpoly_mod(f: &QPoly, g: &QPoly, modulus: &QPoly) -> QPoly {
    let mut acc = QPoly::zero();
    for c in f.0.iter().rev() {
        acc = acc.mul(g);
        acc = acc.add(&QPoly::new(vec![c.clone()]));
        let (_, r) = acc.div_rem(modulus);
        acc = r;
    }
    acc
}

// ---------------------------------------------------------------------------
// field description files
// ---------------------------------------------------------------------------

impl NumberField {
    /// Parse the plain-text field description:
    ///
    /// ```text
    /// degree = 5
    /// poly = -2 0 0 0 0 1      # constant first
    /// basis = 1 0; 0 1         # optional rows, rationals like 1/2
    /// ```
    pub fn from_description(text: &str) -> Result<NumberField> {
        let mut degree: Option<usize> = None;
        let mut poly: Option<Vec<BigInt>> = None;
        let mut basis: Option<Vec<Vec<BigRational>>> = None;
        for line in text.lines() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CoreError::Config(format!("malformed field description line: {line}"))
            })?;
            match key.trim() {
                "degree" => {
                    degree = Some(value.trim().parse().map_err(|_| {
                        CoreError::Config(format!("bad degree: {value}"))
                    })?)
                }
                "poly" => {
                    let coeffs: std::result::Result<Vec<BigInt>, _> = value
                        .split_whitespace()
                        .map(|t| t.parse::<BigInt>())
                        .collect();
                    poly = Some(coeffs.map_err(|_| {
                        CoreError::Config(format!("bad poly coefficients: {value}"))
                    })?);
                }
                "basis" => {
                    let rows: std::result::Result<Vec<Vec<BigRational>>, CoreError> = value
                        .split(';')
                        .map(|row| {
                            row.split_whitespace()
                                .map(parse_rational)
                                .collect::<std::result::Result<Vec<_>, _>>()
                        })
                        .collect();
                    basis = Some(rows?);
                }
                other => {
                    return Err(CoreError::Config(format!(
                        "unknown field description key: {other}"
                    )))
                }
            }
        }
        let poly = poly.ok_or_else(|| CoreError::Config("missing poly".into()))?;
        let f = IPoly::new(poly);
        if let Some(d) = degree {
            if f.degree() != d {
                return Err(CoreError::Config(format!(
                    "degree key {d} does not match poly degree {}",
                    f.degree()
                )));
            }
        }
        build_field(&f, basis)
    }
}

fn parse_rational(tok: &str) -> Result<BigRational> {
    if let Some((num, den)) = tok.split_once('/') {
        let n: BigInt = num
            .parse()
            .map_err(|_| CoreError::Config(format!("bad rational {tok}")))?;
        let d: BigInt = den
            .parse()
            .map_err(|_| CoreError::Config(format!("bad rational {tok}")))?;
        Ok(BigRational::new(n, d))
    } else {
        let n: BigInt = tok
            .parse()
            .map_err(|_| CoreError::Config(format!("bad integer {tok}")))?;
        Ok(BigRational::from_integer(n))
    }
}
