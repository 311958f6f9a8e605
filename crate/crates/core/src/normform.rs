//! Binary norm forms F_z(X₁,X₂) = N_K(X₁ + X₂α₂ + z₃α₃ + ⋯ + z_nα_n),
//! exactly over the integers and modulo primes: construction by tensor
//! interpolation of exact norms, perfect-square tests, reduction mod p,
//! splitting into linear factors X + aY + b over F_{p^m}, and the
//! admissibility diagnostics for shift vectors (primitivity and the
//! cross-ratio collision certificate).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::bigfloat::Bf;
use crate::error::{CoreError, Result};
use crate::field::{EmbeddingSet, FieldElement, NumberField, ReducedBasis};
use crate::gf::{self, GfCtx, GfEl};
use crate::poly::{lagrange_interpolate, IPoly2, QPoly};
use crate::rng::Rng;

/// Shift vector z = (z₃,…,z_n) defining z = Σ z_j α_j.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftVector {
    pub z: Vec<i64>,
}

impl ShiftVector {
    pub fn new(z: Vec<i64>) -> Self {
        ShiftVector { z }
    }

    pub fn zero(n: usize) -> Self {
        ShiftVector { z: vec![0; n.saturating_sub(2)] }
    }

    pub fn is_zero(&self) -> bool {
        self.z.iter().all(|&c| c == 0)
    }

    /// The induced field element Σ_{j≥3} z_j·α_{j,K}.
    pub fn element(&self, k: &NumberField, rb: &ReducedBasis) -> FieldElement {
        assert_eq!(self.z.len(), k.n.saturating_sub(2), "shift length must be n-2");
        let mut acc = k.zero();
        for (idx, &c) in self.z.iter().enumerate() {
            let alpha = &rb.elements[idx + 2];
            let term = k.scale(alpha, &BigRational::from_integer(BigInt::from(c)));
            acc = k.add(&acc, &term);
        }
        acc
    }

    /// |z_j| ≤ D^(1/n − δ_j) membership against a reduced-basis ledger.
    pub fn in_box(&self, k: &NumberField, rb: &ReducedBasis) -> bool {
        let ln_d = crate::field::bigint_ln(&k.d_k);
        self.z.iter().enumerate().all(|(idx, &c)| {
            let delta_j = rb.deltas[idx + 2];
            let bound = ((1.0 / k.n as f64 - delta_j) * ln_d).exp();
            (c as f64).abs() <= bound + 1e-9
        })
    }
}

/// Exact integer binary form of total degree n, monic in X₁.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormForm {
    pub coeff: IPoly2,
    pub n: usize,
    pub field_id: String,
    pub shift: ShiftVector,
}

impl NormForm {
    pub fn eval(&self, x1: &BigInt, x2: &BigInt) -> BigInt {
        self.coeff.eval(x1, x2)
    }

    pub fn eval_i128(&self, x1: i128, x2: i128) -> Option<i128> {
        self.coeff.eval_i128(x1, x2)
    }
}

/// Build F_z exactly by tensor Lagrange interpolation of norms on the grid
/// {0,…,n}²; the result is verified monic in X₁ and spot-checked against
/// direct norm evaluation off the grid.
pub fn build_form(k: &NumberField, rb: &ReducedBasis, shift: &ShiftVector) -> NormForm {
    let n = k.n;
    let alpha2 = &rb.elements[1];
    let z_elt = shift.element(k, rb);
    let value = |x1: i64, x2: i64| -> BigRational {
        let mut e = k.scale(&k.one(), &BigRational::from_integer(BigInt::from(x1)));
        let t = k.scale(alpha2, &BigRational::from_integer(BigInt::from(x2)));
        e = k.add(&e, &t);
        e = k.add(&e, &z_elt);
        k.norm(&e)
    };
    // per-column interpolation in x1, then per-coefficient in x2
    let nodes: Vec<BigRational> = (0..=n as i64)
        .map(|v| BigRational::from_integer(BigInt::from(v)))
        .collect();
    let col_polys: Vec<QPoly> = (0..=n as i64)
        .map(|x2| {
            let vals: Vec<BigRational> = (0..=n as i64).map(|x1| value(x1, x2)).collect();
            lagrange_interpolate(&nodes, &vals)
        })
        .collect();
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let vals: Vec<BigRational> = col_polys
            .iter()
            .map(|p| p.0.get(i).cloned().unwrap_or_else(BigRational::zero))
            .collect();
        let ci = lagrange_interpolate(&nodes, &vals);
        let mut row: Vec<BigInt> = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let c = ci.0.get(j).cloned().unwrap_or_else(BigRational::zero);
            assert!(c.denom().is_one(), "norm form coefficients must be integers");
            row.push(c.numer().clone());
        }
        rows.push(row);
    }
    let coeff = IPoly2::new(rows);
    debug_assert!(coeff.get(n, 0).is_one(), "norm form must be monic in X₁");
    // off-grid spot check
    debug_assert_eq!(
        BigRational::from_integer(coeff.eval(&BigInt::from(-3), &BigInt::from(2))),
        value(-3, 2)
    );
    NormForm {
        coeff,
        n,
        field_id: k.field_id.clone(),
        shift: shift.clone(),
    }
}

/// Perfect-square test over ℤ[X₁,X₂] by the monic square-root attempt.
pub fn is_square_poly(form: &NormForm) -> bool {
    form.coeff.monic_sqrt().is_some()
}

// ---------------------------------------------------------------------------
// reduction mod p
// ---------------------------------------------------------------------------

/// The form reduced modulo an odd prime: rows are X₁-degrees, entries are
/// polynomials in X₂ over F_p.
#[derive(Clone, Debug)]
pub struct FormModP {
    pub p: u64,
    /// coeff[i][j] for X₁^i·X₂^j
    pub coeff: Vec<Vec<u64>>,
    pub n: usize,
    /// p divides the content of disc_{X₁}(F) (exceptional-fiber diagnostic)
    pub divides_disc_content: bool,
}

impl FormModP {
    pub fn eval(&self, x1: u64, x2: u64) -> u64 {
        let p = self.p;
        let mut acc = 0u64;
        for row in self.coeff.iter().rev() {
            let mut rv = 0u64;
            for &c in row.iter().rev() {
                rv = (crate::modarith::mul_mod(rv, x2 % p, p) + c) % p;
            }
            acc = (crate::modarith::mul_mod(acc, x1 % p, p) + rv) % p;
        }
        acc
    }

    /// F(X, y) as a univariate polynomial over F_p.
    pub fn row_poly(&self, y: u64) -> Vec<u64> {
        let p = self.p;
        self.coeff
            .iter()
            .map(|row| {
                let mut rv = 0u64;
                for &c in row.iter().rev() {
                    rv = (crate::modarith::mul_mod(rv, y % p, p) + c) % p;
                }
                rv
            })
            .collect()
    }
}

/// Coefficientwise reduction; the X₁ⁿ coefficient is 1, so the total degree
/// can never drop (asserted; `DegenerateReduction` guards the contract).
pub fn reduce_mod_p(form: &NormForm, p: u64) -> Result<FormModP> {
    assert!(p > 2 && p % 2 == 1, "odd primes only");
    let n = form.n;
    let pm = BigInt::from(p);
    let coeff: Vec<Vec<u64>> = form
        .coeff
        .coeff
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| {
                    let r = c % &pm;
                    let r = if r.is_negative() { r + &pm } else { r };
                    r.to_string().parse::<u64>().unwrap()
                })
                .collect()
        })
        .collect();
    if coeff[n][0] != 1 {
        return Err(CoreError::DegenerateReduction { p, expected: n });
    }
    let disc = form.coeff.disc_x_poly();
    let divides = disc.0.iter().all(|c| {
        if c.is_zero() {
            return true;
        }
        debug_assert!(c.denom().is_one());
        (c.numer() % &pm).is_zero()
    });
    Ok(FormModP { p, coeff, n, divides_disc_content: divides })
}

/// Square test in F_p[X₁,X₂]: monic square-root attempt in X₁ with
/// coefficients in F_p[X₂].
pub fn is_square_mod_p(fm: &FormModP) -> bool {
    let n = fm.n;
    let p = fm.p;
    if n % 2 != 0 {
        return false;
    }
    let h = n / 2;
    // rows as Y-polynomials
    let a: Vec<Vec<u64>> = (0..=n)
        .map(|i| gf::fp_norm(p, fm.coeff.get(i).cloned().unwrap_or_else(|| vec![0])))
        .collect();
    let inv2 = crate::modarith::inv_mod(2, p);
    let mut c: Vec<Vec<u64>> = vec![vec![0]; h + 1];
    c[h] = vec![1];
    for kk in 1..=h {
        // X^(n-k): 2·C_{h-k} + Σ_{i+j = n-k, h-k < i,j < h} C_i·C_j
        let mut acc = vec![0u64];
        for i in (h - kk + 1)..h {
            let j = n - kk - i;
            if j > h - kk && j < h {
                let prod = gf::fp_mul(p, &c[i], &c[j]);
                acc.resize(acc.len().max(prod.len()), 0);
                for (t, &v) in prod.iter().enumerate() {
                    acc[t] = (acc[t] + v) % p;
                }
            }
        }
        let mut diff = a[n - kk].clone();
        diff.resize(diff.len().max(acc.len()), 0);
        for (t, &v) in acc.iter().enumerate() {
            diff[t] = (diff[t] + p - v) % p;
        }
        c[h - kk] = gf::fp_norm(
            p,
            diff.iter().map(|&v| crate::modarith::mul_mod(v, inv2, p)).collect(),
        );
    }
    // verify (Σ C_i X^i)² = F mod p
    let mut sq: Vec<Vec<u64>> = vec![vec![0]; n + 1];
    for i in 0..=h {
        for j in 0..=h {
            let prod = gf::fp_mul(p, &c[i], &c[j]);
            let cell = &mut sq[i + j];
            cell.resize(cell.len().max(prod.len()), 0);
            for (t, &v) in prod.iter().enumerate() {
                cell[t] = (cell[t] + v) % p;
            }
        }
    }
    (0..=n).all(|i| gf::fp_norm(p, sq[i].clone()) == a[i])
}

// ---------------------------------------------------------------------------
// splitting into linear factors
// ---------------------------------------------------------------------------

/// Complete splitting F ≡ ∏ (X + a_i·Y + b_i) over F_{p^m}, with the
/// hypothesis record for the stratification machinery.
#[derive(Clone, Debug)]
pub struct LinearFactorization {
    pub p: u64,
    pub m: usize,
    /// modulus of the explicit extension F_p[t]/(g)
    pub modulus: Vec<u64>,
    pub pairs: Vec<(GfEl, GfEl)>,
    pub squarefree: bool,
    pub hyp: StrataHypotheses,
}

/// Hypotheses on the factor data, indexed against the first (sorted) pair:
/// (i) some a_i ≠ a_1; (ii) the cross-ratio inequality
/// (a_i−a_1)/(a_j−a_1)·(b_j−b_1) ≠ b_i−b_1 for i ≠ j with a_i, a_j ≠ a_1;
/// (iii) all b_i pairwise distinct; plus the nonvanishing a_i ≠ 0 used by
/// the closed-form exceptional set.
#[derive(Clone, Debug, Default, Serialize)]
pub struct StrataHypotheses {
    pub some_a_differs: bool,
    pub cross_ratio_ok: bool,
    pub b_distinct: bool,
    pub a_nonzero: bool,
    pub violations: Vec<String>,
}

impl StrataHypotheses {
    pub fn all_hold(&self) -> bool {
        self.some_a_differs && self.cross_ratio_ok && self.b_distinct
    }
}

/// Find the least m with a full splitting over F_{p^m} (capped), extract
/// the n linear factors by matching roots of F(X,0) and F(X,1), and verify
/// by exact division. Repeated factors are `NotSquareFree`.
pub fn split_factors(fm: &FormModP, cap_m: usize, rng: &mut Rng) -> Result<LinearFactorization> {
    let p = fm.p;
    let n = fm.n;
    let f0 = fm.row_poly(0);
    let f1 = fm.row_poly(1);
    let m0 = gf::fp_splitting_degree(p, &f0);
    let m1 = gf::fp_splitting_degree(p, &f1);
    let m = num_integer::lcm(m0, m1);
    if m > cap_m {
        return Err(CoreError::TooLarge {
            detail: format!("splitting degree {m} exceeds cap {cap_m}"),
        });
    }
    let ctx = GfCtx::new(p, m);
    let roots0 = ctx.poly_roots(&ctx.lift_poly(&f0), rng);
    let roots1 = ctx.poly_roots(&ctx.lift_poly(&f1), rng);

    // working copy of F as rows of Y-polynomials over the extension
    let mut rows: Vec<Vec<GfEl>> = (0..=n)
        .map(|i| {
            ctx.poly_norm(
                fm.coeff
                    .get(i)
                    .cloned()
                    .unwrap_or_else(|| vec![0])
                    .iter()
                    .map(|&c| ctx.from_u64(c))
                    .collect(),
            )
        })
        .collect();

    let mut pairs: Vec<(GfEl, GfEl)> = Vec::new();
    let mut repeated: Option<(GfEl, GfEl)> = None;
    let mut candidates: Vec<(GfEl, GfEl)> = Vec::new();
    for r0 in &roots0 {
        for r1 in &roots1 {
            let b = ctx.neg(r0);
            let a = ctx.sub(r0, r1);
            candidates.push((a, b));
        }
    }
    candidates.sort_by_key(|(a, b)| (ctx.index(a), ctx.index(b)));
    candidates.dedup();
    for (a, b) in candidates {
        let mut mult = 0usize;
        loop {
            match divide_linear(&ctx, &rows, &a, &b) {
                Some(q) => {
                    rows = q;
                    mult += 1;
                }
                None => break,
            }
        }
        if mult >= 2 {
            repeated = Some((a.clone(), b.clone()));
        }
        for _ in 0..mult {
            pairs.push((a.clone(), b.clone()));
        }
    }
    if pairs.len() != n {
        return Err(CoreError::HypothesisFailure {
            detail: format!("expected {n} linear factors, found {}", pairs.len()),
        });
    }
    if let Some((a, b)) = repeated {
        return Err(CoreError::NotSquareFree {
            p,
            factor: format!("X + {:?}Y + {:?}", a, b),
        });
    }
    pairs.sort_by_key(|(a, b)| (ctx.index(a), ctx.index(b)));

    // hypotheses against the first pair as reference
    let (a1, b1) = pairs[0].clone();
    let some_a_differs = pairs.iter().any(|(a, _)| *a != a1);
    let mut b_distinct = true;
    for i in 0..pairs.len() {
        for j in 0..i {
            if pairs[i].1 == pairs[j].1 {
                b_distinct = false;
            }
        }
    }
    let a_nonzero = pairs.iter().all(|(a, _)| !ctx.is_zero(a));
    let mut violations = Vec::new();
    let mut cross_ratio_ok = true;
    for (i, (ai, bi)) in pairs.iter().enumerate() {
        if *ai == a1 {
            continue;
        }
        for (j, (aj, bj)) in pairs.iter().enumerate() {
            if i == j || *aj == a1 {
                continue;
            }
            // (a_i - a_1)(b_j - b_1) == (a_j - a_1)(b_i - b_1) is the collision
            let lhs = ctx.mul(&ctx.sub(ai, &a1), &ctx.sub(bj, &b1));
            let rhs = ctx.mul(&ctx.sub(aj, &a1), &ctx.sub(bi, &b1));
            if lhs == rhs {
                cross_ratio_ok = false;
                violations.push(format!("cross-ratio collision at factors ({i},{j})"));
            }
        }
    }
    if !some_a_differs {
        violations.push("all a_i equal".into());
    }
    if !b_distinct {
        violations.push("repeated b_i".into());
    }
    Ok(LinearFactorization {
        p,
        m,
        modulus: ctx.modulus.clone(),
        pairs,
        squarefree: true,
        hyp: StrataHypotheses {
            some_a_differs,
            cross_ratio_ok,
            b_distinct,
            a_nonzero,
            violations,
        },
    })
}

/// Divide rows (Y-polynomial rows in X) by the monic linear X + aY + b;
/// Some(quotient) when the remainder vanishes.
fn divide_linear(
    ctx: &GfCtx,
    rows: &[Vec<GfEl>],
    a: &GfEl,
    b: &GfEl,
) -> Option<Vec<Vec<GfEl>>> {
    let deg = rows.len() - 1;
    if deg == 0 {
        return None;
    }
    // c(Y) = -(aY + b); synthetic division by (X - c(Y))
    let c_poly = vec![ctx.neg(b), ctx.neg(a)];
    let mut quo: Vec<Vec<GfEl>> = vec![vec![ctx.zero()]; deg];
    let mut carry: Vec<GfEl> = rows[deg].clone();
    for i in (0..deg).rev() {
        quo[i] = carry.clone();
        let prod = ctx.poly_mul(&carry, &c_poly);
        let mut next = rows[i].clone();
        let ln = next.len().max(prod.len());
        next.resize(ln, ctx.zero());
        for (t, v) in prod.iter().enumerate() {
            next[t] = ctx.add(&next[t], v);
        }
        carry = ctx.poly_norm(next);
    }
    if ctx.poly_is_zero(&carry) {
        Some(quo)
    } else {
        None
    }
}

impl LinearFactorization {
    pub fn ctx(&self) -> GfCtx {
        GfCtx { p: self.p, m: self.m, modulus: self.modulus.clone() }
    }

    /// Reconstruct ∏(X + a_iY + b_i) and compare with the reduced form.
    pub fn product_matches(&self, fm: &FormModP) -> bool {
        let ctx = self.ctx();
        // product as rows of Y-polynomials in X
        let mut rows: Vec<Vec<GfEl>> = vec![vec![ctx.one()]];
        for (a, b) in &self.pairs {
            let lin0 = vec![b.clone(), a.clone()]; // b + aY
            let mut next: Vec<Vec<GfEl>> = vec![vec![ctx.zero()]; rows.len() + 1];
            for (i, row) in rows.iter().enumerate() {
                // X * row
                let cell = &mut next[i + 1];
                let ln = cell.len().max(row.len());
                cell.resize(ln, ctx.zero());
                for (t, v) in row.iter().enumerate() {
                    cell[t] = ctx.add(&cell[t], v);
                }
                // (aY + b) * row
                let prod = ctx.poly_mul(row, &lin0);
                let cell = &mut next[i];
                let ln = cell.len().max(prod.len());
                cell.resize(ln, ctx.zero());
                for (t, v) in prod.iter().enumerate() {
                    cell[t] = ctx.add(&cell[t], v);
                }
            }
            rows = next.into_iter().map(|r| ctx.poly_norm(r)).collect();
        }
        if rows.len() != fm.n + 1 {
            return false;
        }
        for (i, row) in rows.iter().enumerate() {
            let want = ctx.poly_norm(
                fm.coeff
                    .get(i)
                    .cloned()
                    .unwrap_or_else(|| vec![0])
                    .iter()
                    .map(|&c| ctx.from_u64(c))
                    .collect(),
            );
            if *row != ctx.poly_norm(row.to_vec()).clone() && row.len() != want.len() {
                return false;
            }
            if ctx.poly_norm(row.clone()) != want {
                return false;
            }
        }
        true
    }

    /// JSON record: {p, m, pairs: [[a, b]]} with extension elements as
    /// coefficient lists over F_p.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "p": self.p,
            "m": self.m,
            "modulus": self.modulus,
            "pairs": self.pairs.iter().map(|(a, b)| {
                serde_json::json!([a, b])
            }).collect::<Vec<_>>(),
        })
    }
}

// ---------------------------------------------------------------------------
// shift-vector diagnostics over the rationals
// ---------------------------------------------------------------------------

/// Admissibility record for a shift vector, combining the exact
/// subfield-membership test (minimal polynomial degree) with the certified
/// cross-ratio collision certificate.
#[derive(Clone, Debug, Serialize)]
pub struct ShiftDiagnostics {
    pub z_in_proper_subfield: bool,
    pub minpoly_degree: usize,
    /// certified integer ∏ over (σ,τ) of the cleared cross-ratio defects;
    /// zero iff some pair collides
    pub cross_ratio_defect: String,
    pub collisions: Vec<(usize, usize)>,
    pub admissible: bool,
}

/// Exact + certified diagnostics for the hypotheses the stratification
/// needs over the rationals: (a) z generates K (no proper subfield),
/// (b) no cross-ratio collision σ(z)−z = λ_{σ,τ}(τ(z)−z).
pub fn shift_diagnostics(
    k: &NumberField,
    emb: &EmbeddingSet,
    rb: &ReducedBasis,
    shift: &ShiftVector,
) -> Result<ShiftDiagnostics> {
    let z = shift.element(k, rb);
    let mp_deg = if z.is_zero() { 1 } else { k.minpoly(&z).degree() };
    let in_subfield = mp_deg < k.n;
    let alpha2 = &rb.elements[1];
    let (defect, collisions) = cross_ratio_defect_integer(k, emb, alpha2, &z)?;
    let admissible = !in_subfield && collisions.is_empty();
    Ok(ShiftDiagnostics {
        z_in_proper_subfield: in_subfield,
        minpoly_degree: mp_deg,
        cross_ratio_defect: defect.to_string(),
        collisions,
        admissible,
    })
}

/// The certified integer
/// Δ = ∏_{(ρ,σ,τ)} [(τ(g)−ρ(g))(σ(z)−ρ(z)) − (σ(g)−ρ(g))(τ(z)−ρ(z))]
/// over triples of distinct embeddings with σ(g) ≠ ρ(g) and τ(g) ≠ ρ(g).
/// Ranging the base ρ over all embeddings makes the product Galois-stable,
/// hence rational, and it is an algebraic integer, so rounding the
/// high-precision value certifies it exactly. Δ = 0 iff some base-ι pair
/// collides (Galois transitivity moves any vanishing triple to base ι);
/// colliding pairs are then identified per-pair by the gap certificate.
pub fn cross_ratio_defect_integer(
    k: &NumberField,
    emb: &EmbeddingSet,
    g: &FieldElement,
    z: &FieldElement,
) -> Result<(BigInt, Vec<(usize, usize)>)> {
    let n = k.n;
    // ≤ n³ factors, each bounded by 8·M_g·M_z
    let mg: f64 = (0..n).map(|j| emb.embed_f64(g, j).norm()).fold(1.0, f64::max);
    let mz: f64 = (0..n).map(|j| emb.embed_f64(z, j).norm()).fold(1.0, f64::max);
    let bits_per = (8.0 * mg * mz).log2().max(1.0).ceil() as u32 + 2;
    let need = (n * n * n) as u32 * bits_per + 256;
    let hi;
    let emb = if emb.prec_bits >= need {
        emb
    } else {
        hi = k.embeddings(need)?;
        &hi
    };
    let prec = emb.prec_bits;

    let g_emb: Vec<crate::bigfloat::Cf> = (0..n).map(|j| emb.embed(g, j).0).collect();
    let z_emb: Vec<crate::bigfloat::Cf> = (0..n).map(|j| emb.embed(z, j).0).collect();
    // moving[r][j]: σ_j(g) ≠ σ_r(g), certified through the gap bound
    let mut moving = vec![vec![false; n]; n];
    for r in 0..n {
        for j in 0..n {
            if r == j {
                continue;
            }
            let d = g_emb[j].sub(&g_emb[r], prec);
            moving[r][j] = !k_cert_zero(k, emb, &d, g)?;
        }
    }
    let mut acc = crate::bigfloat::Cf::new(Bf::from_i64(1), Bf::zero());
    let mut zero_pairs = Vec::new();
    for r in 0..n {
        for s in 0..n {
            for t in 0..n {
                if s == r || t == r || s == t || !moving[r][s] || !moving[r][t] {
                    continue;
                }
                let factor = g_emb[t]
                    .sub(&g_emb[r], prec)
                    .mul(&z_emb[s].sub(&z_emb[r], prec), prec)
                    .sub(
                        &g_emb[s]
                            .sub(&g_emb[r], prec)
                            .mul(&z_emb[t].sub(&z_emb[r], prec), prec),
                        prec,
                    );
                if r == 0 && factor.abs(prec).lt(&Bf::pow2(-(prec as i64) / 4)) {
                    zero_pairs.push((s, t));
                }
                acc = acc.mul(&factor, prec);
            }
        }
    }
    let prod = acc.re.clone();
    let prod_im = acc.im.clone();
    // the product is rational; its imaginary part must round to zero
    let (im_int, im_defect) = prod_im.round_int();
    if !im_int.is_zero() || Bf::pow2(-2).lt(&im_defect) {
        return Err(CoreError::Inconclusive {
            detail: "cross-ratio defect product has non-vanishing imaginary part".into(),
        });
    }
    let (int, defect) = prod.round_int();
    if Bf::pow2(-2).lt(&defect) {
        return Err(CoreError::Inconclusive {
            detail: "cross-ratio defect product does not round to an integer".into(),
        });
    }
    if int.is_zero() {
        // verify the suspected pairs with the per-pair gap certificate
        let mut certified = Vec::new();
        for (s, t) in zero_pairs {
            if k.certify_in_twisted_kernel_public(emb, g, s, t, z)? {
                certified.push((s, t));
            }
        }
        if certified.is_empty() {
            return Err(CoreError::Inconclusive {
                detail: "defect product rounds to zero but no pair certifies".into(),
            });
        }
        return Ok((BigInt::zero(), certified));
    }
    Ok((int, Vec::new()))
}

fn k_cert_zero(
    k: &NumberField,
    emb: &EmbeddingSet,
    d: &crate::bigfloat::Cf,
    w: &FieldElement,
) -> Result<bool> {
    k.certify_zero_element_difference_public(emb, d, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{build_field, ReduceParams};
    use crate::poly::IPoly;

    fn sqrt2_setup() -> (NumberField, ReducedBasis) {
        let k = build_field(&IPoly::from_i64(&[-2, 0, 1]), None).unwrap();
        let rb = k.reduce_basis(&ReduceParams::default()).unwrap();
        (k, rb)
    }

    fn quintic_setup(q: i64) -> (NumberField, ReducedBasis) {
        let k = build_field(&IPoly::from_i64(&[-q, 0, 0, 0, 0, 1]), None).unwrap();
        let rb = k.reduce_basis(&ReduceParams::default()).unwrap();
        (k, rb)
    }

    #[test]
    fn sqrt2_form_is_x2_minus_2y2() {
        let (k, rb) = sqrt2_setup();
        let form = build_form(&k, &rb, &ShiftVector::zero(2));
        // N(X₁ + X₂√2) = X₁² − 2X₂² by hand
        assert_eq!(form.coeff.get(2, 0), BigInt::one());
        assert_eq!(form.coeff.get(0, 2), BigInt::from(-2));
        assert_eq!(form.coeff.get(1, 1), BigInt::zero());
        assert_eq!(form.coeff.get(0, 0), BigInt::zero());
        assert_eq!(form.eval(&BigInt::from(1), &BigInt::from(0)), BigInt::one());
        assert!(!is_square_poly(&form));
    }

    #[test]
    fn zero_shift_forms_are_homogeneous() {
        let (k, rb) = quintic_setup(2);
        let form = build_form(&k, &rb, &ShiftVector::zero(5));
        assert!(form.coeff.is_homogeneous(5));
        assert_eq!(form.eval(&BigInt::from(1), &BigInt::from(0)), BigInt::one());
        // F(λx₁, λx₂) = λⁿ F(x₁, x₂)
        let v = form.eval(&BigInt::from(2), &BigInt::from(-1));
        let w = form.eval(&BigInt::from(4), &BigInt::from(-2));
        assert_eq!(w, v * BigInt::from(32));
    }

    #[test]
    fn evaluation_matches_norm_on_random_points() {
        let (k, rb) = quintic_setup(3);
        let shift = ShiftVector::new(vec![1, 0, -1]);
        let form = build_form(&k, &rb, &shift);
        let z_elt = shift.element(&k, &rb);
        let mut rng = Rng::new(23);
        for _ in 0..100 {
            let x1 = rng.range_i64(-7, 7);
            let x2 = rng.range_i64(-7, 7);
            let mut e = k.scale(&k.one(), &BigRational::from_integer(BigInt::from(x1)));
            e = k.add(&e, &k.scale(&rb.elements[1], &BigRational::from_integer(BigInt::from(x2))));
            e = k.add(&e, &z_elt);
            let direct = k.norm(&e);
            let via_form = BigRational::from_integer(form.eval(&BigInt::from(x1), &BigInt::from(x2)));
            assert_eq!(direct, via_form);
        }
    }

    #[test]
    fn square_polynomial_detection() {
        // (X₁² + X₂²)² is a square; X₁² − 2X₂² is not
        let inner = IPoly2::new(vec![
            vec![BigInt::zero(), BigInt::zero(), BigInt::one()],
            vec![BigInt::zero()],
            vec![BigInt::one()],
        ]);
        let sq = NormForm {
            coeff: inner.mul(&inner),
            n: 4,
            field_id: "synthetic".into(),
            shift: ShiftVector::new(vec![]),
        };
        assert!(is_square_poly(&sq));
    }

    #[test]
    fn quintic_box_forms_never_square() {
        // degree-5 forms are never perfect squares (odd degree), matching
        // the emptiness of the square stratum for n = 5
        let (k, rb) = quintic_setup(2);
        for z3 in -1..=1 {
            for z4 in -1..=1 {
                let form = build_form(&k, &rb, &ShiftVector::new(vec![z3, z4, 0]));
                assert!(!is_square_poly(&form));
            }
        }
    }

    #[test]
    fn reduction_and_square_tests_mod_p() {
        let (k, rb) = sqrt2_setup();
        let form = build_form(&k, &rb, &ShiftVector::zero(2));
        let f7 = reduce_mod_p(&form, 7).unwrap();
        assert!(!is_square_mod_p(&f7), "X²−2Y² is a product of distinct factors mod 7");
        // (X₁+X₂)² ≡ square mod any p
        let sq = NormForm {
            coeff: IPoly2::new(vec![
                vec![BigInt::zero(), BigInt::zero(), BigInt::one()],
                vec![BigInt::zero(), BigInt::from(2)],
                vec![BigInt::one()],
            ]),
            n: 2,
            field_id: "synthetic".into(),
            shift: ShiftVector::new(vec![]),
        };
        let sq7 = reduce_mod_p(&sq, 7).unwrap();
        assert!(is_square_mod_p(&sq7));
        assert!(sq7.divides_disc_content, "squares have vanishing discriminant");
    }

    #[test]
    fn reduction_evaluation_commute() {
        let (k, rb) = quintic_setup(2);
        let form = build_form(&k, &rb, &ShiftVector::new(vec![1, -1, 0]));
        let p = 11u64;
        let fp = reduce_mod_p(&form, p).unwrap();
        let mut rng = Rng::new(5);
        for _ in 0..50 {
            let x1 = rng.range_i64(-20, 20);
            let x2 = rng.range_i64(-20, 20);
            let exact = form.eval(&BigInt::from(x1), &BigInt::from(x2));
            let want = ((exact % p) + p) % p;
            let got = fp.eval(x1.rem_euclid(p as i64) as u64, x2.rem_euclid(p as i64) as u64);
            assert_eq!(BigInt::from(got), want);
        }
    }

    #[test]
    fn split_factors_mod_7_and_5() {
        let (k, rb) = sqrt2_setup();
        let form = build_form(&k, &rb, &ShiftVector::zero(2));
        let mut rng = Rng::new(1);
        // mod 7: 3² ≡ 2, so X²−2Y² = (X+3Y)(X+4Y): pairs {(3,0),(4,0)}, m=1
        let f7 = reduce_mod_p(&form, 7).unwrap();
        let fac7 = split_factors(&f7, 24, &mut rng).unwrap();
        assert_eq!(fac7.m, 1);
        let pairs: Vec<(u64, u64)> = fac7.pairs.iter().map(|(a, b)| (a[0], b[0])).collect();
        assert_eq!(pairs, vec![(3, 0), (4, 0)]);
        assert!(fac7.product_matches(&f7));
        // mod 5: 2 is a non-residue, m = 2
        let f5 = reduce_mod_p(&form, 5).unwrap();
        let fac5 = split_factors(&f5, 24, &mut rng).unwrap();
        assert_eq!(fac5.m, 2);
        assert!(fac5.product_matches(&f5));
        // homogeneous forms have all b_i = 0: hypothesis (iii) flagged
        assert!(!fac7.hyp.b_distinct);
        assert!(fac7.hyp.some_a_differs);
    }

    #[test]
    fn split_factors_quintic_instance() {
        let (k, rb) = quintic_setup(2);
        let form = build_form(&k, &rb, &ShiftVector::new(vec![1, 0, 1]));
        let mut rng = Rng::new(2);
        let f11 = reduce_mod_p(&form, 11).unwrap();
        let fac = split_factors(&f11, 24, &mut rng).unwrap();
        assert_eq!(fac.pairs.len(), 5);
        assert!(fac.product_matches(&f11));
    }

    #[test]
    fn shift_diagnostics_examples() {
        let (k, rb) = quintic_setup(2);
        let emb = k.embeddings(128).unwrap();
        // z = 0 lies in Q: condition (a) violated
        let d0 = shift_diagnostics(&k, &emb, &rb, &ShiftVector::zero(5)).unwrap();
        assert!(d0.z_in_proper_subfield);
        assert!(!d0.admissible);
        // a nonrational z in a prime-degree field is primitive
        let dz = shift_diagnostics(&k, &emb, &rb, &ShiftVector::new(vec![1, 0, 0])).unwrap();
        assert!(!dz.z_in_proper_subfield);
        assert_eq!(dz.minpoly_degree, 5);
        assert!(dz.admissible, "collisions: {:?}", dz.collisions);
        assert_ne!(dz.cross_ratio_defect, "0");
    }
}
