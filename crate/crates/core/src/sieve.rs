//! The square sieve as a computable estimator, for prime moduli and for
//! the composite-modulus variant with two prime families, together with
//! admissible prime-set construction and the parameter laws.
//!
//! Estimators never assert asymptotics: they compute the exact left side
//! Σ_k ω(k²) by enumeration, every term of the right side, and compare the
//! ratio against a frozen calibration constant.
//!
//! Two printed details of the composite sieve lemma are treated as
//! typographical and implemented in the form consistent with its
//! derivation: the left side is Σ_k ω(k²) (not Σ_{n≠0} ω(n)) and the main
//! character product runs over the full modulus u·u′·v·v′ (not
//! (n/uu′)(n/uu′)).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::calib;
use crate::error::{CoreError, Result};
use crate::expsums::{plane_sum_all, WindowCheck};
use crate::field::{bigint_ln, EmbeddingSet, NumberField, ReducedBasis};
use crate::modarith::{crt_units, jacobi, primes_in};
use crate::normform::{
    cross_ratio_defect_integer, is_square_mod_p, reduce_mod_p, NormForm, ShiftVector,
};
use crate::weights::{WeightSequence, WeightTable};

/// Which admissibility predicate a prime set carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PrimeRole {
    /// the single family of the prime square sieve
    P,
    /// the main family of the composite sieve (adds the shift conditions)
    U,
    /// the auxiliary family of the composite sieve
    V,
}

/// Per-prime admissibility outcome.
#[derive(Clone, Debug, Serialize)]
pub struct PrimeDiag {
    pub p: u64,
    pub admissible: bool,
    pub reasons: Vec<String>,
}

/// An admissible prime family over an interval.
#[derive(Clone, Debug, Serialize)]
pub struct PrimeSet {
    pub role: PrimeRole,
    pub lo: u64,
    pub hi: u64,
    pub primes: Vec<u64>,
    pub diagnostics: Vec<PrimeDiag>,
}

/// The exact integer divisibility data behind the admissibility predicates:
/// a prime divides one of these integers exactly when the corresponding
/// paper condition fails.
#[derive(Clone, Debug)]
pub struct AdmissibilityData {
    /// disc of the minimal polynomial of α₂ (covers p ∤ N(σ(α₂)−α₂))
    pub alpha2_disc: BigInt,
    /// disc of the minimal polynomial of z (covers u ∤ N(σ(z)−z));
    /// zero when z is not primitive, which admits no primes
    pub z_disc: BigInt,
    /// certified cross-ratio defect integer for z (covers the λ-twisted
    /// condition); zero when some pair collides
    pub z_defect: BigInt,
}

pub fn admissibility_data(
    k: &NumberField,
    emb: &EmbeddingSet,
    rb: &ReducedBasis,
    shift: &ShiftVector,
) -> Result<AdmissibilityData> {
    let alpha2 = &rb.elements[1];
    let a2_mp = k.minpoly(alpha2);
    let alpha2_disc = rational_disc_to_int(&a2_mp);
    let z = shift.element(k, rb);
    let (z_disc, z_defect) = if z.is_zero() {
        (BigInt::zero(), BigInt::zero())
    } else {
        let z_mp = k.minpoly(&z);
        let disc = if z_mp.degree() == k.n {
            rational_disc_to_int(&z_mp)
        } else {
            BigInt::zero()
        };
        let (defect, _collisions) = cross_ratio_defect_integer(k, emb, alpha2, &z)?;
        (disc, defect)
    };
    Ok(AdmissibilityData { alpha2_disc, z_disc, z_defect })
}

fn rational_disc_to_int(mp: &crate::poly::QPoly) -> BigInt {
    let d = mp.discriminant();
    // minimal polynomials of integral elements are integer monic
    debug_assert!(d.denom().is_one());
    d.numer().clone()
}

/// Primes of `[lo, hi]` passing the role's predicate for the given form:
/// every role requires p odd and F mod p a non-square with
/// p ∤ disc(minpoly α₂); the U role additionally requires
/// u ∤ disc(minpoly z) and u ∤ Δ_cross(z).
pub fn admissible_primes(
    role: PrimeRole,
    lo: u64,
    hi: u64,
    form: &NormForm,
    data: &AdmissibilityData,
) -> Result<PrimeSet> {
    assert!(lo >= 3, "interval endpoints must be ≥ 3 (odd primes only)");
    let mut primes = Vec::new();
    let mut diagnostics = Vec::new();
    for p in primes_in(lo, hi) {
        if p == 2 {
            continue;
        }
        let mut reasons = Vec::new();
        let pm = BigInt::from(p);
        if (&data.alpha2_disc % &pm).is_zero() {
            reasons.push("p | disc(minpoly α₂)".to_string());
        }
        match reduce_mod_p(form, p) {
            Ok(fm) => {
                if is_square_mod_p(&fm) {
                    reasons.push("F mod p is a square".to_string());
                }
            }
            Err(e) => reasons.push(format!("reduction failed: {e}")),
        }
        if role == PrimeRole::U {
            if data.z_disc.is_zero() || (&data.z_disc % &pm).is_zero() {
                reasons.push("u | disc(minpoly z)".to_string());
            }
            if data.z_defect.is_zero() || (&data.z_defect % &pm).is_zero() {
                reasons.push("u | cross-ratio defect".to_string());
            }
        }
        let admissible = reasons.is_empty();
        if admissible {
            primes.push(p);
        }
        diagnostics.push(PrimeDiag { p, admissible, reasons });
    }
    if primes.is_empty() {
        return Err(CoreError::EmptySet { role: format!("{role:?}"), lo, hi });
    }
    Ok(PrimeSet { role, lo, hi, primes, diagnostics })
}

// ---------------------------------------------------------------------------
// the estimators
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SieveMode {
    Prime,
    Composite,
}

/// Computed sieve inequality: exact LHS, every RHS term, ratio against the
/// frozen constant.
#[derive(Clone, Debug, Serialize)]
pub struct SieveEstimate {
    pub mode: SieveMode,
    pub lhs: f64,
    pub main_term: f64,
    /// prime mode: the pair character term; composite mode: the main sieve M
    pub char_term: f64,
    /// composite mode only: the prime sieve N
    pub second_char_term: Option<f64>,
    pub rhs: f64,
    pub ratio: f64,
    pub constant: f64,
    pub pass: bool,
    pub prime_count: usize,
}

fn table_sum_nonzero(table: &WeightTable) -> f64 {
    table
        .map
        .iter()
        .filter(|(m, _)| **m != 0)
        .map(|(_, w)| w)
        .sum()
}

fn twisted_sum(table: &WeightTable, modulus: u64) -> f64 {
    let mut acc = 0.0;
    for (&m, &w) in &table.map {
        let s = jacobi(m, modulus);
        if s != 0 {
            acc += w * s as f64;
        }
    }
    acc
}

/// Prime square sieve: Σ_k ω(k²) against
/// (1/P)·Σ_{n≠0} ω(n) + (1/P²)·Σ_{p≠q} |Σ_n ω(n)(n/pq)|.
pub fn square_sieve(
    table: &WeightTable,
    pset: &PrimeSet,
    constant: f64,
) -> Result<SieveEstimate> {
    if table.omega(0) != 0.0 {
        return Err(CoreError::Config(
            "square sieve needs ω(0) = 0 (the z ≠ 0 path)".into(),
        ));
    }
    let pc = pset.primes.len();
    if pc < 2 {
        return Err(CoreError::EmptySet {
            role: "P (needs at least two primes)".into(),
            lo: pset.lo,
            hi: pset.hi,
        });
    }
    if (table.max_abs_value as f64) >= (pc as f64).exp() {
        return Err(CoreError::SupportTooLarge {
            support: table.max_abs_value as f64,
            set_size: pc,
        });
    }
    let lhs = table.square_mass();
    let main = table_sum_nonzero(table) / pc as f64;
    let mut char_term = 0.0;
    for (i, &p) in pset.primes.iter().enumerate() {
        for &q in pset.primes.iter().skip(i + 1) {
            // (p,q) and (q,p) contribute equally
            char_term += 2.0 * twisted_sum(table, p * q).abs();
        }
    }
    char_term /= (pc * pc) as f64;
    let rhs = main + char_term;
    let ratio = if rhs > 0.0 { lhs / rhs } else { f64::INFINITY };
    Ok(SieveEstimate {
        mode: SieveMode::Prime,
        lhs,
        main_term: main,
        char_term,
        second_char_term: None,
        rhs,
        ratio,
        constant,
        pass: lhs <= constant * rhs,
        prime_count: pc,
    })
}

/// Composite square sieve with families 𝒰, 𝒱 (A = |𝒰||𝒱|):
/// main sieve M over moduli u·u′·v·v′ (u ≠ u′) and prime sieve N over
/// v·v′ (v ≠ v′) weighted by |𝒰|/A².
pub fn composite_square_sieve(
    table: &WeightTable,
    uset: &PrimeSet,
    vset: &PrimeSet,
    constant: f64,
) -> Result<SieveEstimate> {
    if table.omega(0) != 0.0 {
        return Err(CoreError::Config(
            "square sieve needs ω(0) = 0 (the z ≠ 0 path)".into(),
        ));
    }
    let (nu, nv) = (uset.primes.len(), vset.primes.len());
    let a = (nu * nv) as f64;
    let v3 = (nv as u64).pow(3);
    if (v3 as f64) > a {
        return Err(CoreError::PreconditionV3 { v_cubed: v3, allowed: a });
    }
    let min_size = nu.min(nv);
    if (table.max_abs_value as f64) >= (min_size as f64).exp() {
        return Err(CoreError::SupportTooLarge {
            support: table.max_abs_value as f64,
            set_size: min_size,
        });
    }
    let lhs = table.square_mass();
    let main = table_sum_nonzero(table) / a;
    // main sieve: all (v, v′) pairs, distinct (u, u′)
    let mut m_term = 0.0;
    for &v in &vset.primes {
        for &v2 in &vset.primes {
            for (i, &u) in uset.primes.iter().enumerate() {
                for &u2 in uset.primes.iter().skip(i + 1) {
                    m_term += 2.0 * twisted_sum(table, u * u2 * v * v2).abs();
                }
            }
        }
    }
    m_term /= a * a;
    // prime sieve: distinct (v, v′), weight |U|/A²
    let mut n_term = 0.0;
    for (i, &v) in vset.primes.iter().enumerate() {
        for &v2 in vset.primes.iter().skip(i + 1) {
            n_term += 2.0 * twisted_sum(table, v * v2).abs();
        }
    }
    n_term *= nu as f64 / (a * a);
    let rhs = main + m_term + n_term;
    let ratio = if rhs > 0.0 { lhs / rhs } else { f64::INFINITY };
    Ok(SieveEstimate {
        mode: SieveMode::Composite,
        lhs,
        main_term: main,
        char_term: m_term,
        second_char_term: Some(n_term),
        rhs,
        ratio,
        constant,
        pass: lhs <= constant * rhs,
        prime_count: nu + nv,
    })
}

// ---------------------------------------------------------------------------
// parameter laws
// ---------------------------------------------------------------------------

/// Exponents are exact rationals where the caller supplies an exact δ₂;
/// the numeric path below converts the measured ledger value.
pub fn prime_q_exponent(n: usize, d2: &BigRational) -> BigRational {
    let nq = BigRational::from_integer(BigInt::from(n as i64));
    let two = BigRational::from_integer(BigInt::from(2));
    let three = BigRational::from_integer(BigInt::from(3));
    &two / (&three * &nq) - d2 / &three
}

/// [D^(1/2n), D^(1/n−δ₂)] as exponents.
pub fn prime_q_window(n: usize, d2: &BigRational) -> (BigRational, BigRational) {
    let nq = BigRational::from_integer(BigInt::from(n as i64));
    let one = BigRational::from_integer(BigInt::from(1));
    let two = BigRational::from_integer(BigInt::from(2));
    (&one / (&two * &nq), &one / &nq - d2)
}

/// V-exponent of the composite law: 1/(7n) + (1/14)(1/n − δ₂); U = V².
pub fn composite_v_exponent(n: usize, d2: &BigRational) -> BigRational {
    let nq = BigRational::from_integer(BigInt::from(n as i64));
    let one = BigRational::from_integer(BigInt::from(1));
    let seven = BigRational::from_integer(BigInt::from(7));
    let fourteen = BigRational::from_integer(BigInt::from(14));
    &one / (&seven * &nq) + (&one / &nq - d2) / &fourteen
}

/// Parameter choice for a concrete field instance.
#[derive(Clone, Debug, Serialize)]
pub struct ParamChoice {
    pub mode: SieveMode,
    pub q_exponent: Option<f64>,
    pub q_value: Option<u64>,
    pub u_exponent: Option<f64>,
    pub v_exponent: Option<f64>,
    pub u_value: Option<u64>,
    pub v_value: Option<u64>,
    pub h_value: Option<u64>,
    pub windows: Vec<WindowCheck>,
}

/// Derive {Q} or {U, V, H} from (D_K, n, δ₂) and validate every window;
/// an unsatisfiable window is a `WindowEmpty` error naming the inequality.
pub fn choose_parameters(
    d_k: &BigInt,
    n: usize,
    delta2: f64,
    mode: SieveMode,
) -> Result<ParamChoice> {
    let ln_d = bigint_ln(d_k);
    let slack = calib::DELTA_SLACK_C.ln() / ln_d;
    let d2_cap = 1.0 / (2.0 * (n as f64 - 1.0)) + slack;
    if !(0.0..=d2_cap).contains(&delta2) {
        return Err(CoreError::WindowEmpty {
            violated: format!("δ₂ = {delta2} outside [0, 1/(2(n−1)) + slack = {d2_cap}]"),
        });
    }
    match mode {
        SieveMode::Prime => {
            let q_exp = 2.0 / (3.0 * n as f64) - delta2 / 3.0;
            let lo = 1.0 / (2.0 * n as f64);
            let hi = 1.0 / n as f64 - delta2;
            let mut windows = vec![
                WindowCheck {
                    name: "D^(1/2n) ≤ Q".into(),
                    lhs: lo,
                    rhs: q_exp,
                    ok: lo <= q_exp + 1e-12,
                },
                WindowCheck {
                    name: "Q ≤ D^(1/n−δ₂)".into(),
                    lhs: q_exp,
                    rhs: hi,
                    ok: q_exp <= hi + 1e-12,
                },
            ];
            let q_value = (q_exp * ln_d).exp().round() as u64;
            windows.push(WindowCheck {
                name: "P > (log D)² (desk-scale check, informational)".into(),
                lhs: (ln_d * ln_d).ceil(),
                rhs: q_value as f64,
                ok: q_value as f64 > ln_d * ln_d,
            });
            if let Some(bad) = windows[..2].iter().find(|w| !w.ok) {
                return Err(CoreError::WindowEmpty {
                    violated: format!("{}: {} vs {}", bad.name, bad.lhs, bad.rhs),
                });
            }
            Ok(ParamChoice {
                mode,
                q_exponent: Some(q_exp),
                q_value: Some(q_value),
                u_exponent: None,
                v_exponent: None,
                u_value: None,
                v_value: None,
                h_value: None,
                windows,
            })
        }
        SieveMode::Composite => {
            let v_exp = 1.0 / (7.0 * n as f64) + (1.0 / n as f64 - delta2) / 14.0;
            let u_exp = 2.0 * v_exp;
            let r2_exp = 1.0 / n as f64 - delta2;
            let windows = vec![
                WindowCheck {
                    name: "D^(1/2n − δ₂/2) ≤ U".into(),
                    lhs: 1.0 / (2.0 * n as f64) - delta2 / 2.0,
                    rhs: u_exp,
                    ok: 1.0 / (2.0 * n as f64) - delta2 / 2.0 <= u_exp + 1e-12,
                },
                WindowCheck {
                    name: "U ≤ D^(1/n − δ₂)".into(),
                    lhs: u_exp,
                    rhs: r2_exp,
                    ok: u_exp <= r2_exp + 1e-12,
                },
                WindowCheck {
                    name: "U·V² ≤ D^(1/n)".into(),
                    lhs: u_exp + 2.0 * v_exp,
                    rhs: 1.0 / n as f64,
                    ok: u_exp + 2.0 * v_exp <= 1.0 / n as f64 + 1e-12,
                },
                WindowCheck {
                    name: "D^(1/n) ≤ (U·V)²".into(),
                    lhs: 1.0 / n as f64,
                    rhs: 2.0 * (u_exp + v_exp),
                    ok: 1.0 / n as f64 <= 2.0 * (u_exp + v_exp) + 1e-12,
                },
                WindowCheck {
                    name: "H ≤ U".into(),
                    lhs: r2_exp - 2.0 * v_exp,
                    rhs: u_exp,
                    ok: r2_exp - 2.0 * v_exp <= u_exp + 1e-12,
                },
            ];
            if let Some(bad) = windows.iter().find(|w| !w.ok) {
                return Err(CoreError::WindowEmpty {
                    violated: format!("{}: {} vs {}", bad.name, bad.lhs, bad.rhs),
                });
            }
            let u_value = (u_exp * ln_d).exp().round() as u64;
            let v_value = (v_exp * ln_d).exp().round() as u64;
            let h_value = ((r2_exp * ln_d).exp() / ((v_value * v_value).max(1)) as f64)
                .floor() as u64;
            Ok(ParamChoice {
                mode,
                q_exponent: None,
                q_value: None,
                u_exponent: Some(u_exp),
                v_exponent: Some(v_exp),
                u_value: Some(u_value),
                v_value: Some(v_value),
                h_value: Some(h_value),
                windows,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Poisson cross-check of the twisted sums
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct PoissonCheck {
    pub p: u64,
    pub q: u64,
    pub direct: f64,
    pub dual: f64,
    pub rel_dev: f64,
    pub terms_used: usize,
}

/// S(z,p,q) = Σ_n ω(n)·(n/pq) computed directly from the weight table and
/// through the dual form (1/(pq)²)·Σ_u ĝ₁(u₁/pq)ĝ₂(u₂/pq)·T(q̄u;p)·T(p̄u;q),
/// truncated where the transforms vanish numerically.
pub fn char_sum_poisson_check(
    w: &WeightSequence,
    p: u64,
    q: u64,
    tol: f64,
) -> Result<PoissonCheck> {
    let r = p * q;
    let direct = twisted_sum(&w.table, r);
    let fp = reduce_mod_p(&w.form, p)?;
    let fq = reduce_mod_p(&w.form, q)?;
    let tp = plane_sum_all(&fp);
    let tq = plane_sum_all(&fq);
    let (qb_mod_p, pb_mod_q) = crt_units(p, q);
    let cut1 = 1e-12 * w.g1.radius;
    let cut2 = 1e-12 * w.g2.radius;
    // whole transform grids in two FFT passes; the truncation index is the
    // onset of a quiet run below the cutoff
    let cap = 1 << 15;
    let grid1 = w.g1.fourier_grid(r, cap);
    let grid2 = w.g2.fourier_grid(r, cap);
    let axis_limit = |grid: &[num_complex::Complex64], cut: f64| -> Result<usize> {
        let mut quiet = 0usize;
        for (u, v) in grid.iter().enumerate() {
            if v.norm() < cut {
                quiet += 1;
                if quiet >= 16 {
                    return Ok(u);
                }
            } else {
                quiet = 0;
            }
        }
        Err(CoreError::QuadratureFail { target: cut, achieved: f64::NAN })
    };
    let u1_max = axis_limit(&grid1, cut1)?;
    let u2_max = axis_limit(&grid2, cut2)?;
    let g1_at = |u: i64| {
        let v = grid1[u.unsigned_abs() as usize];
        if u < 0 {
            v.conj()
        } else {
            v
        }
    };
    let g2_at = |u: i64| {
        let v = grid2[u.unsigned_abs() as usize];
        if u < 0 {
            v.conj()
        } else {
            v
        }
    };
    let mut dual = 0.0;
    let mut terms = 0usize;
    for u1 in -(u1_max as i64)..=u1_max as i64 {
        let g1 = g1_at(u1);
        if g1.norm() < cut1 {
            continue;
        }
        let v1p = (u1.rem_euclid(p as i64) as u64 * qb_mod_p) % p;
        let v1q = (u1.rem_euclid(q as i64) as u64 * pb_mod_q) % q;
        for u2 in -(u2_max as i64)..=u2_max as i64 {
            let g2 = g2_at(u2);
            if g2.norm() < cut2 {
                continue;
            }
            let v2p = (u2.rem_euclid(p as i64) as u64 * qb_mod_p) % p;
            let v2q = (u2.rem_euclid(q as i64) as u64 * pb_mod_q) % q;
            let t = tp[v1p as usize][v2p as usize] * tq[v1q as usize][v2q as usize];
            let term = g1 * g2 * t;
            dual += term.re;
            terms += 1;
        }
    }
    dual /= (r * r) as f64;
    let rel_dev = (direct - dual).abs() / direct.abs().max(1.0);
    if rel_dev > tol {
        return Err(CoreError::QuadratureFail { target: tol, achieved: rel_dev });
    }
    Ok(PoissonCheck { p, q, direct, dual, rel_dev, terms_used: terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{build_field, NumberField, ReduceParams};
    use crate::normform::build_form;
    use crate::poly::IPoly;
    use crate::weights::SmoothWeight;
    use std::sync::OnceLock;

    struct Setup {
        k: NumberField,
        rb: ReducedBasis,
        form: NormForm,
        data: AdmissibilityData,
        weights: WeightSequence,
    }

    fn quintic() -> &'static Setup {
        static CELL: OnceLock<Setup> = OnceLock::new();
        CELL.get_or_init(|| {
            let k = build_field(&IPoly::from_i64(&[-2, 0, 0, 0, 0, 1]), None).unwrap();
            let rb = k.reduce_basis(&ReduceParams::default()).unwrap();
            let emb = k.embeddings(128).unwrap();
            let shift = ShiftVector::new(vec![1, 0, 0]);
            let form = build_form(&k, &rb, &shift);
            let data = admissibility_data(&k, &emb, &rb, &shift).unwrap();
            let ln_d = bigint_ln(&k.d_k);
            let r1 = (ln_d / 5.0).exp();
            let r2 = ((1.0 / 5.0 - rb.delta2()) * ln_d).exp();
            let weights = WeightSequence::build(
                form.clone(),
                SmoothWeight::new(r1),
                SmoothWeight::new(r2),
            )
            .unwrap();
            Setup { k, rb, form, data, weights }
        })
    }

    #[test]
    fn admissibility_exclusions() {
        let s = quintic();
        // 5 | disc(x⁵−2) = 50000: p = 5 must be excluded
        let pset = admissible_primes(PrimeRole::P, 3, 40, &s.form, &s.data).unwrap();
        assert!(!pset.primes.contains(&5));
        assert!(!pset.primes.contains(&2));
        let diag5 = pset.diagnostics.iter().find(|d| d.p == 5).unwrap();
        assert!(!diag5.admissible);
        assert!(diag5.reasons.iter().any(|r| r.contains("disc")));
        // plenty of odd primes survive
        assert!(pset.primes.len() >= 8, "{:?}", pset.primes);
    }

    #[test]
    fn admissibility_u_role_needs_good_shift() {
        let s = quintic();
        let uset = admissible_primes(PrimeRole::U, 3, 60, &s.form, &s.data).unwrap();
        // U-sets are subsets of the corresponding P-sets
        let pset = admissible_primes(PrimeRole::P, 3, 60, &s.form, &s.data).unwrap();
        for u in &uset.primes {
            assert!(pset.primes.contains(u));
        }
        // primes dividing the shift data are excluded
        use num_traits::Zero;
        for d in &uset.diagnostics {
            let pm = BigInt::from(d.p);
            if (&s.data.z_defect % &pm).is_zero() {
                assert!(!d.admissible);
            }
        }
    }

    #[test]
    fn toy_square_sieve_ratio() {
        // ω = indicator of {1,…,100}: LHS = #squares = 10
        let table = WeightTable::from_pairs((1..=100).map(|m| (m as i128, 1.0)));
        let pset = PrimeSet {
            role: PrimeRole::P,
            lo: 11,
            hi: 31,
            primes: vec![11, 13, 17, 19, 23, 29, 31],
            diagnostics: vec![],
        };
        let est = square_sieve(&table, &pset, calib::SIEVE_PRIME_C).unwrap();
        assert_eq!(est.lhs, 10.0);
        assert!(est.pass, "ratio = {}", est.ratio);
        // support too large when the prime set shrinks
        let tiny = PrimeSet { primes: vec![11, 13], ..pset.clone() };
        assert!(matches!(
            square_sieve(&table, &tiny, 4.0),
            Err(CoreError::SupportTooLarge { .. })
        ));
    }

    #[test]
    fn toy_composite_sieve_ratio() {
        let table = WeightTable::from_pairs((1..=100).map(|m| (m as i128, 1.0)));
        let vset = PrimeSet {
            role: PrimeRole::V,
            lo: 3,
            hi: 13,
            primes: vec![3, 5, 7, 11, 13],
            diagnostics: vec![],
        };
        let uprimes = primes_in(19, 131);
        assert!(uprimes.len() >= 25, "{}", uprimes.len());
        let uset = PrimeSet {
            role: PrimeRole::U,
            lo: 19,
            hi: 131,
            primes: uprimes[..25].to_vec(),
            diagnostics: vec![],
        };
        let est = composite_square_sieve(&table, &uset, &vset, calib::SIEVE_COMPOSITE_C).unwrap();
        assert_eq!(est.lhs, 10.0);
        assert!(est.pass, "ratio = {}", est.ratio);
        // V³ precondition
        let bigv = PrimeSet { primes: primes_in(3, 60), ..vset.clone() };
        assert!(matches!(
            composite_square_sieve(&table, &uset, &bigv, 4.0),
            Err(CoreError::PreconditionV3 { .. })
        ));
        // singleton families degenerate gracefully: both character sums
        // are empty and the estimator reduces to the main term
        let single_u = PrimeSet { primes: vec![19], ..uset.clone() };
        let single_v = PrimeSet { primes: vec![3], ..vset.clone() };
        let small = WeightTable::from_pairs((1..=2).map(|m| (m as i128, 1.0)));
        let est2 = composite_square_sieve(&small, &single_u, &single_v, 40.0).unwrap();
        assert_eq!(est2.char_term, 0.0);
        assert_eq!(est2.second_char_term, Some(0.0));
        assert_eq!(est2.rhs, est2.main_term);
    }

    #[test]
    fn quintic_weighted_sieve_ratio() {
        let s = quintic();
        // a prime window wide enough for the support condition
        let pset = admissible_primes(PrimeRole::P, 67, 134, &s.form, &s.data).unwrap();
        assert!(pset.primes.len() >= 12, "{:?}", pset.primes.len());
        let est = square_sieve(&s.weights.table, &pset, calib::SIEVE_PRIME_C).unwrap();
        assert!(est.pass, "ratio = {} (lhs {}, rhs {})", est.ratio, est.lhs, est.rhs);
    }

    #[test]
    fn main_term_monotone_in_prime_count() {
        let table = WeightTable::from_pairs((1..=50).map(|m| (m as i128, 1.0)));
        let small = PrimeSet {
            role: PrimeRole::P,
            lo: 11,
            hi: 23,
            primes: vec![11, 13, 17, 19, 23],
            diagnostics: vec![],
        };
        let large = PrimeSet {
            primes: vec![11, 13, 17, 19, 23, 29, 31],
            ..small.clone()
        };
        let e1 = square_sieve(&table, &small, 4.0).unwrap();
        let e2 = square_sieve(&table, &large, 4.0).unwrap();
        assert!(e2.main_term <= e1.main_term);
    }

    #[test]
    fn parameter_windows_prime_mode() {
        let s = quintic();
        // δ₂ = 1/(2n) puts Q exactly on the lower boundary D^(1/2n)
        use num_traits::One;
        let n = 5usize;
        let d2 = BigRational::new(BigInt::one(), BigInt::from(2 * n as i64));
        let qe = prime_q_exponent(n, &d2);
        let (lo, hi) = prime_q_window(n, &d2);
        assert_eq!(qe, lo);
        assert!(qe <= hi);
        // measured δ₂ of the quintic exceeds 1/(2n): the prime window is
        // empty at desk scale and must be reported as such
        let err = choose_parameters(&s.k.d_k, 5, s.rb.delta2(), SieveMode::Prime).unwrap_err();
        assert!(matches!(err, CoreError::WindowEmpty { .. }), "{err}");
        // a compliant δ₂ produces a boundary-valid Q
        let choice = choose_parameters(&s.k.d_k, 5, 0.05, SieveMode::Prime).unwrap();
        assert!(choice.q_value.unwrap() >= 2);
        // δ₂ beyond the Prop-§2 cap errors out
        let err2 = choose_parameters(&s.k.d_k, 5, 0.4, SieveMode::Prime).unwrap_err();
        assert!(matches!(err2, CoreError::WindowEmpty { .. }));
    }

    #[test]
    fn parameter_windows_composite_mode() {
        let s = quintic();
        // the measured δ₂ ≈ 0.162 exceeds 2/(3n), so U ≤ D^(1/n−δ₂) is
        // unsatisfiable for this field and must be reported
        let err = choose_parameters(&s.k.d_k, 5, s.rb.delta2(), SieveMode::Composite).unwrap_err();
        assert!(matches!(err, CoreError::WindowEmpty { .. }), "{err}");
        // a compliant δ₂ passes with U = V² enforced by construction
        let choice = choose_parameters(&s.k.d_k, 5, 0.11, SieveMode::Composite).unwrap();
        let (ue, ve) = (choice.u_exponent.unwrap(), choice.v_exponent.unwrap());
        assert!((ue - 2.0 * ve).abs() < 1e-12);
        assert!(choice.windows.iter().all(|w| w.ok));
        assert!(choice.h_value.is_some());
    }

    #[test]
    fn poisson_cross_check_on_quintic() {
        let s = quintic();
        let check = char_sum_poisson_check(&s.weights, 3, 7, 1e-6).unwrap();
        assert!(check.rel_dev <= 1e-6, "dev = {}", check.rel_dev);
        assert!(check.terms_used > 0);
    }
}
