//! Acceptance suite: one test per criterion, each printing a PASS line
//! (visible under `cargo test --test acceptance -- --nocapture`).
//!
//! Constants follow the two-phase protocol throughout: ratios are measured
//! on the calibration slice (the three smallest fields, or primes p ≤ 31),
//! frozen at 1.25× the maximum, and then asserted on the larger slice.
//! The frozen values shipped in the calibration module are re-derived here
//! and the suite fails if they have gone stale.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::time::Instant;

use h2lab_core::calib;
use h2lab_core::counter::{
    classify_z, count_h2_set, envelope_composite, envelope_prime, guaranteed_saving,
    prime_envelope_zero_at_boundary, verify_saving_identity, BoxSpec,
};
use h2lab_core::expsums::{
    corr_scan, corr_sum_naive, exceptional_set, hooley_moment, plane_sum_crt, plane_sum_direct,
    plane_sum_prime, scan_onevar, CharTables, MomentKind,
};
use h2lab_core::field::{build_field, NumberField, ReduceParams, ReducedBasis};
use h2lab_core::modarith::{gcd3, primes_in};
use h2lab_core::normform::{
    build_form, is_square_poly, reduce_mod_p, split_factors, LinearFactorization, NormForm,
    ShiftVector,
};
use h2lab_core::poly::IPoly;
use h2lab_core::rng::Rng;
use h2lab_core::sieve::{
    admissibility_data, admissible_primes, char_sum_poisson_check, composite_square_sieve,
    square_sieve, PrimeRole, PrimeSet,
};
use h2lab_core::weights::{SmoothWeight, WeightSequence, WeightTable};

fn quintic_field(q: i64) -> (NumberField, ReducedBasis) {
    let k = build_field(&IPoly::from_i64(&[-q, 0, 0, 0, 0, 1]), None).unwrap();
    let rb = k.reduce_basis(&ReduceParams::default()).unwrap();
    (k, rb)
}

/// (form, p, factorization) instances with the stratification hypotheses
/// verified, drawn from two quintic fields and several shifts.
fn admissible_instances(
    p_lo: u64,
    p_hi: u64,
    min_count: usize,
) -> Vec<(NormForm, u64, LinearFactorization)> {
    let mut rng = Rng::new(0xacce97);
    let mut out = Vec::new();
    for q in [2i64, 3] {
        let (k, rb) = quintic_field(q);
        for z in [vec![1, 0, 0], vec![1, 0, 1], vec![0, 1, -1]] {
            let form = build_form(&k, &rb, &ShiftVector::new(z));
            for p in primes_in(p_lo, p_hi) {
                if (&k.d_k % BigInt::from(p)).is_zero() {
                    continue;
                }
                let Ok(fm) = reduce_mod_p(&form, p) else { continue };
                let Ok(fac) = split_factors(&fm, 24, &mut rng) else { continue };
                if fac.hyp.all_hold() && fac.hyp.a_nonzero {
                    out.push((form.clone(), p, fac));
                }
            }
        }
    }
    assert!(
        out.len() >= min_count,
        "need ≥ {min_count} admissible instances, found {}",
        out.len()
    );
    out
}

#[test]
fn criterion_1_quadratic_sanity_pipeline() {
    let t0 = Instant::now();
    let k = build_field(&IPoly::from_i64(&[-2, 0, 1]), None).unwrap();
    assert_eq!(k.d_k, BigInt::from(8));
    let rb = k.reduce_basis(&ReduceParams::default()).unwrap();
    assert!((rb.delta2() - 0.5).abs() < 1e-12, "δ₂ = {}", rb.delta2());
    let form = build_form(&k, &rb, &ShiftVector::zero(2));
    assert_eq!(form.coeff.get(2, 0), BigInt::one());
    assert_eq!(form.coeff.get(0, 2), BigInt::from(-2));
    assert_eq!(form.coeff.get(1, 1), BigInt::zero());
    assert_eq!(form.coeff.get(1, 0), BigInt::zero());
    assert_eq!(form.coeff.get(0, 1), BigInt::zero());
    assert_eq!(form.coeff.get(0, 0), BigInt::zero());
    let x = h2lab_core::FieldElement::from_integers(&[1, 1]);
    assert_eq!(k.norm(&x), BigRational::from_integer(BigInt::from(-1)));
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!(
        "PASS criterion 1: Q(√2) end-to-end (D_K = 8, δ₂ = 1/2, F₀ = X₁²−2X₂², N(1+√2) = −1) in {elapsed:?}"
    );
}

#[test]
fn criterion_2_delta_ledger_on_pure_quintics() {
    let window_c = calib::basis_product_window_c(5);
    for q in [2i64, 3, 7, 11, 13] {
        let t0 = Instant::now();
        let (k, rb) = quintic_field(q);
        let ln_d = h2lab_core::field::bigint_ln(&k.d_k);
        let slack = calib::PURE_RADICAL_SLACK_C.ln() / ln_d;
        assert!(
            rb.delta2() <= 1.0 / 20.0 + slack,
            "q={q}: δ₂ = {} > 1/20 + {slack}",
            rb.delta2()
        );
        assert!(
            rb.product_ratio <= window_c && rb.product_ratio >= 1.0 / window_c,
            "q={q}: ∏/√D = {}",
            rb.product_ratio
        );
        let elapsed = t0.elapsed();
        assert!(elapsed.as_secs_f64() < 60.0, "q={q} took {elapsed:?}");
    }
    println!(
        "PASS criterion 2: δ₂ ≤ 1/20 + log({})/log(D) and ∏‖α_i‖/√D within [1/{window_c}, {window_c}] on q ∈ {{2,3,7,11,13}}",
        calib::PURE_RADICAL_SLACK_C
    );
}

#[test]
fn criterion_3_exponential_sum_bounds() {
    let instances = admissible_instances(11, 97, 20);
    let calib_slice: Vec<_> = instances.iter().filter(|(_, p, _)| *p <= 31).collect();
    let assert_slice: Vec<_> = instances.iter().filter(|(_, p, _)| *p > 31).collect();
    assert!(calib_slice.len() >= 6 && assert_slice.len() >= 6);

    let measure = |inst: &[&(NormForm, u64, LinearFactorization)]| -> (f64, f64, f64, usize) {
        let (mut c1, mut c2, mut c3, mut exc) = (0.0f64, 0.0f64, 0.0f64, 0usize);
        for (form, p, _) in inst {
            let p = *p;
            let fm = reduce_mod_p(form, p).unwrap();
            let tab = CharTables::new_prime(p);
            // (a) one-variable sums with phase, off the exceptional set
            for s in [0u64, 1, 2] {
                let scan = scan_onevar(&fm, &tab, s);
                c1 = c1.max(scan.max_ratio_off_exceptional);
                exc = exc.max(scan.exceptional_y.len());
            }
            // (b) two-variable complete sums: |T(s,t;p)| / (p·gcd(s,t,p)^(1/2))
            for (s, t) in [(0u64, 0u64), (1, 0), (0, 1), (1, 2), (3, 5)] {
                let v = plane_sum_prime(&fm, (s, t)).value().norm();
                let g = gcd3(s % p, t % p, p) as f64;
                c2 = c2.max(v / (p as f64 * g.sqrt()));
            }
            // (c) trivial bound of the correlation sums, whole grid, s ∈ {0,1}
            for s in [0u64, 1] {
                let scan = corr_scan(&fm, &tab, s);
                let wmax = scan
                    .grid
                    .iter()
                    .flatten()
                    .map(|v| v.norm())
                    .fold(0.0, f64::max);
                c3 = c3.max(wmax / (p * p) as f64);
            }
        }
        (c1, c2, c3, exc)
    };

    let (m1, m2, m3, exc_small) = measure(&calib_slice);
    let (f1, f2, f3) = (1.25 * m1, 1.25 * m2, 1.25 * m3);
    // frozen constants must still dominate their calibration slices
    assert!(f1 <= calib::EXP_ONEVAR_C1, "C₁ drift: {f1} > {}", calib::EXP_ONEVAR_C1);
    assert!(f2 <= calib::EXP_NOTSHIFT_C2, "C₂ drift: {f2} > {}", calib::EXP_NOTSHIFT_C2);
    assert!(f3 <= calib::EXP_TRIVIAL_C3, "C₃ drift: {f3} > {}", calib::EXP_TRIVIAL_C3);
    assert!(exc_small <= calib::EXP_ONEVAR_EXC_MAX);
    let (a1, a2, a3, exc_large) = measure(&assert_slice);
    assert!(a1 <= f1, "one-variable ratio {a1} exceeds frozen {f1} beyond p = 31");
    assert!(a2 <= f2, "two-variable ratio {a2} exceeds frozen {f2} beyond p = 31");
    assert!(a3 <= f3, "trivial-bound ratio {a3} exceeds frozen {f3} beyond p = 31");
    assert!(exc_large <= calib::EXP_ONEVAR_EXC_MAX);
    println!(
        "PASS criterion 3: {} instances, frozen (C₁,C₂,C₃) = ({f1:.3},{f2:.3},{f3:.3}) on p ≤ 31, never exceeded up to p = 97",
        instances.len()
    );
}

#[test]
fn criterion_4_stratification() {
    let instances = admissible_instances(11, 61, 20);
    // containment, cardinality, off-set bound under the two-phase protocol
    let ratio_of = |inst: &[&(NormForm, u64, LinearFactorization)]| -> f64 {
        let mut worst: f64 = 0.0;
        for (form, p, fac) in inst {
            let fm = reduce_mod_p(form, *p).unwrap();
            for s in [1u64, 2] {
                let rep = exceptional_set(&fm, fac, s, f64::INFINITY).unwrap();
                assert!(rep.size_ok, "|A_s| = {} > n² at p={p}", rep.closed_form.len());
                worst = worst.max(rep.max_ratio_off_set);
            }
        }
        worst
    };
    let calib_slice: Vec<_> = instances.iter().filter(|(_, p, _)| *p <= 31).collect();
    let assert_slice: Vec<_> = instances.iter().filter(|(_, p, _)| *p > 31).collect();
    let frozen = 1.25 * ratio_of(&calib_slice);
    assert!(frozen <= calib::STRATA_C4, "C₄ drift: {frozen} > {}", calib::STRATA_C4);
    let later = ratio_of(&assert_slice);
    assert!(later <= frozen, "off-set ratio {later} exceeds frozen {frozen}");
    // with the frozen constant, empirical violations are contained in the
    // closed form on every instance
    for (form, p, fac) in &instances {
        let fm = reduce_mod_p(form, *p).unwrap();
        for s in [1u64, 2] {
            let rep = exceptional_set(&fm, fac, s, frozen).unwrap();
            assert!(
                rep.contained,
                "violations {:?} escape A_s {:?} at p={p}, s={s}",
                rep.empirical, rep.closed_form
            );
        }
    }
    // DFT-accelerated scan against the naive triple loop on every p ≤ 17
    for (form, p, _) in instances.iter().filter(|(_, p, _)| *p <= 17) {
        let fm = reduce_mod_p(form, *p).unwrap();
        let tab = CharTables::new_prime(*p);
        let scale = (*p as f64).powi(3);
        for s in [1u64, 3] {
            let scan = corr_scan(&fm, &tab, s);
            for r in 0..*p {
                for t in 0..*p {
                    let naive = corr_sum_naive(&fm, &tab, s, t, r);
                    let fast = scan.grid[r as usize][t as usize];
                    assert!(
                        (naive - fast).norm() <= 1e-6 * scale,
                        "p={p} s={s} t={t} r={r}"
                    );
                }
            }
        }
    }
    // accelerated full (r,t,s) scan at p = 61 under the minute budget
    let (form61, _, _) = instances
        .iter()
        .find(|(_, p, _)| *p == 61)
        .expect("a p = 61 instance");
    let fm = reduce_mod_p(form61, 61).unwrap();
    let tab = CharTables::new_prime(61);
    let t0 = Instant::now();
    let mut checksum = 0.0f64;
    for s in 0..61 {
        let scan = corr_scan(&fm, &tab, s);
        checksum += scan.grid[5][7].norm();
    }
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "full scan took {elapsed:?}");
    assert!(checksum.is_finite());
    println!(
        "PASS criterion 4: containment on {} instances, C₄ frozen at {frozen:.3}, full (r,t,s) scan at p = 61 in {elapsed:?}",
        instances.len()
    );
}

#[test]
fn criterion_5_crt_multiplicativity() {
    let (k, rb) = quintic_field(2);
    let form = build_form(&k, &rb, &ShiftVector::new(vec![1, 0, 1]));
    let mut rng = Rng::new(0xc47);
    let odd_primes: Vec<u64> = primes_in(3, 97);
    let mut max_dev: f64 = 0.0;
    let mut done = 0;
    while done < 50 {
        let p = odd_primes[rng.below(odd_primes.len() as u64) as usize];
        let q = odd_primes[rng.below(odd_primes.len() as u64) as usize];
        if p == q || p * q > 10_000 {
            continue;
        }
        let v = (rng.below(p * q), rng.below(p * q));
        let direct = plane_sum_direct(&form, v, p * q);
        let product = plane_sum_crt(&form, v, p, q).unwrap();
        // the CRT identity is exact at the level of the integer
        // coefficient vectors; the complex deviation is pure rounding
        assert_eq!(direct.coeffs, product.coeffs, "pq = {}", p * q);
        let dv = direct.value();
        let pv = product.value();
        max_dev = max_dev.max((dv - pv).norm() / dv.norm().max(1.0));
        done += 1;
    }
    assert!(max_dev <= 1e-9, "max relative deviation {max_dev}");
    println!(
        "PASS criterion 5: T(v;pq) = T(q̄v;p)·T(p̄v;q) on 50 random instances, max relative deviation {max_dev:.2e}"
    );
}

#[test]
fn criterion_6_hooley_second_moments() {
    let (k, rb) = quintic_field(2);
    let form = build_form(&k, &rb, &ShiftVector::new(vec![1, 0, 0]));
    // two-variable case, κ = 2
    for p in [7u64, 11, 13, 17] {
        let rep = hooley_moment(&form, p, 1, &MomentKind::TwoVar { s: 1, t: 2 }, calib::HOOLEY_C)
            .unwrap();
        assert!(rep.conservation_ok, "conservation at p={p}");
        assert!(
            rep.variance <= rep.bound,
            "p={p}: variance {} > {}",
            rep.variance,
            rep.bound
        );
    }
    let rep2 = hooley_moment(&form, 7, 2, &MomentKind::TwoVar { s: 1, t: 1 }, calib::HOOLEY_C)
        .unwrap();
    assert!(rep2.conservation_ok && rep2.variance <= rep2.bound);
    // three-variable case, κ = 3
    for p in [7u64, 11] {
        let rep = hooley_moment(
            &form,
            p,
            1,
            &MomentKind::ThreeVarW { s: 1, t: 3, r: 2 },
            calib::HOOLEY_C,
        )
        .unwrap();
        assert!(rep.conservation_ok, "conservation at p={p}");
        assert!(
            rep.variance <= rep.bound,
            "p={p}: variance {} > {}",
            rep.variance,
            rep.bound
        );
    }
    println!(
        "PASS criterion 6: fiber variance ≤ {}·p^(κm) with exact conservation (κ=2: p ∈ {{7,11,13,17}}, m ≤ 2; κ=3: p ∈ {{7,11}})",
        calib::HOOLEY_C
    );
}

#[test]
fn criterion_7_sieve_inequalities() {
    // quintic instances with D_K ≤ 10⁶
    for q in [2i64, 3] {
        let (k, rb) = quintic_field(q);
        assert!(k.d_k <= BigInt::from(1_000_000));
        let emb = k.embeddings(128).unwrap();
        let shift = ShiftVector::new(vec![1, 0, 0]);
        let form = build_form(&k, &rb, &shift);
        let ln_d = h2lab_core::field::bigint_ln(&k.d_k);
        let r1 = (ln_d / 5.0).exp();
        let r2 = ((0.2 - rb.delta2()) * ln_d).exp();
        let ws =
            WeightSequence::build(form.clone(), SmoothWeight::new(r1), SmoothWeight::new(r2))
                .unwrap();
        let data = admissibility_data(&k, &emb, &rb, &shift).unwrap();
        let pset = admissible_primes(PrimeRole::P, 67, 148, &form, &data).unwrap();
        let est = square_sieve(&ws.table, &pset, calib::SIEVE_PRIME_C).unwrap();
        assert!(
            est.pass,
            "q={q}: prime sieve ratio {} > {}",
            est.ratio, est.constant
        );
        // Poisson cross-check of the twisted sum
        let chk = char_sum_poisson_check(&ws, 3, 7, 1e-6).unwrap();
        assert!(chk.rel_dev <= 1e-6, "q={q}: Poisson deviation {}", chk.rel_dev);
    }
    // toy weight sequence through both estimators
    let toy = WeightTable::from_pairs((1..=100).map(|m| (m as i128, 1.0)));
    let pset = PrimeSet {
        role: PrimeRole::P,
        lo: 11,
        hi: 31,
        primes: primes_in(11, 31),
        diagnostics: vec![],
    };
    let est = square_sieve(&toy, &pset, calib::SIEVE_PRIME_C).unwrap();
    assert!(est.pass, "toy prime sieve ratio {}", est.ratio);
    // composite variant with the size law U = V² and |V|³ ≤ A
    let (uset, vset) = h2lab_core::pipeline::toy_composite_families();
    assert!(vset.primes.iter().all(|v| {
        let v2 = v * v;
        uset.lo <= v2 * 2 && v2 / 2 <= uset.hi
    }));
    let est2 = composite_square_sieve(&toy, &uset, &vset, calib::SIEVE_COMPOSITE_C).unwrap();
    assert!(est2.pass, "toy composite sieve ratio {}", est2.ratio);
    println!(
        "PASS criterion 7: prime sieve ratio ≤ {} on quintics (D ≤ 10⁶) and toys, composite ratio {:.3} ≤ {}, Poisson dual within 1e-6",
        calib::SIEVE_PRIME_C, est2.ratio, calib::SIEVE_COMPOSITE_C
    );
}

#[test]
fn criterion_8_counting_consistency() {
    // Q(√2): direct equals decomposition, both equal the hand count 5
    let k2 = build_field(&IPoly::from_i64(&[-2, 0, 1]), None).unwrap();
    let rb2 = k2.reduce_basis(&ReduceParams::default()).unwrap();
    let rep2 = count_h2_set(&k2, &rb2, 1.0, 1 << 24).unwrap();
    assert!(rep2.consistent);
    assert_eq!(rep2.direct_total, 5);
    // Q(2^(1/5)): consistency, exact partition, empty square stratum
    let (k5, rb5) = quintic_field(2);
    let rep5 = count_h2_set(&k5, &rb5, 1.0, 1 << 24).unwrap();
    assert!(rep5.consistent, "direct {} vs decomposed {}", rep5.direct_total, rep5.decomposed_total);
    let emb = k5.embeddings(128).unwrap();
    let no_index2 = !k5.detect_index2_subfield(&emb).unwrap().found;
    assert!(no_index2);
    let cbox = BoxSpec::shift_box(&k5, &rb5, 1.0);
    let cls = classify_z(&k5, &emb, &rb5, &cbox, no_index2, 1 << 24).unwrap();
    assert_eq!(
        (cls.square_count + cls.inadmissible_count + cls.generic_count) as u128,
        cls.box_points
    );
    assert_eq!(cls.square_count, 0, "square stratum must be empty for n = 5");
    println!(
        "PASS criterion 8: direct = decomposed ({} = {}) on Q(√2) and Q(2^(1/5)) ({} = {}), exact partition of {} shifts, empty square stratum",
        rep2.direct_total, rep2.decomposed_total, rep5.direct_total, rep5.decomposed_total, cls.box_points
    );
}

#[test]
fn criterion_9_exponent_algebra() {
    // exact rational arithmetic, no tolerances
    for n in 5..=9 {
        assert!(verify_saving_identity(n), "saving identity fails at n = {n}");
        assert!(prime_envelope_zero_at_boundary(n), "zero-gain boundary fails at n = {n}");
    }
    // spot identity: the guaranteed saving at n is attained exactly at the
    // top of the admissible range
    for n in [5usize, 6, 7] {
        let top = BigRational::new(BigInt::one(), BigInt::from(2 * (n as i64 - 1)));
        let attained = envelope_prime(n, &top).max(envelope_composite(n, &top));
        assert_eq!(attained, guaranteed_saving(n), "n = {n}");
    }
    println!(
        "PASS criterion 9: max{{1/(6n)−δ₂/3, 1/(7n)−3δ₂/14}} ≥ 1/(28n)−3/(28n(n−1)) on the admissible range, exact; 1/(6n)−δ₂/3 = 0 at δ₂ = 1/(2n)"
    );
}
