//! Lattice reduction.
//!
//! Two variants serve different layers:
//!
//! * [`lll_f64`] — classical LLL with floating Gram–Schmidt on real row
//!   vectors while the integer coordinates of each row relative to the
//!   original basis are updated exactly. Used to seed integral-basis
//!   reduction on the Minkowski embedding of a number field.
//! * [`lll_exact`] — LLL over `BigInt` rows with exact rational
//!   Gram–Schmidt. Slow but bulletproof; used for integer-relation
//!   detection where the scaled entries exceed f64 range.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::bigfloat::{Bf, Cf};

/// In-place LLL on `rows` (real coordinates); `coords[i]` tracks the exact
/// integer coordinates of row i in the original basis and receives the same
/// unimodular updates.
pub fn lll_f64(rows: &mut [Vec<f64>], coords: &mut [Vec<BigInt>], delta: f64) {
    let n = rows.len();
    if n <= 1 {
        return;
    }
    let dim = rows[0].len();
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };

    let mut ortho = vec![vec![0.0; dim]; n];
    let mut mu = vec![vec![0.0; n]; n];
    let mut norms = vec![0.0; n];
    let gso = |rows: &[Vec<f64>],
               ortho: &mut Vec<Vec<f64>>,
               mu: &mut Vec<Vec<f64>>,
               norms: &mut Vec<f64>| {
        for i in 0..rows.len() {
            let mut v = rows[i].clone();
            mu[i][i] = 1.0;
            for j in 0..i {
                mu[i][j] = if norms[j] > 0.0 {
                    dot(&rows[i], &ortho[j]) / norms[j]
                } else {
                    0.0
                };
                let m = mu[i][j];
                for (kv, ov) in v.iter_mut().zip(&ortho[j]) {
                    *kv -= m * ov;
                }
            }
            norms[i] = dot(&v, &v);
            ortho[i] = v;
        }
    };
    gso(rows, &mut ortho, &mut mu, &mut norms);

    let mut k = 1usize;
    let mut steps = 0usize;
    while k < n {
        steps += 1;
        if steps > 10_000 * n * n {
            break; // refuse to loop forever on degenerate float input
        }
        for j in (0..k).rev() {
            if mu[k][j].abs() > 0.5 {
                let q = mu[k][j].round();
                let qb = BigInt::from(q as i64);
                for d in 0..dim {
                    rows[k][d] -= q * rows[j][d];
                }
                for d in 0..coords[k].len() {
                    let t = &qb * &coords[j][d];
                    coords[k][d] -= t;
                }
                for jj in 0..=j {
                    mu[k][jj] -= q * mu[j][jj];
                }
            }
        }
        if norms[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * norms[k - 1] {
            k += 1;
        } else {
            rows.swap(k, k - 1);
            coords.swap(k, k - 1);
            gso(rows, &mut ortho, &mut mu, &mut norms);
            k = k.max(2) - 1;
        }
    }
}

/// Exact LLL on integer rows with rational Gram–Schmidt; Lovász constant 3/4.
pub fn lll_exact(rows: &mut Vec<Vec<BigInt>>) {
    let n = rows.len();
    if n <= 1 {
        return;
    }
    let dotq = |a: &[BigRational], b: &[BigRational]| -> BigRational {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    };
    let to_q = |r: &[BigInt]| -> Vec<BigRational> {
        r.iter().map(|x| BigRational::from_integer(x.clone())).collect()
    };

    let delta = BigRational::new(BigInt::from(3), BigInt::from(4));
    let mut ortho: Vec<Vec<BigRational>> = Vec::new();
    let mut mu: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); n]; n];
    let mut norms: Vec<BigRational> = vec![BigRational::zero(); n];

    let gso = |rows: &Vec<Vec<BigInt>>,
               ortho: &mut Vec<Vec<BigRational>>,
               mu: &mut Vec<Vec<BigRational>>,
               norms: &mut Vec<BigRational>| {
        ortho.clear();
        for i in 0..rows.len() {
            let mut v = to_q(&rows[i]);
            for j in 0..i {
                mu[i][j] = if norms[j].is_zero() {
                    BigRational::zero()
                } else {
                    dotq(&to_q(&rows[i]), &ortho[j]) / norms[j].clone()
                };
                for (kv, ov) in v.iter_mut().zip(ortho[j].iter()) {
                    let t = &mu[i][j] * ov;
                    *kv -= t;
                }
            }
            norms[i] = dotq(&v, &v);
            ortho.push(v);
        }
    };
    gso(rows, &mut ortho, &mut mu, &mut norms);

    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut k = 1usize;
    while k < n {
        for j in (0..k).rev() {
            if mu[k][j].abs() > half {
                let q = mu[k][j].round().to_integer();
                for d in 0..rows[k].len() {
                    let t = &q * &rows[j][d];
                    rows[k][d] -= t;
                }
                gso(rows, &mut ortho, &mut mu, &mut norms);
            }
        }
        let lhs = norms[k].clone();
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * norms[k - 1].clone();
        if lhs >= rhs {
            k += 1;
        } else {
            rows.swap(k, k - 1);
            gso(rows, &mut ortho, &mut mu, &mut norms);
            k = k.max(2) - 1;
        }
    }
}

/// Integer-relation candidates among high-precision complex values:
/// vectors m with Σ m_i·v_i numerically tiny and coefficient height ≤
/// `height`.
///
/// Lattice rows are `[e_i | round(2^scale·Re v_i) | round(2^scale·Im v_i)]`;
/// reduced rows whose scaled-residual block is small are candidates.
/// Verification stays with the caller — anything returned here is a
/// numerical suggestion only.
pub fn relation_candidates(vals: &[Cf], scale_bits: i64, height: &BigInt) -> Vec<Vec<BigInt>> {
    let n = vals.len();
    let scale = Bf::pow2(scale_bits);
    let prec = (scale_bits + 64) as u32;
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for (i, v) in vals.iter().enumerate() {
        let mut row = vec![BigInt::zero(); n + 2];
        row[i] = BigInt::one();
        row[n] = v.re.mul(&scale, prec).round_int().0;
        row[n + 1] = v.im.mul(&scale, prec).round_int().0;
        rows.push(row);
    }
    lll_exact(&mut rows);
    let mut out = Vec::new();
    // accept rows whose residual columns are tiny relative to the scale and
    // whose coefficients stay below the height bound
    let resid_cap = BigInt::one() << ((scale_bits / 2).max(8) as u64);
    for row in rows {
        let coeffs: Vec<BigInt> = row[..n].to_vec();
        if coeffs.iter().all(|c| c.is_zero()) {
            continue;
        }
        if coeffs.iter().any(|c| c.abs() > *height) {
            continue;
        }
        if row[n].abs() < resid_cap && row[n + 1].abs() < resid_cap {
            out.push(coeffs);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn f64_reduction_shortens_basis() {
        let mut rows = vec![vec![201.0, 37.0], vec![1648.0, 297.0]];
        let mut coords = vec![
            vec![BigInt::one(), BigInt::zero()],
            vec![BigInt::zero(), BigInt::one()],
        ];
        lll_f64(&mut rows, &mut coords, 0.99);
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(norm(&rows[0]) < 50.0, "first vector should shrink");
        // coordinate bookkeeping stays consistent: row = c0·b0 + c1·b1
        for (row, c) in rows.iter().zip(&coords) {
            let c0 = c[0].to_f64().unwrap();
            let c1 = c[1].to_f64().unwrap();
            let rec = [c0 * 201.0 + c1 * 1648.0, c0 * 37.0 + c1 * 297.0];
            assert!((rec[0] - row[0]).abs() < 1e-6 && (rec[1] - row[1]).abs() < 1e-6);
        }
    }

    #[test]
    fn exact_reduction_finds_short_vector() {
        let mut rows = vec![
            vec![BigInt::from(1), BigInt::from(0), BigInt::from(12345)],
            vec![BigInt::from(0), BigInt::from(1), BigInt::from(12344)],
        ];
        lll_exact(&mut rows);
        let shortest: i64 = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|c| (c * c).to_i64().unwrap_or(i64::MAX / 4))
                    .sum::<i64>()
            })
            .min()
            .unwrap();
        assert!(shortest <= 3, "{rows:?}");
    }

    #[test]
    fn relations_golden_ratio() {
        // phi satisfies phi² - phi - 1 = 0
        let prec = 192u32;
        let five = Bf::from_i64(5);
        let phi = Bf::from_i64(1)
            .add(&five.sqrt(prec), prec)
            .div(&Bf::from_i64(2), prec);
        let vals = vec![
            Cf::new(Bf::from_i64(1), Bf::zero()),
            Cf::new(phi.clone(), Bf::zero()),
            Cf::new(phi.mul(&phi, prec), Bf::zero()),
        ];
        let cands = relation_candidates(&vals, 150, &BigInt::from(100));
        let hit = cands.iter().any(|c| {
            (c[0] == BigInt::from(1) && c[1] == BigInt::from(1) && c[2] == BigInt::from(-1))
                || (c[0] == BigInt::from(-1)
                    && c[1] == BigInt::from(-1)
                    && c[2] == BigInt::from(1))
        });
        assert!(hit, "missed the minimal polynomial relation: {cands:?}");
    }

    #[test]
    fn no_fake_relations_for_independents() {
        // 1 and sqrt(2) admit no small integer relation
        let prec = 192u32;
        let vals = vec![
            Cf::new(Bf::from_i64(1), Bf::zero()),
            Cf::new(Bf::from_i64(2).sqrt(prec), Bf::zero()),
        ];
        let cands = relation_candidates(&vals, 150, &BigInt::from(1_000_000));
        assert!(cands.is_empty(), "spurious relation: {cands:?}");
    }
}
