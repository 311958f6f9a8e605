//! Smooth compactly supported bump weights and the weighted representation
//! counts ω_z(m) = Σ_{F_z(x₁,x₂)=m} g₁(x₁)g₂(x₂).
//!
//! The bump is the standard profile exp(−1/(1−(t/R)²)) scaled to peak value
//! 1. Derivatives up to order 4 come from forward-mode jets (no symbolic
//! differentiation, no finite-difference noise); Fourier values are
//! adaptive-Simpson quadratures, memoized on a quantized (R, u) grid.

use num_complex::Complex64;
use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::sync::Mutex;

use crate::error::{CoreError, Result};
use crate::normform::NormForm;

// ---------------------------------------------------------------------------
// order-4 jets
// ---------------------------------------------------------------------------

/// Value and derivatives up to order 4 at a point.
#[derive(Clone, Copy, Debug)]
struct Jet {
    d: [f64; 5],
}

impl Jet {
    fn constant(v: f64) -> Self {
        Jet { d: [v, 0.0, 0.0, 0.0, 0.0] }
    }

    fn var(t: f64) -> Self {
        Jet { d: [t, 1.0, 0.0, 0.0, 0.0] }
    }

    fn sub_from(c: f64, a: Jet) -> Self {
        let mut d = [0.0; 5];
        d[0] = c - a.d[0];
        for k in 1..5 {
            d[k] = -a.d[k];
        }
        Jet { d }
    }

    fn mul(a: Jet, b: Jet) -> Self {
        const BINOM: [[f64; 5]; 5] = [
            [1.0, 0.0, 0.0, 0.0, 0.0],
            [1.0, 1.0, 0.0, 0.0, 0.0],
            [1.0, 2.0, 1.0, 0.0, 0.0],
            [1.0, 3.0, 3.0, 1.0, 0.0],
            [1.0, 4.0, 6.0, 4.0, 1.0],
        ];
        let mut d = [0.0; 5];
        for k in 0..5 {
            let mut acc = 0.0;
            for j in 0..=k {
                acc += BINOM[k][j] * a.d[j] * b.d[k - j];
            }
            d[k] = acc;
        }
        Jet { d }
    }

    /// a/b via (a − Σ_{j<k} C(k,j) f^(j) b^(k−j)) / b.
    fn div(a: Jet, b: Jet) -> Self {
        const BINOM: [[f64; 5]; 5] = [
            [1.0, 0.0, 0.0, 0.0, 0.0],
            [1.0, 1.0, 0.0, 0.0, 0.0],
            [1.0, 2.0, 1.0, 0.0, 0.0],
            [1.0, 3.0, 3.0, 1.0, 0.0],
            [1.0, 4.0, 6.0, 4.0, 1.0],
        ];
        let mut f = [0.0; 5];
        for k in 0..5 {
            let mut acc = a.d[k];
            for j in 0..k {
                acc -= BINOM[k][j] * f[j] * b.d[k - j];
            }
            f[k] = acc / b.d[0];
        }
        Jet { d: f }
    }

    /// exp(g) via f^(k) = Σ_{j<k} C(k−1, j) g^(k−j) f^(j).
    fn exp(g: Jet) -> Self {
        const BINOM: [[f64; 4]; 4] = [
            [1.0, 0.0, 0.0, 0.0],
            [1.0, 1.0, 0.0, 0.0],
            [1.0, 2.0, 1.0, 0.0],
            [1.0, 3.0, 3.0, 1.0],
        ];
        let mut f = [0.0; 5];
        f[0] = g.d[0].exp();
        for k in 1..5 {
            let mut acc = 0.0;
            for j in 0..k {
                acc += BINOM[k - 1][j] * g.d[k - j] * f[j];
            }
            f[k] = acc;
        }
        Jet { d: f }
    }
}

// ---------------------------------------------------------------------------
// smooth bump
// ---------------------------------------------------------------------------

/// Compactly supported smooth bump on [−R, R] with peak value 1:
/// g(t) = exp(1 − 1/(1−(t/R)²)) for |t| < R, zero outside.
#[derive(Clone, Debug)]
pub struct SmoothWeight {
    pub radius: f64,
}

static FOURIER_MEMO: Mutex<Option<HashMap<(u64, i128), (f64, f64)>>> = Mutex::new(None);

impl SmoothWeight {
    pub fn new(radius: f64) -> Self {
        assert!(radius > 0.0, "bump radius must be positive");
        SmoothWeight { radius }
    }

    pub fn value(&self, t: f64) -> f64 {
        let u = t / self.radius;
        if u.abs() >= 1.0 {
            return 0.0;
        }
        (1.0 - 1.0 / (1.0 - u * u)).exp()
    }

    /// k-th derivative, k ≤ 4, by forward-mode jets.
    pub fn deriv(&self, t: f64, k: usize) -> f64 {
        assert!(k <= 4, "derivatives certified up to order 4 only");
        let u = t / self.radius;
        if u.abs() >= 1.0 {
            return 0.0;
        }
        let uj = Jet::var(u);
        let w = Jet::sub_from(1.0, Jet::mul(uj, uj)); // 1 − u²
        let inv = Jet::div(Jet::constant(1.0), w);
        let h = Jet::sub_from(1.0, inv); // 1 − 1/(1−u²)
        let g = Jet::exp(h);
        // d^k/dt^k = R^{−k} d^k/du^k
        g.d[k] / self.radius.powi(k as i32)
    }

    /// ĝ(u) = ∫ g(t)·e(−ut) dt with e(x) = e^(2πix), by adaptive Simpson
    /// quadrature to an absolute error target of 1e-9·R; memoized.
    pub fn fourier(&self, u: f64) -> Result<Complex64> {
        let key = (self.radius.to_bits(), quantize(u));
        {
            let memo = FOURIER_MEMO.lock().unwrap();
            if let Some(map) = memo.as_ref() {
                if let Some(&(re, im)) = map.get(&key) {
                    return Ok(Complex64::new(re, im));
                }
            }
        }
        let target = 1e-9 * self.radius;
        let r = self.radius;
        let real = adaptive_simpson(
            &|t| self.value(t) * (2.0 * PI * u * t).cos(),
            -r,
            r,
            target / 2.0,
        )?;
        let imag = if u == 0.0 {
            0.0
        } else {
            -adaptive_simpson(
                &|t| self.value(t) * (2.0 * PI * u * t).sin(),
                -r,
                r,
                target / 2.0,
            )?
        };
        let val = Complex64::new(real, imag);
        let mut memo = FOURIER_MEMO.lock().unwrap();
        memo.get_or_insert_with(HashMap::new).insert(key, (real, imag));
        Ok(val)
    }

    /// All transform values ĝ(u/r) for u = 0..=u_max in one padded-FFT
    /// pass: trapezoid sums of a smooth compactly supported function are
    /// exact up to aliasing at the grid Nyquist frequency, which sits deep
    /// in the superpolynomial decay zone for the chosen sampling density.
    /// Negative u follows from ĝ(−u) = conj(ĝ(u)).
    pub fn fourier_grid(&self, r: u64, u_max: usize) -> Vec<Complex64> {
        use crate::fft::fft_pow2;
        let r_f = r as f64;
        let radius = self.radius;
        // window = L·r so that u/r lands exactly on grid bins
        let l = ((2.0 * radius + 2.0) / r_f).ceil().max(1.0) as usize;
        let w = l as f64 * r_f;
        // sampling density: Nyquist at ξ·R ≳ 1200 where the transform is
        // numerically dead
        let min_m = (w * 1200.0 / radius).max(4096.0);
        let mut m = 4096usize;
        while (m as f64) < min_m {
            m *= 2;
        }
        // also keep the requested range inside the usable half-spectrum
        while u_max * l >= m / 2 {
            m *= 2;
        }
        let h = w / m as f64;
        let mut samples: Vec<Complex64> = (0..m)
            .map(|j| {
                let t = -w / 2.0 + j as f64 * h;
                Complex64::new(self.value(t), 0.0)
            })
            .collect();
        fft_pow2(&mut samples, false);
        (0..=u_max)
            .map(|u| {
                let bin = u * l;
                let sign = if bin % 2 == 0 { 1.0 } else { -1.0 };
                samples[bin] * h * sign
            })
            .collect()
    }

    /// Measured sup over a dense grid of |g^(k)|·R^k (the derivative-decay
    /// constants; k ≤ 4).
    pub fn deriv_constant(&self, k: usize, grid: usize) -> f64 {
        let mut best: f64 = 0.0;
        for i in 0..=grid {
            let t = -self.radius + 2.0 * self.radius * i as f64 / grid as f64;
            best = best.max(self.deriv(t, k).abs() * self.radius.powi(k as i32));
        }
        best
    }
}

fn quantize(u: f64) -> i128 {
    // 1e-12 grid; Fourier arguments here are rationals u/q well above it
    (u * 1e12).round() as i128
}

fn adaptive_simpson(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<f64> {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let m = 0.5 * (a + b);
        (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        floor: f64,
        depth: usize,
        err_acc: &mut f64,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let left = simpson(f, a, m);
        let right = simpson(f, m, b);
        let delta = left + right - whole;
        // the floor stops refinement once the Richardson defect reaches
        // double-precision noise; depth 0 accepts with the error booked
        if depth == 0 || delta.abs() <= (15.0 * tol).max(floor) {
            *err_acc += delta.abs() / 15.0;
            return left + right + delta / 15.0;
        }
        rec(f, a, m, left, tol / 2.0, floor, depth - 1, err_acc)
            + rec(f, m, b, right, tol / 2.0, floor, depth - 1, err_acc)
    }
    // seed with enough panels to see the oscillation
    let panels = 64;
    let noise_floor = 1e-15 * (b - a).abs();
    let mut total = 0.0;
    let mut err_acc = 0.0;
    for i in 0..panels {
        let x0 = a + (b - a) * i as f64 / panels as f64;
        let x1 = a + (b - a) * (i + 1) as f64 / panels as f64;
        let whole = simpson(f, x0, x1);
        total += rec(
            f,
            x0,
            x1,
            whole,
            tol / panels as f64,
            noise_floor,
            16,
            &mut err_acc,
        );
    }
    if err_acc > tol * 4.0 {
        return Err(CoreError::QuadratureFail { target: tol, achieved: err_acc });
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// weighted representation counts
// ---------------------------------------------------------------------------

/// Finite weighted sequence m ↦ ω(m) with bookkeeping for the sieve
/// estimators. Norm-form sequences and toy sequences share this shape.
#[derive(Clone, Debug, Default)]
pub struct WeightTable {
    pub map: BTreeMap<i128, f64>,
    pub mass: f64,
    pub max_abs_value: i128,
}

impl WeightTable {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (i128, f64)>) -> Self {
        let mut map = BTreeMap::new();
        for (m, w) in pairs {
            if w != 0.0 {
                *map.entry(m).or_insert(0.0) += w;
            }
        }
        let mass = map.values().sum();
        let max_abs_value = map.keys().map(|m| m.abs()).max().unwrap_or(0);
        WeightTable { map, mass, max_abs_value }
    }

    pub fn omega(&self, m: i128) -> f64 {
        self.map.get(&m).copied().unwrap_or(0.0)
    }

    /// Σ over perfect-square values ω(k²).
    pub fn square_mass(&self) -> f64 {
        self.map
            .iter()
            .filter(|(m, _)| {
                **m >= 0 && {
                    let r = (**m as f64).sqrt().round() as i128;
                    (r - 1..=r + 1).any(|c| c >= 0 && c * c == **m)
                }
            })
            .map(|(_, w)| w)
            .sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,omega\n");
        for (m, w) in &self.map {
            out.push_str(&format!("{m},{w}\n"));
        }
        out
    }
}

/// Smoothly weighted representation counts for a norm form: radii
/// R₁ = D^(1/n), R₂ = D^(1/n−δ₂) by construction upstream.
#[derive(Clone, Debug)]
pub struct WeightSequence {
    pub form: NormForm,
    pub g1: SmoothWeight,
    pub g2: SmoothWeight,
    pub table: WeightTable,
}

impl WeightSequence {
    /// Exact enumeration of ω over the integer box supporting g₁ × g₂.
    pub fn build(form: NormForm, g1: SmoothWeight, g2: SmoothWeight) -> Result<Self> {
        let b1 = g1.radius.floor() as i128;
        let b2 = g2.radius.floor() as i128;
        let mut pairs: Vec<(i128, f64)> = Vec::new();
        for x2 in -b2..=b2 {
            let w2 = g2.value(x2 as f64);
            if w2 == 0.0 {
                continue;
            }
            for x1 in -b1..=b1 {
                let w1 = g1.value(x1 as f64);
                if w1 == 0.0 {
                    continue;
                }
                let m = form.eval_i128(x1, x2).ok_or_else(|| CoreError::TooLarge {
                    detail: "norm-form value exceeds i128 in weight enumeration".into(),
                })?;
                pairs.push((m, w1 * w2));
            }
        }
        Ok(WeightSequence { form, g1, g2, table: WeightTable::from_pairs(pairs) })
    }

    pub fn omega(&self, m: i128) -> f64 {
        self.table.omega(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calib;
    use crate::field::{build_field, ReduceParams};
    use crate::normform::{build_form, ShiftVector};
    use crate::poly::IPoly;

    #[test]
    fn bump_support_and_peak() {
        for r in [1.0, 8.0, 100.0] {
            let g = SmoothWeight::new(r);
            assert_eq!(g.value(r), 0.0);
            assert_eq!(g.value(-r), 0.0);
            assert_eq!(g.value(r + 0.5), 0.0);
            assert!((g.value(0.0) - 1.0).abs() < 1e-15);
            assert!(g.value(0.5 * r) > 0.0);
        }
    }

    #[test]
    fn jet_derivatives_match_finite_differences() {
        let g = SmoothWeight::new(3.0);
        let h = 1e-5;
        for &t in &[0.3, 1.0, 1.9, -2.2] {
            let fd1 = (g.value(t + h) - g.value(t - h)) / (2.0 * h);
            assert!((g.deriv(t, 1) - fd1).abs() < 1e-6, "t={t}");
            let fd2 = (g.value(t + h) - 2.0 * g.value(t) + g.value(t - h)) / (h * h);
            assert!((g.deriv(t, 2) - fd2).abs() < 1e-3 * fd2.abs().max(1.0), "t={t}");
        }
    }

    #[test]
    fn derivative_constants_uniform_across_radii() {
        // |g^(k)|·R^k has the same sup for all R (pure scaling); the k = 1
        // constant is the frozen 2.2 (measured ≈ 2.17)
        let base: Vec<f64> = (1..=4)
            .map(|k| SmoothWeight::new(1.0).deriv_constant(k, 4000))
            .collect();
        assert!(base[0] < calib::BUMP_DERIV_C1 && base[0] > 2.0, "C1 = {}", base[0]);
        for r in [0.5, 5.0, 500.0] {
            let g = SmoothWeight::new(r);
            for (k, b) in base.iter().enumerate() {
                let c = g.deriv_constant(k + 1, 4000);
                assert!(
                    (c - b).abs() < 1e-6 * b.max(1.0),
                    "k={} R={r}: {c} vs {b}",
                    k + 1
                );
            }
        }
    }


    #[test]
    fn fourier_grid_matches_quadrature() {
        let g = SmoothWeight::new(1.515716566510398);
        let r = 21u64;
        let grid = g.fourier_grid(r, 400);
        for &u in &[0usize, 1, 3, 10, 47, 100, 300] {
            let direct = g.fourier(u as f64 / r as f64).unwrap();
            let dg = grid[u];
            // agreement limited by the pointwise quadrature's error target
            assert!(
                (direct - dg).norm() < (1e-8 * direct.norm()).max(3e-12 * g.radius),
                "u={u}: {direct} vs {dg}"
            );
        }
    }

    #[test]
    fn fourier_symmetry_and_zero_value() {
        let g = SmoothWeight::new(4.0);
        // ĝ(0) = ∫g ∈ (0, 2R)
        let z = g.fourier(0.0).unwrap();
        assert!(z.im == 0.0 && z.re > 0.0 && z.re < 8.0);
        // conjugate symmetry for real g
        for &u in &[0.3, 1.7, 5.0] {
            let a = g.fourier(u).unwrap();
            let b = g.fourier(-u).unwrap();
            assert!((a.conj() - b).norm() < 1e-8);
        }
    }

    #[test]
    fn fourier_decay_constant() {
        // |ĝ(u)|·(1+|u|R)²/R bounded by the frozen constant, uniformly in R
        for r in [2.0, 20.0] {
            let g = SmoothWeight::new(r);
            let mut worst: f64 = 0.0;
            for i in 0..=60 {
                let u = i as f64 * 0.25 / r * 3.0;
                let v = g.fourier(u).unwrap().norm();
                worst = worst.max(v * (1.0 + u.abs() * r).powi(2) / r);
            }
            assert!(
                worst <= calib::BUMP_FOURIER_C,
                "decay constant {worst} exceeds frozen {}",
                calib::BUMP_FOURIER_C
            );
        }
    }

    #[test]
    fn poisson_sanity_on_integers() {
        // Σ_{x∈Z} g(x) = Σ_{u∈Z} ĝ(u); both sides converge fast
        let g = SmoothWeight::new(6.5);
        let direct: f64 = (-7..=7).map(|x| g.value(x as f64)).sum();
        let mut dual = 0.0;
        for u in -40..=40 {
            dual += g.fourier(u as f64).unwrap().re;
        }
        assert!((direct - dual).abs() < 1e-6, "{direct} vs {dual}");
    }

    fn quintic_sequence(z: Vec<i64>) -> WeightSequence {
        let k = build_field(&IPoly::from_i64(&[-2, 0, 0, 0, 0, 1]), None).unwrap();
        let rb = k.reduce_basis(&ReduceParams::default()).unwrap();
        let ln_d = crate::field::bigint_ln(&k.d_k);
        let r1 = (ln_d / 5.0).exp();
        let r2 = ((1.0 / 5.0 - rb.delta2()) * ln_d).exp();
        let form = build_form(&k, &rb, &ShiftVector::new(z));
        WeightSequence::build(form, SmoothWeight::new(r1), SmoothWeight::new(r2)).unwrap()
    }

    #[test]
    fn omega_zero_law() {
        // z = 0: ω(0) = g₁(0)g₂(0) = 1; z ≠ 0: ω(0) = 0 (norms vanish only at 0)
        let w0 = quintic_sequence(vec![0, 0, 0]);
        assert!((w0.omega(0) - 1.0).abs() < 1e-12);
        let wz = quintic_sequence(vec![1, 0, 0]);
        assert_eq!(wz.omega(0), 0.0);
    }

    #[test]
    fn omega_mass_identity_and_support() {
        let w = quintic_sequence(vec![1, 0, -1]);
        let b1 = w.g1.radius.floor() as i128;
        let b2 = w.g2.radius.floor() as i128;
        let mass1: f64 = (-b1..=b1).map(|x| w.g1.value(x as f64)).sum();
        let mass2: f64 = (-b2..=b2).map(|x| w.g2.value(x as f64)).sum();
        let total: f64 = w.table.map.values().sum();
        assert!((total - mass1 * mass2).abs() < 1e-9 * total.max(1.0));
        // support bound: ω(m) = 0 beyond the max box value
        assert!(w.table.max_abs_value <= {
            // crude bound: evaluate on the box corners and take the max+1
            let mut mx = 0i128;
            for &x1 in &[-b1, b1] {
                for &x2 in &[-b2, b2] {
                    mx = mx.max(w.form.eval_i128(x1, x2).unwrap().abs());
                }
            }
            mx.max(w.table.max_abs_value)
        });
    }
}
