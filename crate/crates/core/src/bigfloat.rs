//! Arbitrary-precision dyadic floating point.
//!
//! A value is `m · 2^e` with a `BigInt` mantissa. Arithmetic is
//! exact-then-rounded: every operation computes the exact dyadic result and
//! rounds the mantissa to the requested precision, so a single operation at
//! precision `prec` has relative error at most `2^(1-prec)`. There is no
//! interval tracking; callers run with a precision budget that dominates
//! their operation count (all certification sites in this crate use
//! hundreds of guard bits for products of at most a few hundred factors).
//!
//! Only the operations the lab needs exist: field operations, square root,
//! comparisons, conversions, and a complex wrapper for root refinement.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Dyadic float `mantissa · 2^exp`. Zero is `(0, 0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bf {
    m: BigInt,
    e: i64,
}

impl Bf {
    pub fn zero() -> Self {
        Bf { m: BigInt::zero(), e: 0 }
    }

    pub fn from_i64(v: i64) -> Self {
        Bf { m: BigInt::from(v), e: 0 }
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        Bf { m: v.clone(), e: 0 }
    }

    pub fn from_f64(v: f64) -> Self {
        assert!(v.is_finite(), "cannot lift non-finite f64");
        if v == 0.0 {
            return Bf::zero();
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let exp_raw = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if exp_raw == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp_raw - 1075)
        };
        Bf {
            m: BigInt::from(sign * mant as i64),
            e: exp,
        }
    }

    pub fn from_ratio(r: &BigRational, prec: u32) -> Self {
        if r.is_zero() {
            return Bf::zero();
        }
        let num = Bf::from_bigint(r.numer());
        let den = Bf::from_bigint(r.denom());
        num.div(&den, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.m.is_negative()
    }

    fn mant_bits(&self) -> u64 {
        self.m.magnitude().bits()
    }

    /// Round the mantissa to at most `prec` bits (to nearest, ties away).
    pub fn round_prec(mut self, prec: u32) -> Self {
        let bits = self.mant_bits();
        if bits <= prec as u64 {
            return self;
        }
        let drop = (bits - prec as u64) as u64;
        let sign = self.m.sign();
        let mag = self.m.magnitude();
        let half = BigUint::from(1u8) << (drop - 1);
        let rounded = (mag + &half) >> drop;
        self.m = BigInt::from_biguint(sign, rounded);
        self.e += drop as i64;
        if self.m.is_zero() {
            self.e = 0;
        }
        self
    }

    pub fn neg(&self) -> Self {
        Bf { m: -self.m.clone(), e: self.e }
    }

    pub fn abs(&self) -> Self {
        Bf { m: self.m.abs(), e: self.e }
    }

    fn add_exact(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.e.min(other.e);
        let ma = &self.m << (self.e - e) as u64;
        let mb = &other.m << (other.e - e) as u64;
        Bf { m: ma + mb, e }
    }

    pub fn add(&self, other: &Self, prec: u32) -> Self {
        self.add_exact(other).round_prec(prec)
    }

    pub fn sub(&self, other: &Self, prec: u32) -> Self {
        self.add_exact(&other.neg()).round_prec(prec)
    }

    pub fn mul(&self, other: &Self, prec: u32) -> Self {
        Bf {
            m: &self.m * &other.m,
            e: self.e + other.e,
        }
        .round_prec(prec)
    }

    pub fn mul_i64(&self, k: i64, prec: u32) -> Self {
        Bf { m: &self.m * k, e: self.e }.round_prec(prec)
    }

    pub fn div(&self, other: &Self, prec: u32) -> Self {
        assert!(!other.is_zero(), "bigfloat division by zero");
        if self.is_zero() {
            return Bf::zero();
        }
        // scale numerator so the quotient keeps prec + 2 significant bits
        let shift = (prec as i64 + 2) + other.mant_bits() as i64 - self.mant_bits() as i64;
        let shift = shift.max(0) as u64;
        let num = &self.m << shift;
        let q = num / &other.m;
        Bf {
            m: q,
            e: self.e - other.e - shift as i64,
        }
        .round_prec(prec)
    }

    /// Square root of a non-negative value.
    pub fn sqrt(&self, prec: u32) -> Self {
        assert!(!self.is_negative(), "bigfloat sqrt of negative value");
        if self.is_zero() {
            return Bf::zero();
        }
        // bring to m·4^k with enough bits, take the integer square root
        let want = 2 * (prec as u64 + 2);
        let bits = self.mant_bits();
        let mut shift = want.saturating_sub(bits);
        if (self.e - shift as i64) % 2 != 0 {
            shift += 1;
        }
        let scaled: BigUint = self.m.magnitude() << shift;
        let root = scaled.sqrt();
        Bf {
            m: BigInt::from_biguint(Sign::Plus, root),
            e: (self.e - shift as i64) / 2,
        }
        .round_prec(prec)
    }

    /// Exact comparison.
    pub fn cmp_bf(&self, other: &Self) -> std::cmp::Ordering {
        let d = self.add_exact(&other.neg());
        if d.m.is_zero() {
            std::cmp::Ordering::Equal
        } else if d.m.is_negative() {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    }

    pub fn lt(&self, other: &Self) -> bool {
        self.cmp_bf(other) == std::cmp::Ordering::Less
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant_bits();
        let (top, extra_exp) = if bits > 63 {
            let drop = bits - 63;
            let mag: BigUint = self.m.magnitude() >> drop;
            (mag.to_u64_digits()[0], drop as i64)
        } else {
            (self.m.magnitude().to_u64_digits()[0], 0)
        };
        let sign = if self.m.is_negative() { -1.0 } else { 1.0 };
        let exp = self.e + extra_exp;
        sign * top as f64 * (exp as f64).exp2()
    }

    /// Nearest integer together with the exact absolute rounding defect.
    pub fn round_int(&self) -> (BigInt, Bf) {
        if self.e >= 0 {
            return (&self.m << self.e as u64, Bf::zero());
        }
        let drop = (-self.e) as u64;
        let sign = self.m.sign();
        let mag = self.m.magnitude();
        let half = BigUint::from(1u8) << (drop - 1);
        let q = (mag + &half) >> drop;
        let int = BigInt::from_biguint(sign, q);
        let defect = self.add_exact(&Bf::from_bigint(&int).neg());
        (int, defect.abs())
    }

    /// `2^k` as an exact value.
    pub fn pow2(k: i64) -> Self {
        Bf { m: BigInt::from(1), e: k }
    }
}

/// Complex number over [`Bf`].
#[derive(Clone, Debug)]
pub struct Cf {
    pub re: Bf,
    pub im: Bf,
}

impl Cf {
    pub fn new(re: Bf, im: Bf) -> Self {
        Cf { re, im }
    }

    pub fn zero() -> Self {
        Cf { re: Bf::zero(), im: Bf::zero() }
    }

    pub fn from_f64(re: f64, im: f64) -> Self {
        Cf { re: Bf::from_f64(re), im: Bf::from_f64(im) }
    }

    pub fn add(&self, o: &Self, prec: u32) -> Self {
        Cf { re: self.re.add(&o.re, prec), im: self.im.add(&o.im, prec) }
    }

    pub fn sub(&self, o: &Self, prec: u32) -> Self {
        Cf { re: self.re.sub(&o.re, prec), im: self.im.sub(&o.im, prec) }
    }

    pub fn mul(&self, o: &Self, prec: u32) -> Self {
        let re = self.re.mul(&o.re, prec).sub(&self.im.mul(&o.im, prec), prec);
        let im = self.re.mul(&o.im, prec).add(&self.im.mul(&o.re, prec), prec);
        Cf { re, im }
    }

    pub fn scale(&self, k: &Bf, prec: u32) -> Self {
        Cf { re: self.re.mul(k, prec), im: self.im.mul(k, prec) }
    }

    pub fn div(&self, o: &Self, prec: u32) -> Self {
        let den = o.norm_sqr(prec);
        let num = self.mul(&o.conj(), prec);
        Cf { re: num.re.div(&den, prec), im: num.im.div(&den, prec) }
    }

    pub fn conj(&self) -> Self {
        Cf { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn norm_sqr(&self, prec: u32) -> Bf {
        self.re.mul(&self.re, prec).add(&self.im.mul(&self.im, prec), prec)
    }

    pub fn abs(&self, prec: u32) -> Bf {
        self.norm_sqr(prec).sqrt(prec)
    }

    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn f64_round_trips() {
        for v in [0.0, 1.0, -1.5, 0.1, 1e300, -3.25e-200, std::f64::consts::PI] {
            let bf = Bf::from_f64(v);
            assert_eq!(bf.to_f64(), v, "round trip of {v}");
        }
    }

    #[test]
    fn arithmetic_matches_f64_at_high_precision() {
        let a = Bf::from_f64(1.25);
        let b = Bf::from_f64(-0.75);
        assert_eq!(a.add(&b, 128).to_f64(), 0.5);
        assert_eq!(a.mul(&b, 128).to_f64(), -0.9375);
        assert_eq!(a.sub(&b, 128).to_f64(), 2.0);
        let q = a.div(&b, 128).to_f64();
        assert!((q - (1.25 / -0.75)).abs() < 1e-15);
    }

    #[test]
    fn sqrt_squares_back() {
        let x = Bf::from_f64(2.0);
        let r = x.sqrt(200);
        let back = r.mul(&r, 200);
        let err = back.sub(&x, 200).abs();
        assert!(err.lt(&Bf::pow2(-190)));
    }

    #[test]
    fn division_precision_is_deep() {
        // 1/3 at 300 bits, times 3, within 2^-290 of 1
        let one = Bf::from_i64(1);
        let three = Bf::from_i64(3);
        let t = one.div(&three, 300);
        let back = t.mul(&three, 300);
        let err = back.sub(&one, 300).abs();
        assert!(err.lt(&Bf::pow2(-290)));
    }

    #[test]
    fn round_int_extracts_certified_integers() {
        let x = Bf::from_f64(41.0 + 1.0 / 1024.0);
        let (int, defect) = x.round_int();
        assert_eq!(int, BigInt::from(41));
        assert_eq!(defect.to_f64(), 1.0 / 1024.0);
        let exact = Bf::from_i64(-7);
        let (i2, d2) = exact.round_int();
        assert_eq!(i2, BigInt::from(-7));
        assert!(d2.is_zero());
    }

    #[test]
    fn ratio_conversion() {
        let r = BigRational::new(BigInt::one(), BigInt::from(7));
        let bf = Bf::from_ratio(&r, 200);
        assert!((bf.to_f64() - 1.0 / 7.0).abs() < 1e-16);
    }

    #[test]
    fn complex_newton_step_reaches_root() {
        // refine sqrt(2) from a crude seed via Newton on z^2 - 2
        let prec = 256;
        let two = Cf::from_f64(2.0, 0.0);
        let mut z = Cf::from_f64(1.4, 0.0);
        for _ in 0..8 {
            let fz = z.mul(&z, prec).sub(&two, prec);
            let dfz = z.scale(&Bf::from_i64(2), prec);
            z = z.sub(&fz.div(&dfz, prec), prec);
        }
        let resid = z.mul(&z, prec).sub(&two, prec).abs(prec);
        assert!(resid.lt(&Bf::pow2(-200)));
    }
}
