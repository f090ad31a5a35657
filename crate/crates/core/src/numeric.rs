//! Small numeric helpers: double-double phases for large square roots and
//! serde adapters for complex numbers.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// 2π to double-double precision.
pub const TWO_PI: Dd = Dd {
    hi: 6.283_185_307_179_586,
    lo: 2.449_293_598_294_706_4e-16,
};

impl Dd {
    pub const fn new(hi: f64) -> Self {
        Self { hi, lo: 0.0 }
    }

    pub fn from_i128(n: i128) -> Self {
        let hi = n as f64;
        let lo = (n - hi as i128) as f64;
        let (hi, lo) = quick_two_sum(hi, lo);
        Self { hi, lo }
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let e = e + self.lo + o.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn mul_f64(self, b: f64) -> Dd {
        self.mul(Dd::new(b))
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    /// Square root of a non-negative integer, one Newton correction in
    /// double-double arithmetic.
    pub fn sqrt_int(n: u128) -> Dd {
        if n == 0 {
            return Dd::new(0.0);
        }
        let nd = Dd::from_i128(n as i128);
        let s = nd.hi.sqrt();
        let r = nd.sub(Dd::new(s).mul(Dd::new(s)));
        let (hi, lo) = quick_two_sum(s, r.to_f64() / (2.0 * s));
        Dd { hi, lo }
    }

    /// Square root of a non-negative double-double.
    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::new(0.0);
        }
        let s = self.hi.sqrt();
        let r = self.sub(Dd::new(s).mul(Dd::new(s)));
        let (hi, lo) = quick_two_sum(s, r.to_f64() / (2.0 * s));
        Dd { hi, lo }
    }

    /// `|x|₂^{1/2}` for an integer vector.
    pub fn sqrt_norm(v: &[i64]) -> Dd {
        match v {
            [n] => Dd::sqrt_int(n.unsigned_abs() as u128),
            _ => Dd::sqrt_int(norm2_sq(v)).sqrt(),
        }
    }

    /// Nearest integer to the value (ties away from zero).
    pub fn round_i128(self) -> i128 {
        let h = self.hi.round();
        let frac = Dd::new(h).neg().add(self).to_f64();
        h as i128 + frac.round() as i128
    }

    /// `(sin x, cos x)` after reduction modulo 2π in double-double, so that
    /// phases of order 1e8 keep ~1e-16 absolute accuracy.
    pub fn sin_cos(self) -> (f64, f64) {
        let k = (self.hi / TWO_PI.hi).round();
        let r = self.sub(TWO_PI.mul_f64(k));
        let (s, c) = r.hi.sin_cos();
        (s + r.lo * c, c - r.lo * s)
    }
}

/// Sum of squares of an integer vector, exact.
pub fn norm2_sq(v: &[i64]) -> u128 {
    v.iter().map(|&x| (x as i128 * x as i128) as u128).sum()
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: i64, b: i64) -> i64 {
    if a == 0 || b == 0 {
        return a.max(b);
    }
    a / gcd(a, b) * b
}

/// Complex number as either a bare real or `[re, im]`.
#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq)]
#[serde(untagged)]
pub enum ComplexRepr {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexRepr> for Complex64 {
    fn from(c: ComplexRepr) -> Self {
        match c {
            ComplexRepr::Real(r) => Complex64::new(r, 0.0),
            ComplexRepr::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

impl From<Complex64> for ComplexRepr {
    fn from(c: Complex64) -> Self {
        if c.im == 0.0 {
            ComplexRepr::Real(c.re)
        } else {
            ComplexRepr::Pair([c.re, c.im])
        }
    }
}

/// `#[serde(with = "cx")]` for a single complex value.
pub mod cx {
    use super::*;

    pub fn serialize<S: Serializer>(c: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        ComplexRepr::from(*c).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        ComplexRepr::deserialize(d).map(Into::into)
    }
}

/// `#[serde(with = "cx_vec")]` for a list of complex values.
pub mod cx_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|c| ComplexRepr::from(*c)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        Ok(Vec::<ComplexRepr>::deserialize(d)?.into_iter().map(Into::into).collect())
    }
}
