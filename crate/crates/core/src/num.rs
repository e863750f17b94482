//! Scalar types shared across the crate: exact rationals, complex doubles,
//! and the [`Scalar`] trait that lets the algebraic evaluators run on either.

use num::complex::Complex64;
use num::{BigInt, BigRational, FromPrimitive, One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

/// Exact rational number used for all symbolic coefficients.
pub type Rat = BigRational;

/// Build a rational from a signed numerator/denominator pair.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Build an integer rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_zero() -> Rat {
    Rat::zero()
}

pub fn rat_one() -> Rat {
    Rat::one()
}

/// n! as an exact rational.
pub fn factorial(n: u32) -> Rat {
    let mut r = BigInt::one();
    for k in 2..=n as u64 {
        r *= k;
    }
    Rat::from_integer(r)
}

/// (2n-1)!! = 1*3*5*...*(2n-1).
pub fn double_factorial_odd(n: u32) -> Rat {
    let mut r = BigInt::one();
    for k in 0..n as u64 {
        r *= 2 * k + 1;
    }
    Rat::from_integer(r)
}

/// Rising factorial (u)_k = u(u+1)...(u+k-1).
pub fn pochhammer(u: &Rat, k: u32) -> Rat {
    let mut r = Rat::one();
    for i in 0..k {
        r *= u + rat_int(i as i64);
    }
    r
}

/// Render a rational as `p/q`, or just `p` when the denominator is one.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse `p/q` or a plain integer string.
pub fn rat_from_str(s: &str) -> Result<Rat, String> {
    Rat::from_str(s.trim()).map_err(|e| format!("invalid rational {s:?}: {e}"))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Common interface for the two coefficient fields the evaluators run over:
/// exact rationals and complex doubles.  Algebraic routes stay exact when all
/// inputs are rational and fall back to `Complex64` otherwise.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
    + Send
    + Sync
    + 'static
{
    fn from_rat(r: &Rat) -> Self;

    /// Integer power; `k < 0` requires a nonzero base.
    fn powi(&self, k: i64) -> Self {
        let mut base = if k < 0 {
            Self::one() / self.clone()
        } else {
            self.clone()
        };
        let mut e = k.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

    /// Approximate magnitude, used only for convergence diagnostics.
    fn abs_f64(&self) -> f64;
}

impl Scalar for Rat {
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }
    fn abs_f64(&self) -> f64 {
        rat_to_f64(&self.abs())
    }
}

impl Scalar for Complex64 {
    fn from_rat(r: &Rat) -> Self {
        Complex64::new(rat_to_f64(r), 0.0)
    }
    fn abs_f64(&self) -> f64 {
        self.norm()
    }
}

/// Exact positive rational Jack parameter alpha = 2/beta.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlphaParam(Rat);

impl AlphaParam {
    /// Rejects non-positive values.
    pub fn new(value: Rat) -> Result<Self, String> {
        if value <= Rat::zero() {
            return Err(format!("alpha must be positive, got {}", rat_to_string(&value)));
        }
        Ok(AlphaParam(value))
    }

    pub fn from_parts(num: i64, den: i64) -> Self {
        AlphaParam::new(rat(num, den)).expect("positive rational required")
    }

    /// alpha = 2/beta.
    pub fn from_beta(beta: &Rat) -> Result<Self, String> {
        AlphaParam::new(rat_int(2) / beta.clone())
    }

    pub fn value(&self) -> &Rat {
        &self.0
    }

    pub fn inverse(&self) -> AlphaParam {
        AlphaParam(Rat::one() / self.0.clone())
    }

    /// beta = 2/alpha.
    pub fn beta(&self) -> Rat {
        rat_int(2) / self.0.clone()
    }

    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.0)
    }
}

impl fmt::Display for AlphaParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&rat_to_string(&self.0))
    }
}

impl fmt::Debug for AlphaParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "alpha={self}")
    }
}

/// A point value as it appears in queries: exact rational or complex double.
#[derive(Clone, Debug, PartialEq)]
pub enum PointVal {
    Rat(Rat),
    Complex(Complex64),
}

impl PointVal {
    pub fn to_complex(&self) -> Complex64 {
        match self {
            PointVal::Rat(r) => Complex64::new(rat_to_f64(r), 0.0),
            PointVal::Complex(c) => *c,
        }
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            PointVal::Rat(r) => Some(r),
            PointVal::Complex(_) => None,
        }
    }

    pub fn modulus(&self) -> f64 {
        self.to_complex().norm()
    }

    pub fn is_zero(&self) -> bool {
        match self {
            PointVal::Rat(r) => Zero::is_zero(r),
            PointVal::Complex(c) => c.re == 0.0 && c.im == 0.0,
        }
    }

    /// Strict |.| < 1 check, exact on rationals.
    pub fn in_open_disc(&self) -> bool {
        match self {
            PointVal::Rat(r) => r.abs() < Rat::one(),
            PointVal::Complex(c) => c.norm() < 1.0,
        }
    }

    pub fn from_f64(x: f64) -> Self {
        PointVal::Complex(Complex64::new(x, 0.0))
    }
}

impl From<Rat> for PointVal {
    fn from(r: Rat) -> Self {
        PointVal::Rat(r)
    }
}

/// Exact inverse for rationals, complex inverse otherwise.
pub fn point_inverse(p: &PointVal) -> PointVal {
    match p {
        PointVal::Rat(r) => PointVal::Rat(Rat::one() / r.clone()),
        PointVal::Complex(c) => PointVal::Complex(Complex64::new(1.0, 0.0) / c),
    }
}

pub fn point_neg(p: &PointVal) -> PointVal {
    match p {
        PointVal::Rat(r) => PointVal::Rat(-r.clone()),
        PointVal::Complex(c) => PointVal::Complex(-c),
    }
}

/// True when every point in every slice is rational.
pub fn all_rational(lists: &[&[PointVal]]) -> bool {
    lists
        .iter()
        .all(|l| l.iter().all(|p| matches!(p, PointVal::Rat(_))))
}

pub fn to_rat_vec(list: &[PointVal]) -> Vec<Rat> {
    list.iter()
        .map(|p| p.as_rat().expect("rational point expected").clone())
        .collect()
}

pub fn to_complex_vec(list: &[PointVal]) -> Vec<Complex64> {
    list.iter().map(|p| p.to_complex()).collect()
}

/// Compensated (Kahan) accumulator for long float sums.
#[derive(Clone, Copy, Default)]
pub struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    pub fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Kahan accumulator over complex values.
#[derive(Clone, Copy, Default)]
pub struct KahanC {
    re: Kahan,
    im: Kahan,
}

impl KahanC {
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

pub fn rat_from_f64_approx(x: f64) -> Option<Rat> {
    Rat::from_f64(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_string_round_trip() {
        let r = rat(-3, 4);
        assert_eq!(rat_to_string(&r), "-3/4");
        assert_eq!(rat_from_str("-3/4").unwrap(), r);
        assert_eq!(rat_to_string(&rat_int(7)), "7");
        assert_eq!(rat_from_str("7").unwrap(), rat_int(7));
    }

    #[test]
    fn scalar_powi_matches_rationals() {
        let r = rat(2, 3);
        assert_eq!(Scalar::powi(&r, 3), rat(8, 27));
        assert_eq!(Scalar::powi(&r, -2), rat(9, 4));
        assert_eq!(Scalar::powi(&r, 0), rat_one());
    }

    #[test]
    fn pochhammer_small() {
        assert_eq!(pochhammer(&rat_int(2), 3), rat_int(24));
        assert_eq!(pochhammer(&rat(1, 2), 2), rat(3, 4));
        assert_eq!(pochhammer(&rat_int(5), 0), rat_one());
    }

    #[test]
    fn double_factorial_values() {
        assert_eq!(double_factorial_odd(0), rat_int(1));
        assert_eq!(double_factorial_odd(3), rat_int(15));
    }
}
