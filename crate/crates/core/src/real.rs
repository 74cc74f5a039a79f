//! Scalar abstraction shared by every numerical routine.
//!
//! All of the q-analysis in this crate is written once against [`Real`] and
//! instantiated for `f32`, `f64` and [`DoubleDouble`]. Integer and
//! half-integer powers are built here from multiplication and `sqrt`, which
//! is both faster and more accurate than going through `powf`.

use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use crate::dd::DoubleDouble;

/// Floating point scalar usable by the q-series routines.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Decimal digits the type carries reliably.
    const DIGITS: u32;

    /// Scientific notation with enough digits to round-trip the value.
    fn to_sci(self) -> String;

    /// Parses a decimal literal to the type's full accuracy.
    fn parse_decimal(s: &str) -> Option<Self> {
        s.trim().parse::<f64>().ok().map(lit)
    }
}

impl Real for f32 {
    const DIGITS: u32 = 6;

    fn to_sci(self) -> String {
        format!("{self:.8e}")
    }
}

impl Real for f64 {
    const DIGITS: u32 = 15;

    fn to_sci(self) -> String {
        format!("{self:.16e}")
    }
}

impl Real for DoubleDouble {
    const DIGITS: u32 = 31;

    fn to_sci(self) -> String {
        self.to_sci_string(32)
    }

    fn parse_decimal(s: &str) -> Option<Self> {
        s.parse().ok()
    }
}

/// Converts an `f64` literal into the scalar type.
#[inline]
pub fn lit<S: Real>(x: f64) -> S {
    S::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Converts an integer into the scalar type.
#[inline]
pub fn int<S: Real>(n: i64) -> S {
    S::from_i64(n).expect("integer representable in scalar type")
}

/// Lossy conversion used for reporting and for magnitude estimates.
#[inline]
pub fn to_f64<S: Real>(x: S) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `base^n` by binary exponentiation.
pub fn powi<S: Real>(base: S, n: i64) -> S {
    if n < 0 {
        return S::one() / powi(base, -n);
    }
    let mut result = S::one();
    let mut acc = base;
    let mut e = n as u64;
    while e > 0 {
        if e & 1 == 1 {
            result = result * acc;
        }
        e >>= 1;
        if e > 0 {
            acc = acc * acc;
        }
    }
    result
}

/// `base^(twice / 2)`, exact up to rounding for half-integer exponents.
pub fn pow_half<S: Real>(base: S, twice: i64) -> S {
    let whole = powi(base, twice.div_euclid(2));
    if twice.rem_euclid(2) == 1 {
        whole * base.sqrt()
    } else {
        whole
    }
}

/// `base^x` for real `x`. Integer and half-integer exponents avoid `powf`.
pub fn pow_real<S: Real>(base: S, x: S) -> S {
    let twice = x + x;
    if twice == twice.round() && twice.abs() < lit(1.0e9) {
        let t = twice.to_i64().expect("bounded exponent");
        pow_half(base, t)
    } else {
        base.powf(x)
    }
}

/// Ordinary binomial coefficient `n(n-1)/2` as a signed exponent.
#[inline]
pub fn choose2(n: i64) -> i64 {
    n * (n - 1) / 2
}

/// Neumaier's improved Kahan summation.
#[derive(Clone, Copy, Debug)]
pub struct CompensatedSum<S> {
    sum: S,
    compensation: S,
}

impl<S: Real> Default for CompensatedSum<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Real> CompensatedSum<S> {
    pub fn new() -> Self {
        Self {
            sum: S::zero(),
            compensation: S::zero(),
        }
    }

    pub fn add(&mut self, x: S) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation = self.compensation + ((self.sum - t) + x);
        } else {
            self.compensation = self.compensation + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> S {
        self.sum + self.compensation
    }
}

impl<S: Real> AddAssign<S> for CompensatedSum<S> {
    fn add_assign(&mut self, rhs: S) {
        self.add(rhs);
    }
}

impl<S: Real> FromIterator<S> for CompensatedSum<S> {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator.
pub fn compensated_sum<S: Real, I: IntoIterator<Item = S>>(iter: I) -> S {
    iter.into_iter().collect::<CompensatedSum<S>>().value()
}

/// A signed mantissa with a separate binary exponent: `mantissa * 2^exponent`.
///
/// Products such as `q^{-2 C(n,2)}` leave the double range long before the
/// polynomial values they feed do. Keeping the exponent apart lets those
/// factors be multiplied without underflow, and no digits are lost because
/// rescaling is by exact powers of two.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scaled<S> {
    mantissa: S,
    exponent: i64,
}

impl<S: Real> Scaled<S> {
    pub fn zero() -> Self {
        Self {
            mantissa: S::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        Self {
            mantissa: S::one(),
            exponent: 0,
        }
    }

    /// Wraps a finite scalar.
    pub fn new(x: S) -> Self {
        Self {
            mantissa: x,
            exponent: 0,
        }
        .normalized()
    }

    fn normalized(self) -> Self {
        let m = to_f64(self.mantissa);
        if m == 0.0 || !m.is_finite() {
            return Self {
                mantissa: self.mantissa,
                exponent: if m == 0.0 { 0 } else { self.exponent },
            };
        }
        let e = m.abs().log2().floor() as i64;
        if e == 0 {
            return self;
        }
        // Split the shift so subnormal mantissas do not overflow the factor.
        let half = -e / 2;
        Self {
            mantissa: self.mantissa * exp2_exact::<S>(half) * exp2_exact::<S>(-e - half),
            exponent: self.exponent + e,
        }
    }

    pub fn mantissa(&self) -> S {
        self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == S::zero()
    }

    pub fn signum(&self) -> S {
        if self.is_zero() {
            S::zero()
        } else {
            self.mantissa.signum()
        }
    }

    /// `log2 |x|`; `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            to_f64(self.mantissa.abs()).log2() + self.exponent as f64
        }
    }

    /// `base^n` kept in scaled form.
    pub fn powi(base: S, n: i64) -> Self {
        if n < 0 {
            return Self::one() / Self::powi(base, -n);
        }
        let mut result = Self::one();
        let mut acc = Self::new(base);
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result * acc;
            }
            e >>= 1;
            if e > 0 {
                acc = acc * acc;
            }
        }
        result
    }

    /// `base^(twice/2)` kept in scaled form.
    pub fn pow_half(base: S, twice: i64) -> Self {
        let whole = Self::powi(base, twice.div_euclid(2));
        if twice.rem_euclid(2) == 1 {
            whole * Self::new(base.sqrt())
        } else {
            whole
        }
    }

    /// Compensated sum of scaled terms, aligned to the largest exponent.
    pub fn sum(terms: &[Self]) -> Self {
        let top = terms
            .iter()
            .filter(|t| !t.is_zero())
            .map(|t| t.exponent)
            .max();
        let Some(top) = top else {
            return Self::zero();
        };
        let mut acc = CompensatedSum::new();
        for t in terms {
            let gap = top - t.exponent;
            if !t.is_zero() && gap <= 1000 {
                acc.add(t.mantissa * exp2_exact::<S>(-gap));
            }
        }
        Self {
            mantissa: acc.value(),
            exponent: top,
        }
        .normalized()
    }

    /// Back to the plain scalar. Values outside the range become `0` or `inf`.
    pub fn to_scalar(&self) -> S {
        if self.is_zero() {
            return S::zero();
        }
        // Split the scaling so that intermediate powers of two stay finite.
        let mut value = self.mantissa;
        let mut e = self.exponent;
        while e != 0 {
            let step = e.clamp(-1000, 1000);
            value = value * exp2_exact::<S>(step);
            e -= step;
            if value == S::zero() || !value.is_finite() {
                break;
            }
        }
        value
    }

    /// Whether `to_scalar` keeps the value as a normal number.
    pub fn fits(&self) -> bool {
        if self.is_zero() {
            return true;
        }
        let l = self.log2_abs();
        l < 1020.0 && l > -1020.0
    }
}

impl<S: Real> Mul for Scaled<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self {
            mantissa: self.mantissa * rhs.mantissa,
            exponent: self.exponent + rhs.exponent,
        }
        .normalized()
    }
}

impl<S: Real> Div for Scaled<S> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        Self {
            mantissa: self.mantissa / rhs.mantissa,
            exponent: self.exponent - rhs.exponent,
        }
        .normalized()
    }
}

impl<S: Real> Mul<S> for Scaled<S> {
    type Output = Self;
    fn mul(self, rhs: S) -> Self {
        self * Scaled::new(rhs)
    }
}

impl<S: Real> Div<S> for Scaled<S> {
    type Output = Self;
    fn div(self, rhs: S) -> Self {
        self / Scaled::new(rhs)
    }
}

impl<S: Real> Add for Scaled<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (big, small) = if self.exponent >= rhs.exponent {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let gap = big.exponent - small.exponent;
        if gap > 1000 {
            return big;
        }
        Self {
            mantissa: big.mantissa + small.mantissa * exp2_exact::<S>(-gap),
            exponent: big.exponent,
        }
        .normalized()
    }
}

impl<S: Real> Neg for Scaled<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl<S: Real> Sub for Scaled<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

fn exp2_exact<S: Real>(e: i64) -> S {
    debug_assert!(e.abs() <= 1020);
    lit(2f64.powi(e as i32))
}
