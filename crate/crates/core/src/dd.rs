//! Double-double scalar.
//!
//! A thin wrapper around [`twofloat::TwoFloat`] that supplies what the wrapped
//! type gets wrong for this crate's purposes: division accurate to the full
//! 106-bit significand, `f64` conversion through `FromPrimitive`, and `exp`
//! and `ln` accurate to double-double precision. Everything else delegates.

use std::cmp::Ordering;
use std::fmt;
use std::num::FpCategory;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, Num, NumCast, One, ToPrimitive, Zero};
use twofloat::TwoFloat;

/// A value `hi + lo` with `|lo| <= ulp(hi) / 2`, carrying about 31 digits.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct DoubleDouble(TwoFloat);

const LN_2: DoubleDouble = DoubleDouble(twofloat::consts::LN_2);

impl DoubleDouble {
    pub const fn from_f64(x: f64) -> Self {
        Self(TwoFloat::from_f64(x))
    }

    /// Decimal scientific notation with `digits` significant digits,
    /// rounded half up.
    pub fn to_sci_string(self, digits: usize) -> String {
        let digits = digits.max(1);
        let approx = self.hi() + self.lo();
        if approx == 0.0 || !approx.is_finite() {
            return format!("{:.*e}", digits - 1, approx);
        }
        let ten = Self::from_f64(10.0);
        let mut e = approx.abs().log10().floor() as i32;
        let scale = ten.powi(e);
        if !scale.hi().is_finite() || scale.hi() == 0.0 {
            return format!("{:.*e}", digits - 1, approx);
        }
        let mut x = self.abs() / scale;
        if x.hi() >= 10.0 {
            x /= ten;
            e += 1;
        } else if x.hi() < 1.0 {
            x *= ten;
            e -= 1;
        }
        let mut ds = Vec::with_capacity(digits + 1);
        for _ in 0..=digits {
            let d = x.floor();
            ds.push((d.hi() as i64).clamp(0, 9) as u8);
            x = (x - d) * ten;
        }
        let round_up = ds.pop().unwrap_or(0) >= 5;
        if round_up {
            let mut i = ds.len();
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    ds.pop();
                    e += 1;
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
        let mut out = String::with_capacity(digits + 8);
        if approx < 0.0 {
            out.push('-');
        }
        out.push((b'0' + ds[0]) as char);
        if ds.len() > 1 {
            out.push('.');
            out.extend(ds[1..].iter().map(|&d| (b'0' + d) as char));
        }
        out.push_str(&format!("e{e}"));
        out
    }

    /// The exact sum `a + b` as a double-double.
    pub fn from_sum(a: f64, b: f64) -> Self {
        Self(TwoFloat::new_add(a, b))
    }

    pub fn hi(&self) -> f64 {
        self.0.hi()
    }

    pub fn lo(&self) -> f64 {
        self.0.lo()
    }

    pub fn into_inner(self) -> TwoFloat {
        self.0
    }

    /// Multiplication by an exact power of two.
    fn ldexp(self, e: i32) -> Self {
        let mut v = self;
        let mut e = e;
        while e != 0 {
            let step = e.clamp(-1000, 1000);
            v = Self(v.0 * 2f64.powi(step));
            e -= step;
        }
        v
    }

    fn exp_dd(self) -> Self {
        let h = self.hi();
        if h.is_nan() {
            return self;
        }
        if h > 709.79 {
            return Self::infinity();
        }
        if h < -745.2 {
            return Self::zero();
        }
        let k = (h / std::f64::consts::LN_2).round();
        // |r| <= ln2 / 2 before the extra scaling by 2^-10.
        let r = (self - LN_2 * Self::from_f64(k)).ldexp(-10);
        // exp(r) - 1 by Taylor series; |r| < 3.4e-4 so 11 terms are plenty.
        let mut term = r;
        let mut s = r;
        for n in 2..=11 {
            term = term * r / Self::from_f64(n as f64);
            s += term;
        }
        // (1 + s)^2 - 1 = s (s + 2) keeps the small part exact.
        let two = Self::from_f64(2.0);
        for _ in 0..10 {
            s = s * (s + two);
        }
        (Self::one() + s).ldexp(k as i32)
    }

    fn ln_dd(self) -> Self {
        let h = self.hi();
        if h.is_nan() || h < 0.0 {
            return Self::nan();
        }
        if h == 0.0 {
            return Self::neg_infinity();
        }
        if h.is_infinite() {
            return self;
        }
        // Newton steps on exp(y) = x, each doubling the number of correct bits.
        let mut y = Self::from_f64(h.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp_dd() - Self::one();
        }
        y
    }
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DoubleDouble({:e} + {:e})", self.hi(), self.lo())
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&(self.hi() + self.lo()), f)
    }
}

impl fmt::LowerExp for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerExp::fmt(&(self.hi() + self.lo()), f)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl From<TwoFloat> for DoubleDouble {
    fn from(x: TwoFloat) -> Self {
        Self(x)
    }
}

/// TwoFloat's error terms turn overflow into NaN; fall back to the plain
/// double result (an infinity) whenever that one is not NaN itself.
#[inline]
fn ieee(v: DoubleDouble, plain: f64) -> DoubleDouble {
    if (v.hi().is_nan() && !plain.is_nan()) || plain.is_infinite() {
        DoubleDouble::from_f64(plain)
    } else {
        v
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        ieee(Self(self.0 + rhs.0), self.hi() + rhs.hi())
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        ieee(Self(self.0 - rhs.0), self.hi() - rhs.hi())
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        ieee(Self(self.0 * rhs.0), self.hi() * rhs.hi())
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    /// Long division with two correction steps.
    fn div(self, rhs: Self) -> Self {
        let b = rhs.0;
        let q1 = self.hi() / b.hi();
        if !q1.is_finite() || q1 == 0.0 {
            return Self::from_f64(q1);
        }
        let r = self.0 - b * q1;
        let q2 = r.hi() / b.hi();
        let r = r - b * q2;
        let q3 = r.hi() / b.hi();
        Self(TwoFloat::new_add(q1, q2) + q3)
    }
}

impl Rem for DoubleDouble {
    type Output = Self;
    fn rem(self, rhs: Self) -> Self {
        self - (self / rhs).trunc() * rhs
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl AddAssign for DoubleDouble {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for DoubleDouble {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl MulAssign for DoubleDouble {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl DivAssign for DoubleDouble {
    fn div_assign(&mut self, rhs: Self) {
        *self = *self / rhs;
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn is_zero(&self) -> bool {
        self.hi() == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        Self::from_f64(1.0)
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = std::num::ParseFloatError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        if radix != 10 {
            // Same error value the standard parser produces for garbage.
            return "".parse::<f64>().map(Self::from_f64);
        }
        s.parse()
    }
}

impl std::str::FromStr for DoubleDouble {
    type Err = std::num::ParseFloatError;

    /// Parses a decimal literal to double-double accuracy, so that `0.1` is
    /// the double-double nearest to one tenth rather than the nearest double.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let approx: f64 = s.parse()?;
        if approx == 0.0 || !approx.is_finite() {
            return Ok(Self::from_f64(approx));
        }
        let t = s.trim();
        let (neg, t) = match t.as_bytes()[0] {
            b'-' => (true, &t[1..]),
            b'+' => (false, &t[1..]),
            _ => (false, t),
        };
        let (mant, exp) = match t.find(['e', 'E']) {
            Some(i) => (&t[..i], t[i + 1..].parse::<i32>().unwrap_or(0)),
            None => (t, 0),
        };
        let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
        let digits: Vec<u8> = int_part
            .bytes()
            .chain(frac_part.bytes())
            .map(|b| b - b'0')
            .skip_while(|&d| d == 0)
            .collect();
        let mut exp10 = exp - frac_part.len() as i32;
        let keep = digits.len().min(32);
        exp10 += (digits.len() - keep) as i32;
        let ten = Self::from_f64(10.0);
        let mut m = Self::from_f64(0.0);
        for &d in &digits[..keep] {
            m = m * ten + Self::from_f64(d as f64);
        }
        let v = if exp10 >= 0 {
            m * ten.powi(exp10)
        } else {
            m / ten.powi(-exp10)
        };
        Ok(if neg { -v } else { v })
    }
}

impl ToPrimitive for DoubleDouble {
    fn to_i64(&self) -> Option<i64> {
        self.0.to_i64()
    }
    fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.hi() + self.lo())
    }
}

impl FromPrimitive for DoubleDouble {
    fn from_i64(n: i64) -> Option<Self> {
        Some(Self(<TwoFloat as From<_>>::from(n)))
    }
    fn from_u64(n: u64) -> Option<Self> {
        Some(Self(<TwoFloat as From<_>>::from(n)))
    }
    fn from_f64(x: f64) -> Option<Self> {
        Some(Self::from_f64(x))
    }
}

impl NumCast for DoubleDouble {
    fn from<T: ToPrimitive>(n: T) -> Option<Self> {
        n.to_f64().map(Self::from_f64)
    }
}

impl FloatConst for DoubleDouble {
    fn E() -> Self {
        Self(twofloat::consts::E)
    }
    fn FRAC_1_PI() -> Self {
        Self(twofloat::consts::FRAC_1_PI)
    }
    fn FRAC_1_SQRT_2() -> Self {
        Self(twofloat::consts::FRAC_1_SQRT_2)
    }
    fn FRAC_2_PI() -> Self {
        Self(twofloat::consts::FRAC_2_PI)
    }
    fn FRAC_2_SQRT_PI() -> Self {
        Self(twofloat::consts::FRAC_2_SQRT_PI)
    }
    fn FRAC_PI_2() -> Self {
        Self(twofloat::consts::FRAC_PI_2)
    }
    fn FRAC_PI_3() -> Self {
        Self(twofloat::consts::FRAC_PI_3)
    }
    fn FRAC_PI_4() -> Self {
        Self(twofloat::consts::FRAC_PI_4)
    }
    fn FRAC_PI_6() -> Self {
        Self(twofloat::consts::FRAC_PI_6)
    }
    fn FRAC_PI_8() -> Self {
        Self(twofloat::consts::FRAC_PI_8)
    }
    fn LN_10() -> Self {
        Self(twofloat::consts::LN_10)
    }
    fn LN_2() -> Self {
        LN_2
    }
    fn LOG10_E() -> Self {
        Self(twofloat::consts::LOG10_E)
    }
    fn LOG2_E() -> Self {
        Self(twofloat::consts::LOG2_E)
    }
    fn PI() -> Self {
        Self(twofloat::consts::PI)
    }
    fn SQRT_2() -> Self {
        Self(twofloat::consts::SQRT_2)
    }
}

impl Float for DoubleDouble {
    fn nan() -> Self {
        Self(TwoFloat::NAN)
    }
    fn infinity() -> Self {
        Self(TwoFloat::INFINITY)
    }
    fn neg_infinity() -> Self {
        Self(TwoFloat::NEG_INFINITY)
    }
    fn neg_zero() -> Self {
        Self::from_f64(-0.0)
    }
    fn min_value() -> Self {
        Self(TwoFloat::MIN)
    }
    fn min_positive_value() -> Self {
        Self(TwoFloat::MIN_POSITIVE)
    }
    fn max_value() -> Self {
        Self(TwoFloat::MAX)
    }
    fn epsilon() -> Self {
        Self::from_f64(2f64.powi(-104))
    }
    fn is_nan(self) -> bool {
        self.hi().is_nan()
    }
    fn is_infinite(self) -> bool {
        self.hi().is_infinite()
    }
    fn is_finite(self) -> bool {
        self.hi().is_finite()
    }
    fn is_normal(self) -> bool {
        self.hi().is_normal()
    }
    fn classify(self) -> FpCategory {
        self.hi().classify()
    }
    fn floor(self) -> Self {
        Self(self.0.floor())
    }
    fn ceil(self) -> Self {
        Self(self.0.ceil())
    }
    fn round(self) -> Self {
        Self(self.0.round())
    }
    fn trunc(self) -> Self {
        Self(self.0.trunc())
    }
    fn fract(self) -> Self {
        self - self.trunc()
    }
    fn abs(self) -> Self {
        Self(self.0.abs())
    }
    fn signum(self) -> Self {
        Self(self.0.signum())
    }
    fn is_sign_positive(self) -> bool {
        self.0.is_sign_positive()
    }
    fn is_sign_negative(self) -> bool {
        self.0.is_sign_negative()
    }
    fn mul_add(self, a: Self, b: Self) -> Self {
        self * a + b
    }
    fn recip(self) -> Self {
        Self::one() / self
    }
    fn powi(self, n: i32) -> Self {
        crate::real::powi(self, n as i64)
    }
    fn powf(self, n: Self) -> Self {
        if self.is_zero() {
            return if n > Self::zero() { Self::zero() } else { Self::infinity() };
        }
        (n * self.ln_dd()).exp_dd()
    }
    fn sqrt(self) -> Self {
        Self(self.0.sqrt())
    }
    fn exp(self) -> Self {
        self.exp_dd()
    }
    fn exp2(self) -> Self {
        (self * LN_2).exp_dd()
    }
    fn ln(self) -> Self {
        self.ln_dd()
    }
    fn log(self, base: Self) -> Self {
        self.ln_dd() / base.ln_dd()
    }
    fn log2(self) -> Self {
        self.ln_dd() / LN_2
    }
    fn log10(self) -> Self {
        self.ln_dd() / Self::LN_10()
    }
    fn max(self, other: Self) -> Self {
        if self.is_nan() || other > self {
            other
        } else {
            self
        }
    }
    fn min(self, other: Self) -> Self {
        if self.is_nan() || other < self {
            other
        } else {
            self
        }
    }
    fn abs_sub(self, other: Self) -> Self {
        if self > other {
            self - other
        } else {
            Self::zero()
        }
    }
    fn cbrt(self) -> Self {
        Self(self.0.cbrt())
    }
    fn hypot(self, other: Self) -> Self {
        (self * self + other * other).sqrt()
    }
    fn sin(self) -> Self {
        Self(self.0.sin())
    }
    fn cos(self) -> Self {
        Self(self.0.cos())
    }
    fn tan(self) -> Self {
        Self(self.0.tan())
    }
    fn asin(self) -> Self {
        Self(self.0.asin())
    }
    fn acos(self) -> Self {
        Self(self.0.acos())
    }
    fn atan(self) -> Self {
        Self(self.0.atan())
    }
    fn atan2(self, other: Self) -> Self {
        Self(self.0.atan2(other.0))
    }
    fn sin_cos(self) -> (Self, Self) {
        (self.sin(), self.cos())
    }
    fn exp_m1(self) -> Self {
        self.exp_dd() - Self::one()
    }
    fn ln_1p(self) -> Self {
        (Self::one() + self).ln_dd()
    }
    fn sinh(self) -> Self {
        Self(self.0.sinh())
    }
    fn cosh(self) -> Self {
        Self(self.0.cosh())
    }
    fn tanh(self) -> Self {
        Self(self.0.tanh())
    }
    fn asinh(self) -> Self {
        Self(self.0.asinh())
    }
    fn acosh(self) -> Self {
        Self(self.0.acosh())
    }
    fn atanh(self) -> Self {
        Self(self.0.atanh())
    }
    fn integer_decode(self) -> (u64, i16, i8) {
        self.hi().integer_decode()
    }
}
