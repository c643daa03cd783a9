//! Arbitrary-precision rational arithmetic tuned for long orbit iteration.
//!
//! Orbit denominators under affine maps grow by a bounded number of bits per
//! step, so a naive always-reduce rational (gcd of two full-size integers on
//! every operation) turns an n-step orbit into an O(n^3) computation. The
//! arithmetic here keeps every value fully reduced but arranges the affine
//! step so that only gcds with *small* operands are ever taken: for reduced
//! x = xn/xd and small a, b, the gcd structure of a*x + b is known in advance
//! (see [`ExactRational::affine_apply`]), making each step O(len(x)).

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

/// A rational number `num/den` with `den > 0` and `gcd(num, den) = 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactRational {
    num: BigInt,
    den: BigInt,
}

/// gcd that routes through u128 arithmetic whenever one side fits.
///
/// `num-bigint`'s Stein gcd runs O(bits) subtract rounds, each O(bits), which
/// is quadratic even when the answer is tiny. When either operand fits in a
/// u128 we can instead take one O(bits) remainder and finish in word
/// arithmetic.
fn gcd_mixed(a: &BigInt, b: &BigInt) -> BigInt {
    if a.is_zero() {
        return BigInt::from(b.magnitude().clone());
    }
    if b.is_zero() {
        return BigInt::from(a.magnitude().clone());
    }
    let a_mag = a.magnitude();
    let b_mag = b.magnitude();
    if let Some(small) = a_mag.to_u128() {
        let r = (b_mag % a_mag).to_u128().expect("remainder below modulus");
        return BigInt::from(gcd_u128(small, r));
    }
    if let Some(small) = b_mag.to_u128() {
        let r = (a_mag % b_mag).to_u128().expect("remainder below modulus");
        return BigInt::from(gcd_u128(small, r));
    }
    BigInt::from(a_mag.gcd(b_mag))
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Exact power of two as f64, valid for the full normal exponent range.
fn pow2(e: i32) -> f64 {
    debug_assert!((-1022..=1023).contains(&e));
    f64::from_bits(((e + 1023) as u64) << 52)
}

/// x * 2^e with chunked scaling; intermediate factors stay in the normal
/// range so only the final multiply can round (into the subnormals).
fn scale_by_pow2(x: f64, mut e: i64) -> f64 {
    let mut v = x;
    while e > 1023 {
        v *= pow2(1023);
        e -= 1023;
        if v.is_infinite() {
            return v;
        }
    }
    while e < -1022 {
        v *= pow2(-1022);
        e += 1022;
        if v == 0.0 {
            return 0.0;
        }
    }
    v * pow2(e as i32)
}

impl ExactRational {
    /// Builds the reduced rational `num/den`. Panics if `den == 0`.
    pub fn new(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "rational with zero denominator");
        let (mut num, mut den) = if den.sign() == Sign::Minus {
            (-num, -den)
        } else {
            (num, den)
        };
        if num.is_zero() {
            return Self {
                num,
                den: BigInt::one(),
            };
        }
        let g = gcd_mixed(&num, &den);
        if !g.is_one() {
            num /= &g;
            den /= &g;
        }
        Self { num, den }
    }

    /// Internal constructor for values already known to be reduced
    /// (correctness of the reduction structure is covered by property tests;
    /// re-verifying the gcd here would dominate long orbit runs).
    fn new_reduced(num: BigInt, den: BigInt) -> Self {
        debug_assert!(den.is_positive());
        Self { num, den }
    }

    pub fn from_integer(n: i64) -> Self {
        Self {
            num: BigInt::from(n),
            den: BigInt::one(),
        }
    }

    pub fn from_pair(num: i64, den: i64) -> Self {
        Self::new(BigInt::from(num), BigInt::from(den))
    }

    /// Exact conversion from a finite f64 (every finite double is rational).
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Self::zero());
        }
        let bits = x.to_bits();
        let sign_neg = bits >> 63 == 1;
        let exp_field = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & 0x000f_ffff_ffff_ffff;
        let (mantissa, exp) = if exp_field == 0 {
            (frac, -1074i64) // subnormal
        } else {
            (frac | 0x0010_0000_0000_0000, exp_field - 1075)
        };
        let mut num = BigInt::from(mantissa);
        if sign_neg {
            num = -num;
        }
        let value = if exp >= 0 {
            Self::new_reduced(num << exp as u64, BigInt::one())
        } else {
            let tz = mantissa.trailing_zeros() as i64;
            let cancel = tz.min(-exp);
            let den_pow = (-exp - cancel) as u64;
            Self::new_reduced(num >> cancel as u64, BigInt::one() << den_pow)
        };
        Some(value)
    }

    /// Rounds to the nearest f64 (within 1 ulp; truncating pre-division may
    /// shift ties).
    pub fn to_f64(&self) -> f64 {
        if self.num.is_zero() {
            return 0.0;
        }
        let negative = self.num.is_negative();
        let a = self.num.abs();
        let b = &self.den;
        let shift = 57i64 - (a.bits() as i64 - b.bits() as i64);
        let q = if shift >= 0 {
            (a << shift as u64) / b
        } else {
            a / (b << (-shift) as u64)
        };
        let q = q.to_u128().expect("quotient sized to ~57 bits") as f64;
        let scaled = scale_by_pow2(q, -shift);
        if negative {
            -scaled
        } else {
            scaled
        }
    }

    pub fn zero() -> Self {
        Self {
            num: BigInt::zero(),
            den: BigInt::one(),
        }
    }

    pub fn one() -> Self {
        Self {
            num: BigInt::one(),
            den: BigInt::one(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    /// Total bit size, the quantity limited by orbit bit budgets.
    pub fn bits(&self) -> u64 {
        self.num.bits() + self.den.bits()
    }

    pub fn abs(&self) -> Self {
        Self {
            num: self.num.abs(),
            den: self.den.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    /// Sum with full reduction (Knuth 4.5.1: only gcds against
    /// `g = gcd(xd, yd)` are needed for reduced inputs).
    pub fn add(&self, other: &Self) -> Self {
        if self.num.is_zero() {
            return other.clone();
        }
        if other.num.is_zero() {
            return self.clone();
        }
        let g1 = gcd_mixed(&self.den, &other.den);
        if g1.is_one() {
            let num = &self.num * &other.den + &other.num * &self.den;
            let den = &self.den * &other.den;
            return Self::new_reduced(num, den);
        }
        let b1 = &self.den / &g1;
        let d1 = &other.den / &g1;
        let t = &self.num * &d1 + &other.num * &b1;
        let g2 = gcd_mixed(&t, &g1);
        if g2.is_one() {
            Self::new_reduced(t, b1 * &other.den)
        } else {
            Self::new_reduced(&t / &g2, b1 * (&other.den / &g2))
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Product with cross-cancellation; reduced inputs give a reduced output.
    pub fn mul(&self, other: &Self) -> Self {
        if self.num.is_zero() || other.num.is_zero() {
            return Self::zero();
        }
        let g1 = gcd_mixed(&self.num, &other.den);
        let g2 = gcd_mixed(&other.num, &self.den);
        let num = (&self.num / &g1) * (&other.num / &g2);
        let den = (&self.den / &g2) * (&other.den / &g1);
        Self::new_reduced(num, den)
    }

    pub fn div(&self, other: &Self) -> Self {
        assert!(!other.num.is_zero(), "division by zero rational");
        let recip = if other.num.is_negative() {
            Self {
                num: -other.den.clone(),
                den: -&other.num,
            }
        } else {
            Self {
                num: other.den.clone(),
                den: other.num.clone(),
            }
        };
        self.mul(&recip)
    }

    /// Computes `a*x + b` for `x = self` in O(len(x)) big-integer work when
    /// `a` and `b` are small.
    ///
    /// For reduced x = xn/xd the gcd of the raw numerator
    /// `N = an*bd*xn + bn*ad*xd` with `xd` equals `gcd(an*bd, xd)`, and after
    /// dividing that out the residual gcd against `S = ad*bd` is again a
    /// small-operand gcd. Both reductions avoid any big-by-big gcd.
    pub fn affine_apply(&self, a: &Self, b: &Self) -> Self {
        if a.num.is_zero() {
            return b.clone();
        }
        let an_bd = &a.num * &b.den;
        let raw_num = &an_bd * &self.num + &b.num * &a.den * &self.den;
        if raw_num.is_zero() {
            return Self::zero();
        }
        let g1 = gcd_mixed(&an_bd, &self.den);
        let (n1, xd1) = if g1.is_one() {
            (raw_num, self.den.clone())
        } else {
            (&raw_num / &g1, &self.den / &g1)
        };
        let s = &a.den * &b.den;
        let g2 = gcd_mixed(&n1, &s);
        let (n2, s2) = if g2.is_one() {
            (n1, s)
        } else {
            (&n1 / &g2, &s / &g2)
        };
        Self::new_reduced(n2, s2 * xd1)
    }

    pub fn cmp_value(&self, other: &Self) -> Ordering {
        match (self.num.sign(), other.num.sign()) {
            (Sign::Minus, Sign::NoSign) | (Sign::Minus, Sign::Plus) => return Ordering::Less,
            (Sign::NoSign, Sign::Plus) => return Ordering::Less,
            (Sign::Plus, Sign::Minus) | (Sign::Plus, Sign::NoSign) => return Ordering::Greater,
            (Sign::NoSign, Sign::Minus) => return Ordering::Greater,
            (Sign::NoSign, Sign::NoSign) => return Ordering::Equal,
            _ => {}
        }
        if self.den == other.den {
            return self.num.cmp(&other.num);
        }
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }

    /// Parses "p/q", an integer, or a decimal such as "0.125" or "2.5e-3".
    pub fn parse(text: &str) -> Option<Self> {
        let s = text.trim();
        if s.is_empty() {
            return None;
        }
        if let Some(pos) = s.find(['e', 'E']) {
            let mantissa = Self::parse(&s[..pos])?;
            let exp: i32 = s[pos + 1..].parse().ok()?;
            let pow = BigInt::from(10u32).pow(exp.unsigned_abs());
            let scale = if exp >= 0 {
                Self::new(pow, BigInt::one())
            } else {
                Self::new(BigInt::one(), pow)
            };
            return Some(mantissa.mul(&scale));
        }
        if let Some((num_s, den_s)) = s.split_once('/') {
            let num = BigInt::from_str(num_s.trim()).ok()?;
            let den = BigInt::from_str(den_s.trim()).ok()?;
            if den.is_zero() {
                return None;
            }
            return Some(Self::new(num, den));
        }
        if let Some((int_s, frac_s)) = s.split_once('.') {
            if frac_s.is_empty() || !frac_s.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            let negative = int_s.trim_start().starts_with('-');
            let int_part = if int_s.is_empty() || int_s == "-" || int_s == "+" {
                BigInt::zero()
            } else {
                BigInt::from_str(int_s).ok()?
            };
            let frac_digits = frac_s.len() as u32;
            let frac_part = BigInt::from_str(frac_s).ok()?;
            let scale = BigInt::from(10u32).pow(frac_digits);
            let unsigned = int_part.abs() * &scale + frac_part;
            let num = if negative { -unsigned } else { unsigned };
            return Some(Self::new(num, scale));
        }
        BigInt::from_str(s).ok().map(|n| Self {
            num: n,
            den: BigInt::one(),
        })
    }
}

impl PartialOrd for ExactRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactRational {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_value(other)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for ExactRational {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Self::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational: {s}")))
    }
}
