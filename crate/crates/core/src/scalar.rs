//! The ambient number type: every map fixes one backend, either exact
//! rationals or f64, and all values flowing through an analysis share it.

use crate::exact::ExactRational;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Exact => write!(f, "exact"),
            Backend::Float => write!(f, "float"),
        }
    }
}

/// A number in the map's backend. Mixing backends in one operation is a
/// programming error and panics; all public entry points construct values
/// of a single backend per analysis.
#[derive(Clone, PartialEq)]
pub enum Scalar {
    Exact(ExactRational),
    Float(f64),
}

impl Scalar {
    pub fn backend(&self) -> Backend {
        match self {
            Scalar::Exact(_) => Backend::Exact,
            Scalar::Float(_) => Backend::Float,
        }
    }

    pub fn zero(backend: Backend) -> Self {
        match backend {
            Backend::Exact => Scalar::Exact(ExactRational::zero()),
            Backend::Float => Scalar::Float(0.0),
        }
    }

    pub fn one(backend: Backend) -> Self {
        match backend {
            Backend::Exact => Scalar::Exact(ExactRational::one()),
            Backend::Float => Scalar::Float(1.0),
        }
    }

    pub fn from_rational(num: i64, den: i64, backend: Backend) -> Self {
        match backend {
            Backend::Exact => Scalar::Exact(ExactRational::from_pair(num, den)),
            Backend::Float => Scalar::Float(num as f64 / den as f64),
        }
    }

    pub fn from_f64(x: f64) -> Self {
        Scalar::Float(x)
    }

    pub fn exact(r: ExactRational) -> Self {
        Scalar::Exact(r)
    }

    /// Parses a literal ("p/q", integer, or decimal) into the given backend.
    pub fn parse(text: &str, backend: Backend) -> Option<Self> {
        match backend {
            Backend::Exact => ExactRational::parse(text).map(Scalar::Exact),
            Backend::Float => {
                let s = text.trim();
                if s.contains('/') {
                    ExactRational::parse(s).map(|r| Scalar::Float(r.to_f64()))
                } else {
                    s.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .map(Scalar::Float)
                }
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64(),
            Scalar::Float(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&ExactRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    /// Exact rational image of the value; lossless for both backends.
    pub fn to_exact(&self) -> ExactRational {
        match self {
            Scalar::Exact(r) => r.clone(),
            Scalar::Float(x) => {
                ExactRational::from_f64(*x).expect("finite float in exactification")
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_negative(),
            Scalar::Float(x) => *x < 0.0,
        }
    }

    /// Bit size under the exact backend; floats report a constant.
    pub fn bits(&self) -> u64 {
        match self {
            Scalar::Exact(r) => r.bits(),
            Scalar::Float(_) => 64,
        }
    }

    fn pair<'a>(&'a self, other: &'a Scalar) -> PairRef<'a> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => PairRef::Exact(a, b),
            (Scalar::Float(a), Scalar::Float(b)) => PairRef::Float(*a, *b),
            _ => panic!("mixed scalar backends in one operation"),
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match self.pair(other) {
            PairRef::Exact(a, b) => Scalar::Exact(a.add(b)),
            PairRef::Float(a, b) => Scalar::Float(a + b),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        match self.pair(other) {
            PairRef::Exact(a, b) => Scalar::Exact(a.sub(b)),
            PairRef::Float(a, b) => Scalar::Float(a - b),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match self.pair(other) {
            PairRef::Exact(a, b) => Scalar::Exact(a.mul(b)),
            PairRef::Float(a, b) => Scalar::Float(a * b),
        }
    }

    pub fn div(&self, other: &Scalar) -> Scalar {
        match self.pair(other) {
            PairRef::Exact(a, b) => Scalar::Exact(a.div(b)),
            PairRef::Float(a, b) => Scalar::Float(a / b),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.neg()),
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Float(x) => Scalar::Float(x.abs()),
        }
    }

    /// `a*self + b` using the reduced-step fast path under the exact backend.
    pub fn affine_apply(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Scalar::Exact(x), Scalar::Exact(a), Scalar::Exact(b)) => {
                Scalar::Exact(x.affine_apply(a, b))
            }
            (Scalar::Float(x), Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a * x + b),
            _ => panic!("mixed scalar backends in one operation"),
        }
    }

    pub fn distance(&self, other: &Scalar) -> Scalar {
        self.sub(other).abs()
    }

    pub fn cmp_value(&self, other: &Scalar) -> Ordering {
        match self.pair(other) {
            PairRef::Exact(a, b) => a.cmp_value(b),
            PairRef::Float(a, b) => a.partial_cmp(&b).expect("NaN in scalar comparison"),
        }
    }

    pub fn min_value(self, other: Scalar) -> Scalar {
        if self.cmp_value(&other) == Ordering::Greater {
            other
        } else {
            self
        }
    }

    pub fn max_value(self, other: Scalar) -> Scalar {
        if self.cmp_value(&other) == Ordering::Less {
            other
        } else {
            self
        }
    }

    pub fn in_unit_interval(&self) -> bool {
        !self.is_negative() && self.cmp_value(&Scalar::one(self.backend())) != Ordering::Greater
    }

    pub fn sqrt(&self) -> Option<Scalar> {
        match self {
            Scalar::Exact(_) => None, // exact backend admits affine branches only
            Scalar::Float(x) => {
                if *x < 0.0 {
                    None
                } else {
                    Some(Scalar::Float(x.sqrt()))
                }
            }
        }
    }
}

enum PairRef<'a> {
    Exact(&'a ExactRational, &'a ExactRational),
    Float(f64, f64),
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{r}"),
            Scalar::Float(x) => write!(f, "{x:?}"),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(r) => serializer.serialize_str(&r.to_string()),
            Scalar::Float(x) => serializer.serialize_f64(*x),
        }
    }
}
