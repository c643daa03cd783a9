//! Branch functions: the continuous map applied on one piece of the
//! partition, total on the closed hull of its piece.

use crate::error::Result;
use crate::expr::{Expr, Interval};
use crate::scalar::{Backend, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub enum Branch {
    Affine { slope: Scalar, intercept: Scalar },
    Poly { coeffs: Vec<Scalar> },
    Expr(Expr),
}

/// Outcome of checking that a branch maps its piece hull into [0,1].
#[derive(Clone, Debug, PartialEq)]
pub enum RangeCheck {
    /// Range containment proved (affine endpoints or interval bounds).
    Proved,
    /// Interval bounds were inconclusive; 1024 samples all landed inside.
    SampledOnly,
    /// A witness value escaped [0,1].
    Escapes { at: f64, value: f64 },
    /// The branch is not total on the hull (division by zero / sqrt domain).
    Partial { detail: String },
}

impl Branch {
    pub fn affine(slope: Scalar, intercept: Scalar) -> Self {
        Branch::Affine { slope, intercept }
    }

    pub fn affine_rational(slope: (i64, i64), intercept: (i64, i64), backend: Backend) -> Self {
        Branch::Affine {
            slope: Scalar::from_rational(slope.0, slope.1, backend),
            intercept: Scalar::from_rational(intercept.0, intercept.1, backend),
        }
    }

    pub fn is_affine(&self) -> bool {
        matches!(self, Branch::Affine { .. })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Branch::Affine { .. } => "affine",
            Branch::Poly { .. } => "poly",
            Branch::Expr(_) => "expr",
        }
    }

    pub fn eval(&self, x: &Scalar) -> Result<Scalar> {
        match self {
            Branch::Affine { slope, intercept } => Ok(x.affine_apply(slope, intercept)),
            Branch::Poly { coeffs } => {
                let backend = x.backend();
                let mut acc = Scalar::zero(backend);
                for c in coeffs.iter().rev() {
                    acc = acc.mul(x).add(c);
                }
                Ok(acc)
            }
            Branch::Expr(e) => {
                let v = e.eval(x.to_f64())?;
                Ok(Scalar::Float(v))
            }
        }
    }

    /// Checks the image of the closed hull `[lo, hi]` against [0,1].
    pub fn range_check(&self, lo: &Scalar, hi: &Scalar) -> RangeCheck {
        match self {
            Branch::Affine { slope, .. } => {
                let at_lo = self.eval(lo).expect("affine is total");
                let at_hi = self.eval(hi).expect("affine is total");
                let (min, max) = if slope.is_negative() {
                    (at_hi, at_lo)
                } else {
                    (at_lo, at_hi)
                };
                if min.is_negative() {
                    RangeCheck::Escapes {
                        at: if slope.is_negative() {
                            hi.to_f64()
                        } else {
                            lo.to_f64()
                        },
                        value: min.to_f64(),
                    }
                } else if !max.in_unit_interval() {
                    RangeCheck::Escapes {
                        at: if slope.is_negative() {
                            lo.to_f64()
                        } else {
                            hi.to_f64()
                        },
                        value: max.to_f64(),
                    }
                } else {
                    RangeCheck::Proved
                }
            }
            Branch::Poly { .. } | Branch::Expr(_) => {
                self.range_check_numeric(lo.to_f64(), hi.to_f64())
            }
        }
    }

    fn range_check_numeric(&self, lo: f64, hi: f64) -> RangeCheck {
        match self.bound_interval(lo, hi) {
            Ok(b) if b.lo >= 0.0 && b.hi <= 1.0 => RangeCheck::Proved,
            Err(e) => RangeCheck::Partial {
                detail: e.to_string(),
            },
            Ok(_) => {
                const SAMPLES: usize = 1024;
                for k in 0..=SAMPLES {
                    let x = lo + (hi - lo) * (k as f64 / SAMPLES as f64);
                    match self.eval(&Scalar::Float(x)) {
                        Ok(v) => {
                            let v = v.to_f64();
                            if !(0.0..=1.0).contains(&v) {
                                return RangeCheck::Escapes { at: x, value: v };
                            }
                        }
                        Err(e) => {
                            return RangeCheck::Partial {
                                detail: e.to_string(),
                            }
                        }
                    }
                }
                RangeCheck::SampledOnly
            }
        }
    }

    fn bound_interval(&self, lo: f64, hi: f64) -> Result<Interval> {
        match self {
            Branch::Affine { .. } => unreachable!("affine handled exactly"),
            Branch::Poly { coeffs } => {
                let input = Interval::new(lo, hi);
                let mut acc = Interval::point(0.0);
                for c in coeffs.iter().rev() {
                    let c = c.to_f64();
                    let products = [
                        acc.lo * input.lo,
                        acc.lo * input.hi,
                        acc.hi * input.lo,
                        acc.hi * input.hi,
                    ];
                    let plo = products.iter().cloned().fold(f64::INFINITY, f64::min);
                    let phi = products.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    acc = Interval::new(plo + c, phi + c);
                }
                Ok(acc)
            }
            Branch::Expr(e) => e.eval_interval(Interval::new(lo, hi)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_eval_is_exact() {
        let b = Branch::affine_rational((1, 2), (1, 8), Backend::Exact);
        let x = Scalar::from_rational(1, 2, Backend::Exact);
        assert_eq!(
            b.eval(&x).unwrap(),
            Scalar::from_rational(3, 8, Backend::Exact)
        );
    }

    #[test]
    fn affine_range_check() {
        let ok = Branch::affine_rational((1, 2), (1, 8), Backend::Exact);
        let zero = Scalar::zero(Backend::Exact);
        let one = Scalar::one(Backend::Exact);
        assert_eq!(ok.range_check(&zero, &one), RangeCheck::Proved);

        let bad = Branch::affine_rational((2, 1), (0, 1), Backend::Exact);
        assert!(matches!(
            bad.range_check(&zero, &one),
            RangeCheck::Escapes { value, .. } if value == 2.0
        ));
    }

    #[test]
    fn poly_horner() {
        // 1/4 + x^2 at 1/2 -> 1/2
        let b = Branch::Poly {
            coeffs: vec![Scalar::Float(0.25), Scalar::Float(0.0), Scalar::Float(1.0)],
        };
        assert_eq!(b.eval(&Scalar::Float(0.5)).unwrap(), Scalar::Float(0.5));
    }

    #[test]
    fn expr_branch_square_stays_nonnegative() {
        let e = Expr::parse("(sqrt(x) + 0.618 - 1) * (sqrt(x) + 0.618 - 1)").unwrap();
        let b = Branch::Expr(e);
        // interval bound is inconclusive near zero, but sampling passes
        let check = b.range_check(&Scalar::Float(0.1459), &Scalar::Float(1.0));
        assert!(matches!(
            check,
            RangeCheck::Proved | RangeCheck::SampledOnly
        ));
    }
}
