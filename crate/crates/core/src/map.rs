//! Piecewise continuous interval maps: a partition of [0,1], one branch per
//! piece, and a declared side at every interior breakpoint selecting which
//! lateral limit defines the value there.

use crate::branch::{Branch, RangeCheck};
use crate::error::{Error, Result};
use crate::scalar::{Backend, Scalar};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Left => write!(f, "left"),
            Side::Right => write!(f, "right"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseMap {
    backend: Backend,
    /// Full partition 0 = x_0 < x_1 < ... < x_d < x_{d+1} = 1.
    partition: Vec<Scalar>,
    branches: Vec<Branch>,
    /// Side choice for the d interior breakpoints, in order.
    sides: Vec<Side>,
}

/// One lateral limit value, tagged by its breakpoint and side.
#[derive(Clone, Debug, PartialEq)]
pub struct LateralLimit {
    pub breakpoint_index: usize,
    pub side: Side,
    pub value: Scalar,
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    /// Soundness caveats: checks that passed only by sampling.
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl PiecewiseMap {
    /// Assembles a map from interior partition points and per-piece branches.
    /// Structural requirements (counts, backend uniformity) are hard errors;
    /// admissibility questions go through [`PiecewiseMap::validate`].
    pub fn new(
        backend: Backend,
        interior: Vec<Scalar>,
        branches: Vec<Branch>,
        sides: Vec<Side>,
    ) -> Result<Self> {
        if branches.len() != interior.len() + 1 {
            return Err(Error::Config(format!(
                "{} interior points require {} branches, got {}",
                interior.len(),
                interior.len() + 1,
                branches.len()
            )));
        }
        if sides.len() != interior.len() {
            return Err(Error::Config(format!(
                "{} interior points require {} side declarations, got {}",
                interior.len(),
                interior.len(),
                sides.len()
            )));
        }
        for p in &interior {
            if p.backend() != backend {
                return Err(Error::Config("partition scalar backend mismatch".into()));
            }
        }
        for b in &branches {
            let coeff_backends: Vec<Backend> = match b {
                Branch::Affine { slope, intercept } => {
                    vec![slope.backend(), intercept.backend()]
                }
                Branch::Poly { coeffs } => coeffs.iter().map(Scalar::backend).collect(),
                Branch::Expr(_) => vec![Backend::Float],
            };
            if coeff_backends.iter().any(|bk| *bk != backend) {
                return Err(Error::Config("branch coefficient backend mismatch".into()));
            }
        }
        let mut partition = Vec::with_capacity(interior.len() + 2);
        partition.push(Scalar::zero(backend));
        partition.extend(interior);
        partition.push(Scalar::one(backend));
        Ok(PiecewiseMap {
            backend,
            partition,
            branches,
            sides,
        })
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    /// Number of interior breakpoints d.
    pub fn interior_count(&self) -> usize {
        self.sides.len()
    }

    pub fn piece_count(&self) -> usize {
        self.branches.len()
    }

    /// The full partition including the endpoints 0 and 1 (the critical set).
    pub fn partition(&self) -> &[Scalar] {
        &self.partition
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn branch(&self, piece: usize) -> &Branch {
        &self.branches[piece]
    }

    pub fn sides(&self) -> &[Side] {
        &self.sides
    }

    /// Closed hull of piece `i`, as `(left, right)` partition entries.
    pub fn piece_hull(&self, piece: usize) -> (&Scalar, &Scalar) {
        (&self.partition[piece], &self.partition[piece + 1])
    }

    /// The critical set D = {x_0, ..., x_{d+1}}.
    pub fn critical_set(&self) -> Vec<Scalar> {
        self.partition.clone()
    }

    /// Index of the piece whose branch defines f at x, honoring the declared
    /// side at interior breakpoints (x = 0 and x = 1 use the end pieces).
    pub fn piece_index(&self, x: &Scalar) -> Result<usize> {
        if !x.in_unit_interval() {
            return Err(Error::Domain { x: x.to_string() });
        }
        let d = self.interior_count();
        // first index with partition[idx] >= x
        let idx = self
            .partition
            .partition_point(|p| p.cmp_value(x) == std::cmp::Ordering::Less);
        if idx == 0 {
            return Ok(0); // x = 0
        }
        if idx >= self.partition.len() {
            return Ok(d); // x = 1 (guarded by the domain check)
        }
        if self.partition[idx].cmp_value(x) == std::cmp::Ordering::Equal {
            if idx == d + 1 {
                Ok(d)
            } else {
                match self.sides[idx - 1] {
                    Side::Right => Ok(idx),
                    Side::Left => Ok(idx - 1),
                }
            }
        } else {
            Ok(idx - 1)
        }
    }

    pub fn evaluate(&self, x: &Scalar) -> Result<Scalar> {
        let piece = self.piece_index(x)?;
        self.branches[piece].eval(x)
    }

    /// Evaluation along with the piece index used (for itineraries).
    pub fn evaluate_with_piece(&self, x: &Scalar) -> Result<(Scalar, usize)> {
        let piece = self.piece_index(x)?;
        Ok((self.branches[piece].eval(x)?, piece))
    }

    /// All 2d+2 lateral limits, ordered w_0^+, w_1^-, w_1^+, ..., w_{d+1}^-.
    /// Branches are continuous on closed hulls, so each limit is a branch
    /// evaluation at the hull endpoint.
    pub fn lateral_limits(&self) -> Result<Vec<LateralLimit>> {
        let d = self.interior_count();
        let mut out = Vec::with_capacity(2 * d + 2);
        out.push(LateralLimit {
            breakpoint_index: 0,
            side: Side::Right,
            value: self.branches[0].eval(&self.partition[0])?,
        });
        for i in 1..=d {
            out.push(LateralLimit {
                breakpoint_index: i,
                side: Side::Left,
                value: self.branches[i - 1].eval(&self.partition[i])?,
            });
            out.push(LateralLimit {
                breakpoint_index: i,
                side: Side::Right,
                value: self.branches[i].eval(&self.partition[i])?,
            });
        }
        out.push(LateralLimit {
            breakpoint_index: d + 1,
            side: Side::Left,
            value: self.branches[d].eval(&self.partition[d + 1])?,
        });
        Ok(out)
    }

    /// Admissibility report: partition order, branch ranges, and the exact
    /// backend's affine-only restriction. Failures are reported, not thrown.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for w in self.partition.windows(2) {
            if w[0].cmp_value(&w[1]) != std::cmp::Ordering::Less {
                report.violations.push(format!(
                    "partition not strictly increasing: {} followed by {}",
                    w[0], w[1]
                ));
            }
        }
        for (i, p) in self.partition.iter().enumerate() {
            if !p.in_unit_interval() {
                report
                    .violations
                    .push(format!("partition point {i} = {p} outside [0,1]"));
            }
        }
        for (i, branch) in self.branches.iter().enumerate() {
            if self.backend == Backend::Exact && !branch.is_affine() {
                report.violations.push(format!(
                    "exact backend admits affine branches only, piece {} is {}",
                    i + 1,
                    branch.kind_name()
                ));
                continue;
            }
            let (lo, hi) = self.piece_hull(i);
            if lo.cmp_value(hi) != std::cmp::Ordering::Less {
                continue; // degenerate hull already reported via partition order
            }
            match branch.range_check(lo, hi) {
                RangeCheck::Proved => {}
                RangeCheck::SampledOnly => report.warnings.push(format!(
                    "piece {} range containment verified by sampling only (heuristic)",
                    i + 1
                )),
                RangeCheck::Escapes { at, value } => report.violations.push(format!(
                    "branch range exceeds [0,1]: piece {} maps {at} to {value}",
                    i + 1
                )),
                RangeCheck::Partial { detail } => report.violations.push(format!(
                    "branch on piece {} is not total on its hull: {detail}",
                    i + 1
                )),
            }
        }
        report
    }
}

/// Spec-level alias for [`PiecewiseMap::validate`].
pub fn validate_map(map: &PiecewiseMap) -> ValidationReport {
    map.validate()
}
