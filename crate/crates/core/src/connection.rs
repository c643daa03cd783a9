//! The no-connections check: do the forward orbits of the critical set and
//! of the lateral limits ever land on an interior breakpoint?
//!
//! Hits are tested against interior breakpoints only. The map is totalized
//! at 0 and 1 by the adjacent branch, which is one-sidedly continuous there,
//! so an orbit passing through an endpoint meets no discontinuity; landing
//! on an interior breakpoint is the obstruction the check exists to find.

use crate::error::{Error, Result};
use crate::map::{PiecewiseMap, Side};
use crate::orbit::{OrbitBudget, OrbitIter};
use crate::scalar::{Backend, Scalar};
use serde::Serialize;
use std::fmt;
use std::fmt::Write as _;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "CONNECTED")]
    Connected,
    #[serde(rename = "NO_CONNECTION_UP_TO_DEPTH")]
    NoConnectionUpToDepth,
    #[serde(rename = "UNDECIDED")]
    Undecided,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Connected => write!(f, "CONNECTED"),
            Verdict::NoConnectionUpToDepth => write!(f, "NO_CONNECTION_UP_TO_DEPTH"),
            Verdict::Undecided => write!(f, "UNDECIDED"),
        }
    }
}

/// Where a seed orbit started: a critical-set point or a lateral limit.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SeedSource {
    Breakpoint { index: usize },
    Lateral { index: usize, side: Side },
}

impl fmt::Display for SeedSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedSource::Breakpoint { index } => write!(f, "x_{index}"),
            SeedSource::Lateral { index, side } => {
                let sign = match side {
                    Side::Left => "-",
                    Side::Right => "+",
                };
                write!(f, "w_{index}^{sign}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub source: SeedSource,
    pub step: usize,
    pub hit_breakpoint: usize,
    pub distance: Scalar,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConnectionReport {
    pub verdict: Verdict,
    pub depth: usize,
    /// Distance threshold used for hits (float backend only).
    pub tolerance: Option<f64>,
    pub witnesses: Vec<Witness>,
}

impl ConnectionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Decides the no-connections condition up to `depth`.
///
/// Every x_i in D is iterated for k = 1..depth and every lateral limit w for
/// k = 0..depth (a lateral limit already sitting on an interior breakpoint
/// is a connection). Under the exact backend hits are exact membership and
/// any witness makes the verdict CONNECTED; under the float backend a
/// distance below `tol` can only refute separation, so witnesses yield
/// UNDECIDED, never CONNECTED.
pub fn check_no_connections(
    map: &PiecewiseMap,
    depth: usize,
    tol: &Scalar,
) -> Result<ConnectionReport> {
    check_no_connections_budgeted(map, depth, tol, OrbitBudget::default())
}

pub fn check_no_connections_budgeted(
    map: &PiecewiseMap,
    depth: usize,
    tol: &Scalar,
    budget: OrbitBudget,
) -> Result<ConnectionReport> {
    let exact = map.backend() == Backend::Exact;
    let interior = &map.partition()[1..=map.interior_count()];
    let mut witnesses = Vec::new();

    let mut seeds: Vec<(SeedSource, Scalar, usize)> = Vec::new();
    for (i, x) in map.partition().iter().enumerate() {
        seeds.push((SeedSource::Breakpoint { index: i }, x.clone(), 1));
    }
    for limit in map.lateral_limits()? {
        seeds.push((
            SeedSource::Lateral {
                index: limit.breakpoint_index,
                side: limit.side,
            },
            limit.value,
            0,
        ));
    }

    for (source, start, k_start) in seeds {
        let iter = OrbitIter::new(map, start, budget)?;
        for (k, item) in iter.take(depth + 1).enumerate() {
            let (x, _) = item?;
            if k < k_start {
                continue;
            }
            for (b, bp) in interior.iter().enumerate() {
                let hit = if exact {
                    x.cmp_value(bp) == std::cmp::Ordering::Equal
                } else {
                    x.distance(bp).cmp_value(tol) == std::cmp::Ordering::Less
                };
                if hit {
                    witnesses.push(Witness {
                        source: source.clone(),
                        step: k,
                        hit_breakpoint: b + 1,
                        distance: x.distance(bp),
                    });
                }
            }
        }
    }

    let verdict = if witnesses.is_empty() {
        Verdict::NoConnectionUpToDepth
    } else if exact {
        Verdict::Connected
    } else {
        Verdict::Undecided
    };
    Ok(ConnectionReport {
        verdict,
        depth,
        tolerance: if exact { None } else { Some(tol.to_f64()) },
        witnesses,
    })
}

/// Orbit mass near each critical point: for every x_i in D, the fraction of
/// the first `n` iterates of `p` within `radius` of x_i.
#[derive(Clone, Debug, Serialize)]
pub struct MassEntry {
    pub breakpoint: Scalar,
    pub count: usize,
    pub mass: f64,
}

pub fn breakpoint_mass(
    map: &PiecewiseMap,
    p: &Scalar,
    n: usize,
    radius: &Scalar,
) -> Result<Vec<MassEntry>> {
    breakpoint_mass_budgeted(map, p, n, radius, OrbitBudget::default())
}

pub fn breakpoint_mass_budgeted(
    map: &PiecewiseMap,
    p: &Scalar,
    n: usize,
    radius: &Scalar,
    budget: OrbitBudget,
) -> Result<Vec<MassEntry>> {
    let critical = map.critical_set();
    let mut counts = vec![0usize; critical.len()];
    // f64 shadow of the exact orbit: comparisons resolved in floats except
    // within a safety band of the radius, where the exact test decides.
    let crit_f64: Vec<f64> = critical.iter().map(Scalar::to_f64).collect();
    let radius_f64 = radius.to_f64();
    let mut x = p.clone();
    if !x.in_unit_interval() {
        return Err(Error::Domain { x: x.to_string() });
    }
    let mut approx = x.to_f64();
    let mut err = 1e-15f64;
    for step in 0..n {
        if x.bits() > budget.max_scalar_bits {
            return Err(Error::BitBudget {
                step,
                bits: x.bits(),
                budget: budget.max_scalar_bits,
            });
        }
        let band = err + 1e-9;
        for (i, c) in critical.iter().enumerate() {
            let d = (approx - crit_f64[i]).abs();
            if d + band <= radius_f64 {
                counts[i] += 1;
            } else if d - band > radius_f64 {
                // definitely outside
            } else if x.distance(c).cmp_value(radius) != std::cmp::Ordering::Greater {
                counts[i] += 1;
            }
        }
        if step + 1 < n {
            let piece = map.piece_index(&x)?;
            match map.branch(piece) {
                crate::branch::Branch::Affine { slope, intercept } => {
                    let a = slope.to_f64();
                    approx = a * approx + intercept.to_f64();
                    err = err * a.abs() + 1e-15;
                }
                _ => err = f64::INFINITY, // force exact refresh below
            }
            x = map.branch(piece).eval(&x)?;
            if err > 1e-9 {
                approx = x.to_f64();
                err = 1e-15;
            }
        }
    }
    Ok(critical
        .into_iter()
        .zip(counts)
        .map(|(breakpoint, count)| MassEntry {
            breakpoint,
            count,
            mass: count as f64 / n as f64,
        })
        .collect())
}

pub fn mass_to_csv(entries: &[MassEntry]) -> String {
    let mut out = String::from("breakpoint,mass\n");
    for e in entries {
        writeln!(out, "{},{}", e.breakpoint, e.mass).unwrap();
    }
    out
}

/// Direct check of the no-early-return property behind the 2/r mass bound:
/// every sampled point of the closed ball leaves it for at least `r` steps.
pub fn ball_escapes_for(
    map: &PiecewiseMap,
    center: &Scalar,
    radius: &Scalar,
    r: usize,
    sample_count: usize,
) -> Result<bool> {
    let backend = map.backend();
    let lo = center.sub(radius).max_value(Scalar::zero(backend));
    let hi = center.add(radius).min_value(Scalar::one(backend));
    for j in 0..=sample_count {
        let t = Scalar::from_rational(j as i64, sample_count as i64, backend);
        let y = lo.add(&t.mul(&hi.sub(&lo)));
        let mut x = y.clone();
        for _ in 0..r {
            x = map.evaluate(&x)?;
            if x.distance(center).cmp_value(radius) != std::cmp::Ordering::Greater {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Halves `radius` until [`ball_escapes_for`] passes, giving the radius at
/// which the empirical mass bound 2/r applies; None if no radius within
/// `max_halvings` works (the f2 failure mode: mass that never leaves).
pub fn no_return_radius(
    map: &PiecewiseMap,
    center: &Scalar,
    initial_radius: &Scalar,
    r: usize,
    sample_count: usize,
    max_halvings: usize,
) -> Result<Option<Scalar>> {
    let backend = map.backend();
    let half = Scalar::from_rational(1, 2, backend);
    let mut radius = initial_radius.clone();
    for _ in 0..=max_halvings {
        if ball_escapes_for(map, center, &radius, r, sample_count)? {
            return Ok(Some(radius));
        }
        radius = radius.mul(&half);
    }
    Ok(None)
}
