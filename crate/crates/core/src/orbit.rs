//! Forward orbits, symbolic itineraries, and periodic points.

use crate::error::{Error, Result};
use crate::map::PiecewiseMap;
use crate::scalar::{Backend, Scalar};
use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

/// Resource limits for orbit iteration.
#[derive(Clone, Copy, Debug)]
pub struct OrbitBudget {
    /// Cap on num+den bits of any exact iterate (slope-1/2 maps grow one bit
    /// per step, so the default comfortably covers 10^5 iterates).
    pub max_scalar_bits: u64,
    /// Cap on itinerary words examined by the periodic-orbit search.
    pub max_words: usize,
}

impl Default for OrbitBudget {
    fn default() -> Self {
        OrbitBudget {
            max_scalar_bits: 1 << 20,
            max_words: 1_000_000,
        }
    }
}

/// A forward trajectory with the branch index used at every point.
#[derive(Clone, Debug, PartialEq)]
pub struct Orbit {
    pub base: Scalar,
    pub points: Vec<Scalar>,
    /// 0-based piece index per point (piece i hosts branch i+1 in 1-based
    /// spec terms).
    pub itinerary: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct PeriodicOrbitRecord {
    pub point: Scalar,
    pub period: usize,
    pub certified: bool,
}

/// Streaming orbit iterator: yields `(f^k(p), piece(f^k(p)))` for k = 0, 1,
/// ... without storing the trajectory. Long exact orbits should stream.
pub struct OrbitIter<'a> {
    map: &'a PiecewiseMap,
    state: Option<Scalar>,
    budget: OrbitBudget,
    step: usize,
}

impl<'a> OrbitIter<'a> {
    pub fn new(map: &'a PiecewiseMap, p: Scalar, budget: OrbitBudget) -> Result<Self> {
        if !p.in_unit_interval() {
            return Err(Error::Domain { x: p.to_string() });
        }
        Ok(OrbitIter {
            map,
            state: Some(p),
            budget,
            step: 0,
        })
    }
}

impl Iterator for OrbitIter<'_> {
    type Item = Result<(Scalar, usize)>;

    fn next(&mut self) -> Option<Self::Item> {
        let current = self.state.take()?;
        if current.bits() > self.budget.max_scalar_bits {
            return Some(Err(Error::BitBudget {
                step: self.step,
                bits: current.bits(),
                budget: self.budget.max_scalar_bits,
            }));
        }
        let (next, piece) = match self.map.evaluate_with_piece(&current) {
            Ok(v) => v,
            Err(e) => return Some(Err(e)),
        };
        self.state = Some(next);
        self.step += 1;
        Some(Ok((current, piece)))
    }
}

/// First `n` orbit points of `p` with their itinerary.
pub fn iterate_orbit(
    map: &PiecewiseMap,
    p: &Scalar,
    n: usize,
    budget: OrbitBudget,
) -> Result<Orbit> {
    if n == 0 {
        return Err(Error::Config("orbit length must be at least 1".into()));
    }
    let mut points = Vec::with_capacity(n);
    let mut itinerary = Vec::with_capacity(n);
    for item in OrbitIter::new(map, p.clone(), budget)?.take(n) {
        let (x, piece) = item?;
        points.push(x);
        itinerary.push(piece);
    }
    Ok(Orbit {
        base: p.clone(),
        points,
        itinerary,
    })
}

/// Cycle search along the orbit of `p`.
///
/// Exact backend: hash-based exact recurrence detection; the first repeated
/// point certifies a cycle (and the first recurrence is automatically of
/// minimal period). Float backend: reports the first k whose point comes
/// within `tol` of an earlier iterate, resolving ties to the smallest
/// period; such records are never certified.
pub fn detect_cycle(
    map: &PiecewiseMap,
    p: &Scalar,
    max_iter: usize,
    tol: &Scalar,
) -> Result<Option<PeriodicOrbitRecord>> {
    match map.backend() {
        Backend::Exact => {
            let mut seen: HashMap<crate::exact::ExactRational, usize> = HashMap::new();
            let mut points: Vec<Scalar> = Vec::new();
            for (k, item) in OrbitIter::new(map, p.clone(), OrbitBudget::default())?
                .take(max_iter + 1)
                .enumerate()
            {
                let (x, _) = item?;
                let key = x.as_exact().expect("exact backend").clone();
                if let Some(&j) = seen.get(&key) {
                    return Ok(Some(PeriodicOrbitRecord {
                        point: points[j].clone(),
                        period: k - j,
                        certified: true,
                    }));
                }
                seen.insert(key, k);
                points.push(x);
            }
            Ok(None)
        }
        Backend::Float => {
            let tol = tol.to_f64();
            // ordered index of seen values for O(log n) near-neighbor lookup
            let mut seen: std::collections::BTreeMap<u64, usize> =
                std::collections::BTreeMap::new();
            let key_of = |v: f64| -> u64 {
                // [0,1] floats are non-negative, so the bit pattern is
                // monotone in the value.
                v.to_bits()
            };
            let mut points: Vec<f64> = Vec::new();
            for (k, item) in OrbitIter::new(map, p.clone(), OrbitBudget::default())?
                .take(max_iter + 1)
                .enumerate()
            {
                let (x, _) = item?;
                let x = x.to_f64();
                let lo = key_of((x - tol).max(0.0));
                let hi = key_of((x + tol).min(1.0));
                // smallest period = largest earlier index within tol
                let best = seen
                    .range(lo..=hi)
                    .map(|(_, &j)| j)
                    .filter(|&j| (points[j] - x).abs() < tol)
                    .max();
                if let Some(j) = best {
                    return Ok(Some(PeriodicOrbitRecord {
                        point: Scalar::Float(points[j]),
                        period: k - j,
                        certified: false,
                    }));
                }
                seen.insert(key_of(x), k);
                points.push(x);
            }
            Ok(None)
        }
    }
}

/// The itinerary as a word over 1-based piece indices. Maps with at most
/// nine pieces print as plain digit strings; wider maps separate indices
/// with dots.
pub fn itinerary_word(orbit: &Orbit, piece_count: usize) -> String {
    let mut out = String::new();
    for (i, &piece) in orbit.itinerary.iter().enumerate() {
        if piece_count > 9 && i > 0 {
            out.push('.');
        }
        write!(out, "{}", piece + 1).unwrap();
    }
    out
}

/// Orbit CSV: columns k, x_k, piece_k (1-based pieces, exact scalars as p/q).
pub fn orbit_to_csv(orbit: &Orbit) -> String {
    let mut out = String::from("k,x_k,piece_k\n");
    for (k, (x, piece)) in orbit.points.iter().zip(&orbit.itinerary).enumerate() {
        writeln!(out, "{k},{x},{}", piece + 1).unwrap();
    }
    out
}

/// Exhaustive certified periodic-orbit search for exact affine maps.
///
/// Enumerates itinerary words of length <= `max_period` depth-first, pruning
/// by propagating the reachable image interval; each surviving word's affine
/// composition is solved exactly for fixed points, candidates are verified by
/// recomputing their itinerary, reduced to minimal period, and deduplicated
/// by the least point of their orbit. Words whose composition is the
/// identity on a whole cylinder contribute the cylinder midpoint as a
/// representative.
pub fn find_periodic_affine(
    map: &PiecewiseMap,
    max_period: usize,
    budget: OrbitBudget,
) -> Result<Vec<PeriodicOrbitRecord>> {
    if map.backend() != Backend::Exact {
        return Err(Error::BackendRequired { required: "exact" });
    }
    if !map.branches().iter().all(|b| b.is_affine()) {
        return Err(Error::AffineRequired);
    }
    let pieces = map.piece_count();
    let coeffs: Vec<(Scalar, Scalar)> = map
        .branches()
        .iter()
        .map(|b| match b {
            crate::branch::Branch::Affine { slope, intercept } => {
                (slope.clone(), intercept.clone())
            }
            _ => unreachable!("checked affine above"),
        })
        .collect();

    let mut found: HashSet<(crate::exact::ExactRational, usize)> = HashSet::new();
    let mut records: Vec<PeriodicOrbitRecord> = Vec::new();
    let mut examined = 0usize;

    // DFS node: word so far, base cylinder hull, composed map A x + B.
    struct Node {
        word: Vec<usize>,
        cyl_lo: Scalar,
        cyl_hi: Scalar,
        a: Scalar,
        b: Scalar,
    }

    let one = Scalar::one(Backend::Exact);
    let mut stack: Vec<Node> = Vec::new();
    for s in (0..pieces).rev() {
        let (lo, hi) = map.piece_hull(s);
        stack.push(Node {
            word: vec![s],
            cyl_lo: lo.clone(),
            cyl_hi: hi.clone(),
            a: one.clone(),
            b: Scalar::zero(Backend::Exact),
        });
    }

    while let Some(node) = stack.pop() {
        examined += 1;
        if examined > budget.max_words {
            return Err(Error::WordBudget { examined });
        }
        // compose the branch of the last symbol onto (a, b)
        let s = *node.word.last().expect("nonempty word");
        let (sa, sb) = &coeffs[s];
        let a = sa.mul(&node.a);
        let b = sa.mul(&node.b).add(sb);
        let k = node.word.len();

        // fixed points of x -> a x + b on this cylinder
        if a.cmp_value(&one) != std::cmp::Ordering::Equal {
            let denom = one.sub(&a);
            let candidate = b.div(&denom);
            if candidate.in_unit_interval() {
                try_record(map, &candidate, k, &node.word, &mut found, &mut records)?;
            }
        } else if b.is_zero() {
            // identity word: every interior cylinder point is periodic
            let two = Scalar::from_rational(2, 1, Backend::Exact);
            let mid = node.cyl_lo.add(&node.cyl_hi).div(&two);
            try_record(map, &mid, k, &node.word, &mut found, &mut records)?;
        }

        if k == max_period {
            continue;
        }

        // image of the cylinder under the composed word map
        let at_lo = node.cyl_lo.affine_apply(&a, &b);
        let at_hi = node.cyl_hi.affine_apply(&a, &b);
        let (img_lo, img_hi) = if at_lo.cmp_value(&at_hi) == std::cmp::Ordering::Greater {
            (at_hi, at_lo)
        } else {
            (at_lo, at_hi)
        };
        for s_next in (0..pieces).rev() {
            let (hull_lo, hull_hi) = map.piece_hull(s_next);
            let meet_lo = img_lo.clone().max_value(hull_lo.clone());
            let meet_hi = img_hi.clone().min_value(hull_hi.clone());
            if meet_lo.cmp_value(&meet_hi) == std::cmp::Ordering::Greater {
                continue;
            }
            // pull the clipped image back through x -> a x + b
            let (new_lo, new_hi) = if a.is_zero() {
                (node.cyl_lo.clone(), node.cyl_hi.clone())
            } else {
                let pre_a = meet_lo.sub(&b).div(&a);
                let pre_b = meet_hi.sub(&b).div(&a);
                if pre_a.cmp_value(&pre_b) == std::cmp::Ordering::Greater {
                    (pre_b, pre_a)
                } else {
                    (pre_a, pre_b)
                }
            };
            let new_lo = new_lo.max_value(node.cyl_lo.clone());
            let new_hi = new_hi.min_value(node.cyl_hi.clone());
            if new_lo.cmp_value(&new_hi) == std::cmp::Ordering::Greater {
                continue;
            }
            let mut word = node.word.clone();
            word.push(s_next);
            stack.push(Node {
                word,
                cyl_lo: new_lo,
                cyl_hi: new_hi,
                a: a.clone(),
                b: b.clone(),
            });
        }
    }

    records.sort_by(|r1, r2| {
        r1.point
            .cmp_value(&r2.point)
            .then(r1.period.cmp(&r2.period))
    });
    Ok(records)
}

/// Verifies a candidate periodic point, reduces to minimal period, and
/// inserts one canonical record per orbit.
fn try_record(
    map: &PiecewiseMap,
    candidate: &Scalar,
    word_len: usize,
    word: &[usize],
    found: &mut HashSet<(crate::exact::ExactRational, usize)>,
    records: &mut Vec<PeriodicOrbitRecord>,
) -> Result<()> {
    if !candidate.in_unit_interval() {
        return Ok(());
    }
    // recompute the actual itinerary and orbit of the candidate
    let mut orbit_points: Vec<Scalar> = Vec::with_capacity(word_len + 1);
    let mut x = candidate.clone();
    for &expected_piece in word.iter().take(word_len) {
        let (next, piece) = map.evaluate_with_piece(&x)?;
        if piece != expected_piece {
            return Ok(()); // itinerary mismatch: spurious solution
        }
        orbit_points.push(x);
        x = next;
    }
    if x.cmp_value(candidate) != std::cmp::Ordering::Equal {
        return Ok(());
    }
    // minimal period divides word_len
    let mut period = word_len;
    for (m, point) in orbit_points.iter().enumerate().skip(1) {
        if word_len.is_multiple_of(m) && point.cmp_value(candidate) == std::cmp::Ordering::Equal {
            period = m;
            break;
        }
    }
    let canonical = orbit_points[..period]
        .iter()
        .min_by(|a, b| a.cmp_value(b))
        .expect("nonempty orbit")
        .clone();
    let key = (canonical.as_exact().expect("exact backend").clone(), period);
    if found.insert(key) {
        records.push(PeriodicOrbitRecord {
            point: canonical,
            period,
            certified: true,
        });
    }
    Ok(())
}
