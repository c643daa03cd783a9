//! Shared generators for the integration suites: random admissible affine
//! maps in both backends, random polynomial test functions, and random exact
//! interval exchanges.

use pwdyn::branch::Branch;
use pwdyn::map::{PiecewiseMap, Side};
use pwdyn::measure::TestFunction;
use pwdyn::{Backend, Scalar};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random affine map with d <= `max_d` interior breakpoints, every branch
/// mapping its piece hull into [0,1], slopes within [-0.9, 0.9].
pub fn random_affine_float_map(rng: &mut ChaCha8Rng, max_d: usize) -> PiecewiseMap {
    let d = rng.random_range(0..=max_d);
    let mut interior: Vec<f64> = Vec::new();
    while interior.len() < d {
        let v: f64 = rng.random_range(0.05..0.95);
        if interior.iter().all(|u: &f64| (u - v).abs() > 0.02) {
            interior.push(v);
        }
    }
    interior.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut hulls = Vec::new();
    let mut prev = 0.0;
    for &x in &interior {
        hulls.push((prev, x));
        prev = x;
    }
    hulls.push((prev, 1.0));
    let branches = hulls
        .iter()
        .map(|&(lo, hi)| {
            let a: f64 = rng.random_range(-0.9..0.9);
            let (img_lo, img_hi) = ((a * lo).min(a * hi), (a * lo).max(a * hi));
            let b_min = -img_lo;
            let b_max = 1.0 - img_hi;
            let b = rng.random_range(b_min..=b_max);
            Branch::affine(Scalar::Float(a), Scalar::Float(b))
        })
        .collect();
    let map = PiecewiseMap::new(
        Backend::Float,
        interior.into_iter().map(Scalar::Float).collect(),
        branches,
        vec![Side::Right; d],
    )
    .expect("structurally sound");
    assert!(map.validate().is_valid(), "generator produced invalid map");
    map
}

/// Random affine map over exact rationals (denominators kept small so the
/// orbit arithmetic stays cheap).
pub fn random_affine_exact_map(rng: &mut ChaCha8Rng, max_d: usize) -> PiecewiseMap {
    let d = rng.random_range(0..=max_d);
    let mut ticks: Vec<i64> = Vec::new();
    while ticks.len() < d {
        let t = rng.random_range(8..248i64);
        if ticks.iter().all(|u| (u - t).abs() > 4) {
            ticks.push(t);
        }
    }
    ticks.sort_unstable();
    let r = |n: i64, d: i64| Scalar::from_rational(n, d, Backend::Exact);
    let mut hulls: Vec<(Scalar, Scalar)> = Vec::new();
    let mut prev = r(0, 1);
    for &t in &ticks {
        hulls.push((prev.clone(), r(t, 256)));
        prev = r(t, 256);
    }
    hulls.push((prev, r(1, 1)));
    let slopes = [
        (1i64, 2i64),
        (-1, 2),
        (1, 3),
        (2, 3),
        (-3, 4),
        (1, 1),
        (-1, 1),
        (0, 1),
    ];
    let branches = hulls
        .iter()
        .map(|(lo, hi)| {
            let (sn, sd) = slopes[rng.random_range(0..slopes.len())];
            let a = r(sn, sd);
            let at_lo = a.mul(lo);
            let at_hi = a.mul(hi);
            let (img_lo, img_hi) = if at_lo.cmp_value(&at_hi) == std::cmp::Ordering::Greater {
                (at_hi, at_lo)
            } else {
                (at_lo, at_hi)
            };
            // b in [-img_lo, 1 - img_hi], kept away from the ends so the
            // float rendering of the same map stays admissible
            let b_min = img_lo.neg();
            let span = Scalar::one(Backend::Exact).sub(&img_hi).sub(&b_min);
            let frac = r(rng.random_range(1..=63), 64);
            let b = b_min.add(&frac.mul(&span));
            Branch::affine(a, b)
        })
        .collect();
    let map = PiecewiseMap::new(
        Backend::Exact,
        ticks.into_iter().map(|t| r(t, 256)).collect(),
        branches,
        vec![Side::Right; d],
    )
    .expect("structurally sound");
    assert!(map.validate().is_valid(), "generator produced invalid map");
    map
}

#[allow(dead_code)] // each test target compiles its own copy of this module
pub fn random_poly_float(rng: &mut ChaCha8Rng, max_degree: usize) -> TestFunction {
    let degree = rng.random_range(0..=max_degree);
    let coeffs: Vec<Scalar> = (0..=degree)
        .map(|_| Scalar::Float(rng.random_range(-1.0..1.0)))
        .collect();
    TestFunction::polynomial(coeffs).expect("degree within cap")
}

pub fn random_poly_exact(rng: &mut ChaCha8Rng, max_degree: usize) -> TestFunction {
    let degree = rng.random_range(0..=max_degree);
    let coeffs: Vec<Scalar> = (0..=degree)
        .map(|_| Scalar::from_rational(rng.random_range(-16..=16), 16, Backend::Exact))
        .collect();
    TestFunction::polynomial(coeffs).expect("degree within cap")
}

/// Random exact interval exchange with `d` interior breakpoints, returned
/// as (map, per-piece offsets, per-piece flips).
pub fn random_exact_iet(rng: &mut ChaCha8Rng, d: usize) -> (PiecewiseMap, Vec<Scalar>, Vec<bool>) {
    let r = |n: i64, den: i64| Scalar::from_rational(n, den, Backend::Exact);
    let mut ticks: Vec<i64> = Vec::new();
    while ticks.len() < d {
        let t = rng.random_range(1..64i64);
        if !ticks.contains(&t) {
            ticks.push(t);
        }
    }
    ticks.sort_unstable();
    let mut breakpoints = vec![r(0, 1)];
    breakpoints.extend(ticks.iter().map(|&t| r(t, 64)));
    breakpoints.push(r(1, 1));
    let lengths: Vec<Scalar> = breakpoints.windows(2).map(|w| w[1].sub(&w[0])).collect();

    // random permutation of the pieces (Fisher-Yates)
    let mut perm: Vec<usize> = (0..=d).collect();
    for i in (1..perm.len()).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    let flips: Vec<bool> = (0..=d).map(|_| rng.random_bool(0.5)).collect();

    // stack images in permutation order
    let mut image_start = vec![Scalar::zero(Backend::Exact); d + 1];
    let mut cursor = Scalar::zero(Backend::Exact);
    for &piece in &perm {
        image_start[piece] = cursor.clone();
        cursor = cursor.add(&lengths[piece]);
    }

    let mut offsets = Vec::with_capacity(d + 1);
    let mut branches = Vec::with_capacity(d + 1);
    for i in 0..=d {
        let (t_lo, t_hi) = (&breakpoints[i], &breakpoints[i + 1]);
        let c = if flips[i] {
            image_start[i].add(t_hi)
        } else {
            image_start[i].sub(t_lo)
        };
        let slope = if flips[i] { r(-1, 1) } else { r(1, 1) };
        branches.push(Branch::affine(slope, c.clone()));
        offsets.push(c);
    }
    let map = PiecewiseMap::new(
        Backend::Exact,
        breakpoints[1..=d].to_vec(),
        branches,
        vec![Side::Right; d],
    )
    .expect("structurally sound");
    assert!(
        map.validate().is_valid(),
        "IET generator produced invalid map"
    );
    (map, offsets, flips)
}
