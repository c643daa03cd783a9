//! Acceptance suite: desk-scale reproductions of the qualitative claims the
//! library is built around, with pinned tolerances. Each criterion prints
//! one PASS/FAIL line (visible with `-- --nocapture`); wall-clock bounds are
//! enforced in optimized builds.

mod common;

use common::{
    random_affine_exact_map, random_affine_float_map, random_exact_iet, random_poly_exact,
    random_poly_float,
};
use pwdyn::connection::{breakpoint_mass, check_no_connections, SeedSource, Verdict, Witness};
use pwdyn::fixtures;
use pwdyn::map::Side;
use pwdyn::measure::{
    cdf_eval, choose_base_point, convergence_diag, empirical_measure, invariance_residual,
    wasserstein1, EmpiricalMeasure,
};
use pwdyn::orbit::{find_periodic_affine, iterate_orbit, OrbitBudget};
use pwdyn::semiconj::{
    build_h, conjugacy_defect, extract_iet, iet_evaluate, DefectOptions, ExtractOptions,
    MonotoneFactor,
};
use pwdyn::sweep::{constant_family, run_sweep, SweepConfig};
use pwdyn::{Backend, Scalar};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::cmp::Ordering;
use std::sync::{Mutex, MutexGuard};
use std::time::{Duration, Instant};

/// Criteria carry wall-clock bounds, so they run one at a time.
static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    SERIAL
        .lock()
        .unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn exact(n: i64, d: i64) -> Scalar {
    Scalar::from_rational(n, d, Backend::Exact)
}

fn finish(name: &str, ok: bool, started: Instant, bound: Duration) {
    let elapsed = started.elapsed();
    println!(
        "criterion {name}: {} [{elapsed:.2?}, bound {bound:.0?}]",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {name} failed");
    if !cfg!(debug_assertions) {
        assert!(
            elapsed < bound,
            "criterion {name} exceeded its runtime bound: {elapsed:?} >= {bound:?}"
        );
    }
}

fn ulp(x: f64) -> f64 {
    let a = x.abs();
    if a == 0.0 {
        return f64::MIN_POSITIVE;
    }
    f64::from_bits(a.to_bits() + 1) - a
}

#[test]
fn criterion_1_f1_periodic_points_and_no_connections() {
    let _guard = serial();
    let started = Instant::now();
    let f1 = fixtures::f1();

    let records = find_periodic_affine(&f1, 10, OrbitBudget::default()).unwrap();
    let periodic_ok = records.len() == 2
        && records[0].point == exact(1, 4)
        && records[0].period == 1
        && records[0].certified
        && records[1].point == exact(3, 4)
        && records[1].period == 1
        && records[1].certified;

    let report = check_no_connections(&f1, 64, &exact(0, 1)).unwrap();
    let connection_ok =
        report.verdict == Verdict::NoConnectionUpToDepth && report.witnesses.is_empty();

    finish(
        "1 (f1: two periodic points, no connections)",
        periodic_ok && connection_ok,
        started,
        Duration::from_secs(1),
    );
}

#[test]
fn criterion_2_f2_connection_no_periodic_points_mass_pile() {
    let _guard = serial();
    let started = Instant::now();
    let f2 = fixtures::f2();

    let report = check_no_connections(&f2, 1, &exact(0, 1)).unwrap();
    let witness = Witness {
        source: SeedSource::Lateral {
            index: 1,
            side: Side::Left,
        },
        step: 0,
        hit_breakpoint: 1,
        distance: exact(0, 1),
    };
    let connected_ok = report.verdict == Verdict::Connected && report.witnesses.contains(&witness);

    let periodic_ok = find_periodic_affine(&f2, 10, OrbitBudget::default())
        .unwrap()
        .is_empty();

    let n = 100_000;
    let masses = breakpoint_mass(&f2, &Scalar::zero(Backend::Exact), n, &exact(1, 100)).unwrap();
    // the orbit 1/2 - 2^-(k+1) enters the 1/100-ball at x_1 when k = 6
    let mass_ok = masses[1].count == n - 6 && masses[1].mass >= 0.999;

    finish(
        "2 (f2: connection, no periodic points, mass piles at 1/2)",
        connected_ok && periodic_ok && mass_ok,
        started,
        Duration::from_secs(5),
    );
}

#[test]
fn criterion_3_telescoping_invariance_residual() {
    let _guard = serial();
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x1907_2026);
    let mut ok = true;

    for case in 0..100 {
        let exact_case = case % 2 == 1;
        if exact_case {
            let map = random_affine_exact_map(&mut rng, 3);
            let phi = random_poly_exact(&mut rng, 4);
            let n = rng.random_range(10..=1500);
            let p = exact(rng.random_range(0..=128), 128);
            let m = empirical_measure(&map, &p, n, OrbitBudget::default()).unwrap();
            let residual = invariance_residual(&map, &m, &phi, OrbitBudget::default()).unwrap();
            let orbit = iterate_orbit(&map, &p, n + 1, OrbitBudget::default()).unwrap();
            let telescoped = phi
                .eval(&orbit.points[n])
                .sub(&phi.eval(&orbit.points[0]))
                .abs()
                .div(&exact(n as i64, 1));
            let bound = exact(2, n as i64).mul(phi.sup_bound());
            let case_ok = residual == telescoped && residual.cmp_value(&bound) != Ordering::Greater;
            if !case_ok {
                eprintln!("exact case {case}: residual {residual} vs {telescoped}");
                ok = false;
            }
        } else {
            let map = random_affine_float_map(&mut rng, 3);
            let phi = random_poly_float(&mut rng, 4);
            let n = rng.random_range(10..=10_000);
            let p = Scalar::Float(rng.random_range(0.0..1.0));
            let m = empirical_measure(&map, &p, n, OrbitBudget::default()).unwrap();
            let residual = invariance_residual(&map, &m, &phi, OrbitBudget::default())
                .unwrap()
                .to_f64();
            let orbit = iterate_orbit(&map, &p, n + 1, OrbitBudget::default()).unwrap();
            let telescoped =
                (phi.eval(&orbit.points[n]).to_f64() - phi.eval(&orbit.points[0]).to_f64()).abs()
                    / n as f64;
            let bound = 2.0 * phi.sup_bound().to_f64() / n as f64;
            let case_ok =
                (residual - telescoped).abs() <= 8.0 * ulp(telescoped) && residual <= bound;
            if !case_ok {
                eprintln!(
                    "float case {case}: residual {residual}, telescoped {telescoped}, bound {bound}"
                );
                ok = false;
            }
        }
    }

    finish(
        "3 (invariance residual telescopes, 100 random cases)",
        ok,
        started,
        Duration::from_secs(10),
    );
}

#[test]
fn criterion_4_golden_rotation_equidistribution() {
    let _guard = serial();
    let started = Instant::now();
    let golden = fixtures::golden();
    let p = choose_base_point(
        &golden,
        &Scalar::Float(0.0),
        64,
        10_000,
        &Scalar::Float(1e-12),
        OrbitBudget::default(),
    )
    .unwrap();

    let n = 100_000;
    let m = empirical_measure(&golden, &p, n, OrbitBudget::default()).unwrap();
    // Weyl equidistribution: the invariant measure is Lebesgue, so the CDF
    // tracks the identity to within the orbit discrepancy
    let mut sup = 0.0f64;
    let grid = 10_000;
    for j in 0..=grid {
        let x = j as f64 / grid as f64;
        let v = cdf_eval(&m, &Scalar::Float(x)).unwrap().to_f64();
        sup = sup.max((v - x).abs());
    }
    let cdf_ok = sup <= 2e-3;

    // the interpolated factor also tracks the identity CDF
    let h = build_h(&m, true);
    let mut sup_h = 0.0f64;
    for j in 0..=grid {
        let x = j as f64 / grid as f64;
        sup_h = sup_h.max((h.eval(&Scalar::Float(x)).to_f64() - x).abs());
    }
    let factor_ok = sup_h < 2e-3;

    let diag = convergence_diag(
        &golden,
        &p,
        &[1_000, 10_000, 100_000],
        OrbitBudget::default(),
    )
    .unwrap();
    let decreasing_ok =
        diag.len() == 2 && diag[0].1.to_f64() > diag[1].1.to_f64() && diag[1].1.to_f64() < 1e-3;

    if !cdf_ok {
        eprintln!("sup |cdf - x| = {sup}");
    }
    finish(
        "4 (golden rotation: CDF within 2e-3 of Lebesgue, W1 Cauchy decreasing)",
        cdf_ok && factor_ok && decreasing_ok,
        started,
        Duration::from_secs(5),
    );
}

#[test]
fn criterion_5_sqrt_conjugated_rotation_factor() {
    let _guard = serial();
    let started = Instant::now();
    let map = fixtures::golden_sqrt();
    let alpha = fixtures::GOLDEN_ALPHA;

    let p = choose_base_point(
        &map,
        &Scalar::Float(0.5),
        64,
        10_000,
        &Scalar::Float(1e-12),
        OrbitBudget::default(),
    )
    .unwrap();
    let n = 100_000;
    let m = empirical_measure(&map, &p, n, OrbitBudget::default()).unwrap();
    let h = build_h(&m, true);

    // oracle: the conjugacy x -> x^2 pushes Lebesgue to the CDF sqrt(x)
    let mut sup = 0.0f64;
    let grid = 10_000;
    for j in 0..=grid {
        let x = j as f64 / grid as f64;
        let v = h.eval(&Scalar::Float(x)).to_f64();
        sup = sup.max((v - x.sqrt()).abs());
    }
    let factor_ok = sup < 5e-3;

    let iet = extract_iet(&map, &h, ExtractOptions::default()).unwrap();
    let lengths = iet.lengths();
    let flips_ok = !iet.pieces[0].flip && !iet.pieces[1].flip;
    let lengths_ok = (lengths[0].to_f64() - (1.0 - alpha)).abs() < 5e-3
        && (lengths[1].to_f64() - alpha).abs() < 5e-3;

    let conj = conjugacy_defect(&map, &h, &iet, 10_000, DefectOptions::default()).unwrap();
    let conj_ok = conj.max_defect.to_f64() < 1e-2 && !conj.atomic_factor;

    let iso = isometry_defects_below(&map, &h, 1_000, 1e-2);

    // image intervals of the extracted exchange overlap at most by the
    // reported defect scale
    let (lo0, hi0) = iet.piece_image(0);
    let (lo1, hi1) = iet.piece_image(1);
    let overlap = (hi0.to_f64().min(hi1.to_f64()) - lo0.to_f64().max(lo1.to_f64())).max(0.0);
    let disjoint_ok = overlap <= conj.max_defect.to_f64() + 1e-2;

    if !factor_ok {
        eprintln!("sup |h - sqrt| = {sup}");
    }
    if !conj_ok {
        eprintln!("conjugacy defect = {}", conj.max_defect.to_f64());
    }
    finish(
        "5 (sqrt-conjugated rotation: h ~ sqrt(x), IET lengths/flips, defects < 1e-2)",
        factor_ok && flips_ok && lengths_ok && conj_ok && iso && disjoint_ok,
        started,
        Duration::from_secs(30),
    );
}

fn isometry_defects_below(
    map: &pwdyn::PiecewiseMap,
    h: &MonotoneFactor,
    pairs: usize,
    limit: f64,
) -> bool {
    let defects =
        pwdyn::semiconj::isometry_defect(map, h, pairs, DefectOptions::default()).unwrap();
    let ok = defects.iter().all(|d| d.to_f64() < limit);
    if !ok {
        eprintln!(
            "isometry defects: {:?}",
            defects.iter().map(Scalar::to_f64).collect::<Vec<_>>()
        );
    }
    ok
}

#[test]
fn criterion_6_exact_iet_round_trip() {
    let _guard = serial();
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0808_2026);
    let mut ok = true;

    for case in 0..50 {
        let d = rng.random_range(1..=5);
        let (map, offsets, flips) = random_exact_iet(&mut rng, d);
        let h = MonotoneFactor::identity(Backend::Exact);
        let iet = extract_iet(&map, &h, ExtractOptions::default()).unwrap();
        let mut case_ok = iet.breakpoints[..] == *map.partition();
        for i in 0..=d {
            case_ok &= iet.pieces[i].flip == flips[i] && iet.pieces[i].offset == offsets[i];
        }
        // within-piece distances preserved exactly at random sample pairs
        for i in 0..=d {
            let (lo, hi) = map.piece_hull(i);
            let width = hi.sub(lo);
            for _ in 0..4 {
                let ta = lo.add(&width.mul(&exact(rng.random_range(1..16), 16)));
                let tb = lo.add(&width.mul(&exact(rng.random_range(1..16), 16)));
                let image_dist = iet_evaluate(&iet, &ta)
                    .unwrap()
                    .distance(&iet_evaluate(&iet, &tb).unwrap());
                case_ok &= image_dist == ta.distance(&tb);
            }
        }
        if !case_ok {
            eprintln!("IET case {case} (d = {d}) failed round trip");
            ok = false;
        }
    }

    finish(
        "6 (50 random exact IETs reproduce exactly through extraction)",
        ok,
        started,
        Duration::from_secs(5),
    );
}

#[test]
fn criterion_7_constant_family_sweep() {
    let _guard = serial();
    let started = Instant::now();
    let config = SweepConfig {
        branch_templates: constant_family(&[0.37, 0.81, 0.59]),
        sample_count: 1_000,
        depth: 1_000,
        tol: 1e-12,
        seed: 0xC0FFEE,
        workers: 0,
    };
    let result = run_sweep(&config).unwrap();
    let fractions_ok = result.connected == 0 && (result.undecided as f64) < 0.01 * 1_000.0;

    let rerun = run_sweep(&config).unwrap();
    let deterministic_ok = result.to_json() == rerun.to_json() && result.to_csv() == rerun.to_csv();

    if !fractions_ok {
        eprintln!(
            "connected {} undecided {}",
            result.connected, result.undecided
        );
    }
    finish(
        "7 (constant-branch sweep: no connections found, byte-identical rerun)",
        fractions_ok && deterministic_ok,
        started,
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_8_metric_cdf_and_verdict_monotonicity() {
    let _guard = serial();
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x8BA1);
    let mut ok = true;

    // W1 metric axioms on 1000 random triples
    let random_measure = |rng: &mut ChaCha8Rng| {
        let n = rng.random_range(1..40);
        let samples: Vec<Scalar> = (0..n)
            .map(|_| Scalar::Float(rng.random_range(0.0..=1.0)))
            .collect();
        EmpiricalMeasure::from_samples(samples[0].clone(), samples)
    };
    for _ in 0..1_000 {
        let m1 = random_measure(&mut rng);
        let m2 = random_measure(&mut rng);
        let m3 = random_measure(&mut rng);
        let d12 = wasserstein1(&m1, &m2).to_f64();
        let d21 = wasserstein1(&m2, &m1).to_f64();
        let d11 = wasserstein1(&m1, &m1).to_f64();
        let d13 = wasserstein1(&m1, &m3).to_f64();
        let d23 = wasserstein1(&m2, &m3).to_f64();
        if d12 != d21 || d11 != 0.0 || d13 > d12 + d23 + 1e-12 {
            ok = false;
        }
    }

    // CDF monotonicity and the counting identity on 1000 random orbits
    for _ in 0..1_000 {
        let map = random_affine_float_map(&mut rng, 3);
        let n = rng.random_range(1..=64);
        let p = Scalar::Float(rng.random_range(0.0..1.0));
        let m = empirical_measure(&map, &p, n, OrbitBudget::default()).unwrap();
        let mut prev = -1.0f64;
        for j in 0..=20 {
            let v = cdf_eval(&m, &Scalar::Float(j as f64 / 20.0))
                .unwrap()
                .to_f64();
            if v < prev {
                ok = false;
            }
            prev = v;
        }
        if cdf_eval(&m, &Scalar::Float(1.0)).unwrap().to_f64() != 1.0 {
            ok = false;
        }
        let mut ends = [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
        ends.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let (a, b) = (Scalar::Float(ends[0]), Scalar::Float(ends[1]));
        let direct = m
            .samples()
            .iter()
            .filter(|s| {
                s.cmp_value(&a) == Ordering::Greater && s.cmp_value(&b) != Ordering::Greater
            })
            .count();
        if m.count_in(&a, &b) != direct || m.count_leq(&b) - m.count_leq(&a) != direct {
            ok = false;
        }
    }

    // verdict monotonicity in depth and tolerance across all fixtures
    for (name, _) in fixtures::list() {
        let map = fixtures::by_name(name).unwrap();
        let tols: Vec<Scalar> = match map.backend() {
            Backend::Exact => vec![exact(0, 1)],
            Backend::Float => vec![
                Scalar::Float(1e-9),
                Scalar::Float(1e-12),
                Scalar::Float(1e-15),
            ],
        };
        let depths = [1usize, 4, 16, 64, 256];
        for (ti, tol) in tols.iter().enumerate() {
            let mut verdicts = Vec::new();
            for &d in &depths {
                verdicts.push(check_no_connections(&map, d, tol).unwrap().verdict);
            }
            for i in 0..depths.len() {
                if verdicts[i] == Verdict::NoConnectionUpToDepth
                    && verdicts[..i]
                        .iter()
                        .any(|v| *v != Verdict::NoConnectionUpToDepth)
                {
                    eprintln!("{name}: depth monotonicity broken");
                    ok = false;
                }
            }
            // tolerance monotonicity: clean at a tol stays clean at smaller
            if ti + 1 < tols.len() {
                let coarse = check_no_connections(&map, 64, tol).unwrap().verdict;
                let fine = check_no_connections(&map, 64, &tols[ti + 1])
                    .unwrap()
                    .verdict;
                if coarse == Verdict::NoConnectionUpToDepth
                    && fine != Verdict::NoConnectionUpToDepth
                {
                    eprintln!("{name}: tolerance monotonicity broken");
                    ok = false;
                }
            }
        }
    }

    finish(
        "8 (W1 metric axioms, CDF counting identities, verdict monotonicity)",
        ok,
        started,
        Duration::from_secs(30),
    );
}
