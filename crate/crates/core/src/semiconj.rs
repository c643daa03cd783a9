//! The monotone factor h(x) = mu([0,x]), extraction of the interval
//! exchange transformation T with T.h = h.f, and the conjugacy/isometry
//! defect measurements that quantify how well finite data realizes the
//! semi-conjugacy.

use crate::error::{Error, Result};
use crate::map::PiecewiseMap;
use crate::measure::EmpiricalMeasure;
use crate::scalar::{Backend, Scalar};
use serde_json::json;
use std::cmp::Ordering;
use std::fmt::Write as _;

/// Nondecreasing factor map represented by nodes (x_j, h(x_j)); evaluated
/// either as a right-continuous step function or with linear interpolation.
#[derive(Clone, Debug, PartialEq)]
pub struct MonotoneFactor {
    nodes: Vec<(Scalar, Scalar)>,
    interpolate: bool,
    /// Largest single-value sample mass (atom diagnostic); 0 for synthetic
    /// factors.
    atom_peak: f64,
    /// Sample count of the backing measure; 0 for synthetic factors.
    sample_count: usize,
}

/// h(x) = cdf of the measure; with `interpolate` the steps are joined
/// linearly, restoring a continuous (strictly increasing between distinct
/// samples) factor.
pub fn build_h(m: &EmpiricalMeasure, interpolate: bool) -> MonotoneFactor {
    let backend = m.backend();
    let n = m.len();
    let mut nodes: Vec<(Scalar, Scalar)> = Vec::new();
    let samples = m.samples();
    let mut max_mult = 0usize;
    let mut i = 0usize;
    while i < n {
        let mut j = i + 1;
        while j < n && samples[j].cmp_value(&samples[i]) == Ordering::Equal {
            j += 1;
        }
        max_mult = max_mult.max(j - i);
        let cum = match backend {
            Backend::Exact => {
                Scalar::Exact(crate::exact::ExactRational::from_pair(j as i64, n as i64))
            }
            Backend::Float => Scalar::Float(j as f64 / n as f64),
        };
        nodes.push((samples[i].clone(), cum));
        i = j;
    }
    if !nodes[0].0.is_zero() {
        nodes.insert(0, (Scalar::zero(backend), Scalar::zero(backend)));
    }
    let one = Scalar::one(backend);
    if nodes.last().unwrap().0.cmp_value(&one) == Ordering::Less {
        nodes.push((one.clone(), one));
    }
    MonotoneFactor {
        nodes,
        interpolate,
        atom_peak: max_mult as f64 / n as f64,
        sample_count: n,
    }
}

impl MonotoneFactor {
    /// The identity factor h(x) = x (used for maps that are already
    /// interval exchanges).
    pub fn identity(backend: Backend) -> Self {
        MonotoneFactor {
            nodes: vec![
                (Scalar::zero(backend), Scalar::zero(backend)),
                (Scalar::one(backend), Scalar::one(backend)),
            ],
            interpolate: true,
            atom_peak: 0.0,
            sample_count: 0,
        }
    }

    pub fn nodes(&self) -> &[(Scalar, Scalar)] {
        &self.nodes
    }

    pub fn interpolating(&self) -> bool {
        self.interpolate
    }

    pub fn atom_peak(&self) -> f64 {
        self.atom_peak
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn backend(&self) -> Backend {
        self.nodes[0].0.backend()
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let pos = self
            .nodes
            .partition_point(|(nx, _)| nx.cmp_value(x) != Ordering::Greater);
        if pos == 0 {
            // below the first node (possible only if no sample at 0)
            return Scalar::zero(self.backend());
        }
        let (x0, v0) = &self.nodes[pos - 1];
        if !self.interpolate || pos == self.nodes.len() {
            return v0.clone();
        }
        let (x1, v1) = &self.nodes[pos];
        if x.cmp_value(x0) == Ordering::Equal {
            return v0.clone();
        }
        let t = x.sub(x0).div(&x1.sub(x0));
        v0.add(&t.mul(&v1.sub(v0)))
    }

    /// Two-column CSV of h on a uniform grid.
    pub fn to_csv(&self, resolution: usize) -> String {
        let backend = self.backend();
        let mut out = String::from("x,h\n");
        for j in 0..=resolution {
            let x = Scalar::from_rational(j as i64, resolution as i64, backend);
            writeln!(out, "{x},{}", self.eval(&x)).unwrap();
        }
        out
    }
}

/// One piece of an extracted interval exchange: the isometry t -> t + c
/// (flip off) or t -> c - t (flip on) together with its fit residual.
#[derive(Clone, Debug, PartialEq)]
pub struct IetPiece {
    pub offset: Scalar,
    pub flip: bool,
    pub residual: Scalar,
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IetData {
    /// t_0 = 0 <= t_1 <= ... <= t_{d+1} = 1.
    pub breakpoints: Vec<Scalar>,
    pub pieces: Vec<IetPiece>,
}

impl IetData {
    pub fn backend(&self) -> Backend {
        self.breakpoints[0].backend()
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    pub fn lengths(&self) -> Vec<Scalar> {
        self.breakpoints
            .windows(2)
            .map(|w| w[1].sub(&w[0]))
            .collect()
    }

    /// Image interval of piece i as (left, right).
    pub fn piece_image(&self, i: usize) -> (Scalar, Scalar) {
        let (lo, hi) = (&self.breakpoints[i], &self.breakpoints[i + 1]);
        let piece = &self.pieces[i];
        if piece.degenerate {
            return (lo.clone(), hi.clone());
        }
        if piece.flip {
            (piece.offset.sub(hi), piece.offset.sub(lo))
        } else {
            (lo.add(&piece.offset), hi.add(&piece.offset))
        }
    }

    /// Order of the non-degenerate pieces by image position: entry k is the
    /// source piece occupying the k-th image slot.
    pub fn permutation(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.pieces.len())
            .filter(|&i| !self.pieces[i].degenerate)
            .collect();
        order.sort_by(|&a, &b| {
            let (la, _) = self.piece_image(a);
            let (lb, _) = self.piece_image(b);
            la.cmp_value(&lb)
        });
        order
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        json!({
            "breakpoints": self.breakpoints,
            "lengths": self.lengths(),
            "offsets": self.pieces.iter().map(|p| p.offset.clone()).collect::<Vec<_>>(),
            "flips": self.pieces.iter().map(|p| p.flip).collect::<Vec<_>>(),
            "residuals": self.pieces.iter().map(|p| p.residual.clone()).collect::<Vec<_>>(),
            "degenerate": self.pieces.iter().map(|p| p.degenerate).collect::<Vec<_>>(),
            "permutation": self.permutation(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("iet serializes")
    }
}

/// Evaluates the interval exchange at t, choosing pieces by the right
/// convention at breakpoints. Degenerate pieces act as the identity.
pub fn iet_evaluate(iet: &IetData, t: &Scalar) -> Result<Scalar> {
    if !t.in_unit_interval() {
        return Err(Error::Domain { x: t.to_string() });
    }
    let last = iet.pieces.len() - 1;
    let idx = iet
        .breakpoints
        .partition_point(|b| b.cmp_value(t) != Ordering::Greater);
    // idx = first breakpoint index strictly greater than t; piece = idx - 1
    // implements the right convention, clamped to the final piece at t = 1.
    let piece_idx = idx.saturating_sub(1).min(last);
    let piece = &iet.pieces[piece_idx];
    if piece.degenerate {
        return Ok(t.clone());
    }
    Ok(if piece.flip {
        piece.offset.sub(t)
    } else {
        t.add(&piece.offset)
    })
}

#[derive(Clone, Copy, Debug)]
pub struct ExtractOptions {
    /// Interior sample points per piece used for the isometric regression.
    pub samples_per_piece: usize,
    /// Pieces with image length at or below the threshold are flagged
    /// DEGENERATE; None uses 2/n from the factor's backing sample count
    /// (0 for synthetic factors, so only zero-length pieces degenerate).
    pub degeneracy_threshold: Option<f64>,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            samples_per_piece: 64,
            degeneracy_threshold: None,
        }
    }
}

/// Builds the interval exchange T with T(h(x)) = h(f(x)) from sampled data.
///
/// For each non-degenerate piece, interior points x are pushed through
/// (h(x), h(f(x))) and both isometric models are fitted by their Chebyshev
/// center (offset = (max+min)/2 of the per-pair constants); the model with
/// the smaller max residual wins, ties preferring no flip.
pub fn extract_iet(
    map: &PiecewiseMap,
    h: &MonotoneFactor,
    options: ExtractOptions,
) -> Result<IetData> {
    let backend = map.backend();
    let d = map.interior_count();
    let mut breakpoints = Vec::with_capacity(d + 2);
    breakpoints.push(Scalar::zero(backend));
    for i in 1..=d {
        breakpoints.push(h.eval(&map.partition()[i]));
    }
    breakpoints.push(Scalar::one(backend));

    let threshold = match options.degeneracy_threshold {
        Some(t) => t,
        None => {
            if h.sample_count() == 0 {
                0.0
            } else {
                2.0 / h.sample_count() as f64
            }
        }
    };

    let k = options.samples_per_piece.max(2);
    let mut image_points: Vec<(Scalar, Scalar)> = Vec::new(); // (x, f(x)) for injectivity
    let mut pieces = Vec::with_capacity(d + 1);
    for i in 0..=d {
        let t_lo = &breakpoints[i];
        let t_hi = &breakpoints[i + 1];
        let length = t_hi.sub(t_lo);
        if length.to_f64() <= threshold {
            pieces.push(IetPiece {
                offset: Scalar::zero(backend),
                flip: false,
                residual: Scalar::zero(backend),
                degenerate: true,
            });
            continue;
        }
        let (x_lo, x_hi) = map.piece_hull(i);
        let width = x_hi.sub(x_lo);
        let mut off_consts: Vec<Scalar> = Vec::with_capacity(k);
        let mut on_consts: Vec<Scalar> = Vec::with_capacity(k);
        for j in 1..=k {
            let frac = Scalar::from_rational(j as i64, (k + 1) as i64, backend);
            let x = x_lo.add(&frac.mul(&width));
            let fx = map.evaluate(&x)?;
            let t = h.eval(&x);
            let y = h.eval(&fx);
            off_consts.push(y.sub(&t));
            on_consts.push(y.add(&t));
            image_points.push((x, fx));
        }
        let (off_c, off_r) = chebyshev_fit(&off_consts);
        let (on_c, on_r) = chebyshev_fit(&on_consts);
        let flip = on_r.cmp_value(&off_r) == Ordering::Less;
        pieces.push(IetPiece {
            offset: if flip { on_c } else { off_c },
            flip,
            residual: if flip { on_r } else { off_r },
            degenerate: false,
        });
    }

    // injectivity on the sample set: identical image values from distinct
    // sources mean the exchange structure cannot exist
    image_points.sort_by(|a, b| a.1.cmp_value(&b.1));
    for w in image_points.windows(2) {
        if w[0].1.cmp_value(&w[1].1) == Ordering::Equal
            && w[0].0.cmp_value(&w[1].0) != Ordering::Equal
        {
            return Err(Error::NonInjectiveSample {
                x: w[0].0.to_string(),
                y: w[1].0.to_string(),
            });
        }
    }

    Ok(IetData {
        breakpoints,
        pieces,
    })
}

fn chebyshev_fit(consts: &[Scalar]) -> (Scalar, Scalar) {
    let mut min = consts[0].clone();
    let mut max = consts[0].clone();
    for c in &consts[1..] {
        if c.cmp_value(&min) == Ordering::Less {
            min = c.clone();
        }
        if c.cmp_value(&max) == Ordering::Greater {
            max = c.clone();
        }
    }
    let backend = min.backend();
    let half = Scalar::from_rational(1, 2, backend);
    let center = min.add(&max).mul(&half);
    let radius = max.sub(&min).mul(&half);
    (center, radius)
}

#[derive(Clone, Debug)]
pub struct DefectReport {
    pub max_defect: Scalar,
    pub samples_used: usize,
    /// Set when the factor is dominated by a single atom (a fixed-point
    /// measure collapses h to one step and the defect is vacuous).
    pub atomic_factor: bool,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct DefectOptions {
    /// Half-width of the excluded neighborhoods around critical points;
    /// None uses 10 grid steps.
    pub exclusion_width: Option<f64>,
}

fn excluded(x: &Scalar, critical: &[Scalar], width: f64) -> bool {
    critical.iter().any(|c| x.distance(c).to_f64() <= width)
}

/// max |T(h(x)) - h(f(x))| over a uniform grid of `sample_count` points plus
/// the factor's own nodes, excluding neighborhoods of the critical set
/// (the conjugacy relation is derived on open pieces).
pub fn conjugacy_defect(
    map: &PiecewiseMap,
    h: &MonotoneFactor,
    iet: &IetData,
    sample_count: usize,
    options: DefectOptions,
) -> Result<DefectReport> {
    let backend = map.backend();
    let width = options
        .exclusion_width
        .unwrap_or(10.0 / sample_count as f64);
    let critical = map.critical_set();
    let mut candidates: Vec<Scalar> = Vec::with_capacity(sample_count + h.nodes().len());
    for j in 0..=sample_count {
        candidates.push(Scalar::from_rational(
            j as i64,
            sample_count as i64,
            backend,
        ));
    }
    for (x, _) in h.nodes() {
        candidates.push(x.clone());
    }
    let mut max_defect = Scalar::zero(backend);
    let mut used = 0usize;
    for x in candidates {
        if excluded(&x, &critical, width) {
            continue;
        }
        let fx = map.evaluate(&x)?;
        let lhs = iet_evaluate(iet, &h.eval(&x))?;
        let rhs = h.eval(&fx);
        let defect = lhs.distance(&rhs);
        if defect.cmp_value(&max_defect) == Ordering::Greater {
            max_defect = defect;
        }
        used += 1;
    }
    Ok(DefectReport {
        max_defect,
        samples_used: used,
        atomic_factor: h.atom_peak() >= 0.5,
    })
}

/// Per-piece max over sampled interior pairs (x, y) of
/// ||h(f(x)) - h(f(y))| - |h(x) - h(y)||, the empirical deviation from the
/// piecewise isometry relation.
pub fn isometry_defect(
    map: &PiecewiseMap,
    h: &MonotoneFactor,
    pair_count: usize,
    options: DefectOptions,
) -> Result<Vec<Scalar>> {
    let backend = map.backend();
    // k grid points per piece give ~k^2/2 pairs
    let k = (((2 * pair_count.max(1)) as f64).sqrt().ceil() as usize).max(2);
    let width = options.exclusion_width.unwrap_or(10.0 / (k * k) as f64);
    let critical = map.critical_set();
    let mut out = Vec::with_capacity(map.piece_count());
    for i in 0..map.piece_count() {
        let (x_lo, x_hi) = map.piece_hull(i);
        let piece_width = x_hi.sub(x_lo);
        let mut points: Vec<(Scalar, Scalar)> = Vec::with_capacity(k); // (h(x), h(f(x)))
        for j in 1..=k {
            let frac = Scalar::from_rational(j as i64, (k + 1) as i64, backend);
            let x = x_lo.add(&frac.mul(&piece_width));
            if excluded(&x, &critical, width) {
                continue;
            }
            let fx = map.evaluate(&x)?;
            points.push((h.eval(&x), h.eval(&fx)));
        }
        let mut worst = Scalar::zero(backend);
        for a in 0..points.len() {
            for b in a + 1..points.len() {
                let dh = points[a].0.distance(&points[b].0);
                let dhf = points[a].1.distance(&points[b].1);
                let defect = dh.distance(&dhf);
                if defect.cmp_value(&worst) == Ordering::Greater {
                    worst = defect;
                }
            }
        }
        out.push(worst);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::measure::{empirical_measure, EmpiricalMeasure};
    use crate::orbit::OrbitBudget;

    fn exact(n: i64, d: i64) -> Scalar {
        Scalar::from_rational(n, d, Backend::Exact)
    }

    #[test]
    fn single_sample_factor_is_a_unit_step() {
        let m = EmpiricalMeasure::from_samples(exact(1, 2), vec![exact(1, 2)]);
        let h = build_h(&m, false);
        assert_eq!(h.eval(&exact(1, 4)), exact(0, 1));
        assert_eq!(h.eval(&exact(1, 2)), exact(1, 1));
        assert_eq!(h.eval(&exact(3, 4)), exact(1, 1));
        assert_eq!(h.atom_peak(), 1.0);
    }

    #[test]
    fn factor_is_monotone_with_unit_top() {
        let m = empirical_measure(
            &fixtures::f2(),
            &Scalar::zero(Backend::Exact),
            64,
            OrbitBudget::default(),
        )
        .unwrap();
        for interpolate in [false, true] {
            let h = build_h(&m, interpolate);
            let mut prev = h.eval(&Scalar::zero(Backend::Exact));
            for j in 1..=100 {
                let x = exact(j, 100);
                let v = h.eval(&x);
                assert!(v.cmp_value(&prev) != Ordering::Less);
                prev = v;
            }
            assert_eq!(h.eval(&Scalar::one(Backend::Exact)), exact(1, 1));
        }
    }

    #[test]
    fn step_factor_agrees_with_cdf() {
        let m = empirical_measure(
            &fixtures::f2(),
            &Scalar::zero(Backend::Exact),
            32,
            OrbitBudget::default(),
        )
        .unwrap();
        let h = build_h(&m, false);
        for j in 0..=40 {
            let x = exact(j, 40);
            assert_eq!(h.eval(&x), crate::measure::cdf_eval(&m, &x).unwrap());
        }
    }

    #[test]
    fn golden_identity_extraction() {
        let golden = fixtures::golden();
        let h = MonotoneFactor::identity(Backend::Float);
        let iet = extract_iet(&golden, &h, ExtractOptions::default()).unwrap();
        let alpha = fixtures::GOLDEN_ALPHA;
        let lengths = iet.lengths();
        assert!((lengths[0].to_f64() - (1.0 - alpha)).abs() < 1e-15);
        assert!((lengths[1].to_f64() - alpha).abs() < 1e-15);
        assert!(!iet.pieces[0].flip && !iet.pieces[1].flip);
        assert!((iet.pieces[0].offset.to_f64() - alpha).abs() < 1e-12);
        assert!((iet.pieces[1].offset.to_f64() - (alpha - 1.0)).abs() < 1e-12);
        assert_eq!(iet.permutation(), vec![1, 0]);
        // the exchange sends 0 to the first piece's offset
        let at_zero = iet_evaluate(&iet, &Scalar::Float(0.0)).unwrap().to_f64();
        assert!((at_zero - alpha).abs() < 1e-12);

        let report = conjugacy_defect(&golden, &h, &iet, 1000, DefectOptions::default()).unwrap();
        assert!(report.max_defect.to_f64() < 1e-12);
        assert!(!report.atomic_factor);

        let defects = isometry_defect(&golden, &h, 1000, DefectOptions::default()).unwrap();
        for d in defects {
            assert!(d.to_f64() < 1e-12);
        }
    }

    #[test]
    fn involution_extraction_finds_flips() {
        let map = fixtures::involution();
        let h = MonotoneFactor::identity(Backend::Exact);
        let iet = extract_iet(&map, &h, ExtractOptions::default()).unwrap();
        assert!(iet.pieces[0].flip && iet.pieces[1].flip);
        assert_eq!(iet.pieces[0].offset, exact(3, 5));
        assert_eq!(iet.pieces[1].offset, exact(8, 5));
        assert_eq!(iet.pieces[0].residual, exact(0, 1));
        // its own iet reproduces the map exactly
        let report = conjugacy_defect(&map, &h, &iet, 500, DefectOptions::default()).unwrap();
        assert_eq!(report.max_defect, exact(0, 1));
    }

    #[test]
    fn iet_evaluate_conventions() {
        let map = fixtures::involution();
        let h = MonotoneFactor::identity(Backend::Exact);
        let iet = extract_iet(&map, &h, ExtractOptions::default()).unwrap();
        // flipped involution at alpha = 3/5: t = 0.1 -> 0.5
        assert_eq!(iet_evaluate(&iet, &exact(1, 10)).unwrap(), exact(1, 2));
        // right convention at the breakpoint
        assert_eq!(
            iet_evaluate(&iet, &exact(3, 5)).unwrap(),
            exact(8, 5).sub(&exact(3, 5))
        );
        // within-piece isometry
        let t = exact(1, 7);
        let s = exact(2, 7);
        let dt = iet_evaluate(&iet, &t)
            .unwrap()
            .distance(&iet_evaluate(&iet, &s).unwrap());
        assert_eq!(dt, t.distance(&s));
        assert!(iet_evaluate(&iet, &exact(11, 10)).is_err());
    }

    #[test]
    fn iet_lookup_skips_zero_width_pieces() {
        // middle piece collapsed to a point: t = 1/2 must land on the
        // positive-width neighbor to its right
        let iet = IetData {
            breakpoints: vec![exact(0, 1), exact(1, 2), exact(1, 2), exact(1, 1)],
            pieces: vec![
                IetPiece {
                    offset: exact(1, 2),
                    flip: false,
                    residual: exact(0, 1),
                    degenerate: false,
                },
                IetPiece {
                    offset: exact(0, 1),
                    flip: false,
                    residual: exact(0, 1),
                    degenerate: true,
                },
                IetPiece {
                    offset: exact(-1, 2),
                    flip: false,
                    residual: exact(0, 1),
                    degenerate: false,
                },
            ],
        };
        assert_eq!(iet_evaluate(&iet, &exact(1, 2)).unwrap(), exact(0, 1));
        assert_eq!(iet_evaluate(&iet, &exact(1, 4)).unwrap(), exact(3, 4));
        assert_eq!(iet_evaluate(&iet, &exact(1, 1)).unwrap(), exact(1, 2));
        // the degenerate slot is excluded from the permutation
        assert_eq!(iet.permutation(), vec![2, 0]);
    }

    #[test]
    fn atomic_factor_flagged() {
        // the fixed-point measure collapses h to a single step
        let f1 = fixtures::f1();
        let m = empirical_measure(&f1, &exact(3, 4), 50, OrbitBudget::default()).unwrap();
        let h = build_h(&m, false);
        let iet = extract_iet(&f1, &h, ExtractOptions::default()).unwrap();
        let report = conjugacy_defect(&f1, &h, &iet, 400, DefectOptions::default()).unwrap();
        assert!(report.atomic_factor);
        assert_eq!(report.max_defect, exact(0, 1));
        // piece 2 carries all the mass; piece 1 has h-length 0 -> degenerate
        assert!(iet.pieces[0].degenerate);
    }

    #[test]
    fn defect_shrinks_under_refinement_up_to_w1() {
        // refining the factor cannot worsen the conjugacy defect by more
        // than the measure movement plus the defect grid resolution
        let golden = fixtures::golden();
        let p = Scalar::Float(0.0);
        let coarse_m = empirical_measure(&golden, &p, 4_000, OrbitBudget::default()).unwrap();
        let fine_m = empirical_measure(&golden, &p, 12_000, OrbitBudget::default()).unwrap();
        let sample_count = 1_000;
        let defect_of = |m: &EmpiricalMeasure| {
            let h = build_h(m, true);
            let iet = extract_iet(&golden, &h, ExtractOptions::default()).unwrap();
            conjugacy_defect(&golden, &h, &iet, sample_count, DefectOptions::default())
                .unwrap()
                .max_defect
                .to_f64()
        };
        let coarse = defect_of(&coarse_m);
        let fine = defect_of(&fine_m);
        let movement = crate::measure::wasserstein1(&coarse_m, &fine_m).to_f64();
        let resolution = 1.0 / sample_count as f64;
        assert!(
            fine <= coarse + movement + resolution,
            "{fine} > {coarse} + {movement} + {resolution}"
        );
    }

    #[test]
    fn non_injective_sampling_detected() {
        // x + 1/2 and x overlay their images; aligned per-piece samples
        // collide exactly
        let map = crate::map::PiecewiseMap::new(
            Backend::Exact,
            vec![exact(1, 2)],
            vec![
                crate::branch::Branch::affine_rational((1, 1), (1, 2), Backend::Exact),
                crate::branch::Branch::affine_rational((1, 1), (0, 1), Backend::Exact),
            ],
            vec![crate::map::Side::Right],
        )
        .unwrap();
        // synthetic measure spreading mass over both pieces
        let samples: Vec<Scalar> = (0..16).map(|k| exact(k, 16)).collect();
        let m = EmpiricalMeasure::from_samples(exact(0, 1), samples);
        let h = build_h(&m, true);
        let err = extract_iet(&map, &h, ExtractOptions::default()).unwrap_err();
        assert!(matches!(
            err,
            crate::error::Error::NonInjectiveSample { .. }
        ));
    }

    #[test]
    fn f2_factor_construction_fails_loudly() {
        // f2 has no invariant measure: its orbit measure leaves piece 2
        // empty (degenerate) and the conjugacy relation breaks at order one
        let f2 = fixtures::f2();
        let m = empirical_measure(
            &f2,
            &Scalar::zero(Backend::Exact),
            256,
            OrbitBudget::default(),
        )
        .unwrap();
        let h = build_h(&m, true);
        let iet = extract_iet(&f2, &h, ExtractOptions::default()).unwrap();
        assert!(iet.pieces[1].degenerate);
        let report = conjugacy_defect(&f2, &h, &iet, 2000, DefectOptions::default()).unwrap();
        assert!(report.max_defect.to_f64() > 0.5);
    }

    #[test]
    fn json_round_shape() {
        let map = fixtures::involution();
        let h = MonotoneFactor::identity(Backend::Exact);
        let iet = extract_iet(&map, &h, ExtractOptions::default()).unwrap();
        let text = iet.to_json();
        assert!(text.contains("breakpoints"));
        assert!(text.contains("flips"));
        assert!(text.contains("permutation"));
    }
}
