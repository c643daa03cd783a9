//! Empirical orbit measures: Birkhoff averages of Dirac masses, their CDFs,
//! the Wasserstein-1 proxy for weak-star convergence, and the telescoping
//! invariance residual.

use crate::error::{Error, Result};
use crate::exact::ExactRational;
use crate::map::PiecewiseMap;
use crate::orbit::{OrbitBudget, OrbitIter};
use crate::scalar::{Backend, Scalar};
use std::cmp::Ordering;
use std::fmt::Write as _;

/// The measure mu_n = (1/n) sum of Dirac masses at the first n iterates of
/// the base point, stored as a sorted sample multiset.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalMeasure {
    base: Scalar,
    samples: Vec<Scalar>,
}

impl EmpiricalMeasure {
    pub fn from_samples(base: Scalar, mut samples: Vec<Scalar>) -> Self {
        assert!(
            !samples.is_empty(),
            "empirical measure needs n >= 1 samples"
        );
        samples.sort_by(|a, b| a.cmp_value(b));
        EmpiricalMeasure { base, samples }
    }

    pub fn base_point(&self) -> &Scalar {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires n >= 1
    }

    pub fn backend(&self) -> Backend {
        self.base.backend()
    }

    /// Sorted sample values.
    pub fn samples(&self) -> &[Scalar] {
        &self.samples
    }

    pub fn count_leq(&self, x: &Scalar) -> usize {
        self.samples
            .partition_point(|s| s.cmp_value(x) != Ordering::Greater)
    }

    pub fn count_lt(&self, x: &Scalar) -> usize {
        self.samples
            .partition_point(|s| s.cmp_value(x) == Ordering::Less)
    }

    /// Samples in the left-open interval (a, b].
    pub fn count_in(&self, a: &Scalar, b: &Scalar) -> usize {
        self.count_leq(b).saturating_sub(self.count_leq(a))
    }

    fn fraction(&self, count: usize) -> Scalar {
        match self.backend() {
            Backend::Exact => Scalar::Exact(ExactRational::from_pair(
                count as i64,
                self.samples.len() as i64,
            )),
            Backend::Float => Scalar::Float(count as f64 / self.samples.len() as f64),
        }
    }

    /// Exact sample average of a test function (mu_n is discrete, so the
    /// integral is a plain average, never a quadrature).
    pub fn integrate(&self, phi: &TestFunction) -> Scalar {
        let mut total = ExactRational::zero();
        for s in &self.samples {
            total = total.add(&phi.eval(s).to_exact());
        }
        let n = ExactRational::from_integer(self.samples.len() as i64);
        match self.backend() {
            Backend::Exact => Scalar::Exact(total.div(&n)),
            Backend::Float => Scalar::Float(total.div(&n).to_f64()),
        }
    }

    /// CSV of the sorted samples, one per line.
    pub fn samples_to_csv(&self) -> String {
        let mut out = String::from("sample\n");
        for s in &self.samples {
            writeln!(out, "{s}").unwrap();
        }
        out
    }

    /// Plot-ready CDF on a uniform grid with `resolution + 1` rows.
    pub fn cdf_to_csv(&self, resolution: usize) -> String {
        let mut out = String::from("x,cdf\n");
        for j in 0..=resolution {
            let x = Scalar::from_rational(j as i64, resolution as i64, self.backend());
            let v = cdf_eval(self, &x).expect("grid point in domain");
            writeln!(out, "{x},{v}").unwrap();
        }
        out
    }
}

/// mu_n for the first `n` iterates of `p` under `map`.
pub fn empirical_measure(
    map: &PiecewiseMap,
    p: &Scalar,
    n: usize,
    budget: OrbitBudget,
) -> Result<EmpiricalMeasure> {
    if n == 0 {
        return Err(Error::Config("empirical measure needs n >= 1".into()));
    }
    let mut samples = Vec::with_capacity(n);
    for item in OrbitIter::new(map, p.clone(), budget)?.take(n) {
        let (x, _) = item?;
        samples.push(x);
    }
    Ok(EmpiricalMeasure::from_samples(p.clone(), samples))
}

/// Right-continuous CDF value #{samples <= x} / n.
pub fn cdf_eval(m: &EmpiricalMeasure, x: &Scalar) -> Result<Scalar> {
    if !x.in_unit_interval() {
        return Err(Error::Domain { x: x.to_string() });
    }
    Ok(m.fraction(m.count_leq(x)))
}

/// Picks p = f^l(q) with the smallest l <= max_skip whose first `depth`
/// iterates (including p itself) keep clear of the interior breakpoints:
/// exact membership under the exact backend, distance > tol under float.
pub fn choose_base_point(
    map: &PiecewiseMap,
    q: &Scalar,
    max_skip: usize,
    depth: usize,
    tol: &Scalar,
    budget: OrbitBudget,
) -> Result<Scalar> {
    let interior = &map.partition()[1..=map.interior_count()];
    let exact = map.backend() == Backend::Exact;
    let mut candidate = q.clone();
    for _l in 0..=max_skip {
        let mut clean = true;
        for item in OrbitIter::new(map, candidate.clone(), budget)?.take(depth + 1) {
            let (x, _) = item?;
            let hit = interior.iter().any(|bp| {
                if exact {
                    x.cmp_value(bp) == Ordering::Equal
                } else {
                    x.distance(bp).cmp_value(tol) != Ordering::Greater
                }
            });
            if hit {
                clean = false;
                break;
            }
        }
        if clean {
            return Ok(candidate);
        }
        candidate = map.evaluate(&candidate)?;
    }
    Err(Error::BasePointNotFound { max_skip })
}

/// Wasserstein-1 distance between two empirical measures on [0,1]: the
/// integral of |CDF_1 - CDF_2|, summed exactly over the merged sample grid.
pub fn wasserstein1(m1: &EmpiricalMeasure, m2: &EmpiricalMeasure) -> Scalar {
    let backend = m1.backend();
    let (n1, n2) = (m1.len(), m2.len());
    let (s1, s2) = (m1.samples(), m2.samples());
    let (mut i, mut j) = (0usize, 0usize);
    let mut prev: Option<Scalar> = None;
    let mut acc_float = 0.0f64;
    let mut acc_exact = ExactRational::zero();
    while i < n1 || j < n2 {
        let t = match (s1.get(i), s2.get(j)) {
            (Some(a), Some(b)) => {
                if a.cmp_value(b) == Ordering::Greater {
                    b.clone()
                } else {
                    a.clone()
                }
            }
            (Some(a), None) => a.clone(),
            (None, Some(b)) => b.clone(),
            (None, None) => unreachable!(),
        };
        if let Some(p) = &prev {
            let width = t.sub(p);
            match backend {
                Backend::Float => {
                    let diff = (i as f64 / n1 as f64 - j as f64 / n2 as f64).abs();
                    acc_float += diff * width.to_f64();
                }
                Backend::Exact => {
                    let f1 = ExactRational::from_pair(i as i64, n1 as i64);
                    let f2 = ExactRational::from_pair(j as i64, n2 as i64);
                    let diff = f1.sub(&f2).abs();
                    acc_exact = acc_exact.add(&diff.mul(&width.to_exact()));
                }
            }
        }
        while i < n1 && s1[i].cmp_value(&t) == Ordering::Equal {
            i += 1;
        }
        while j < n2 && s2[j].cmp_value(&t) == Ordering::Equal {
            j += 1;
        }
        prev = Some(t);
    }
    // past the largest sample both CDFs are 1, contributing nothing
    match backend {
        Backend::Float => Scalar::Float(acc_float),
        Backend::Exact => Scalar::Exact(acc_exact),
    }
}

/// Continuous test functions with a certified sup-norm bound.
#[derive(Clone, Debug, PartialEq)]
pub enum TestFunction {
    Polynomial {
        coeffs: Vec<Scalar>,
        bound: Scalar,
    },
    PiecewiseLinear {
        nodes: Vec<(Scalar, Scalar)>,
        bound: Scalar,
    },
}

impl TestFunction {
    /// Polynomial with ascending-degree coefficients. The stored bound is
    /// the Bernstein-coefficient sup bound on [0,1], which dominates
    /// sup|phi| (exactly under the exact backend; inflated by a relative
    /// epsilon under float to absorb Horner rounding).
    pub fn polynomial(coeffs: Vec<Scalar>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Config(
                "polynomial needs at least one coefficient".into(),
            ));
        }
        if coeffs.len() > 7 {
            return Err(Error::Config("polynomial degree is capped at 6".into()));
        }
        let backend = coeffs[0].backend();
        let n = coeffs.len() - 1;
        let mut max_abs = Scalar::zero(backend);
        for j in 0..=n {
            // b_j = sum_i C(j,i)/C(n,i) * a_i
            let mut b = Scalar::zero(backend);
            for (i, a) in coeffs.iter().enumerate().take(j + 1) {
                let w = Scalar::from_rational(binomial(j, i), binomial(n, i), backend);
                b = b.add(&w.mul(a));
            }
            max_abs = max_abs.max_value(b.abs());
        }
        let bound = match backend {
            Backend::Exact => max_abs,
            Backend::Float => Scalar::Float(max_abs.to_f64() * (1.0 + 1e-9) + 1e-300),
        };
        Ok(TestFunction::Polynomial { coeffs, bound })
    }

    /// Piecewise-linear function through nodes covering [0,1]; the sup norm
    /// is attained at a node.
    pub fn piecewise_linear(nodes: Vec<(Scalar, Scalar)>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::Config(
                "piecewise-linear needs at least two nodes".into(),
            ));
        }
        let backend = nodes[0].0.backend();
        if !nodes[0].0.is_zero()
            || nodes.last().unwrap().0.cmp_value(&Scalar::one(backend)) != Ordering::Equal
        {
            return Err(Error::Config(
                "piecewise-linear nodes must span [0,1]".into(),
            ));
        }
        for w in nodes.windows(2) {
            if w[0].0.cmp_value(&w[1].0) != Ordering::Less {
                return Err(Error::Config(
                    "piecewise-linear nodes must be strictly increasing".into(),
                ));
            }
        }
        let bound = nodes
            .iter()
            .map(|(_, v)| v.abs())
            .fold(Scalar::zero(backend), Scalar::max_value);
        Ok(TestFunction::PiecewiseLinear { nodes, bound })
    }

    pub fn constant(c: Scalar) -> Self {
        let bound = c.abs();
        TestFunction::Polynomial {
            coeffs: vec![c],
            bound,
        }
    }

    /// Certified upper bound for sup |phi| on [0,1].
    pub fn sup_bound(&self) -> &Scalar {
        match self {
            TestFunction::Polynomial { bound, .. } => bound,
            TestFunction::PiecewiseLinear { bound, .. } => bound,
        }
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        match self {
            TestFunction::Polynomial { coeffs, .. } => {
                let mut acc = Scalar::zero(x.backend());
                for c in coeffs.iter().rev() {
                    acc = acc.mul(x).add(c);
                }
                acc
            }
            TestFunction::PiecewiseLinear { nodes, .. } => {
                let pos = nodes.partition_point(|(nx, _)| nx.cmp_value(x) == Ordering::Less);
                if pos == 0 {
                    return nodes[0].1.clone();
                }
                if pos == nodes.len() {
                    return nodes.last().unwrap().1.clone();
                }
                let (x0, v0) = &nodes[pos - 1];
                let (x1, v1) = &nodes[pos];
                // lerp: v0 + (x - x0) * (v1 - v0) / (x1 - x0)
                let t = x.sub(x0).div(&x1.sub(x0));
                v0.add(&t.mul(&v1.sub(v0)))
            }
        }
    }
}

fn binomial(n: usize, k: usize) -> i64 {
    let mut acc = 1i64;
    for i in 0..k {
        acc = acc * (n - i) as i64 / (i + 1) as i64;
    }
    acc
}

/// |integral of phi.f dmu_n - integral of phi dmu_n|.
///
/// Computed as |sum_k phi(f^{k+1}(p)) - sum_k phi(f^k(p))| / n with exact
/// accumulation of the evaluated values (the float backend sums them as
/// exact rationals), so the telescoped form |phi(f^n(p)) - phi(p)| / n is
/// reproduced to the last bit; the identity is asserted internally.
pub fn invariance_residual(
    map: &PiecewiseMap,
    m: &EmpiricalMeasure,
    phi: &TestFunction,
    budget: OrbitBudget,
) -> Result<Scalar> {
    let n = m.len();
    let p = m.base_point().clone();
    let mut points = Vec::with_capacity(n + 1);
    for item in OrbitIter::new(map, p, budget)?.take(n + 1) {
        let (x, _) = item?;
        points.push(x);
    }
    // the measure must have come from this map and base point: re-evaluate
    // one sample and look it up in the sorted multiset
    let probe_index = if n > 1 { 1 } else { 0 };
    let probe = &points[probe_index];
    if m.count_leq(probe) == m.count_lt(probe) {
        return Err(Error::MeasureMapMismatch { index: probe_index });
    }

    let values: Vec<ExactRational> = points.iter().map(|x| phi.eval(x).to_exact()).collect();
    let mut forward = ExactRational::zero(); // sum of phi(f^{k+1}(p))
    let mut current = ExactRational::zero(); // sum of phi(f^k(p))
    for k in 0..n {
        forward = forward.add(&values[k + 1]);
        current = current.add(&values[k]);
    }
    let diff = forward.sub(&current);
    let telescoped = values[n].sub(&values[0]);
    assert_eq!(
        diff, telescoped,
        "telescoping identity must hold exactly over the evaluated values"
    );
    let residual = diff.abs().div(&ExactRational::from_integer(n as i64));
    Ok(match m.backend() {
        Backend::Exact => Scalar::Exact(residual),
        Backend::Float => Scalar::Float(residual.to_f64()),
    })
}

/// Largest delta-ball mass max_x mu_n([x - delta, x + delta]); the maximum
/// over sample centers suffices because a maximizing center can be moved to
/// a sample.
pub fn max_local_mass(m: &EmpiricalMeasure, delta: &Scalar) -> Scalar {
    let mut best = 0usize;
    for s in m.samples() {
        let lo = s.sub(delta);
        let hi = s.add(delta);
        let count = m.count_leq(&hi).saturating_sub(m.count_lt(&lo));
        best = best.max(count);
    }
    m.fraction(best)
}

/// Successive W1 distances of mu_n along a strictly increasing schedule,
/// reusing a single orbit.
pub fn convergence_diag(
    map: &PiecewiseMap,
    p: &Scalar,
    schedule: &[usize],
    budget: OrbitBudget,
) -> Result<Vec<(usize, Scalar)>> {
    if schedule.is_empty() {
        return Err(Error::Config("schedule must be nonempty".into()));
    }
    for w in schedule.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::Config("schedule must be strictly increasing".into()));
        }
    }
    if schedule[0] == 0 {
        return Err(Error::Config("schedule entries must be >= 1".into()));
    }
    let max_n = *schedule.last().unwrap();
    let mut points = Vec::with_capacity(max_n);
    for item in OrbitIter::new(map, p.clone(), budget)?.take(max_n) {
        let (x, _) = item?;
        points.push(x);
    }
    let mut out = Vec::new();
    let mut prev: Option<EmpiricalMeasure> = None;
    for &n in schedule {
        let m = EmpiricalMeasure::from_samples(p.clone(), points[..n].to_vec());
        if let Some(pm) = &prev {
            out.push((n, wasserstein1(pm, &m)));
        }
        prev = Some(m);
    }
    Ok(out)
}
