//! Monte-Carlo sweep over partition parameters: for a fixed branch family,
//! estimates how much of the parameter simplex produces connections.
//! Sampling replaces the null-set enumeration that proves genericity; at
//! desk scale the content of the statement is that the bad set is tiny.

use crate::branch::{Branch, RangeCheck};
use crate::connection::{check_no_connections, Verdict};
use crate::error::{Error, Result};
use crate::map::{PiecewiseMap, Side};
use crate::scalar::{Backend, Scalar};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use std::fmt::Write as _;

#[derive(Clone, Debug)]
pub struct SweepConfig {
    /// d+1 branch templates (float backend), each mapping [0,1] into (0,1).
    pub branch_templates: Vec<Branch>,
    pub sample_count: usize,
    pub depth: usize,
    pub tol: f64,
    pub seed: u64,
    /// 0 means the global thread pool; otherwise a dedicated pool of this
    /// size. Results do not depend on the choice.
    pub workers: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleRecord {
    pub params: Vec<f64>,
    pub verdict: Verdict,
    /// Summary of the first witness (or the per-sample error) if any.
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub seed: u64,
    pub depth: usize,
    pub tol: f64,
    pub connected: usize,
    pub no_connection: usize,
    pub undecided: usize,
    pub records: Vec<SampleRecord>,
}

impl SweepResult {
    pub fn total(&self) -> usize {
        self.records.len()
    }

    pub fn fractions(&self) -> (f64, f64, f64) {
        let n = self.total() as f64;
        (
            self.connected as f64 / n,
            self.no_connection as f64 / n,
            self.undecided as f64 / n,
        )
    }

    pub fn to_json(&self) -> String {
        let (fc, fn_, fu) = self.fractions();
        let v = json!({
            "seed": self.seed,
            "depth": self.depth,
            "tol": self.tol,
            "samples": self.total(),
            "counts": {
                "connected": self.connected,
                "no_connection": self.no_connection,
                "undecided": self.undecided,
            },
            "fractions": {
                "connected": fc,
                "no_connection": fn_,
                "undecided": fu,
            },
            "records": self.records,
        });
        serde_json::to_string_pretty(&v).expect("sweep serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,params,verdict,witness\n");
        for (i, r) in self.records.iter().enumerate() {
            let params: Vec<String> = r.params.iter().map(|p| format!("{p:?}")).collect();
            writeln!(
                out,
                "{i},{},{},{}",
                params.join(";"),
                r.verdict,
                r.witness.as_deref().unwrap_or("")
            )
            .unwrap();
        }
        out
    }
}

/// d sorted uniform variates on (0,1); exact ties are redrawn.
pub fn sample_partition(d: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let mut draw: Vec<f64> = (0..d)
            .map(|_| rng.random::<f64>())
            .filter(|v| *v > 0.0)
            .collect();
        if draw.len() < d {
            continue; // a zero slipped in; redraw
        }
        draw.sort_by(|a, b| a.partial_cmp(b).expect("finite variates"));
        if draw.windows(2).all(|w| w[0] < w[1]) {
            return draw;
        }
    }
}

fn validate_templates(templates: &[Branch]) -> Result<()> {
    if templates.len() < 2 {
        return Err(Error::Config(
            "sweep needs at least two branch templates (d >= 1)".into(),
        ));
    }
    let zero = Scalar::Float(0.0);
    let one = Scalar::Float(1.0);
    for (i, b) in templates.iter().enumerate() {
        match b.range_check(&zero, &one) {
            RangeCheck::Partial { detail } => {
                return Err(Error::Config(format!(
                    "branch template {i} is not total on [0,1]: {detail}"
                )))
            }
            RangeCheck::Escapes { at, value } => {
                return Err(Error::Config(format!(
                    "branch template {i} leaves [0,1]: maps {at} to {value}"
                )))
            }
            RangeCheck::Proved | RangeCheck::SampledOnly => {}
        }
        // strict interior check on a coarse grid plus endpoints
        for k in 0..=256usize {
            let x = k as f64 / 256.0;
            let v = b.eval(&Scalar::Float(x))?.to_f64();
            if v <= 0.0 || v >= 1.0 {
                return Err(Error::Config(format!(
                    "branch template {i} must map [0,1] into the open interval (0,1); \
                     value {v} at {x}"
                )));
            }
        }
    }
    Ok(())
}

fn run_one(config: &SweepConfig, index: usize) -> SampleRecord {
    let d = config.branch_templates.len() - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);
    let params = sample_partition(d, &mut rng);
    let interior: Vec<Scalar> = params.iter().map(|p| Scalar::Float(*p)).collect();
    let map = match PiecewiseMap::new(
        Backend::Float,
        interior,
        config.branch_templates.clone(),
        vec![Side::Right; d],
    ) {
        Ok(m) => m,
        Err(e) => {
            return SampleRecord {
                params,
                verdict: Verdict::Undecided,
                witness: Some(format!("construction failed: {e}")),
            }
        }
    };
    let report = map.validate();
    if !report.is_valid() {
        return SampleRecord {
            params,
            verdict: Verdict::Undecided,
            witness: Some(format!("invalid map: {}", report.violations.join("; "))),
        };
    }
    match check_no_connections(&map, config.depth, &Scalar::Float(config.tol)) {
        Ok(report) => SampleRecord {
            params,
            verdict: report.verdict,
            witness: report
                .witnesses
                .first()
                .map(|w| format!("{} step {} hits x_{}", w.source, w.step, w.hit_breakpoint)),
        },
        Err(e) => SampleRecord {
            params,
            verdict: Verdict::Undecided,
            witness: Some(format!("error: {e}")),
        },
    }
}

/// Runs the sweep. Fully deterministic: each sample's parameters come from
/// an independent (seed, index) substream, so neither worker count nor
/// scheduling affects the result.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    if config.sample_count == 0 {
        return Err(Error::Config("sample count must be >= 1".into()));
    }
    if config.depth == 0 {
        return Err(Error::Config("depth must be >= 1".into()));
    }
    validate_templates(&config.branch_templates)?;

    let run_all = || -> Vec<SampleRecord> {
        (0..config.sample_count)
            .into_par_iter()
            .map(|i| run_one(config, i))
            .collect()
    };
    let records = if config.workers == 0 {
        run_all()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
        pool.install(run_all)
    };

    let mut connected = 0;
    let mut no_connection = 0;
    let mut undecided = 0;
    for r in &records {
        match r.verdict {
            Verdict::Connected => connected += 1,
            Verdict::NoConnectionUpToDepth => no_connection += 1,
            Verdict::Undecided => undecided += 1,
        }
    }
    Ok(SweepResult {
        seed: config.seed,
        depth: config.depth,
        tol: config.tol,
        connected,
        no_connection,
        undecided,
        records,
    })
}

/// The constant-branch family used by the acceptance suite: phi_i = c_i.
pub fn constant_family(constants: &[f64]) -> Vec<Branch> {
    constants
        .iter()
        .map(|c| Branch::affine(Scalar::Float(0.0), Scalar::Float(*c)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_config() -> SweepConfig {
        SweepConfig {
            branch_templates: constant_family(&[0.37, 0.81, 0.59]),
            sample_count: 64,
            depth: 64,
            tol: 1e-12,
            seed: 17,
            workers: 0,
        }
    }

    #[test]
    fn sample_partition_is_deterministic_and_sorted() {
        let mut rng1 = ChaCha8Rng::seed_from_u64(9);
        rng1.set_stream(3);
        let a = sample_partition(3, &mut rng1);
        let mut rng2 = ChaCha8Rng::seed_from_u64(9);
        rng2.set_stream(3);
        let b = sample_partition(3, &mut rng2);
        assert_eq!(a, b);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert!(a.iter().all(|v| *v > 0.0 && *v < 1.0));
    }

    #[test]
    fn min_of_two_uniforms_below_half() {
        // oracle: P(min(U1,U2) < 1/2) = 1 - 1/4 = 3/4
        let mut below = 0usize;
        let trials = 100_000;
        for i in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(4242);
            rng.set_stream(i as u64);
            let draw = sample_partition(2, &mut rng);
            if draw[0] < 0.5 {
                below += 1;
            }
        }
        let fraction = below as f64 / trials as f64;
        assert!(
            (0.74..=0.76).contains(&fraction),
            "fraction {fraction} outside [0.74, 0.76]"
        );
    }

    #[test]
    fn constant_family_sweep_has_no_connections() {
        let result = run_sweep(&base_config()).unwrap();
        assert_eq!(result.connected, 0);
        assert_eq!(result.undecided, 0);
        assert_eq!(result.no_connection, 64);
    }

    #[test]
    fn sweep_reruns_byte_identical() {
        let config = SweepConfig {
            sample_count: 16,
            ..base_config()
        };
        let a = run_sweep(&config).unwrap();
        let b = run_sweep(&config).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.to_csv(), b.to_csv());
        // worker count does not change the outcome
        let c = run_sweep(&SweepConfig {
            workers: 2,
            ..config
        })
        .unwrap();
        assert_eq!(a.to_json(), c.to_json());
    }

    #[test]
    fn contractive_affine_family_stays_clean() {
        // slope-1/2 pair with a moving breakpoint: connections would need a
        // sampled parameter to land within tolerance of a countable set
        let config = SweepConfig {
            branch_templates: vec![
                Branch::affine(Scalar::Float(0.5), Scalar::Float(0.125)),
                Branch::affine(Scalar::Float(0.5), Scalar::Float(0.375)),
            ],
            sample_count: 200,
            depth: 64,
            tol: 1e-12,
            seed: 99,
            workers: 0,
        };
        let result = run_sweep(&config).unwrap();
        assert_eq!(result.connected, 0);
        assert!((result.undecided as f64) < 0.01 * 200.0);
        // undecided cannot grow when the tolerance shrinks
        let finer = run_sweep(&SweepConfig {
            tol: 1e-15,
            ..config.clone()
        })
        .unwrap();
        assert!(finer.undecided <= result.undecided);
        let coarser = run_sweep(&SweepConfig {
            tol: 1e-6,
            ..config
        })
        .unwrap();
        assert!(result.undecided <= coarser.undecided);
    }

    #[test]
    fn template_leaving_open_interval_rejected() {
        let bad = SweepConfig {
            branch_templates: vec![
                Branch::affine(Scalar::Float(0.0), Scalar::Float(0.5)),
                Branch::affine(Scalar::Float(1.0), Scalar::Float(0.0)), // hits 0 and 1
            ],
            ..base_config()
        };
        assert!(run_sweep(&bad).is_err());
    }

    #[test]
    fn counts_sum_to_total() {
        let result = run_sweep(&base_config()).unwrap();
        assert_eq!(
            result.connected + result.no_connection + result.undecided,
            result.total()
        );
        let (a, b, c) = result.fractions();
        assert!((a + b + c - 1.0).abs() < 1e-12);
    }
}
