//! Command-line front end: every analysis in the library, driven by map-spec
//! files, with CSV/JSON outputs.
//!
//! Exit status contract: 0 on success (any verdict is a successful
//! analysis), 1 on analysis errors (resource budgets, failed preconditions),
//! 2 on usage errors (missing files, malformed specs, bad options).

use clap::{Parser, Subcommand, ValueEnum};
use pwdyn::connection::{breakpoint_mass, check_no_connections, mass_to_csv};
use pwdyn::measure::{
    choose_base_point, convergence_diag, empirical_measure, invariance_residual, TestFunction,
};
use pwdyn::orbit::{find_periodic_affine, iterate_orbit, orbit_to_csv, OrbitBudget};
use pwdyn::semiconj::{
    build_h, conjugacy_defect, extract_iet, isometry_defect, DefectOptions, ExtractOptions,
};
use pwdyn::spec_format::{parse_map_spec, parse_map_spec_unvalidated};
use pwdyn::sweep::{run_sweep, SweepConfig};
use pwdyn::{fixtures, Error, PiecewiseMap, Scalar};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "pwdyn",
    about = "Analyze piecewise continuous interval maps: connections, empirical invariant measures, interval-exchange factors",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check a map spec for admissibility and report violations
    Validate { map: PathBuf },
    /// Evaluate the map at a point
    Eval {
        map: PathBuf,
        /// Point in [0,1]; accepts decimals and p/q literals
        #[arg(long)]
        x: String,
    },
    /// Forward orbit with itinerary, as CSV
    Orbit {
        map: PathBuf,
        #[arg(long)]
        p: String,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certified periodic orbits of an exact affine map
    Periodic {
        map: PathBuf,
        #[arg(long, default_value_t = 10)]
        max_period: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide the no-connections condition up to a depth
    Connections {
        map: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        depth: usize,
        #[arg(long, default_value = "1e-12")]
        tol: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Orbit mass within a radius of each critical point
    Mass {
        map: PathBuf,
        #[arg(long)]
        p: String,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value = "1/100")]
        radius: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Empirical measure of an orbit; exports samples and the CDF
    Measure {
        map: PathBuf,
        /// Base point; if absent it is chosen from --q by skipping along
        /// the orbit until the critical set is avoided
        #[arg(long)]
        p: Option<String>,
        #[arg(long, default_value = "0")]
        q: String,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 64)]
        max_skip: usize,
        #[arg(long, default_value_t = 10_000)]
        depth: usize,
        #[arg(long, default_value = "1e-12")]
        tol: String,
        /// Write the CDF on a uniform grid to this CSV file
        #[arg(long)]
        cdf_out: Option<PathBuf>,
        /// Write the sorted samples to this CSV file
        #[arg(long)]
        samples_out: Option<PathBuf>,
        #[arg(long, default_value_t = 1_000)]
        grid: usize,
        /// Convergence schedule "a,b,c": successive W1 distances of mu_n
        /// along increasing n, printed as CSV
        #[arg(long)]
        schedule: Option<String>,
    },
    /// Telescoping invariance residual of a polynomial test function
    Invariance {
        map: PathBuf,
        #[arg(long)]
        p: Option<String>,
        #[arg(long, default_value = "0")]
        q: String,
        #[arg(long, default_value_t = 1_000)]
        n: usize,
        /// Polynomial coefficients, ascending degree, comma separated
        #[arg(long, default_value = "0,1")]
        phi: String,
        #[arg(long, default_value_t = 64)]
        max_skip: usize,
        #[arg(long, default_value_t = 10_000)]
        depth: usize,
        #[arg(long, default_value = "1e-12")]
        tol: String,
    },
    /// Build the monotone factor, extract the interval exchange, measure defects
    Conjugacy {
        map: PathBuf,
        #[arg(long)]
        p: Option<String>,
        #[arg(long, default_value = "0")]
        q: String,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 64)]
        max_skip: usize,
        #[arg(long, default_value_t = 10_000)]
        depth: usize,
        #[arg(long, default_value = "1e-12")]
        tol: String,
        /// Regression samples per piece
        #[arg(long, default_value_t = 64)]
        samples: usize,
        /// Grid size for the conjugacy defect
        #[arg(long, default_value_t = 10_000)]
        defect_samples: usize,
        /// Sampled pairs per piece for the isometry defect
        #[arg(long, default_value_t = 1_000)]
        pairs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write h on a uniform grid to this CSV file
        #[arg(long)]
        h_out: Option<PathBuf>,
        #[arg(long, default_value_t = 1_000)]
        grid: usize,
    },
    /// Monte-Carlo sweep over partition parameters for this map's branches
    Sweep {
        map: PathBuf,
        #[arg(long, default_value_t = 1_000)]
        samples: usize,
        #[arg(long, default_value_t = 10_000)]
        depth: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List bundled fixtures, print one, or write them all as .map files
    Fixtures {
        /// Print the named fixture's map spec to stdout
        #[arg(long)]
        emit: Option<String>,
        /// Write all fixtures into a directory
        #[arg(long)]
        write_dir: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 2 for usage/parse problems, 1 for analysis failures.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. }
        | Error::InvalidMap(_)
        | Error::Io(_)
        | Error::Config(_)
        | Error::Domain { .. } => 2,
        _ => 1,
    }
}

fn load_map(path: &Path) -> Result<PiecewiseMap, Error> {
    let text = std::fs::read_to_string(path)?;
    parse_map_spec(&text)
}

fn parse_scalar(text: &str, map: &PiecewiseMap, what: &str) -> Result<Scalar, Error> {
    Scalar::parse(text, map.backend())
        .ok_or_else(|| Error::Config(format!("bad {what} literal '{text}'")))
}

fn emit(out: Option<&Path>, content: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn resolve_base_point(
    map: &PiecewiseMap,
    p: Option<&str>,
    q: &str,
    max_skip: usize,
    depth: usize,
    tol: &str,
) -> Result<Scalar, Error> {
    match p {
        Some(text) => parse_scalar(text, map, "base point"),
        None => {
            let q = parse_scalar(q, map, "seed point")?;
            let tol = parse_scalar(tol, map, "tolerance")?;
            choose_base_point(map, &q, max_skip, depth, &tol, OrbitBudget::default())
        }
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Validate { map } => {
            let text = std::fs::read_to_string(&map)?;
            let parsed = parse_map_spec_unvalidated(&text)?;
            let report = parsed.validate();
            for v in &report.violations {
                println!("violation: {v}");
            }
            for w in &report.warnings {
                println!("warning: {w}");
            }
            if report.is_valid() {
                println!(
                    "valid ({} pieces, {} backend)",
                    parsed.piece_count(),
                    parsed.backend()
                );
                Ok(())
            } else {
                Err(Error::InvalidMap(format!(
                    "{} violation(s)",
                    report.violations.len()
                )))
            }
        }
        Command::Eval { map, x } => {
            let map = load_map(&map)?;
            let x = parse_scalar(&x, &map, "point")?;
            println!("{}", map.evaluate(&x)?);
            Ok(())
        }
        Command::Orbit { map, p, n, out } => {
            let map = load_map(&map)?;
            let p = parse_scalar(&p, &map, "base point")?;
            let orbit = iterate_orbit(&map, &p, n, OrbitBudget::default())?;
            emit(out.as_deref(), &orbit_to_csv(&orbit))
        }
        Command::Periodic {
            map,
            max_period,
            out,
        } => {
            let map = load_map(&map)?;
            let records = find_periodic_affine(&map, max_period, OrbitBudget::default())?;
            let text = serde_json::to_string_pretty(&records).expect("records serialize");
            emit(out.as_deref(), &format!("{text}\n"))
        }
        Command::Connections {
            map,
            depth,
            tol,
            out,
        } => {
            let map = load_map(&map)?;
            let tol = parse_scalar(&tol, &map, "tolerance")?;
            let report = check_no_connections(&map, depth, &tol)?;
            eprintln!("verdict: {}", report.verdict);
            emit(out.as_deref(), &format!("{}\n", report.to_json()))
        }
        Command::Mass {
            map,
            p,
            n,
            radius,
            out,
        } => {
            let map = load_map(&map)?;
            let p = parse_scalar(&p, &map, "base point")?;
            let radius = parse_scalar(&radius, &map, "radius")?;
            let entries = breakpoint_mass(&map, &p, n, &radius)?;
            emit(out.as_deref(), &mass_to_csv(&entries))
        }
        Command::Measure {
            map,
            p,
            q,
            n,
            max_skip,
            depth,
            tol,
            cdf_out,
            samples_out,
            grid,
            schedule,
        } => {
            let map = load_map(&map)?;
            let base = resolve_base_point(&map, p.as_deref(), &q, max_skip, depth, &tol)?;
            if let Some(schedule) = schedule {
                let steps: Result<Vec<usize>, Error> = schedule
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::Config(format!("bad schedule entry '{t}'")))
                    })
                    .collect();
                let diag = convergence_diag(&map, &base, &steps?, OrbitBudget::default())?;
                let mut out = String::from("n,w1\n");
                for (n, w1) in diag {
                    out.push_str(&format!("{n},{w1}\n"));
                }
                print!("{out}");
                return Ok(());
            }
            let m = empirical_measure(&map, &base, n, OrbitBudget::default())?;
            eprintln!("base point {base}, {n} samples");
            if let Some(path) = &cdf_out {
                std::fs::write(path, m.cdf_to_csv(grid))?;
            }
            if let Some(path) = &samples_out {
                std::fs::write(path, m.samples_to_csv())?;
            }
            if cdf_out.is_none() && samples_out.is_none() {
                print!("{}", m.cdf_to_csv(grid));
            }
            Ok(())
        }
        Command::Invariance {
            map,
            p,
            q,
            n,
            phi,
            max_skip,
            depth,
            tol,
        } => {
            let map = load_map(&map)?;
            let base = resolve_base_point(&map, p.as_deref(), &q, max_skip, depth, &tol)?;
            let coeffs: Result<Vec<Scalar>, Error> = phi
                .split(',')
                .map(|c| parse_scalar(c.trim(), &map, "phi coefficient"))
                .collect();
            let phi = TestFunction::polynomial(coeffs?)?;
            let m = empirical_measure(&map, &base, n, OrbitBudget::default())?;
            let residual = invariance_residual(&map, &m, &phi, OrbitBudget::default())?;
            let bound = Scalar::from_rational(2, n as i64, map.backend()).mul(phi.sup_bound());
            let v = serde_json::json!({
                "base_point": base,
                "n": n,
                "residual": residual,
                "residual_f64": residual.to_f64(),
                "bound_2m_over_n": bound,
            });
            println!("{}", serde_json::to_string_pretty(&v).expect("serializes"));
            Ok(())
        }
        Command::Conjugacy {
            map,
            p,
            q,
            n,
            max_skip,
            depth,
            tol,
            samples,
            defect_samples,
            pairs,
            out,
            h_out,
            grid,
        } => {
            let map = load_map(&map)?;
            let base = resolve_base_point(&map, p.as_deref(), &q, max_skip, depth, &tol)?;
            let m = empirical_measure(&map, &base, n, OrbitBudget::default())?;
            let h = build_h(&m, true);
            let iet = extract_iet(
                &map,
                &h,
                ExtractOptions {
                    samples_per_piece: samples,
                    degeneracy_threshold: None,
                },
            )?;
            let defect =
                conjugacy_defect(&map, &h, &iet, defect_samples, DefectOptions::default())?;
            let iso = isometry_defect(&map, &h, pairs, DefectOptions::default())?;
            if let Some(path) = &h_out {
                std::fs::write(path, h.to_csv(grid))?;
            }
            let v = serde_json::json!({
                "base_point": base,
                "n": n,
                "iet": iet.to_json_value(),
                "conjugacy_defect": defect.max_defect,
                "defect_samples_used": defect.samples_used,
                "atomic_factor": defect.atomic_factor,
                "isometry_defects": iso,
            });
            emit(
                out.as_deref(),
                &format!(
                    "{}\n",
                    serde_json::to_string_pretty(&v).expect("serializes")
                ),
            )
        }
        Command::Sweep {
            map,
            samples,
            depth,
            tol,
            seed,
            workers,
            format,
            out,
        } => {
            let map = load_map(&map)?;
            let config = SweepConfig {
                branch_templates: map.branches().to_vec(),
                sample_count: samples,
                depth,
                tol,
                seed,
                workers,
            };
            let result = run_sweep(&config)?;
            let (fc, fnc, fu) = result.fractions();
            eprintln!(
                "connected {fc:.4}, no-connection {fnc:.4}, undecided {fu:.4} over {} samples",
                result.total()
            );
            let content = match format {
                Format::Json => format!("{}\n", result.to_json()),
                Format::Csv => result.to_csv(),
            };
            emit(out.as_deref(), &content)
        }
        Command::Fixtures {
            emit: emit_name,
            write_dir,
        } => {
            if let Some(name) = emit_name {
                let text = fixtures::spec_text(&name)
                    .ok_or_else(|| Error::Config(format!("unknown fixture '{name}'")))?;
                print!("{text}");
                return Ok(());
            }
            if let Some(dir) = write_dir {
                std::fs::create_dir_all(&dir)?;
                for (name, _) in fixtures::list() {
                    let path = dir.join(format!("{name}.map"));
                    std::fs::write(&path, fixtures::spec_text(name).expect("bundled"))?;
                    eprintln!("wrote {}", path.display());
                }
                return Ok(());
            }
            for (name, description) in fixtures::list() {
                println!("{name:12} {description}");
            }
            Ok(())
        }
    }
}
