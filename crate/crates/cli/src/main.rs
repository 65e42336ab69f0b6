//! `torsion-orbits`: catalogs, randomized verifiers, censuses and the
//! surface demo behind one binary.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 configuration error,
//! 3 unsupported group.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use torsion_orbits::group::{Family, GroupSpec};
use torsion_orbits::report::TrialRecord;
use torsion_orbits::surface::{
    off_band_points, point_cloud_csv, singular_locus_scan, tangent_cone_bound_check, two_circle_check,
    SurfaceSampler, SURFACE_TOL,
};
use torsion_orbits::sweep::{
    connectivity_sweep, curve_kernel_sweep, density_sweep, kernel_image_sweep, tangent_sweep,
    zero_intersection_sweep, SweepPlan, DEFAULT_STEPS,
};
use torsion_orbits::tol::Tolerances;
use torsion_orbits::torsion::{
    catalog_components_with, catalog_to_csv, catalog_to_json, cluster_census, gcd_intersection_check,
    sl2_component_census, ComponentDescriptor,
};
use torsion_orbits::{Error, VerificationReport};

const SEED_ENV: &str = "TORSION_ORBITS_SEED";

#[derive(Parser, Debug)]
#[command(name = "torsion-orbits", version)]
#[command(about = "Conjugacy classes of finite-order elements in classical Lie groups")]
struct Cli {
    /// Worker threads for randomized trials (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Frobenius residual allowed in membership and gⁿ = e checks
    #[arg(long, global = true, allow_negative_numbers = true)]
    tol_membership: Option<f64>,

    /// Relative singular-value threshold for numerical rank
    #[arg(long, global = true, allow_negative_numbers = true)]
    tol_rank: Option<f64>,

    /// Largest principal angle (radians) for subspace equality
    #[arg(long, global = true, allow_negative_numbers = true)]
    tol_subspace: Option<f64>,

    /// Output format (catalogs default to csv, reports to json)
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write the output here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the conjugacy classes of elements of order dividing n
    Catalog(CatalogArgs),
    /// Run a randomized verifier
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Count classes by sampling conjugates of torsion points
    #[command(subcommand)]
    Census(CensusCmd),
    /// Sample the singular surface and check its local geometry
    DemoSurface(SurfaceArgs),
}

#[derive(Args, Debug)]
struct GroupArgs {
    /// Group family: U, SU, SO or SL2R
    #[arg(long, default_value = "SU")]
    group: String,

    /// Matrix size (ignored for SL2R)
    #[arg(long)]
    size: Option<usize>,
}

#[derive(Args, Debug)]
struct CatalogArgs {
    #[command(flatten)]
    group: GroupArgs,

    #[arg(long)]
    n: u32,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    group: GroupArgs,

    /// Element order (the approximant order N for `density`)
    #[arg(long, default_value_t = 4)]
    n: u32,

    #[arg(long, default_value_t = 100)]
    trials: usize,

    /// Base seed; trial i uses seed + i. Falls back to TORSION_ORBITS_SEED, then 0
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    /// Tangent vector of t ↦ exp(tX) g exp(−tX) by finite differences
    Lemma31(SweepArgs),
    /// Kernel condition and product identity along conjugation curves
    Lemma32 {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Curve parameter for the product identity
        #[arg(long, default_value_t = 0.4)]
        t: f64,
    },
    /// ker(Ad(g) − I) equals the image of the averaging operator
    Lemma33(SweepArgs),
    /// Kernel and image of Ad(g) − I meet only in zero
    ZeroIntersection(SweepArgs),
    /// Classes of order dividing n and m are those of order dividing gcd(n, m)
    Gcd {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value_t = 4)]
        n: u32,
        #[arg(long, default_value_t = 6)]
        m: u32,
    },
    /// Distance from random elements to the nearest element of order dividing n
    Density(SweepArgs),
    /// Paths inside one class and separation between classes
    Connect {
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long, default_value_t = 20)]
        waypoints: usize,
    },
}

#[derive(Subcommand, Debug)]
enum CensusCmd {
    /// Classes of elements of order n in SL(2,R), by trace and orientation
    Sl2 {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Distinct invariants among random conjugates of torsion points
    Cluster {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args, Debug)]
struct SurfaceArgs {
    #[arg(long, default_value_t = 10_000)]
    samples: usize,

    #[arg(long)]
    seed: Option<u64>,

    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    a_min: f64,

    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    a_max: f64,

    /// Replace the first sample by the point at this a (needs --force-phi)
    #[arg(long, requires = "force_phi", allow_negative_numbers = true)]
    force_a: Option<f64>,

    /// Angle φ of the forced point (needs --force-a)
    #[arg(long, requires = "force_a", allow_negative_numbers = true)]
    force_phi: Option<f64>,

    /// Write the sampled points as CSV (x,y,z,residual,grad_norm)
    #[arg(long)]
    cloud: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Unsupported(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Unsupported(_) => Failure::Unsupported(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Unsupported(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Unsupported(m) => m,
        }
    }
}

/// What a command produced: the rendered output and whether it passed.
struct Outcome {
    text: String,
    passed: bool,
    report: Option<VerificationReport>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            if let Err(f) = emit(&cli, &outcome.text) {
                eprintln!("error: {}", f.message());
                return ExitCode::from(f.exit_code());
            }
            if let Some(fail) = outcome.report.as_ref().and_then(|r| r.first_failure()) {
                eprintln!(
                    "verification failed at trial {} (residual {:.3e})",
                    fail.index, fail.residual
                );
                match (fail.seed, &cli.command) {
                    (Some(seed), Command::Verify(_)) => eprintln!("replay with: --seed {seed} --trials 1"),
                    (Some(seed), _) => eprintln!("trial seed: {seed}"),
                    (None, _) => {}
                }
            }
            ExitCode::from(if outcome.passed { 0 } else { 1 })
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.output {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let tol = tolerances(cli)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    match cli.jobs {
        Some(0) => return Err(Failure::Config("--jobs must be at least 1".into())),
        Some(j) => pool = pool.num_threads(j),
        None => {}
    }
    let pool = pool
        .build()
        .map_err(|e| Failure::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| dispatch(cli, &tol))
}

fn dispatch(cli: &Cli, tol: &Tolerances) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Catalog(args) => cmd_catalog(cli, args, tol),
        cmd => {
            let start = Instant::now();
            let mut report = match cmd {
                Command::Verify(v) => cmd_verify(v, tol)?,
                Command::Census(c) => cmd_census(c)?,
                Command::DemoSurface(s) => cmd_demo_surface(s)?,
                Command::Catalog(_) => unreachable!(),
            };
            if let Some(reason) = &report.rejected {
                return Err(Failure::Config(reason.clone()));
            }
            report.wall_time_secs = start.elapsed().as_secs_f64();
            let text = render_report(&report, cli.format.unwrap_or(Format::Json))?;
            Ok(Outcome {
                text,
                passed: report.passed,
                report: Some(report),
            })
        }
    }
}

fn tolerances(cli: &Cli) -> Result<Tolerances, Failure> {
    let mut tol = Tolerances::default();
    for (flag, value, slot) in [
        ("--tol-membership", cli.tol_membership, &mut tol.membership),
        ("--tol-rank", cli.tol_rank, &mut tol.rank),
        ("--tol-subspace", cli.tol_subspace, &mut tol.subspace),
    ] {
        if let Some(v) = value {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Failure::Config(format!("{flag} must be positive and finite, got {v}")));
            }
            *slot = v;
        }
    }
    Ok(tol)
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Config(format!("{SEED_ENV}=`{v}` is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn group_spec(args: &GroupArgs) -> Result<GroupSpec, Failure> {
    let family: Family = args
        .group
        .parse()
        .map_err(|_| Failure::Unsupported(format!("unsupported group family `{}`", args.group)))?;
    if family == Family::SL2R {
        return Ok(GroupSpec::sl2r());
    }
    Ok(GroupSpec::new(family, args.size.unwrap_or(2))?)
}

fn positive(name: &str, v: u32) -> Result<u32, Failure> {
    if v == 0 {
        return Err(Failure::Config(format!("--{name} must be at least 1")));
    }
    Ok(v)
}

fn plan(args: &SweepArgs, tol: &Tolerances) -> Result<(GroupSpec, SweepPlan), Failure> {
    let spec = group_spec(&args.group)?;
    let seed = resolve_seed(args.seed)?;
    let plan = SweepPlan::new(vec![spec], vec![args.n], args.trials, seed)?.with_tolerances(*tol);
    Ok((spec, plan))
}

fn cmd_catalog(cli: &Cli, args: &CatalogArgs, tol: &Tolerances) -> Result<Outcome, Failure> {
    let spec = group_spec(&args.group)?;
    let n = positive("n", args.n)?;
    let catalog = catalog_components_with(spec, n, tol)?;
    let text = match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => catalog_to_csv(&catalog)?,
        Format::Json => catalog_to_json(&catalog)? + "\n",
        Format::Text => catalog_text(spec, n, &catalog),
    };
    Ok(Outcome {
        text,
        passed: true,
        report: None,
    })
}

fn catalog_text(spec: GroupSpec, n: u32, catalog: &[ComponentDescriptor]) -> String {
    let mut out = format!("{} classes of elements of {spec} with gⁿ = e, n = {n}\n", catalog.len());
    let _ = writeln!(out, "{:>5}  {:<28} {:>9} {:>6} {:>6}", "index", "canonical", "dimension", "order", "points");
    for (i, d) in catalog.iter().enumerate() {
        let _ = writeln!(
            out,
            "{:>5}  {:<28} {:>9} {:>6} {:>6}",
            i,
            d.canonical.to_string(),
            d.dimension,
            d.exact_order,
            d.orbit_size
        );
    }
    out
}

fn cmd_verify(cmd: &VerifyCmd, tol: &Tolerances) -> Result<VerificationReport, Failure> {
    let (name, report) = match cmd {
        VerifyCmd::Lemma31(a) => ("lemma31", tangent_sweep(&plan(a, tol)?.1, &DEFAULT_STEPS)),
        VerifyCmd::Lemma32 { sweep, t } => {
            if !t.is_finite() {
                return Err(Failure::Config("--t must be finite".into()));
            }
            let report = curve_kernel_sweep(&plan(sweep, tol)?.1, *t).with_config("t", t);
            ("lemma32", report)
        }
        VerifyCmd::Lemma33(a) => ("lemma33", kernel_image_sweep(&plan(a, tol)?.1)),
        VerifyCmd::ZeroIntersection(a) => ("zero-intersection", zero_intersection_sweep(&plan(a, tol)?.1)),
        VerifyCmd::Gcd { group, n, m } => {
            let spec = group_spec(group)?;
            let report = gcd_intersection_check(spec, positive("n", *n)?, positive("m", *m)?);
            ("gcd", report)
        }
        VerifyCmd::Density(a) => {
            let (spec, p) = plan(a, tol)?;
            if !spec.family().is_compact() {
                return Err(Failure::Unsupported(format!("density is defined for compact groups, not {spec}")));
            }
            ("density", density_sweep(&p))
        }
        VerifyCmd::Connect { sweep, waypoints } => {
            if *waypoints < 2 {
                return Err(Failure::Config("--waypoints must be at least 2".into()));
            }
            let report = connectivity_sweep(&plan(sweep, tol)?.1, *waypoints).with_config("waypoints", waypoints);
            ("connect", report)
        }
    };
    Ok(report.with_config("command", format!("verify {name}")))
}

fn cmd_census(cmd: &CensusCmd) -> Result<VerificationReport, Failure> {
    match cmd {
        CensusCmd::Sl2 { n, samples, seed } => {
            let n = positive("n", *n)?;
            let samples = positive_count("samples", *samples)?;
            let seed = resolve_seed(*seed)?;
            Ok(sl2_component_census(n, samples, seed)
                .with_config("command", "census sl2")
                .with_config("n", n)
                .with_config("samples", samples)
                .with_config("seed", seed))
        }
        CensusCmd::Cluster { group, n, samples, seed } => {
            let spec = group_spec(group)?;
            let n = positive("n", *n)?;
            let samples = positive_count("samples", *samples)?;
            let seed = resolve_seed(*seed)?;
            Ok(cluster_census(spec, n, samples, seed)
                .with_config("command", "census cluster")
                .with_config("group", spec)
                .with_config("n", n)
                .with_config("samples", samples)
                .with_config("seed", seed))
        }
    }
}

fn positive_count(name: &str, v: usize) -> Result<usize, Failure> {
    if v == 0 {
        return Err(Failure::Config(format!("--{name} must be at least 1")));
    }
    Ok(v)
}

/// The demo's x-axis scan points: 100 evenly spaced values in [−2, 2].
fn axis_points() -> Vec<f64> {
    (0..100).map(|i| -2.0 + 4.0 * i as f64 / 99.0).collect()
}

fn cmd_demo_surface(args: &SurfaceArgs) -> Result<VerificationReport, Failure> {
    let seed = resolve_seed(args.seed)?;
    let mut sampler = SurfaceSampler::new(args.a_min, args.a_max, args.samples, seed)?;
    if let (Some(a), Some(phi)) = (args.force_a, args.force_phi) {
        sampler = sampler.with_forced(a, phi)?;
    }
    let points = sampler.sample();
    if let Some(path) = &args.cloud {
        let csv = point_cloud_csv(&points)?;
        fs::write(path, csv).map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))?;
    }
    let cone = tangent_cone_bound_check(&points);
    let off_band = off_band_points(0.5, 2.0, 100, seed)?;
    let scan = singular_locus_scan(&axis_points(), &off_band, SURFACE_TOL, 1e-6);
    let circles = two_circle_check(1.0, 200, seed);
    let mut report = combine("demo-surface", [cone, scan, circles]);
    if let Some(first) = points.first() {
        report = report
            .with_aggregate("first_x", first.x)
            .with_aggregate("first_y", first.y)
            .with_aggregate("first_z", first.z);
    }
    Ok(report
        .with_aggregate("samples", points.len() as f64)
        .with_config("command", "demo-surface")
        .with_config("samples", args.samples)
        .with_config("seed", seed)
        .with_config("a_min", args.a_min)
        .with_config("a_max", args.a_max))
}

/// One report whose trials are the single trials of several checks, each
/// tagged with the check it came from.
fn combine<const K: usize>(check: &str, parts: [VerificationReport; K]) -> VerificationReport {
    let mut trials = Vec::with_capacity(K);
    for (index, part) in parts.into_iter().enumerate() {
        let name = part.check.clone();
        let trial = match (part.rejected, part.trials.into_iter().next()) {
            (None, Some(t)) => t,
            (reason, _) => TrialRecord::new(0, None, String::new())
                .note("rejected", reason.unwrap_or_default())
                .outcome(false, f64::INFINITY),
        };
        trials.push(TrialRecord { index, ..trial }.note("check", name));
    }
    VerificationReport::from_trials(check, trials)
}

fn render_report(report: &VerificationReport, format: Format) -> Result<String, Failure> {
    match format {
        Format::Json => Ok(report.to_json()? + "\n"),
        Format::Text => {
            let mut out = report.summary();
            out.push('\n');
            for (k, v) in &report.aggregate {
                let _ = writeln!(out, "  {k} = {v}");
            }
            Ok(out)
        }
        Format::Csv => Err(Failure::Config(
            "csv output is only available for catalogs; use --cloud for surface points".into(),
        )),
    }
}
