//! Experiment orchestration behind the `perforated` binary.
//!
//! Exit codes: 0 success, 2 configuration error, 3 admissibility
//! failure, 4 solver failure, 5 a validation tolerance was exceeded.

pub mod config;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::asymptotics::{decades, direct_values, AsymptoticReport, AsymptoticSetup, GammaFamily};
use crate::convergence::{convergence_table, refinement_ratio, ConvergenceRow, OracleCase};
use crate::densities::{NodeCounts, ReferenceGeometry};
use crate::error::{Error, Result};
use crate::geometry::{admissibility_check, fixtures, BoundaryData, EpsilonPair, Point, ProblemConfig};
use crate::structure::{BundleSummary, EvaluationRegion, LimitProblems, RegionKind, StructureBundle};

pub use config::{ConfigFile, ExperimentKind, Format};

/// Version stamped into every CSV and JSON artifact.
pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_ADMISSIBILITY: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;
pub const EXIT_TOLERANCE: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "perforated", version, about = "Two-hole Dirichlet problem: direct solves, representations and asymptotics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment.
    Run(RunArgs),
    /// List the built-in fixtures.
    Fixtures,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Experiment to run; may instead be given as `experiment.kind` in the config.
    pub experiment: Option<ExperimentKind>,
    #[arg(long)]
    pub fixture: Option<String>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// ε₁ ε₂; repeat for a grid.
    #[arg(long, num_args = 2, value_names = ["E1", "E2"], action = clap::ArgAction::Append, allow_negative_numbers = true)]
    pub eps: Vec<f64>,
    /// γ family, e.g. `gamma=t`, `gamma=t^3`, `gamma=0.5+t`.
    #[arg(long)]
    pub family: Option<String>,
    /// Decade range `a..b` for t = 10^-a … 10^-b.
    #[arg(long, value_parser = parse_decades)]
    pub t_decades: Option<(u32, u32)>,
    /// Base node count per curve.
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Replace the boundary data by seeded random trigonometric polynomials.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write only this format (default: both).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// γ₀ for the symmetry check.
    #[arg(long)]
    pub gamma0: Option<f64>,
}

fn parse_decades(s: &str) -> std::result::Result<(u32, u32), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let a: u32 = a.trim().parse().map_err(|_| format!("bad decade {a:?}"))?;
    let b: u32 = b.trim().parse().map_err(|_| format!("bad decade {b:?}"))?;
    if a > b {
        return Err(format!("empty decade range {s:?}"));
    }
    Ok((a, b))
}

/// Exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::InvalidInput(_) => EXIT_CONFIG,
        Error::NotAdmissible(_)
        | Error::SeparationViolated(_)
        | Error::DegenerateHole(_)
        | Error::OutsideDomain(_)
        | Error::NearSingular { .. }
        | Error::Regime(_) => EXIT_ADMISSIBILITY,
        Error::Singular(_) | Error::Inconsistent(_) | Error::Io(_) => EXIT_SOLVER,
    }
}

/// Fully resolved experiment.
#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub label: String,
    pub config: ProblemConfig,
    pub eps: Vec<EpsilonPair>,
    pub family: GammaFamily,
    pub t_decades: (u32, u32),
    pub gamma0: f64,
    pub nodes: usize,
    pub node_sweep: Vec<usize>,
    pub points: Option<Vec<Point>>,
    pub tolerance: Option<f64>,
    pub out: PathBuf,
    pub format: Option<Format>,
    pub seed: Option<u64>,
}

/// The default 3×3 validation grid.
pub fn default_eps_grid() -> Vec<EpsilonPair> {
    let mut grid = Vec::new();
    for e1 in [0.1, 0.25, 0.4] {
        for e2 in [0.3, 0.5, 0.7] {
            grid.push(EpsilonPair::new(e1, e2));
        }
    }
    grid
}

/// Smooth random data for every boundary component.
pub fn random_data(seed: u64) -> [BoundaryData; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trig = || BoundaryData::Trig {
        a0: rng.random_range(-1.0..1.0),
        cos: (0..3).map(|_| rng.random_range(-0.5..0.5)).collect(),
        sin: (0..3).map(|_| rng.random_range(-0.5..0.5)).collect(),
    };
    [trig(), trig(), trig()]
}

impl ExperimentSpec {
    pub fn resolve(args: &RunArgs) -> Result<Self> {
        let file = match &args.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let exp = file.experiment.clone().unwrap_or_default();
        let kind = args.experiment.or(exp.kind).ok_or_else(|| {
            Error::Config("experiment: none given on the command line or as experiment.kind".into())
        })?;
        let default_fixture = match kind {
            ExperimentKind::SymmetryCheck => "fix-sym",
            _ => "fix-twin",
        };
        let fixture = args
            .fixture
            .as_deref()
            .or(file.fixture.as_deref())
            .unwrap_or(default_fixture);
        let (label, mut config) = file.problem(Some(fixture))?;
        let seed = args.seed.or(exp.seed);
        if let Some(seed) = seed {
            let [o, h1, h2] = random_data(seed);
            config = config.with_data(o, h1, h2);
        }
        let eps = if !args.eps.is_empty() {
            args.eps.chunks(2).map(|c| EpsilonPair::new(c[0], c[1])).collect()
        } else if let Some(e) = &exp.eps {
            e.iter().map(|e| EpsilonPair::new(e[0], e[1])).collect()
        } else {
            default_eps_grid()
        };
        let family = if let Some(f) = &args.family {
            GammaFamily::parse(f)?
        } else if let Some(tab) = &exp.gamma_table {
            log::warn!("tabulated γ: limits are only checked numerically");
            let fam = GammaFamily::Tabulated {
                t: tab.t.clone(),
                gamma: tab.gamma.clone(),
            };
            fam.validate()?;
            fam
        } else {
            GammaFamily::parse(exp.family.as_deref().unwrap_or("gamma=t"))?
        };
        let t_decades = args
            .t_decades
            .or(exp.t_decades.map(|[a, b]| (a, b)))
            .unwrap_or((2, 5));
        if t_decades.1 > 6 {
            return Err(Error::Config(format!(
                "t-decades: t = 1e-{} is below the smallest trusted t = 1e-6",
                t_decades.1
            )));
        }
        let nodes = args.nodes.or(exp.nodes).unwrap_or(128);
        if nodes < 16 || nodes % 2 == 1 {
            return Err(Error::Config(format!("nodes: {nodes} must be even and at least 16")));
        }
        Ok(ExperimentSpec {
            kind,
            label,
            config,
            eps,
            family,
            t_decades,
            gamma0: args.gamma0.or(exp.gamma0).unwrap_or(0.5),
            nodes,
            node_sweep: exp.node_sweep.clone().unwrap_or_else(|| vec![64, 96, 128, 192, 256]),
            points: exp
                .points
                .as_ref()
                .map(|p| p.iter().map(|p| Point::new(p[0], p[1])).collect()),
            tolerance: args.tolerance.or(exp.tolerance),
            out: args
                .out
                .clone()
                .or(exp.out.clone())
                .unwrap_or_else(|| PathBuf::from("out")),
            format: args.format.or(exp.format),
            seed,
        })
    }

    fn node_counts(&self) -> NodeCounts {
        NodeCounts::for_config(&self.config, self.nodes)
    }

    fn check_eps(&self) -> Result<()> {
        for e in &self.eps {
            e.check(&self.config)?;
        }
        Ok(())
    }
}

/// Result of an experiment: artifacts written plus pass/fail.
#[derive(Debug)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub passed: bool,
    pub message: String,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            EXIT_TOLERANCE
        }
    }
}

/// Writes `bytes` to `dir/name` through a temporary file in `dir`.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    let target = dir.join(name);
    tmp.persist(&target).map_err(|e| Error::Io(e.error))?;
    Ok(target)
}

fn csv_bytes<R: Serialize>(rows: &[R]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}

/// A CSV table plus its JSON mirror.
struct Table<'a, R: Serialize> {
    stem: &'a str,
    rows: &'a [R],
}

#[derive(Serialize)]
struct Envelope<'a, M: Serialize, R: Serialize> {
    schema_version: u32,
    experiment: &'static str,
    fixture: &'a str,
    #[serde(flatten)]
    meta: M,
    rows: &'a [R],
}

fn emit<M: Serialize, R: Serialize>(
    spec: &ExperimentSpec,
    table: Table<'_, R>,
    meta: M,
) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    if spec.format != Some(Format::Json) {
        files.push(write_atomic(&spec.out, &format!("{}.csv", table.stem), &csv_bytes(table.rows)?)?);
    }
    if spec.format != Some(Format::Csv) {
        let env = Envelope {
            schema_version: SCHEMA_VERSION,
            experiment: spec.kind.name(),
            fixture: &spec.label,
            meta,
            rows: table.rows,
        };
        let json = serde_json::to_vec_pretty(&env).map_err(|e| Error::Io(std::io::Error::other(e)))?;
        files.push(write_atomic(&spec.out, &format!("{}.json", table.stem), &json)?);
    }
    Ok(files)
}

pub fn run(spec: &ExperimentSpec) -> Result<Outcome> {
    admissibility_check(&spec.config).into_result()?;
    match spec.kind {
        ExperimentKind::ValidateRepresentation => validate_representation(spec),
        ExperimentKind::AsymptoticSweep => asymptotic_sweep(spec),
        ExperimentKind::SymmetryCheck => symmetry_check(spec),
        ExperimentKind::ConvergenceStudy => convergence_study(spec),
        ExperimentKind::BundleDump => bundle_dump(spec),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationRow {
    pub schema_version: u32,
    pub eps1: f64,
    pub eps2: f64,
    pub region: String,
    pub x: f64,
    pub y: f64,
    pub direct: f64,
    pub representation: f64,
    pub abs_error: f64,
}

/// Default tolerance of `validate_representation`.
pub const VALIDATION_TOLERANCE: f64 = 1e-6;

/// Evaluates the macro and micro representations against a direct
/// physical-domain solve, on a finer independent discretization, for every
/// ε in `spec.eps`.
pub fn validation_rows(spec: &ExperimentSpec) -> Result<(Vec<ValidationRow>, usize)> {
    spec.check_eps()?;
    let geom = ReferenceGeometry::new(&spec.config, spec.node_counts())?;
    let limits = Arc::new(LimitProblems::new(&spec.config, &geom)?);
    let results: Vec<Result<(Vec<ValidationRow>, usize)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = spec
            .eps
            .iter()
            .map(|&eps| {
                let (geom, limits) = (geom.clone(), limits.clone());
                scope.spawn(move || validate_one(spec, geom, limits, eps))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("validation thread")).collect()
    });
    let mut rows = Vec::new();
    let mut dropped = 0;
    for r in results {
        let (mut r, d) = r?;
        rows.append(&mut r);
        dropped += d;
    }
    Ok((rows, dropped))
}

/// Node counts of the independent direct solve: 1.5× the representation's.
pub fn direct_nodes(base: NodeCounts) -> NodeCounts {
    let up = |n: usize| (3 * n / 2).div_ceil(2) * 2;
    NodeCounts {
        outer: up(base.outer),
        hole: up(base.hole),
    }
}

fn validate_one(
    spec: &ExperimentSpec,
    geom: ReferenceGeometry,
    limits: Arc<LimitProblems>,
    eps: EpsilonPair,
) -> Result<(Vec<ValidationRow>, usize)> {
    let nodes = geom.nodes;
    let bundle = StructureBundle::with_parts(&spec.config, geom, limits, eps)?;
    let mut regions = vec![match &spec.points {
        Some(p) => EvaluationRegion {
            kind: RegionKind::Macro,
            inner: 0.0,
            outer: f64::INFINITY,
            points: p.clone(),
        },
        None => EvaluationRegion::default_macro(),
    }];
    regions.push(EvaluationRegion::default_micro(1));
    regions.push(EvaluationRegion::default_micro(2));
    let mut samples = Vec::new();
    let mut dropped = 0;
    for region in regions {
        let (keep, drop) = region.admissible(&bundle);
        dropped += drop.len();
        for xi in keep {
            samples.push(match region.kind {
                RegionKind::Macro => ("macro".to_string(), xi, bundle.represent_macro(xi)?),
                RegionKind::Micro(h) => (format!("micro{h}"), bundle.physical_point(h, xi), bundle.represent_micro(h, xi)?),
            });
        }
    }
    let xs: Vec<Point> = samples.iter().map(|s| s.1).collect();
    let direct = direct_values(&spec.config, direct_nodes(nodes), eps, &xs)?;
    let rows = samples
        .into_iter()
        .zip(direct)
        .map(|((region, x, rep), d)| ValidationRow {
            schema_version: SCHEMA_VERSION,
            eps1: eps.eps1,
            eps2: eps.eps2,
            region,
            x: x.x,
            y: x.y,
            direct: d,
            representation: rep,
            abs_error: (d - rep).abs(),
        })
        .collect();
    Ok((rows, dropped))
}

fn validate_representation(spec: &ExperimentSpec) -> Result<Outcome> {
    let tol = spec.tolerance.unwrap_or(VALIDATION_TOLERANCE);
    let (rows, dropped) = validation_rows(spec)?;
    let max_error = rows.iter().map(|r| r.abs_error).fold(0.0, f64::max);
    let passed = max_error < tol;
    #[derive(Serialize)]
    struct Meta {
        max_error: f64,
        tolerance: f64,
        passed: bool,
        dropped_points: usize,
        seed: Option<u64>,
    }
    let files = emit(
        spec,
        Table { stem: "validate_representation", rows: &rows },
        Meta { max_error, tolerance: tol, passed, dropped_points: dropped, seed: spec.seed },
    )?;
    Ok(Outcome {
        files,
        passed,
        message: format!("max |direct − representation| = {max_error:.3e} (tolerance {tol:.1e}) over {} points", rows.len()),
    })
}

#[derive(Serialize)]
struct AsymptoticCsvRow {
    schema_version: u32,
    t: f64,
    gamma_t: f64,
    log_quotient: f64,
    u_direct: f64,
    u_leading: f64,
    residual: f64,
    normalized_residual: f64,
}

/// Default probe points for sweeps: four points on |x| = 2.
pub fn default_sweep_points() -> Vec<Point> {
    (0..4)
        .map(|k| {
            let a = 0.3 + k as f64 * std::f64::consts::FRAC_PI_2;
            Point::new(2.0 * a.cos(), 2.0 * a.sin())
        })
        .collect()
}

pub fn asymptotic_report(spec: &ExperimentSpec) -> Result<AsymptoticReport> {
    let points = spec.points.clone().unwrap_or_else(default_sweep_points);
    let setup = AsymptoticSetup::new(&spec.config, spec.node_counts(), points)?;
    setup.expansion(&spec.family, &decades(spec.t_decades.0, spec.t_decades.1))
}

fn asymptotic_sweep(spec: &ExperimentSpec) -> Result<Outcome> {
    let report = asymptotic_report(spec)?;
    let rows: Vec<AsymptoticCsvRow> = report
        .rows
        .iter()
        .map(|r| AsymptoticCsvRow {
            schema_version: SCHEMA_VERSION,
            t: r.t,
            gamma_t: r.gamma_t,
            log_quotient: r.log_quotient,
            u_direct: r.u_direct,
            u_leading: r.u_leading,
            residual: r.residual,
            normalized_residual: r.normalized_residual,
        })
        .collect();
    let passed = report.verdict.monotone;
    let mut files = Vec::new();
    if spec.format != Some(Format::Json) {
        files.push(write_atomic(&spec.out, "asymptotic_sweep.csv", &csv_bytes(&rows)?)?);
    }
    if spec.format != Some(Format::Csv) {
        let json = serde_json::to_vec_pretty(&report).map_err(|e| Error::Io(std::io::Error::other(e)))?;
        files.push(write_atomic(&spec.out, "asymptotic_sweep.json", &json)?);
    }
    Ok(Outcome {
        files,
        passed,
        message: format!(
            "normalized residual {} over t = 1e-{}..1e-{}; decay factors {:?}",
            if passed { "decreasing" } else { "NOT decreasing" },
            spec.t_decades.0,
            spec.t_decades.1,
            report.verdict.decay_factors.iter().map(|f| format!("{f:.3}")).collect::<Vec<_>>()
        ),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct QuantityRow {
    pub schema_version: u32,
    pub quantity: String,
    pub value: f64,
}

/// Default tolerance of `symmetry_check` on `(H^{2,1} − H^{1,2})·flux₁`.
pub const SYMMETRY_TOLERANCE: f64 = 1e-7;

fn symmetry_check(spec: &ExperimentSpec) -> Result<Outcome> {
    let tol = spec.tolerance.unwrap_or(SYMMETRY_TOLERANCE);
    let setup = AsymptoticSetup::new(&spec.config, spec.node_counts(), vec![])?;
    let (coefficient, t) = setup.coefficient_gamma0_pos(spec.gamma0)?;
    let flux_term = (t.h.get(2, 1) - t.h.get(1, 2)) * t.flux(1);
    let q = |name: &str, value: f64| QuantityRow {
        schema_version: SCHEMA_VERSION,
        quantity: name.to_string(),
        value,
    };
    let rows = vec![
        q("gamma0", spec.gamma0),
        q("H11", t.h.get(1, 1)),
        q("H12", t.h.get(1, 2)),
        q("H21", t.h.get(2, 1)),
        q("H22", t.h.get(2, 2)),
        q("c_gamma0", t.h.c()),
        q("d_gamma0", t.h.d()),
        q("flux1", t.flux(1)),
        q("flux2", t.flux(2)),
        q("lim_u_tilde", t.u_tilde.limit),
        q("flux_term", flux_term),
        q("leading_coefficient", coefficient),
    ];
    let passed = flux_term.abs() < tol;
    #[derive(Serialize)]
    struct Meta {
        tolerance: f64,
        passed: bool,
    }
    let files = emit(spec, Table { stem: "symmetry_check", rows: &rows }, Meta { tolerance: tol, passed })?;
    Ok(Outcome {
        files,
        passed,
        message: format!("(H21 − H12)·flux1 = {flux_term:.3e} (tolerance {tol:.1e})"),
    })
}

/// Smallest acceptable `error(64)/error(128)` on the analytic oracles.
pub const SPECTRAL_RATIO: f64 = 1e3;

fn convergence_study(spec: &ExperimentSpec) -> Result<Outcome> {
    let mut ns = spec.node_sweep.clone();
    if !ns.contains(&spec.nodes) {
        ns.push(spec.nodes);
        ns.sort_unstable();
    }
    let rows: Vec<ConvergenceRow> = convergence_table(&OracleCase::ALL, &ns)?;
    let mut ratios = Vec::new();
    for case in OracleCase::ANALYTIC {
        ratios.push((case.name(), refinement_ratio(case, 64, 128)?));
    }
    let green = OracleCase::DiskGreen.error(128)?;
    let passed = ratios.iter().all(|(_, r)| *r >= SPECTRAL_RATIO) && green < 1e-8;
    #[derive(Serialize)]
    struct Meta<'a> {
        ratio_64_to_128: &'a [(&'static str, f64)],
        disk_green_error_128: f64,
        passed: bool,
    }
    #[derive(Serialize)]
    struct Row<'a> {
        schema_version: u32,
        case: &'a str,
        n: usize,
        error: f64,
    }
    let out: Vec<Row> = rows
        .iter()
        .map(|r| Row { schema_version: SCHEMA_VERSION, case: r.case, n: r.n, error: r.error })
        .collect();
    let files = emit(
        spec,
        Table { stem: "convergence_study", rows: &out },
        Meta { ratio_64_to_128: &ratios, disk_green_error_128: green, passed },
    )?;
    Ok(Outcome {
        files,
        passed,
        message: format!(
            "error(64)/error(128): {}",
            ratios.iter().map(|(c, r)| format!("{c} {r:.2e}")).collect::<Vec<_>>().join(", ")
        ),
    })
}

#[derive(Serialize)]
struct BundleRow {
    schema_version: u32,
    eps1: f64,
    eps2: f64,
    f1: f64,
    f2: f64,
    r11: f64,
    r12: f64,
    r21: f64,
    r22: f64,
    curly_r: Option<f64>,
    det_direct: Option<f64>,
    det_formula: Option<f64>,
    lambda_condition: Option<f64>,
}

pub fn bundle_summaries(spec: &ExperimentSpec) -> Result<Vec<BundleSummary>> {
    spec.check_eps()?;
    let geom = ReferenceGeometry::new(&spec.config, spec.node_counts())?;
    let limits = Arc::new(LimitProblems::new(&spec.config, &geom)?);
    spec.eps
        .iter()
        .map(|&eps| Ok(StructureBundle::with_parts(&spec.config, geom.clone(), limits.clone(), eps)?.summary()))
        .collect()
}

fn bundle_dump(spec: &ExperimentSpec) -> Result<Outcome> {
    let summaries = bundle_summaries(spec)?;
    let rows: Vec<BundleRow> = summaries
        .iter()
        .map(|s| BundleRow {
            schema_version: SCHEMA_VERSION,
            eps1: s.eps1,
            eps2: s.eps2,
            f1: s.f[0],
            f2: s.f[1],
            r11: s.r[0][0],
            r12: s.r[0][1],
            r21: s.r[1][0],
            r22: s.r[1][1],
            curly_r: s.curly_r,
            det_direct: s.det_direct,
            det_formula: s.det_formula,
            lambda_condition: s.lambda_condition,
        })
        .collect();
    let mut files = Vec::new();
    if spec.format != Some(Format::Json) {
        files.push(write_atomic(&spec.out, "bundle_dump.csv", &csv_bytes(&rows)?)?);
    }
    if spec.format != Some(Format::Csv) {
        #[derive(Serialize)]
        struct Dump<'a> {
            schema_version: u32,
            experiment: &'static str,
            fixture: &'a str,
            bundles: &'a [BundleSummary],
        }
        let json = serde_json::to_vec_pretty(&Dump {
            schema_version: SCHEMA_VERSION,
            experiment: spec.kind.name(),
            fixture: &spec.label,
            bundles: &summaries,
        })
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
        files.push(write_atomic(&spec.out, "bundle_dump.json", &json)?);
    }
    Ok(Outcome {
        files,
        passed: true,
        message: format!("{} bundles", summaries.len()),
    })
}

/// Parses `args`, runs, prints a one-line summary and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    match cli.command {
        Command::Fixtures => {
            for name in fixtures::NAMES {
                println!("{name}");
            }
            0
        }
        Command::Run(args) => {
            let result = ExperimentSpec::resolve(&args).and_then(|spec| run(&spec));
            match result {
                Ok(outcome) => {
                    println!("{}: {}", if outcome.passed { "ok" } else { "FAILED" }, outcome.message);
                    for f in &outcome.files {
                        println!("wrote {}", f.display());
                    }
                    outcome.exit_code()
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    exit_code(&e)
                }
            }
        }
    }
}
