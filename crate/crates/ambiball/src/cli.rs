//! Command-line front end.
//!
//! Five subcommands: `distance` between two measures, `ball-superset` for
//! the explicit extreme-point candidates, `maximize` for worst-case
//! expectations over a ball, `verify` for oracle checks, and `empirical`
//! to merge a sample list into a center measure. Outputs are deterministic
//! JSON (or CSV via `--format csv`): same inputs and seed, same bytes,
//! except for the wall-clock `runtime_ms` field of verification reports.
//!
//! Exit codes: 0 success, 2 validation or input error, 3 verification
//! failure (oracle violations, or `--method both` disagreement). Errors
//! print one machine-readable JSON line to stderr:
//! `{"error":"<code>","message":"..."}`.

use crate::distances::{self, BallMetric, DistanceError};
use crate::extreme_sets::{filtered_families, CenterSpec, ExtremeSetError, MultiIndex};
use crate::io::{self, IoError, JsonObj};
use crate::measures::DiscreteMeasure;
use crate::metric_space::{FiniteMetricSpace, PointSet};
use crate::optimizer::{self, OptimizerError, RobustResult};
use crate::oracle::{self, OracleError};
use clap::{Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::sync::Arc;

const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Tolerance overrides must stay in (0, 1e-3].
pub const MAX_TOL: f64 = 1e-3;
/// `--method both` fails when the two routes differ by more than this.
pub const METHOD_AGREEMENT_TOL: f64 = 1e-7;

/// Per-invocation settings shared by all subcommands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub lp_tol: f64,
    pub dedup_tol: f64,
    pub seed: u64,
    pub format: OutputFormat,
}

impl RunConfig {
    fn validate(&self) -> Result<(), Failure> {
        for (name, tol) in [("lp-tol", self.lp_tol), ("dedup-tol", self.dedup_tol)] {
            if !(tol > 0.0 && tol <= MAX_TOL) {
                return Err(Failure::validation(
                    "invalid_tolerance",
                    format!("--{name} must lie in (0, {MAX_TOL:e}], got {tol:e}"),
                ));
            }
        }
        Ok(())
    }

    /// Stable fingerprint of everything that can influence the output.
    fn hash(&self, command_desc: &str) -> String {
        io::config_hash(&format!(
            "v{VERSION} {command_desc} lp_tol={} dedup_tol={} seed={} format={:?}",
            io::fmt_float(self.lp_tol),
            io::fmt_float(self.dedup_tol),
            self.seed,
            self.format,
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MetricArg {
    Prokhorov,
    Kantorovich,
}

impl From<MetricArg> for BallMetric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Prokhorov => BallMetric::Prokhorov,
            MetricArg::Kantorovich => BallMetric::Kantorovich,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Lp,
    Superset,
    Both,
}

#[derive(Parser)]
#[command(
    name = "ambiball",
    version,
    about = "Distances, extreme-point supersets, and worst-case optimization \
             for metric balls around discrete measures"
)]
struct Cli {
    /// LP pivot tolerance override, in (0, 1e-3].
    #[arg(long, global = true, default_value_t = 1e-11)]
    lp_tol: f64,
    /// Deduplication tolerance for reported candidates, in (0, 1e-3].
    #[arg(long, global = true, default_value_t = 1e-9)]
    dedup_tol: f64,
    /// Seed for randomized verification.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Distance between two measures on a shared finite metric space.
    Distance {
        #[arg(long, value_enum)]
        metric: MetricArg,
        /// First measure file.
        #[arg(long)]
        mu1: PathBuf,
        /// Second measure file.
        #[arg(long)]
        mu2: PathBuf,
        /// Space file; optional when a measure file embeds its space.
        #[arg(long)]
        space: Option<PathBuf>,
        /// Write the witnessing coupling here.
        #[arg(long)]
        witness: Option<PathBuf>,
        /// Write the full report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Explicit candidate superset of the ball's extreme points.
    BallSuperset {
        /// Center measure file.
        #[arg(long)]
        mu: PathBuf,
        /// Ball radius.
        #[arg(long, allow_negative_numbers = true)]
        eps: f64,
        /// Space file; optional when the measure file embeds its space.
        #[arg(long)]
        space: Option<PathBuf>,
        /// Write the candidate records here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Worst-case expectation of an objective over the ball.
    Maximize {
        /// Center measure file.
        #[arg(long)]
        mu: PathBuf,
        /// Ball radius.
        #[arg(long, allow_negative_numbers = true)]
        eps: f64,
        #[arg(long, value_enum)]
        metric: MetricArg,
        /// Objective file: values per point.
        #[arg(long)]
        objective: PathBuf,
        /// Solution route; `both` cross-checks and fails on disagreement.
        #[arg(long, value_enum, default_value_t = MethodArg::Lp)]
        method: MethodArg,
        /// Space file; optional when the measure file embeds its space.
        #[arg(long)]
        space: Option<PathBuf>,
        /// Write the result here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check structural claims against the brute-force polytope oracle.
    Verify {
        /// Center measure file; omit to verify random instances.
        #[arg(long)]
        mu: Option<PathBuf>,
        /// Ball radius for a fixed center.
        #[arg(long, allow_negative_numbers = true)]
        eps: Option<f64>,
        /// Space file for a fixed center.
        #[arg(long)]
        space: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = MetricArg::Prokhorov)]
        metric: MetricArg,
        /// Number of random instances (ignored with --mu).
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Write the report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Merge a sample list into a center measure with multiplicities.
    Empirical {
        /// Samples file: a list of point labels.
        #[arg(long)]
        samples: PathBuf,
        /// Space file.
        #[arg(long)]
        space: PathBuf,
        /// Write the measure here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Error on its way to stderr: a stable code, a message, an exit code.
struct Failure {
    code: &'static str,
    message: String,
    exit: i32,
}

impl Failure {
    fn validation(code: &'static str, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
            exit: 2,
        }
    }
    fn verification(code: &'static str, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
            exit: 3,
        }
    }
    fn diagnostic(&self) -> String {
        JsonObj::new()
            .str_field("error", self.code)
            .str_field("message", &self.message)
            .finish()
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::validation(e.code(), e.to_string())
    }
}

impl From<DistanceError> for Failure {
    fn from(e: DistanceError) -> Self {
        let code = match &e {
            DistanceError::SpaceMismatch => "space_mismatch",
            DistanceError::InvalidEpsilon { .. } => "invalid_epsilon",
            DistanceError::Numerical(_) => "numerical_error",
        };
        Failure::validation(code, e.to_string())
    }
}

impl From<ExtremeSetError> for Failure {
    fn from(e: ExtremeSetError) -> Self {
        let code = match &e {
            ExtremeSetError::InvalidEpsilon { .. } => "invalid_epsilon",
            _ => "invalid_center",
        };
        Failure::validation(code, e.to_string())
    }
}

impl From<OptimizerError> for Failure {
    fn from(e: OptimizerError) -> Self {
        match e {
            OptimizerError::Center(inner) => inner.into(),
            OptimizerError::Lp(_) => Failure::validation("numerical_error", e.to_string()),
            OptimizerError::EmptyCandidates => {
                Failure::validation("empty_candidates", e.to_string())
            }
            _ => Failure::validation("invalid_objective", e.to_string()),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        let code = match &e {
            OracleError::SpaceTooLarge { .. } => "space_too_large",
            _ => "oracle_error",
        };
        Failure::validation(code, e.to_string())
    }
}

fn init_threads() {
    static INIT: std::sync::Once = std::sync::Once::new();
    INIT.call_once(|| {
        if let Some(k) = std::env::var("AMBIBALL_THREADS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .filter(|&k| k >= 1)
        {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build_global();
        }
    });
}

/// Runs the CLI against the given argv (including the program name) and
/// returns the process exit code. Never exits or panics on user errors,
/// so tests can drive it in-process.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let failure = Failure::validation("usage_error", e.render().to_string());
            eprintln!("{}", failure.diagnostic());
            return 2;
        }
    };
    init_threads();
    let config = RunConfig {
        lp_tol: cli.lp_tol,
        dedup_tol: cli.dedup_tol,
        seed: cli.seed,
        format: cli.format,
    };
    match dispatch(cli.cmd, &config) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("{}", f.diagnostic());
            f.exit
        }
    }
}

pub fn run_from_env() -> i32 {
    run(std::env::args_os())
}

fn dispatch(cmd: Cmd, config: &RunConfig) -> Result<(), Failure> {
    config.validate()?;
    match cmd {
        Cmd::Distance {
            metric,
            mu1,
            mu2,
            space,
            witness,
            out,
        } => cmd_distance(
            config,
            metric.into(),
            &mu1,
            &mu2,
            space.as_deref(),
            witness.as_deref(),
            out.as_deref(),
        ),
        Cmd::BallSuperset {
            mu,
            eps,
            space,
            out,
        } => cmd_ball_superset(config, &mu, eps, space.as_deref(), out.as_deref()),
        Cmd::Maximize {
            mu,
            eps,
            metric,
            objective,
            method,
            space,
            out,
        } => cmd_maximize(
            config,
            &mu,
            eps,
            metric.into(),
            &objective,
            method,
            space.as_deref(),
            out.as_deref(),
        ),
        Cmd::Verify {
            mu,
            eps,
            space,
            metric,
            trials,
            out,
        } => cmd_verify(
            config,
            mu.as_deref(),
            eps,
            space.as_deref(),
            metric.into(),
            trials,
            out.as_deref(),
        ),
        Cmd::Empirical {
            samples,
            space,
            out,
        } => cmd_empirical(config, &samples, &space, out.as_deref()),
    }
}

/// Space from the --space flag and any spaces embedded in measure files;
/// all sources present must agree exactly.
fn resolve_space(
    flag: Option<&Path>,
    docs: &[&io::MeasureDoc],
) -> Result<Arc<FiniteMetricSpace>, Failure> {
    let mut chosen: Option<Arc<FiniteMetricSpace>> = match flag {
        Some(path) => Some(io::load_space(path)?),
        None => None,
    };
    for doc in docs {
        if let Some(embedded) = &doc.space {
            match &chosen {
                None => chosen = Some(Arc::new(embedded.clone())),
                Some(existing) => {
                    if !io::spaces_equal(existing, embedded) {
                        return Err(IoError::SpaceMismatch.into());
                    }
                }
            }
        }
    }
    chosen.ok_or_else(|| IoError::MissingSpace.into())
}

fn load_center(
    mu_path: &Path,
    eps: f64,
    space_flag: Option<&Path>,
) -> Result<(Arc<FiniteMetricSpace>, Arc<CenterSpec>), Failure> {
    let doc = io::load_measure_doc(mu_path)?;
    let space = resolve_space(space_flag, &[&doc])?;
    let mu = io::resolve_measure(&doc, &space, &mu_path.display().to_string())?;
    let center = Arc::new(CenterSpec::from_measure(&mu, eps)?);
    Ok((space, center))
}

fn write_or_ignore(out: Option<&Path>, content: &str) -> Result<(), Failure> {
    if let Some(path) = out {
        io::write_file(path, content)?;
    }
    Ok(())
}

fn cmd_distance(
    config: &RunConfig,
    metric: BallMetric,
    mu1_path: &Path,
    mu2_path: &Path,
    space_flag: Option<&Path>,
    witness: Option<&Path>,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let doc1 = io::load_measure_doc(mu1_path)?;
    let doc2 = io::load_measure_doc(mu2_path)?;
    let space = resolve_space(space_flag, &[&doc1, &doc2])?;
    let m1 = io::resolve_measure(&doc1, &space, &mu1_path.display().to_string())?;
    let m2 = io::resolve_measure(&doc2, &space, &mu2_path.display().to_string())?;
    let (value, plan) = match metric {
        BallMetric::Kantorovich => distances::kantorovich(&m1, &m2)?,
        BallMetric::Prokhorov => {
            let value = distances::prokhorov(&m1, &m2)?;
            let plan = distances::min_excess_mass(&m1, &m2, value)?.1;
            (value, plan)
        }
    };
    println!("{value:?}");
    let hash = config.hash(&format!("distance metric={metric}"));
    let report = match config.format {
        OutputFormat::Json => JsonObj::new()
            .str_field("command", "distance")
            .str_field("metric", &metric.to_string())
            .float_field("value", value)
            .str_field("version", VERSION)
            .str_field("config_hash", &hash)
            .finish(),
        OutputFormat::Csv => io::csv_table(
            &["metric", "value", "version", "config_hash"],
            &[vec![
                metric.to_string(),
                io::fmt_float(value),
                VERSION.into(),
                hash.clone(),
            ]],
        ),
    };
    write_or_ignore(out, &report)?;
    if let Some(path) = witness {
        io::write_file(path, &io::coupling_json(&plan))?;
    }
    Ok(())
}

fn family_tag(index: MultiIndex) -> String {
    match index {
        MultiIndex::Zero => "zero".into(),
        MultiIndex::Single(i) => format!("single:{i}"),
        MultiIndex::Pair(i, j) => format!("pair:{i}:{j}"),
    }
}

fn cmd_ball_superset(
    config: &RunConfig,
    mu_path: &Path,
    eps: f64,
    space_flag: Option<&Path>,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let (space, center) = load_center(mu_path, eps, space_flag)?;
    let classes = filtered_families(&center, &PointSet::full(&space));
    struct Record {
        tag: String,
        x_labels: Vec<String>,
        corner: Vec<f64>,
        measure: DiscreteMeasure,
    }
    let mut records = Vec::new();
    for class in &classes {
        for (family, region) in class.expand() {
            let x_labels: Vec<String> = family
                .x()
                .iter()
                .map(|&p| space.label(p).to_string())
                .collect();
            for corner in &region.corners {
                let coupling = family.element(corner, true).map_err(Failure::from)?;
                records.push(Record {
                    tag: family_tag(family.index()),
                    x_labels: x_labels.clone(),
                    corner: corner.clone(),
                    measure: coupling.marginal_second(),
                });
            }
        }
    }
    let mut distinct: Vec<&DiscreteMeasure> = Vec::new();
    for record in &records {
        if !distinct
            .iter()
            .any(|m| m.is_close(&record.measure, config.dedup_tol))
        {
            distinct.push(&record.measure);
        }
    }
    println!(
        "{} candidate records, {} distinct measures",
        records.len(),
        distinct.len()
    );
    let hash = config.hash(&format!("ball-superset eps={}", io::fmt_float(eps)));
    let report = match config.format {
        OutputFormat::Json => {
            let rows = io::json_array(records.iter().map(|r| {
                let atoms = io::json_array(r.measure.atoms().iter().map(|&(p, w)| {
                    format!(
                        "[{},{}]",
                        serde_json::to_string(space.label(p)).expect("label serializes"),
                        io::fmt_float(w)
                    )
                }));
                let labels = io::json_array(
                    r.x_labels
                        .iter()
                        .map(|l| serde_json::to_string(l).expect("label serializes")),
                );
                let corner = io::json_array(r.corner.iter().map(|&g| io::fmt_float(g)));
                JsonObj::new()
                    .str_field("family", &r.tag)
                    .raw("x", &labels)
                    .raw("corner", &corner)
                    .raw("measure", &atoms)
                    .finish()
            }));
            JsonObj::new()
                .str_field("command", "ball-superset")
                .float_field("eps", eps)
                .raw("space", &io::space_json(&space))
                .raw("records", &rows)
                .int_field("distinct_candidates", distinct.len() as u128)
                .str_field("version", VERSION)
                .str_field("config_hash", &hash)
                .finish()
        }
        OutputFormat::Csv => io::csv_table(
            &["family", "x", "corner", "measure"],
            &records
                .iter()
                .map(|r| {
                    vec![
                        r.tag.clone(),
                        r.x_labels.join(";"),
                        r.corner
                            .iter()
                            .map(|&g| io::fmt_float(g))
                            .collect::<Vec<_>>()
                            .join(";"),
                        r.measure
                            .atoms()
                            .iter()
                            .map(|&(p, w)| format!("{}={}", space.label(p), io::fmt_float(w)))
                            .collect::<Vec<_>>()
                            .join(";"),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
    };
    write_or_ignore(out, &report)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_maximize(
    config: &RunConfig,
    mu_path: &Path,
    eps: f64,
    metric: BallMetric,
    objective_path: &Path,
    method: MethodArg,
    space_flag: Option<&Path>,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let (space, center) = load_center(mu_path, eps, space_flag)?;
    let objective = io::load_objective(objective_path, &space)?;
    let all_points = PointSet::full(&space);
    let solve = |m: MethodArg| -> Result<RobustResult, Failure> {
        match m {
            MethodArg::Superset => Ok(optimizer::maximize_linear_superset(
                &center,
                &objective,
                metric,
                &all_points,
            )?),
            _ => Ok(optimizer::maximize_linear_lp(&center, &objective, metric)?),
        }
    };
    let (result, method_name) = match method {
        MethodArg::Lp => (solve(MethodArg::Lp)?, "lp"),
        MethodArg::Superset => (solve(MethodArg::Superset)?, "superset"),
        MethodArg::Both => {
            let lp = solve(MethodArg::Lp)?;
            let superset = solve(MethodArg::Superset)?;
            if (lp.value - superset.value).abs() > METHOD_AGREEMENT_TOL {
                return Err(Failure::verification(
                    "method_disagreement",
                    format!(
                        "lp route gives {:?}, superset route gives {:?} (tolerance {METHOD_AGREEMENT_TOL:e})",
                        lp.value, superset.value
                    ),
                ));
            }
            (lp, "both")
        }
    };
    println!("{:?}", result.value);
    let hash = config.hash(&format!(
        "maximize metric={metric} method={method_name} eps={}",
        io::fmt_float(eps)
    ));
    let report = match config.format {
        OutputFormat::Json => JsonObj::new()
            .str_field("command", "maximize")
            .str_field("metric", &metric.to_string())
            .str_field("method", method_name)
            .float_field("value", result.value)
            .bool_field("heuristic", result.heuristic)
            .raw("argmax", &io::measure_json(&result.argmax))
            .raw("witness", &io::coupling_json(&result.witness))
            .str_field("version", VERSION)
            .str_field("config_hash", &hash)
            .finish(),
        OutputFormat::Csv => io::csv_table(
            &[
                "metric",
                "method",
                "value",
                "heuristic",
                "version",
                "config_hash",
            ],
            &[vec![
                metric.to_string(),
                method_name.into(),
                io::fmt_float(result.value),
                result.heuristic.to_string(),
                VERSION.into(),
                hash.clone(),
            ]],
        ),
    };
    write_or_ignore(out, &report)?;
    Ok(())
}

fn cmd_verify(
    config: &RunConfig,
    mu_path: Option<&Path>,
    eps: Option<f64>,
    space_flag: Option<&Path>,
    metric: BallMetric,
    trials: usize,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let report = match mu_path {
        Some(path) => {
            let eps = eps
                .ok_or_else(|| Failure::validation("usage_error", "--eps is required with --mu"))?;
            let (_, center) = load_center(path, eps, space_flag)?;
            let start = std::time::Instant::now();
            let (support, cover) = oracle::verify_instance(&center, metric)?;
            let mut violations = 0;
            if !support.ok {
                violations += 1;
            }
            let mut open_closed = 0;
            if let Some(c) = &cover {
                if !c.ok {
                    violations += 1;
                }
                if c.open_closed_differs {
                    open_closed += 1;
                }
            }
            oracle::VerifyReport {
                instances: 1,
                violations,
                max_support: support
                    .gamma_max_support
                    .max(support.ball_max_support.unwrap_or(0)),
                support_bound: support.bound,
                open_closed_differences: open_closed,
                runtime_ms: start.elapsed().as_millis(),
            }
        }
        None => oracle::verify_random_instances(config.seed, trials, metric, 3..=5, 1..=3)?,
    };
    let hash = config.hash(&format!(
        "verify metric={metric} trials={} fixed={}",
        report.instances,
        mu_path.is_some()
    ));
    let rendered = match config.format {
        OutputFormat::Json => JsonObj::new()
            .str_field("command", "verify")
            .str_field("metric", &metric.to_string())
            .int_field("instances", report.instances as u128)
            .int_field("violations", report.violations as u128)
            .int_field("max_support", report.max_support as u128)
            .int_field("support_bound", report.support_bound as u128)
            .int_field(
                "open_closed_differences",
                report.open_closed_differences as u128,
            )
            .int_field("runtime_ms", report.runtime_ms)
            .str_field("version", VERSION)
            .str_field("config_hash", &hash)
            .finish(),
        OutputFormat::Csv => io::csv_table(
            &[
                "metric",
                "instances",
                "violations",
                "max_support",
                "support_bound",
                "open_closed_differences",
                "runtime_ms",
            ],
            &[vec![
                metric.to_string(),
                report.instances.to_string(),
                report.violations.to_string(),
                report.max_support.to_string(),
                report.support_bound.to_string(),
                report.open_closed_differences.to_string(),
                report.runtime_ms.to_string(),
            ]],
        ),
    };
    println!("{rendered}");
    write_or_ignore(out, &rendered)?;
    if report.violations > 0 {
        return Err(Failure::verification(
            "verification_failed",
            format!(
                "{} of {} instances violated an invariant",
                report.violations, report.instances
            ),
        ));
    }
    Ok(())
}

fn cmd_empirical(
    config: &RunConfig,
    samples_path: &Path,
    space_path: &Path,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let space = io::load_space(space_path)?;
    let samples = io::load_samples(samples_path, &space)?;
    let center = optimizer::empirical_center(&samples, space.clone(), 0.0)?;
    let measure = center.measure();
    let rendered = match config.format {
        OutputFormat::Json => io::measure_json(&measure),
        OutputFormat::Csv => io::csv_table(
            &["label", "weight"],
            &measure
                .atoms()
                .iter()
                .map(|&(p, w)| vec![space.label(p).to_string(), io::fmt_float(w)])
                .collect::<Vec<_>>(),
        ),
    };
    println!("{rendered}");
    write_or_ignore(out, &rendered)?;
    let _ = config;
    Ok(())
}
