//! `equigeo`: build spaces, emit equigeodesic systems, verify listed
//! families and search for solutions.
//!
//! Exit codes: 0 success, 1 a check or verification failed, 2 usage or
//! input error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use equigeo::catalog::{list_families, printed_system, verify_all, SolutionFamily, VerificationReport};
use equigeo::engine::{compare_with_printed, generate_system, PrintedComparison, QuadraticSystem};
use equigeo::homspace::{
    build_space, metric_presets, structure_report, validate_wallach, MetricClassPartition, MetricName,
    SpaceConfig, SpaceFamily, SpaceSpec,
};
use equigeo::report::ValidationReport;
use equigeo::solver::{exhaustiveness_report, solve, ExhaustivenessReport, SolverOptions, SolverResult};
use equigeo::Error;

const OUT_DIR_VAR: &str = "EQUIGEO_OUT_DIR";

#[derive(Parser)]
#[command(name = "equigeo", version, about = "Equigeodesic vectors on reductive homogeneous spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value = "human", global = true)]
    format: Format,

    /// Write the report to this file instead of stdout. Relative paths are
    /// resolved against $EQUIGEO_OUT_DIR when it is set.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// List supported space families with parameter constraints and modules.
    Spaces {
        /// Restrict to one family.
        #[arg(long)]
        family: Option<SpaceFamily>,
        /// Parameters for the module listing.
        #[arg(long, value_delimiter = ',')]
        params: Vec<usize>,
        /// Shorthand for a single parameter.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Validate a decomposition: reductivity, orthogonality, and the
    /// generalized Wallach relations where they apply.
    Check {
        #[command(flatten)]
        space: SpaceArgs,
    },
    /// Emit the bilinear system for a metric class partition.
    GenSystem {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        partition: PartitionArgs,
        /// Compare with the transcribed system for this space.
        #[arg(long)]
        compare: bool,
    },
    /// Verify listed solution families on random samples.
    Verify {
        #[command(flatten)]
        space: SpaceArgs,
        /// Named metric whose catalog to use (einstein, jensen).
        #[arg(long)]
        metric: Option<String>,
        /// Only this family (1-based index).
        #[arg(long)]
        family: Option<usize>,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 1e-10, value_parser = positive_f64)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Search for unit-norm solutions with random restarts.
    Solve {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        partition: PartitionArgs,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        restarts: u64,
        #[arg(long, default_value_t = 1e-12, value_parser = positive_f64)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Relative module-norm threshold for support signatures.
        #[arg(long, default_value_t = 1e-6, value_parser = positive_f64)]
        threshold: f64,
    },
}

#[derive(Args)]
struct SpaceArgs {
    /// Space family, e.g. wallach-so, or a full spec such as stiefel-v2(5).
    space: Option<String>,
    /// Comma-separated parameters.
    #[arg(long, value_delimiter = ',')]
    params: Vec<usize>,
    /// Shorthand for a single parameter.
    #[arg(long)]
    n: Option<usize>,
    /// JSON file {"family": ..., "params": [...]}.
    #[arg(long, conflicts_with = "space")]
    space_file: Option<PathBuf>,
}

#[derive(Args)]
struct PartitionArgs {
    /// Metric classes separated by '|', module labels by ','.
    #[arg(long, conflicts_with = "metric")]
    partition: Option<String>,
    /// Use the partition of a named metric (einstein, jensen).
    #[arg(long)]
    metric: Option<String>,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("{s:?} is not a positive number")),
    }
}

/// A usage or input error; exits with code 2.
struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<(String, bool), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (name, result) = run(&cli);
    match result {
        Ok((text, ok)) => {
            if let Err(msg) = emit(&cli, &name, &text) {
                eprintln!("error: {msg}");
                return ExitCode::from(2);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn extension(f: Format) -> &'static str {
    match f {
        Format::Human => "txt",
        Format::Json => "json",
        Format::Csv => "csv",
    }
}

/// Writes to `--output`, to `$EQUIGEO_OUT_DIR/<name>.<ext>`, or to stdout.
fn emit(cli: &Cli, name: &str, text: &str) -> Result<(), String> {
    let dir = std::env::var_os(OUT_DIR_VAR).map(PathBuf::from);
    let path = match (&cli.output, dir) {
        (Some(p), Some(d)) if p.is_relative() => Some(d.join(p)),
        (Some(p), _) => Some(p.clone()),
        (None, Some(d)) => Some(d.join(format!("{name}.{}", extension(cli.format)))),
        (None, None) => None,
    };
    match path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| format!("{}: {e}", parent.display()))?;
            }
            std::fs::write(&p, text).map_err(|e| format!("{}: {e}", p.display()))?;
            eprintln!("wrote {}", p.display());
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> (String, Outcome) {
    match &cli.command {
        Command::Spaces { family, params, n } => ("spaces".into(), cmd_spaces(cli.format, *family, params, *n)),
        Command::Check { space } => with_space(space, "check", |c| cmd_check(cli.format, c)),
        Command::GenSystem { space, partition, compare } => with_space(space, "gen-system", |c| {
            cmd_gen_system(cli.format, c, partition, *compare)
        }),
        Command::Verify {
            space,
            metric,
            family,
            samples,
            tol,
            seed,
        } => with_space(space, "verify", |c| {
            cmd_verify(cli.format, c, metric.as_deref(), *family, *samples as usize, *tol, *seed)
        }),
        Command::Solve {
            space,
            partition,
            restarts,
            tol,
            seed,
            threshold,
        } => with_space(space, "solve", |c| {
            let opts = SolverOptions {
                restarts: *restarts as usize,
                tol: *tol,
                seed: *seed,
                threshold: *threshold,
            };
            cmd_solve(cli.format, c, partition, &opts)
        }),
    }
}

fn with_space(args: &SpaceArgs, command: &str, f: impl FnOnce(&SpaceConfig) -> Outcome) -> (String, Outcome) {
    match resolve_space(args).and_then(|spec| build_space(&spec).map_err(Failure::from)) {
        Ok(config) => {
            let name = format!("{command}-{}", file_stem(&config.spec));
            (name, f(&config))
        }
        Err(e) => (command.to_string(), Err(e)),
    }
}

fn file_stem(spec: &SpaceSpec) -> String {
    let mut s = spec.family.name().to_string();
    for p in &spec.params {
        write!(s, "-{p}").unwrap();
    }
    s
}

fn resolve_space(args: &SpaceArgs) -> Result<SpaceSpec, Failure> {
    let mut spec = if let Some(path) = &args.space_file {
        read_space_file(path)?
    } else {
        let text = args
            .space
            .as_deref()
            .ok_or_else(|| Failure("a space or --space-file is required".into()))?;
        text.parse::<SpaceSpec>()?
    };
    let mut params = args.params.clone();
    if let Some(n) = args.n {
        if !params.is_empty() {
            return Err(Failure("--n and --params are exclusive".into()));
        }
        params.push(n);
    }
    if !params.is_empty() {
        if !spec.params.is_empty() {
            return Err(Failure(format!("{spec} already has parameters")));
        }
        spec.params = params;
    }
    if spec.params.is_empty() {
        spec.params = spec.family.default_params();
    }
    Ok(spec)
}

fn read_space_file(path: &Path) -> Result<SpaceSpec, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn metric_name(name: &str) -> Result<&'static [MetricName], Failure> {
    match name {
        "einstein" | "einstein-v2" => Ok(&[MetricName::EinsteinV2]),
        "jensen" => Ok(&[MetricName::JensenPlus, MetricName::JensenMinus]),
        "jensen-plus" => Ok(&[MetricName::JensenPlus]),
        "jensen-minus" => Ok(&[MetricName::JensenMinus]),
        other => Err(Failure(format!("unknown metric {other:?}; use einstein or jensen"))),
    }
}

fn resolve_partition(config: &SpaceConfig, args: &PartitionArgs) -> Result<MetricClassPartition, Failure> {
    if let Some(name) = &args.metric {
        let wanted = metric_name(name)?;
        let mut found = None;
        for metric in metric_presets(config).into_iter().filter(|m| wanted.contains(&m.name)) {
            let p = MetricClassPartition::from_metric(config, &metric)?;
            // a preset equal to the normal metric is skipped when another is offered
            let degenerate = p.classes.len() == 1 && wanted.len() > 1;
            if found.is_none() || !degenerate {
                found = Some(p);
            }
            if !degenerate {
                break;
            }
        }
        return found.ok_or_else(|| Failure(format!("metric {name} is not defined on {}", config.spec)));
    }
    Ok(MetricClassPartition::parse(
        config,
        args.partition.as_deref().unwrap_or(""),
    )?)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn to_csv(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

#[derive(Serialize)]
struct FamilyListing {
    family: SpaceFamily,
    arity: usize,
    constraints: &'static str,
    params: Vec<usize>,
    modules: Vec<(String, usize)>,
    dim_h: usize,
}

fn cmd_spaces(format: Format, only: Option<SpaceFamily>, params: &[usize], n: Option<usize>) -> Outcome {
    let mut p = params.to_vec();
    if let Some(n) = n {
        p = vec![n];
    }
    if !p.is_empty() && only.is_none() {
        return Err(Failure("--params/--n need --family".into()));
    }
    let mut rows = Vec::new();
    for f in SpaceFamily::ALL.into_iter().filter(|f| only.is_none_or(|o| o == *f)) {
        let params = if p.is_empty() { f.default_params() } else { p.clone() };
        let c = build_space(&SpaceSpec::new(f, params.clone()))?;
        rows.push(FamilyListing {
            family: f,
            arity: f.arity(),
            constraints: f.constraints(),
            params,
            modules: c.modules.iter().map(|m| (m.label.clone(), m.positions.len())).collect(),
            dim_h: c.dim_h(),
        });
    }
    let text = match format {
        Format::Json => to_json(&rows),
        Format::Csv => to_csv(
            &["family", "arity", "constraints", "params", "modules", "dims", "dim_h"],
            rows.iter()
                .map(|r| {
                    vec![
                        r.family.to_string(),
                        r.arity.to_string(),
                        r.constraints.to_string(),
                        join(&r.params, ","),
                        r.modules.iter().map(|m| m.0.clone()).collect::<Vec<_>>().join(" "),
                        join(&r.modules.iter().map(|m| m.1).collect::<Vec<_>>(), ","),
                        r.dim_h.to_string(),
                    ]
                })
                .collect(),
        ),
        Format::Human => {
            let mut s = String::new();
            for r in &rows {
                let dims = join(&r.modules.iter().map(|m| m.1).collect::<Vec<_>>(), ", ");
                let labels = r.modules.iter().map(|m| m.0.as_str()).collect::<Vec<_>>().join(", ");
                writeln!(s, "{} ({} params: {})", r.family, r.arity, r.constraints).unwrap();
                writeln!(
                    s,
                    "  at ({}): modules {labels}, dims ({dims}), dim h = {}",
                    join(&r.params, ","),
                    r.dim_h
                )
                .unwrap();
            }
            s
        }
    };
    Ok((text, true))
}

fn join<T: ToString>(v: &[T], sep: &str) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

fn ambient_report(config: &SpaceConfig) -> ValidationReport {
    let b = &config.ambient;
    let mut r = ValidationReport::new(format!("{}({}) basis", b.kind, b.rank));
    for (name, res) in [
        ("antisymmetry", b.antisymmetry_residual()),
        ("Jacobi identity", b.jacobi_residual()),
        ("B-orthogonality", b.orthogonality_residual()),
        ("ad-invariance of B", b.ad_invariance_residual()),
        ("structure constants reproduce commutators", b.reconstruction_residual()),
    ] {
        r.push(name, "0", format!("{res:e}"), res, res <= 1e-12);
    }
    r
}

fn cmd_check(format: Format, config: &SpaceConfig) -> Outcome {
    let mut reports = vec![ambient_report(config), structure_report(config)];
    let mut notes = config.notes.clone();
    match validate_wallach(config) {
        Ok(r) => reports.push(r),
        Err(Error::NotApplicable(msg)) => notes.push(format!("Wallach relations skipped: {msg}")),
        Err(e) => return Err(e.into()),
    }
    let ok = reports.iter().all(ValidationReport::passed);
    #[derive(Serialize)]
    struct Out<'a> {
        space: &'a SpaceSpec,
        passed: bool,
        reports: &'a [ValidationReport],
        notes: &'a [String],
    }
    let text = match format {
        Format::Json => to_json(&Out {
            space: &config.spec,
            passed: ok,
            reports: &reports,
            notes: &notes,
        }),
        Format::Csv => to_csv(
            &["report", "check", "expected", "computed", "residual", "ok"],
            reports
                .iter()
                .flat_map(|r| {
                    r.entries.iter().map(|e| {
                        vec![
                            r.title.clone(),
                            e.name.clone(),
                            e.expected.clone(),
                            e.computed.clone(),
                            format!("{:e}", e.residual),
                            e.ok.to_string(),
                        ]
                    })
                })
                .collect(),
        ),
        Format::Human => {
            let mut s = String::new();
            for r in &reports {
                writeln!(s, "{}: {}", r.title, pass(r.passed())).unwrap();
                for e in &r.entries {
                    writeln!(s, "  [{}] {} ({})", pass(e.ok), e.name, e.computed).unwrap();
                }
                for n in &r.notes {
                    writeln!(s, "  note: {n}").unwrap();
                }
            }
            for n in &notes {
                writeln!(s, "note: {n}").unwrap();
            }
            writeln!(s, "{}: {}", config.spec, pass(ok)).unwrap();
            s
        }
    };
    Ok((text, ok))
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn cmd_gen_system(format: Format, config: &SpaceConfig, args: &PartitionArgs, compare: bool) -> Outcome {
    let partition = resolve_partition(config, args)?;
    let system = generate_system(config, &partition)?;
    let comparison = if compare {
        let (printed_partition, text) = printed_system(&config.spec)
            .ok_or_else(|| Failure(format!("no transcribed system for {}", config.spec)))?;
        let expected = MetricClassPartition::parse(config, printed_partition)?;
        if expected != partition {
            return Err(Failure(format!(
                "the transcribed system for {} uses partition {:?}",
                config.spec,
                expected.render(config)
            )));
        }
        Some(compare_with_printed(&system, text)?)
    } else {
        None
    };
    let ok = comparison.as_ref().is_none_or(|c| c.equal);
    let text = match format {
        Format::Json => match &comparison {
            None => to_json(&system),
            Some(c) => {
                #[derive(Serialize)]
                struct Out<'a> {
                    system: &'a QuadraticSystem,
                    comparison: &'a PrintedComparison,
                }
                to_json(&Out { system: &system, comparison: c })
            }
        },
        Format::Csv => to_csv(
            &["index", "class_a", "class_b", "target", "equation"],
            system
                .equations
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    vec![
                        (i + 1).to_string(),
                        e.source[0].clone(),
                        e.source[1].clone(),
                        e.target_name.clone(),
                        e.text.clone(),
                    ]
                })
                .collect(),
        ),
        Format::Human => {
            let mut s = String::new();
            writeln!(
                s,
                "# {} partition {:?}: {} equations in {} variables",
                config.spec,
                partition.render(config),
                system.equations.len(),
                system.dim()
            )
            .unwrap();
            for (v, l) in system.variables.iter().zip(&system.basis_labels) {
                writeln!(s, "# {v} multiplies {l}").unwrap();
            }
            for n in &system.notes {
                writeln!(s, "# {n}").unwrap();
            }
            for e in &system.equations {
                writeln!(s, "{}", e.text).unwrap();
            }
            if let Some(c) = &comparison {
                writeln!(
                    s,
                    "# transcribed: {} equations, matched {}, {}",
                    c.printed,
                    c.matched,
                    if c.equal { "equal" } else { "DIFFERENT" }
                )
                .unwrap();
                for m in &c.missing {
                    writeln!(s, "# transcribed only: {m}").unwrap();
                }
                for m in &c.extra {
                    writeln!(s, "# generated only: {m}").unwrap();
                }
            }
            s
        }
    };
    Ok((text, ok))
}

fn cmd_verify(
    format: Format,
    config: &SpaceConfig,
    metric: Option<&str>,
    only: Option<usize>,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Outcome {
    let mut families = list_families(config, metric)?;
    if let Some(k) = only {
        if k == 0 || k > families.len() {
            return Err(Failure(format!(
                "family {k} out of range 1..={}",
                families.len()
            )));
        }
        families = vec![families.swap_remove(k - 1)];
    }
    let reports = verify_all(config, &families, samples, tol, seed)?;
    let ok = reports.iter().all(|r| r.passed);
    #[derive(Serialize)]
    struct Out<'a> {
        space: &'a SpaceSpec,
        metric: Option<&'a str>,
        samples: usize,
        tol: f64,
        seed: u64,
        passed: usize,
        failed: usize,
        families: Vec<(&'a SolutionFamily, &'a VerificationReport)>,
    }
    let passed = reports.iter().filter(|r| r.passed).count();
    let text = match format {
        Format::Json => to_json(&Out {
            space: &config.spec,
            metric,
            samples,
            tol,
            seed,
            passed,
            failed: reports.len() - passed,
            families: families.iter().zip(&reports).collect(),
        }),
        Format::Csv => to_csv(
            &[
                "family",
                "claim",
                "samples",
                "max_class_residual",
                "max_metric_residual",
                "max_geodesic_violation",
                "failures",
                "passed",
            ],
            families
                .iter()
                .zip(&reports)
                .map(|(f, r)| {
                    vec![
                        f.id.clone(),
                        f.claim.to_string(),
                        r.samples.to_string(),
                        format!("{:e}", r.max_class_residual),
                        format!("{:e}", r.max_metric_residual),
                        format!("{:e}", r.max_geodesic_violation),
                        r.failure_count.to_string(),
                        r.passed.to_string(),
                    ]
                })
                .collect(),
        ),
        Format::Human => {
            let mut s = String::new();
            for (f, r) in families.iter().zip(&reports) {
                writeln!(
                    s,
                    "[{}] {} ({}, modules {}): max residual {:.2e}",
                    pass(r.passed),
                    f.id,
                    f.claim,
                    f.modules(config).join("+"),
                    r.max_class_residual.max(r.max_metric_residual)
                )
                .unwrap();
                for line in f.render(&config.variables) {
                    writeln!(s, "    {line}").unwrap();
                }
                for fail in &r.failures {
                    writeln!(s, "    failure: {fail}").unwrap();
                }
            }
            writeln!(
                s,
                "{}: {passed}/{} families pass ({samples} samples, tol {tol:e}, seed {seed})",
                config.spec,
                reports.len()
            )
            .unwrap();
            s
        }
    };
    Ok((text, ok))
}

/// Catalog metric matching a partition, if the partition came from one.
fn catalog_metric(args: &PartitionArgs) -> Option<Option<&str>> {
    match (&args.metric, &args.partition) {
        (Some(m), _) => Some(Some(m.as_str())),
        (None, None) => Some(None),
        (None, Some(p)) if p.trim().is_empty() => Some(None),
        _ => None,
    }
}

fn cmd_solve(format: Format, config: &SpaceConfig, args: &PartitionArgs, opts: &SolverOptions) -> Outcome {
    let partition = resolve_partition(config, args)?;
    let system = generate_system(config, &partition)?;
    let result = solve(&system, opts)?;
    let exhaustiveness = match catalog_metric(args).map(|m| list_families(config, m)) {
        Some(Ok(families)) => Some(exhaustiveness_report(config, &result, &families)?),
        Some(Err(Error::NotFound(_))) | None => None,
        Some(Err(e)) => return Err(e.into()),
    };
    #[derive(Serialize)]
    struct Out<'a> {
        space: &'a SpaceSpec,
        partition: String,
        equations: usize,
        result: &'a SolverResult,
        exhaustiveness: Option<&'a ExhaustivenessReport>,
    }
    let text = match format {
        Format::Json => to_json(&Out {
            space: &config.spec,
            partition: partition.render(config),
            equations: system.equations.len(),
            result: &result,
            exhaustiveness: exhaustiveness.as_ref(),
        }),
        Format::Csv => to_csv(
            &["solution", "residual", "support", "family", "coordinates"],
            result
                .solutions
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let family = exhaustiveness
                        .as_ref()
                        .and_then(|e| e.matches[i].family.clone())
                        .unwrap_or_default();
                    vec![
                        i.to_string(),
                        format!("{:e}", s.residual),
                        s.support.join("+"),
                        family,
                        join(&s.coordinates, " "),
                    ]
                })
                .collect(),
        ),
        Format::Human => {
            let mut s = String::new();
            writeln!(
                s,
                "{} partition {:?}: {} equations, {} restarts (seed {}), {} converged, {} distinct",
                config.spec,
                partition.render(config),
                system.equations.len(),
                result.restarts_used,
                result.seed,
                result.converged_count,
                result.solutions.len()
            )
            .unwrap();
            let mut by_support = std::collections::BTreeMap::<String, usize>::new();
            for sol in &result.solutions {
                *by_support.entry(sol.support.join("+")).or_default() += 1;
            }
            for (support, count) in &by_support {
                writeln!(s, "  support {support}: {count} solutions").unwrap();
            }
            writeln!(s, "  multi-module solutions: {}", result.multi_module().count()).unwrap();
            if let Some(e) = &exhaustiveness {
                writeln!(
                    s,
                    "  catalog: {} matched, {} unmatched, families hit: {}",
                    e.matched,
                    e.unmatched.len(),
                    e.families_hit.join(", ")
                )
                .unwrap();
                for &i in &e.unmatched {
                    let sol = &result.solutions[i];
                    let coords: Vec<String> = sol
                        .coordinates
                        .iter()
                        .zip(&config.variables)
                        .filter(|(v, _)| v.abs() > 1e-9)
                        .map(|(v, n)| format!("{n}={v:.6}"))
                        .collect();
                    writeln!(s, "    unmatched {i}: {}", coords.join(" ")).unwrap();
                }
            }
            s
        }
    };
    Ok((text, true))
}
