use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cnp_core::Exec;
use cnp_kit::complex::parse_complex_vector;
use cnp_kit::instance::{INSTANCE_SCHEMA, REPORT_SCHEMA, SCHEMA_VERSION};
use cnp_kit::output::{error_value, render_csv, render_json, report_value, Format};
use cnp_kit::{execute, CliError, Instance, Kind, Outcome, RunOptions};
use rayon::prelude::*;
use serde_json::{json, Value};

/// Finite-sample computations for complete Nevanlinna–Pick kernels.
///
/// Each subcommand reads one or more instance files (`-` or nothing means
/// stdin). Exit status: 0 computed/PASS, 1 FAIL or INCONCLUSIVE, 2 input error.
#[derive(Parser, Debug)]
#[command(name = "cnp-kit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args, Debug)]
struct Global {
    /// Overrides the instance tolerance (bisection bracket, PSD threshold or
    /// experiment gap, depending on the kind).
    #[arg(long, global = true, value_parser = parse_tol)]
    tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads for data-parallel sweeps; 1 runs sequentially.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..=1024))]
    jobs: Option<u64>,
    /// Overrides the seed of randomized samples and experiment shuffles.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Record wall time in reports (they are then no longer byte-stable).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Args, Debug)]
struct Inputs {
    /// Instance files; `-` or none reads stdin.
    files: Vec<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Minimal multiplier norm and solvability of a Pick problem.
    Pick(Inputs),
    /// Two-point extremal value against its closed form.
    Extremal(ExtremalArgs),
    /// Pseudo-metric `d_k` between sample points.
    Dk(Inputs),
    /// Drury–Arveson ball realization of a finite sample.
    Embed(Inputs),
    /// Dominating-set diagnostic of a disk sample against a test family.
    Dominate(Inputs),
    /// Blaschke sum classification and product values.
    Blaschke(Inputs),
    /// Analytic capacity of a union of points, disks and segments.
    Capacity(Inputs),
    /// Removability verdict for a planar set (capacity instances).
    Removable(Inputs),
    /// Reproducible experiments with a PASS/FAIL verdict.
    #[command(subcommand)]
    Experiment(Experiment),
    /// Shorthand for `experiment weak-hardy`.
    WeakHardy(Inputs),
    /// Print a shipped JSON schema.
    Schema {
        #[arg(value_enum)]
        which: WhichSchema,
    },
}

#[derive(Subcommand, Debug)]
enum Experiment {
    /// Minimal norms on a punctured disk versus the disk.
    Remove(Inputs),
    /// Prefix minimal norms of sampled data converging to the sup norm.
    WeakHardy(Inputs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WhichSchema {
    Instance,
    Report,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum InlineKernel {
    Szego,
    DruryArveson,
}

#[derive(Args, Debug)]
struct ExtremalArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Inline instance instead of files: kernel on the disk or the ball.
    #[arg(long, value_enum, requires_all = ["base", "x"], conflicts_with = "files")]
    kernel: Option<InlineKernel>,
    /// Base point, e.g. `0` or `0,0` (comma-separated coordinates).
    #[arg(long, requires = "kernel", allow_hyphen_values = true)]
    base: Option<String>,
    /// Evaluation point, e.g. `0.5` or `0.3+0.1i,0`.
    #[arg(long, requires = "kernel", allow_hyphen_values = true)]
    x: Option<String>,
}

fn parse_tol(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(t) if t.is_finite() && t >= 0.0 => Ok(t),
        _ => Err(format!("expected a finite non-negative number, got {s:?}")),
    }
}

/// Instance kinds each subcommand accepts.
fn accepted(cmd: &Command) -> &'static [Kind] {
    match cmd {
        Command::Pick(_) => &[Kind::Pick],
        Command::Extremal(_) => &[Kind::Extremal],
        Command::Dk(_) => &[Kind::Dk],
        Command::Embed(_) => &[Kind::Embed],
        Command::Dominate(_) => &[Kind::Dominate],
        Command::Blaschke(_) => &[Kind::Blaschke],
        Command::Capacity(_) | Command::Removable(_) => &[Kind::Capacity],
        Command::Experiment(Experiment::Remove(_)) => &[Kind::RemoveExperiment],
        Command::Experiment(Experiment::WeakHardy(_)) | Command::WeakHardy(_) => &[Kind::WeakHardyExperiment],
        Command::Schema { .. } => &[],
    }
}

enum Source {
    Stdin,
    File(PathBuf),
    Inline(Value),
}

impl Source {
    fn label(&self) -> String {
        match self {
            Source::Stdin => "-".into(),
            Source::File(p) => p.display().to_string(),
            Source::Inline(_) => "inline".into(),
        }
    }

    fn load(&self) -> Result<Instance, CliError> {
        match self {
            Source::Stdin => {
                let mut text = String::new();
                io::stdin()
                    .read_to_string(&mut text)
                    .map_err(|e| CliError::Io { path: "-".into(), message: e.to_string() })?;
                Instance::parse(&text)
            }
            Source::File(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Io { path: p.display().to_string(), message: e.to_string() })?;
                Instance::parse(&text)
            }
            Source::Inline(v) => Instance::from_value(v.clone()),
        }
    }
}

fn sources(files: &[PathBuf]) -> Vec<Source> {
    if files.is_empty() {
        return vec![Source::Stdin];
    }
    files.iter().map(|p| if p.as_os_str() == "-" { Source::Stdin } else { Source::File(p.clone()) }).collect()
}

fn inline_extremal(kernel: InlineKernel, base: &str, x: &str) -> Result<Value, CliError> {
    let (base, x) = (parse_complex_vector(base)?, parse_complex_vector(x)?);
    let c = |v: &[cnp_core::Complex64]| v.iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>();
    let (kernel, points) = match kernel {
        InlineKernel::Szego => {
            if base.len() != 1 || x.len() != 1 {
                return Err(CliError::Invalid("the szego kernel takes scalar points".into()));
            }
            (json!({"type": "szego"}), json!([c(&base)[0], c(&x)[0]]))
        }
        InlineKernel::DruryArveson => {
            if base.len() != x.len() {
                return Err(CliError::Invalid("base and x must have the same dimension".into()));
            }
            (json!({"type": "drury-arveson", "d": base.len()}), json!([c(&base), c(&x)]))
        }
    };
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "kind": "extremal",
        "payload": {"kernel": kernel, "points": points, "base": 0, "x": 1},
    }))
}

fn run_one(src: &Source, kinds: &[Kind], opts: &RunOptions) -> Result<Outcome, CliError> {
    let inst = src.load()?;
    if !kinds.contains(&inst.kind) {
        let want: Vec<&str> = kinds.iter().map(|k| k.as_str()).collect();
        return Err(CliError::Invalid(format!(
            "instance kind {} does not fit this subcommand (expects {})",
            inst.kind,
            want.join(", ")
        )));
    }
    log::info!("{}: {} instance {}", src.label(), inst.kind, inst.digest);
    let out = execute(&inst, opts)?;
    log::info!("{}: {:?}", src.label(), out.status);
    Ok(out)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CNP_KIT_LOG", "warn")).init();
    let cli = Cli::parse();

    let srcs = match &cli.command {
        Command::Schema { which } => {
            print!(
                "{}",
                match which {
                    WhichSchema::Instance => INSTANCE_SCHEMA,
                    WhichSchema::Report => REPORT_SCHEMA,
                }
            );
            return ExitCode::SUCCESS;
        }
        Command::Extremal(ExtremalArgs { kernel: Some(k), base: Some(b), x: Some(x), .. }) => {
            match inline_extremal(*k, b, x) {
                Ok(v) => vec![Source::Inline(v)],
                Err(e) => return fail_early(&e, cli.global.format),
            }
        }
        Command::Extremal(a) => sources(&a.inputs.files),
        Command::Pick(i)
        | Command::Dk(i)
        | Command::Embed(i)
        | Command::Dominate(i)
        | Command::Blaschke(i)
        | Command::Capacity(i)
        | Command::Removable(i)
        | Command::Experiment(Experiment::Remove(i) | Experiment::WeakHardy(i))
        | Command::WeakHardy(i) => sources(&i.files),
    };
    let kinds = accepted(&cli.command);

    let g = &cli.global;
    let mut opts = RunOptions { tol: g.tol, seed: g.seed, timing: g.timing, exec: Exec::Parallel };
    let pool = match g.jobs {
        Some(1) => {
            opts.exec = Exec::Sequential;
            None
        }
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n as usize).build() {
            Ok(p) => Some(p),
            Err(e) => return fail_early(&CliError::Invalid(format!("cannot start {n} workers: {e}")), g.format),
        },
        None => None,
    };
    // Independent instances run concurrently; `collect` keeps input order.
    let run = || -> Vec<Result<Outcome, CliError>> {
        if matches!(opts.exec, Exec::Parallel) {
            srcs.par_iter().map(|s| run_one(s, kinds, &opts)).collect()
        } else {
            srcs.iter().map(|s| run_one(s, kinds, &opts)).collect()
        }
    };
    let results = match &pool {
        Some(p) => p.install(run),
        None => run(),
    };

    let multi = srcs.len() > 1;
    let labels: Vec<String> = srcs.iter().map(Source::label).collect();
    let code = results
        .iter()
        .map(|r| match r {
            Ok(o) => o.exit_code(),
            Err(_) => 2,
        })
        .max()
        .unwrap_or(0);

    for (label, r) in labels.iter().zip(&results) {
        if let Err(e) = r {
            eprintln!("cnp-kit: {label}: {e}");
        }
    }
    let text = match g.format {
        Format::Json => {
            let values: Vec<Value> = labels
                .iter()
                .zip(&results)
                .map(|(label, r)| {
                    let source = multi.then_some(label.as_str());
                    match r {
                        Ok(o) => report_value(o, source),
                        Err(e) => error_value(e, source),
                    }
                })
                .collect();
            render_json(&if multi { Value::Array(values) } else { values.into_iter().next().expect("one source") })
        }
        Format::Csv => {
            if code == 2 {
                // Errors were already reported on stderr; no partial table.
                String::new()
            } else {
                let rows: Vec<_> = labels
                    .iter()
                    .zip(&results)
                    .map(|(l, r)| (Some(l.as_str()), r.as_ref().expect("no errors")))
                    .collect();
                match render_csv(&rows) {
                    Ok(t) => t,
                    Err(e) => return fail_early(&e, Format::Csv),
                }
            }
        }
    };
    if io::stdout().write_all(text.as_bytes()).is_err() {
        return ExitCode::from(2);
    }
    ExitCode::from(code as u8)
}

fn fail_early(e: &CliError, format: Format) -> ExitCode {
    eprintln!("cnp-kit: {e}");
    if format == Format::Json {
        print!("{}", render_json(&error_value(e, None)));
    }
    ExitCode::from(2)
}
