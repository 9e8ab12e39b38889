//! `gauss-convex`: load symmetric convex bodies, estimate their influences,
//! and run the verification suite. Identical command lines with identical
//! seeds produce byte-identical output files.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 usage or spec parse
//! error, 3 inconclusive results under --strict.

mod body_arg;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gauss_convex::influence::{second_moment_matrix, shell_density, total_influence};
use gauss_convex::sampling::SamplingPlan;
use gauss_convex::verify::{
    friedgut_average_with_budget, run_builtin_suite, threshold_curve, FriedgutBudget,
    SuiteOptions, Verdict,
};

use body_arg::resolve_body;
use output::{write_output, OutputDoc};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "gauss-convex",
    version,
    about = "Convex-influence estimators and verification suite over Gaussian space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-direction influences, total influence and the max-influence direction of a body.
    Influence(InfluenceArgs),
    /// Run verification checks and emit a machine-readable report.
    Verify(VerifyArgs),
    /// Sample the threshold curve sigma -> gaussian volume and its transition width.
    Threshold(ThresholdArgs),
    /// Sample the shell-density curve r -> fraction of the radius-r sphere inside the body.
    Shell(ShellArgs),
    /// Run the averaging procedure until the residual variance falls below a target.
    Friedgut(FriedgutArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct BodyArgs {
    /// Body spec file (JSON), or a builtin kind: slab | ball | cube.
    #[arg(long)]
    body: String,
    /// Dimension for builtin kinds.
    #[arg(long)]
    dim: Option<usize>,
    /// Radius / half-side for builtin ball and cube.
    #[arg(long)]
    r: Option<f64>,
    /// Half-width for the builtin slab (normal e1).
    #[arg(long)]
    c: Option<f64>,
}

#[derive(Args)]
struct RunArgs {
    /// Seed of the counter-based sample streams.
    #[arg(long, env = "GAUSS_CONVEX_SEED", default_value_t = 0)]
    seed: u64,
    /// Monte Carlo sample count per estimate.
    #[arg(long, env = "GAUSS_CONVEX_SAMPLES", default_value_t = 1 << 20)]
    samples: u64,
    /// Worker threads (results do not depend on this).
    #[arg(long)]
    workers: Option<usize>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

impl RunArgs {
    fn plan(&self) -> SamplingPlan {
        let plan = SamplingPlan::new(self.seed, self.samples);
        match self.workers {
            Some(w) => plan.with_workers(w),
            None => plan,
        }
    }
}

#[derive(Args)]
struct InfluenceArgs {
    #[command(flatten)]
    body: BodyArgs,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Also emit the second-moment matrix entries E[K(x)·xi·xj].
    #[arg(long)]
    matrix: bool,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Which suite to run; only `builtin` exists.
    #[arg(long, default_value = "builtin")]
    suite: String,
    /// Comma-separated name substrings selecting a subset of checks.
    #[arg(long, value_delimiter = ',')]
    checks: Vec<String>,
    /// Seed is mandatory here: no silent nondeterminism in CI.
    #[arg(long, env = "GAUSS_CONVEX_SEED")]
    seed: u64,
    #[arg(long, env = "GAUSS_CONVEX_SAMPLES", default_value_t = 1 << 20)]
    samples: u64,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Treat inconclusive results as failures (exit 3).
    #[arg(long)]
    strict: bool,
    /// Skip the threshold-curve section (the most expensive one).
    #[arg(long)]
    skip_thresholds: bool,
    /// Skip the averaging traces.
    #[arg(long)]
    skip_friedgut: bool,
}

#[derive(Args)]
struct ThresholdArgs {
    #[command(flatten)]
    body: BodyArgs,
    /// Transition levels 1−eps and eps define the width.
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    /// Sigma grid lo:hi:count.
    #[arg(long)]
    grid: String,
    #[command(flatten)]
    run: RunArgs,
    /// Exit 3 when the grid fails to bracket the transition.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct ShellArgs {
    #[command(flatten)]
    body: BodyArgs,
    /// Radius grid lo:hi:count.
    #[arg(long)]
    radii: String,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct FriedgutArgs {
    #[command(flatten)]
    body: BodyArgs,
    /// Residual-variance target.
    #[arg(long)]
    eps: f64,
    /// Step cap.
    #[arg(long, default_value_t = 32)]
    cap: usize,
    /// Outer samples of the nested variance estimator.
    #[arg(long, default_value_t = 1 << 16)]
    outer: u64,
    /// Inner samples per outer point.
    #[arg(long, default_value_t = 1 << 10)]
    inner: u64,
    #[command(flatten)]
    run: RunArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Influence(args) => cmd_influence(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Threshold(args) => cmd_threshold(args),
        Command::Shell(args) => cmd_shell(args),
        Command::Friedgut(args) => cmd_friedgut(args),
    }
}

fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid `{text}` must look like lo:hi:count"));
    }
    let lo: f64 = parts[0].parse().map_err(|e| format!("grid lo: {e}"))?;
    let hi: f64 = parts[1].parse().map_err(|e| format!("grid hi: {e}"))?;
    let count: usize = parts[2].parse().map_err(|e| format!("grid count: {e}"))?;
    if count < 2 || !(hi > lo) {
        return Err(format!("grid `{text}` must have hi > lo and count >= 2"));
    }
    Ok(gauss_convex::verify::linear_grid(lo, hi, count))
}

fn cmd_influence(args: InfluenceArgs) -> Result<u8, String> {
    let body = resolve_body(&args.body)?;
    let plan = args.run.plan();
    if !(args.sigma > 0.0) {
        return Err(format!("--sigma must be positive, got {}", args.sigma));
    }

    let m = second_moment_matrix(&body, args.sigma, &plan).map_err(|e| e.to_string())?;
    let n = body.dim();
    let mut rows = Vec::new();
    for i in 0..n {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        let inf = m.influence_along(&v).map_err(|e| e.to_string())?;
        rows.push(output::InfluenceRow {
            quantity: format!("influence[e{}]", i + 1),
            direction: v,
            estimate: inf,
        });
    }
    let total = total_influence(&body, args.sigma, &plan.substream(1)).map_err(|e| e.to_string())?;
    rows.push(output::InfluenceRow {
        quantity: "total_influence".into(),
        direction: Vec::new(),
        estimate: total,
    });
    let (direction, max_inf) = m.max_influence_direction().map_err(|e| e.to_string())?;
    rows.push(output::InfluenceRow {
        quantity: "max_influence".into(),
        direction,
        estimate: max_inf,
    });
    rows.push(output::InfluenceRow {
        quantity: "volume".into(),
        direction: Vec::new(),
        estimate: m.volume,
    });
    if args.matrix {
        for i in 0..n {
            for j in i..n {
                rows.push(output::InfluenceRow {
                    quantity: format!("second_moment[e{},e{}]", i + 1, j + 1),
                    direction: Vec::new(),
                    estimate: m.entry(i, j),
                });
            }
        }
    }

    let doc = OutputDoc::influence(body.label(), args.sigma, &plan, rows);
    write_output(&doc, args.run.out.as_deref(), args.run.format == Format::Json)?;
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, String> {
    if args.suite != "builtin" {
        return Err(format!("unknown suite `{}`; only `builtin` exists", args.suite));
    }
    let plan = {
        let plan = SamplingPlan::new(args.seed, args.samples);
        match args.workers {
            Some(w) => plan.with_workers(w),
            None => plan,
        }
    };
    let options = SuiteOptions {
        filter: if args.checks.is_empty() {
            None
        } else {
            Some(args.checks.clone())
        },
        thresholds: !args.skip_thresholds,
        friedgut: !args.skip_friedgut,
        friedgut_budget: FriedgutBudget::default(),
    };
    let results = run_builtin_suite(&plan, &options).map_err(|e| e.to_string())?;

    let text = if args.format == Format::Json {
        gauss_convex::verify::report_to_json(&results)
    } else {
        gauss_convex::verify::report_to_csv(&results)
    };
    output::write_text(&text, args.out.as_deref())?;

    let any_fail = results.iter().any(|r| r.verdict == Verdict::Fail);
    let any_inconclusive = results.iter().any(|r| r.verdict == Verdict::Inconclusive);
    if any_fail {
        Ok(EXIT_CHECK_FAILED)
    } else if any_inconclusive && args.strict {
        Ok(EXIT_INCONCLUSIVE)
    } else {
        Ok(0)
    }
}

fn cmd_threshold(args: ThresholdArgs) -> Result<u8, String> {
    let body = resolve_body(&args.body)?;
    let plan = args.run.plan();
    let grid = parse_grid(&args.grid)?;
    let curve = threshold_curve(&body, args.eps, &grid, &plan).map_err(|e| e.to_string())?;
    let bracketed = curve.width.is_some();
    let doc = OutputDoc::threshold(body.label(), &plan, &curve);
    write_output(&doc, args.run.out.as_deref(), args.run.format == Format::Json)?;
    if !bracketed && args.strict {
        return Ok(EXIT_INCONCLUSIVE);
    }
    Ok(0)
}

fn cmd_shell(args: ShellArgs) -> Result<u8, String> {
    let body = resolve_body(&args.body)?;
    let plan = args.run.plan();
    let radii = parse_grid(&args.radii)?;
    let sd = shell_density(&body, &radii, &plan).map_err(|e| e.to_string())?;
    let doc = OutputDoc::shell(body.label(), &plan, &sd);
    write_output(&doc, args.run.out.as_deref(), args.run.format == Format::Json)?;
    Ok(0)
}

fn cmd_friedgut(args: FriedgutArgs) -> Result<u8, String> {
    let body = resolve_body(&args.body)?;
    let plan = args.run.plan();
    let budget = FriedgutBudget {
        outer: args.outer,
        inner: args.inner,
    };
    let trace = friedgut_average_with_budget(&body, args.eps, args.cap, &plan, budget)
        .map_err(|e| e.to_string())?;
    let doc = OutputDoc::friedgut(body.label(), &plan, &trace);
    write_output(&doc, args.run.out.as_deref(), args.run.format == Format::Json)?;
    if trace.verdict != Verdict::Pass {
        return Ok(EXIT_CHECK_FAILED);
    }
    Ok(0)
}
