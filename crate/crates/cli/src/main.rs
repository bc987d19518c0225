//! `polydefl`: solve polynomial systems at singular roots with deflation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use deflation::batch::solve_batch;
use deflation::deflate::{
    deflate_loop, deflate_once, expand, export_deflated, DeflateOptions, DeflatedSystem,
    DeflationRng, DeflationStage, LoopStatus, DEFAULT_MAX_DEFLATIONS, DEFAULT_SEED,
};
use deflation::linalg::{norm2, DEFAULT_RANK_TOL};
use deflation::newton::{refine, Evaluator, NewtonOptions};
use deflation::oracle::{multiplicity, Multiplicity, DEFAULT_DUAL_TOL, DEFAULT_MAX_ORDER};
use deflation::report::{parse_point, parse_points};
use deflation::{parse_system, Error, PolySystem, SolverReport, C64};

/// Systems with fewer variables than this are too small for the timing
/// comparison to mean much.
const BENCH_MIN_VARS: usize = 8;
const BENCH_TOL: f64 = 1e-10;

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_UNSOLVED: u8 = 2;
const EXIT_ORDER_LIMIT: u8 = 3;

#[derive(Parser)]
#[command(name = "polydefl", version, about = "Newton's method with deflation for singular roots")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Refine and deflate until the root is regular; write a JSON report.
    Solve(SolveArgs),
    /// Apply one deflation stage at a point and write the extended system.
    Deflate(DeflateArgs),
    /// Print the multiplicity of a root.
    Multiplicity(MultiplicityArgs),
    /// Time structured against expanded evaluation of a deflated system.
    Bench(BenchArgs),
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    system: PathBuf,
    /// Start point: JSON array of [re, im] pairs.
    #[arg(long, required_unless_present = "points", conflicts_with = "points")]
    point: Option<PathBuf>,
    /// Several start points, solved independently with seeds seed, seed+1, ...
    #[arg(long)]
    points: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    rank_tol: f64,
    #[arg(long, default_value_t = NewtonOptions::default().residual_tol)]
    residual_tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_DEFLATIONS)]
    max_deflations: usize,
    /// Known root, for the correct-digit counts.
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Also write the final deflated system (single start point only).
    #[arg(long, conflicts_with = "points")]
    emit_deflated: Option<PathBuf>,
}

#[derive(Args)]
struct DeflateArgs {
    #[arg(long)]
    system: PathBuf,
    #[arg(long)]
    point: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    rank_tol: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MultiplicityArgs {
    #[arg(long)]
    system: PathBuf,
    #[arg(long)]
    point: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MAX_ORDER)]
    max_order: usize,
    #[arg(long, default_value_t = DEFAULT_DUAL_TOL)]
    tol: f64,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    system: PathBuf,
    #[arg(long, default_value_t = 1)]
    stages: usize,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Build the stages by running the solver from this point instead of
    /// drawing them at random.
    #[arg(long)]
    point: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

/// Failure with a message and an exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn in_file(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| Failure::usage(format!("{}: {e}", path.display()))
}

fn load_system(path: &Path) -> Result<PolySystem, Failure> {
    parse_system(&read(path)?).map_err(in_file(path))
}

fn load_point(path: &Path, nvars: usize) -> Result<Vec<C64>, Failure> {
    let x = parse_point(&read(path)?).map_err(in_file(path))?;
    if x.len() != nvars {
        return Err(Failure::usage(format!(
            "{}: point has {} coordinates, system has {nvars} variables",
            path.display(),
            x.len()
        )));
    }
    Ok(x)
}

fn system_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "system".into())
}

fn cmd_solve(args: &SolveArgs) -> CmdResult {
    let f = load_system(&args.system)?;
    let opts = DeflateOptions {
        newton: NewtonOptions {
            rank_tol: args.rank_tol,
            residual_tol: args.residual_tol,
            ..Default::default()
        },
        max_deflations: args.max_deflations,
        seed: args.seed,
    };
    opts.newton.validate().map_err(|e| Failure::usage(e.to_string()))?;
    let reference = args
        .reference
        .as_deref()
        .map(|p| load_point(p, f.nvars()))
        .transpose()?;
    let name = system_name(&args.system);
    let report = |out: &deflation::DeflationOutcome, seed: u64, secs: f64| {
        SolverReport::new(&name, out, seed, reference.as_deref(), secs)
            .map_err(|e| Failure::usage(e.to_string()))
    };

    if let Some(path) = &args.points {
        let starts = parse_points(&read(path)?).map_err(in_file(path))?;
        if let Some(bad) = starts.iter().position(|p| p.len() != f.nvars()) {
            return Err(Failure::usage(format!(
                "{}: point {bad} has {} coordinates, system has {} variables",
                path.display(),
                starts[bad].len(),
                f.nvars()
            )));
        }
        let clock = Instant::now();
        let outcomes = solve_batch(&f, &starts, &opts);
        let secs = clock.elapsed().as_secs_f64() / starts.len().max(1) as f64;
        let mut reports = Vec::with_capacity(outcomes.len());
        for (i, out) in outcomes.into_iter().enumerate() {
            let out = out.map_err(|e| Failure::usage(e.to_string()))?;
            reports.push(report(&out, args.seed.wrapping_add(i as u64), secs)?);
        }
        let json = serde_json::to_string_pretty(&reports).expect("reports serialize");
        write(&args.out, &(json + "\n"))?;
        let solved = reports.iter().all(|r| r.status == LoopStatus::ConvergedRegular);
        return Ok(if solved { EXIT_OK } else { EXIT_UNSOLVED });
    }

    let path = args.point.as_deref().expect("clap requires --point or --points");
    let x0 = load_point(path, f.nvars())?;
    let clock = Instant::now();
    let out = deflate_loop(&f, &x0, &opts).map_err(|e| Failure::usage(e.to_string()))?;
    let secs = clock.elapsed().as_secs_f64();
    let rep = report(&out, args.seed, secs)?;
    write(&args.out, &(rep.to_json() + "\n"))?;
    if let Some(g) = &args.emit_deflated {
        write(g, &export_deflated(&out.system).map_err(|e| Failure::usage(e.to_string()))?)?;
    }
    eprintln!(
        "{}: {:?}, {} deflation(s), corank {}",
        name, out.status, rep.deflations, rep.corank
    );
    Ok(match out.status {
        LoopStatus::ConvergedRegular => EXIT_OK,
        LoopStatus::StageCapReached | LoopStatus::Diverged => EXIT_UNSOLVED,
    })
}

fn cmd_deflate(args: &DeflateArgs) -> CmdResult {
    let f = load_system(&args.system)?;
    let x0 = load_point(&args.point, f.nvars())?;
    let newton = NewtonOptions {
        rank_tol: args.rank_tol,
        ..Default::default()
    };
    newton.validate().map_err(|e| Failure::usage(e.to_string()))?;
    let sys = DeflatedSystem::new(f);
    // deflate where the iteration settles, not at the raw start point
    let x = refine(&sys, &x0, &newton)
        .map_err(|e| Failure::usage(e.to_string()))?
        .point;
    match deflate_once(&sys, &x, args.rank_tol, &mut DeflationRng::new(args.seed)) {
        Ok(d) => {
            let text = export_deflated(&d.system).map_err(|e| Failure::usage(e.to_string()))?;
            write(&args.out, &text)?;
            Ok(EXIT_OK)
        }
        Err(e @ Error::FullColumnRank { .. }) => Err(Failure {
            code: EXIT_UNSOLVED,
            message: e.to_string(),
        }),
        Err(e) => Err(Failure::usage(e.to_string())),
    }
}

fn cmd_multiplicity(args: &MultiplicityArgs) -> CmdResult {
    let f = load_system(&args.system)?;
    let x = load_point(&args.point, f.nvars())?;
    match multiplicity(&f, &x, args.max_order, args.tol) {
        Ok(Multiplicity::Value(m)) => {
            println!("{m}");
            Ok(EXIT_OK)
        }
        Ok(Multiplicity::ExceedsMaxOrder {
            max_order,
            last_nullity,
        }) => Err(Failure {
            code: EXIT_ORDER_LIMIT,
            message: format!(
                "multiplicity exceeds max order {max_order} (nullity {last_nullity} at that order)"
            ),
        }),
        Err(e) => Err(Failure::usage(e.to_string())),
    }
}

/// Deflation stages for the benchmark: the solver's own when a start point
/// is given, otherwise random ones of the largest admissible rank.
fn bench_system(f: PolySystem, args: &BenchArgs) -> Result<DeflatedSystem, Failure> {
    if let Some(path) = &args.point {
        let x0 = load_point(path, f.nvars())?;
        let opts = DeflateOptions {
            max_deflations: args.stages,
            seed: args.seed,
            ..Default::default()
        };
        let out = deflate_loop(&f, &x0, &opts).map_err(|e| Failure::usage(e.to_string()))?;
        if out.deflations() < args.stages {
            eprintln!(
                "note: the solver needed only {} of {} stages",
                out.deflations(),
                args.stages
            );
        }
        return Ok(out.system);
    }
    let mut rng = DeflationRng::new(args.seed);
    let mut sys = DeflatedSystem::new(f);
    for _ in 0..args.stages {
        let rank = sys.nvars().saturating_sub(1);
        let st = DeflationStage::random(&mut rng, rank, sys.nvars(), sys.neqs());
        sys = sys.with_stage(st).map_err(|e| Failure::usage(e.to_string()))?;
    }
    Ok(sys)
}

fn cmd_bench(args: &BenchArgs) -> CmdResult {
    if args.trials == 0 {
        return Err(Failure::usage("--trials must be at least 1"));
    }
    let f = load_system(&args.system)?;
    let n = f.nvars();
    let sys = bench_system(f, args)?;
    let naive = expand(&sys).map_err(|e| Failure::usage(e.to_string()))?;
    let mut rng = DeflationRng::new(args.seed.wrapping_add(1));
    let points: Vec<Vec<C64>> = (0..args.trials).map(|_| rng.unit_vector(sys.nvars())).collect();

    let mut worst: f64 = 0.0;
    for p in &points {
        let (fs, js) = sys.values_and_jacobian(p).map_err(|e| Failure::usage(e.to_string()))?;
        let fv = naive.evaluate(p).map_err(|e| Failure::usage(e.to_string()))?;
        let jv = naive.jacobian().evaluate(p).map_err(|e| Failure::usage(e.to_string()))?;
        let diff = |a: &[C64], b: &[C64]| {
            let d: Vec<C64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            norm2(&d) / norm2(b).max(f64::MIN_POSITIVE)
        };
        worst = worst.max(diff(&fs, &fv)).max(diff(js.as_slice(), jv.as_slice()));
    }
    if worst > BENCH_TOL {
        return Err(Failure {
            code: EXIT_UNSOLVED,
            message: format!("structured and expanded evaluation differ by {worst:.16e}"),
        });
    }

    let clock = Instant::now();
    for p in &points {
        std::hint::black_box(sys.values_and_jacobian(p).expect("checked above"));
    }
    let structured = clock.elapsed().as_secs_f64();
    let clock = Instant::now();
    for p in &points {
        std::hint::black_box(naive.evaluate(p).expect("checked above"));
        std::hint::black_box(naive.jacobian().evaluate(p).expect("checked above"));
    }
    let expanded = clock.elapsed().as_secs_f64();

    println!("system      {}", system_name(&args.system));
    println!("variables   {n} -> {}", sys.nvars());
    println!("equations   {} -> {}", sys.base().neqs(), sys.neqs());
    println!("stages      {}", sys.depth());
    println!("trials      {}", args.trials);
    println!("agreement   {worst:.16e}");
    println!("structured  {structured:.16e} s");
    println!("expanded    {expanded:.16e} s");
    println!("ratio       {:.16e}", structured / expanded);
    if n < BENCH_MIN_VARS {
        println!("note        below benchmark size (n < {BENCH_MIN_VARS})");
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Deflate(a) => cmd_deflate(a),
        Command::Multiplicity(a) => cmd_multiplicity(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
