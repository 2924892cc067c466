//! `m2sat`: solve, verify, generate, and reduce constraint instances.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use m2sat::certify::{verify_sat, verify_unsat};
use m2sat::format::{parse_instance, parse_verdict, write_instance, write_verdict};
use m2sat::gallery::enumerate::{enumerate_plans, solve_plan, Caps};
use m2sat::gallery::plan::{parse_plan, parse_polygon, write_plan};
use m2sat::gallery::reduce::reduce;
use m2sat::gen::{seeded_instance, GenConfig};
use m2sat::oracle::{numeric_oracle, OracleVerdict};
use m2sat::solver::{solve, Verdict};

const SAT: u8 = 0;
const UNSAT: u8 = 1;
const INPUT: u8 = 2;

#[derive(Parser)]
#[command(name = "m2sat", version, about = "Exact solver for two-variable monotone fractional-linear constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Write the result here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Decide instances; exit 0 when all are SAT, 1 when some is UNSAT, 2 on bad input.
    Solve {
        #[arg(required = true)]
        instances: Vec<PathBuf>,
        /// With several instances, write `<stem>.verdict.json` files here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Check a verdict against its instance; exit 0 accept, 1 reject, 2 malformed.
    Verify { instance: PathBuf, verdict: PathBuf },
    /// Turn a polygon and guard plan into an instance.
    Reduce {
        polygon: PathBuf,
        plan: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Try every guard plan within the caps until one is SAT.
    Enumerate {
        polygon: PathBuf,
        #[arg(long, default_value_t = 1)]
        guards: usize,
        /// `breaks=B,positions=P,plans=N` (`plans=none` for no limit).
        #[arg(long, default_value = "breaks=1,positions=2,plans=100000")]
        caps: CapsArg,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Write a random instance determined by the seed.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        pieces: usize,
        #[arg(long, default_value_t = 4)]
        magnitude: i64,
        /// Defaults to a count that yields both verdicts across seeds.
        #[arg(long)]
        constraints: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Floating-point cross-check; prints SAT, UNSAT or MARGINAL.
    Oracle {
        instance: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
    },
}

#[derive(Clone, Debug)]
struct CapsArg(Caps);

impl FromStr for CapsArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut caps = Caps::default();
        for part in s.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| format!("expected key=value, got {part:?}"))?;
            let num = || v.parse::<usize>().map_err(|e| format!("{k}: {e}"));
            match k.trim() {
                "breaks" => caps.max_breaks = num()?,
                "positions" => caps.guard_positions = num()?,
                "plans" if v == "none" => caps.max_plans = None,
                "plans" => caps.max_plans = Some(num()?),
                other => return Err(format!("unknown cap {other:?}")),
            }
        }
        Ok(CapsArg(caps))
    }
}

/// A failure that maps to an exit code after printing a diagnostic.
struct Fail(u8, String);

type Run = Result<u8, Fail>;

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail(INPUT, format!("{}: {e}", path.display())))
}

fn input<T>(path: &Path, r: m2sat::Result<T>) -> Result<T, Fail> {
    r.map_err(|e| Fail(INPUT, format!("{}: {e}", path.display())))
}

fn emit(out: &Output, text: &str) -> Result<(), Fail> {
    match &out.output {
        Some(p) => fs::write(p, format!("{text}\n")).map_err(|e| Fail(INPUT, format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, Fail> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Fail(INPUT, e.to_string()))
}

/// Solves one file; the verdict is self-verified by the solver.
fn solve_file(path: &Path) -> Result<(String, bool), Fail> {
    let inst = input(path, parse_instance(&read(path)?))?;
    let start = Instant::now();
    let verdict = solve(&inst).map_err(|e| Fail(INPUT, format!("{}: {e}", path.display())))?;
    eprintln!(
        "{}: {} in {:.3}s",
        path.display(),
        if verdict.is_sat() { "SAT" } else { "UNSAT" },
        start.elapsed().as_secs_f64()
    );
    Ok((write_verdict(&inst, &verdict), verdict.is_sat()))
}

fn cmd_solve(instances: &[PathBuf], out_dir: Option<&Path>, jobs: usize, out: &Output) -> Run {
    if let [one] = instances {
        let (text, sat) = solve_file(one)?;
        emit(out, &text)?;
        return Ok(if sat { SAT } else { UNSAT });
    }
    let results: Vec<_> = pool(jobs)?.install(|| instances.par_iter().map(|p| solve_file(p)).collect());
    let mut code = SAT;
    for (path, r) in instances.iter().zip(results) {
        match r {
            Ok((text, sat)) => {
                println!("{}: {}", path.display(), if sat { "SAT" } else { "UNSAT" });
                if let Some(dir) = out_dir {
                    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                    let target = dir.join(format!("{stem}.verdict.json"));
                    fs::write(&target, format!("{text}\n"))
                        .map_err(|e| Fail(INPUT, format!("{}: {e}", target.display())))?;
                }
                if !sat {
                    code = code.max(UNSAT);
                }
            }
            Err(Fail(c, msg)) => {
                eprintln!("{msg}");
                code = code.max(c);
            }
        }
    }
    Ok(code)
}

fn cmd_verify(instance: &Path, verdict: &Path) -> Run {
    let inst = input(instance, parse_instance(&read(instance)?))?;
    let v = input(verdict, parse_verdict(&inst, &read(verdict)?))?;
    let checked = match &v {
        Verdict::Sat(w) => verify_sat(&inst, w),
        Verdict::Unsat(c) => verify_unsat(&inst, c),
    };
    match checked {
        Ok(()) => {
            println!("accepted");
            Ok(0)
        }
        Err(r) => {
            println!("rejected: {r}");
            Ok(1)
        }
    }
}

fn cmd_reduce(polygon: &Path, plan: &Path, out: &Output) -> Run {
    let poly = input(polygon, parse_polygon(&read(polygon)?))?;
    let plan_v = input(plan, parse_plan(&read(plan)?))?;
    let inst = input(plan, reduce(&poly, &plan_v))?;
    emit(out, &write_instance(&inst))?;
    Ok(0)
}

fn cmd_enumerate(polygon: &Path, guards: usize, caps: &Caps, jobs: usize, out: &Output) -> Run {
    let poly = input(polygon, parse_polygon(&read(polygon)?))?;
    let pool = pool(jobs)?;
    let mut plans = enumerate_plans(&poly, guards, caps);
    let batch = 8 * jobs.max(1);
    let mut tried = 0usize;
    loop {
        let chunk: Vec<_> = plans.by_ref().take(batch).collect();
        if chunk.is_empty() {
            break;
        }
        let results: Vec<_> = pool.install(|| chunk.par_iter().map(|p| solve_plan(&poly, p)).collect());
        // first SAT in enumeration order, independent of scheduling
        for (plan, r) in chunk.iter().zip(results) {
            let (inst, verdict) = input(polygon, r)?;
            if verdict.is_sat() {
                eprintln!("plan {tried} is SAT");
                let text = format!(
                    "{{\n\"plan\": {},\n\"instance\": {},\n\"verdict\": {}\n}}",
                    write_plan(plan),
                    write_instance(&inst),
                    write_verdict(&inst, &verdict)
                );
                emit(out, &text)?;
                return Ok(SAT);
            }
            tried += 1;
        }
    }
    if plans.truncated() {
        eprintln!("warning: plan limit reached after {tried} plans");
        println!("UNSAT within caps (plan limit reached; not exhaustive)");
    } else {
        println!("UNSAT within caps ({tried} plans, exhaustive)");
    }
    Ok(UNSAT)
}

fn cmd_gen(seed: u64, n: usize, pieces: usize, magnitude: i64, constraints: Option<usize>, out: &Output) -> Run {
    if n == 0 || pieces == 0 || magnitude <= 0 {
        return Err(Fail(INPUT, "--n, --pieces and --magnitude must be positive".into()));
    }
    let mut cfg = GenConfig::balanced(n, pieces, seed);
    cfg.magnitude = magnitude;
    if let Some(c) = constraints {
        cfg.constraints = c;
    }
    emit(out, &write_instance(&seeded_instance(seed, &cfg)))?;
    Ok(0)
}

fn cmd_oracle(instance: &Path, tolerance: f64) -> Run {
    let inst = input(instance, parse_instance(&read(instance)?))?;
    let v = numeric_oracle(&inst, tolerance);
    println!(
        "{}",
        match v {
            OracleVerdict::Sat => "SAT",
            OracleVerdict::Unsat => "UNSAT",
            OracleVerdict::Marginal => "MARGINAL",
        }
    );
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { INPUT } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Solve {
            instances,
            out_dir,
            jobs,
            out,
        } => cmd_solve(instances, out_dir.as_deref(), *jobs, out),
        Command::Verify { instance, verdict } => cmd_verify(instance, verdict),
        Command::Reduce { polygon, plan, out } => cmd_reduce(polygon, plan, out),
        Command::Enumerate {
            polygon,
            guards,
            caps,
            jobs,
            out,
        } => cmd_enumerate(polygon, *guards, &caps.0, *jobs, out),
        Command::Gen {
            seed,
            n,
            pieces,
            magnitude,
            constraints,
            out,
        } => cmd_gen(*seed, *n, *pieces, *magnitude, *constraints, out),
        Command::Oracle { instance, tolerance } => cmd_oracle(instance, *tolerance),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
