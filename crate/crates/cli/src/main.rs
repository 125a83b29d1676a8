//! `polyc`: run, check, profile and transform PolyC programs.

mod args;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use polyc::analysis::{poly_check, Verdict};
use polyc::interp::{run_program_with, RunOptions, Value};
use polyc::syntax::{mode_pragma, parse_source, pretty_print, Mode, Program};
use polyc::tm::{clock_program, compile_tm, TuringMachine, DEFAULT_CLOCK_DEGREE};
use polyc::transform::{bounded_equiv, normalize_simple, t1_max_tracker, t2_cost_tracker};
use polyc::typecheck::check_program;
use serde_json::json;

use args::parse_arg;

const OK: u8 = 0;
const STATIC_ERROR: u8 = 1;
const RUNTIME_ERROR: u8 = 2;
const USAGE_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "polyc", version, about = "Toolchain for the PolyC polynomial-time language")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Core,
    Extended,
}

#[derive(clap::Args)]
struct SourceOpts {
    /// Language level; defaults to the file's `// mode:` line, else core.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Print machine-readable JSON on stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformKind {
    /// Track the largest absolute value reached.
    T1,
    /// Track the number of executed steps.
    T2,
    /// Rewrite into a single-loop simple form.
    Normalize,
}

#[derive(Subcommand)]
enum Command {
    /// Type-check and run a program, printing its output.
    Run {
        file: PathBuf,
        /// Program inputs (decimal, 0b binary, true/false, [lists], "strings").
        #[arg(allow_hyphen_values = true)]
        args: Vec<String>,
        #[command(flatten)]
        opts: SourceOpts,
        /// Also print the instruction count and maximum value size.
        #[arg(long)]
        cost: bool,
    },
    /// Type-check a program.
    Check {
        file: PathBuf,
        #[command(flatten)]
        opts: SourceOpts,
    },
    /// Run a program under the cost semantics and print the report.
    Cost {
        file: PathBuf,
        #[arg(allow_hyphen_values = true)]
        args: Vec<String>,
        #[command(flatten)]
        opts: SourceOpts,
    },
    /// Print the clock program of degree D.
    Clock { degree: usize },
    /// Compile a Turing machine (.tm) into a core program.
    CompileTm {
        file: PathBuf,
        /// Degree of the polynomial step budget.
        #[arg(short, long)]
        degree: Option<usize>,
    },
    /// Print an instrumented or normalized version of a program.
    Transform {
        #[arg(value_enum)]
        kind: TransformKind,
        file: PathBuf,
        #[command(flatten)]
        opts: SourceOpts,
    },
    /// Infer iterability annotations and decide whether the program is polynomial.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        opts: SourceOpts,
    },
    /// Compare two programs on every input with entries in [-bound, bound].
    Equiv {
        file1: PathBuf,
        file2: PathBuf,
        #[arg(long, default_value_t = 8)]
        bound: u64,
        #[command(flatten)]
        opts: SourceOpts,
    },
}

/// A failed command: exit code plus message for stderr.
struct Failure(u8, String);

type Outcome = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure(USAGE_ERROR, msg.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE_ERROR } else { OK });
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::from(OK),
        Err(Failure(code, msg)) => {
            if !msg.is_empty() {
                eprintln!("{msg}");
            }
            ExitCode::from(code)
        }
    }
}

fn dispatch(cmd: Command) -> Outcome {
    match cmd {
        Command::Run { file, args, opts, cost } => cmd_run(&file, &args, &opts, cost),
        Command::Check { file, opts } => cmd_check(&file, &opts),
        Command::Cost { file, args, opts } => cmd_cost(&file, &args, &opts),
        Command::Clock { degree } => cmd_clock(degree),
        Command::CompileTm { file, degree } => cmd_compile_tm(&file, degree),
        Command::Transform { kind, file, opts } => cmd_transform(kind, &file, &opts),
        Command::Analyze { file, opts } => cmd_analyze(&file, &opts),
        Command::Equiv { file1, file2, bound, opts } => cmd_equiv(&file1, &file2, bound, &opts),
    }
}

fn read(file: &Path) -> Result<String, Failure> {
    fs::read_to_string(file).map_err(|e| usage(format!("cannot read {}: {e}", file.display())))
}

fn load(file: &Path, opts: &SourceOpts) -> Result<Program, Failure> {
    let src = read(file)?;
    let mode = match opts.mode {
        Some(ModeArg::Core) => Mode::Core,
        Some(ModeArg::Extended) => Mode::Extended,
        None => mode_pragma(&src).unwrap_or(Mode::Core),
    };
    parse_source(&src, mode).map_err(|e| Failure(STATIC_ERROR, format!("{}:{e}", file.display())))
}

/// Parses and type-checks `file`, reporting diagnostics as a static error.
fn load_checked(file: &Path, opts: &SourceOpts) -> Result<Program, Failure> {
    let p = load(file, opts)?;
    check_program(&p).map_err(|errs| Failure(STATIC_ERROR, diagnostics(file, &errs)))?;
    Ok(p)
}

fn diagnostics(file: &Path, errs: &[impl std::fmt::Display]) -> String {
    errs.iter().map(|e| format!("{}:{e}", file.display())).collect::<Vec<_>>().join("\n")
}

fn inputs(p: &Program, args: &[String]) -> Result<Vec<Value>, Failure> {
    if args.len() != p.params.len() {
        return Err(usage(format!("main takes {} argument(s), {} given", p.params.len(), args.len())));
    }
    p.params
        .iter()
        .zip(args)
        .map(|(q, a)| parse_arg(a, &q.ty).map_err(|e| usage(format!("parameter '{}': {e}", q.name))))
        .collect()
}

fn execute(file: &Path, args: &[String], opts: &SourceOpts, cost_mode: bool) -> Result<polyc::interp::CostReport, Failure> {
    let p = load_checked(file, opts)?;
    let vals = inputs(&p, args)?;
    let run = RunOptions { cost_mode, fuel: RunOptions::fuel_from_env(), check_loop_invariant: false };
    run_program_with(&p, &vals, &run).map_err(|e| Failure(RUNTIME_ERROR, format!("{}: {e}", file.display())))
}

fn print(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes());
    if !text.ends_with('\n') {
        let _ = out.write_all(b"\n");
    }
}

fn cmd_run(file: &Path, args: &[String], opts: &SourceOpts, cost: bool) -> Outcome {
    let report = execute(file, args, opts, cost)?;
    match (opts.json, cost) {
        (true, true) => print(&report.to_json()),
        (true, false) => print(&json!({ "output": report.output.to_string() }).to_string()),
        (false, true) => print(&report.to_string()),
        (false, false) => print(&report.output.to_string()),
    }
    Ok(())
}

fn cmd_cost(file: &Path, args: &[String], opts: &SourceOpts) -> Outcome {
    let report = execute(file, args, opts, true)?;
    print(&if opts.json { report.to_json() } else { report.to_string() });
    Ok(())
}

fn cmd_check(file: &Path, opts: &SourceOpts) -> Outcome {
    let p = load(file, opts)?;
    match check_program(&p) {
        Ok(t) if opts.json => print(&json!({ "well_typed": true, "type": t.to_string() }).to_string()),
        Ok(t) => print(&format!("well-typed: {t}")),
        Err(errs) if opts.json => {
            print(&json!({ "well_typed": false, "errors": errs }).to_string());
            return Err(Failure(STATIC_ERROR, String::new()));
        }
        Err(errs) => return Err(Failure(STATIC_ERROR, diagnostics(file, &errs))),
    }
    Ok(())
}

fn cmd_clock(degree: usize) -> Outcome {
    let p = clock_program(degree).map_err(|e| usage(e.to_string()))?;
    print(&pretty_print(&p));
    Ok(())
}

fn cmd_compile_tm(file: &Path, degree: Option<usize>) -> Outcome {
    let d = degree.unwrap_or_else(|| {
        eprintln!("warning: no degree given, using d = {DEFAULT_CLOCK_DEGREE}; the machine must halt within the clock budget");
        DEFAULT_CLOCK_DEGREE
    });
    let m: TuringMachine = read(file)?.parse().map_err(|e| Failure(STATIC_ERROR, format!("{}: {e}", file.display())))?;
    let p = compile_tm(&m, d).map_err(|e| usage(e.to_string()))?;
    print(&pretty_print(&p));
    Ok(())
}

fn cmd_transform(kind: TransformKind, file: &Path, opts: &SourceOpts) -> Outcome {
    let p = load_checked(file, opts)?;
    let text = match kind {
        TransformKind::T1 => pretty_print(&t1_max_tracker(&p)),
        TransformKind::T2 => pretty_print(&t2_cost_tracker(&p)),
        TransformKind::Normalize => {
            let sf = normalize_simple(&p).map_err(|e| Failure(STATIC_ERROR, format!("{}: {e}", file.display())))?;
            // The budget parameter is an `iint` input, which only extended-mode
            // sources may declare.
            format!(
                "// mode: extended\n// budget parameter: {}; iteration bound: {}\n{}",
                sf.bound_var,
                sf.symbolic_bound,
                pretty_print(&sf.program)
            )
        }
    };
    print(&text);
    Ok(())
}

fn cmd_analyze(file: &Path, opts: &SourceOpts) -> Outcome {
    let p = load(file, opts)?;
    let a = poly_check(&p).map_err(|e| Failure(STATIC_ERROR, format!("{}: {e}", file.display())))?;
    if opts.json {
        let program = (a.verdict == Verdict::Poly).then(|| pretty_print(&a.annotated));
        print(&json!({ "verdict": a.verdict, "iterable": a.state.iterable(), "program": program }).to_string());
        return Ok(());
    }
    print(&a.verdict.to_string());
    match a.verdict {
        Verdict::Poly => print(&pretty_print(&a.annotated)),
        Verdict::Unknown => eprintln!("{}", diagnostics(file, &a.remaining)),
    }
    Ok(())
}

fn cmd_equiv(file1: &Path, file2: &Path, bound: u64, opts: &SourceOpts) -> Outcome {
    let p1 = load_checked(file1, opts)?;
    let p2 = load_checked(file2, opts)?;
    let r = bounded_equiv(&p1, &p2, bound).map_err(|e| usage(e.to_string()))?;
    let witness: Option<Vec<String>> = r.witness.map(|w| w.iter().map(Value::to_string).collect());
    if opts.json {
        print(&json!({ "equivalent": r.equivalent, "witness": witness, "checked": r.checked }).to_string());
    } else {
        print(&r.equivalent.to_string());
        if let Some(w) = witness {
            print(&format!("witness: {}", w.join(" ")));
        }
    }
    Ok(())
}
