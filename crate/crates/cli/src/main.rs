use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mvsl::frontend::{parse, pretty_print};
use mvsl::oracle::{
    differential_run, differential_run_source, generate_program, interpret_eager, GenConfig,
    ALL_ENGINES,
};
use mvsl::{check_program, compile, execute, ir, typeck, Diagnostic, Error, ExecOptions};
use rayon::prelude::*;

const EXIT_OK: u8 = 0;
const EXIT_REJECTED: u8 = 1;
const EXIT_TRAP: u8 = 2;
const EXIT_DIFF_FAIL: u8 = 3;
const EXIT_USAGE: u8 = 4;

/// Generated programs used by `diff --seed/--trials`.
const DIFF_SIZE_BUDGET: usize = 50;

#[derive(Parser)]
#[command(name = "mvsl", version, about = "Run, check and differentially test MVSL programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a program and print its final value.
    Run(RunArgs),
    /// Type-check a program.
    Check(CheckArgs),
    /// Compare the reference interpreter with every VM configuration.
    Diff(DiffArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Dump {
    Ast,
    Ir,
    Types,
}

#[derive(Args)]
struct RunArgs {
    file: PathBuf,
    /// Print runtime counters as JSON on stderr.
    #[arg(long)]
    stats: bool,
    #[arg(long)]
    no_move_opt: bool,
    #[arg(long)]
    no_cow: bool,
    /// Use the reference interpreter instead of the VM.
    #[arg(long)]
    oracle: bool,
    #[arg(long, value_enum)]
    dump: Option<Dump>,
}

#[derive(Args)]
struct CheckArgs {
    file: PathBuf,
    #[arg(long, value_enum)]
    dump: Option<Dump>,
    #[arg(long)]
    no_move_opt: bool,
}

#[derive(Args)]
struct DiffArgs {
    /// Program to test; omit to test generated programs.
    file: Option<PathBuf>,
    /// First generator seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of generated programs.
    #[arg(long)]
    trials: Option<u64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(match cli.command {
        Command::Run(a) => run(a),
        Command::Check(a) => check(a),
        Command::Diff(a) => diff(a),
    })
}

fn read(path: &PathBuf) -> Result<String, u8> {
    fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_USAGE
    })
}

fn report(err: &Error, source: &str) -> u8 {
    eprintln!("{}", err.render(source));
    match err {
        Error::Trap(_) => EXIT_TRAP,
        Error::Syntax(_) | Error::Type(_) => EXIT_REJECTED,
    }
}

/// Parses and checks, emitting whichever dump is requested along the way.
fn front(
    source: &str,
    dump: Option<Dump>,
    move_opt: bool,
    out: &mut dyn Write,
) -> Result<(typeck::TypedProgram, ir::IrProgram), Error> {
    let ast = parse(source)?;
    if let Some(Dump::Ast) = dump {
        let _ = write!(out, "{}", pretty_print(&ast));
    }
    let typed = check_program(&ast)?;
    if let Some(Dump::Types) = dump {
        let _ = write!(out, "{}", typeck::typed::dump(&typed));
    }
    let ir = compile(&typed, move_opt);
    if let Some(Dump::Ir) = dump {
        let _ = write!(out, "{}", ir::dump(&ir));
    }
    Ok((typed, ir))
}

fn run(a: RunArgs) -> u8 {
    let source = match read(&a.file) {
        Ok(s) => s,
        Err(c) => return c,
    };
    // Stdout carries only the final value; dumps go to stderr.
    let (typed, ir) = match front(&source, a.dump, !a.no_move_opt, &mut std::io::stderr()) {
        Ok(x) => x,
        Err(e) => return report(&e, &source),
    };
    if a.oracle {
        return match interpret_eager(&typed) {
            Ok(v) => {
                println!("{v}");
                EXIT_OK
            }
            Err(t) => report(&Error::Trap(t), &source),
        };
    }
    let opts = ExecOptions {
        cow: !a.no_cow,
        check_refcounts: false,
    };
    match execute(&ir, opts) {
        Ok(x) => {
            println!("{}", x.output);
            if a.stats {
                eprintln!("{}", x.stats.to_json());
            }
            EXIT_OK
        }
        Err(t) => report(&Error::Trap(t), &source),
    }
}

fn check(a: CheckArgs) -> u8 {
    let source = match read(&a.file) {
        Ok(s) => s,
        Err(c) => return c,
    };
    match front(&source, a.dump, !a.no_move_opt, &mut std::io::stdout()) {
        Ok(_) => {
            if a.dump.is_none() {
                println!("ok");
            }
            EXIT_OK
        }
        Err(e) => report(&e, &source),
    }
}

fn diff(a: DiffArgs) -> u8 {
    match (&a.file, a.seed, a.trials) {
        (Some(path), None, None) => {
            let source = match read(path) {
                Ok(s) => s,
                Err(c) => return c,
            };
            match differential_run_source(&source, &ALL_ENGINES) {
                Ok(r) => {
                    println!("{}", r.to_json());
                    if r.passed() {
                        EXIT_OK
                    } else {
                        EXIT_DIFF_FAIL
                    }
                }
                Err(e) => report(&e, &source),
            }
        }
        (None, seed, trials) => {
            let start = seed.unwrap_or(0);
            let n = trials.unwrap_or(1);
            let reports: Vec<Result<_, String>> = (start..start.saturating_add(n))
                .into_par_iter()
                .map(|s| {
                    let p = generate_program(&GenConfig::new(s, DIFF_SIZE_BUDGET));
                    differential_run(&p, &ALL_ENGINES)
                        .map_err(|e| format!("seed {s}: generated program rejected: {}", e.message()))
                })
                .collect();
            let mut code = EXIT_OK;
            for r in reports {
                match r {
                    Ok(r) => {
                        println!("{}", r.to_json());
                        if !r.passed() {
                            code = EXIT_DIFF_FAIL;
                        }
                    }
                    Err(m) => {
                        eprintln!("error: {m}");
                        code = EXIT_DIFF_FAIL;
                    }
                }
            }
            code
        }
        (Some(_), _, _) => {
            eprintln!("error: a file cannot be combined with --seed or --trials");
            EXIT_USAGE
        }
    }
}
