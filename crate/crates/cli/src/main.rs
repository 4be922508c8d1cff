use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use hiapem::bench::{run_suite, write_csv, ProblemKind, SuiteConfig};
use hiapem::{HiapemConfig, Mode};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Problem {
    Lcqp,
    Qcqp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Hiapem,
    Ialm,
    Penalty,
}

impl From<Method> for Mode {
    fn from(m: Method) -> Self {
        match m {
            Method::Hiapem => Mode::Hybrid,
            Method::Ialm => Mode::PureIalm,
            Method::Penalty => Mode::PurePenalty,
        }
    }
}

/// Benchmark the solvers on seeded random instances and write a CSV table.
///
/// Exits with status 0 when every trial ends at an ε-KKT point, 1 otherwise.
/// Set SOLVER_THREADS to cap the number of trials solved in parallel.
#[derive(Debug, Parser)]
#[command(name = "hiapem", version)]
struct Args {
    #[arg(long, value_enum, default_value = "lcqp")]
    problem: Problem,

    /// Number of variables.
    #[arg(long, default_value_t = 200)]
    n: usize,

    /// Equality rows (LCQP) or quadratic constraints (QCQP).
    #[arg(long, default_value_t = 20)]
    m: usize,

    /// Weak-convexity constant; also the magnitude of the most negative eigenvalue.
    #[arg(long, default_value_t = 1.0)]
    rho: f64,

    #[arg(long, default_value_t = 1e-3)]
    eps: f64,

    /// Comma-separated list of methods.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "hiapem")]
    method: Vec<Method>,

    #[arg(long, default_value_t = 10)]
    n0: usize,

    #[arg(long, default_value_t = 2)]
    n1: usize,

    #[arg(long, default_value_t = 1.1)]
    gamma: f64,

    #[arg(long, default_value_t = 0.01)]
    beta0: f64,

    #[arg(long, default_value_t = 3.0)]
    sigma: f64,

    #[arg(long, default_value_t = 2.0)]
    gamma1: f64,

    #[arg(long, default_value_t = 1.25)]
    gamma2: f64,

    /// Smallest trial Lipschitz constant [default: rho].
    #[arg(long)]
    lmin: Option<f64>,

    #[arg(long, default_value_t = 5)]
    trials: usize,

    /// Seed of the first trial; trial i uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output CSV path [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,

    /// Cap on proximal-point iterations per solve.
    #[arg(long, default_value_t = 10_000)]
    max_outer: usize,
}

impl Args {
    fn suite(&self, threads: Option<usize>) -> SuiteConfig {
        let mut methods: Vec<Mode> = Vec::new();
        for m in &self.method {
            let mode = Mode::from(*m);
            if !methods.contains(&mode) {
                methods.push(mode);
            }
        }
        let solver = HiapemConfig {
            n0: self.n0,
            n1: self.n1,
            gamma: self.gamma,
            beta0: self.beta0,
            sigma: self.sigma,
            gamma1: self.gamma1,
            gamma2: self.gamma2,
            l_min: self.lmin.unwrap_or(self.rho),
            max_total_outer: self.max_outer,
            ..HiapemConfig::new(self.eps, self.rho)
        };
        SuiteConfig {
            problem: match self.problem {
                Problem::Lcqp => ProblemKind::Lcqp,
                Problem::Qcqp => ProblemKind::Qcqp,
            },
            n: self.n,
            m: self.m,
            solver,
            methods,
            trials: self.trials,
            seed: self.seed,
            threads,
        }
    }
}

fn threads_from_env() -> Result<Option<usize>, String> {
    match std::env::var("SOLVER_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|e| format!("SOLVER_THREADS={v:?}: {e}")),
        Err(_) => Ok(None),
    }
}

fn run(args: &Args) -> Result<bool, String> {
    let threads = threads_from_env()?;
    let rows = run_suite(&args.suite(threads)).map_err(|e| e.to_string())?;
    let all_ok = rows.iter().all(|r| r.is_ok());
    let sink: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| format!("{}: {e}", path.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    write_csv(&rows, sink).map_err(|e| e.to_string())?;
    Ok(all_ok)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
