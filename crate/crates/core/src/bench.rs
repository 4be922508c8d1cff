//! Seeded benchmark suites written as CSV.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Result, SolverError};
use crate::generators::{gen_lcqp, gen_qcqp};
use crate::driver::{solve, HiapemConfig, Mode};

pub const CSV_HEADER: [&str; 12] = [
    "trial",
    "method",
    "seed",
    "pres",
    "dres",
    "compl",
    "time_s",
    "n_obj",
    "n_grad",
    "stages",
    "outer_iters",
    "status",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Lcqp,
    Qcqp,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub problem: ProblemKind,
    pub n: usize,
    pub m: usize,
    /// Solver settings; `mode` is replaced by each entry of `methods`.
    pub solver: HiapemConfig,
    pub methods: Vec<Mode>,
    pub trials: usize,
    /// Trial `i` uses seed `seed + i`.
    pub seed: u64,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub trial: usize,
    pub method: Mode,
    pub seed: u64,
    pub pres: f64,
    pub dres: f64,
    pub compl: f64,
    pub time_s: f64,
    pub n_obj: u64,
    pub n_grad: u64,
    pub stages: usize,
    pub outer_iters: usize,
    /// `ok`, `not_kkt` or `error:<kind>`.
    pub status: String,
}

impl BenchRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

fn run_one(cfg: &SuiteConfig, trial: usize, method: Mode) -> BenchRow {
    let seed = cfg.seed + trial as u64;
    let solver = cfg.solver.with_mode(method);
    let start = Instant::now();
    let instance = match cfg.problem {
        ProblemKind::Lcqp => gen_lcqp(cfg.n, cfg.m, solver.rho, seed).map(|(i, p)| (i.start(), p)),
        ProblemKind::Qcqp => gen_qcqp(cfg.n, cfg.m, solver.rho, seed).map(|(i, p)| (i.start(), p)),
    };
    let outcome = instance.and_then(|(x0, problem)| solve(&problem, &x0, &solver));
    let time_s = start.elapsed().as_secs_f64();
    let nan = f64::NAN;
    match outcome {
        Ok(summary) => BenchRow {
            trial,
            method,
            seed,
            pres: summary.report.pres,
            dres: summary.report.dres,
            compl: summary.report.compl,
            time_s,
            n_obj: summary.counters.n_obj,
            n_grad: summary.counters.n_grad,
            stages: summary.stages,
            outer_iters: summary.outer_iters,
            status: if summary.is_eps_kkt(solver.eps) { "ok" } else { "not_kkt" }.to_string(),
        },
        Err(err) => {
            let partial = err.partial();
            BenchRow {
                trial,
                method,
                seed,
                pres: nan,
                dres: nan,
                compl: nan,
                time_s,
                n_obj: partial.map_or(0, |p| p.counters.n_obj),
                n_grad: partial.map_or(0, |p| p.counters.n_grad),
                stages: 0,
                outer_iters: partial.map_or(0, |p| p.iterations),
                status: format!("error:{}", err.kind()),
            }
        }
    }
}

/// Solves every `(method, trial)` pair. Rows come back grouped by method, then trial.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<BenchRow>> {
    cfg.solver.validate()?;
    if cfg.methods.is_empty() {
        return Err(SolverError::InvalidParameter("no methods selected".into()));
    }
    let jobs: Vec<(Mode, usize)> = cfg
        .methods
        .iter()
        .flat_map(|&m| (0..cfg.trials).map(move |t| (m, t)))
        .collect();
    let work = || jobs.par_iter().map(|&(m, t)| run_one(cfg, t, m)).collect::<Vec<_>>();
    match cfg.threads {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.max(1))
                .build()
                .map_err(|e| SolverError::InvalidParameter(format!("thread pool: {e}")))?;
            Ok(pool.install(work))
        }
        None => Ok(work()),
    }
}

fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:.6e}")
    }
}

fn average_record(method: Mode, rows: &[&BenchRow]) -> Vec<String> {
    let ok: Vec<&&BenchRow> = rows.iter().filter(|r| r.is_ok()).collect();
    let count = ok.len() as f64;
    let mean = |f: &dyn Fn(&BenchRow) -> f64| {
        if ok.is_empty() {
            String::new()
        } else {
            fmt_float(ok.iter().map(|r| f(r)).sum::<f64>() / count)
        }
    };
    vec![
        "avg".to_string(),
        method.tag().to_string(),
        String::new(),
        mean(&|r| r.pres),
        mean(&|r| r.dres),
        mean(&|r| r.compl),
        mean(&|r| r.time_s),
        mean(&|r| r.n_obj as f64),
        mean(&|r| r.n_grad as f64),
        mean(&|r| r.stages as f64),
        mean(&|r| r.outer_iters as f64),
        format!("ok={}/{}", ok.len(), rows.len()),
    ]
}

/// Writes the rows, plus one `avg` row after each method's block, as CSV.
pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> std::io::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER)?;
    let mut i = 0;
    while i < rows.len() {
        let method = rows[i].method;
        let block: Vec<&BenchRow> = rows[i..].iter().take_while(|r| r.method == method).collect();
        for r in &block {
            writer.write_record([
                r.trial.to_string(),
                r.method.tag().to_string(),
                r.seed.to_string(),
                fmt_float(r.pres),
                fmt_float(r.dres),
                fmt_float(r.compl),
                fmt_float(r.time_s),
                r.n_obj.to_string(),
                r.n_grad.to_string(),
                r.stages.to_string(),
                r.outer_iters.to_string(),
                r.status.clone(),
            ])?;
        }
        writer.write_record(average_record(method, &block))?;
        i += block.len();
    }
    writer.flush()
}
