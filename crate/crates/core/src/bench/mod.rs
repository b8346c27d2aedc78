//! Benchmark harness over the lattice examples or a problem directory.

mod certify;
mod table;

pub use certify::{certify, certify_problem, emit_certificates, CertificateRow};
pub use table::{emit_table, TableFormat};

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::problems::{
    generate_lattice, lcp_to_gave, read_problem_dir, GaveProblem, LatticeParams, LatticeVariant, ProblemError,
};
use crate::solvers::{
    solve_max_based, solve_mn, solve_nms, solve_sign_reduced, AssumedSign, OmegaSpec, ReducedBackend, SolveReport,
    SolverConfig, SplittingStrategy,
};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "GAVE_THREADS";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid benchmark configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Mn,
    NmsGs,
    MaxBased,
    Gmres20,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Mn, Method::NmsGs, Method::MaxBased, Method::Gmres20];

    /// Row label used in tables.
    pub fn label(self) -> &'static str {
        match self {
            Self::Mn => "M-1",
            Self::NmsGs => "M-2",
            Self::MaxBased => "M-3",
            Self::Gmres20 => "G-20",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Mn => "mn",
            Self::NmsGs => "nms-gs",
            Self::MaxBased => "max-based",
            Self::Gmres20 => "gmres20",
        }
    }

    pub fn run(self, problem: &GaveProblem, config: &SolverConfig) -> Result<SolveReport, crate::solvers::SolveError> {
        match self {
            Self::Mn => solve_mn(problem, config),
            Self::NmsGs => solve_nms(problem, config, &SplittingStrategy::GaussSeidel),
            Self::MaxBased => solve_max_based(problem, config),
            Self::Gmres20 => {
                solve_sign_reduced(problem, config, AssumedSign::Nonpositive, ReducedBackend::Gmres { restart: 20 })
            }
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s || m.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| BenchError::Config(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExampleSource {
    Lattice(LatticeVariant),
    ProblemDir(PathBuf),
}

impl FromStr for ExampleSource {
    type Err = std::convert::Infallible;

    /// `3.1` and `3.2` select the lattice examples; anything else is a path.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "3.1" => Self::Lattice(LatticeVariant::Symmetric),
            "3.2" => Self::Lattice(LatticeVariant::Nonsymmetric),
            other => Self::ProblemDir(PathBuf::from(other)),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub example: ExampleSource,
    /// Grid sizes `m`; each instance has order `m²`. Ignored for problem directories.
    pub sizes: Vec<usize>,
    pub mu: f64,
    pub methods: Vec<Method>,
    pub omega: OmegaSpec,
    pub tol: f64,
    pub k_max: usize,
    /// Seeds the random starting vector when `random_start` is set.
    pub seed: u64,
    pub random_start: bool,
    /// Worker cap; falls back to `GAVE_THREADS`, then rayon's default.
    pub threads: Option<usize>,
    /// Run rows one at a time so timings do not share cores.
    pub timing_strict: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            example: ExampleSource::Lattice(LatticeVariant::Symmetric),
            sizes: vec![50, 100],
            mu: 4.0,
            methods: Method::ALL.to_vec(),
            omega: OmegaSpec::DiagonalOfA,
            tol: 1e-6,
            k_max: 500,
            seed: 0,
            random_start: false,
            threads: None,
            timing_strict: false,
        }
    }
}

impl BenchConfig {
    fn validate(&self) -> Result<(), BenchError> {
        if self.sizes.is_empty() && matches!(self.example, ExampleSource::Lattice(_)) {
            return Err(BenchError::Config("sizes must not be empty".into()));
        }
        if self.methods.is_empty() {
            return Err(BenchError::Config("methods must not be empty".into()));
        }
        if !(self.tol > 0.0) {
            return Err(BenchError::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if self.k_max < 1 {
            return Err(BenchError::Config("kmax must be at least 1".into()));
        }
        Ok(())
    }

    fn solver_config(&self, n: usize) -> SolverConfig {
        let x0 = self.random_start.then(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ n as u64);
            (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
        });
        SolverConfig { omega: self.omega.clone(), tol: self.tol, k_max: self.k_max, x0, record_iterates: false }
    }

    fn worker_count(&self) -> Option<usize> {
        if self.timing_strict {
            return Some(1);
        }
        self.threads
            .or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()))
            .filter(|&t| t > 0)
    }
}

/// A generated or loaded instance together with its known solution.
#[derive(Debug, Clone)]
pub struct Instance {
    pub label: String,
    pub problem: GaveProblem,
    pub x_star: Option<Vec<f64>>,
}

pub fn build_instances(config: &BenchConfig) -> Result<Vec<Instance>, BenchError> {
    match &config.example {
        ExampleSource::Lattice(variant) => config
            .sizes
            .iter()
            .map(|&m| {
                let lcp = generate_lattice(LatticeParams { m, mu: config.mu, variant: *variant })?;
                let (problem, witness) = lcp_to_gave(&lcp);
                Ok(Instance {
                    label: format!("n={}", m * m),
                    problem,
                    x_star: witness.map(|w| w.x_star),
                })
            })
            .collect(),
        ExampleSource::ProblemDir(dir) => {
            let pd = read_problem_dir(dir)?;
            Ok(vec![Instance { label: dir.display().to_string(), problem: pd.problem, x_star: pd.x_star }])
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub method: Method,
    pub n: usize,
    pub it: usize,
    pub cpu_s: f64,
    /// GAVE residual of the final iterate; NaN when the solve failed.
    pub res: f64,
    pub converged: bool,
    pub error: Option<String>,
    /// `‖x − x*‖_∞` when the instance has a known solution.
    pub solution_error: Option<f64>,
    pub x: Vec<f64>,
}

fn run_row(method: Method, instance: &Instance, config: &BenchConfig) -> BenchRow {
    let n = instance.problem.dim();
    let failed = |msg: String| BenchRow {
        method,
        n,
        it: 0,
        cpu_s: 0.0,
        res: f64::NAN,
        converged: false,
        error: Some(msg),
        solution_error: None,
        x: Vec::new(),
    };
    let report = match method.run(&instance.problem, &config.solver_config(n)) {
        Ok(r) => r,
        Err(e) => return failed(e.to_string()),
    };
    let res = match instance.problem.residual(&report.x) {
        Ok(r) => r,
        Err(e) => return failed(e.to_string()),
    };
    let solution_error = instance.x_star.as_ref().map(|xs| {
        xs.iter().zip(&report.x).fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()))
    });
    BenchRow {
        method,
        n,
        it: report.iterations,
        cpu_s: report.wall_time,
        res,
        converged: report.converged && res < config.tol,
        error: None,
        solution_error,
        x: report.x,
    }
}

/// One row per (method, instance), ordered by method then instance order.
/// Solver failures are recorded in the row and do not abort the run.
pub fn run_benchmark(config: &BenchConfig) -> Result<Vec<BenchRow>, BenchError> {
    config.validate()?;
    let instances = build_instances(config)?;
    let jobs: Vec<(Method, &Instance)> =
        config.methods.iter().flat_map(|&m| instances.iter().map(move |i| (m, i))).collect();
    let run = || jobs.par_iter().map(|&(m, inst)| run_row(m, inst, config)).collect::<Vec<_>>();
    let rows = match config.worker_count() {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| BenchError::Config(e.to_string()))?
            .install(run),
        None => run(),
    };
    Ok(rows)
}
