use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use gave::bench::{
    certify, certify_problem, emit_certificates, emit_table, run_benchmark, BenchConfig, ExampleSource, Method,
    TableFormat,
};
use gave::matrixlab::mmio::{read_matrix_market_file, read_vector_file, write_vector_file};
use gave::problems::{
    generate_lattice, lcp_to_gave, read_problem_dir, sign_enumeration_oracle, write_problem_dir, LatticeParams,
    ORACLE_MAX_DIM,
};
use gave::solvers::{OmegaSpec, SolverConfig};

#[derive(Parser)]
#[command(name = "gave", version, about = "Solvers and benchmarks for A x - B|x| = b")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the solver matrix over generated examples and print a table.
    Bench(BenchArgs),
    /// Solve one problem directory.
    Solve(SolveArgs),
    /// Evaluate the four convergence certificates.
    Certify(CertifyArgs),
    /// Enumerate all solutions of a small problem by sign patterns.
    Oracle {
        #[arg(long)]
        problem: PathBuf,
    },
    /// Write a lattice example to a problem directory.
    Generate {
        #[arg(long, default_value = "3.1")]
        example: String,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 4.0)]
        mu: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct InstanceArgs {
    /// `3.1`, `3.2` or a problem directory.
    #[arg(long, default_value = "3.1")]
    example: String,
    /// Grid sizes m (order n = m²).
    #[arg(long, value_delimiter = ',', default_value = "50,100")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 4.0)]
    mu: f64,
    /// `diag`, a positive scalar, or a Matrix Market file.
    #[arg(long, default_value = "diag")]
    omega: String,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, value_delimiter = ',', default_value = "mn,nms-gs,max-based,gmres20")]
    methods: Vec<String>,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 500)]
    kmax: usize,
    #[arg(long, default_value = "markdown")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Start from a seeded random vector instead of zero.
    #[arg(long)]
    random_start: bool,
    /// Run rows sequentially for undisturbed timings.
    #[arg(long)]
    timing_strict: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    problem: PathBuf,
    #[arg(long, default_value = "max-based")]
    method: String,
    #[arg(long, default_value = "diag")]
    omega: String,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 500)]
    kmax: usize,
    /// Starting vector file; zero when omitted.
    #[arg(long)]
    x0: Option<PathBuf>,
    /// Write the final iterate here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    /// Problem directory; overrides the example options.
    #[arg(long)]
    problem: Option<PathBuf>,
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, default_value = "markdown")]
    format: String,
}

fn parse_omega(s: &str) -> Result<OmegaSpec> {
    if s == "diag" {
        return Ok(OmegaSpec::DiagonalOfA);
    }
    if let Ok(w) = s.parse::<f64>() {
        return Ok(OmegaSpec::Scalar(w));
    }
    let m = read_matrix_market_file(s).with_context(|| format!("reading omega matrix `{s}`"))?;
    Ok(OmegaSpec::Explicit(m))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn bench(args: BenchArgs) -> Result<ExitCode> {
    let methods = args.methods.iter().map(|m| m.parse::<Method>()).collect::<Result<Vec<_>, _>>()?;
    let format: TableFormat = args.format.parse()?;
    let config = BenchConfig {
        example: args.instance.example.parse().expect("infallible"),
        sizes: args.instance.sizes,
        mu: args.instance.mu,
        methods,
        omega: parse_omega(&args.instance.omega)?,
        tol: args.tol,
        k_max: args.kmax,
        seed: args.seed,
        random_start: args.random_start,
        threads: None,
        timing_strict: args.timing_strict,
    };
    let rows = run_benchmark(&config)?;
    emit(&emit_table(&rows, format)?, args.out.as_deref())?;
    let failed: Vec<String> = rows
        .iter()
        .filter(|r| !r.converged)
        .map(|r| match &r.error {
            Some(e) => format!("{} n={}: {e}", r.method.label(), r.n),
            None => format!("{} n={}: not converged after {} iterations", r.method.label(), r.n, r.it),
        })
        .collect();
    for f in &failed {
        eprintln!("{f}");
    }
    Ok(if failed.is_empty() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn solve(args: SolveArgs) -> Result<ExitCode> {
    let pd = read_problem_dir(&args.problem).with_context(|| format!("reading {}", args.problem.display()))?;
    let method: Method = args.method.parse()?;
    let x0 = args.x0.as_ref().map(read_vector_file).transpose()?;
    let config = SolverConfig { omega: parse_omega(&args.omega)?, tol: args.tol, k_max: args.kmax, x0, record_iterates: false };
    let report = method.run(&pd.problem, &config)?;
    let res = pd.problem.residual(&report.x)?;
    println!("method = {}", method.label());
    println!("n = {}", pd.problem.dim());
    println!("it = {}", report.iterations);
    println!("cpu_s = {:.3e}", report.wall_time);
    println!("res = {res:.4e}");
    println!("converged = {}", report.converged);
    if let Some(s) = report.sign_consistent {
        println!("sign_consistent = {s}");
    }
    if let Some(xs) = &pd.x_star {
        let err = xs.iter().zip(&report.x).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        println!("error_inf = {err:.4e}");
    }
    if let Some(out) = &args.out {
        write_vector_file(&report.x, out)?;
    }
    Ok(if report.converged { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn certify_cmd(args: CertifyArgs) -> Result<ExitCode> {
    let format: TableFormat = args.format.parse()?;
    let omega = parse_omega(&args.instance.omega)?;
    let rows = match &args.problem {
        Some(dir) => {
            let pd = read_problem_dir(dir).with_context(|| format!("reading {}", dir.display()))?;
            vec![certify_problem(&dir.display().to_string(), &pd.problem, &omega)]
        }
        None => certify(&BenchConfig {
            example: args.instance.example.parse().expect("infallible"),
            sizes: args.instance.sizes,
            mu: args.instance.mu,
            omega,
            ..Default::default()
        })?,
    };
    print!("{}", emit_certificates(&rows, format));
    Ok(ExitCode::SUCCESS)
}

fn oracle(problem: &Path) -> Result<ExitCode> {
    let pd = read_problem_dir(problem).with_context(|| format!("reading {}", problem.display()))?;
    if pd.problem.dim() > ORACLE_MAX_DIM {
        bail!("oracle supports n <= {ORACLE_MAX_DIM}, problem has n = {}", pd.problem.dim());
    }
    let sols = sign_enumeration_oracle(&pd.problem)?;
    println!("solutions = {}", sols.len());
    for (k, s) in sols.iter().enumerate() {
        let xs: Vec<String> = s.x.iter().map(|v| format!("{v:.12e}")).collect();
        println!("x[{k}] = {}", xs.join(" "));
    }
    Ok(ExitCode::SUCCESS)
}

fn generate(example: &str, m: usize, mu: f64, out: &Path) -> Result<ExitCode> {
    let ExampleSource::Lattice(variant) = example.parse().expect("infallible") else {
        bail!("unknown example `{example}`; expected 3.1 or 3.2");
    };
    let lcp = generate_lattice(LatticeParams { m, mu, variant })?;
    let (problem, witness) = lcp_to_gave(&lcp);
    write_problem_dir(out, &problem, witness.as_ref().map(|w| w.x_star.as_slice()))?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Bench(a) => bench(a),
        Command::Solve(a) => solve(a),
        Command::Certify(a) => certify_cmd(a),
        Command::Oracle { problem } => oracle(&problem),
        Command::Generate { example, m, mu, out } => generate(&example, m, mu, &out),
    }
}
