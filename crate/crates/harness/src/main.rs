use std::path::PathBuf;
use std::process::ExitCode;
use std::thread;

use clap::{Args, Parser, Subcommand};
use geodesic_harness::spec::parse_line_search;
use geodesic_harness::{run, write_outputs, Experiment, ExperimentSpec, Init, Method};
use geodesic_opt::solvers::LineSearchKind;

/// Convergence experiments for geodesic optimization on the sphere and SO(n).
#[derive(Parser)]
#[command(name = "geodesic", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rayleigh quotient on the sphere, Q = diag(n, ..., 1).
    Fig1(RunArgs),
    /// Brockett's function on SO(n), N = diag(n, ..., 1), seeded Q.
    Fig2(RunArgs),
    /// Diagonalization by maximizing tr H pi(H) on SO(n).
    Jacobi(RunArgs),
    /// Finite-difference check of gradients and Hessians.
    FdCheck(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Problem size.
    #[arg(long)]
    n: Option<usize>,
    /// Methods to run (comma-separated): sd, cg, newton, rqi, newton-rq.
    #[arg(long, value_delimiter = ',')]
    method: Vec<Method>,
    /// Seeds (comma-separated); each (method, seed) pair runs in its own thread.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    seed: Vec<u64>,
    /// Starting point: random or near:<eps>.
    #[arg(long)]
    init: Option<Init>,
    /// Iteration budget
    #[arg(long)]
    max_iter: Option<usize>,
    /// Gradient-norm tolerance (relative residual for the eigensolvers)
    #[arg(long)]
    tol: Option<f64>,
    /// Conjugate gradient reset period.
    #[arg(long)]
    reset_period: Option<usize>,
    /// exact, golden or estimate.
    #[arg(long, value_parser = parse_line_search)]
    line_search: Option<LineSearchKind>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn specs(experiment: Experiment, args: &RunArgs) -> Vec<ExperimentSpec> {
    let methods = if args.method.is_empty() {
        experiment.default_methods().to_vec()
    } else {
        args.method.clone()
    };
    let mut out = Vec::new();
    for &method in &methods {
        for &seed in &args.seed {
            let mut s = ExperimentSpec::new(experiment, method, seed);
            if let Some(n) = args.n {
                s.n = n;
            }
            if let Some(init) = args.init {
                s.init = init;
            }
            if let Some(m) = args.max_iter {
                s.max_iter = m;
            }
            if let Some(t) = args.tol {
                s.tol = t;
            }
            if args.reset_period.is_some() {
                s.reset_period = args.reset_period;
            }
            if let Some(l) = args.line_search {
                s.line_search = l;
            }
            out.push(s);
        }
    }
    out
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (experiment, args) = match &cli.command {
        Command::Fig1(a) => (Experiment::Fig1, a),
        Command::Fig2(a) => (Experiment::Fig2, a),
        Command::Jacobi(a) => (Experiment::Jacobi, a),
        Command::FdCheck(a) => (Experiment::FdCheck, a),
    };
    let specs = specs(experiment, args);
    for s in &specs {
        if let Err(e) = s.validate() {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    }
    let results: Vec<_> = thread::scope(|scope| {
        let handles: Vec<_> = specs.iter().map(|s| scope.spawn(move || run(s))).collect();
        handles.into_iter().map(|h| h.join().expect("run thread panicked")).collect()
    });

    let mut code = 0;
    for (spec, result) in specs.iter().zip(results) {
        let stem = spec.file_stem();
        let outcome = match result.and_then(|o| write_outputs(&args.out, &o).map(|w| (o, w))) {
            Ok(pair) => pair,
            Err(e) => {
                eprintln!("{stem}: {e}");
                code = code.max(e.exit_code());
                continue;
            }
        };
        let (o, written) = outcome;
        let r = &o.report;
        let order = match &r.order {
            Some(Ok(fit)) => format!(", order {:.3}", fit.order),
            _ => String::new(),
        };
        let error = r.final_error.map_or(String::new(), |e| format!(", error {e:.3e}"));
        println!(
            "{stem}: {} after {} iterations{error}{order} in {:.1?} -> {}",
            r.outcome.name(),
            r.iterations,
            r.duration,
            written.report.display()
        );
        code = code.max(r.outcome.exit_code());
    }
    ExitCode::from(code as u8)
}
