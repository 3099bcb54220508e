use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use waist_cli::bench::{bench_csv, parse_grid, run_grid};
use waist_cli::commands::{exit_code, run_oracle, solve_file, Overrides};
use waist_cli::output::write_file;
use waist_cli::problem_file::{parse_method, RuleKind};
use waist_cli::{parse_problem, CliError, ProblemFile};
use waist_core::solver::solve;

#[derive(Parser)]
#[command(name = "waist", version, about = "Shortest closed chain through an ordered list of convex sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem file and write its trace, summary and figure.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        opts: SolverArgs,
        /// Also run the boundary-grid oracle at this resolution.
        #[arg(long, value_name = "N")]
        oracle: Option<usize>,
    },
    /// Run every (strategy, tolerance) cell of a grid file.
    Bench {
        file: PathBuf,
        #[arg(long, value_name = "FILE")]
        grid: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Compare the solver with the boundary-grid oracle.
    Oracle {
        file: PathBuf,
        #[arg(long, value_name = "N", default_value_t = 360)]
        resolution: usize,
        #[command(flatten)]
        opts: SolverArgs,
    },
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_name = "N")]
    max_iter: Option<usize>,
    /// Constant step, line-search bracket or numerator c of c/k.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_parser = ["constant", "diminishing", "exact-line-search"])]
    step_rule: Option<String>,
    #[arg(long)]
    aitken: bool,
    #[arg(long, value_parser = ["psd", "nag"])]
    method: Option<String>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

impl SolverArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            tolerance: self.tol,
            max_iterations: self.max_iter,
            alpha: self.alpha,
            step_rule: self.step_rule.as_deref().and_then(RuleKind::parse),
            aitken: self.aitken,
            method: self.method.as_deref().and_then(parse_method),
        }
    }
}

fn load(path: &Path, opts: Option<&SolverArgs>) -> Result<ProblemFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut file = parse_problem(&text)?;
    if let Some(o) = opts {
        o.overrides().apply(&mut file.solver);
    }
    Ok(file)
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "waist".into(), |s| s.to_string_lossy().into_owned())
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Solve { file, opts, oracle } => {
            let problem = load(&file, Some(&opts))?;
            let (result, written) = solve_file(&problem, &opts.out_dir, &stem(&file), oracle)?;
            println!(
                "D* = {:.9}  iterations = {}  termination = {:?}  residual = {:.3e}",
                result.value, result.iterations, result.termination, result.residual
            );
            for w in &result.warnings {
                eprintln!("warning: {w}");
            }
            for p in [&written.trace_csv, &written.summary_json, &written.figure_svg].into_iter().flatten() {
                println!("wrote {}", p.display());
            }
            Ok(exit_code(result.termination))
        }
        Command::Bench { file, grid, out_dir } => {
            let problem = load(&file, None)?;
            let grid_text = std::fs::read_to_string(&grid).map_err(|e| CliError::io(&grid, e))?;
            let grid = parse_grid(&grid_text)?;
            let (rows, errors) = run_grid(&problem.problem, &problem.start, &grid);
            for e in &errors {
                eprintln!(
                    "cell skipped (strategy {}, tolerance {:e}): {}",
                    e.strategy, e.tolerance, e.message
                );
            }
            for r in rows.iter().filter(|r| exit_code(r.termination) != 0) {
                eprintln!("warning: {} {} at {:e} stopped at the iteration cap", r.method, r.alpha, r.tolerance);
            }
            let csv = bench_csv(&rows);
            print!("{csv}");
            std::fs::create_dir_all(&out_dir).map_err(|e| CliError::io(&out_dir, e))?;
            let path = out_dir.join(format!("{}_bench.csv", stem(&file)));
            write_file(&path, &csv)?;
            eprintln!("wrote {}", path.display());
            Ok(0)
        }
        Command::Oracle { file, resolution, opts } => {
            let problem = load(&file, Some(&opts))?;
            let cfg = problem.solver.config()?;
            let result = solve(&problem.problem, &problem.start, &cfg, problem.solver.method)?;
            let adj = run_oracle(&problem, &result, resolution)?;
            println!("solver        D = {:.9} ({} iterations)", result.value, result.iterations);
            println!("grid          D = {:.9} (resolution {resolution})", adj.boundary.grid_value);
            println!("refined grid  D = {:.9}", adj.boundary.value);
            if let Some(s) = adj.seeded_value {
                println!("general position not verified; seeded D = {s:.9}");
            }
            println!("difference      {:.3e}", (adj.value - result.value).abs());
            std::fs::create_dir_all(&opts.out_dir).map_err(|e| CliError::io(&opts.out_dir, e))?;
            let path = opts.out_dir.join(format!("{}_oracle.json", stem(&file)));
            write_file(&path, &serde_json::to_string_pretty(&adj)?)?;
            println!("wrote {}", path.display());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
