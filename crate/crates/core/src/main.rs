use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use lsfem::cli::{run, FileConfig, RunConfig, RunReport, NORM_NAMES};

/// Convergence studies for least-squares finite elements on −A:D²u = f.
#[derive(Debug, Parser)]
#[command(name = "lsfem", version)]
struct Args {
    /// Benchmark name, e.g. smooth-a1, singular-r74, lshape-a5
    #[arg(long)]
    benchmark: Option<String>,
    /// weighted or l2
    #[arg(long)]
    formulation: Option<String>,
    /// Polynomial degree of u (1 for l2, 2 or 3 for weighted)
    #[arg(long)]
    degree: Option<usize>,
    /// uniform or adaptive
    #[arg(long)]
    mode: Option<String>,
    /// Number of levels (meshes) to solve
    #[arg(long)]
    levels: Option<usize>,
    /// Dörfler bulk parameter
    #[arg(long)]
    theta: Option<f64>,
    /// Relative residual tolerance of the iterative solver
    #[arg(long)]
    tol: Option<f64>,
    /// auto, direct or cg
    #[arg(long)]
    solver: Option<String>,
    /// Adaptive runs stop before a mesh with more free unknowns than this
    #[arg(long)]
    max_dofs: Option<usize>,
    /// Number of levels in each fitted rate
    #[arg(long)]
    rate_window: Option<usize>,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[arg(long)]
    out_svg: Option<PathBuf>,
    /// TOML file with the same keys as the long flags; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Args {
    fn overrides(&self) -> FileConfig {
        FileConfig {
            benchmark: self.benchmark.clone(),
            formulation: self.formulation.clone(),
            degree: self.degree,
            mode: self.mode.clone(),
            levels: self.levels,
            theta: self.theta,
            tol: self.tol,
            max_dofs: self.max_dofs,
            solver: self.solver.clone(),
            rate_window: self.rate_window,
            out_csv: self.out_csv.clone(),
            out_svg: self.out_svg.clone(),
            seed: None,
        }
    }
}

fn build_config(args: &Args) -> lsfem::Result<RunConfig> {
    let mut config = RunConfig::default();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| lsfem::Error::Config(format!("{}: {e}", path.display())))?;
        FileConfig::parse(&text)?.apply(&mut config)?;
    }
    args.overrides().apply(&mut config)?;
    config.validate()?;
    Ok(config)
}

fn print_table(report: &RunReport) {
    let cell = |v: Option<f64>| v.map_or_else(|| format!("{:>10}", "-"), |v| format!("{v:>10.3e}"));
    let rate = |v: Option<f64>| v.map_or_else(|| format!("{:>6}", ""), |v| format!("{v:>6.2}"));
    print!("{:>5} {:>8} {:>8} {:>10}", "level", "dofs", "nodes", "eta");
    for n in NORM_NAMES {
        print!(" {n:>10} {:>6}", "rate");
    }
    println!();
    for r in &report.rows {
        let e = &r.errors;
        print!("{:>5} {:>8} {:>8} {}", e.level, e.dofs, e.nodes, cell(Some(e.eta)));
        for (v, q) in r.norms().into_iter().zip(r.rates) {
            print!(" {} {}", cell(v), rate(q));
        }
        println!();
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = match build_config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&config) {
        Ok(report) => {
            print_table(&report);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
