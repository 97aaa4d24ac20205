use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use l0peel::instance::{
    calibrate_big_m, default_m0, generate_instance, load_instance, save_instance, ExperimentConfig,
    LambdaRule,
};
use l0peel::oracle::brute_force_global;
use l0peel::relax::RelaxSettings;
use l0peel::sweep::{aggregate_path, run_sweep_to_csv, SweepSpec, SweepVariable};
use l0peel::{solve, Error, ProblemInstance, SolverConfig};

#[derive(Parser)]
#[command(
    name = "l0peel",
    version,
    about = "Exact l0-regularized least squares with box peeling"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a synthetic instance and write it to a file.
    Generate {
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Calibrate the Big-M box and solve exactly.
    Solve {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Compare the solver with and without peeling over a parameter grid.
    Sweep {
        #[command(flatten)]
        gen: GenArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// gamma, sigma, rho or k
        #[arg(long)]
        variable: String,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Add a wall-clock column (breaks byte-for-byte reproducibility).
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Brute-force the global optimum (small n only).
    Oracle {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        max_support: Option<usize>,
    },
}

#[derive(Args, Clone)]
struct GenArgs {
    #[arg(long, default_value_t = 30)]
    m: usize,
    #[arg(long, default_value_t = 40)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 0.1)]
    rho: f64,
    /// Target SNR in dB.
    #[arg(long, default_value_t = 15.0)]
    snr: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fixed λ. Overrides --lambda-ratio.
    #[arg(long)]
    lambda: Option<f64>,
    /// λ as a fraction of λ_max.
    #[arg(long)]
    lambda_ratio: Option<f64>,
}

impl GenArgs {
    fn config(&self, gamma: f64) -> ExperimentConfig {
        let base = ExperimentConfig::default();
        let lambda = match (self.lambda, self.lambda_ratio) {
            (Some(l), _) => LambdaRule::Fixed(l),
            (None, Some(r)) => LambdaRule::RatioOfMax(r),
            (None, None) => base.lambda,
        };
        ExperimentConfig {
            m: self.m,
            n: self.n,
            k: self.k,
            rho: self.rho,
            snr_db: self.snr,
            sigma: self.sigma,
            gamma,
            seed: self.seed,
            lambda,
            ..base
        }
    }
}

#[derive(Args)]
struct SourceArgs {
    /// Read the instance from a file instead of generating one.
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    gen: GenArgs,
}

impl SourceArgs {
    fn load(&self) -> l0peel::Result<ProblemInstance> {
        match &self.input {
            Some(p) => Ok(load_instance(p)?.0),
            None => Ok(generate_instance(&self.gen.config(1.0))?.0),
        }
    }
}

#[derive(Args)]
struct SolverArgs {
    /// Big-M slack factor, M = γ‖x*‖∞.
    #[arg(long, default_value_t = 3.0)]
    gamma: f64,
    /// Growth factor of the Big-M calibration.
    #[arg(long, default_value_t = 1.1)]
    eta: f64,
    #[arg(long, overrides_with = "no_peel")]
    peel: bool,
    #[arg(long)]
    no_peel: bool,
    /// Coordinate-descent stopping tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long)]
    max_nodes: Option<usize>,
    /// Seconds.
    #[arg(long)]
    time_limit: Option<f64>,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            peeling: !self.no_peel,
            relax: RelaxSettings {
                tol: self.tol,
                ..RelaxSettings::default()
            },
            max_nodes: self.max_nodes,
            time_limit: self.time_limit.map(Duration::from_secs_f64),
            ..SolverConfig::default()
        }
    }
}

fn run(cli: Cli) -> l0peel::Result<()> {
    match cli.command {
        Command::Generate { gen, out } => {
            let (inst, truth) = generate_instance(&gen.config(1.0))?;
            save_instance(&out, &inst, Some(&truth))?;
            println!(
                "wrote {} (m = {}, n = {}, lambda = {:.6e}, support = {:?})",
                out.display(),
                inst.m(),
                inst.n(),
                inst.lambda(),
                truth.support
            );
        }
        Command::Solve { source, solver } => {
            let inst = source.load()?;
            let config = solver.config();
            let calib =
                calibrate_big_m(&inst, solver.gamma, solver.eta, default_m0(&inst), &config)?;
            let report = solve(&inst, &calib.bounds(inst.n()), &config)?;
            println!("big_m        {:.6e}", calib.big_m);
            println!("status       {}", report.status.as_str());
            println!("p_star       {:.12e}", report.p_star);
            println!("support      {:?}", report.support());
            println!("nodes        {}", report.node_count);
            println!("peels        {}", report.peel_fire_count);
            println!("sweeps       {}", report.relax_sweeps);
            println!("wall_time_s  {:.3}", report.wall_time.as_secs_f64());
        }
        Command::Sweep {
            gen,
            solver,
            variable,
            values,
            trials,
            timing,
            out,
        } => {
            let variable: SweepVariable = variable.parse()?;
            let mut base = gen.config(solver.gamma);
            base.solver = solver.config();
            let mut spec = SweepSpec::new(base, variable, values, trials);
            spec.eta = solver.eta;
            spec.timing = timing;
            let agg = run_sweep_to_csv(&spec, &out)?;
            for a in &agg {
                let line: Vec<String> = a
                    .variants
                    .iter()
                    .map(|v| {
                        format!(
                            "{} {:.1} nodes (ratio {:.3})",
                            v.name, v.mean_nodes, v.node_ratio
                        )
                    })
                    .collect();
                println!("{} = {:<8} {}", variable.as_str(), a.value, line.join("  "));
            }
            println!(
                "wrote {} and {}",
                out.display(),
                aggregate_path(&out).display()
            );
        }
        Command::Oracle {
            source,
            max_support,
        } => {
            let inst = source.load()?;
            let res = brute_force_global(&inst, max_support.unwrap_or(inst.n()))?;
            println!("p_star       {:.12e}", res.value);
            println!("support      {:?}", res.support);
            println!("enumerated   {}", res.enumerated_count);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::SafetyViolation { .. }) => {
            eprintln!("SAFETY VIOLATION: {e}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
