use cellassign::cli::{cmd_gen, cmd_heatmap, cmd_solve, cmd_sweep, Overrides, RunConfig};
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Phone-to-station assignment: QUBO formulations, annealing, exact solver.
#[derive(Parser)]
#[command(name = "cellassign", version, about)]
struct Cli {
    /// JSON config file; flags below override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed for the whole run.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Number of phones.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Number of stations.
    #[arg(long, global = true)]
    m: Option<usize>,
    /// Phone distribution: uniform|biased.
    #[arg(long, global = true)]
    dist: Option<String>,
    /// Antenna family: isotropic|gaussian.
    #[arg(long, global = true)]
    beam: Option<String>,
    /// Formulation(s) to solve: naive|proposed|both.
    #[arg(long, global = true)]
    formulation: Option<String>,
    /// Solver: sa|exact|brute.
    #[arg(long, global = true)]
    solver: Option<String>,
    /// Annealing reads.
    #[arg(long, global = true)]
    reads: Option<usize>,
    /// Annealing sweeps per read.
    #[arg(long, global = true)]
    sweeps: Option<usize>,
    /// Fraction of phones clustered on the hot station (biased dist).
    #[arg(long = "hot-fraction", global = true)]
    hot_fraction: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a scenario file.
    Gen,
    /// Solve one scenario and report E, E*, and relative error.
    Solve {
        /// Load this scenario file instead of generating one.
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Exit 0 even when no feasible solution is found.
        #[arg(long)]
        allow_infeasible: bool,
    },
    /// Run the experiment suite (test patterns or an N sweep).
    Sweep,
    /// Render SINR and best-station rasters for a preset layout.
    Heatmap {
        /// Station geometry: caption|km.
        #[arg(long)]
        preset: Option<String>,
    },
}

fn main() -> ExitCode {
    // Honor the thread cap before rayon builds its global pool.
    if let Ok(threads) = std::env::var("CELLASSIGN_THREADS") {
        if let Ok(k) = threads.parse::<usize>() {
            if k >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build_global();
            }
        }
    }
    let cli = Cli::parse();
    let mut overrides = Overrides {
        seed: cli.seed,
        out: cli.out,
        n: cli.n,
        m: cli.m,
        dist: cli.dist,
        beam: cli.beam,
        formulation: cli.formulation,
        solver: cli.solver,
        reads: cli.reads,
        sweeps: cli.sweeps,
        hot_fraction: cli.hot_fraction,
        ..Overrides::default()
    };
    if let Command::Solve {
        scenario,
        allow_infeasible,
    } = &cli.command
    {
        overrides.scenario_path = scenario.clone();
        overrides.allow_infeasible = *allow_infeasible;
    }
    if let Command::Heatmap { preset } = &cli.command {
        overrides.preset = preset.clone();
    }

    let result = RunConfig::load(cli.config.as_deref())
        .and_then(|mut cfg| {
            cfg.apply_overrides(&overrides)?;
            Ok(cfg)
        })
        .and_then(|cfg| match cli.command {
            Command::Gen => cmd_gen(&cfg),
            Command::Solve { .. } => cmd_solve(&cfg),
            Command::Sweep => cmd_sweep(&cfg),
            Command::Heatmap { .. } => cmd_heatmap(&cfg),
        });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
