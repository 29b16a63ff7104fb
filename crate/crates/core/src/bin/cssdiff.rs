//! Command-line simulator for the diffusion of cooperative spectrum
//! sensing: equilibrium solves, mean-field dynamics, agent-based runs,
//! parameter sweeps, and scenario comparisons.

use clap::{Args, Parser, Subcommand};
use css_diffusion::cli::{
    cmd_abm, cmd_compare, cmd_dynamics, cmd_eq, cmd_sweep, CmdOutput, RunConfig, EXIT_INVARIANT,
    EXIT_USAGE,
};
use css_diffusion::error::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "cssdiff",
    version,
    about = "Cooperative spectrum sensing diffusion simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Config file of `key = value` lines ('#' comments).
    #[arg(long)]
    config: Option<PathBuf>,

    /// Base RNG seed for seeded commands.
    #[arg(long)]
    seed: Option<u64>,

    /// Output path for CSV artifacts.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Print the resolved config in canonical form and exit.
    #[arg(long)]
    dump_config: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the mean-field equilibrium and cross-check uniqueness.
    Eq {
        #[command(flatten)]
        common: Common,
    },
    /// Emit the mean-field trajectory (and optionally the ABM trajectory).
    Dynamics {
        #[command(flatten)]
        common: Common,
    },
    /// Run the seeded agent-based simulation.
    Abm {
        #[command(flatten)]
        common: Common,
    },
    /// Sweep one parameter and tabulate equilibria.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Compare how conducive two scenarios are to diffusion.
    Compare {
        #[command(flatten)]
        common: Common,

        /// Config file of the second scenario.
        #[arg(long)]
        config_b: PathBuf,

        /// Grid resolution for the pointwise comparison.
        #[arg(long, default_value_t = 1000)]
        grid: u32,
    },
}

fn load(common: &Common) -> Result<RunConfig, Error> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.out = Some(out.clone());
    }
    Ok(cfg)
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Io(_) => EXIT_USAGE,
        _ => EXIT_INVARIANT,
    }
}

fn run() -> Result<CmdOutput, Error> {
    let cli = Cli::try_parse().map_err(|e| {
        // clap renders its own message; route through the usage exit code.
        let _ = e.print();
        Error::Config(String::new())
    })?;

    match &cli.command {
        Command::Eq { common }
        | Command::Dynamics { common }
        | Command::Abm { common }
        | Command::Sweep { common } => {
            let cfg = load(common)?;
            if common.dump_config {
                return Ok(CmdOutput {
                    stdout: cfg.dump(),
                    exit_code: 0,
                });
            }
            match &cli.command {
                Command::Eq { .. } => cmd_eq(&cfg),
                Command::Dynamics { .. } => cmd_dynamics(&cfg),
                Command::Abm { .. } => cmd_abm(&cfg),
                Command::Sweep { .. } => cmd_sweep(&cfg),
                Command::Compare { .. } => unreachable!(),
            }
        }
        Command::Compare {
            common,
            config_b,
            grid,
        } => {
            let cfg_a = load(common)?;
            if common.dump_config {
                return Ok(CmdOutput {
                    stdout: cfg_a.dump(),
                    exit_code: 0,
                });
            }
            let cfg_b = RunConfig::from_file(config_b)?;
            cmd_compare(&cfg_a, &cfg_b, *grid)
        }
    }
}

fn main() -> ExitCode {
    // Optional cap on worker threads; 0 or unset means automatic.
    if let Ok(v) = std::env::var("CSS_DIFFUSION_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
    match run() {
        Ok(out) => {
            print!("{}", out.stdout);
            ExitCode::from(out.exit_code as u8)
        }
        Err(e) => {
            let msg = e.to_string();
            if !msg.is_empty() && msg != "config error: " {
                eprintln!("error: {msg}");
            }
            ExitCode::from(exit_code_for(&e) as u8)
        }
    }
}
