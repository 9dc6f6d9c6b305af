//! Command-line front end for the `dnls` binary.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::output::{create, write_json, write_profile_csv, write_trajectory_csv};
use crate::scenario::{exit_code, run_scenario, Command, Outcome};

#[derive(Debug, Parser)]
#[command(name = "dnls", version, about = "Damped, driven DNLS lattice simulator and attractor checks")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Integrate and write the trajectory.
    Simulate(Common),
    /// Energy inequality and a-priori norm bound along a trajectory.
    VerifyBounds(Common),
    /// Entry into and confinement to the absorbing ball.
    Absorbing(Common),
    /// Uniform tail decay beyond the certified cutoff.
    Tail(Common),
    /// Decay rate of the distance between two orbits.
    Contraction(Common),
    /// Dependence of solutions on the driving.
    Continuity(Common),
    /// Correlation dimension of a Poincaré section of the attractor.
    Dimension(Common),
    /// Periodic breather under strong damping.
    Breather(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario JSON file.
    #[arg(long)]
    config: PathBuf,
    /// CSV output (trajectory, or site profile for breather).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON summary output.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Worker threads; all cores when absent.
    #[arg(long, env = "DNLS_THREADS")]
    threads: Option<usize>,
    /// Overrides scenario.seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, short)]
    verbose: bool,
}

impl Sub {
    fn split(self) -> (Command, Common) {
        match self {
            Sub::Simulate(c) => (Command::Simulate, c),
            Sub::VerifyBounds(c) => (Command::VerifyBounds, c),
            Sub::Absorbing(c) => (Command::Absorbing, c),
            Sub::Tail(c) => (Command::Tail, c),
            Sub::Contraction(c) => (Command::Contraction, c),
            Sub::Continuity(c) => (Command::Continuity, c),
            Sub::Dimension(c) => (Command::Dimension, c),
            Sub::Breather(c) => (Command::Breather, c),
        }
    }
}

fn write_outputs(outcome: &Outcome, args: &Common) -> Result<()> {
    if let Some(path) = &args.out {
        if let Some(traj) = &outcome.trajectory {
            write_trajectory_csv(traj, create(path)?)?;
        } else if let Some(state) = &outcome.profile {
            write_profile_csv(state, create(path)?)?;
        } else {
            log::warn!("{} produces no CSV output; --out ignored", outcome.command);
        }
    }
    if let Some(path) = &args.json {
        write_json(&outcome.summary, path)?;
    }
    Ok(())
}

fn execute(command: Command, args: &Common) -> Result<Outcome> {
    let mut cfg = ScenarioConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg = cfg.with_seed(seed);
    }
    let outcome = run_scenario(command, &cfg)?;
    write_outputs(&outcome, args)?;
    Ok(outcome)
}

/// Parses `argv` (including the program name), runs the scenario and returns
/// the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (command, args) = cli.command.split();
    let level = if args.verbose { "debug" } else { "warn" };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    if let Some(n) = args.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return 2;
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::debug!("thread pool already configured: {e}");
        }
    }
    let result = execute(command, &args);
    match &result {
        Ok(o) => {
            println!("{}: {}", command, if o.pass { "PASS" } else { "FAIL" });
            if args.verbose {
                println!("{}", serde_json::to_string_pretty(&o.summary).unwrap_or_default());
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    exit_code(&result)
}
