use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use roughflux::harness::{
    format_exponent_table, kind_defaults, load_summary, preset, run, schema_text, threads_env_doc, ExperimentConfig,
    ExperimentKind,
};
use roughflux::Error;

#[derive(Parser)]
#[command(name = "roughflux", version, about = "Rough-flux conservation law experiments")]
struct Cli {
    /// Override the master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override any config key, e.g. `--set path.n_steps=2048` (repeatable).
    #[arg(long = "set", global = true, value_name = "SECTION.KEY=VALUE")]
    set: Vec<String>,
    /// Print the thread-count environment variable documentation and exit.
    #[arg(long)]
    threads_env_doc: bool,
    /// Print the config schema and exit.
    #[arg(long)]
    schema: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Path ensemble with Hölder estimates.
    Paths,
    /// (rho, gamma) scans and interpolation checks.
    Irregularity,
    /// Scaling-index estimates.
    Iota,
    /// Solver run with the kinetic measure.
    Solve,
    /// Regularity sweep over Hurst parameters.
    Regularity,
    /// Predicted-exponent table.
    Exponents,
    /// Weak-form residual with and without the kinetic measure.
    Weakform,
    /// Run an INI config file.
    Run { config: PathBuf },
    /// Print a named preset as INI, or run it with `--run`.
    Preset {
        name: String,
        #[arg(long)]
        run: bool,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NegativeEntropyProduction { .. } | Error::NonFinite { .. } => 2,
        _ => 1,
    }
}

fn apply_overrides(mut cfg: ExperimentConfig, cli: &Cli) -> roughflux::Result<ExperimentConfig> {
    for s in &cli.set {
        cfg = cfg.with_override(s)?;
    }
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cfg: &ExperimentConfig) -> roughflux::Result<()> {
    let manifest = run(cfg)?;
    let dir = &cfg.output_dir;
    if cfg.kind == ExperimentKind::Exponents {
        let rows = roughflux::harness::exponent_table(&cfg.estimator.hurst_table, cfg.estimator.nu)?;
        print!("{}", format_exponent_table(&rows));
    } else {
        let summary = load_summary(dir)?;
        println!("{}", serde_json::to_string_pretty(&summary).expect("json"));
    }
    eprintln!(
        "{} files in {} ({:.1} s, {} threads)",
        manifest.files.len(),
        dir.display(),
        manifest.wall_clock_seconds,
        manifest.threads
    );
    Ok(())
}

fn main_inner(cli: &Cli) -> roughflux::Result<()> {
    if cli.threads_env_doc {
        print!("{}", threads_env_doc());
        return Ok(());
    }
    if cli.schema {
        print!("{}", schema_text());
        return Ok(());
    }
    let kind = |k| apply_overrides(kind_defaults(k), cli);
    let cfg = match &cli.command {
        None => {
            eprintln!("no subcommand; see --help");
            return Ok(());
        }
        Some(Command::Paths) => kind(ExperimentKind::Paths)?,
        Some(Command::Irregularity) => kind(ExperimentKind::Irregularity)?,
        Some(Command::Iota) => kind(ExperimentKind::Iota)?,
        Some(Command::Solve) => kind(ExperimentKind::Solve)?,
        Some(Command::Regularity) => kind(ExperimentKind::RegularitySweep)?,
        Some(Command::Exponents) => kind(ExperimentKind::Exponents)?,
        Some(Command::Weakform) => kind(ExperimentKind::Weakform)?,
        Some(Command::Run { config }) => apply_overrides(ExperimentConfig::from_file(config)?, cli)?,
        Some(Command::Preset { name, run }) => {
            let cfg = apply_overrides(preset(name)?, cli)?;
            if !run {
                print!("{}", cfg.to_ini_string());
                return Ok(());
            }
            cfg
        }
    };
    execute(&cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
