use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use leo_outage::linkbudget::{feasible_range, leo_iot_grid, LinkBudget};
use leo_outage_cli::config::{resolve, ConfigFile, Overrides};
use leo_outage_cli::experiment::Preset;
use leo_outage_cli::{output, run, validate};

#[derive(Parser)]
#[command(
    name = "leo-outage",
    version,
    about = "Outage probability of LEO-satellite IoT uplinks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a preset or configured sweep.
    Run {
        #[arg(long)]
        preset: Option<Preset>,
        /// TOML experiment file.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<u64>,
        /// Defaults to stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Skip the Monte Carlo columns.
        #[arg(long)]
        no_mc: bool,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Print the feasible SNR range of the reference uplink.
    Linkbudget {
        #[arg(long, default_value_t = 3.0)]
        extra_losses: f64,
    },
    /// Run the oracle cross-checks.
    Validate {
        #[arg(long, default_value_t = 200_000)]
        draws: usize,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn run_experiment(cmd: Command) -> Result<()> {
    let Command::Run {
        preset,
        config,
        seed,
        trials,
        csv,
        svg,
        no_mc,
        threads,
    } = cmd
    else {
        unreachable!()
    };
    let file = config
        .as_deref()
        .map(ConfigFile::load)
        .transpose()?
        .unwrap_or_default();
    let spec = resolve(
        &file,
        &Overrides {
            preset,
            seed,
            trials,
            csv,
            svg,
            no_mc,
        },
    )?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()?;
    let table = pool.install(|| run(&spec))?;
    match &spec.csv {
        Some(path) => output::emit_csv(&table, path)?,
        None => std::io::stdout().write_all(output::render_csv(&table).as_bytes())?,
    }
    if let Some(path) = &spec.svg {
        output::emit_svg(&table, path)?;
    }
    Ok(())
}

fn linkbudget(extra_losses: f64) -> Result<()> {
    let grid: Vec<LinkBudget> = leo_iot_grid()
        .into_iter()
        .map(|b| LinkBudget {
            extra_losses_db: extra_losses,
            ..b
        })
        .collect();
    let (lo, hi) = feasible_range(&grid)?;
    let b = grid[0];
    println!(
        "altitude_km={} elevation_deg={} frequency_hz={:e} eirp_dbm={}",
        b.altitude_km, b.elevation_deg, b.frequency_hz, b.eirp_dbm
    );
    println!(
        "slant_range_km={:.2} fspl_db={:.2} extra_losses_db={}",
        b.slant_range_km(),
        b.fspl_db(),
        extra_losses
    );
    println!("feasible_snr_db_min={lo:.2}");
    println!("feasible_snr_db_max={hi:.2}");
    Ok(())
}

fn validate_all(draws: usize, trials: u64, seed: u64) -> Result<()> {
    let checks = validate::run_checks(draws, trials, seed)?;
    let mut failed = 0;
    for c in &checks {
        println!(
            "{} {} ({})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
        failed += usize::from(!c.passed);
    }
    if failed > 0 {
        bail!("{failed} of {} checks failed", checks.len());
    }
    Ok(())
}

fn report(err: &anyhow::Error, kind: &str) {
    let line = serde_json::json!({
        "error": kind,
        "message": err.to_string(),
        "causes": err.chain().skip(1).map(|c| c.to_string()).collect::<Vec<_>>(),
    });
    eprintln!("{line}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let msg = e.render().to_string();
            report(&anyhow::anyhow!(msg.trim().to_owned()), "usage");
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        cmd @ Command::Run { .. } => run_experiment(cmd).context("run failed"),
        Command::Linkbudget { extra_losses } => linkbudget(extra_losses),
        Command::Validate {
            draws,
            trials,
            seed,
        } => validate_all(draws, trials, seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(&e, "runtime");
            ExitCode::FAILURE
        }
    }
}
