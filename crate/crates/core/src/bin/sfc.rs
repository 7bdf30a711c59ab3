//! Command-line front end: simulate a day, compare against the baselines,
//! sweep panel counts, or verify the closed forms against the oracle.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sfc_core::baselines::{baseline_day, BaselineKind};
use sfc_core::io::{write_summary, write_sweep_csv, write_trace_csv};
use sfc_core::oracle::verify_closed_forms;
use sfc_core::scenario::{sweep_panels, ScenarioConfig, RNG_ALGORITHM};
use sfc_core::scheduler::run_day;
use sfc_core::{load_config, Result};

#[derive(Parser)]
#[command(
    name = "sfc",
    about = "Shared-facility solar dispatch simulator",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the dispatch scheme over one day and write the slot trace as CSV.
    Simulate {
        /// Scenario config file (TOML); defaults to the built-in scenario.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the config's RNG seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output trace path.
        #[arg(long, default_value = "trace.csv")]
        out: PathBuf,
    },
    /// Run the scheme and all baselines, write a summary CSV.
    Compare {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "summary.csv")]
        out: PathBuf,
    },
    /// Sweep panel counts (and optionally scenarios and coefficients) and
    /// write savings versus the grid-tie baseline as CSV.
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Panel counts: `start:end:step` (inclusive) or a comma list.
        #[arg(long, default_value = "65:115:5")]
        panels: String,
        /// Household-demand multipliers, e.g. `1,2`.
        #[arg(long, default_value = "1,2")]
        scenarios: String,
        /// Initial virtual-cost coefficients, e.g. `50,150,250,350`;
        /// defaults to the config's value.
        #[arg(long)]
        a_ini: Option<String>,
        #[arg(long, default_value = "sweep.csv")]
        out: PathBuf,
    },
    /// Check the clamped closed-form decisions against a brute-force grid
    /// search over randomized instances of every case.
    Verify {
        /// Instances per case.
        #[arg(long, default_value_t = 1000)]
        instances: usize,
        /// Grid resolution in kWh.
        #[arg(long, default_value_t = 1e-3)]
        resolution: f64,
        /// Maximum allowed cost gap in cents.
        #[arg(long, default_value_t = 1e-3)]
        tolerance: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn parse_panels(spec: &str) -> Result<Vec<u32>> {
    let bad = |msg: String| sfc_core::Error::InvalidInput(msg);
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad(format!("panels range must be start:end:step, got `{spec}`")));
        }
        let start: u32 = parts[0].parse().map_err(|_| bad(format!("bad panels start `{}`", parts[0])))?;
        let end: u32 = parts[1].parse().map_err(|_| bad(format!("bad panels end `{}`", parts[1])))?;
        let step: u32 = parts[2].parse().map_err(|_| bad(format!("bad panels step `{}`", parts[2])))?;
        if step == 0 || end < start {
            return Err(bad(format!("empty panels range `{spec}`")));
        }
        Ok((start..=end).step_by(step as usize).collect())
    } else {
        spec.split(',')
            .map(|s| s.trim().parse().map_err(|_| bad(format!("bad panel count `{s}`"))))
            .collect()
    }
}

fn parse_list<T: std::str::FromStr>(spec: &str, what: &str) -> Result<Vec<T>> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| sfc_core::Error::InvalidInput(format!("bad {what} `{s}`")))
        })
        .collect()
}

fn load_scenario(config: Option<&PathBuf>, seed: Option<u64>) -> Result<ScenarioConfig> {
    let mut cfg = match config {
        Some(path) => load_config(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = seed {
        cfg.rng_seed = seed;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Simulate { config, seed, out } => {
            let cfg = load_scenario(config.as_ref(), seed)?;
            let resolved = cfg.resolve()?;
            let trace = run_day(&resolved)?;
            write_trace_csv(&trace, &out)?;
            println!(
                "simulated {} slots (rng={RNG_ALGORITHM} seed={}): total {:.2} cents, \
                 average {:.2} cents/slot -> {}",
                trace.records.len(),
                resolved.rng_seed,
                trace.total_cost_cents,
                trace.average_cost_cents,
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare { config, seed, out } => {
            let cfg = load_scenario(config.as_ref(), seed)?;
            let resolved = cfg.resolve()?;
            let trace = run_day(&resolved)?;
            let mut baselines = Vec::new();
            for kind in BaselineKind::ALL {
                let total =
                    baseline_day(kind, &resolved.slots, &resolved.array, resolved.slot_hours)?
                        .total_cost_cents;
                baselines.push((kind, total));
            }
            write_summary(&out, &trace, &baselines, RNG_ALGORITHM, resolved.rng_seed)?;
            let cash = trace.cash_cost_cents();
            println!(
                "proposed: {cash:.2} cents cash ({:.2} with the stored-energy estimate)",
                trace.total_cost_cents
            );
            for (kind, total) in &baselines {
                let pct = sfc_core::percent_savings(*total, cash)?;
                println!("{kind}: {total:.2} cents (cash savings {pct:.2}%)");
            }
            println!("summary -> {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep {
            config,
            seed,
            panels,
            scenarios,
            a_ini,
            out,
        } => {
            let cfg = load_scenario(config.as_ref(), seed)?;
            let panel_counts = parse_panels(&panels)?;
            let scenario_multipliers: Vec<u32> = parse_list(&scenarios, "scenario multiplier")?;
            let a_initials = match a_ini {
                Some(spec) => parse_list(&spec, "a_ini")?,
                None => vec![cfg.vc.a_initial()],
            };
            let points = sweep_panels(&cfg, &panel_counts, &scenario_multipliers, &a_initials)?;
            write_sweep_csv(&out, &points)?;
            println!(
                "swept {} points ({} panel counts x {} scenarios x {} coefficients, \
                 rng={RNG_ALGORITHM} seed={}) -> {}",
                points.len(),
                panel_counts.len(),
                scenario_multipliers.len(),
                a_initials.len(),
                cfg.rng_seed,
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            instances,
            resolution,
            tolerance,
            seed,
        } => {
            let report = verify_closed_forms(instances, resolution, tolerance, seed)?;
            for case in &report.per_case {
                println!(
                    "{}: {} instances, {} failures, max cost gap {:.3e} cents",
                    case.case, case.instances, case.failures, case.max_cost_gap_cents
                );
            }
            if report.passed() {
                println!(
                    "verify: PASS (resolution {} kWh, tolerance {} cents, seed {seed})",
                    report.resolution_kwh, report.tolerance_cents
                );
                Ok(ExitCode::SUCCESS)
            } else {
                println!(
                    "verify: FAIL ({} mismatches beyond {} cents)",
                    report.failures(),
                    report.tolerance_cents
                );
                Ok(ExitCode::from(1))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
