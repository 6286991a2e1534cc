use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hoskip::experiment::{
    calibrate_thresholds, error_line, reproduce, run_scenario, single_tier_config, write_outputs, Artifact, Budget,
    CalibrationRequest, CalibrationTarget, PolicySpec, ScenarioConfig, Threshold, HYBRID_SIZE,
};
use hoskip::policy::PolicyKind;

#[derive(Parser)]
#[command(name = "hoskip", version, about = "Handover-skipping Monte Carlo simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides run.master_seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides run.replications.
        #[arg(long)]
        replications: Option<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Regenerate a figure or table with pass/fail checks.
    Reproduce {
        /// fig2, fig3, fig4, fig6, table2 or table3
        #[arg(long)]
        id: String,
        /// A tenth of the replications, wider tolerances.
        #[arg(long)]
        fast: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Tune a threshold to a target spectral efficiency or skip fraction.
    Calibrate {
        /// la, sa or hb
        #[arg(long)]
        scheme: String,
        #[arg(long, conflicts_with = "target_skip")]
        target_r: Option<f64>,
        #[arg(long)]
        target_skip: Option<f64>,
        /// Calibrate the IC variant.
        #[arg(long)]
        ic: bool,
        /// Scenario file; the reference single-tier network when absent.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        replications: Option<usize>,
    },
}

fn run(cli: Cli) -> hoskip::Result<()> {
    match cli.command {
        Command::Simulate {
            config,
            seed,
            replications,
            out,
        } => {
            let mut cfg = ScenarioConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.run.master_seed = s;
            }
            if let Some(n) = replications {
                cfg.run.replications = n;
            }
            let result = run_scenario(&cfg)?;
            let dir = write_outputs(&result, &out, &Default::default())?;
            for s in &result.schemes {
                let r = s.spectral_efficiency();
                println!(
                    "{:<16} R = {:.4} ± {:.4}  H_l = {:.3}/km  skip = {:.3}",
                    s.label,
                    r.mean,
                    r.ci95(),
                    s.ho_per_km().mean,
                    s.skip_fraction()
                );
            }
            println!("wrote {}", dir.display());
        }
        Command::Reproduce { id, fast, seed, out } => {
            let artifact: Artifact = id.parse()?;
            let mut budget = if fast { Budget::fast() } else { Budget::full() };
            if let Some(s) = seed {
                budget.master_seed = s;
            }
            let checks = reproduce(artifact, &budget, &out)?;
            for c in &checks {
                println!("{c}");
            }
            println!("wrote {}", out.join(artifact.id()).display());
        }
        Command::Calibrate {
            scheme,
            target_r,
            target_skip,
            ic,
            config,
            seed,
            replications,
        } => {
            let mut cfg = match config {
                Some(p) => ScenarioConfig::load(&p)?,
                None => single_tier_config(&Budget::full()),
            };
            if let Some(s) = seed {
                cfg.run.master_seed = s;
            }
            if let Some(n) = replications {
                cfg.run.replications = n;
            }
            let kind: PolicyKind = scheme.parse()?;
            let mut spec = PolicySpec::new(kind).ic(ic);
            if kind == PolicyKind::Hybrid {
                spec = spec.size(Threshold::PerLambda(HYBRID_SIZE));
            }
            let target = match (target_r, target_skip) {
                (Some(r), _) => CalibrationTarget::SpectralEfficiency(r),
                (None, Some(f)) => CalibrationTarget::SkipFraction(f),
                (None, None) => {
                    return Err(hoskip::Error::Config {
                        field: "target_r".into(),
                        reason: "give --target-r or --target-skip".into(),
                    })
                }
            };
            let c = calibrate_thresholds(&cfg, &CalibrationRequest::new(spec, target))?;
            println!("{}", serde_json::to_string_pretty(&c)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_line(&e));
            ExitCode::from(2)
        }
    }
}
