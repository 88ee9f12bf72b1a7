use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pqlab_cli::config::ExperimentConfig;
use pqlab_cli::runner::{run, RunOptions};

#[derive(Parser)]
#[command(name = "pqlab", version, about = "Numerical laboratory for planar (p,q)-growth variational problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config (a TOML path or a bundled name).
    Run {
        config: String,
        /// Output directory for result tables.
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// Worker threads for instance-level parallelism.
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the grid resolution.
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Validate a config and print diagnostics.
    Validate { config: String },
    /// List the bundled experiment configs.
    ListExperiments,
}

fn load_config(spec: &str) -> anyhow::Result<ExperimentConfig> {
    let text = if std::path::Path::new(spec).exists() {
        std::fs::read_to_string(spec)?
    } else if let Some(bundled) = pqlab_cli::bundled(spec) {
        bundled.to_string()
    } else {
        anyhow::bail!("'{spec}' is neither a readable file nor a bundled experiment (see list-experiments)")
    };
    ExperimentConfig::parse(&text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out, workers, seed, resolution } => {
            let cfg = match load_config(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    return ExitCode::from(2);
                }
            };
            let opts = RunOptions { out_dir: out, workers, seed, resolution };
            match run(&cfg, &opts) {
                Ok(manifest) => {
                    println!(
                        "{}: {} instances, {:.1}s -> {}",
                        manifest.name,
                        manifest.instances.len(),
                        manifest.wall_seconds,
                        opts.out_dir.display()
                    );
                    for line in std::fs::read_to_string(opts.out_dir.join("summary.txt")).unwrap_or_default().lines() {
                        println!("  {line}");
                    }
                    if manifest.all_ok {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::FAILURE
                    }
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::from(2)
                }
            }
        }
        Command::Validate { config } => match load_config(&config) {
            Ok(cfg) => {
                let diags = cfg.validate();
                if diags.is_empty() {
                    println!("ok: {} ({})", cfg.experiment.name, cfg.experiment.kind.as_str());
                    ExitCode::SUCCESS
                } else {
                    for d in diags {
                        println!("{d}");
                    }
                    ExitCode::FAILURE
                }
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
        },
        Command::ListExperiments => {
            for (name, text) in pqlab_cli::BUNDLED {
                let kind = ExperimentConfig::parse(text)
                    .map(|c| c.experiment.kind.as_str().to_string())
                    .unwrap_or_else(|_| "invalid".into());
                println!("{name:<20} {kind}");
            }
            ExitCode::SUCCESS
        }
    }
}
