use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use cantorchain::config::family_listing;
use cantorchain::report::{persist, write_atomic, TIMING_FILE};
use cantorchain::{analyze, verify, CliError, ExperimentConfig};
use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "cantorchain", version)]
#[command(about = "Normal cores, discriminant towers and stable/wild verdicts for group chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment and write report.json
    Analyze {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the tables as CSV.
        #[arg(long)]
        csv: bool,
    },
    /// Check closed forms against brute-force oracles
    Verify {
        #[arg(long)]
        config: PathBuf,
    },
    /// List the registered families and their parameter blocks
    Families,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err
                .downcast_ref::<CliError>()
                .map(CliError::exit_code)
                .unwrap_or(1);
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Analyze { config, out, csv } => {
            let cfg = ExperimentConfig::load(&config)?;
            let dir = out
                .or_else(|| cfg.output_dir.clone())
                .unwrap_or_else(|| PathBuf::from("."));
            let start = Instant::now();
            let report = analyze(&cfg)?;
            let elapsed = start.elapsed();
            let written = persist(&report, &dir, csv)?;
            let timing = serde_json::json!({ "analyze_ms": elapsed.as_secs_f64() * 1e3 });
            write_atomic(&dir.join(TIMING_FILE), &format!("{timing}\n"))
                .context("writing timing sidecar")?;
            println!("family:   {} (N={})", report.family, report.horizon);
            println!("method:   {}", report.method);
            println!(
                "|D_m,N|:  [{}]",
                report.tower.discriminant_orders.join(", ")
            );
            println!("psi ker:  [{}]", report.tower.psi_kernel_orders.join(", "));
            println!("verdict:  {}", report.verdict);
            if let Some(cert) = &report.verdict.certificate {
                println!("cert:     {cert}");
            }
            println!("seed:     {}", cfg.seed);
            println!("elapsed:  {:.1} ms", elapsed.as_secs_f64() * 1e3);
            for path in written {
                println!("wrote     {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let checks = verify(&cfg)?;
            let mut failed = false;
            for c in &checks {
                match &c.counterexample {
                    None => println!("PASS  {} ({} cases)", c.name, c.cases),
                    Some(x) => {
                        failed = true;
                        println!(
                            "FAIL  {} ({} cases): first counterexample {x}",
                            c.name, c.cases
                        );
                    }
                }
            }
            if failed {
                return Err(CliError::OracleMismatch("see FAIL lines above".into()).into());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Families => {
            for (id, block, about) in family_listing() {
                println!("{id:<9} {about}");
                println!("          {block}");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
