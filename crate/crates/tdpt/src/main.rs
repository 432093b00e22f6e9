use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tdpt::{pipeline, resolve_config, CliError, Runner};

#[derive(Parser)]
#[command(
    name = "tdpt",
    version,
    about = "Time-domain polarization tensor experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize multistatic response data.
    Simulate(Common),
    /// Recover frequency- and time-domain tensors from msr.json.
    Tdpt(Common),
    /// Estimate size, contrast, equivalent ellipse and (optionally) the fine shape from tdpt.json.
    Reconstruct(Common),
    /// Run all three stages.
    Pipeline(Common),
}

#[derive(Args)]
struct Common {
    /// JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the configured noise seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; all cores by default.
    #[arg(long)]
    threads: Option<usize>,
    /// Built-in preset (3, 4 or 5).
    #[arg(long)]
    paper_figure: Option<u32>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (stage, c) = match &cli.command {
        Command::Simulate(c) => ("simulate", c),
        Command::Tdpt(c) => ("tdpt", c),
        Command::Reconstruct(c) => ("reconstruct", c),
        Command::Pipeline(c) => ("pipeline", c),
    };
    let cfg = resolve_config(c.config.as_deref(), c.paper_figure, c.seed)?;
    let runner = Runner::new(c.threads)?;
    let dir = cfg.output_dir.display();
    match stage {
        "simulate" => {
            let d = pipeline::simulate(&cfg, &runner)?;
            println!(
                "simulate: {} frequencies written to {dir}",
                d.frequencies.len()
            );
        }
        "tdpt" => {
            let t = pipeline::tdpt(&cfg, &runner)?;
            println!(
                "tdpt: order {} on {} times written to {dir}",
                t.order,
                t.times.len()
            );
        }
        _ => {
            let r = if stage == "pipeline" {
                pipeline::pipeline(&cfg, &runner)?
            } else {
                pipeline::reconstruct(&cfg)?
            };
            println!(
                "{stage}: volume {:.6e} ({:?}), contrast {:.4} ({:?}), ellipse a={:.4e} b={:.4e} theta={:.4}",
                r.volume.value, r.volume.source, r.contrast.value, r.contrast.source, r.ellipse.a, r.ellipse.b, r.ellipse.theta
            );
            if let Some(ratio) = r.distances.ratio {
                println!("{stage}: boundary distance ratio {ratio:.4}");
            }
            println!("{stage}: outputs in {dir}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tdpt: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
