use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cpass::config::{Architecture, Deployment, Side, SystemConfig};
use cpass::error::{Error, Result};
use cpass::experiment::{run_and_emit, OutputFormat, RunManifest, SweepRequest};
use cpass::tuner::{align_end_fed, align_side};

#[derive(Parser, Debug)]
#[command(name = "cpass", version, about = "Center-fed pinching-antenna system simulator")]
struct Cli {
    /// TOML config file; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for datasets and manifests.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Dataset format: csv or json.
    #[arg(long, global = true, default_value = "csv")]
    format: String,
    /// Worker threads for sweeps (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every figure sweep and the comparison table.
    Run,
    /// Run a single sweep.
    #[command(subcommand)]
    Sweep(SweepCommand),
    /// Architecture comparison table.
    Table1,
    /// Solve the antenna offsets for one side and report residuals.
    Tune {
        #[arg(long, value_enum)]
        side: SideArg,
        #[arg(long)]
        print_offsets: bool,
    },
    /// Re-run the sweep recorded in a manifest.
    Replay {
        #[arg(long)]
        manifest: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum SweepCommand {
    /// Capacity against transmit power.
    Power(PowerArgs),
    /// Array and multiplexing gains against antenna count.
    Gains {
        #[arg(long, default_value_t = 1)]
        n_min: usize,
        #[arg(long, default_value_t = 2000)]
        n_max: usize,
        #[arg(long, value_enum, default_value_t = SchemeArg::Tuned)]
        scheme: SchemeArg,
    },
    /// Capacity against antenna count for both architectures.
    Capacity {
        #[arg(long, default_value_t = 100)]
        n_max: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 30.0], allow_negative_numbers = true)]
        p: Vec<f64>,
    },
}

#[derive(Args, Debug)]
struct PowerArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    p_min: f64,
    #[arg(long, default_value_t = 100.0, allow_negative_numbers = true)]
    p_max: f64,
    #[arg(long, default_value_t = 5.0)]
    p_step: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 4, 8, 16])]
    n: Vec<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SideArg {
    F,
    B,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SchemeArg {
    Uniform,
    Tuned,
}

fn load(path: Option<&Path>) -> Result<SystemConfig<f64>> {
    match path {
        Some(p) => cpass::config::load_config(p),
        None => Ok(SystemConfig::default()),
    }
}

fn emit_all(cfg: &SystemConfig<f64>, requests: &[SweepRequest], format: OutputFormat, out: &Path) -> Result<()> {
    for req in requests {
        let (paths, manifest) = run_and_emit(cfg, req, format, out)?;
        println!(
            "{}: {} rows -> {}",
            manifest.sweep_kind.as_str(),
            manifest.row_count,
            paths[0].display()
        );
    }
    Ok(())
}

fn tune(cfg: &SystemConfig<f64>, side: Side, print_offsets: bool) -> Result<()> {
    let result = match cfg.architecture {
        Architecture::Center => align_side(cfg, side, side, cfg.delta_max)?,
        Architecture::End => {
            let (f, b) = align_end_fed(cfg, cfg.delta_max)?;
            if side == Side::Forward {
                f
            } else {
                b
            }
        }
    };
    if print_offsets {
        println!("index,offset_m,residual_rad");
        for (i, (d, r)) in result.offsets.iter().zip(&result.residuals).enumerate() {
            println!("{},{:.14e},{:.14e}", i + 1, d, r);
        }
    }
    let max_offset = result.offsets.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    println!(
        "side={} n={} max_abs_offset_m={:.6e} max_abs_residual_rad={:.3e}",
        if side == Side::Forward { "f" } else { "b" },
        result.offsets.len(),
        max_offset,
        result.max_abs_residual()
    );
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    let format: OutputFormat = cli.format.parse()?;
    let cfg = load(cli.config.as_deref())?;
    match cli.command {
        Command::Run => emit_all(&cfg, &SweepRequest::figure_defaults(), format, &cli.out),
        Command::Sweep(SweepCommand::Power(a)) => {
            let req = SweepRequest::Power {
                p_min: a.p_min,
                p_max: a.p_max,
                p_step: a.p_step,
                n_values: a.n,
            };
            emit_all(&cfg, &[req], format, &cli.out)
        }
        Command::Sweep(SweepCommand::Gains { n_min, n_max, scheme }) => {
            let scheme = match scheme {
                SchemeArg::Uniform => Deployment::Uniform,
                SchemeArg::Tuned => Deployment::Tuned,
            };
            emit_all(&cfg, &[SweepRequest::Gains { n_min, n_max, scheme }], format, &cli.out)
        }
        Command::Sweep(SweepCommand::Capacity { n_max, p }) => {
            if n_max == 0 {
                return Err(Error::invalid("n_max", "must be >= 1"));
            }
            let req = SweepRequest::Capacity {
                n_values: (1..=n_max).collect(),
                p_values: p,
            };
            emit_all(&cfg, &[req], format, &cli.out)
        }
        Command::Table1 => emit_all(&cfg, &[SweepRequest::Table1], format, &cli.out),
        Command::Tune { side, print_offsets } => {
            let side = match side {
                SideArg::F => Side::Forward,
                SideArg::B => Side::Backward,
            };
            tune(&cfg, side, print_offsets)
        }
        Command::Replay { manifest } => {
            let m = RunManifest::load(&manifest)?;
            let replay_cfg = m.config()?;
            emit_all(&replay_cfg, std::slice::from_ref(&m.request), m.format, &cli.out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let threads = cli.threads;
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| execute(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
