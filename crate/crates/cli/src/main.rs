use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use dscv::commands::{self, CostvolArgs, EvalArgs, FuseArgs};
use dscv::config::RunConfig;
use dscv::error::{CliError, Result};

#[derive(Parser)]
#[command(name = "dscv", version, about = "Plane-sweep cost-volume depth toolkit")]
struct Cli {
    /// Worker threads; overrides DSCV_THREADS (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized steps (synth rendering)
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Run configuration JSON
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Static,
    Dynamic,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LossKind {
    Photometric,
    Adaptive,
    Smooth,
    Pyramid,
}

impl LossKind {
    fn name(self) -> &'static str {
        match self {
            LossKind::Photometric => "photometric",
            LossKind::Adaptive => "adaptive",
            LossKind::Smooth => "smooth",
            LossKind::Pyramid => "pyramid",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Render a synthetic two-frame scene with ground truth
    Synth {
        /// Scene description JSON
        #[arg(long)]
        spec: PathBuf,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a plane-sweep cost volume
    Costvol {
        #[arg(long)]
        mode: Mode,
        /// Residual flow (.flo), required in dynamic mode
        #[arg(long)]
        flow: Option<PathBuf>,
        /// Output cost volume (.dscv)
        #[arg(long)]
        out: PathBuf,
    },
    /// Occlusion-aware fusion of static and dynamic volumes
    Fuse {
        #[arg(long = "static")]
        static_cv: PathBuf,
        #[arg(long = "dynamic")]
        dynamic_cv: PathBuf,
        /// Occlusion mask of the static branch (PNG)
        #[arg(long = "occ-s")]
        occ_s: PathBuf,
        /// Occlusion mask of the dynamic branch (PNG)
        #[arg(long = "occ-d")]
        occ_d: PathBuf,
        /// Mixing weights (.dsfw); defaults to plain averaging
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract the per-pixel argmin depth map from a cost volume
    Depth {
        #[arg(long)]
        cv: PathBuf,
        /// Output depth map (.pfm)
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute a training-loss scalar from files named in the config
    Loss {
        #[arg(long)]
        kind: LossKind,
    },
    /// Evaluate a predicted depth map against ground truth
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        /// Restrict evaluation to this region (PNG mask)
        #[arg(long)]
        mask: Option<PathBuf>,
        #[arg(long = "median-scale")]
        median_scale: bool,
        /// Also write a per-pixel error histogram CSV here
        #[arg(long)]
        hist: Option<PathBuf>,
    },
    /// Render a flow field with the standard color wheel
    FlowViz {
        #[arg(long)]
        flow: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Magnitude mapped to full saturation (default: field max)
        #[arg(long = "max-flow")]
        max_flow: Option<f64>,
    },
}

fn resolve_threads(flag: Option<usize>, cfg: &RunConfig) -> Result<usize> {
    if let Some(n) = flag {
        return Ok(n);
    }
    if let Ok(val) = std::env::var("DSCV_THREADS") {
        return val
            .parse()
            .map_err(|_| CliError::Validation(format!("DSCV_THREADS is not a number: {val}")));
    }
    Ok(cfg.threads.unwrap_or(0)) // 0 = rayon default (all cores)
}

fn run(cli: Cli) -> Result<()> {
    let cfg = RunConfig::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Synth { spec, out } => commands::synth(spec, cli.seed, out),
        Command::Costvol { mode, flow, out } => commands::costvol(
            &cfg,
            &CostvolArgs {
                dynamic: *mode == Mode::Dynamic,
                flow: flow.as_deref(),
                out,
                threads: resolve_threads(cli.threads, &cfg)?,
            },
        ),
        Command::Fuse {
            static_cv,
            dynamic_cv,
            occ_s,
            occ_d,
            weights,
            out,
        } => commands::fuse_cmd(&FuseArgs {
            static_cv,
            dynamic_cv,
            occ_s,
            occ_d,
            weights: weights.as_deref(),
            out,
        }),
        Command::Depth { cv, out } => commands::depth_cmd(cv, out),
        Command::Loss { kind } => {
            let report = commands::loss_cmd(&cfg, kind.name())?;
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            Ok(())
        }
        Command::Eval {
            pred,
            gt,
            mask,
            median_scale,
            hist,
        } => {
            let report = commands::eval_cmd(
                &cfg,
                &EvalArgs {
                    pred,
                    gt,
                    mask: mask.as_deref(),
                    median_scale: *median_scale,
                    hist: hist.as_deref(),
                },
            )?;
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            Ok(())
        }
        Command::FlowViz {
            flow,
            out,
            max_flow,
        } => commands::flow_viz(flow, out, *max_flow),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            // Usage problems are validation errors (exit 1).
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
