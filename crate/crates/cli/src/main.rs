use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use phasemax::experiments::{
    format_summary, parse_ratios, run_cdp_demo, run_sweep, run_verify, summarize, CdpConfig,
    NoiseSpec, Suite, SweepConfig,
};
use phasemax::SolverConfig;

#[derive(Parser)]
#[command(name = "phasemax", version, about = "Anchored convex phase retrieval experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recovery error against the sampling ratio M/N, dense Gaussian measurements.
    Sweep(SweepArgs),
    /// Recover a PGM image from coded diffraction patterns.
    Cdp(CdpArgs),
    /// Run the numerical verification suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SolverArgs {
    /// Spectral anchor power iterations.
    #[arg(long, default_value_t = 50)]
    anchor_iters: usize,
    /// Solver iteration cap.
    #[arg(long, default_value_t = SolverConfig::default().max_iters)]
    max_iters: usize,
    /// Relative-change and feasibility tolerance.
    #[arg(long, default_value_t = SolverConfig::default().tol_rel_change)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Leave timing fields empty so repeated runs produce identical output.
    #[arg(long)]
    no_timing: bool,
}

impl SolverArgs {
    fn solver(&self) -> SolverConfig {
        SolverConfig {
            max_iters: self.max_iters,
            tol_rel_change: self.tol,
            tol_feas: self.tol,
            ..SolverConfig::default()
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    /// Signal length N.
    #[arg(long, default_value_t = 128)]
    n: usize,
    /// Comma list (2,4,6) or inclusive range lo:hi:step.
    #[arg(long, default_value = "2,4,6,8,10,12")]
    ratios: String,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// none, uniform:<eta_inv> or gaussian:<snr_db>.
    #[arg(long, default_value = "none")]
    noise: String,
    /// CSV output path.
    #[arg(long, default_value = "sweep.csv")]
    out: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct CdpArgs {
    /// 8-bit binary PGM (P5).
    #[arg(long)]
    image: PathBuf,
    /// Number of coded diffraction masks L.
    #[arg(long, default_value_t = 20)]
    masks: usize,
    /// Writes <prefix>.pgm and <prefix>.f64.
    #[arg(long)]
    out_prefix: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// closed-forms, geometry, vc or all.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn sweep(args: SweepArgs) -> Result<bool> {
    let cfg = SweepConfig {
        n: args.n,
        ratios: parse_ratios(&args.ratios)?,
        trials: args.trials,
        noise: args.noise.parse::<NoiseSpec>()?,
        anchor_iters: args.solver.anchor_iters,
        solver: args.solver.solver(),
        seed: args.solver.seed,
        out_path: Some(args.out.clone()),
        record_timing: !args.solver.no_timing,
    };
    let records = run_sweep(&cfg).with_context(|| format!("sweep writing {}", args.out.display()))?;
    print!("{}", format_summary(&summarize(&records)));
    println!("wrote {} rows to {}", records.len(), args.out.display());
    Ok(true)
}

fn cdp(args: CdpArgs) -> Result<bool> {
    let cfg = CdpConfig {
        num_masks: args.masks,
        anchor_iters: args.solver.anchor_iters,
        solver: args.solver.solver(),
        seed: args.solver.seed,
        out_prefix: args.out_prefix,
        record_timing: !args.solver.no_timing,
    };
    let report = run_cdp_demo(&args.image, &cfg)
        .with_context(|| format!("coded diffraction demo on {}", args.image.display()))?;
    print!("{}", report.to_text());
    Ok(true)
}

fn verify(args: VerifyArgs) -> Result<bool> {
    let suite: Suite = args.suite.parse()?;
    let report = run_verify(suite, args.seed)?;
    print!("{}", report.to_text());
    Ok(report.all_passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Sweep(a) => sweep(a),
        Command::Cdp(a) => cdp(a),
        Command::Verify(a) => verify(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
