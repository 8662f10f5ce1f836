//! Command-line front end for the interferometer simulator.
//!
//! Exit codes: 0 on success, 2 for configuration/geometry problems, 3 for
//! runtime failures (search, numerics, I/O).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sgi_core::harness::{
    install_worker_pool, resolve_workers, run_full_3d, run_simplified_1d, run_sweep,
    write_fieldmap, ExperimentConfig, FieldmapSpec, RunOutcome, SweepMode,
};
use sgi_core::units::BOHR_PER_MICRON;
use sgi_core::Result;

#[derive(Parser)]
#[command(
    name = "sgi",
    version,
    about = "Spectral split-operator simulator of a transversal Stern–Gerlach interferometer"
)]
struct Cli {
    /// TOML configuration file (defaults apply when omitted).
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads (default: $SGI_WORKERS, then all cores).
    #[arg(short, long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the field scale and line half-gap at a target separation.
    Calibrate(CalibrateArgs),
    /// Reduced run resolving only the splitting axis.
    #[command(name = "run-1d")]
    Run1d(RunArgs),
    /// Full 3-D propagation through the device.
    #[command(name = "run-3d")]
    Run3d(Run3dArgs),
    /// Calibrate and propagate across a list of target separations.
    Sweep(SweepArgs),
    /// Sample the calibrated magnetic field on a plane.
    Fieldmap(FieldmapArgs),
}

#[derive(Args)]
struct CalibrateArgs {
    /// Target midpoint separation in packet widths δ (overrides the config).
    #[arg(long)]
    target: Option<f64>,
    /// Directory for calibration.toml.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Target midpoint separation in δ (overrides the config).
    #[arg(long)]
    target: Option<f64>,
    /// Output directory for observables.csv and friends.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Run3dArgs {
    #[command(flatten)]
    common: RunArgs,
    /// Write an integrity-hashed state snapshot every N steps (0 = never).
    #[arg(long, default_value_t = 0)]
    checkpoint_every: usize,
    /// Continue from the most advanced checkpoint in the output directory.
    #[arg(long)]
    resume: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepModeArg {
    OneDim,
    ThreeDim,
}

#[derive(Args)]
struct SweepArgs {
    /// Propagation model used per target.
    #[arg(long, value_enum, default_value_t = SweepModeArg::ThreeDim)]
    mode: SweepModeArg,
    /// Comma-separated targets in δ (overrides the config).
    #[arg(long, value_delimiter = ',')]
    targets: Option<Vec<f64>>,
    /// Output directory for sweep.csv and per-target subdirectories.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FieldmapArgs {
    /// Output CSV path.
    #[arg(short, long, default_value = "fieldmap.csv")]
    out: PathBuf,
    #[arg(long, default_value_t = 201)]
    ny: usize,
    #[arg(long, default_value_t = 101)]
    nz: usize,
    /// Half-span in y, μm (default: half the device length).
    #[arg(long)]
    y_span_um: Option<f64>,
    /// Half-span in z, packet widths.
    #[arg(long, default_value_t = 30.0)]
    z_span_delta: f64,
    /// Plane offset along x, μm.
    #[arg(long, default_value_t = 0.0)]
    x_um: f64,
}

fn load_config(path: &Option<PathBuf>) -> Result<ExperimentConfig> {
    match path {
        Some(p) => ExperimentConfig::load(p),
        None => Ok(ExperimentConfig::default()),
    }
}

fn print_run_summary(label: &str, outcome: &RunOutcome) {
    let delta = outcome.phys.delta;
    let cal = &outcome.calibration;
    let last = outcome.final_record();
    println!(
        "{label}: target {:.3} δ  (f = {:.6e}, a = {:.5} μm)",
        cal.target / delta,
        cal.f_scale,
        cal.half_gap_um()
    );
    println!(
        "  exit: |<σ>| = {:.6}  Δz = {:.3e} δ  norm = {:.9}",
        last.coherence,
        last.separation_z() / delta,
        last.norm
    );
    for (phase, secs) in &outcome.timings {
        println!("  {phase}: {secs:.2} s");
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let workers = resolve_workers(cli.workers)?;
    install_worker_pool(workers)?;
    let mut cfg = load_config(&cli.config)?;

    match cli.command {
        Command::Calibrate(args) => {
            if let Some(t) = args.target {
                cfg.calibration.target_delta = t;
                cfg.calibration.f_scale = None;
                cfg.calibration.half_gap_um = None;
            }
            let (phys, _, cal) = cfg.resolve_calibration()?;
            let delta = phys.delta;
            println!(
                "target {:.3} δ: f_scale = {:.7e}, half_gap = {:.6} μm",
                cal.target / delta,
                cal.f_scale,
                cal.half_gap_um()
            );
            println!(
                "  ΔZ(T/2) = {:.6} δ, ΔZ(T) = {:.3e} δ, apex = {:.3} δ ({} classical steps)",
                cal.split_mid / delta,
                cal.split_end / delta,
                cal.max_excursion / delta,
                cal.n_steps
            );
            if let Some(dir) = args.out {
                std::fs::create_dir_all(&dir)?;
                let report = format!(
                    "target_delta = {:e}\nf_scale = {:e}\nhalf_gap_um = {:e}\n\
                     split_mid_delta = {:e}\nsplit_end_delta = {:e}\n",
                    cal.target / delta,
                    cal.f_scale,
                    cal.half_gap / BOHR_PER_MICRON,
                    cal.split_mid / delta,
                    cal.split_end / delta,
                );
                std::fs::write(dir.join("calibration.toml"), report)?;
                println!("wrote {}", dir.join("calibration.toml").display());
            }
            Ok(())
        }
        Command::Run1d(args) => {
            if let Some(t) = args.target {
                cfg.calibration.target_delta = t;
                cfg.calibration.f_scale = None;
                cfg.calibration.half_gap_um = None;
            }
            let outcome = run_simplified_1d(&cfg, args.out.as_deref())?;
            print_run_summary("run-1d", &outcome);
            Ok(())
        }
        Command::Run3d(args) => {
            if let Some(t) = args.common.target {
                cfg.calibration.target_delta = t;
                cfg.calibration.f_scale = None;
                cfg.calibration.half_gap_um = None;
            }
            let outcome = run_full_3d(
                &cfg,
                args.common.out.as_deref(),
                args.checkpoint_every,
                args.resume,
            )?;
            print_run_summary("run-3d", &outcome);
            Ok(())
        }
        Command::Sweep(args) => {
            if let Some(t) = args.targets {
                cfg.sweep.targets_delta = t;
            }
            let mode = match args.mode {
                SweepModeArg::OneDim => SweepMode::OneDim,
                SweepModeArg::ThreeDim => SweepMode::ThreeDim,
            };
            let rows = run_sweep(&cfg, mode, args.out.as_deref())?;
            println!("target_δ  f_scale      a_um     C_final    Δz_final_δ");
            for r in &rows {
                println!(
                    "{:7.2}  {:.5e}  {:.5}  {:.6}  {:+.3e}",
                    r.target_delta,
                    r.f_scale,
                    r.half_gap_um,
                    r.coherence_final,
                    r.separation_final_delta
                );
            }
            Ok(())
        }
        Command::Fieldmap(args) => {
            let spec = FieldmapSpec {
                ny: args.ny,
                nz: args.nz,
                y_span_um: args.y_span_um,
                z_span_delta: args.z_span_delta,
                x_um: args.x_um,
            };
            write_fieldmap(&cfg, &spec, &args.out)?;
            println!("wrote {}", args.out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;
    use sgi_core::SgiError;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn error_exit_codes_are_stable() {
        assert_eq!(SgiError::Config("x".into()).exit_code(), 2);
        assert_eq!(SgiError::Geometry("x".into()).exit_code(), 2);
        assert_eq!(SgiError::Numerical("x".into()).exit_code(), 3);
        assert_eq!(SgiError::SearchFailure("x".into()).exit_code(), 3);
    }
}
