//! Run orchestration: reduced longitudinal runs, full 3-D runs, coherence
//! sweeps, and field-map exports, with deterministic CSV outputs and
//! optional checkpointing.

use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use crate::calibration::Calibration;
use crate::error::{Result, SgiError};
use crate::grid::{next_supported_size, Grid, Z};
use crate::observables::ObservableRecord;
use crate::phys::PhysParams;
use crate::propagator::source::{Axis1dSource, SpinFieldSource};
use crate::propagator::{evolve, EvolveOptions};
use crate::spinor::SpinorField;
use crate::units::{ATU_PER_MICROSECOND, BOHR_PER_MICRON};

use super::checkpoint::{checkpoint_path, latest_checkpoint, read_checkpoint, write_checkpoint};
use super::config::ExperimentConfig;

/// Everything a run produces besides its files.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub phys: PhysParams,
    pub calibration: Calibration,
    /// Grid the packet was propagated on (after any automatic sizing).
    pub grid: Grid,
    /// (completed steps, record) pairs, first entry at the start state.
    pub records: Vec<(u64, ObservableRecord)>,
    /// (phase, seconds) wall-clock accounting.
    pub timings: Vec<(&'static str, f64)>,
}

impl RunOutcome {
    pub fn final_record(&self) -> &ObservableRecord {
        &self.records.last().expect("runs always record the final state").1
    }
}

/// Minimum ratio of the spectral momentum cutoff π/Δz to the calibrated peak
/// transverse momentum m·v_z. Below this the splitting wraps around the
/// momentum grid and the packets spuriously rebound.
const MOMENTUM_HEADROOM_MIN: f64 = 1.25;
/// Headroom the automatic z-axis sizing aims for.
const MOMENTUM_HEADROOM_TARGET: f64 = 1.6;

/// Spacing that keeps the momentum cutoff `headroom` times above the peak
/// classical momentum, and never coarser than δ/4.
fn z_spacing_needed(phys: &PhysParams, cal: &Calibration, headroom: f64) -> f64 {
    let p_max = phys.mass * cal.max_speed;
    let from_momentum = if p_max > 0.0 {
        std::f64::consts::PI / (headroom * p_max)
    } else {
        f64::INFINITY
    };
    from_momentum.min(phys.delta / 4.0)
}

/// Reject grids whose z axis cannot hold the calibrated splitting momentum.
fn check_momentum_headroom(grid: &Grid, phys: &PhysParams, cal: &Calibration) -> Result<()> {
    let p_max = phys.mass * cal.max_speed;
    if p_max <= 0.0 {
        return Ok(());
    }
    let k_cut = std::f64::consts::PI / grid.spacing(Z);
    if k_cut < MOMENTUM_HEADROOM_MIN * p_max {
        return Err(SgiError::Config(format!(
            "z spacing {:.3e} caps the momentum grid at {:.3e}, below {}× the \
             calibrated peak splitting momentum {:.3e}; refine the z axis or \
             enable grid.auto_z",
            grid.spacing(Z),
            k_cut,
            MOMENTUM_HEADROOM_MIN,
            p_max
        )));
    }
    Ok(())
}

/// Grid for the full 3-D run. With `grid.auto_z` the z axis is derived from
/// the calibration: extent = classical apex plus 9 δ of tail room per side,
/// spacing from the momentum headroom rule.
fn resolve_grid_3d(
    cfg: &ExperimentConfig,
    phys: &PhysParams,
    cal: &Calibration,
) -> Result<Grid> {
    let delta = phys.delta;
    let mut shape = cfg.grid.shape;
    let mut extent = cfg.grid.extent_delta.map(|e| e * delta);
    if cfg.grid.auto_z {
        let ext = 2.0 * (cal.max_excursion + 9.0 * delta);
        let dz = z_spacing_needed(phys, cal, MOMENTUM_HEADROOM_TARGET);
        shape[2] = next_supported_size((ext / dz).ceil() as usize);
        extent[2] = ext;
    }
    let grid = Grid::box3(shape, extent)?;
    grid.validate(delta, [0.0, 0.0, cal.max_excursion])?;
    check_momentum_headroom(&grid, phys, cal)?;
    Ok(grid)
}

/// Reduced model: the packet only resolves the splitting axis z, and the
/// carried motion along the device enters through the time dependence of the
/// on-axis field. This captures the splitting/recombination physics at a
/// tiny fraction of the 3-D cost.
pub fn run_simplified_1d(cfg: &ExperimentConfig, out_dir: Option<&Path>) -> Result<RunOutcome> {
    let t_total_start = Instant::now();
    let (phys, calibrator, cal) = cfg.resolve_calibration()?;
    let calibration_secs = t_total_start.elapsed().as_secs_f64();
    let model = calibrator.model_for(&cal)?;

    let delta = phys.delta;
    let target_delta = cal.target / delta;
    let auto_extent = cfg.one_dim.extent_delta <= 0.0;
    let extent_delta = if auto_extent {
        // Apex ±target/2 plus dispersion room on both sides.
        (2.0 * (0.75 * target_delta + 16.0)).max(64.0)
    } else {
        cfg.one_dim.extent_delta
    };
    let extent = extent_delta * delta;
    let nz = if auto_extent {
        // Never let the configured point count under-resolve the splitting
        // momentum on the automatically sized extent.
        let dz = z_spacing_needed(&phys, &cal, MOMENTUM_HEADROOM_TARGET);
        cfg.one_dim.nz.max(next_supported_size((extent / dz).ceil() as usize))
    } else {
        cfg.one_dim.nz
    };
    let grid = Grid::line_z(nz, extent)?;
    grid.validate(delta, [0.0, 0.0, cal.max_excursion])?;
    check_momentum_headroom(&grid, &phys, &cal)?;

    let mut field = SpinorField::gaussian_packet_x_polarised(grid, delta, [0.0; 3])?;
    let mut source = Axis1dSource::new(&model, &phys, &grid)?;
    let mut opts = EvolveOptions::over(phys.t_total, cfg.one_dim.n_steps);
    opts.observe_every = cfg.one_dim.observe_every;
    opts.norm_drift_limit = cfg.run.norm_drift_limit;
    opts.boundary_limit = cfg.run.boundary_limit;

    let mut records = Vec::new();
    let t_run = Instant::now();
    evolve(&mut field, &phys, &mut source, &opts, |step, f| {
        records.push((step as u64, ObservableRecord::measure(f)));
        Ok(())
    })?;
    let evolve_secs = t_run.elapsed().as_secs_f64();

    let outcome = RunOutcome {
        phys,
        calibration: cal,
        grid,
        records,
        timings: vec![
            ("calibration", calibration_secs),
            ("evolve", evolve_secs),
            ("total", t_total_start.elapsed().as_secs_f64()),
        ],
    };
    if let Some(dir) = out_dir {
        write_run_outputs(dir, cfg, &outcome)?;
    }
    Ok(outcome)
}

/// Full propagation of the spinor packet through the device volume.
///
/// `checkpoint_every > 0` writes integrity-hashed state snapshots at that
/// step cadence into `out_dir`; `resume` restarts from the most advanced
/// snapshot found there. A resumed run reproduces the uninterrupted
/// bit-exact state sequence because checkpoints store the raw amplitudes.
pub fn run_full_3d(
    cfg: &ExperimentConfig,
    out_dir: Option<&Path>,
    checkpoint_every: usize,
    resume: bool,
) -> Result<RunOutcome> {
    let t_total_start = Instant::now();
    let (phys, calibrator, cal) = cfg.resolve_calibration()?;
    let calibration_secs = t_total_start.elapsed().as_secs_f64();
    let model = calibrator.model_for(&cal)?;

    let delta = phys.delta;
    let grid = resolve_grid_3d(cfg, &phys, &cal)?;

    let total_steps = cfg.run.n_steps as u64;
    let mut field = SpinorField::gaussian_packet_x_polarised(grid, delta, [0.0; 3])?;
    let mut start_step = 0u64;
    if resume {
        let Some(dir) = out_dir else {
            return Err(SgiError::Config(
                "resume requested without an output directory to read from".into(),
            ));
        };
        if let Some((path, _)) = latest_checkpoint(dir)? {
            let (saved, step) = read_checkpoint(&path)?;
            if saved.grid.shape != grid.shape || saved.grid.extent != grid.extent {
                return Err(SgiError::Checkpoint(format!(
                    "checkpoint {} was taken on a different grid",
                    path.display()
                )));
            }
            if step > total_steps {
                return Err(SgiError::Checkpoint(format!(
                    "checkpoint {} is beyond the configured step count",
                    path.display()
                )));
            }
            field = saved;
            start_step = step;
        }
    }

    let mut opts = EvolveOptions::over(phys.t_total, cfg.run.n_steps);
    opts.norm_drift_limit = cfg.run.norm_drift_limit;
    opts.boundary_limit = cfg.run.boundary_limit;
    // The engine's observer must fire on every cadence either consumer
    // (records, checkpoints) cares about.
    let record_every = cfg.run.observe_every as u64;
    let ckpt_every = checkpoint_every as u64;
    opts.observe_every = match (record_every, ckpt_every) {
        (0, 0) => 0,
        (r, 0) => r as usize,
        (0, c) => c as usize,
        (r, c) => gcd(r, c) as usize,
    };

    let mut source = SpinFieldSource::new(model, &phys, cfg.grid.patch_radius_delta * delta)?;
    let mut records = Vec::new();
    let mut ckpt_secs = 0.0f64;
    let t_run = Instant::now();
    if start_step < total_steps {
        opts.n_steps = (total_steps - start_step) as usize;
        evolve(&mut field, &phys, &mut source, &opts, |step, f| {
            let abs = start_step + step as u64;
            let done = abs == total_steps;
            if abs == start_step || done || (record_every > 0 && abs % record_every == 0) {
                records.push((abs, ObservableRecord::measure(f)));
            }
            if ckpt_every > 0 && abs > start_step && (abs % ckpt_every == 0 || done) {
                if let Some(dir) = out_dir {
                    let t0 = Instant::now();
                    std::fs::create_dir_all(dir)?;
                    write_checkpoint(&checkpoint_path(dir, abs), f, abs)?;
                    ckpt_secs += t0.elapsed().as_secs_f64();
                }
            }
            Ok(())
        })?;
    } else {
        // Nothing left to integrate; report the restored state.
        records.push((start_step, ObservableRecord::measure(&field)));
    }
    let evolve_secs = t_run.elapsed().as_secs_f64() - ckpt_secs;

    let outcome = RunOutcome {
        phys,
        calibration: cal,
        grid,
        records,
        timings: vec![
            ("calibration", calibration_secs),
            ("evolve", evolve_secs),
            ("checkpoint_io", ckpt_secs),
            ("total", t_total_start.elapsed().as_secs_f64()),
        ],
    };
    if let Some(dir) = out_dir {
        write_run_outputs(dir, cfg, &outcome)?;
    }
    Ok(outcome)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Which propagation model a sweep runs per target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    OneDim,
    ThreeDim,
}

/// Per-target summary of a sweep.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepRow {
    pub target_delta: f64,
    pub f_scale: f64,
    pub half_gap_um: f64,
    /// Spin coherence C = |⟨σ⟩|² at the exit.
    pub coherence_final: f64,
    /// Disagreement between the two coherence routes at the exit.
    pub coherence_mismatch: f64,
    /// Residual component separation along z at the exit, in δ.
    pub separation_final_delta: f64,
    /// Classical midpoint separation actually achieved, in δ.
    pub split_mid_delta: f64,
    /// Largest |⟨z⟩↑ − ⟨z⟩↓| seen at any recorded time, in δ.
    pub max_separation_delta: f64,
    pub norm_final: f64,
}

/// Calibrate and propagate once per sweep target. Any calibration override
/// in the config is ignored — each target is searched from scratch.
pub fn run_sweep(
    cfg: &ExperimentConfig,
    mode: SweepMode,
    out_dir: Option<&Path>,
) -> Result<Vec<SweepRow>> {
    if cfg.sweep.targets_delta.is_empty() {
        return Err(SgiError::Config("sweep.targets_delta is empty".into()));
    }
    let mut rows = Vec::new();
    for &target in &cfg.sweep.targets_delta {
        let mut sub = cfg.clone();
        sub.calibration.target_delta = target;
        sub.calibration.f_scale = None;
        sub.calibration.half_gap_um = None;
        let sub_dir = out_dir.map(|d| d.join(format!("dz_{target:05.1}")));
        let outcome = match mode {
            SweepMode::OneDim => run_simplified_1d(&sub, sub_dir.as_deref())?,
            SweepMode::ThreeDim => run_full_3d(&sub, sub_dir.as_deref(), 0, false)?,
        };
        let delta = outcome.phys.delta;
        let last = outcome.final_record();
        let max_sep = outcome
            .records
            .iter()
            .map(|(_, r)| r.separation_z().abs())
            .fold(0.0f64, f64::max);
        rows.push(SweepRow {
            target_delta: target,
            f_scale: outcome.calibration.f_scale,
            half_gap_um: outcome.calibration.half_gap_um(),
            coherence_final: last.coherence,
            coherence_mismatch: last.coherence_route_mismatch(),
            separation_final_delta: last.separation_z() / delta,
            split_mid_delta: outcome.calibration.split_mid / delta,
            max_separation_delta: max_sep / delta,
            norm_final: last.norm,
        });
    }
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("sweep.csv"), sweep_csv(&rows))?;
    }
    Ok(rows)
}

/// Sampling plan for a field-map export on the x = `x_um` plane.
#[derive(Debug, Clone, Copy)]
pub struct FieldmapSpec {
    pub ny: usize,
    pub nz: usize,
    /// Half-span in y, μm; `None` = half the device length.
    pub y_span_um: Option<f64>,
    /// Half-span in z, packet widths.
    pub z_span_delta: f64,
    pub x_um: f64,
}

impl Default for FieldmapSpec {
    fn default() -> Self {
        Self {
            ny: 201,
            nz: 101,
            y_span_um: None,
            z_span_delta: 30.0,
            x_um: 0.0,
        }
    }
}

/// Sample the calibrated field on a plane and write one CSV row per node.
pub fn write_fieldmap(cfg: &ExperimentConfig, spec: &FieldmapSpec, path: &Path) -> Result<()> {
    if spec.ny < 2 || spec.nz < 2 {
        return Err(SgiError::Config("fieldmap needs at least a 2×2 plan".into()));
    }
    let (phys, calibrator, cal) = cfg.resolve_calibration()?;
    let model = calibrator.model_for(&cal)?;
    let y_half = spec
        .y_span_um
        .map(|v| v * BOHR_PER_MICRON)
        .unwrap_or(phys.length / 2.0);
    let z_half = spec.z_span_delta * phys.delta;
    let x = spec.x_um * BOHR_PER_MICRON;

    let mut out = String::with_capacity(spec.ny * spec.nz * 64);
    out.push_str("y_um,z_um,bx,by,bz,bnorm\n");
    for j in 0..spec.ny {
        let y = -y_half + 2.0 * y_half * j as f64 / (spec.ny - 1) as f64;
        for k in 0..spec.nz {
            let z = -z_half + 2.0 * z_half * k as f64 / (spec.nz - 1) as f64;
            let b = model.field_at([x, y, z])?;
            let norm = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
            out.push_str(&format!(
                "{:e},{:e},{:e},{:e},{:e},{:e}\n",
                y / BOHR_PER_MICRON,
                z / BOHR_PER_MICRON,
                b[0],
                b[1],
                b[2],
                norm
            ));
        }
    }
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Calibration summary serialised next to run outputs.
#[derive(Serialize)]
struct CalibrationReport {
    target_delta: f64,
    f_scale: f64,
    half_gap_um: f64,
    split_mid_delta: f64,
    split_end_delta: f64,
    max_excursion_delta: f64,
    classical_steps: usize,
}

fn write_run_outputs(dir: &Path, cfg: &ExperimentConfig, outcome: &RunOutcome) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let delta = outcome.phys.delta;
    std::fs::write(
        dir.join("observables.csv"),
        observables_csv(&outcome.phys, &outcome.records),
    )?;
    std::fs::write(dir.join("config.snapshot.toml"), cfg.snapshot_toml()?)?;
    let cal = &outcome.calibration;
    let report = CalibrationReport {
        target_delta: cal.target / delta,
        f_scale: cal.f_scale,
        half_gap_um: cal.half_gap_um(),
        split_mid_delta: cal.split_mid / delta,
        split_end_delta: cal.split_end / delta,
        max_excursion_delta: cal.max_excursion / delta,
        classical_steps: cal.n_steps,
    };
    let cal_toml = toml::to_string_pretty(&report)
        .map_err(|e| SgiError::Config(format!("calibration report: {e}")))?;
    std::fs::write(dir.join("calibration.toml"), cal_toml)?;
    let mut timing = String::from("phase,seconds\n");
    for (phase, secs) in &outcome.timings {
        timing.push_str(&format!("{phase},{secs:.3}\n"));
    }
    std::fs::write(dir.join("timing.csv"), timing)?;
    Ok(())
}

/// Deterministic CSV image of the observable records. Floats are printed in
/// shortest round-trip scientific form, so identical doubles give identical
/// bytes.
pub fn observables_csv(phys: &PhysParams, records: &[(u64, ObservableRecord)]) -> String {
    let delta = phys.delta;
    let mut out = String::with_capacity(records.len() * 200 + 200);
    out.push_str(
        "step,t_us,norm,sx,sy,sz,coherence,coherence_purity,norm_up,norm_dn,\
         z_up_delta,z_dn_delta,dz_delta,dy_delta,width_z_up_delta,width_z_dn_delta,\
         edge_fraction\n",
    );
    for (step, r) in records {
        out.push_str(&format!(
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}\n",
            step,
            r.time / ATU_PER_MICROSECOND,
            r.norm,
            r.sx,
            r.sy,
            r.sz,
            r.coherence,
            r.coherence_purity,
            r.norm_up,
            r.norm_dn,
            r.centroid_up[2] / delta,
            r.centroid_dn[2] / delta,
            r.separation_z() / delta,
            r.separation_y() / delta,
            r.width_z_up / delta,
            r.width_z_dn / delta,
            r.edge_fraction,
        ));
    }
    out
}

fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(
        "target_delta,f_scale,half_gap_um,coherence_final,coherence_mismatch,\
         separation_final_delta,split_mid_delta,max_separation_delta,norm_final\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}\n",
            r.target_delta,
            r.f_scale,
            r.half_gap_um,
            r.coherence_final,
            r.coherence_mismatch,
            r.separation_final_delta,
            r.split_mid_delta,
            r.max_separation_delta,
            r.norm_final,
        ));
    }
    out
}
