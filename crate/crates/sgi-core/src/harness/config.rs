//! Experiment configuration: a single TOML document that fixes the beam,
//! the field model, the calibration request, and the numerical controls for
//! every run mode. All values are given in laboratory units (μm, μs, Da);
//! conversion to internal atomic units happens when the config is resolved.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::calibration::{Calibration, Calibrator};
use crate::error::{Result, SgiError};
use crate::field::{FieldProfile, LineParity};
use crate::phys::PhysParams;
use crate::units::BOHR_PER_MICRON;

/// Beam and apparatus constants.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BeamSection {
    /// Atom mass in daltons.
    pub mass_da: f64,
    /// Device length in μm.
    pub length_um: f64,
    /// Transit time in μs.
    pub time_us: f64,
    /// Initial packet width δ in μm.
    pub delta_um: f64,
}

impl Default for BeamSection {
    fn default() -> Self {
        Self {
            mass_da: 107.8682,
            length_um: 25.0,
            time_us: 0.1,
            delta_um: 0.01,
        }
    }
}

impl BeamSection {
    pub fn to_phys(&self) -> Result<PhysParams> {
        PhysParams::from_external(self.mass_da, self.length_um, self.time_us, self.delta_um)
    }
}

/// Field-synthesis controls.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldSection {
    /// Modulation wavenumber α in 1/μm.
    pub alpha_um: f64,
    /// Bias field B₀ in magnetic atomic units.
    pub bias: f64,
    /// Wavenumber cutoff as a multiple of α.
    pub k_max_factor: f64,
    /// Gauss–Legendre nodes on [0, k_max].
    pub quad_nodes: usize,
    /// Relative sign of the two source lines.
    pub parity: LineParity,
}

impl Default for FieldSection {
    fn default() -> Self {
        let p = FieldProfile::default();
        Self {
            alpha_um: p.alpha_um,
            bias: p.bias,
            k_max_factor: p.k_max_factor,
            quad_nodes: p.quad_nodes,
            parity: LineParity::Aligned,
        }
    }
}

impl FieldSection {
    pub fn to_profile(&self) -> FieldProfile {
        FieldProfile {
            alpha_um: self.alpha_um,
            bias: self.bias,
            k_max_factor: self.k_max_factor,
            quad_nodes: self.quad_nodes,
        }
    }
}

/// Calibration request. If both `f_scale` and `half_gap_um` are given the
/// search is skipped and the pair is evaluated as-is; specifying only one of
/// them is rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationSection {
    /// Midpoint separation target in packet widths δ.
    pub target_delta: f64,
    /// Classical integrator resolutions, coarse search → fine polish.
    pub ladder: Vec<usize>,
    /// Upper bound for the half-gap search, μm.
    pub max_half_gap_um: f64,
    /// Explicit field scale (skips the search when paired with
    /// `half_gap_um`).
    pub f_scale: Option<f64>,
    /// Explicit half-gap in μm.
    pub half_gap_um: Option<f64>,
}

impl Default for CalibrationSection {
    fn default() -> Self {
        Self {
            target_delta: 5.0,
            ladder: vec![2048, 8192],
            max_half_gap_um: 5.0,
            f_scale: None,
            half_gap_um: None,
        }
    }
}

/// Full 3-D grid controls. Extents are in packet widths δ.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub shape: [usize; 3],
    pub extent_delta: [f64; 3],
    /// Derive the z axis from the calibrated trajectory instead of using
    /// `shape[2]`/`extent_delta[2]`: the extent covers the classical apex
    /// plus packet tails, and the spacing keeps the spectral Nyquist
    /// momentum 1.6× above the peak transverse momentum m·v_z so the
    /// splitting never wraps around the momentum grid.
    pub auto_z: bool,
    /// Validity radius of the per-branch quadratic field patches, in δ.
    pub patch_radius_delta: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            shape: [32, 32, 288],
            extent_delta: [8.0, 8.0, 26.0],
            auto_z: true,
            patch_radius_delta: 8.0,
        }
    }
}

/// Time stepping and health limits for the 3-D run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub n_steps: usize,
    /// Steps between observable records (0 = endpoints only).
    pub observe_every: usize,
    pub norm_drift_limit: f64,
    pub boundary_limit: f64,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            n_steps: 2048,
            observe_every: 16,
            norm_drift_limit: 1e-6,
            boundary_limit: 1e-2,
        }
    }
}

/// Controls for the reduced longitudinal-axis run (the z-only model in the
/// co-moving frame).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OneDimSection {
    /// Grid points along z. With an automatic extent this is a lower bound:
    /// the count is raised as needed to keep the splitting momentum inside
    /// the spectral cutoff.
    pub nz: usize,
    /// Grid extent in δ; 0 = size automatically from the target split.
    pub extent_delta: f64,
    pub n_steps: usize,
    pub observe_every: usize,
}

impl Default for OneDimSection {
    fn default() -> Self {
        Self {
            nz: 1024,
            extent_delta: 0.0,
            n_steps: 8192,
            observe_every: 64,
        }
    }
}

/// Targets for the coherence-versus-separation sweep, in δ.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub targets_delta: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            targets_delta: vec![2.0, 5.0, 10.0, 15.0, 20.0],
        }
    }
}

/// Root configuration document.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub beam: BeamSection,
    pub field: FieldSection,
    pub calibration: CalibrationSection,
    pub grid: GridSection,
    pub run: RunSection,
    pub one_dim: OneDimSection,
    pub sweep: SweepSection,
}

impl ExperimentConfig {
    /// Parse a TOML file; unknown keys are rejected.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SgiError::Config(format!("read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| SgiError::Config(format!("config parse: {e}")))
    }

    /// Serialised form of the fully resolved configuration, written next to
    /// run outputs so results stay reproducible.
    pub fn snapshot_toml(&self) -> Result<String> {
        toml::to_string_pretty(self)
            .map_err(|e| SgiError::Config(format!("config snapshot: {e}")))
    }

    pub fn to_phys(&self) -> Result<PhysParams> {
        self.beam.to_phys()
    }

    /// Calibrator configured from this document.
    pub fn calibrator(&self) -> Result<Calibrator> {
        let phys = self.to_phys()?;
        let mut cal = Calibrator::new(phys, self.field.to_profile(), self.field.parity);
        if self.calibration.ladder.is_empty() {
            return Err(SgiError::Config("calibration.ladder must not be empty".into()));
        }
        cal.ladder = self.calibration.ladder.clone();
        cal.max_half_gap_um = self.calibration.max_half_gap_um;
        Ok(cal)
    }

    /// Obtain the operating point: run the nested search, or evaluate the
    /// explicitly supplied pair.
    pub fn resolve_calibration(&self) -> Result<(PhysParams, Calibrator, Calibration)> {
        let phys = self.to_phys()?;
        let calibrator = self.calibrator()?;
        let target = self.calibration.target_delta;
        let cal = match (self.calibration.f_scale, self.calibration.half_gap_um) {
            (Some(f), Some(a_um)) => {
                calibrator.evaluate(f, a_um * BOHR_PER_MICRON, target)?
            }
            (None, None) => calibrator.calibrate(target)?,
            _ => {
                return Err(SgiError::Config(
                    "calibration overrides need both f_scale and half_gap_um".into(),
                ))
            }
        };
        Ok((phys, calibrator, cal))
    }
}
