//! Beam and particle parameters, stored in internal atomic units.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SgiError};
use crate::units::{Unit, BOHR_MAGNETON_AU};

/// Particle and flight parameters for one interferometer pass.
///
/// All fields are in Hartree atomic units. Use [`PhysParams::silver`] for the
/// standard silver-atom configuration or [`PhysParams::from_external`] to
/// build from laboratory units.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PhysParams {
    /// Particle mass.
    pub mass: f64,
    /// Magnetic moment (μ_B/2 for a ground-state silver atom).
    pub mu: f64,
    /// Apparatus length along the beam.
    pub length: f64,
    /// Total flight time.
    pub t_total: f64,
    /// Beam entry coordinate along y (normally −length/2).
    pub y0: f64,
    /// Longitudinal velocity.
    pub v_y: f64,
    /// Initial wave-packet width.
    pub delta: f64,
}

impl PhysParams {
    /// Silver atom traversing a 25 μm device in 0.1 μs at 250 m/s with a
    /// 0.01 μm packet.
    pub fn silver() -> Self {
        Self::from_external(107.8682, 25.0, 0.1, 0.01).expect("silver defaults are valid")
    }

    /// Build from external units: mass in daltons, length in μm, flight time
    /// in μs, packet width in μm. The velocity is derived as length/time and
    /// the entry point as −length/2.
    pub fn from_external(mass_da: f64, length_um: f64, t_us: f64, delta_um: f64) -> Result<Self> {
        if mass_da <= 0.0 || length_um <= 0.0 || t_us <= 0.0 || delta_um <= 0.0 {
            return Err(SgiError::Config(
                "mass, length, flight time and packet width must be positive".into(),
            ));
        }
        let length = Unit::Micron.to_internal(length_um);
        let t_total = Unit::Microsecond.to_internal(t_us);
        let p = Self {
            mass: Unit::Dalton.to_internal(mass_da),
            mu: BOHR_MAGNETON_AU / 2.0,
            length,
            t_total,
            y0: -length / 2.0,
            v_y: length / t_total,
            delta: Unit::Micron.to_internal(delta_um),
        };
        p.validate()?;
        Ok(p)
    }

    /// Check the kinematic closure conditions.
    pub fn validate(&self) -> Result<()> {
        let closure = (self.v_y * self.t_total - self.length).abs();
        if closure > 1e-12 * self.length {
            return Err(SgiError::Config(format!(
                "v_y * t_total must equal length (off by {:.3e} relative)",
                closure / self.length
            )));
        }
        if (self.y0 + self.length / 2.0).abs() > 1e-12 * self.length {
            return Err(SgiError::Config("y0 must be -length/2".into()));
        }
        Ok(())
    }

    /// Laboratory y coordinate of the co-moving frame origin at time `t`.
    pub fn y_lab(&self, t: f64) -> f64 {
        self.y0 + self.v_y * t
    }

    /// Width growth factor of a free Gaussian packet after time `t`:
    /// sqrt(1 + (ħ t / m δ²)²).
    pub fn free_spreading_ratio(&self, t: f64) -> f64 {
        let x = t / (self.mass * self.delta * self.delta);
        (1.0 + x * x).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn silver_defaults() {
        let p = PhysParams::silver();
        assert!((p.mu - 0.25).abs() < 1e-15);
        // 107.8682 Da in electron masses.
        assert!((p.mass - 196_632.6).abs() / p.mass < 1e-4);
        // v_y comes out at 250 m/s.
        assert!((Unit::MeterPerSecond.from_internal(p.v_y) - 250.0).abs() < 0.15);
        p.validate().unwrap();
    }

    #[test]
    fn spreading_ratio_for_default_flight() {
        let p = PhysParams::silver();
        let ratio = p.free_spreading_ratio(p.t_total);
        assert!((ratio - 1.16).abs() < 0.005, "ratio = {ratio}");
    }

    #[test]
    fn rejects_nonpositive_inputs() {
        assert!(PhysParams::from_external(-1.0, 25.0, 0.1, 0.01).is_err());
        assert!(PhysParams::from_external(107.8682, 25.0, 0.0, 0.01).is_err());
    }
}
