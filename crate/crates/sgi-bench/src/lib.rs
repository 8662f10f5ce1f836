//! Shared fixtures for the benchmark suite.
//!
//! Every benchmark runs at the same frozen 5 δ operating point so timings
//! stay comparable between revisions; nothing here searches or calibrates.

use sgi_core::field::{FieldModel, FieldProfile, LineParity};
use sgi_core::units::BOHR_PER_MICRON;
use sgi_core::{PhysParams, Result};

/// Field scale of the frozen 5 δ operating point.
pub const F_SCALE: f64 = 2.1630760e-4;
/// Source-line half-gap of the frozen operating point, μm.
pub const HALF_GAP_UM: f64 = 0.722201;

/// Silver-atom beam parameters used throughout the benchmarks.
pub fn phys() -> PhysParams {
    PhysParams::silver()
}

/// Calibrated aperture-field model at the frozen operating point.
pub fn model() -> Result<FieldModel> {
    FieldModel::new(
        FieldProfile::default(),
        LineParity::Aligned,
        HALF_GAP_UM * BOHR_PER_MICRON,
        F_SCALE,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_construct() {
        let p = phys();
        let m = model().unwrap();
        assert!(p.delta > 0.0);
        assert!(m.scale > 0.0);
    }
}
