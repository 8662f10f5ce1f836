//! Unit handling. All state inside the simulator is kept in Hartree atomic
//! units (ħ = mₑ = e = 1); every I/O boundary converts through [`Unit`].

/// Bohr radius in metres (CODATA 2018).
pub const BOHR_RADIUS_M: f64 = 5.291_772_109_03e-11;
/// Atomic unit of time in seconds, ħ/E_h (CODATA 2018).
pub const ATOMIC_TIME_S: f64 = 2.418_884_326_585_7e-17;
/// Atomic unit of velocity in m/s, a₀·E_h/ħ.
pub const ATOMIC_VELOCITY_M_PER_S: f64 = 2.187_691_263_64e6;
/// Electron masses per dalton (CODATA 2018).
pub const ELECTRON_MASSES_PER_DALTON: f64 = 1.822_888_486_209e3;
/// Bohr magneton in atomic units of magnetic moment.
pub const BOHR_MAGNETON_AU: f64 = 0.5;

/// Bohr radii per micrometre.
pub const BOHR_PER_MICRON: f64 = 1.0e-6 / BOHR_RADIUS_M;
/// Atomic time units per microsecond.
pub const ATU_PER_MICROSECOND: f64 = 1.0e-6 / ATOMIC_TIME_S;

/// Dimensioned quantity tags used at the I/O boundary.
///
/// Magnetic field strengths cross the boundary already expressed in atomic
/// units, so `MagneticAu` converts with factor one; it exists so call sites
/// state their intent explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Micron,
    Microsecond,
    MeterPerSecond,
    Dalton,
    InverseMicron,
    MagneticAu,
}

impl Unit {
    /// Multiplicative factor taking one external unit to internal units.
    pub fn factor(self) -> f64 {
        match self {
            Unit::Micron => BOHR_PER_MICRON,
            Unit::Microsecond => ATU_PER_MICROSECOND,
            Unit::MeterPerSecond => 1.0 / ATOMIC_VELOCITY_M_PER_S,
            Unit::Dalton => ELECTRON_MASSES_PER_DALTON,
            Unit::InverseMicron => 1.0 / BOHR_PER_MICRON,
            Unit::MagneticAu => 1.0,
        }
    }

    /// Convert a value carrying this unit into internal atomic units.
    pub fn to_internal(self, value: f64) -> f64 {
        value * self.factor()
    }

    /// Convert an internal value back into this unit.
    pub fn from_internal(self, value: f64) -> f64 {
        value / self.factor()
    }
}
