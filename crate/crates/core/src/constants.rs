//! CODATA 2018 physical constants (SI, exact where the SI defines them).

/// Planck constant, J·s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = PLANCK / (2.0 * std::f64::consts::PI);
/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Electron rest mass, kg.
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Electron rest energy, eV.
pub const ELECTRON_REST_ENERGY_EV: f64 = 510_998.950_00;
/// Bohr magneton e·ħ/(2mₑ), J/T.
pub const BOHR_MAGNETON: f64 = ELEMENTARY_CHARGE * HBAR / (2.0 * ELECTRON_MASS);
/// h·c expressed in eV·m.
pub const HC_EV_M: f64 = PLANCK * SPEED_OF_LIGHT / ELEMENTARY_CHARGE;
