//! CODATA 2018 physical constants, SI units.

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum, m/s.
pub const C: f64 = 299_792_458.0;
/// Bohr magneton, J/T.
pub const MU_B: f64 = 9.274_010_078_3e-24;
/// Bohr radius, m.
pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;
/// Hartree energy, J.
pub const HARTREE: f64 = 4.359_744_722_207_1e-18;
/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;

/// Atomic unit of polarizability (4πε₀a_B³) expressed in SI, C m² / V.
pub fn polarizability_au_to_si() -> f64 {
    4.0 * std::f64::consts::PI * EPSILON_0 * BOHR_RADIUS.powi(3)
}

/// Frequency (Hz) to angular frequency (rad/s).
pub fn angular(freq_hz: f64) -> f64 {
    2.0 * std::f64::consts::PI * freq_hz
}
