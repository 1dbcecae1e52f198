//! Dynamical scalar and vector polarizabilities of J = 1/2 alkali ground
//! states, the scalar zero crossing, and pulse Rabi frequencies.
//!
//! Polarizabilities are returned in atomic units (a_B³). Conversion to SI
//! happens only when a Rabi frequency is formed.

pub mod species;
pub mod wigner;

use std::io::{self, Write};

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::bragg_dynamics::PulseKind;
use crate::constants::{angular, polarizability_au_to_si, HARTREE, HBAR};
use crate::csv_out::sci;
pub use species::{AtomSpecies, SpeciesError, TransitionLine, GROUND_J};
pub use wigner::{wigner6j, wigner6j_str, HalfInt, HalfIntParseError};

/// Relative bracket width at which bisection is considered converged.
pub const ZERO_REL_TOL: f64 = 1e-12;

/// A detuning closer than this many linewidths flags the result.
pub const NEAR_RESONANCE_LINEWIDTHS: f64 = 10.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolarizabilityError {
    #[error("species has no transition lines")]
    NoLines,
    #[error("angular frequency must be positive and finite, got {0}")]
    BadFrequency(f64),
    #[error("omega sits exactly on the undamped line {0}")]
    OnResonance(String),
    #[error("scalar polarizability does not change sign on [{lo:e}, {hi:e}] rad/s")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("omega_1 = {omega_1:e} must exceed omega_0 = {omega_0:e}")]
    DegenerateGeometry { omega_0: f64, omega_1: f64 },
    #[error("field amplitude must be non-negative, got {0}")]
    BadField(f64),
}

/// Tensor rank of a reduced polarizability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rank {
    Scalar,
    Vector,
}

impl Rank {
    pub fn k(self) -> i32 {
        match self {
            Rank::Scalar => 0,
            Rank::Vector => 1,
        }
    }
}

/// A polarizability value in a_B³ with a validity flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polarizability {
    pub value: f64,
    /// Set when ω is within [`NEAR_RESONANCE_LINEWIDTHS`] linewidths of a line,
    /// where the far-detuned treatment no longer holds.
    pub near_resonance: bool,
}

fn sign_of_power(twice_exponent: i32) -> f64 {
    debug_assert!(twice_exponent % 2 == 0, "phase exponent must be an integer");
    if (twice_exponent / 2).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Reduced dynamical polarizability α_K(ω) in a_B³.
pub fn reduced_polarizability(
    rank: Rank,
    omega: f64,
    species: &AtomSpecies,
) -> Result<Polarizability, PolarizabilityError> {
    if species.lines.is_empty() {
        return Err(PolarizabilityError::NoLines);
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(PolarizabilityError::BadFrequency(omega));
    }
    let k = rank.k();
    let half = HalfInt::HALF;
    let one = HalfInt::ONE;
    let k_half = HalfInt::from_int(k);

    let mut sum = 0.0;
    let mut near_resonance = false;
    for line in &species.lines {
        let detuning = line.omega - omega;
        if detuning == 0.0 && line.gamma == 0.0 {
            return Err(PolarizabilityError::OnResonance(line.label.clone()));
        }
        if detuning.abs() < NEAR_RESONANCE_LINEWIDTHS * line.gamma {
            near_resonance = true;
        }
        // (−1)^{K + J′ + 3/2}
        let phase = sign_of_power(2 * k + line.j_prime.twice() + 3);
        let sixj = wigner6j(one, k_half, one, half, line.j_prime, half);
        let half_gamma = 0.5 * line.gamma;
        let resonant = C64::new(1.0, 0.0) / C64::new(detuning, -half_gamma);
        let counter =
            C64::new(sign_of_power(2 * k), 0.0) / C64::new(line.omega + omega, half_gamma);
        sum += phase * sixj * line.reduced_dipole.powi(2) * (resonant + counter).re;
    }
    // d in e·a_B and frequencies in rad/s: e²a_B²/(ħ·s⁻¹) = (E_h/ħ)·s in a.u.
    let value = f64::from(2 * k + 1).sqrt() * sum * HARTREE / HBAR;
    Ok(Polarizability {
        value,
        near_resonance,
    })
}

/// Scalar polarizability α_s = α₀/√(3(2J+1)).
pub fn scalar_polarizability(
    omega: f64,
    species: &AtomSpecies,
) -> Result<Polarizability, PolarizabilityError> {
    let reduced = reduced_polarizability(Rank::Scalar, omega, species)?;
    let norm = (3.0 * (2.0 * GROUND_J.value() + 1.0)).sqrt();
    Ok(Polarizability {
        value: reduced.value / norm,
        ..reduced
    })
}

/// Prefactor (−1)^{J+I+F} √(2F(2F+1)/(F+1)) {F 1 F; J I J} linking α_v to α₁.
pub fn vector_prefactor(species: &AtomSpecies) -> f64 {
    let j = GROUND_J;
    let i = species.nuclear_spin;
    let f = species.f;
    let phase = sign_of_power(j.twice() + i.twice() + f.twice());
    let fv = f.value();
    let weight = (2.0 * fv * (2.0 * fv + 1.0) / (fv + 1.0)).sqrt();
    phase * weight * wigner6j(f, HalfInt::ONE, f, j, i, j)
}

/// Vector polarizability α_v in a_B³.
pub fn vector_polarizability(
    omega: f64,
    species: &AtomSpecies,
) -> Result<Polarizability, PolarizabilityError> {
    let reduced = reduced_polarizability(Rank::Vector, omega, species)?;
    Ok(Polarizability {
        value: vector_prefactor(species) * reduced.value,
        ..reduced
    })
}

/// Default search window for the scalar zero: 0.5 THz inside each D line.
pub fn default_zero_bracket(species: &AtomSpecies) -> Option<(f64, f64)> {
    let margin = angular(0.5e12);
    Some((species.d1()?.omega + margin, species.d2()?.omega - margin))
}

/// Locate ω₀ with α_s(ω₀) = 0 by bisection.
///
/// Bisection continues past [`ZERO_REL_TOL`] until the bracket can no
/// longer be split in double precision.
pub fn find_scalar_zero(
    species: &AtomSpecies,
    bracket: (f64, f64),
) -> Result<f64, PolarizabilityError> {
    let (mut lo, mut hi) = if bracket.0 <= bracket.1 {
        bracket
    } else {
        (bracket.1, bracket.0)
    };
    let eval = |w: f64| scalar_polarizability(w, species).map(|p| p.value);
    let mut f_lo = eval(lo)?;
    let f_hi = eval(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(PolarizabilityError::NoSignChange { lo, hi });
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = eval(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    debug_assert!((hi - lo) <= ZERO_REL_TOL * hi.abs());
    Ok(0.5 * (lo + hi))
}

fn pulse_polarizability(
    kind: PulseKind,
    species: &AtomSpecies,
    omega: f64,
) -> Result<f64, PolarizabilityError> {
    let alpha = match kind {
        PulseKind::BeamSplitter => vector_polarizability(omega, species)?,
        PulseKind::Reflector => scalar_polarizability(omega, species)?,
    };
    Ok(alpha.value.abs() * polarizability_au_to_si())
}

/// Rabi frequency Ω = |α| E₀²/ħ (rad/s): α_v for the splitter, α_s for the reflector.
pub fn pulse_rabi_frequency(
    kind: PulseKind,
    species: &AtomSpecies,
    omega: f64,
    e0: f64,
) -> Result<f64, PolarizabilityError> {
    if !(e0 >= 0.0 && e0.is_finite()) {
        return Err(PolarizabilityError::BadField(e0));
    }
    Ok(pulse_polarizability(kind, species, omega)? * e0 * e0 / HBAR)
}

/// Field amplitude E₀ (V/m) giving Rabi frequency `rabi`.
pub fn field_for_rabi(
    kind: PulseKind,
    species: &AtomSpecies,
    omega: f64,
    rabi: f64,
) -> Result<f64, PolarizabilityError> {
    Ok((rabi * HBAR / pulse_polarizability(kind, species, omega)?).sqrt())
}

/// Reflector lattice angle θ₁ = arccos(ω₀/ω₁).
pub fn reflector_geometry(omega_0: f64, omega_1: f64) -> Result<f64, PolarizabilityError> {
    if !(omega_1 > omega_0) || omega_0 <= 0.0 {
        return Err(PolarizabilityError::DegenerateGeometry { omega_0, omega_1 });
    }
    Ok((omega_0 / omega_1).acos())
}

/// One row of a polarizability scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    /// (ω − ω_D1)/2π in THz.
    pub offset_thz: f64,
    pub alpha_s: f64,
    pub alpha_v: f64,
}

/// Evaluate α_s and α_v at frequency offsets (THz) above the D1 line.
pub fn scan_row(species: &AtomSpecies, offset_thz: f64) -> Result<ScanRow, PolarizabilityError> {
    let d1 = species.d1().ok_or(PolarizabilityError::NoLines)?;
    let omega = d1.omega + angular(offset_thz * 1e12);
    Ok(ScanRow {
        offset_thz,
        alpha_s: scalar_polarizability(omega, species)?.value,
        alpha_v: vector_polarizability(omega, species)?.value,
    })
}

pub const SCAN_HEADER: &str = "offset_from_D1_THz,alpha_s_a0^3,alpha_v_a0^3";

pub fn write_scan_csv<W: Write>(out: &mut W, rows: &[ScanRow]) -> io::Result<()> {
    writeln!(out, "{SCAN_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{}",
            sci(r.offset_thz),
            sci(r.alpha_s),
            sci(r.alpha_v)
        )?;
    }
    Ok(())
}
