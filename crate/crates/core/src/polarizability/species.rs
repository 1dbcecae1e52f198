//! Atomic species data and its structured-text file format.
//!
//! A species file is TOML. Units are declared in a `[units]` table and the
//! loader refuses anything it does not recognise:
//!
//! ```toml
//! name = "87Rb"
//! mass = 1.443160648e-25
//! I = "3/2"
//! F = "1"
//! g_J = 2.00233113
//! g_I = -0.0009951414
//!
//! [units]
//! mass = "kg"
//! omega = "angular_THz"      # value ν in THz, ω = 2π·ν·10¹²
//! reduced_dipole = "e*a0"
//! gamma = "angular_MHz"      # value in MHz, γ = 2π·value·10⁶
//!
//! [[lines]]
//! label = "D1"
//! J_prime = "1/2"
//! omega = 377.107463380
//! reduced_dipole = 4.2328826
//! gamma = 5.7500
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::wigner::HalfInt;
use crate::constants::angular;

#[derive(Debug, Error)]
pub enum SpeciesError {
    #[error("cannot read species file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed species file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("unsupported unit {found:?} for {field} (expected {expected:?})")]
    Unit {
        field: &'static str,
        found: String,
        expected: &'static str,
    },
    #[error("invalid species data: {0}")]
    Invalid(String),
}

/// One electric-dipole transition from the J = 1/2 ground state.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionLine {
    pub label: String,
    /// Upper-state J′.
    pub j_prime: HalfInt,
    /// Transition angular frequency, rad/s.
    pub omega: f64,
    /// Reduced dipole ⟨n′1J′‖−er‖n0½⟩ in e·a_B (Racah normalization).
    pub reduced_dipole: f64,
    /// Natural linewidth, rad/s.
    pub gamma: f64,
}

/// A J = 1/2 ground-state alkali atom in hyperfine level F.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomSpecies {
    pub name: String,
    /// Mass, kg.
    pub mass: f64,
    pub nuclear_spin: HalfInt,
    pub f: HalfInt,
    pub g_j: f64,
    pub g_i: f64,
    pub lines: Vec<TransitionLine>,
}

/// Ground-state electronic angular momentum; fixed for alkali atoms.
pub const GROUND_J: HalfInt = HalfInt::HALF;

impl AtomSpecies {
    pub fn validate(&self) -> Result<(), SpeciesError> {
        let bad = |msg: String| Err(SpeciesError::Invalid(msg));
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return bad(format!("mass must be positive, got {}", self.mass));
        }
        if self.nuclear_spin.twice() < 0 {
            return bad(format!(
                "nuclear spin I = {} is negative",
                self.nuclear_spin
            ));
        }
        let f_allowed = [
            self.nuclear_spin - HalfInt::HALF,
            self.nuclear_spin + HalfInt::HALF,
        ];
        if !f_allowed.contains(&self.f) || self.f.twice() < 0 {
            return bad(format!(
                "F = {} is not I ± 1/2 for I = {}",
                self.f, self.nuclear_spin
            ));
        }
        for line in &self.lines {
            if !(line.omega > 0.0 && line.omega.is_finite()) {
                return bad(format!("line {}: omega must be positive", line.label));
            }
            if !(line.gamma >= 0.0 && line.gamma.is_finite()) {
                return bad(format!("line {}: gamma must be non-negative", line.label));
            }
            if !(line.reduced_dipole > 0.0 && line.reduced_dipole.is_finite()) {
                return bad(format!(
                    "line {}: reduced dipole must be positive",
                    line.label
                ));
            }
            if line.j_prime != HalfInt::from_twice(1) && line.j_prime != HalfInt::from_twice(3) {
                return bad(format!(
                    "line {}: J' = {} is not 1/2 or 3/2",
                    line.label, line.j_prime
                ));
            }
        }
        if self.d1().is_none() || self.d2().is_none() {
            return bad("species needs both a J'=1/2 (D1) and a J'=3/2 (D2) line".into());
        }
        Ok(())
    }

    /// The lowest-frequency J′ = 1/2 line.
    pub fn d1(&self) -> Option<&TransitionLine> {
        self.lowest_line(HalfInt::from_twice(1))
    }

    /// The lowest-frequency J′ = 3/2 line.
    pub fn d2(&self) -> Option<&TransitionLine> {
        self.lowest_line(HalfInt::from_twice(3))
    }

    fn lowest_line(&self, j_prime: HalfInt) -> Option<&TransitionLine> {
        self.lines
            .iter()
            .filter(|l| l.j_prime == j_prime)
            .min_by(|a, b| a.omega.total_cmp(&b.omega))
    }

    /// Same atom in the other hyperfine level (or the same one).
    pub fn with_hyperfine_f(&self, f: HalfInt) -> Result<AtomSpecies, SpeciesError> {
        let out = AtomSpecies { f, ..self.clone() };
        out.validate()?;
        Ok(out)
    }

    pub fn from_toml_str(text: &str) -> Result<AtomSpecies, SpeciesError> {
        let file: SpeciesFile = toml::from_str(text)?;
        file.into_species()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<AtomSpecies, SpeciesError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| SpeciesError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    /// The bundled ⁸⁷Rb data set (F = 1).
    pub fn rubidium87() -> AtomSpecies {
        Self::from_toml_str(RB87_TOML).expect("bundled 87Rb data is valid")
    }
}

/// Contents of `data/rb87.toml`.
pub const RB87_TOML: &str = include_str!("../../data/rb87.toml");

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UnitsTable {
    mass: String,
    omega: String,
    reduced_dipole: String,
    gamma: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LineRecord {
    label: String,
    #[serde(rename = "J_prime")]
    j_prime: HalfInt,
    omega: f64,
    reduced_dipole: f64,
    gamma: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpeciesFile {
    name: String,
    mass: f64,
    #[serde(rename = "I")]
    nuclear_spin: HalfInt,
    #[serde(rename = "F")]
    f: HalfInt,
    #[serde(rename = "g_J")]
    g_j: f64,
    #[serde(rename = "g_I")]
    g_i: f64,
    units: UnitsTable,
    lines: Vec<LineRecord>,
}

fn expect_unit(
    field: &'static str,
    found: &str,
    expected: &'static str,
) -> Result<(), SpeciesError> {
    if found == expected {
        Ok(())
    } else {
        Err(SpeciesError::Unit {
            field,
            found: found.to_string(),
            expected,
        })
    }
}

impl SpeciesFile {
    fn into_species(self) -> Result<AtomSpecies, SpeciesError> {
        expect_unit("mass", &self.units.mass, "kg")?;
        expect_unit("omega", &self.units.omega, "angular_THz")?;
        expect_unit("reduced_dipole", &self.units.reduced_dipole, "e*a0")?;
        expect_unit("gamma", &self.units.gamma, "angular_MHz")?;
        let lines = self
            .lines
            .into_iter()
            .map(|r| TransitionLine {
                label: r.label,
                j_prime: r.j_prime,
                omega: angular(r.omega * 1e12),
                reduced_dipole: r.reduced_dipole,
                gamma: angular(r.gamma * 1e6),
            })
            .collect();
        let species = AtomSpecies {
            name: self.name,
            mass: self.mass,
            nuclear_spin: self.nuclear_spin,
            f: self.f,
            g_j: self.g_j,
            g_i: self.g_i,
            lines,
        };
        species.validate()?;
        Ok(species)
    }
}
