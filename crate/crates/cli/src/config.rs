//! Run configuration: a TOML file merged with command-line overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Polarizability,
    Bragg,
    Interferometer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PulseChoice {
    Bs,
    Br,
}

/// Everything a config file may set. Unset fields take command defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub species_file: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub scan_min: Option<f64>,
    pub scan_max: Option<f64>,
    pub points: Option<usize>,
    /// ħΩ/𝓔₀ for every lattice pulse.
    pub rabi_ratio: Option<f64>,
    /// Ladder window is [−truncation − 1, truncation].
    pub truncation: Option<i32>,
    /// Fraction of the integrator step bound.
    pub dt_factor: Option<f64>,
    /// Free-flight time T, s.
    pub half_time: Option<f64>,
    /// k_x/K₀.
    pub kx_ratio: Option<f64>,
    pub initial_m: Option<i32>,
    pub numerical: Option<bool>,
    pub pulse: Option<PulseChoice>,
    /// Free-form pulse duration, s; overrides the calibrated π/2 or π length.
    pub duration: Option<f64>,
    /// Static field components held fixed during an E_y scan, V/m.
    pub field_x: Option<f64>,
    pub field_z: Option<f64>,
    /// Reflector light detuning below the D2 line, THz.
    pub reflector_offset_thz: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Fields set in `over` replace those in `self`.
    pub fn merged(self, over: RunConfig) -> RunConfig {
        macro_rules! pick {
            ($($f:ident),*) => { RunConfig { $($f: over.$f.or(self.$f)),* } };
        }
        pick!(
            command,
            species_file,
            output,
            scan_min,
            scan_max,
            points,
            rabi_ratio,
            truncation,
            dt_factor,
            half_time,
            kx_ratio,
            initial_m,
            numerical,
            pulse,
            duration,
            field_x,
            field_z,
            reflector_offset_thz
        )
    }
}

/// Scan grid with at least two points over a non-empty range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, points: usize) -> Result<Grid, CliError> {
        if !(min.is_finite() && max.is_finite()) || min >= max {
            return Err(CliError::Usage(format!("empty scan range [{min}, {max}]")));
        }
        if points < 2 {
            return Err(CliError::Usage(format!(
                "need at least 2 scan points, got {points}"
            )));
        }
        Ok(Grid { min, max, points })
    }

    pub fn values(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                if k + 1 == self.points {
                    self.max
                } else {
                    self.min + step * k as f64
                }
            })
            .collect()
    }
}

pub fn check_m(m: i32) -> Result<i32, CliError> {
    if (-1..=1).contains(&m) {
        Ok(m)
    } else {
        Err(CliError::Usage(format!(
            "initial m must be -1, 0 or 1, got {m}"
        )))
    }
}

pub fn check_truncation(n: i32) -> Result<i32, CliError> {
    if n >= 0 {
        Ok(n)
    } else {
        Err(CliError::Usage(format!(
            "truncation must be non-negative, got {n}"
        )))
    }
}

pub fn check_dt_factor(f: f64) -> Result<f64, CliError> {
    if f > 0.0 && f <= 1.0 {
        Ok(f)
    } else {
        Err(CliError::Usage(format!(
            "dt_factor must lie in (0, 1], got {f}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let file = RunConfig {
            points: Some(10),
            scan_min: Some(-1.0),
            ..Default::default()
        };
        let flags = RunConfig {
            points: Some(20),
            ..Default::default()
        };
        let m = file.merged(flags);
        assert_eq!(m.points, Some(20));
        assert_eq!(m.scan_min, Some(-1.0));
    }

    #[test]
    fn parses_toml() {
        let c: RunConfig = toml::from_str(
            "command = \"bragg\"\npulse = \"br\"\nrabi_ratio = 0.01\ntruncation = 4\n",
        )
        .unwrap();
        assert_eq!(c.command, Some(Command::Bragg));
        assert_eq!(c.pulse, Some(PulseChoice::Br));
        assert!(toml::from_str::<RunConfig>("bogus = 1").is_err());
    }

    #[test]
    fn grid_rules() {
        assert!(Grid::new(1.0, 1.0, 5).is_err());
        assert!(Grid::new(0.0, 1.0, 1).is_err());
        let g = Grid::new(-1.0, 1.0, 5).unwrap();
        assert_eq!(g.values(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }
}
