//! Spinor amplitudes on the Bragg momentum ladder.
//!
//! Rung n carries plane wave k_n = (k_x, (2n+1)K₀, 0) and a spinor 𝒳ₙ. The
//! common phase e^{−iε_{k₀}t/ħ} is stripped, so rungs 0 and −1 have zero
//! detuning and rung n sits at 4𝓔₀n(n+1) above them.

mod analytic;
mod chain;

use std::io::{self, Write};

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::constants::HBAR;
use crate::csv_out::sci;
use crate::spin_algebra::{m_index, spin_operators, SpinMatrix, SpinState, M_VALUES};

pub use analytic::{
    analytic_br, analytic_br_area, analytic_bs, analytic_bs_area, analytic_pulse, bs_blocks,
    bs_unitaries, max_deviation, max_deviation_up_to_phase, overlap_modulus,
};
pub use chain::{
    max_stable_step, propagate_chain, propagate_chain_observed, ChainHamiltonian, NORM_DRIFT_LIMIT,
    STEPS_PER_PERIOD,
};

/// Default rung window, symmetric in energy since ε_n = ε_{−n−1}.
pub const DEFAULT_N_MIN: i32 = -4;
pub const DEFAULT_N_MAX: i32 = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("invalid ladder: {0}")]
    InvalidLadder(String),
    #[error("invalid pulse: {0}")]
    InvalidPulse(String),
    #[error("time step {dt:e} s exceeds the resolution bound {bound:e} s")]
    StepTooLarge { dt: f64, bound: f64 },
    #[error(
        "integrator norm drift {drift:e} exceeds limit \
         (initial {initial:.15}, final {final_norm:.15}, {steps} steps of {dt:e} s)"
    )]
    IntegratorFailure {
        drift: f64,
        initial: f64,
        final_norm: f64,
        steps: u64,
        dt: f64,
    },
    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PulseKind {
    /// Spin-dependent π/2 splitter, H = ħΩ sin(2K₀y) F_y.
    BeamSplitter,
    /// Spin-independent π reflector, H = ħΩ[1 + cos(2K₀y)].
    Reflector,
}

/// A rectangular lattice pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    pub kind: PulseKind,
    /// Rabi frequency, rad/s.
    pub rabi: f64,
    /// Duration, s.
    pub duration: f64,
    /// Lattice wavevector K₀, rad/m.
    pub lattice_k: f64,
    /// Pulse centre, s.
    pub center_time: f64,
    /// True when the duration was derived from the Rabi frequency
    /// (π/2 for the splitter, π for the reflector).
    pub calibrated: bool,
}

impl PulseSpec {
    /// π/2 splitter pulse, τ = π/(2Ω).
    pub fn beam_splitter(
        rabi: f64,
        lattice_k: f64,
        center_time: f64,
    ) -> Result<Self, DynamicsError> {
        Self::calibrated(PulseKind::BeamSplitter, rabi, lattice_k, center_time)
    }

    /// π reflector pulse, τ = π/Ω.
    pub fn reflector(rabi: f64, lattice_k: f64, center_time: f64) -> Result<Self, DynamicsError> {
        Self::calibrated(PulseKind::Reflector, rabi, lattice_k, center_time)
    }

    fn calibrated(
        kind: PulseKind,
        rabi: f64,
        lattice_k: f64,
        center_time: f64,
    ) -> Result<Self, DynamicsError> {
        if !(rabi > 0.0 && rabi.is_finite()) {
            return Err(DynamicsError::InvalidPulse(format!(
                "calibrated pulses need a positive Rabi frequency, got {rabi}"
            )));
        }
        let area = match kind {
            PulseKind::BeamSplitter => std::f64::consts::FRAC_PI_2,
            PulseKind::Reflector => std::f64::consts::PI,
        };
        let pulse = PulseSpec {
            kind,
            rabi,
            duration: area / rabi,
            lattice_k,
            center_time,
            calibrated: true,
        };
        pulse.check()?;
        Ok(pulse)
    }

    /// Free-form pulse; not flagged as calibrated.
    pub fn custom(
        kind: PulseKind,
        rabi: f64,
        duration: f64,
        lattice_k: f64,
        center_time: f64,
    ) -> Result<Self, DynamicsError> {
        let pulse = PulseSpec {
            kind,
            rabi,
            duration,
            lattice_k,
            center_time,
            calibrated: false,
        };
        pulse.check()?;
        Ok(pulse)
    }

    fn check(&self) -> Result<(), DynamicsError> {
        if !(self.rabi >= 0.0 && self.rabi.is_finite()) {
            return Err(DynamicsError::InvalidPulse(format!(
                "Rabi frequency {}",
                self.rabi
            )));
        }
        if !(self.duration >= 0.0 && self.duration.is_finite()) {
            return Err(DynamicsError::InvalidPulse(format!(
                "duration {}",
                self.duration
            )));
        }
        if !(self.lattice_k > 0.0 && self.lattice_k.is_finite()) {
            return Err(DynamicsError::InvalidPulse(format!(
                "lattice wavevector {}",
                self.lattice_k
            )));
        }
        Ok(())
    }

    /// Pulse area Ω·τ.
    pub fn area(&self) -> f64 {
        self.rabi * self.duration
    }

    pub fn start(&self) -> f64 {
        self.center_time - 0.5 * self.duration
    }

    pub fn end(&self) -> f64 {
        self.center_time + 0.5 * self.duration
    }
}

/// Recoil energy 𝓔₀ = ħ²K₀²/(2M), J.
pub fn recoil_energy(lattice_k: f64, mass: f64) -> f64 {
    HBAR * HBAR * lattice_k * lattice_k / (2.0 * mass)
}

/// ε_{k_n} − ε_{k_0} = 4𝓔₀ n(n+1).
pub fn ladder_energy_offset(n: i32, recoil: f64) -> f64 {
    let n = f64::from(n);
    4.0 * recoil * n * (n + 1.0)
}

/// Spin factor of the splitter coupling, in closed form
/// −(i/√2)(δ_{m,m′−1} − δ_{m,m′+1}).
///
/// This is (F_y)_{m′,m}, the transpose of the F_y matrix element; it fixes
/// the lattice phase so that the two-rung reduction yields the π/2 unitary
/// [[𝒱_T, 𝒱_R], [−𝒱_R, 𝒱_T]].
pub fn lattice_spin_factor(m: i32, m_prime: i32) -> C64 {
    let delta = |a: i32, b: i32| if a == b { 1.0 } else { 0.0 };
    C64::new(0.0, -std::f64::consts::FRAC_1_SQRT_2)
        * (delta(m, m_prime - 1) - delta(m, m_prime + 1))
}

/// Splitter matrix element ℬ between |k_n, m⟩ and |k_n′, m′⟩, in units of ħΩ_BS.
pub fn bs_coupling(n: i32, n_prime: i32, m: i32, m_prime: i32) -> C64 {
    let delta = |a: i32, b: i32| if a == b { 1.0 } else { 0.0 };
    let rung = delta(n, n_prime + 1) - delta(n, n_prime - 1);
    if rung == 0.0 {
        return C64::new(0.0, 0.0);
    }
    C64::new(0.0, -0.5) * lattice_spin_factor(m, m_prime) * rung
}

/// Reflector matrix element between |k_n, m⟩ and |k_n′, m′⟩, in units of ħΩ_BR.
pub fn br_coupling(n: i32, n_prime: i32, m: i32, m_prime: i32) -> C64 {
    if m != m_prime {
        return C64::new(0.0, 0.0);
    }
    let value = if n == n_prime {
        1.0
    } else if (n - n_prime).abs() == 1 {
        0.5
    } else {
        0.0
    };
    C64::new(value, 0.0)
}

/// Spin block of a coupling between rungs n and n′.
pub fn coupling_block(kind: PulseKind, n: i32, n_prime: i32) -> SpinMatrix {
    let mut block = SpinMatrix::zeros();
    for &m in &M_VALUES {
        for &mp in &M_VALUES {
            let v = match kind {
                PulseKind::BeamSplitter => bs_coupling(n, n_prime, m, mp),
                PulseKind::Reflector => br_coupling(n, n_prime, m, mp),
            };
            block.0[(m_index(m).expect("valid m"), m_index(mp).expect("valid m"))] = v;
        }
    }
    block
}

/// Spinor amplitudes on a truncated momentum ladder [n_min, n_max].
#[derive(Debug, Clone, PartialEq)]
pub struct LadderState {
    /// Transverse wavevector k_x, rad/m.
    pub k_x: f64,
    /// Lattice wavevector K₀, rad/m.
    pub lattice_k: f64,
    /// Atomic mass, kg.
    pub mass: f64,
    /// Time, s.
    pub time: f64,
    n_min: i32,
    n_max: i32,
    amplitudes: Vec<SpinState>,
}

impl LadderState {
    /// All-zero ladder.
    pub fn new(
        k_x: f64,
        lattice_k: f64,
        mass: f64,
        n_min: i32,
        n_max: i32,
    ) -> Result<Self, DynamicsError> {
        if !(n_min <= -1 && n_max >= 0) {
            return Err(DynamicsError::InvalidLadder(format!(
                "rung window [{n_min}, {n_max}] must contain 0 and -1"
            )));
        }
        if !(lattice_k > 0.0 && mass > 0.0) {
            return Err(DynamicsError::InvalidLadder(
                "lattice wavevector and mass must be positive".into(),
            ));
        }
        let len = (n_max - n_min + 1) as usize;
        Ok(LadderState {
            k_x,
            lattice_k,
            mass,
            time: 0.0,
            n_min,
            n_max,
            amplitudes: vec![SpinState::zeros(); len],
        })
    }

    /// Ladder with `spin` on rung 0 and nothing elsewhere.
    pub fn with_initial(
        k_x: f64,
        lattice_k: f64,
        mass: f64,
        n_min: i32,
        n_max: i32,
        spin: SpinState,
    ) -> Result<Self, DynamicsError> {
        let mut state = Self::new(k_x, lattice_k, mass, n_min, n_max)?;
        state.set_rung(0, spin)?;
        Ok(state)
    }

    pub fn n_min(&self) -> i32 {
        self.n_min
    }

    pub fn n_max(&self) -> i32 {
        self.n_max
    }

    pub fn rungs(&self) -> std::ops::RangeInclusive<i32> {
        self.n_min..=self.n_max
    }

    fn slot(&self, n: i32) -> Option<usize> {
        (self.n_min..=self.n_max)
            .contains(&n)
            .then(|| (n - self.n_min) as usize)
    }

    /// 𝒳ₙ, or zero outside the window.
    pub fn rung(&self, n: i32) -> SpinState {
        self.slot(n)
            .map(|k| self.amplitudes[k])
            .unwrap_or_else(SpinState::zeros)
    }

    pub fn set_rung(&mut self, n: i32, spin: SpinState) -> Result<(), DynamicsError> {
        let k = self
            .slot(n)
            .ok_or_else(|| DynamicsError::InvalidLadder(format!("rung {n} outside window")))?;
        self.amplitudes[k] = spin;
        Ok(())
    }

    /// Keep only the listed rungs; zero the rest.
    pub fn retain_rungs(&mut self, keep: &[i32]) {
        let n_min = self.n_min;
        for (k, amp) in self.amplitudes.iter_mut().enumerate() {
            if !keep.contains(&(n_min + k as i32)) {
                *amp = SpinState::zeros();
            }
        }
    }

    pub fn amplitudes(&self) -> &[SpinState] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [SpinState] {
        &mut self.amplitudes
    }

    pub fn recoil_energy(&self) -> f64 {
        recoil_energy(self.lattice_k, self.mass)
    }

    /// Σₙ ‖𝒳ₙ‖².
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(SpinState::norm_sqr).sum()
    }

    /// ‖𝒳ₙ‖² for rung n.
    pub fn population(&self, n: i32) -> f64 {
        self.rung(n).norm_sqr()
    }

    /// Same window with the given amplitudes on rungs 0 and −1.
    pub fn replace_pair(&self, x0: SpinState, x_m1: SpinState) -> LadderState {
        let mut out = self.clone();
        out.set_rung(0, x0).expect("rung 0 in window");
        out.set_rung(-1, x_m1).expect("rung -1 in window");
        out
    }
}

pub const TIME_SERIES_HEADER: &str = "t_s,n,m,re_X,im_X,abs2_X";

/// Append one snapshot as (t, n, m, Re 𝒳, Im 𝒳, |𝒳|²) rows.
pub fn write_snapshot_rows<W: Write>(out: &mut W, state: &LadderState) -> io::Result<()> {
    for n in state.rungs() {
        let spin = state.rung(n);
        for (&m, z) in M_VALUES.iter().zip(spin.iter()) {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                sci(state.time),
                n,
                m,
                sci(z.re),
                sci(z.im),
                sci(z.norm_sqr())
            )?;
        }
    }
    Ok(())
}

/// F_y, used by the spin-parity checks.
pub(crate) fn fy() -> SpinMatrix {
    spin_operators().1
}
