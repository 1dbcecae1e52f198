//! Fixed-step RK4 integration of the coupled rung equations.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;

use super::{
    coupling_block, ladder_energy_offset, DynamicsError, LadderState, PulseKind, PulseSpec,
};
use crate::constants::HBAR;
use crate::spin_algebra::{SpinMatrix, SpinState};

/// Steps per shortest dynamical period.
pub const STEPS_PER_PERIOD: f64 = 50.0;

/// Allowed change of Σ‖𝒳ₙ‖² over one pulse.
pub const NORM_DRIFT_LIMIT: f64 = 1e-8;

/// Tridiagonal block Hamiltonian (in rad/s) for one pulse on one window.
#[derive(Debug, Clone)]
pub struct ChainHamiltonian {
    n_min: i32,
    /// Diagonal energies Δₙ/ħ (+Ω for the reflector), rad/s.
    diagonal: Vec<f64>,
    /// Ω × block coupling 𝒳ₙ to 𝒳ₙ₋₁.
    lower: SpinMatrix,
    /// Ω × block coupling 𝒳ₙ to 𝒳ₙ₊₁.
    upper: SpinMatrix,
    /// Ω × on-site block (reflector only).
    onsite: Option<SpinMatrix>,
}

impl ChainHamiltonian {
    pub fn new(state: &LadderState, pulse: &PulseSpec) -> Self {
        let recoil = super::recoil_energy(pulse.lattice_k, state.mass);
        let diagonal = state
            .rungs()
            .map(|n| ladder_energy_offset(n, recoil) / HBAR)
            .collect();
        // Couplings depend only on n − n′, so rung 0 is representative.
        let lower = coupling_block(pulse.kind, 0, -1).scale_re(pulse.rabi);
        let upper = coupling_block(pulse.kind, 0, 1).scale_re(pulse.rabi);
        let onsite = match pulse.kind {
            PulseKind::Reflector => Some(coupling_block(pulse.kind, 0, 0).scale_re(pulse.rabi)),
            PulseKind::BeamSplitter => None,
        };
        ChainHamiltonian {
            n_min: state.n_min(),
            diagonal,
            lower,
            upper,
            onsite,
        }
    }

    /// out = −i H x.
    fn apply(&self, x: &[SpinState], out: &mut [SpinState]) {
        let minus_i = C64::new(0.0, -1.0);
        let last = x.len() - 1;
        for k in 0..x.len() {
            let mut acc = x[k].scale(C64::new(self.diagonal[k], 0.0));
            if let Some(onsite) = &self.onsite {
                acc += *onsite * x[k];
            }
            if k > 0 {
                acc += self.lower * x[k - 1];
            }
            if k < last {
                acc += self.upper * x[k + 1];
            }
            out[k] = acc.scale(minus_i);
        }
    }

    /// Largest |Δₙ|/ħ on the window, rad/s.
    pub fn max_detuning(&self) -> f64 {
        self.diagonal.iter().fold(0.0, |a: f64, &d| a.max(d.abs()))
    }

    pub fn n_min(&self) -> i32 {
        self.n_min
    }
}

/// dt bound min(2π/Ω, 2πħ/Δ_max)/50; infinite when nothing evolves.
pub fn max_stable_step(state: &LadderState, pulse: &PulseSpec) -> f64 {
    let h = ChainHamiltonian::new(state, pulse);
    let fastest = pulse.rabi.max(h.max_detuning());
    if fastest == 0.0 {
        f64::INFINITY
    } else {
        TAU / fastest / STEPS_PER_PERIOD
    }
}

/// Integrate the rung equations over one pulse.
///
/// The pulse is split into N = ⌈τ/dt⌉ equal steps, so the step actually
/// taken never exceeds `dt`. The returned state has `time = pulse.end()`.
pub fn propagate_chain(
    state: &LadderState,
    pulse: &PulseSpec,
    dt: f64,
) -> Result<LadderState, DynamicsError> {
    propagate_chain_observed(state, pulse, dt, 0, |_| {})
}

/// As [`propagate_chain`], calling `observer` on the initial state, every
/// `every` steps (never if zero), and on the final state.
pub fn propagate_chain_observed<F: FnMut(&LadderState)>(
    state: &LadderState,
    pulse: &PulseSpec,
    dt: f64,
    every: usize,
    mut observer: F,
) -> Result<LadderState, DynamicsError> {
    let bound = max_stable_step(state, pulse);
    if !(dt > 0.0) || dt > bound * (1.0 + 1e-12) {
        return Err(DynamicsError::StepTooLarge { dt, bound });
    }
    if (pulse.lattice_k - state.lattice_k).abs() > 1e-12 * state.lattice_k {
        return Err(DynamicsError::InvalidPulse(
            "pulse and ladder use different lattice wavevectors".into(),
        ));
    }

    let mut current = state.clone();
    current.time = pulse.start();
    observer(&current);
    if pulse.duration == 0.0 {
        return Ok(current);
    }

    let steps = (pulse.duration / dt).ceil().max(1.0) as u64;
    let h = pulse.duration / steps as f64;
    let ham = ChainHamiltonian::new(state, pulse);
    let initial = current.norm_sqr();

    let len = current.amplitudes().len();
    let mut k1 = vec![SpinState::zeros(); len];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut tmp = k1.clone();
    let half = C64::new(0.5 * h, 0.0);
    let full = C64::new(h, 0.0);
    let sixth = C64::new(h / 6.0, 0.0);
    let two = C64::new(2.0, 0.0);

    for step in 1..=steps {
        let x = current.amplitudes_mut();
        ham.apply(x, &mut k1);
        for i in 0..len {
            tmp[i] = x[i] + k1[i].scale(half);
        }
        ham.apply(&tmp, &mut k2);
        for i in 0..len {
            tmp[i] = x[i] + k2[i].scale(half);
        }
        ham.apply(&tmp, &mut k3);
        for i in 0..len {
            tmp[i] = x[i] + k3[i].scale(full);
        }
        ham.apply(&tmp, &mut k4);
        for i in 0..len {
            let incr = k1[i] + k2[i].scale(two) + k3[i].scale(two) + k4[i];
            x[i] += incr.scale(sixth);
        }
        current.time = pulse.start() + step as f64 * h;
        if every > 0 && step % every as u64 == 0 && step != steps {
            observer(&current);
        }
    }
    current.time = pulse.end();
    observer(&current);

    let final_norm = current.norm_sqr();
    let drift = (final_norm - initial).abs();
    if !(drift <= NORM_DRIFT_LIMIT) {
        return Err(DynamicsError::IntegratorFailure {
            drift,
            initial,
            final_norm,
            steps,
            dt: h,
        });
    }
    Ok(current)
}
