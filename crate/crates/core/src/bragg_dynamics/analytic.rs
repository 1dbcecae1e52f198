//! Closed-form two-rung pulses (Bragg regime, Ω ≪ 𝓔₀/ħ).

use num_complex::Complex64 as C64;

use super::{fy, DynamicsError, LadderState, PulseKind, PulseSpec};
use crate::spin_algebra::{quadrupole, Axis, SpinMatrix, SpinState, IDENTITY_TOL};

/// cos(θF_y/2) and sin(θF_y/2); for spin 1 these reduce to
/// I + (cos(θ/2) − 1)F_y² and sin(θ/2)F_y.
pub fn bs_blocks(theta: f64) -> (SpinMatrix, SpinMatrix) {
    let fy = fy();
    let c = SpinMatrix::identity() + (fy * fy).scale_re((0.5 * theta).cos() - 1.0);
    let s = fy.scale_re((0.5 * theta).sin());
    (c, s)
}

/// 𝒱_T = ((√2+1)/3)I − ((√2−1)/(2√2))Q_yy and 𝒱_R = F_y/√2.
///
/// Both forms are checked against cos(πF_y/4), sin(πF_y/4) and against
/// 𝒱_T² + 𝒱_R² = I, [𝒱_T, 𝒱_R] = 0.
pub fn bs_unitaries() -> Result<(SpinMatrix, SpinMatrix), DynamicsError> {
    let sqrt2 = std::f64::consts::SQRT_2;
    let vt = SpinMatrix::identity().scale_re((sqrt2 + 1.0) / 3.0)
        - quadrupole(Axis::Y, Axis::Y).scale_re((sqrt2 - 1.0) / (2.0 * sqrt2));
    let vr = fy().scale_re(std::f64::consts::FRAC_1_SQRT_2);

    let fail = |what: &str, dev: f64| {
        Err(DynamicsError::InternalConsistency(format!(
            "{what} deviates by {dev:e}"
        )))
    };
    let (c, s) = bs_blocks(std::f64::consts::FRAC_PI_2);
    let dev = vt.max_abs_diff(&c);
    if dev > IDENTITY_TOL {
        return fail("V_T vs cos(pi F_y/4)", dev);
    }
    let dev = vr.max_abs_diff(&s);
    if dev > IDENTITY_TOL {
        return fail("V_R vs sin(pi F_y/4)", dev);
    }
    let dev = (vt * vt + vr * vr).max_abs_diff(&SpinMatrix::identity());
    if dev > IDENTITY_TOL {
        return fail("V_T^2 + V_R^2 - I", dev);
    }
    let dev = vt.commutator(&vr).max_abs();
    if dev > IDENTITY_TOL {
        return fail("[V_T, V_R]", dev);
    }
    Ok((vt, vr))
}

/// Splitter of area θ on (𝒳₀, 𝒳₋₁).
pub fn analytic_bs_area(x0: SpinState, x_m1: SpinState, theta: f64) -> (SpinState, SpinState) {
    let (c, s) = bs_blocks(theta);
    (c * x0 + s * x_m1, c * x_m1 - s * x0)
}

/// π/2 splitter: (𝒱_T𝒳₀ + 𝒱_R𝒳₋₁, −𝒱_R𝒳₀ + 𝒱_T𝒳₋₁).
pub fn analytic_bs(x0: SpinState, x_m1: SpinState) -> (SpinState, SpinState) {
    analytic_bs_area(x0, x_m1, std::f64::consts::FRAC_PI_2)
}

/// Reflector of area θ on (𝒳₀, 𝒳₋₁), including the global e^{−iθ}.
pub fn analytic_br_area(x0: SpinState, x_m1: SpinState, theta: f64) -> (SpinState, SpinState) {
    let global = C64::from_polar(1.0, -theta);
    let c = C64::new((0.5 * theta).cos(), 0.0) * global;
    let s = C64::new(0.0, -(0.5 * theta).sin()) * global;
    (x0.scale(c) + x_m1.scale(s), x0.scale(s) + x_m1.scale(c))
}

/// π reflector without its global phase: (−i𝒳₋₁, −i𝒳₀).
pub fn analytic_br(x0: SpinState, x_m1: SpinState) -> (SpinState, SpinState) {
    let minus_i = C64::new(0.0, -1.0);
    (x_m1.scale(minus_i), x0.scale(minus_i))
}

/// Two-rung closed form applied to a ladder; other rungs are dropped.
pub fn analytic_pulse(state: &LadderState, pulse: &PulseSpec) -> LadderState {
    let (x0, x_m1) = (state.rung(0), state.rung(-1));
    let (y0, y_m1) = match pulse.kind {
        PulseKind::BeamSplitter => analytic_bs_area(x0, x_m1, pulse.area()),
        PulseKind::Reflector => analytic_br_area(x0, x_m1, pulse.area()),
    };
    let mut out = state.replace_pair(y0, y_m1);
    out.retain_rungs(&[0, -1]);
    out.time = pulse.end();
    out
}

/// Largest amplitude difference over the union of both windows.
pub fn max_deviation(a: &LadderState, b: &LadderState) -> f64 {
    let lo = a.n_min().min(b.n_min());
    let hi = a.n_max().max(b.n_max());
    (lo..=hi)
        .map(|n| a.rung(n).max_abs_diff(&b.rung(n)))
        .fold(0.0, f64::max)
}

/// |⟨a|b⟩| over the whole ladder.
pub fn overlap_modulus(a: &LadderState, b: &LadderState) -> f64 {
    let lo = a.n_min().min(b.n_min());
    let hi = a.n_max().max(b.n_max());
    (lo..=hi)
        .map(|n| a.rung(n).inner(&b.rung(n)))
        .sum::<C64>()
        .norm()
}

/// Largest amplitude difference after removing the best global phase.
pub fn max_deviation_up_to_phase(a: &LadderState, b: &LadderState) -> f64 {
    let lo = a.n_min().min(b.n_min());
    let hi = a.n_max().max(b.n_max());
    let overlap: C64 = (lo..=hi).map(|n| b.rung(n).inner(&a.rung(n))).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    (lo..=hi)
        .map(|n| a.rung(n).max_abs_diff(&b.rung(n).scale(phase)))
        .fold(0.0, f64::max)
}
