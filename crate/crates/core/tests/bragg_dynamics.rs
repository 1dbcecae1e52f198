use num_complex::Complex64 as C64;
use spinbragg::bragg_dynamics::*;
use spinbragg::constants::HBAR;
use spinbragg::spin_algebra::{SpinState, M_VALUES};

// Units with 𝓔₀/ħ = 1 rad/s, so a Rabi frequency equals ħΩ/𝓔₀.
const TOY_MASS: f64 = HBAR / 2.0;

fn ladder(spin: SpinState, n_min: i32, n_max: i32) -> LadderState {
    LadderState::with_initial(0.0, 1.0, TOY_MASS, n_min, n_max, spin).unwrap()
}

fn chi(m: i32) -> SpinState {
    SpinState::basis(m).unwrap()
}

fn run(state: &LadderState, pulse: &PulseSpec) -> LadderState {
    let dt = max_stable_step(state, pulse);
    propagate_chain(state, pulse, dt).unwrap()
}

#[test]
fn recoil_energy_in_toy_units() {
    assert!((recoil_energy(1.0, TOY_MASS) / HBAR - 1.0).abs() < 1e-15);
}

#[test]
fn splitter_populations_at_small_ratio() {
    let s = ladder(chi(1), DEFAULT_N_MIN, DEFAULT_N_MAX);
    let out = run(&s, &PulseSpec::beam_splitter(0.01, 1.0, 0.0).unwrap());
    assert!((out.population(0) - 0.75).abs() < 2e-3);
    assert!((out.population(-1) - 0.25).abs() < 2e-3);
    let leak: f64 = out
        .rungs()
        .filter(|n| *n != 0 && *n != -1)
        .map(|n| out.population(n))
        .sum();
    assert!(leak < 1e-3, "leakage {leak}");
    assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
}

#[test]
fn reflector_swaps_at_small_ratio() {
    let s = ladder(chi(0), DEFAULT_N_MIN, DEFAULT_N_MAX);
    let out = run(&s, &PulseSpec::reflector(0.01, 1.0, 0.0).unwrap());
    assert!(out.population(0) < 2e-3);
    assert!((out.population(-1) - 1.0).abs() < 2e-3);
}

#[test]
fn convergence_to_two_rung_pulses_is_monotone() {
    for kind in [PulseKind::BeamSplitter, PulseKind::Reflector] {
        let mut last = f64::INFINITY;
        for ratio in [0.1, 0.03, 0.01] {
            let pulse = match kind {
                PulseKind::BeamSplitter => PulseSpec::beam_splitter(ratio, 1.0, 0.0),
                PulseKind::Reflector => PulseSpec::reflector(ratio, 1.0, 0.0),
            }
            .unwrap();
            let s = ladder(chi(1), DEFAULT_N_MIN, DEFAULT_N_MAX);
            let dev = max_deviation(&run(&s, &pulse), &analytic_pulse(&s, &pulse));
            assert!(dev < last, "{kind:?} ratio {ratio}: {dev} !< {last}");
            last = dev;
        }
        assert!(last < 2e-3, "{kind:?}: {last}");
    }
}

#[test]
fn truncation_insensitive() {
    let pulse = PulseSpec::beam_splitter(0.01, 1.0, 0.0).unwrap();
    let narrow = run(&ladder(chi(1), -4, 3), &pulse);
    let wide = run(&ladder(chi(1), -6, 5), &pulse);
    assert!(max_deviation(&narrow, &wide) < 1e-6);
}

#[test]
fn reflector_matches_up_to_global_phase() {
    let s = ladder(chi(-1), DEFAULT_N_MIN, DEFAULT_N_MAX);
    let pulse = PulseSpec::reflector(0.01, 1.0, 0.0).unwrap();
    let numeric = run(&s, &pulse);
    let (y0, y_m1) = analytic_br(s.rung(0), s.rung(-1));
    let bare = s.replace_pair(y0, y_m1);
    assert!((overlap_modulus(&numeric, &bare) - 1.0).abs() < 2e-3);
    assert!(max_deviation_up_to_phase(&numeric, &bare) < 2e-3);
    // with the e^{−iΩτ} factor restored the match is componentwise
    assert!(max_deviation(&numeric, &analytic_pulse(&s, &pulse)) < 2e-3);
}

#[test]
fn splitter_conserves_rung_spin_parity() {
    for &m0 in &M_VALUES {
        let s = ladder(chi(m0), -3, 2);
        let pulse = PulseSpec::custom(PulseKind::BeamSplitter, 0.7, 3.0, 1.0, 0.0).unwrap();
        let out = run(&s, &pulse);
        for n in out.rungs() {
            for (&m, z) in M_VALUES.iter().zip(out.rung(n).iter()) {
                if (n + m - m0).rem_euclid(2) == 1 {
                    assert_eq!(z.norm(), 0.0, "n={n} m={m} from m0={m0}");
                }
            }
        }
        assert!(out.population(1) > 1e-6);
    }
}

#[test]
fn zero_rabi_keeps_populations() {
    let mut s = ladder(chi(1), DEFAULT_N_MIN, DEFAULT_N_MAX);
    s.set_rung(2, chi(0).scale(C64::new(0.0, 0.5))).unwrap();
    let pulse = PulseSpec::custom(PulseKind::Reflector, 0.0, 2.0, 1.0, 0.0).unwrap();
    // rung 2 is populated and far detuned; RK4 loses (ωh)⁶/72 per step there
    let out = propagate_chain(&s, &pulse, max_stable_step(&s, &pulse) / 4.0).unwrap();
    for n in s.rungs() {
        assert!((out.population(n) - s.population(n)).abs() < 1e-9);
    }
}

#[test]
fn observer_sees_start_and_end() {
    let s = ladder(chi(1), -1, 0);
    let pulse = PulseSpec::beam_splitter(0.5, 1.0, 10.0).unwrap();
    let mut times = Vec::new();
    let dt = max_stable_step(&s, &pulse) / 2.0;
    propagate_chain_observed(&s, &pulse, dt, 10, |st| times.push(st.time)).unwrap();
    assert_eq!(times.first().copied(), Some(pulse.start()));
    assert_eq!(times.last().copied(), Some(pulse.end()));
    assert!(times.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn two_rung_window_is_exact_splitter() {
    // With only rungs 0 and −1 there is no leakage and no detuning.
    for &m in &M_VALUES {
        let s = ladder(chi(m), -1, 0);
        let pulse = PulseSpec::beam_splitter(1.0, 1.0, 0.0).unwrap();
        let out = propagate_chain(&s, &pulse, max_stable_step(&s, &pulse) / 4.0).unwrap();
        let (y0, y_m1) = analytic_bs(chi(m), SpinState::zeros());
        assert!(out.rung(0).max_abs_diff(&y0) < 1e-9);
        assert!(out.rung(-1).max_abs_diff(&y_m1) < 1e-9);
    }
}
