//! Mach-Zehnder sequence BS → free flight → BR → free flight → BS in a static
//! electric field, and the Aharonov-Casher phase it imprints.
//!
//! Path labels follow the rung map a = 0, b = −1 after the first splitter and
//! c = 0, d = −1 after the second.

use std::f64::consts::SQRT_2;
use std::io::{self, Write};

use nalgebra::SMatrix;
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::bragg_dynamics::{
    bs_unitaries, max_stable_step, propagate_chain, recoil_energy, DynamicsError, LadderState,
    PulseSpec,
};
use crate::constants::{C, HBAR, MU_B};
use crate::csv_out::{sci, sci_opt};
use crate::polarizability::species::{AtomSpecies, GROUND_J};
use crate::spin_algebra::{
    mat_exp_antihermitian, spin_component, spin_projection, Axis, SpinAlgebraError, SpinMatrix,
    SpinState, M_VALUES,
};

/// Interference amplitudes below this leave the phase undefined.
pub const PHASE_DEFINED_MIN: f64 = 1e-15;
/// Accepted deviation of ‖χ_in‖ from 1.
pub const NORMALIZATION_TOL: f64 = 1e-10;

pub const N_A: i32 = 0;
pub const N_B: i32 = -1;
pub const N_C: i32 = 0;
pub const N_D: i32 = -1;

pub type TransferMatrix = SMatrix<C64, 6, 6>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InterferometerError {
    #[error("input spinor is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },
    #[error("rung {0} is not an interferometer arm (expected 0 or -1)")]
    InvalidRung(i32),
    #[error("interference amplitude {modulus:e} too small, phase undefined")]
    UndefinedPhase { modulus: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Spin(#[from] SpinAlgebraError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Hyperfine Landé factor g_F from g_J, g_I and the F, I, J quantum numbers.
pub fn lande_g_factor(species: &AtomSpecies) -> f64 {
    let f = species.f.value();
    let i = species.nuclear_spin.value();
    let j = GROUND_J.value();
    g_factor(f, i, j, species.g_j, species.g_i)
}

/// g_F for explicit quantum numbers; F must be positive.
pub fn g_factor(f: f64, i: f64, j: f64, g_j: f64, g_i: f64) -> f64 {
    let ff = f * (f + 1.0);
    let ii = i * (i + 1.0);
    let jj = j * (j + 1.0);
    g_j * (ff - ii + jj) / (2.0 * ff) + g_i * (ff + ii - jj) / (2.0 * ff)
}

/// Static field and free-flight geometry.
#[derive(Debug, Clone, Copy)]
pub struct FieldConfig<'a> {
    /// Electric field, V/m.
    pub field: [f64; 3],
    /// Free-flight time between pulses, s.
    pub half_time: f64,
    /// Transverse wavevector, rad/m.
    pub k_x: f64,
    /// Lattice wavevector K₀, rad/m.
    pub lattice_k: f64,
    pub species: &'a AtomSpecies,
}

impl<'a> FieldConfig<'a> {
    pub fn validate(&self) -> Result<(), InterferometerError> {
        let finite = self.field.iter().all(|e| e.is_finite())
            && self.half_time.is_finite()
            && self.k_x.is_finite()
            && self.lattice_k.is_finite();
        if !finite || self.half_time < 0.0 || self.lattice_k <= 0.0 {
            return Err(InterferometerError::InvalidConfig(format!(
                "need finite field, T ≥ 0 and K0 > 0 (T = {}, K0 = {})",
                self.half_time, self.lattice_k
            )));
        }
        Ok(())
    }

    /// Copy with a different field.
    pub fn with_field(&self, field: [f64; 3]) -> Self {
        FieldConfig { field, ..*self }
    }

    /// k₀ = √(k_x² + K₀²).
    pub fn k0(&self) -> f64 {
        self.k_x.hypot(self.lattice_k)
    }

    /// k̂ₙ = (k_x, (2n+1)K₀, 0)/k₀.
    pub fn k_hat(&self, n: i32) -> [f64; 3] {
        let k0 = self.k0();
        [
            self.k_x / k0,
            f64::from(2 * n + 1) * self.lattice_k / k0,
            0.0,
        ]
    }

    /// Path length s_T = ħk₀T/M, m.
    pub fn s_t(&self) -> f64 {
        HBAR * self.k0() * self.half_time / self.species.mass
    }

    pub fn g_f(&self) -> f64 {
        lande_g_factor(self.species)
    }

    /// g_F μ_B s/(4ħc) per V/m for path length s.
    pub fn coupling(&self, s: f64) -> f64 {
        self.g_f() * MU_B * s / (4.0 * HBAR * C)
    }

    /// |4ħc/(g_F μ_B s_T)|, V/m; infinite when s_T = 0.
    pub fn weak_field_bound(&self) -> f64 {
        let beta = self.coupling(self.s_t()).abs();
        if beta == 0.0 {
            f64::INFINITY
        } else {
            1.0 / beta
        }
    }

    /// |E| over the weak-field bound.
    pub fn validity_ratio(&self) -> f64 {
        let e = self.field;
        (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt() / self.weak_field_bound()
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// (F×E)·k̂ₙ, rewritten as F·(E×k̂ₙ).
pub fn ac_generator(n: i32, field: &FieldConfig) -> SpinMatrix {
    spin_projection(cross(field.field, field.k_hat(n)))
}

/// 𝒰ₙ(s) = exp(−i g_F μ_B s/(4ħc) (F×E)·k̂ₙ).
pub fn ac_propagator(
    n: i32,
    s: f64,
    field: &FieldConfig,
) -> Result<SpinMatrix, InterferometerError> {
    if n != N_A && n != N_B {
        return Err(InterferometerError::InvalidRung(n));
    }
    Ok(mat_exp_antihermitian(
        &ac_generator(n, field),
        field.coupling(s),
    )?)
}

/// The four path operators from input spinor to output port.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WMatrices {
    pub ac: SpinMatrix,
    pub bc: SpinMatrix,
    pub ad: SpinMatrix,
    pub bd: SpinMatrix,
}

impl WMatrices {
    /// 𝒲_ac + 𝒲_bc.
    pub fn port_c(&self) -> SpinMatrix {
        self.ac + self.bc
    }

    /// 𝒲_ad + 𝒲_bd.
    pub fn port_d(&self) -> SpinMatrix {
        self.ad + self.bd
    }

    /// Σ 𝒲†𝒲 over all four paths.
    pub fn completeness(&self) -> SpinMatrix {
        [self.ac, self.bc, self.ad, self.bd]
            .iter()
            .fold(SpinMatrix::zeros(), |acc, w| acc + w.adjoint() * *w)
    }

    /// 𝒲_ad†𝒲_bd.
    pub fn interference_d(&self) -> SpinMatrix {
        self.ad.adjoint() * self.bd
    }
}

pub fn w_matrices(field: &FieldConfig) -> Result<WMatrices, InterferometerError> {
    field.validate()?;
    let (vt, vr) = bs_unitaries()?;
    let s = field.s_t();
    let u0 = ac_propagator(N_A, s, field)?;
    let um1 = ac_propagator(N_B, s, field)?;
    let i = C64::new(0.0, 1.0);
    Ok(WMatrices {
        ac: (vr * um1 * u0 * vt).scale(-i),
        bc: (vt * u0 * um1 * vr).scale(i),
        ad: (vt * um1 * u0 * vt).scale(-i),
        bd: (vr * u0 * um1 * vr).scale(-i),
    })
}

fn embed(m: &mut TransferMatrix, row: usize, col: usize, block: &SpinMatrix) {
    m.fixed_view_mut::<3, 3>(row, col).copy_from(&block.0);
}

/// π/2 splitter on (rung 0, rung −1) as a 6×6 block matrix.
pub fn bs_block_matrix() -> Result<TransferMatrix, InterferometerError> {
    let (vt, vr) = bs_unitaries()?;
    let mut m = TransferMatrix::zeros();
    embed(&mut m, 0, 0, &vt);
    embed(&mut m, 0, 3, &vr);
    embed(&mut m, 3, 0, &(-vr));
    embed(&mut m, 3, 3, &vt);
    Ok(m)
}

/// Full sequence on (rung 0, rung −1): BS · 𝒰 · BR · 𝒰 · BS.
pub fn transfer_matrix(field: &FieldConfig) -> Result<TransferMatrix, InterferometerError> {
    field.validate()?;
    let bs = bs_block_matrix()?;
    let s = field.s_t();
    let mut flight = TransferMatrix::zeros();
    embed(&mut flight, 0, 0, &ac_propagator(N_A, s, field)?);
    embed(&mut flight, 3, 3, &ac_propagator(N_B, s, field)?);
    let minus_i = SpinMatrix::identity().scale(C64::new(0.0, -1.0));
    let mut br = TransferMatrix::zeros();
    embed(&mut br, 0, 3, &minus_i);
    embed(&mut br, 3, 0, &minus_i);
    Ok(bs * flight * br * flight * bs)
}

/// Max |M†M − 𝕀|.
pub fn unitarity_defect(m: &TransferMatrix) -> f64 {
    (m.adjoint() * m - TransferMatrix::identity())
        .iter()
        .fold(0.0, |a: f64, z| a.max(z.norm()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterferometerResult {
    pub x_c: SpinState,
    pub x_d: SpinState,
    pub p_c: f64,
    pub p_d: f64,
    /// ‖𝒲_ad χ‖².
    pub p_ad: f64,
    /// ‖𝒲_bd χ‖².
    pub p_bd: f64,
    /// ⟨χ|𝒲_ad†𝒲_bd|χ⟩; P_d = p_ad + p_bd + 2 Re(interference_d).
    pub interference_d: C64,
    /// Principal argument of `interference_d`, or `None` when undefined.
    pub phi_exact: Option<f64>,
    /// Linearized phase m·φ_AC for the dominant m component of χ.
    pub phi_linear: f64,
    pub w: WMatrices,
    pub weak_field_bound: f64,
    pub validity_ratio: f64,
}

fn check_normalized(chi: &SpinState) -> Result<(), InterferometerError> {
    let norm_sqr = chi.norm_sqr();
    if (norm_sqr - 1.0).abs() > NORMALIZATION_TOL {
        return Err(InterferometerError::NotNormalized { norm_sqr });
    }
    Ok(())
}

/// Principal value in (−π, π].
fn principal_arg(z: C64) -> f64 {
    let a = z.arg();
    if a <= -std::f64::consts::PI {
        a + 2.0 * std::f64::consts::PI
    } else {
        a
    }
}

fn phase_of(amplitude: C64) -> Result<f64, InterferometerError> {
    let modulus = amplitude.norm();
    if !(modulus > PHASE_DEFINED_MIN) {
        return Err(InterferometerError::UndefinedPhase { modulus });
    }
    Ok(principal_arg(amplitude))
}

/// Expectation-weighted m of a spinor, rounded to the nearest m.
fn dominant_m(chi: &SpinState) -> i32 {
    M_VALUES
        .iter()
        .zip(chi.iter())
        .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
        .map(|(&m, _)| m)
        .unwrap_or(0)
}

fn assemble(w: WMatrices, field: &FieldConfig, chi: &SpinState) -> InterferometerResult {
    let x_c = w.port_c() * *chi;
    let x_d = w.port_d() * *chi;
    let ad = w.ad * *chi;
    let bd = w.bd * *chi;
    let interference_d = ad.inner(&bd);
    InterferometerResult {
        p_c: x_c.norm_sqr(),
        p_d: x_d.norm_sqr(),
        x_c,
        x_d,
        p_ad: ad.norm_sqr(),
        p_bd: bd.norm_sqr(),
        interference_d,
        phi_exact: phase_of(interference_d).ok(),
        phi_linear: ac_phase_linear_m(field, dominant_m(chi)),
        w,
        weak_field_bound: field.weak_field_bound(),
        validity_ratio: field.validity_ratio(),
    }
}

/// Output spinors and populations for analytic pulses.
pub fn run_interferometer(
    field: &FieldConfig,
    chi_in: &SpinState,
) -> Result<InterferometerResult, InterferometerError> {
    check_normalized(chi_in)?;
    Ok(assemble(w_matrices(field)?, field, chi_in))
}

/// arg⟨χ|𝒲_ad†𝒲_bd|χ⟩ in (−π, π].
pub fn ac_phase_exact(field: &FieldConfig, chi_in: &SpinState) -> Result<f64, InterferometerError> {
    check_normalized(chi_in)?;
    let w = w_matrices(field)?;
    phase_of((w.ad * *chi_in).inner(&(w.bd * *chi_in)))
}

/// φ_AC = −(g_F μ_B s_T/(√2ħc))(k_x/k₀)E_y, the first-order phase for χ₁.
///
/// The sign follows from expanding 𝒰ₙ = exp(−iβ(F×E)·k̂ₙ) to first order:
/// the E_y term of 𝒲_ad†𝒲_bd comes with (F×E)_x = −F_z E_y.
pub fn ac_phase_linear(field: &FieldConfig) -> f64 {
    let geometric = if field.k0() > 0.0 {
        field.k_x / field.k0()
    } else {
        0.0
    };
    -field.g_f() * MU_B * field.s_t() / (SQRT_2 * HBAR * C) * geometric * field.field[1]
}

/// φ_m ≈ m·φ_AC.
pub fn ac_phase_linear_m(field: &FieldConfig, m: i32) -> f64 {
    f64::from(m) * ac_phase_linear(field)
}

/// First-order expansion (2 − m²)/8 + (i m/8)φ_AC of ⟨χ_m|𝒲_ad†𝒲_bd|χ_m⟩.
pub fn interference_first_order(field: &FieldConfig, m: i32) -> C64 {
    let m = f64::from(m);
    C64::new((2.0 - m * m) / 8.0, m * ac_phase_linear(field) / 8.0)
}

/// Components j = x, y, z of 𝒱_T²𝒱_R F_j 𝒱_R − 𝒱_T F_j 𝒱_T 𝒱_R².
pub fn script_f() -> Result<[SpinMatrix; 3], InterferometerError> {
    let (vt, vr) = bs_unitaries()?;
    let vt2 = vt * vt;
    let vr2 = vr * vr;
    Ok(Axis::ALL.map(|axis| {
        let f = spin_component(axis);
        vt2 * vr * f * vr - vt * f * vt * vr2
    }))
}

/// Pulse settings for the fully numerical pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericalPulses {
    /// ħΩ_BS/𝓔₀.
    pub bs_ratio: f64,
    /// ħΩ_BR/𝓔₀.
    pub br_ratio: f64,
    pub n_min: i32,
    pub n_max: i32,
    /// Fraction of the step bound actually used, in (0, 1].
    pub dt_factor: f64,
}

impl Default for NumericalPulses {
    fn default() -> Self {
        NumericalPulses {
            bs_ratio: 0.01,
            br_ratio: 0.01,
            n_min: crate::bragg_dynamics::DEFAULT_N_MIN,
            n_max: crate::bragg_dynamics::DEFAULT_N_MAX,
            dt_factor: 0.5,
        }
    }
}

impl NumericalPulses {
    /// Largest ħΩ/𝓔₀ above which the two-rung picture is not trusted.
    pub const BRAGG_REGIME_MAX: f64 = 0.1;

    /// True when both pulses sit in the Bragg regime.
    pub fn in_bragg_regime(&self) -> bool {
        self.bs_ratio <= Self::BRAGG_REGIME_MAX && self.br_ratio <= Self::BRAGG_REGIME_MAX
    }
}

fn run_pulse(
    state: &LadderState,
    pulse: &PulseSpec,
    dt_factor: f64,
) -> Result<LadderState, DynamicsError> {
    let dt = max_stable_step(state, pulse) * dt_factor;
    propagate_chain(state, pulse, dt)
}

fn free_flight(state: &LadderState, u0: &SpinMatrix, um1: &SpinMatrix) -> LadderState {
    state.replace_pair(*u0 * state.rung(N_A), *um1 * state.rung(N_B))
}

/// Same sequence with every pulse integrated on the full ladder.
///
/// Free flight applies 𝒰ₙ to the two arms; amplitude left on other rungs
/// after a pulse misses the next pulse and is discarded. The reflector's
/// global phase e^{−iΩτ} is removed. The W matrices are built column by
/// column from the basis spinors, with each arm followed separately after
/// the first splitter.
pub fn mz_pipeline_numerical(
    field: &FieldConfig,
    pulses: &NumericalPulses,
    chi_in: &SpinState,
) -> Result<InterferometerResult, InterferometerError> {
    check_normalized(chi_in)?;
    field.validate()?;
    if !(pulses.dt_factor > 0.0 && pulses.dt_factor <= 1.0) {
        return Err(InterferometerError::InvalidConfig(format!(
            "dt factor {} outside (0, 1]",
            pulses.dt_factor
        )));
    }
    let mass = field.species.mass;
    let recoil_rate = recoil_energy(field.lattice_k, mass) / HBAR;
    let bs = PulseSpec::beam_splitter(pulses.bs_ratio * recoil_rate, field.lattice_k, 0.0)?;
    let br = PulseSpec::reflector(pulses.br_ratio * recoil_rate, field.lattice_k, 0.0)?;
    let br_phase = C64::from_polar(1.0, br.area());

    let s = field.s_t();
    let u0 = ac_propagator(N_A, s, field)?;
    let um1 = ac_propagator(N_B, s, field)?;

    let mut w = WMatrices {
        ac: SpinMatrix::zeros(),
        bc: SpinMatrix::zeros(),
        ad: SpinMatrix::zeros(),
        bd: SpinMatrix::zeros(),
    };
    for (col, &m) in M_VALUES.iter().enumerate() {
        let input = LadderState::with_initial(
            field.k_x,
            field.lattice_k,
            mass,
            pulses.n_min,
            pulses.n_max,
            SpinState::basis(m)?,
        )?;
        let split = run_pulse(&input, &bs, pulses.dt_factor)?;
        for arm in [N_A, N_B] {
            let mut path = split.clone();
            path.retain_rungs(&[arm]);
            let flown = free_flight(&path, &u0, &um1);
            let mut mirrored = run_pulse(&flown, &br, pulses.dt_factor)?;
            mirrored.retain_rungs(&[N_A, N_B]);
            let mirrored = mirrored.replace_pair(
                mirrored.rung(N_A).scale(br_phase),
                mirrored.rung(N_B).scale(br_phase),
            );
            let flown = free_flight(&mirrored, &u0, &um1);
            let out = run_pulse(&flown, &bs, pulses.dt_factor)?;
            let (to_c, to_d) = if arm == N_A {
                (&mut w.ac, &mut w.ad)
            } else {
                (&mut w.bc, &mut w.bd)
            };
            to_c.0.set_column(col, &out.rung(N_C).0);
            to_d.0.set_column(col, &out.rung(N_D).0);
        }
    }
    Ok(assemble(w, field, chi_in))
}

/// One row of a field scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub e_y: f64,
    pub p_c: f64,
    pub p_d: f64,
    pub phi_exact: Option<f64>,
    pub phi_linear: f64,
    pub validity_ratio: f64,
}

impl From<(&InterferometerResult, f64)> for ScanPoint {
    fn from((r, e_y): (&InterferometerResult, f64)) -> Self {
        ScanPoint {
            e_y,
            p_c: r.p_c,
            p_d: r.p_d,
            phi_exact: r.phi_exact,
            phi_linear: r.phi_linear,
            validity_ratio: r.validity_ratio,
        }
    }
}

pub const PHASE_SCAN_HEADER: &str =
    "E_y_V_per_m,P_c,P_d,phi_exact_rad,phi_linear_rad,validity_ratio";

/// Header plus one row per point; undefined phases are empty cells.
pub fn write_phase_scan_csv<W: Write>(out: &mut W, points: &[ScanPoint]) -> io::Result<()> {
    writeln!(out, "{PHASE_SCAN_HEADER}")?;
    for p in points {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            sci(p.e_y),
            sci(p.p_c),
            sci(p.p_d),
            sci_opt(p.phi_exact),
            sci(p.phi_linear),
            sci(p.validity_ratio)
        )?;
    }
    Ok(())
}
