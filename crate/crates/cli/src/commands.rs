//! The three subcommands. Each returns the CSV body (without the digest
//! line) and a short text summary.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use spinbragg::bragg_dynamics::{
    analytic_pulse, max_deviation, max_stable_step, propagate_chain_observed, recoil_energy,
    write_snapshot_rows, LadderState, PulseKind, PulseSpec, TIME_SERIES_HEADER,
};
use spinbragg::constants::{angular, C, HBAR};
use spinbragg::csv_out::sci;
use spinbragg::interferometer::{
    ac_phase_linear, mz_pipeline_numerical, run_interferometer, write_phase_scan_csv, FieldConfig,
    InterferometerError, NumericalPulses, ScanPoint,
};
use spinbragg::polarizability::{
    default_zero_bracket, find_scalar_zero, reflector_geometry, scan_row, species::RB87_TOML,
    vector_polarizability, write_scan_csv, AtomSpecies,
};
use spinbragg::spin_algebra::SpinState;

use crate::config::{
    check_dt_factor, check_m, check_truncation, Command, Grid, PulseChoice, RunConfig,
};
use crate::error::CliError;

/// Loaded species plus the text it came from, for the config digest.
pub struct SpeciesSource {
    pub species: AtomSpecies,
    pub text: String,
}

pub fn load_species(path: Option<&Path>) -> Result<SpeciesSource, CliError> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| CliError::Data(format!("cannot read {}: {e}", p.display())))?,
        None => RB87_TOML.to_string(),
    };
    let species = AtomSpecies::from_toml_str(&text)?;
    Ok(SpeciesSource { species, text })
}

/// Scalar zero ω₀ and the lattice wavevector K₀ = ω₀/c it implies.
fn tune_out(species: &AtomSpecies) -> Result<(f64, f64), CliError> {
    let bracket = default_zero_bracket(species)
        .ok_or_else(|| CliError::Data("species lacks D1/D2 lines".into()))?;
    let omega_0 = find_scalar_zero(species, bracket)?;
    Ok((omega_0, omega_0 / C))
}

fn reject_scan(cfg: &RunConfig, command: &str) -> Result<(), CliError> {
    if cfg.scan_min.is_some() || cfg.scan_max.is_some() {
        return Err(CliError::Usage(format!("{command} takes no scan range")));
    }
    Ok(())
}

pub struct Output {
    pub resolved: serde_json::Value,
    pub body: String,
    /// Human-readable result lines, kept apart from the CSV.
    pub summary: String,
}

#[derive(Serialize)]
struct PolarizabilityRun {
    command: Command,
    grid: Grid,
    reflector_offset_thz: f64,
}

pub fn polarizability(cfg: &RunConfig, src: &SpeciesSource) -> Result<Output, CliError> {
    let run = PolarizabilityRun {
        command: Command::Polarizability,
        grid: Grid::new(
            cfg.scan_min.unwrap_or(0.5),
            cfg.scan_max.unwrap_or(6.6),
            cfg.points.unwrap_or(200),
        )?,
        reflector_offset_thz: cfg.reflector_offset_thz.unwrap_or(2.92011),
    };
    let species = &src.species;
    let mut summary = String::new();
    let rows = run
        .grid
        .values()
        .into_par_iter()
        .map(|offset| scan_row(species, offset))
        .collect::<Result<Vec<_>, _>>()?;

    let (omega_0, _) = tune_out(species)?;
    let d1 = species.d1().expect("validated species has D1");
    let d2 = species.d2().expect("validated species has D2");
    let alpha_v = vector_polarizability(omega_0, species)?.value;
    let omega_1 = d2.omega - angular(run.reflector_offset_thz * 1e12);
    let theta_1 = reflector_geometry(omega_0, omega_1)?;
    writeln!(
        summary,
        "omega0_offset_from_D1_THz = {:.6}",
        (omega_0 - d1.omega) / angular(1e12)
    )
    .expect("String write");
    writeln!(summary, "alpha_v_at_omega0_a0^3 = {alpha_v:.4}").expect("String write");
    writeln!(summary, "theta1_rad = {theta_1:.6}").expect("String write");

    let mut body = Vec::new();
    write_scan_csv(&mut body, &rows)?;
    Ok(Output {
        resolved: serde_json::to_value(&run).expect("plain data serializes"),
        body: String::from_utf8(body).expect("CSV is UTF-8"),
        summary,
    })
}

#[derive(Serialize)]
struct BraggRun {
    command: Command,
    pulse: PulseChoice,
    rabi_ratio: f64,
    duration: Option<f64>,
    truncation: i32,
    dt_factor: f64,
    initial_m: i32,
    samples: usize,
}

pub fn bragg(cfg: &RunConfig, src: &SpeciesSource) -> Result<Output, CliError> {
    reject_scan(cfg, "bragg")?;
    let run = BraggRun {
        command: Command::Bragg,
        pulse: cfg.pulse.unwrap_or(PulseChoice::Bs),
        rabi_ratio: cfg.rabi_ratio.unwrap_or(0.01),
        duration: cfg.duration,
        truncation: check_truncation(cfg.truncation.unwrap_or(3))?,
        dt_factor: check_dt_factor(cfg.dt_factor.unwrap_or(0.5))?,
        initial_m: check_m(cfg.initial_m.unwrap_or(1))?,
        samples: cfg.points.unwrap_or(201),
    };
    if run.samples < 2 {
        return Err(CliError::Usage("need at least 2 time samples".into()));
    }
    if !(run.rabi_ratio >= 0.0 && run.rabi_ratio.is_finite()) {
        return Err(CliError::Usage(format!(
            "rabi ratio {} must be >= 0",
            run.rabi_ratio
        )));
    }
    let species = &src.species;
    let mut summary = String::new();
    let (_, lattice_k) = tune_out(species)?;
    let rabi = run.rabi_ratio * recoil_energy(lattice_k, species.mass) / HBAR;
    let kind = match run.pulse {
        PulseChoice::Bs => PulseKind::BeamSplitter,
        PulseChoice::Br => PulseKind::Reflector,
    };
    let pulse = match (run.duration, kind) {
        (Some(d), _) => PulseSpec::custom(kind, rabi, d, lattice_k, 0.5 * d)?,
        (None, _) if rabi == 0.0 => {
            return Err(CliError::Usage(
                "zero Rabi frequency needs an explicit duration".into(),
            ))
        }
        (None, PulseKind::BeamSplitter) => {
            let p = PulseSpec::beam_splitter(rabi, lattice_k, 0.0)?;
            PulseSpec {
                center_time: 0.5 * p.duration,
                ..p
            }
        }
        (None, PulseKind::Reflector) => {
            let p = PulseSpec::reflector(rabi, lattice_k, 0.0)?;
            PulseSpec {
                center_time: 0.5 * p.duration,
                ..p
            }
        }
    };
    let n = run.truncation;
    let spin = SpinState::basis(run.initial_m).expect("m checked");
    let state = LadderState::with_initial(0.0, lattice_k, species.mass, -n - 1, n, spin)?;

    let dt = max_stable_step(&state, &pulse) * run.dt_factor;
    let steps = if pulse.duration > 0.0 {
        (pulse.duration / dt).ceil() as usize
    } else {
        0
    };
    let every = steps.div_ceil(run.samples - 1).max(1);

    let mut body = Vec::new();
    {
        use std::io::Write;
        writeln!(body, "{TIME_SERIES_HEADER}")?;
    }
    let mut io_result = Ok(());
    let out = propagate_chain_observed(&state, &pulse, dt, every, |s| {
        if io_result.is_ok() {
            io_result = write_snapshot_rows(&mut body, s);
        }
    })?;
    io_result?;

    let reference = analytic_pulse(&state, &pulse);
    let deviation = max_deviation(&out, &reference);
    let leak: f64 = out
        .rungs()
        .filter(|&k| k != 0 && k != -1)
        .map(|k| out.population(k))
        .sum();
    {
        use std::io::Write;
        writeln!(body, "# final max_deviation_vs_analytic={}", sci(deviation))?;
    }
    writeln!(summary, "P_0 = {:.6}", out.population(0)).expect("String write");
    writeln!(summary, "P_-1 = {:.6}", out.population(-1)).expect("String write");
    writeln!(summary, "leakage = {leak:.3e}").expect("String write");
    writeln!(summary, "norm = {:.12}", out.norm_sqr()).expect("String write");
    writeln!(summary, "max_deviation_vs_analytic = {deviation:.3e}").expect("String write");
    if !pulse.calibrated {
        writeln!(summary, "note: free-form pulse duration (not calibrated)").expect("String write");
    }
    Ok(Output {
        resolved: serde_json::to_value(&run).expect("plain data serializes"),
        body: String::from_utf8(body).expect("CSV is UTF-8"),
        summary,
    })
}

#[derive(Serialize)]
struct InterferometerRun {
    command: Command,
    grid: Grid,
    half_time: f64,
    kx_ratio: f64,
    initial_m: i32,
    numerical: bool,
    rabi_ratio: f64,
    truncation: i32,
    dt_factor: f64,
    field_x: f64,
    field_z: f64,
}

pub fn interferometer(cfg: &RunConfig, src: &SpeciesSource) -> Result<Output, CliError> {
    let run = InterferometerRun {
        command: Command::Interferometer,
        grid: Grid::new(
            cfg.scan_min.unwrap_or(-1000.0),
            cfg.scan_max.unwrap_or(1000.0),
            cfg.points.unwrap_or(101),
        )?,
        half_time: cfg.half_time.unwrap_or(1e-3),
        kx_ratio: cfg.kx_ratio.unwrap_or(1.0),
        initial_m: check_m(cfg.initial_m.unwrap_or(1))?,
        numerical: cfg.numerical.unwrap_or(false),
        rabi_ratio: cfg.rabi_ratio.unwrap_or(0.01),
        truncation: check_truncation(cfg.truncation.unwrap_or(3))?,
        dt_factor: check_dt_factor(cfg.dt_factor.unwrap_or(0.5))?,
        field_x: cfg.field_x.unwrap_or(0.0),
        field_z: cfg.field_z.unwrap_or(0.0),
    };
    if !(run.half_time >= 0.0) {
        return Err(CliError::Usage(format!(
            "half_time {} must be >= 0",
            run.half_time
        )));
    }
    let species = &src.species;
    let mut summary = String::new();
    let (_, lattice_k) = tune_out(species)?;
    let base = FieldConfig {
        field: [run.field_x, 0.0, run.field_z],
        half_time: run.half_time,
        k_x: run.kx_ratio * lattice_k,
        lattice_k,
        species,
    };
    let pulses = NumericalPulses {
        bs_ratio: run.rabi_ratio,
        br_ratio: run.rabi_ratio,
        n_min: -run.truncation - 1,
        n_max: run.truncation,
        dt_factor: run.dt_factor,
    };
    if run.numerical && !pulses.in_bragg_regime() {
        eprintln!(
            "warning: rabi ratio {} is outside the Bragg regime (<= {})",
            run.rabi_ratio,
            NumericalPulses::BRAGG_REGIME_MAX
        );
    }
    let chi = SpinState::basis(run.initial_m).expect("m checked");
    let points = run
        .grid
        .values()
        .into_par_iter()
        .map(|e_y| {
            let field = base.with_field([run.field_x, e_y, run.field_z]);
            let result = if run.numerical {
                mz_pipeline_numerical(&field, &pulses, &chi)
            } else {
                run_interferometer(&field, &chi)
            }?;
            Ok::<_, InterferometerError>(ScanPoint::from((&result, e_y)))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let unit = base.with_field([0.0, 1.0, 0.0]);
    writeln!(
        summary,
        "weak_field_bound_V_per_m = {:.6e}",
        base.weak_field_bound()
    )
    .expect("String write");
    writeln!(
        summary,
        "linear_phase_slope_rad_per_V_per_m = {:.6e}",
        ac_phase_linear(&unit)
    )
    .expect("String write");
    let undefined = points.iter().filter(|p| p.phi_exact.is_none()).count();
    if undefined > 0 {
        writeln!(summary, "undefined_phase_points = {undefined}").expect("String write");
    }

    let mut body = Vec::new();
    write_phase_scan_csv(&mut body, &points)?;
    Ok(Output {
        resolved: serde_json::to_value(&run).expect("plain data serializes"),
        body: String::from_utf8(body).expect("CSV is UTF-8"),
        summary,
    })
}
