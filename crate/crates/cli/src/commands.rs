use std::path::PathBuf;

use evanesce_core::delay::{angle_for_saturated_shift, goos_hanchen_shift, hartman_sweep, shift_for_delay, tau0, total_group_delay};
use evanesce_core::energy::{energy_sweep, evanescent_vs_free_energy, stored_energy, train_model};
use evanesce_core::scattering::{approx_transmission, attenuation_db_per_mm, gap_attenuation_db, scatter_carrier};
use evanesce_core::sweep::SweepTable;
use evanesce_core::wavesynth::{
    beam_centroid_shift_with, differential_delay_with, front_causality_check_with, propagate_pulse_with,
    GridOptions, Synthesis, SynthesisOptions,
};
use evanesce_core::{
    critical_angle, pulse_spatial_extent, scenario::vacuum_wavelength_with, wavevectors, BeamSpec, Channel, Execution,
    PulseShape, PulseSpec, Scenario,
};
use serde::Serialize;
use serde_json::Value;

use crate::config::{pick, RunConfig, ScenarioArgs};
use crate::{BeamArgs, CausalityArgs, CliError, Common, Format, GridArgs, HartmanArgs, InventoryArgs, Output, PulseArgs, SynthesisArg};

const PS: f64 = 1e12;
const NS: f64 = 1e9;
const CM: f64 = 1e2;
const MM: f64 = 1e3;

pub struct Context<'a> {
    pub scenario: Scenario,
    pub format: Format,
    pub version_header: bool,
    pub file: &'a RunConfig,
}

impl<'a> Context<'a> {
    pub fn new(common: &Common, file: &'a RunConfig) -> Result<Self, CliError> {
        let d = ScenarioArgs::default();
        let args = ScenarioArgs {
            n: pick(common.n, file.n, d.n),
            f_ghz: pick(common.f_ghz, file.f_ghz, d.f_ghz),
            theta_deg: pick(common.theta_deg, file.theta_deg, d.theta_deg),
            d_mm: pick(common.d_mm, file.d_mm, d.d_mm),
            polarization: pick(common.polarization, file.polarization, d.polarization),
            codata: common.codata || file.codata.unwrap_or(false),
        };
        Ok(Context {
            scenario: args.build()?,
            format: common.format,
            version_header: common.version_header,
            file,
        })
    }

    fn csv(&self, table: &SweepTable, digits: Option<usize>) -> String {
        let body = table.to_csv(digits);
        if self.version_header {
            format!("# evanesce {}\n{body}", env!("CARGO_PKG_VERSION"))
        } else {
            body
        }
    }

    /// A single record as pretty JSON, or as `quantity,value` CSV rows.
    fn record<T: Serialize>(&self, value: &T) -> String {
        match self.format {
            Format::Json => json(value),
            Format::Csv => {
                let Value::Object(map) = serde_json::to_value(value).expect("records serialize") else {
                    unreachable!("records are structs")
                };
                let mut out = String::new();
                if self.version_header {
                    out.push_str(&format!("# evanesce {}\n", env!("CARGO_PKG_VERSION")));
                }
                out.push_str("quantity,value\n");
                for (k, v) in map {
                    let cell = match v {
                        Value::Null => String::new(),
                        Value::String(s) => s,
                        other => other.to_string(),
                    };
                    out.push_str(&format!("{k},{cell}\n"));
                }
                out
            }
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("records serialize");
    s.push('\n');
    s
}

fn positive(field: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{field}: must be finite and > 0, got {v}")))
    }
}

#[derive(Serialize)]
struct AttenuationReport {
    kappa_per_m: f64,
    attenuation_db_per_mm: f64,
    gap_attenuation_db: f64,
    transmission_approx: f64,
    log10_transmission_approx: f64,
    transmission_exact: f64,
    critical_angle_deg: f64,
}

pub fn attenuation(ctx: &Context) -> Result<Output, CliError> {
    let s = &ctx.scenario;
    let per_mm = attenuation_db_per_mm(s)?;
    let kappa = wavevectors(s, s.omega())?.kappa;
    let approx = approx_transmission(s)?;
    let report = AttenuationReport {
        kappa_per_m: kappa,
        attenuation_db_per_mm: per_mm,
        gap_attenuation_db: gap_attenuation_db(s)?,
        transmission_approx: approx,
        // Computed from the exponent so it survives underflow of T itself.
        log10_transmission_approx: -2.0 * kappa * s.d / std::f64::consts::LN_10,
        transmission_exact: scatter_carrier(s)?.transmittance(),
        critical_angle_deg: critical_angle(s.n)?.to_degrees(),
    };
    Ok(Output {
        primary: ctx.record(&report),
        side_files: vec![],
    })
}

#[derive(Serialize)]
struct HartmanReport {
    channel: Channel,
    theta_deg: f64,
    saturated: bool,
    saturation_tau_g_ps: f64,
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

fn gap_range(a: &HartmanArgs, file: &RunConfig) -> Result<Vec<f64>, CliError> {
    let start = pick(a.d_start_mm, file.d_start_mm, 5.0);
    let stop = pick(a.d_stop_mm, file.d_stop_mm, 50.0);
    let step = positive("d_step_mm", pick(a.d_step_mm, file.d_step_mm, 1.0))?;
    positive("d_start_mm", start)?;
    if !(stop.is_finite() && stop >= start) {
        return Err(CliError::Config(format!("d_stop_mm: must be >= d_start_mm ({start}), got {stop}")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if count > 100_000 {
        return Err(CliError::Config(format!("range has {count} points; at most 100000 allowed")));
    }
    Ok((0..count).map(|i| (start + i as f64 * step) / MM).collect())
}

pub fn hartman(ctx: &Context, a: &HartmanArgs) -> Result<Output, CliError> {
    let channel = pick(a.channel, ctx.file.channel, Channel::Transmission);
    let mut s = ctx.scenario;
    if let Some(target_cm) = a.tune_shift_cm.or(ctx.file.tune_shift_cm) {
        let target = positive("tune_shift_cm", target_cm)? / CM;
        s = s.with_theta(angle_for_saturated_shift(&s, channel, target, 80f64.to_radians())?);
        eprintln!("note: incidence angle tuned to {:.4} deg for a saturated shift of {target_cm} cm", s.theta.to_degrees());
    }
    let ds = gap_range(a, ctx.file)?;
    let exec = Execution::default();
    let sweep = hartman_sweep(&s, &ds, channel, exec)?;
    let budgets = energy_sweep(&s, &ds, exec)?;
    let u_last = budgets.last().map_or(0.0, |b| b.stored);
    let mut table = SweepTable::new(["d_mm", "tau0_ps", "s_cm", "tau_g_ps", "dwell_ps", "U_norm"]);
    for (p, b) in sweep.points.iter().zip(&budgets) {
        table.push(vec![
            p.d * MM,
            p.breakdown.tau0 * PS,
            p.breakdown.gh_shift * CM,
            p.breakdown.tau_g * PS,
            b.dwell_time * PS,
            if u_last > 0.0 { b.stored / u_last } else { 0.0 },
        ]);
    }
    let primary = match ctx.format {
        Format::Csv => ctx.csv(&table, Some(6)),
        Format::Json => json(&HartmanReport {
            channel,
            theta_deg: s.theta.to_degrees(),
            saturated: sweep.saturated,
            saturation_tau_g_ps: sweep.last().map_or(0.0, |p| p.breakdown.tau_g * PS),
            columns: table.columns.clone(),
            rows: table.rows.clone(),
        }),
    };
    Ok(Output {
        primary,
        side_files: vec![],
    })
}

fn synthesis(arg: SynthesisArg) -> Synthesis {
    match arg {
        SynthesisArg::FixedAngle => Synthesis::FixedAngle,
        SynthesisArg::FixedTransverse => Synthesis::FixedTransverse,
    }
}

fn grid_options(g: &GridArgs, file: &RunConfig) -> Result<GridOptions, CliError> {
    let step = g.step_ps.or(file.step_ps).map(|v| positive("step_ps", v)).transpose()?;
    let span = g.span_ns.or(file.span_ns).map(|v| positive("span_ns", v)).transpose()?;
    Ok(GridOptions {
        step: step.map(|v| v / PS),
        span: span.map(|v| v / NS),
        pad_pow2: !g.no_pad && file.pad_pow2.unwrap_or(true),
    })
}

#[derive(Serialize)]
struct PulseOut {
    channel: Channel,
    synthesis: Synthesis,
    peak_time_ps: f64,
    delay_ps: f64,
    stationary_phase_delay_ps: f64,
    differential_delay_ps: Option<f64>,
    fwhm_ns: f64,
    incident_fwhm_ns: f64,
    shape_correlation: f64,
    peak_amplitude: f64,
    peak_intensity_ratio: f64,
    exact_coefficient_squared: f64,
    quasi_static_ratio: Option<f64>,
    quasi_static: bool,
    grid_step_ps: f64,
    grid_span_ns: f64,
    samples: usize,
}

fn series_csv(ctx: &Context, t: &[f64], v: &[f64]) -> String {
    let mut table = SweepTable::new(["t_ns", "field"]);
    for (t, v) in t.iter().zip(v) {
        table.push(vec![t * NS, *v]);
    }
    ctx.csv(&table, None)
}

pub fn pulse(ctx: &Context, a: &PulseArgs) -> Result<Output, CliError> {
    let s = &ctx.scenario;
    let channel = pick(a.channel, ctx.file.channel, Channel::Transmission);
    let fwhm = positive("fwhm_ns", pick(a.fwhm_ns, ctx.file.fwhm_ns, 16.0))? / NS;
    let spec = PulseSpec::gaussian(fwhm, s.f)?;
    let mode = synthesis(a.synthesis);
    let opts = SynthesisOptions {
        mode,
        grid: grid_options(&a.grid, ctx.file)?,
        exec: Execution::default(),
    };
    let (series, report) = propagate_pulse_with(s, &spec, channel, &opts)?;
    let stationary = match mode {
        Synthesis::FixedAngle => tau0(s, channel)?,
        Synthesis::FixedTransverse => total_group_delay(s, channel)?.tau_g,
    };
    let differential = match channel {
        Channel::Transmission => Some(differential_delay_with(s, &spec, &opts)? * PS),
        Channel::Reflection => None,
    };
    let out = PulseOut {
        channel,
        synthesis: mode,
        peak_time_ps: report.peak_time * PS,
        delay_ps: report.delay * PS,
        stationary_phase_delay_ps: stationary * PS,
        differential_delay_ps: differential,
        fwhm_ns: report.fwhm * NS,
        incident_fwhm_ns: report.incident_fwhm * NS,
        shape_correlation: report.shape_correlation,
        peak_amplitude: report.peak_amplitude,
        peak_intensity_ratio: report.peak_amplitude * report.peak_amplitude,
        exact_coefficient_squared: scatter_carrier(s)?.coefficient(channel).norm_sqr(),
        quasi_static_ratio: report.quasi_static_ratio,
        quasi_static: report.quasi_static,
        grid_step_ps: series.meta.step * PS,
        grid_span_ns: series.meta.span * NS,
        samples: series.meta.samples,
    };
    let csv = || series_csv(ctx, &series.t_samples, &series.values);
    let side_files: Vec<(PathBuf, String)> = a.series.iter().map(|p| (p.clone(), csv())).collect();
    let primary = match ctx.format {
        Format::Json => json(&out),
        Format::Csv => csv(),
    };
    Ok(Output { primary, side_files })
}

#[derive(Serialize)]
struct BeamOut {
    channel: Channel,
    waist_cm: f64,
    centroid_cm: f64,
    reference_centroid_cm: f64,
    centroid_shift_cm: f64,
    stationary_phase_shift_cm: f64,
    relative_difference: f64,
    evanescent_weight: f64,
}

pub fn beam(ctx: &Context, a: &BeamArgs) -> Result<Output, CliError> {
    let s = &ctx.scenario;
    let channel = pick(a.channel, ctx.file.channel, Channel::Reflection);
    let lambda = vacuum_wavelength_with(s.f, s.light)?;
    let waist = positive("waist_wavelengths", pick(a.waist_wavelengths, ctx.file.waist_wavelengths, 20.0))? * lambda;
    let profile = beam_centroid_shift_with(s, &BeamSpec::new(waist)?, channel, Execution::default())?;
    let slope = goos_hanchen_shift(s, channel)?;
    let out = BeamOut {
        channel,
        waist_cm: waist * CM,
        centroid_cm: profile.centroid * CM,
        reference_centroid_cm: profile.reference_centroid * CM,
        centroid_shift_cm: profile.centroid_shift * CM,
        stationary_phase_shift_cm: slope * CM,
        relative_difference: if slope == 0.0 { 0.0 } else { profile.centroid_shift / slope - 1.0 },
        evanescent_weight: profile.evanescent_weight + 0.0,
    };
    let csv = || {
        let mut table = SweepTable::new(["x_cm", "intensity"]);
        for (x, i) in profile.x_samples.iter().zip(&profile.intensity) {
            table.push(vec![x * CM, *i]);
        }
        ctx.csv(&table, None)
    };
    let side_files: Vec<(PathBuf, String)> = a.profile.iter().map(|p| (p.clone(), csv())).collect();
    let primary = match ctx.format {
        Format::Json => json(&out),
        Format::Csv => csv(),
    };
    Ok(Output { primary, side_files })
}

#[derive(Serialize)]
struct EnergyOut {
    stored_j_per_m: f64,
    incident_power_w_per_m: f64,
    dwell_time_ps: f64,
    lateral_extent_cm: f64,
    energy_per_area_j_per_m2: f64,
    incident_flux_w_per_m2: f64,
    evanescent_vs_free: f64,
    kappa_d: f64,
}

pub fn energy(ctx: &Context) -> Result<Output, CliError> {
    let s = &ctx.scenario;
    let b = stored_energy(s)?;
    let out = EnergyOut {
        stored_j_per_m: b.stored,
        incident_power_w_per_m: b.incident_power,
        dwell_time_ps: b.dwell_time * PS,
        lateral_extent_cm: b.lateral_extent * CM,
        energy_per_area_j_per_m2: b.energy_per_area,
        incident_flux_w_per_m2: b.incident_flux,
        evanescent_vs_free: evanescent_vs_free_energy(s)?,
        kappa_d: wavevectors(s, s.omega())?.kappa * s.d,
    };
    Ok(Output {
        primary: ctx.record(&out),
        side_files: vec![],
    })
}

#[derive(Serialize)]
struct CausalityOut {
    synthesis: Synthesis,
    leakage: f64,
    refined_leakage: f64,
    incident_floor: f64,
    roundoff_floor: f64,
    front_time_ns: f64,
    arrival_time_ns: f64,
    below_floor: bool,
    converged: bool,
}

pub fn causality(ctx: &Context, a: &CausalityArgs) -> Result<Output, CliError> {
    let s = &ctx.scenario;
    let file = ctx.file;
    let fwhm = positive("fwhm_ns", pick(a.fwhm_ns, file.fwhm_ns, 16.0))? / NS;
    let front_sigmas = pick(a.front_sigmas, file.front_sigmas, -3.0);
    let rise = pick(a.rise_ns, file.rise_ns, 1.0) / NS;
    let mut spec = PulseSpec::truncated(fwhm, s.f, front_sigmas)?;
    if let PulseShape::GaussianTruncatedFront { front_time, .. } = spec.shape {
        spec.shape = PulseShape::GaussianTruncatedFront { front_time, rise_time: rise };
    }
    spec.validate()?;
    let PulseShape::GaussianTruncatedFront { front_time, .. } = spec.shape else {
        unreachable!()
    };
    let mode = synthesis(a.synthesis);
    let opts = SynthesisOptions {
        mode,
        grid: grid_options(&a.grid, file)?,
        exec: Execution::default(),
    };
    let r = front_causality_check_with(s, &spec, &opts)?;
    let out = CausalityOut {
        synthesis: mode,
        leakage: r.leakage,
        refined_leakage: r.refined_leakage,
        incident_floor: r.incident_floor,
        roundoff_floor: r.roundoff_floor,
        front_time_ns: front_time * NS,
        arrival_time_ns: r.arrival_time * NS,
        below_floor: r.below_floor,
        converged: r.converged,
    };
    Ok(Output {
        primary: ctx.record(&out),
        side_files: vec![],
    })
}

#[derive(Serialize)]
struct InventoryOut {
    wavelength_cm: f64,
    pulse_fwhm_ns: f64,
    pulse_extent_m: f64,
    critical_angle_deg: f64,
    delay_ps: f64,
    shift_for_delay_cm: f64,
    train_first_car: u64,
    train_cars: u64,
    train_total: u64,
    train_limit: u64,
    train_delay_proxy: f64,
}

pub fn inventory(ctx: &Context, a: &InventoryArgs) -> Result<Output, CliError> {
    let s = &ctx.scenario;
    let file = ctx.file;
    let fwhm_ns = positive("fwhm_ns", pick(a.fwhm_ns, file.fwhm_ns, 16.0))?;
    let delay_ps = pick(a.delay_ps, file.delay_ps, 100.0);
    let first = pick(a.train_first_car, file.train_first_car, 16);
    let cars = pick(a.train_cars, file.train_cars, 5);
    let train = train_model(first, cars)?;
    let pulse = PulseSpec::gaussian(fwhm_ns / NS, s.f)?;
    let out = InventoryOut {
        wavelength_cm: vacuum_wavelength_with(s.f, s.light)? * CM,
        pulse_fwhm_ns: fwhm_ns,
        pulse_extent_m: pulse_spatial_extent(&pulse),
        critical_angle_deg: critical_angle(s.n)?.to_degrees(),
        delay_ps,
        shift_for_delay_cm: shift_for_delay(delay_ps / PS, s) * CM,
        train_first_car: first,
        train_cars: cars,
        train_total: train.total_passengers,
        train_limit: 2 * first,
        train_delay_proxy: train.delay_proxy,
    };
    Ok(Output {
        primary: ctx.record(&out),
        side_files: vec![],
    })
}
