use std::f64::consts::PI;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{GridOptions, SeriesMeta, Synthesis, SynthesisOptions, TimeSeries};
use crate::parallel::Execution;
use crate::scattering::solve;
use crate::scenario::{Channel, PulseShape, PulseSpec, Scenario};
use crate::{Complex64, Error, Result};

/// Minimum fwhm·carrier for the quasi-monochromatic treatment.
const MIN_CYCLES: f64 = 10.0;
const DEFAULT_STEPS_PER_CYCLE: f64 = 16.0;
const DEFAULT_SPAN_FWHM: f64 = 16.0;
const MIN_SPAN_FWHM: f64 = 8.0;
const CAUSALITY_SPAN_FWHM: f64 = 64.0;
/// The Nyquist frequency must exceed this multiple of the carrier.
const NYQUIST_MARGIN: f64 = 4.0;
const MAX_SAMPLES: usize = 1 << 24;

/// cτ_p/d above which the pulse sees an essentially steady-state barrier.
pub const QUASI_STATIC_THRESHOLD: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseReport {
    /// Envelope peak time of the output (s).
    pub peak_time: f64,
    /// Intensity FWHM of the output envelope (s).
    pub fwhm: f64,
    /// Normalized envelope cross-correlation with the incident pulse.
    pub shape_correlation: f64,
    /// Output envelope peak relative to the incident envelope peak.
    pub peak_amplitude: f64,
    pub incident_peak_time: f64,
    pub incident_fwhm: f64,
    /// peak_time − incident_peak_time (s).
    pub delay: f64,
    /// c·fwhm/d; absent for a closed gap.
    pub quasi_static_ratio: Option<f64>,
    pub quasi_static: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CausalityReport {
    /// Max transmitted envelope before `arrival_time`, over the transmitted peak.
    pub leakage: f64,
    /// Same quantity with the time step halved.
    pub refined_leakage: f64,
    /// The incident envelope's own level before the front, over its peak.
    /// The envelope of a one-sided spectrum is not strictly zero there.
    pub incident_floor: f64,
    /// Round-trip error of the closed-gap identity, over the peak.
    pub roundoff_floor: f64,
    /// Front time plus d/c (s).
    pub arrival_time: f64,
    pub below_floor: bool,
    pub converged: bool,
}

struct Grid {
    step: f64,
    samples: usize,
}

impl Grid {
    fn time(&self, j: usize) -> f64 {
        (j as f64 - (self.samples / 2) as f64) * self.step
    }

    fn times(&self) -> Vec<f64> {
        (0..self.samples).map(|j| self.time(j)).collect()
    }
}

fn check_pulse(pulse: &PulseSpec) -> Result<()> {
    pulse.validate()?;
    let cycles = pulse.fwhm * pulse.carrier;
    if cycles <= MIN_CYCLES {
        return Err(Error::invalid(
            "fwhm",
            format!("pulse must span more than {MIN_CYCLES} carrier cycles, got {cycles:.3}"),
        ));
    }
    Ok(())
}

fn build_grid(pulse: &PulseSpec, opts: &GridOptions, min_span_fwhm: f64, default_span_fwhm: f64) -> Result<Grid> {
    let step = opts.step.unwrap_or(1.0 / (DEFAULT_STEPS_PER_CYCLE * pulse.carrier));
    let span = opts.span.unwrap_or(default_span_fwhm * pulse.fwhm);
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Grid(format!("time step must be positive, got {step}")));
    }
    if 0.5 / step < NYQUIST_MARGIN * pulse.carrier {
        return Err(Error::Grid(format!(
            "time step {step:e} s leaves a Nyquist frequency below {NYQUIST_MARGIN}× the carrier"
        )));
    }
    if !(span >= min_span_fwhm * pulse.fwhm) {
        return Err(Error::Grid(format!(
            "span {span:e} s is shorter than {min_span_fwhm}× the pulse FWHM"
        )));
    }
    let mut samples = (span / step).ceil() as usize;
    if opts.pad_pow2 {
        samples = samples.next_power_of_two();
    }
    if samples > MAX_SAMPLES {
        return Err(Error::Grid(format!("{samples} samples exceed the limit of {MAX_SAMPLES}")));
    }
    Ok(Grid { step, samples })
}

/// C∞ ramp from 0 at x ≤ 0 to 1 at x ≥ 1.
fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / x).exp();
        let b = (-1.0 / (1.0 - x)).exp();
        a / (a + b)
    }
}

/// Incident envelope at time t (peak 1 at t = 0).
pub fn incident_envelope(pulse: &PulseSpec, t: f64) -> f64 {
    let sigma = pulse.field_sigma();
    let gauss = (-t * t / (2.0 * sigma * sigma)).exp();
    match pulse.shape {
        PulseShape::Gaussian => gauss,
        PulseShape::GaussianTruncatedFront { front_time, rise_time } => {
            if rise_time == 0.0 {
                if t >= front_time {
                    gauss
                } else {
                    0.0
                }
            } else {
                gauss * smooth_step((t - front_time) / rise_time)
            }
        }
    }
}

fn incident_series(pulse: &PulseSpec, grid: &Grid) -> Vec<f64> {
    let w = 2.0 * PI * pulse.carrier;
    (0..grid.samples)
        .map(|j| {
            let t = grid.time(j);
            incident_envelope(pulse, t) * (w * t).cos()
        })
        .collect()
}

/// Coefficient applied at angular frequency ω (> 0).
fn coefficient_at(
    scenario: &Scenario,
    channel: Channel,
    mode: Synthesis,
    carrier_k_x: f64,
    omega: f64,
) -> Result<Complex64> {
    let k_x = match mode {
        Synthesis::FixedAngle => scenario.k_x(omega),
        Synthesis::FixedTransverse => carrier_k_x,
    };
    let res = match solve(scenario, omega, k_x) {
        // A bin landing exactly on grazing incidence: step off it.
        Err(Error::Grazing) => solve(scenario, omega * (1.0 + 1e-9), k_x)?,
        other => other?,
    };
    Ok(res.coefficient(channel))
}

/// Passes a real series sampled at `step` through `coefficient(ω)` and returns
/// the analytic output signal. Bins with ω ≤ 0 are dropped.
fn analytic_through<F>(input: &[f64], step: f64, exec: Execution, coefficient: F) -> Result<Vec<Complex64>>
where
    F: Fn(f64) -> Result<Complex64> + Sync + Send,
{
    let n = input.len();
    let mut planner = FftPlanner::<f64>::new();
    let mut spec: Vec<Complex64> = input.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    // Field convention e^{−iωt}: the amplitude at +ω is Σ x e^{+iωt}.
    planner.plan_fft_inverse(n).process(&mut spec);
    let positive = n.saturating_sub(1) / 2;
    let dw = 2.0 * PI / (n as f64 * step);
    let coeffs: Vec<Result<Complex64>> = exec.map_indexed(positive, |i| coefficient((i + 1) as f64 * dw));
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (i, c) in coeffs.into_iter().enumerate() {
        out[i + 1] = 2.0 * spec[i + 1] * c?;
    }
    planner.plan_fft_forward(n).process(&mut out);
    let scale = 1.0 / n as f64;
    out.iter_mut().for_each(|v| *v *= scale);
    Ok(out)
}

/// Arbitrary real input series through the structure (analytic output).
/// The carrier fixes k_x for [`Synthesis::FixedTransverse`].
pub fn transmit_series(
    scenario: &Scenario,
    input: &[f64],
    step: f64,
    carrier: f64,
    channel: Channel,
    opts: &SynthesisOptions,
) -> Result<Vec<Complex64>> {
    scenario.validate()?;
    if input.len() < 4 {
        return Err(Error::Grid("need at least 4 samples".into()));
    }
    let carrier_k_x = scenario.k_x(2.0 * PI * carrier);
    analytic_through(input, step, opts.exec, |w| {
        coefficient_at(scenario, channel, opts.mode, carrier_k_x, w)
    })
}

struct Peak {
    index: usize,
    time: f64,
    amplitude: f64,
}

fn find_peak(envelope: &[f64], times: &[f64], step: f64) -> Peak {
    let (index, _) = envelope
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best });
    let e0 = envelope[index];
    if index == 0 || index + 1 == envelope.len() {
        return Peak {
            index,
            time: times[index],
            amplitude: e0,
        };
    }
    let (em, ep) = (envelope[index - 1], envelope[index + 1]);
    let curvature = em - 2.0 * e0 + ep;
    let offset = if curvature < 0.0 { 0.5 * (em - ep) / curvature } else { 0.0 };
    Peak {
        index,
        time: times[index] + offset * step,
        amplitude: e0 - 0.25 * (em - ep) * offset,
    }
}

/// Intensity FWHM by linear interpolation of the half-maximum crossings.
fn intensity_fwhm(envelope: &[f64], peak: &Peak, step: f64) -> Result<f64> {
    let half = 0.5 * peak.amplitude * peak.amplitude;
    let intensity = |i: usize| envelope[i] * envelope[i];
    let mut left = None;
    for i in (0..peak.index).rev() {
        if intensity(i) < half {
            let (a, b) = (intensity(i), intensity(i + 1));
            left = Some(i as f64 + (half - a) / (b - a));
            break;
        }
    }
    let mut right = None;
    for i in peak.index + 1..envelope.len() {
        if intensity(i) < half {
            let (a, b) = (intensity(i - 1), intensity(i));
            right = Some((i - 1) as f64 + (a - half) / (a - b));
            break;
        }
    }
    match (left, right) {
        (Some(l), Some(r)) => Ok((r - l) * step),
        _ => Err(Error::Grid("envelope does not fall to half maximum inside the grid".into())),
    }
}

/// Best normalized overlap ⟨a, b shifted⟩ / (|a||b|) over a few lags around `lag`.
fn envelope_correlation(a: &[f64], b: &[f64], lag: isize) -> f64 {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let n = a.len() as isize;
    (lag - 2..=lag + 2)
        .map(|l| {
            let mut s = 0.0;
            for i in 0.max(-l)..n.min(n - l) {
                s += a[i as usize] * b[(i + l) as usize];
            }
            s / (na * nb)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

struct Synthesized {
    grid: Grid,
    times: Vec<f64>,
    input: Vec<f64>,
    incident: Vec<Complex64>,
    output: Vec<Complex64>,
}

fn synthesize(
    scenario: &Scenario,
    pulse: &PulseSpec,
    channel: Channel,
    opts: &SynthesisOptions,
    grid: Grid,
) -> Result<Synthesized> {
    let times = grid.times();
    let input = incident_series(pulse, &grid);
    let incident = analytic_through(&input, grid.step, opts.exec, |_| Ok(Complex64::new(1.0, 0.0)))?;
    let output = transmit_series(scenario, &input, grid.step, pulse.carrier, channel, opts)?;
    Ok(Synthesized {
        grid,
        times,
        input,
        incident,
        output,
    })
}

fn report(scenario: &Scenario, pulse: &PulseSpec, s: &Synthesized) -> Result<PulseReport> {
    let step = s.grid.step;
    let env_in: Vec<f64> = s.incident.iter().map(|z| z.norm()).collect();
    let env_out: Vec<f64> = s.output.iter().map(|z| z.norm()).collect();
    let peak_in = find_peak(&env_in, &s.times, step);
    let peak_out = find_peak(&env_out, &s.times, step);
    if peak_out.amplitude == 0.0 {
        return Err(Error::DegenerateChannel { channel: "output" });
    }
    let fwhm_in = intensity_fwhm(&env_in, &peak_in, step)?;
    let fwhm_out = intensity_fwhm(&env_out, &peak_out, step)?;
    let lag = peak_out.index as isize - peak_in.index as isize;
    let quasi_static_ratio = (scenario.d > 0.0).then(|| scenario.c() * pulse.fwhm / scenario.d);
    Ok(PulseReport {
        peak_time: peak_out.time,
        fwhm: fwhm_out,
        shape_correlation: envelope_correlation(&env_in, &env_out, lag).clamp(-1.0, 1.0),
        peak_amplitude: peak_out.amplitude / peak_in.amplitude,
        incident_peak_time: peak_in.time,
        incident_fwhm: fwhm_in,
        delay: peak_out.time - peak_in.time,
        quasi_static_ratio,
        quasi_static: quasi_static_ratio.is_none_or(|r| r > QUASI_STATIC_THRESHOLD),
    })
}

fn to_series(s: &Synthesized, channel: Channel) -> TimeSeries {
    TimeSeries {
        t_samples: s.times.clone(),
        values: s.output.iter().map(|z| z.re).collect(),
        envelope: s.output.iter().map(|z| z.norm()).collect(),
        meta: SeriesMeta {
            step: s.grid.step,
            span: s.grid.step * s.grid.samples as f64,
            samples: s.grid.samples,
            channel,
        },
    }
}

pub fn propagate_pulse(scenario: &Scenario, pulse: &PulseSpec, channel: Channel) -> Result<(TimeSeries, PulseReport)> {
    propagate_pulse_with(scenario, pulse, channel, &SynthesisOptions::default())
}

pub fn propagate_pulse_with(
    scenario: &Scenario,
    pulse: &PulseSpec,
    channel: Channel,
    opts: &SynthesisOptions,
) -> Result<(TimeSeries, PulseReport)> {
    scenario.validate()?;
    check_pulse(pulse)?;
    let grid = build_grid(pulse, &opts.grid, MIN_SPAN_FWHM, DEFAULT_SPAN_FWHM)?;
    let s = synthesize(scenario, pulse, channel, opts, grid)?;
    let report = report(scenario, pulse, &s)?;
    Ok((to_series(&s, channel), report))
}

/// Peak time with the prisms closed minus peak time with the gap open
/// (transmitted pulse, same grid).
pub fn differential_delay(scenario: &Scenario, pulse: &PulseSpec) -> Result<f64> {
    differential_delay_with(scenario, pulse, &SynthesisOptions::default())
}

pub fn differential_delay_with(scenario: &Scenario, pulse: &PulseSpec, opts: &SynthesisOptions) -> Result<f64> {
    let (_, closed) = propagate_pulse_with(&scenario.with_gap(0.0), pulse, Channel::Transmission, opts)?;
    if scenario.d == 0.0 {
        return Ok(0.0);
    }
    let (_, gapped) = propagate_pulse_with(scenario, pulse, Channel::Transmission, opts)?;
    Ok(closed.peak_time - gapped.peak_time)
}

/// Supremum of the linearly interpolated envelope over t < `before`,
/// relative to the envelope's peak sample. Interpolating up to `before`
/// keeps the result independent of where the grid happens to fall.
fn pre_front_level(envelope: &[f64], times: &[f64], before: f64) -> f64 {
    let peak = envelope.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    let inside = times.partition_point(|t| *t < before);
    let mut level = envelope[..inside].iter().cloned().fold(0.0, f64::max);
    if inside > 0 && inside < times.len() {
        let (t0, t1) = (times[inside - 1], times[inside]);
        let w = (before - t0) / (t1 - t0);
        level = level.max((1.0 - w) * envelope[inside - 1] + w * envelope[inside]);
    }
    level / peak
}

/// Checks that nothing reaches the exit plane before the incident front
/// could have crossed the gap at c. Uses [`Synthesis::FixedTransverse`]
/// unless the options say otherwise.
pub fn front_causality_check(scenario: &Scenario, pulse: &PulseSpec) -> Result<CausalityReport> {
    let opts = SynthesisOptions {
        mode: Synthesis::FixedTransverse,
        ..SynthesisOptions::default()
    };
    front_causality_check_with(scenario, pulse, &opts)
}

pub fn front_causality_check_with(
    scenario: &Scenario,
    pulse: &PulseSpec,
    opts: &SynthesisOptions,
) -> Result<CausalityReport> {
    scenario.validate()?;
    check_pulse(pulse)?;
    let PulseShape::GaussianTruncatedFront { front_time, .. } = pulse.shape else {
        return Err(Error::invalid("shape", "causality check needs a truncated-front pulse"));
    };
    let arrival_time = front_time + scenario.d / scenario.c();
    let grid = build_grid(pulse, &opts.grid, CAUSALITY_SPAN_FWHM, CAUSALITY_SPAN_FWHM)?;
    let step = grid.step;
    let span = step * grid.samples as f64;

    let base = synthesize(scenario, pulse, Channel::Transmission, opts, grid)?;
    let env_out: Vec<f64> = base.output.iter().map(|z| z.norm()).collect();
    let env_in: Vec<f64> = base.incident.iter().map(|z| z.norm()).collect();
    let leakage = pre_front_level(&env_out, &base.times, arrival_time);
    let incident_floor = pre_front_level(&env_in, &base.times, front_time);
    let in_peak = env_in.iter().cloned().fold(0.0, f64::max);
    let roundoff_floor = base
        .incident
        .iter()
        .zip(&base.input)
        .map(|(y, x)| (y.re - x).abs())
        .fold(0.0, f64::max)
        / in_peak;

    let fine_opts = SynthesisOptions {
        grid: GridOptions {
            step: Some(0.5 * step),
            span: Some(span),
            pad_pow2: opts.grid.pad_pow2,
        },
        ..*opts
    };
    let fine_grid = build_grid(pulse, &fine_opts.grid, CAUSALITY_SPAN_FWHM, CAUSALITY_SPAN_FWHM)?;
    let fine = synthesize(scenario, pulse, Channel::Transmission, &fine_opts, fine_grid)?;
    let env_fine: Vec<f64> = fine.output.iter().map(|z| z.norm()).collect();
    let refined_leakage = pre_front_level(&env_fine, &fine.times, arrival_time);

    let converged = (refined_leakage - leakage).abs() <= (0.01 * leakage).max(10.0 * roundoff_floor);
    Ok(CausalityReport {
        leakage,
        refined_leakage,
        incident_floor,
        roundoff_floor,
        arrival_time,
        below_floor: leakage <= incident_floor,
        converged,
    })
}
