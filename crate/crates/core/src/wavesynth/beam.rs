use serde::{Deserialize, Serialize};

use crate::parallel::Execution;
use crate::scattering::scatter;
use crate::scenario::{vacuum_wavelength_with, BeamSpec, Channel, Scenario};
use crate::sweep::SweepTable;
use crate::{Complex64, Error, Result};

/// The angular spectrum covers δk_x ∈ [−H/w_x, H/w_x], w_x the footprint
/// half-width on the interface. At H = 12 the Gaussian weight at the edge is e^{−36}.
pub const SPECTRUM_HALF_WIDTH: f64 = 12.0;
const SPECTRUM_POINTS: usize = 1025;
const PROFILE_POINTS: usize = 1025;
/// Profile window in footprint half-widths either side of the specular point.
const PROFILE_HALF_WIDTH: f64 = 8.0;
/// Largest admissible fraction of spectral weight that cannot propagate in the prism.
const MAX_EVANESCENT_WEIGHT: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamProfile {
    /// Position along the interface, measured from the specular point (m).
    pub x_samples: Vec<f64>,
    pub intensity: Vec<f64>,
    pub centroid: f64,
    /// Centroid of the same beam with the structure replaced by a unit coefficient.
    pub reference_centroid: f64,
    pub centroid_shift: f64,
    pub channel: Channel,
    /// Spectral weight beyond the prism light cone (dropped).
    pub evanescent_weight: f64,
}

impl BeamProfile {
    /// Columns `x_m, intensity`.
    pub fn table(&self) -> SweepTable {
        let mut table = SweepTable::new(["x_m", "intensity"]);
        for (x, i) in self.x_samples.iter().zip(&self.intensity) {
            table.push(vec![*x, *i]);
        }
        table
    }
}

fn centroid(x: &[f64], intensity: &[f64]) -> f64 {
    let total: f64 = intensity.iter().sum();
    x.iter().zip(intensity).map(|(x, i)| x * i).sum::<f64>() / total
}

pub fn beam_centroid_shift(scenario: &Scenario, beam: &BeamSpec, channel: Channel) -> Result<BeamProfile> {
    beam_centroid_shift_with(scenario, beam, channel, Execution::default())
}

/// Monochromatic Gaussian beam at the carrier, decomposed over k_x, passed
/// component by component and recomposed along the output interface.
pub fn beam_centroid_shift_with(
    scenario: &Scenario,
    beam: &BeamSpec,
    channel: Channel,
    exec: Execution,
) -> Result<BeamProfile> {
    scenario.validate()?;
    beam.check_paraxial(vacuum_wavelength_with(scenario.f, scenario.light)?)?;
    let omega = scenario.omega();
    let k_x0 = scenario.k_x(omega);
    let k_prism = scenario.n * omega / scenario.c();
    let footprint = beam.waist / scenario.theta.cos();
    let half = SPECTRUM_HALF_WIDTH / footprint;
    let dk = 2.0 * half / (SPECTRUM_POINTS - 1) as f64;

    let deltas: Vec<f64> = (0..SPECTRUM_POINTS).map(|j| -half + j as f64 * dk).collect();
    let weights: Vec<f64> = deltas
        .iter()
        .map(|d| (-d * d * footprint * footprint / 4.0).exp())
        .collect();
    let launchable = |d: f64| (k_x0 + d).abs() < k_prism;
    let total_weight: f64 = weights.iter().map(|w| w * w).sum();
    let evanescent_weight = deltas
        .iter()
        .zip(&weights)
        .filter(|(d, _)| !launchable(**d))
        .map(|(_, w)| w * w)
        .sum::<f64>()
        / total_weight;
    if evanescent_weight > MAX_EVANESCENT_WEIGHT {
        return Err(Error::invalid(
            "waist",
            format!(
                "{:.2}% of the angular spectrum lies beyond the prism light cone",
                100.0 * evanescent_weight
            ),
        ));
    }

    let coeffs: Vec<Result<Complex64>> = exec.map(&deltas, |&d| {
        if !launchable(d) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        // t and r are even in k_x.
        Ok(scatter(scenario, omega, (k_x0 + d).abs())?.coefficient(channel))
    });
    let spectrum: Vec<(f64, Complex64, f64)> = deltas
        .iter()
        .zip(coeffs)
        .zip(&weights)
        .map(|((d, c), w)| c.map(|c| (*d, c * *w, if launchable(*d) { *w } else { 0.0 })))
        .collect::<Result<_>>()?;

    let window = PROFILE_HALF_WIDTH * footprint;
    let x_samples: Vec<f64> = (0..PROFILE_POINTS)
        .map(|i| -window + 2.0 * window * i as f64 / (PROFILE_POINTS - 1) as f64)
        .collect();
    let fields: Vec<(f64, f64)> = exec.map(&x_samples, |&x| {
        let mut out = Complex64::new(0.0, 0.0);
        let mut reference = Complex64::new(0.0, 0.0);
        for (d, a, w) in &spectrum {
            let phase = Complex64::from_polar(1.0, d * x);
            out += a * phase;
            reference += w * phase;
        }
        ((out * dk).norm_sqr(), (reference * dk).norm_sqr())
    });
    let intensity: Vec<f64> = fields.iter().map(|f| f.0).collect();
    let reference: Vec<f64> = fields.iter().map(|f| f.1).collect();
    if intensity.iter().all(|i| *i == 0.0) {
        return Err(Error::DegenerateChannel { channel: channel.name() });
    }
    let c = centroid(&x_samples, &intensity);
    let reference_centroid = centroid(&x_samples, &reference);
    Ok(BeamProfile {
        x_samples,
        intensity,
        centroid: c,
        reference_centroid,
        centroid_shift: c - reference_centroid,
        channel,
        evanescent_weight,
    })
}
