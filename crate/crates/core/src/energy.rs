//! In-gap field, time-averaged stored energy and dwell time.
//!
//! With the tangential field U (E_y for TE, H_y for TM) and V = ∂U/∂z / i,
//! the time-averaged electromagnetic energy density in the air gap is
//!
//! ```text
//! u = a/4 · |U|² + b/(4ω²) · (|V|² + k_x²|U|²)
//! ```
//!
//! with (a, b) = (ε₀, 1/μ₀) for TE and (μ₀, 1/ε₀) for TM. Both the electric and
//! magnetic parts are included. Fields are normalized to a unit incident
//! amplitude, so energies are per unit incident amplitude squared.

use serde::{Deserialize, Serialize};

use crate::delay::goos_hanchen_shift;
use crate::numerics::quad::integrate;
use crate::parallel::Execution;
use crate::scattering::{scatter, ScatterResult};
use crate::scenario::{Channel, Polarization, Scenario, EPSILON_0};
use crate::sweep::SweepTable;
use crate::{Complex64, Error, Result};

/// Relative tolerance for the energy quadrature.
pub const QUAD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Beyond the critical angle: the gap field is a decaying plus a growing exponential.
    Evanescent,
    /// Below the critical angle: the gap field oscillates.
    Propagating,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapFieldProfile {
    pub z_samples: Vec<f64>,
    /// Tangential primary field U at each sample.
    pub field: Vec<Complex64>,
    /// ∂U/∂z / i at each sample.
    pub derivative: Vec<Complex64>,
    /// Time-averaged energy density (J/m³ per unit incident amplitude²).
    pub energy_density: Vec<f64>,
    pub regime: Regime,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBudget {
    /// Energy in the d × s region per unit depth (J/m).
    pub stored: f64,
    /// Incident power through the s-wide input cross-section per unit depth (W/m).
    pub incident_power: f64,
    /// stored / incident_power (s); 0 for an empty region.
    pub dwell_time: f64,
    /// Lateral extent s of the region (m).
    pub lateral_extent: f64,
    /// Energy per unit interface area, ∫u dz (J/m²).
    pub energy_per_area: f64,
    /// Incident normal energy flux (W/m²).
    pub incident_flux: f64,
}

#[derive(Debug, Clone, Copy)]
struct DensityWeights {
    a: f64,
    b: f64,
}

fn weights(scenario: &Scenario) -> DensityWeights {
    let eps0 = EPSILON_0;
    let mu0 = scenario.mu0();
    match scenario.polarization {
        Polarization::Te => DensityWeights { a: eps0, b: 1.0 / mu0 },
        Polarization::Tm => DensityWeights { a: mu0, b: 1.0 / eps0 },
    }
}

fn density(w: DensityWeights, omega: f64, k_x: f64, u: Complex64, v: Complex64) -> f64 {
    let uu = u.norm_sqr();
    0.25 * w.a * uu + 0.25 * w.b / (omega * omega) * (v.norm_sqr() + k_x * k_x * uu)
}

/// Energy density at depth z for an already solved scattering problem.
pub fn energy_density(scenario: &Scenario, res: &ScatterResult, z: f64) -> f64 {
    let (u, v) = res.gap_field(z);
    density(weights(scenario), res.omega, res.k_x, u, v)
}

/// Normal energy flux of the unit-amplitude incident wave (W/m²).
pub fn incident_flux(scenario: &Scenario, res: &ScatterResult) -> f64 {
    0.5 * weights(scenario).b * res.q_prism.re / res.omega
}

pub fn gap_field(scenario: &Scenario, omega: f64, k_x: f64, n_samples: usize) -> Result<GapFieldProfile> {
    if n_samples < 2 {
        return Err(Error::invalid("n_samples", format!("need at least 2, got {n_samples}")));
    }
    let res = scatter(scenario, omega, k_x)?;
    let w = weights(scenario);
    let d = scenario.d;
    let z_samples: Vec<f64> = (0..n_samples)
        .map(|i| d * i as f64 / (n_samples - 1) as f64)
        .collect();
    let mut field = Vec::with_capacity(n_samples);
    let mut derivative = Vec::with_capacity(n_samples);
    let mut energy_density = Vec::with_capacity(n_samples);
    for &z in &z_samples {
        let (u, v) = res.gap_field(z);
        field.push(u);
        derivative.push(v);
        energy_density.push(density(w, omega, k_x, u, v));
    }
    let regime = if k_x > omega / scenario.c() {
        Regime::Evanescent
    } else {
        Regime::Propagating
    };
    Ok(GapFieldProfile {
        z_samples,
        field,
        derivative,
        energy_density,
        regime,
    })
}

/// Energy per unit area stored in [z0, z1] of the gap.
fn integrated_energy(scenario: &Scenario, res: &ScatterResult, z0: f64, z1: f64) -> Result<f64> {
    if z1 <= z0 {
        return Ok(0.0);
    }
    integrate(|z| energy_density(scenario, res, z), z0, z1, QUAD_TOL)
}

pub fn stored_energy(scenario: &Scenario) -> Result<EnergyBudget> {
    scenario.require_tunneling()?;
    let omega = scenario.omega();
    let res = scatter(scenario, omega, scenario.k_x(omega))?;
    let energy_per_area = integrated_energy(scenario, &res, 0.0, scenario.d)?;
    let incident_flux = incident_flux(scenario, &res);
    let lateral_extent = goos_hanchen_shift(scenario, Channel::Transmission)?.max(0.0);
    let stored = energy_per_area * lateral_extent;
    let incident_power = incident_flux * lateral_extent;
    let dwell_time = if stored == 0.0 { 0.0 } else { stored / incident_power };
    Ok(EnergyBudget {
        stored,
        incident_power,
        dwell_time,
        lateral_extent,
        energy_per_area,
        incident_flux,
    })
}

/// Fraction of the gap's stored energy lying in [0, z] for each requested z.
pub fn cumulative_energy(scenario: &Scenario, z_values: &[f64]) -> Result<Vec<f64>> {
    scenario.require_tunneling()?;
    let omega = scenario.omega();
    let res = scatter(scenario, omega, scenario.k_x(omega))?;
    let total = integrated_energy(scenario, &res, 0.0, scenario.d)?;
    if total == 0.0 {
        return Ok(vec![0.0; z_values.len()]);
    }
    z_values
        .iter()
        .map(|&z| {
            if !(0.0..=scenario.d).contains(&z) {
                return Err(Error::invalid("z", format!("{z} m is outside the gap [0, {}]", scenario.d)));
            }
            Ok(integrated_energy(scenario, &res, 0.0, z)? / total)
        })
        .collect()
}

/// Stored energy relative to a wave of uniform density u(0) filling the same
/// volume. Tends to 1 as κd → 0 and falls as the field decays into the gap.
pub fn evanescent_vs_free_energy(scenario: &Scenario) -> Result<f64> {
    scenario.require_tunneling()?;
    let omega = scenario.omega();
    let res = scatter(scenario, omega, scenario.k_x(omega))?;
    let entrance = energy_density(scenario, &res, 0.0);
    if scenario.d == 0.0 {
        return Ok(1.0);
    }
    Ok(integrated_energy(scenario, &res, 0.0, scenario.d)? / (entrance * scenario.d))
}

/// Energy budget at each gap width, evaluated independently per d.
pub fn energy_sweep(scenario: &Scenario, d_values: &[f64], exec: Execution) -> Result<Vec<EnergyBudget>> {
    scenario.require_tunneling()?;
    if d_values.iter().any(|d| !d.is_finite() || *d < 0.0) {
        return Err(Error::invalid("d_values", "gap widths must be finite and non-negative"));
    }
    exec.map(d_values, |&d| {
        stored_energy(&scenario.with_gap(d)).map_err(|e| Error::SweepPoint {
            d,
            source: Box::new(e),
        })
    })
    .into_iter()
    .collect()
}

/// Columns `d_m, energy_per_area, dwell_s, stored, lateral_extent_m`.
pub fn energy_table(d_values: &[f64], budgets: &[EnergyBudget]) -> SweepTable {
    let mut table = SweepTable::new(["d_m", "energy_per_area", "dwell_s", "stored", "lateral_extent_m"]);
    for (d, b) in d_values.iter().zip(budgets) {
        table.push(vec![*d, b.energy_per_area, b.dwell_time, b.stored, b.lateral_extent]);
    }
    table
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainLoad {
    pub total_passengers: u64,
    /// total / (2N).
    pub delay_proxy: f64,
}

/// Passengers on a train whose first car carries N and every following car
/// half the previous one (integer halving). Never reaches 2N.
pub fn train_model(first_car: u64, cars: u64) -> Result<TrainLoad> {
    if first_car == 0 || cars == 0 {
        return Err(Error::invalid("train", "first car and car count must be at least 1"));
    }
    let mut total = 0u64;
    let mut load = first_car;
    for _ in 0..cars {
        if load == 0 {
            break;
        }
        total += load;
        load /= 2;
    }
    Ok(TrainLoad {
        total_passengers: total,
        delay_proxy: total as f64 / (2.0 * first_car as f64),
    })
}

/// Continuous version: N·(2 − 2^{1−cars}), with the same delay proxy.
pub fn train_model_continuous(first_car: f64, cars: f64) -> Result<(f64, f64)> {
    if !(first_car > 0.0 && first_car.is_finite()) || !(cars >= 1.0) {
        return Err(Error::invalid("train", "first car must be positive and cars at least 1"));
    }
    let total = first_car * (2.0 - (1.0 - cars).exp2());
    Ok((total, total / (2.0 * first_car)))
}
