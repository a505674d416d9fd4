//! Prism/gap/prism boundary matching.
//!
//! The gap is handled with its characteristic (Abelès) matrix, using one
//! complex normal wavenumber for both the evanescent and the propagating
//! case. The matrix is scaled by e^{ik_z d}, which keeps every entry
//! bounded for arbitrarily thick barriers. Its off-diagonal entries are written with
//! sin(z)/z, so the solve is regular through the critical angle.
//!
//! Field conventions: time dependence e^{−iωt}; the tangential primary
//! field U is E_y for TE and H_y for TM; V = ∂U/∂z / (i·p) with p = 1 (TE) or
//! p = ε_r (TM), which makes V continuous across interfaces. The
//! incident amplitude is 1. `r` is referenced to the first interface (z = 0)
//! and `t` to the second (z = d), so the transmission phase contains the gap
//! only.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::numerics::{cos_scaled, sinc_scaled, sqrt_upper};
use crate::scenario::{wavevectors, Channel, Polarization, Scenario};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatterResult {
    pub r: Complex64,
    pub t: Complex64,
    /// Amplitude of e^{i k_z z} in the gap (the decaying e^{−κz} part when evanescent).
    pub c_amp: Complex64,
    /// Amplitude of e^{−i k_z z} in the gap (the growing e^{+κz} part when evanescent).
    pub d_amp: Complex64,
    /// Gap normal wavenumber, Im ≥ 0 (= iκ beyond the critical angle).
    pub k_z_gap: Complex64,
    /// Prism normal wavenumber.
    pub k_z_prism: Complex64,
    /// Prism admittance k_z/p.
    pub q_prism: Complex64,
    pub k_x: f64,
    pub omega: f64,
    pub d: f64,
    /// The e^{−i k_z z} component evaluated at z = d. Stays finite when `d_amp` underflows.
    growing_at_exit: Complex64,
}

impl ScatterResult {
    pub fn coefficient(&self, channel: Channel) -> Complex64 {
        match channel {
            Channel::Transmission => self.t,
            Channel::Reflection => self.r,
        }
    }

    pub fn transmittance(&self) -> f64 {
        self.t.norm_sqr()
    }

    pub fn reflectance(&self) -> f64 {
        self.r.norm_sqr()
    }

    /// Tangential field U and V = ∂U/∂z / i (gap has p = 1) at depth z ∈ [0, d].
    pub fn gap_field(&self, z: f64) -> (Complex64, Complex64) {
        let i = Complex64::i();
        let k = self.k_z_gap;
        if (k * self.d).norm() < 1.0 {
            // Propagate the entrance values; no cancellation at this scale and
            // regular when k → 0.
            let u0 = 1.0 + self.r;
            let v0 = self.q_prism * (1.0 - self.r);
            let kz = k * z;
            let cosv = kz.cos();
            let sinc = if kz.norm() < 1e-8 {
                Complex64::new(1.0, 0.0)
            } else {
                kz.sin() / kz
            };
            let u = cosv * u0 + i * v0 * z * sinc;
            let v = i * k * k * z * sinc * u0 + cosv * v0;
            (u, v)
        } else {
            let fwd = self.c_amp * (i * k * z).exp();
            let bwd = self.growing_at_exit * (i * k * (self.d - z)).exp();
            (fwd + bwd, k * (fwd - bwd))
        }
    }
}

/// Prism admittance weight p (ε_r for TM, 1 for TE).
fn prism_weight(scenario: &Scenario) -> f64 {
    match scenario.polarization {
        Polarization::Te => 1.0,
        Polarization::Tm => scenario.n * scenario.n,
    }
}

/// Exact reflection/transmission for the incident plane wave (ω, k_x).
pub fn scatter(scenario: &Scenario, omega: f64, k_x: f64) -> Result<ScatterResult> {
    scenario.validate()?;
    if !omega.is_finite() || omega <= 0.0 {
        return Err(Error::invalid("omega", format!("must be finite and > 0, got {omega}")));
    }
    if !k_x.is_finite() || k_x < 0.0 {
        return Err(Error::invalid("k_x", format!("must be finite and >= 0, got {k_x}")));
    }
    let k_prism = scenario.n * omega / scenario.c();
    if k_x > k_prism {
        return Err(Error::invalid(
            "k_x",
            format!("k_x = {k_x} exceeds the prism wavenumber {k_prism}; no real incidence angle"),
        ));
    }
    solve(scenario, omega, k_x)
}

/// Boundary solve without the real-angle precondition. For k_x beyond the
/// prism wavenumber the incident "wave" is the analytic continuation with
/// Im k_z ≥ 0; used by fixed-k_x time-domain synthesis.
pub(crate) fn solve(scenario: &Scenario, omega: f64, k_x: f64) -> Result<ScatterResult> {
    let c = scenario.c();
    let k0 = omega / c;
    let k_prism = scenario.n * k0;
    let k1 = sqrt_upper(Complex64::new((k_prism - k_x) * (k_prism + k_x), 0.0));
    let k2 = sqrt_upper(Complex64::new((k0 - k_x) * (k0 + k_x), 0.0));
    if k1.norm() == 0.0 {
        return Err(Error::Grazing);
    }
    let q1 = k1 / prism_weight(scenario);
    let d = scenario.d;
    let i = Complex64::i();

    let z = k2 * d;
    let cs = cos_scaled(z);
    let sn = sinc_scaled(z);
    // Scaled inverse characteristic matrix of the gap (exit → entrance).
    let m12 = -i * d * sn;
    let m21 = -i * k2 * k2 * d * sn;
    let sum = 2.0 * cs + m12 * q1 + m21 / q1;
    let phase = (i * z).exp();
    let t = 2.0 * phase / sum;
    let r = (m12 * q1 - m21 / q1) / sum;

    let ratio = q1 / k2;
    let c_amp = (1.0 + ratio) / sum;
    let growing_at_exit = 0.5 * t * (1.0 - ratio);
    let d_amp = growing_at_exit * phase;

    Ok(ScatterResult {
        r,
        t,
        c_amp,
        d_amp,
        k_z_gap: k2,
        k_z_prism: k1,
        q_prism: q1,
        k_x,
        omega,
        d,
        growing_at_exit,
    })
}

/// Scatters the scenario's own incident wave (carrier frequency, angle θ).
pub fn scatter_carrier(scenario: &Scenario) -> Result<ScatterResult> {
    let omega = scenario.omega();
    scatter(scenario, omega, scenario.k_x(omega))
}

/// Wide-gap intensity transmission e^{−2κd}.
pub fn approx_transmission(scenario: &Scenario) -> Result<f64> {
    scenario.require_tunneling()?;
    let kappa = wavevectors(scenario, scenario.omega())?.kappa;
    Ok((-2.0 * kappa * scenario.d).exp())
}

/// 10·log₁₀(e^{−2κ·1 mm}); negative means loss.
pub fn attenuation_db_per_mm(scenario: &Scenario) -> Result<f64> {
    scenario.require_tunneling()?;
    let kappa = wavevectors(scenario, scenario.omega())?.kappa;
    Ok(10.0 * (-2.0 * kappa * 1e-3) / std::f64::consts::LN_10)
}

/// Loss across the whole gap in dB, reported positive.
pub fn gap_attenuation_db(scenario: &Scenario) -> Result<f64> {
    let per_mm = attenuation_db_per_mm(scenario)?;
    Ok(-per_mm * scenario.d * 1e3)
}
