//! Physical configuration shared by every module, the derived wavevectors,
//! and the pulse/beam descriptions.
//!
//! Angles are measured from the interface normal. The gap is vacuum (air)
//! between two identical lossless prisms of index `n`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Rounded vacuum light speed used by default (m/s).
pub const C_ROUNDED: f64 = 3.0e8;
/// CODATA vacuum light speed (m/s).
pub const C_CODATA: f64 = 299_792_458.0;
/// Vacuum permeability consistent with the chosen light speed is derived from this.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    /// Electric field perpendicular to the plane of incidence.
    #[default]
    Te,
    /// Magnetic field perpendicular to the plane of incidence.
    Tm,
}

impl std::str::FromStr for Polarization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "te" | "s" => Ok(Polarization::Te),
            "tm" | "p" => Ok(Polarization::Tm),
            other => Err(Error::invalid(
                "polarization",
                format!("expected te or tm, got {other:?}"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LightSpeed {
    /// c = 3×10⁸ m/s, reproduces the rounded headline numbers.
    #[default]
    Rounded,
    Codata,
}

impl LightSpeed {
    pub fn value(self) -> f64 {
        match self {
            LightSpeed::Rounded => C_ROUNDED,
            LightSpeed::Codata => C_CODATA,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Transmission,
    Reflection,
}

impl Channel {
    pub fn name(self) -> &'static str {
        match self {
            Channel::Transmission => "transmission",
            Channel::Reflection => "reflection",
        }
    }
}

impl std::str::FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "t" | "transmission" | "transmitted" => Ok(Channel::Transmission),
            "r" | "reflection" | "reflected" => Ok(Channel::Reflection),
            other => Err(Error::invalid(
                "channel",
                format!("expected transmission or reflection, got {other:?}"),
            )),
        }
    }
}

/// Prism/gap/prism configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// Prism refractive index.
    pub n: f64,
    /// Carrier frequency (Hz).
    pub f: f64,
    /// Incidence angle from the interface normal (rad).
    pub theta: f64,
    /// Gap width (m).
    pub d: f64,
    pub polarization: Polarization,
    #[serde(default)]
    pub light: LightSpeed,
}

impl Scenario {
    /// Builds and validates a scenario; `theta` in radians.
    pub fn new(n: f64, f: f64, theta: f64, d: f64, polarization: Polarization) -> Result<Self> {
        let s = Scenario {
            n,
            f,
            theta,
            d,
            polarization,
            light: LightSpeed::Rounded,
        };
        s.validate()?;
        Ok(s)
    }

    /// Same as [`Scenario::new`] with the angle in degrees.
    pub fn from_degrees(
        n: f64,
        f: f64,
        theta_deg: f64,
        d: f64,
        polarization: Polarization,
    ) -> Result<Self> {
        Self::new(n, f, theta_deg.to_radians(), d, polarization)
    }

    /// n = 1.6, 9.15 GHz, 45°, 40 mm gap, TE.
    pub fn headline() -> Self {
        Scenario {
            n: 1.6,
            f: 9.15e9,
            theta: std::f64::consts::FRAC_PI_4,
            d: 0.040,
            polarization: Polarization::Te,
            light: LightSpeed::Rounded,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.n.is_finite() || self.n <= 1.0 {
            return Err(Error::invalid("n", format!("must be finite and > 1, got {}", self.n)));
        }
        if !self.f.is_finite() || self.f <= 0.0 {
            return Err(Error::invalid("f", format!("must be finite and > 0, got {}", self.f)));
        }
        if !self.theta.is_finite() || self.theta <= 0.0 || self.theta >= std::f64::consts::FRAC_PI_2
        {
            return Err(Error::invalid(
                "theta",
                format!("must lie in (0°, 90°), got {}°", self.theta.to_degrees()),
            ));
        }
        if !self.d.is_finite() || self.d < 0.0 {
            return Err(Error::invalid("d", format!("must be finite and >= 0, got {}", self.d)));
        }
        Ok(())
    }

    pub fn with_gap(mut self, d: f64) -> Self {
        self.d = d;
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_frequency(mut self, f: f64) -> Self {
        self.f = f;
        self
    }

    pub fn with_polarization(mut self, polarization: Polarization) -> Self {
        self.polarization = polarization;
        self
    }

    pub fn with_light(mut self, light: LightSpeed) -> Self {
        self.light = light;
        self
    }

    pub fn c(&self) -> f64 {
        self.light.value()
    }

    /// Carrier angular frequency.
    pub fn omega(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.f
    }

    /// n·sinθ, the interface-parallel index.
    pub fn parallel_index(&self) -> f64 {
        self.n * self.theta.sin()
    }

    /// True beyond the critical angle, where the gap field is evanescent.
    pub fn is_tunneling(&self) -> bool {
        self.parallel_index() > 1.0
    }

    /// Interface-parallel wavenumber of the incident wave at `omega`.
    pub fn k_x(&self, omega: f64) -> f64 {
        self.parallel_index() * omega / self.c()
    }

    /// Rejects scenarios outside the tunneling regime.
    pub fn require_tunneling(&self) -> Result<()> {
        self.validate()?;
        if self.is_tunneling() {
            Ok(())
        } else {
            Err(Error::BelowCriticalAngle {
                theta_deg: self.theta.to_degrees(),
                critical_deg: critical_angle(self.n)?.to_degrees(),
            })
        }
    }

    /// Vacuum permeability paired with [`EPSILON_0`] so that μ₀ε₀c² = 1.
    pub fn mu0(&self) -> f64 {
        1.0 / (EPSILON_0 * self.c() * self.c())
    }
}

/// Propagation constants at one frequency and incidence angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wavevectors {
    pub omega: f64,
    pub k_x: f64,
    pub k_z_prism: f64,
    /// Gap decay constant; 0 when the gap wave propagates.
    pub kappa: f64,
}

pub fn wavevectors(scenario: &Scenario, omega: f64) -> Result<Wavevectors> {
    scenario.validate()?;
    if !omega.is_finite() || omega <= 0.0 {
        return Err(Error::invalid("omega", format!("must be finite and > 0, got {omega}")));
    }
    let k_prism = scenario.n * omega / scenario.c();
    let k_x = k_prism * scenario.theta.sin();
    let k_z_prism = k_prism * scenario.theta.cos();
    let radicand = scenario.parallel_index().powi(2) - 1.0;
    let kappa = if radicand > 0.0 {
        omega / scenario.c() * radicand.sqrt()
    } else {
        0.0
    };
    Ok(Wavevectors {
        omega,
        k_x,
        k_z_prism,
        kappa,
    })
}

/// arcsin(1/n).
pub fn critical_angle(n: f64) -> Result<f64> {
    if !n.is_finite() || n <= 1.0 {
        return Err(Error::invalid(
            "n",
            format!("total internal reflection needs n > 1, got {n}"),
        ));
    }
    Ok((1.0 / n).asin())
}

/// Vacuum wavelength c/f with the rounded light speed.
pub fn vacuum_wavelength(f: f64) -> Result<f64> {
    vacuum_wavelength_with(f, LightSpeed::Rounded)
}

pub fn vacuum_wavelength_with(f: f64, light: LightSpeed) -> Result<f64> {
    if !f.is_finite() || f <= 0.0 {
        return Err(Error::invalid("f", format!("must be finite and > 0, got {f}")));
    }
    Ok(light.value() / f)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PulseShape {
    Gaussian,
    /// Gaussian switched on at `front_time`. The envelope is exactly zero
    /// before the front and reaches the Gaussian after `rise_time` through a
    /// C∞ ramp, so the spectrum is resolvable on a finite grid.
    GaussianTruncatedFront { front_time: f64, rise_time: f64 },
}

/// Temporal envelope on a carrier. `fwhm` is the intensity full width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    pub fwhm: f64,
    pub carrier: f64,
    pub shape: PulseShape,
}

impl PulseSpec {
    pub fn gaussian(fwhm: f64, carrier: f64) -> Result<Self> {
        let p = PulseSpec {
            fwhm,
            carrier,
            shape: PulseShape::Gaussian,
        };
        p.validate()?;
        Ok(p)
    }

    /// Gaussian with its front at `front_sigmas` field standard deviations
    /// before the peak (negative = before), default 1 ns rise.
    pub fn truncated(fwhm: f64, carrier: f64, front_sigmas: f64) -> Result<Self> {
        let sigma = fwhm / (2.0 * std::f64::consts::LN_2.sqrt());
        let p = PulseSpec {
            fwhm,
            carrier,
            shape: PulseShape::GaussianTruncatedFront {
                front_time: front_sigmas * sigma,
                rise_time: DEFAULT_RISE_TIME,
            },
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.fwhm.is_finite() || self.fwhm <= 0.0 {
            return Err(Error::invalid("fwhm", format!("must be finite and > 0, got {}", self.fwhm)));
        }
        if !self.carrier.is_finite() || self.carrier <= 0.0 {
            return Err(Error::invalid(
                "carrier",
                format!("must be finite and > 0, got {}", self.carrier),
            ));
        }
        if let PulseShape::GaussianTruncatedFront {
            front_time,
            rise_time,
        } = self.shape
        {
            if !front_time.is_finite() {
                return Err(Error::invalid("front_time", "must be finite"));
            }
            if !rise_time.is_finite() || rise_time < 0.0 {
                return Err(Error::invalid("rise_time", "must be finite and >= 0"));
            }
        }
        Ok(())
    }

    /// Standard deviation of the field envelope exp(−t²/2σ²).
    pub fn field_sigma(&self) -> f64 {
        self.fwhm / (2.0 * std::f64::consts::LN_2.sqrt())
    }
}

pub const DEFAULT_RISE_TIME: f64 = 1.0e-9;

/// c·fwhm with the rounded light speed.
pub fn pulse_spatial_extent(pulse: &PulseSpec) -> f64 {
    C_ROUNDED * pulse.fwhm
}

/// Transverse Gaussian beam profile; `waist` is the 1/e field half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSpec {
    pub waist: f64,
}

impl BeamSpec {
    pub fn new(waist: f64) -> Result<Self> {
        if !waist.is_finite() || waist <= 0.0 {
            return Err(Error::invalid("waist", format!("must be finite and > 0, got {waist}")));
        }
        Ok(BeamSpec { waist })
    }

    /// Rejects beams narrower than five vacuum wavelengths.
    pub fn check_paraxial(&self, wavelength: f64) -> Result<()> {
        if self.waist <= 5.0 * wavelength {
            return Err(Error::invalid(
                "waist",
                format!(
                    "angular-spectrum synthesis needs waist > 5λ ({:.4} m), got {:.4} m",
                    5.0 * wavelength,
                    self.waist
                ),
            ));
        }
        Ok(())
    }
}
