//! Run configuration: an optional JSON file overlaid by command-line flags.
//! Units are the human ones used on the command line (GHz, degrees, mm, ns).

use std::path::Path;

use evanesce_core::{Channel, LightSpeed, Polarization, Scenario};
use serde::Deserialize;

use crate::CliError;

/// Everything that may appear in a `--config` file. All fields optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: Option<f64>,
    pub f_ghz: Option<f64>,
    pub theta_deg: Option<f64>,
    pub d_mm: Option<f64>,
    pub polarization: Option<Polarization>,
    pub codata: Option<bool>,
    pub channel: Option<Channel>,
    pub d_start_mm: Option<f64>,
    pub d_stop_mm: Option<f64>,
    pub d_step_mm: Option<f64>,
    pub tune_shift_cm: Option<f64>,
    pub fwhm_ns: Option<f64>,
    pub step_ps: Option<f64>,
    pub span_ns: Option<f64>,
    pub pad_pow2: Option<bool>,
    pub front_sigmas: Option<f64>,
    pub rise_ns: Option<f64>,
    pub waist_wavelengths: Option<f64>,
    pub delay_ps: Option<f64>,
    pub train_first_car: Option<u64>,
    pub train_cars: Option<u64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
    }
}

/// Flag value if given, else file value, else default.
pub fn pick<T: Copy>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Scenario fields after merging, in CLI units.
#[derive(Debug, Clone, Copy)]
pub struct ScenarioArgs {
    pub n: f64,
    pub f_ghz: f64,
    pub theta_deg: f64,
    pub d_mm: f64,
    pub polarization: Polarization,
    pub codata: bool,
}

impl Default for ScenarioArgs {
    fn default() -> Self {
        ScenarioArgs {
            n: 1.6,
            f_ghz: 9.15,
            theta_deg: 45.0,
            d_mm: 40.0,
            polarization: Polarization::Te,
            codata: false,
        }
    }
}

impl ScenarioArgs {
    pub fn build(&self) -> Result<Scenario, CliError> {
        let checks = [
            ("n", self.n),
            ("f_ghz", self.f_ghz),
            ("theta_deg", self.theta_deg),
            ("d_mm", self.d_mm),
        ];
        for (field, v) in checks {
            if !v.is_finite() {
                return Err(CliError::Config(format!("{field}: must be finite, got {v}")));
            }
        }
        let s = Scenario::from_degrees(self.n, self.f_ghz * 1e9, self.theta_deg, self.d_mm * 1e-3, self.polarization)?;
        Ok(if self.codata {
            s.with_light(LightSpeed::Codata)
        } else {
            s
        })
    }
}
