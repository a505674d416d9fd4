//! Frequency-domain synthesis through the prism/gap/prism structure.
//!
//! Pulses are sampled on a uniform time grid, taken to the frequency domain,
//! multiplied bin by bin by the transmission (or reflection) coefficient and
//! transformed back. Only positive frequencies are kept, so the result is
//! the analytic signal; its magnitude is the envelope. Beams are built the
//! same way over transverse wavenumber at a single frequency.

mod beam;
mod pulse;

use serde::{Deserialize, Serialize};

use crate::parallel::Execution;
use crate::scenario::Channel;
use crate::sweep::SweepTable;

pub use beam::{beam_centroid_shift, beam_centroid_shift_with, BeamProfile, SPECTRUM_HALF_WIDTH};
pub use pulse::{
    differential_delay, differential_delay_with, front_causality_check, front_causality_check_with,
    incident_envelope, propagate_pulse, propagate_pulse_with, transmit_series, CausalityReport,
    PulseReport, QUASI_STATIC_THRESHOLD,
};

/// How the incidence geometry follows frequency across the pulse spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Synthesis {
    /// Every frequency arrives at the scenario's angle θ, so
    /// k_x(ω) = nω sinθ/c. A plane-wave pulse from a fixed direction.
    #[default]
    FixedAngle,
    /// k_x is held at its carrier value for every frequency. The incident
    /// front is then simultaneous along the interface and signals cannot
    /// cross the gap faster than d/c.
    FixedTransverse,
}

/// Time-grid overrides. `None` picks the defaults: step 1/(16·carrier),
/// span 16·FWHM (64·FWHM for causality checks).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridOptions {
    pub step: Option<f64>,
    pub span: Option<f64>,
    /// Round the sample count up to a power of two.
    pub pad_pow2: bool,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions {
            step: None,
            span: None,
            pad_pow2: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SynthesisOptions {
    pub mode: Synthesis,
    pub grid: GridOptions,
    pub exec: Execution,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesMeta {
    pub step: f64,
    pub span: f64,
    pub samples: usize,
    pub channel: Channel,
}

/// Real field samples on a uniform grid, with the analytic-signal envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub t_samples: Vec<f64>,
    pub values: Vec<f64>,
    pub envelope: Vec<f64>,
    pub meta: SeriesMeta,
}

impl TimeSeries {
    /// Columns `t_s, value`.
    pub fn table(&self) -> SweepTable {
        let mut table = SweepTable::new(["t_s", "value"]);
        for (t, v) in self.t_samples.iter().zip(&self.values) {
            table.push(vec![*t, *v]);
        }
        table
    }
}
