//! Central differences with an adaptive step and a Richardson check.
//!
//! Callers pass a *difference* closure `delta(a, b) = f(b) − f(a)` rather
//! than `f` itself, so phase derivatives can be formed from `arg(z_b / z_a)`
//! without any unwrapping.

use crate::{Error, Result};

/// Relative step used by [`adaptive_step`].
pub const REL_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    /// Richardson-extrapolated estimate from steps h and h/2.
    pub value: f64,
    /// |D(h/2) − D(h)|, a bound on the truncation error of the cruder estimate.
    pub error: f64,
    pub step: f64,
}

/// max(1e−6·|x|, h_min).
pub fn adaptive_step(x: f64, h_min: f64) -> f64 {
    (REL_STEP * x.abs()).max(h_min)
}

pub fn central<F>(delta: F, x: f64, h: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let (lo, hi) = (x - h, x + h);
    if !(h > 0.0) || lo == x || hi == x {
        return Err(Error::StepUnderflow { x });
    }
    Ok(delta(lo, hi)? / (hi - lo))
}

pub fn richardson<F>(delta: F, x: f64, h: f64) -> Result<Derivative>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let coarse = central(&delta, x, h)?;
    let fine = central(&delta, x, 0.5 * h)?;
    Ok(Derivative {
        value: (4.0 * fine - coarse) / 3.0,
        error: (fine - coarse).abs(),
        step: h,
    })
}
