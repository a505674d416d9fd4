//! Nearest-branch phase continuation along one-parameter sweeps.

use std::f64::consts::{FRAC_PI_2, PI};

use super::wrap_angle;
use crate::Result;

/// Plain nearest-branch unwrapping of a sampled phase.
pub fn unwrap(raw: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(raw.len());
    let mut prev: Option<f64> = None;
    for &p in raw {
        let next = match prev {
            None => p,
            Some(q) => q + wrap_angle(p - q),
        };
        out.push(next);
        prev = Some(next);
    }
    out
}

const MAX_REFINE_DEPTH: u32 = 24;

/// Unwraps `raw[i] = phase(params[i])`, inserting intermediate evaluations
/// wherever consecutive samples differ by more than π/2 (mod 2π).
pub fn unwrap_refined<F>(params: &[f64], raw: &[f64], phase: F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    assert_eq!(params.len(), raw.len());
    let mut out = Vec::with_capacity(raw.len());
    if raw.is_empty() {
        return Ok(out);
    }
    out.push(raw[0]);
    for i in 1..raw.len() {
        let step = continued_step(&phase, params[i - 1], raw[i - 1], params[i], raw[i], 0)?;
        out.push(out[i - 1] + step);
    }
    Ok(out)
}

fn continued_step<F>(phase: &F, a: f64, pa: f64, b: f64, pb: f64, depth: u32) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let step = wrap_angle(pb - pa);
    if step.abs() <= FRAC_PI_2 || depth >= MAX_REFINE_DEPTH {
        return Ok(step);
    }
    let mid = 0.5 * (a + b);
    let pm = phase(mid)?;
    Ok(continued_step(phase, a, pa, mid, pm, depth + 1)?
        + continued_step(phase, mid, pm, b, pb, depth + 1)?)
}

/// True when no consecutive pair jumps by more than π (sanity check for tests).
pub fn is_continuous(unwrapped: &[f64]) -> bool {
    unwrapped.windows(2).all(|w| (w[1] - w[0]).abs() < PI)
}
