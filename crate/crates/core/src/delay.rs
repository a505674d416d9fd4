//! Transmission/reflection phases and the two-term group delay
//!
//! ```text
//! τ_g = τ_0 + s · n sinθ / c
//! ```
//!
//! `τ_0` is the phase derivative ∂φ/∂ω taken along the fixed incidence
//! angle (k_x = nω sinθ/c moves with ω), `s = −∂φ/∂k_x` at fixed ω is the
//! Goos-Hänchen shift. Their sum equals ∂φ/∂ω at fixed k_x, the arrival
//! time of the output peak at the laterally displaced exit point;
//! [`phase_time_fixed_kx`] computes that route directly.
//!
//! All derivatives are central differences of `arg(z_b / z_a)` with a
//! relative step of 1e−6 and a Richardson check.

use serde::{Deserialize, Serialize};

use crate::numerics::diff::{adaptive_step, richardson, Derivative};
use crate::numerics::unwrap::unwrap_refined;
use crate::parallel::Execution;
use crate::scattering::scatter;
use crate::scenario::{critical_angle, wavevectors, Channel, Scenario};
use crate::sweep::SweepTable;
use crate::{Complex64, Error, Result};

/// Relative change of τ_g over the last tenth of a sweep below which it
/// counts as saturated.
pub const SATURATION_REL_CHANGE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayBreakdown {
    /// Fixed-angle phase delay (s).
    pub tau0: f64,
    /// Lateral Goos-Hänchen shift (m).
    pub gh_shift: f64,
    /// τ_0 + s·n sinθ/c (s).
    pub tau_g: f64,
    pub channel: Channel,
}

fn coefficient(scenario: &Scenario, omega: f64, k_x: f64, channel: Channel) -> Result<Complex64> {
    let z = scatter(scenario, omega, k_x)?.coefficient(channel);
    if z.norm() == 0.0 {
        return Err(Error::DegenerateChannel {
            channel: channel.name(),
        });
    }
    Ok(z)
}

/// arg of t or r, wrapped to (−π, π]. Sweeps unwrap it afterwards.
pub fn channel_phase(scenario: &Scenario, omega: f64, k_x: f64, channel: Channel) -> Result<f64> {
    Ok(coefficient(scenario, omega, k_x, channel)?.arg())
}

fn phase_step(
    scenario: &Scenario,
    a: (f64, f64),
    b: (f64, f64),
    channel: Channel,
) -> Result<f64> {
    let za = coefficient(scenario, a.0, a.1, channel)?;
    let zb = coefficient(scenario, b.0, b.1, channel)?;
    Ok((zb / za).arg())
}

/// ∂φ/∂ω with k_x = nω sinθ/c.
pub fn tau0_derivative(scenario: &Scenario, channel: Channel) -> Result<Derivative> {
    scenario.require_tunneling()?;
    let omega = scenario.omega();
    let h = adaptive_step(omega, f64::MIN_POSITIVE);
    richardson(
        |a, b| phase_step(scenario, (a, scenario.k_x(a)), (b, scenario.k_x(b)), channel),
        omega,
        h,
    )
}

pub fn tau0(scenario: &Scenario, channel: Channel) -> Result<f64> {
    Ok(tau0_derivative(scenario, channel)?.value)
}

/// −∂φ/∂k_x at the carrier frequency.
pub fn goos_hanchen_derivative(scenario: &Scenario, channel: Channel) -> Result<Derivative> {
    scenario.require_tunneling()?;
    let omega = scenario.omega();
    let k_x = scenario.k_x(omega);
    let h = adaptive_step(k_x, f64::MIN_POSITIVE);
    let d = richardson(
        |a, b| phase_step(scenario, (omega, a), (omega, b), channel),
        k_x,
        h,
    )?;
    Ok(Derivative {
        value: -d.value,
        ..d
    })
}

pub fn goos_hanchen_shift(scenario: &Scenario, channel: Channel) -> Result<f64> {
    Ok(goos_hanchen_derivative(scenario, channel)?.value)
}

/// ∂φ/∂ω at fixed k_x: the second route to τ_g.
pub fn phase_time_fixed_kx(scenario: &Scenario, channel: Channel) -> Result<f64> {
    scenario.require_tunneling()?;
    let omega = scenario.omega();
    let k_x = scenario.k_x(omega);
    let h = adaptive_step(omega, f64::MIN_POSITIVE);
    Ok(richardson(
        |a, b| phase_step(scenario, (a, k_x), (b, k_x), channel),
        omega,
        h,
    )?
    .value)
}

pub fn total_group_delay(scenario: &Scenario, channel: Channel) -> Result<DelayBreakdown> {
    let tau0 = tau0(scenario, channel)?;
    let gh_shift = goos_hanchen_shift(scenario, channel)?;
    Ok(DelayBreakdown {
        tau0,
        gh_shift,
        tau_g: tau0 + lateral_delay(gh_shift, scenario),
        channel,
    })
}

/// s·n sinθ/c.
pub fn lateral_delay(shift: f64, scenario: &Scenario) -> f64 {
    shift * scenario.parallel_index() / scenario.c()
}

/// Inverse of [`lateral_delay`]: the shift that accounts for `delay` when τ_0 ≈ 0.
pub fn shift_for_delay(delay: f64, scenario: &Scenario) -> f64 {
    delay * scenario.c() / scenario.parallel_index()
}

/// Saturated (thick-barrier) shift of the scenario at its own angle.
pub fn saturated_shift(scenario: &Scenario, channel: Channel) -> Result<f64> {
    let kappa = wavevectors(scenario, scenario.omega())?.kappa;
    if kappa <= 0.0 {
        scenario.require_tunneling()?;
    }
    goos_hanchen_shift(&scenario.with_gap(16.0 / kappa), channel)
}

/// Smallest incidence angle (rad) in (θc, `max_theta`] at which the saturated
/// Goos-Hänchen shift equals `target`. The shift diverges at the critical
/// angle and is not monotone beyond it, so the interval is scanned for the
/// first crossing before bisecting.
pub fn angle_for_saturated_shift(
    scenario: &Scenario,
    channel: Channel,
    target: f64,
    max_theta: f64,
) -> Result<f64> {
    const SCAN: usize = 256;
    let theta_c = critical_angle(scenario.n)?;
    if !(max_theta > theta_c && max_theta < std::f64::consts::FRAC_PI_2) {
        return Err(Error::invalid("max_theta", "must lie between the critical angle and 90°"));
    }
    let shift_at = |theta: f64| saturated_shift(&scenario.with_theta(theta), channel);
    let lo0 = theta_c + 1e-3 * (max_theta - theta_c);
    let step = (max_theta - lo0) / SCAN as f64;
    let mut prev = (lo0, shift_at(lo0)?);
    let mut smallest = prev.1;
    for i in 1..=SCAN {
        let theta = lo0 + i as f64 * step;
        let shift = shift_at(theta)?;
        smallest = smallest.min(shift);
        if prev.1 >= target && shift <= target {
            let (mut lo, mut hi) = (prev.0, theta);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if shift_at(mid)? > target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
        prev = (theta, shift);
    }
    Err(Error::invalid(
        "target shift",
        format!("{target} m is never reached; the smallest saturated shift up to max_theta is {smallest} m"),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HartmanPoint {
    pub d: f64,
    pub breakdown: DelayBreakdown,
    /// Channel phase at the carrier, continuous along the sweep.
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HartmanSweep {
    pub channel: Channel,
    pub points: Vec<HartmanPoint>,
    /// τ_g changed by less than [`SATURATION_REL_CHANGE`] over the last
    /// tenth of the swept range.
    pub saturated: bool,
}

impl HartmanSweep {
    pub fn table(&self) -> SweepTable {
        let mut table = SweepTable::new(["d_m", "tau0_s", "gh_shift_m", "tau_g_s", "phase_rad"]);
        for p in &self.points {
            table.push(vec![
                p.d,
                p.breakdown.tau0,
                p.breakdown.gh_shift,
                p.breakdown.tau_g,
                p.phase,
            ]);
        }
        table
    }

    pub fn last(&self) -> Option<&HartmanPoint> {
        self.points.last()
    }
}

fn check_sweep_values(d_values: &[f64]) -> Result<()> {
    if d_values.is_empty() {
        return Err(Error::invalid("d_values", "sweep needs at least one gap width"));
    }
    if d_values.iter().any(|d| !d.is_finite() || *d <= 0.0) {
        return Err(Error::invalid("d_values", "gap widths must be finite and positive"));
    }
    if d_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("d_values", "gap widths must be strictly ascending"));
    }
    Ok(())
}

/// Delay breakdown along a gap-width sweep. Points are evaluated
/// independently (in parallel under [`Execution::Parallel`]); the phase is
/// unwrapped afterwards in index order.
pub fn hartman_sweep(
    scenario: &Scenario,
    d_values: &[f64],
    channel: Channel,
    exec: Execution,
) -> Result<HartmanSweep> {
    scenario.require_tunneling()?;
    check_sweep_values(d_values)?;
    let omega = scenario.omega();
    let k_x = scenario.k_x(omega);
    let at = |d: f64| -> Result<(DelayBreakdown, f64)> {
        let s = scenario.with_gap(d);
        Ok((
            total_group_delay(&s, channel)?,
            channel_phase(&s, omega, k_x, channel)?,
        ))
    };
    let evaluated = exec.map(d_values, |&d| {
        at(d).map_err(|e| Error::SweepPoint {
            d,
            source: Box::new(e),
        })
    });
    let evaluated: Vec<(DelayBreakdown, f64)> = evaluated.into_iter().collect::<Result<_>>()?;

    let raw: Vec<f64> = evaluated.iter().map(|e| e.1).collect();
    let phases = unwrap_refined(d_values, &raw, |d| {
        channel_phase(&scenario.with_gap(d), omega, k_x, channel)
    })?;

    let points: Vec<HartmanPoint> = d_values
        .iter()
        .zip(&evaluated)
        .zip(phases)
        .map(|((&d, &(breakdown, _)), phase)| HartmanPoint { d, breakdown, phase })
        .collect();
    let saturated = is_saturated(&points);
    Ok(HartmanSweep {
        channel,
        points,
        saturated,
    })
}

fn is_saturated(points: &[HartmanPoint]) -> bool {
    let (Some(first), Some(last)) = (points.first(), points.last()) else {
        return false;
    };
    let span = last.d - first.d;
    if points.len() < 2 || span <= 0.0 {
        return false;
    }
    let cutoff = last.d - 0.1 * span;
    let tail: Vec<f64> = points
        .iter()
        .filter(|p| p.d >= cutoff)
        .map(|p| p.breakdown.tau_g)
        .collect();
    // Need the sample just before the cutoff when the tail holds a single point.
    let reference = if tail.len() >= 2 {
        tail[0]
    } else {
        points[points.len() - 2].breakdown.tau_g
    };
    ((last.breakdown.tau_g - reference) / last.breakdown.tau_g).abs() < SATURATION_REL_CHANGE
}
