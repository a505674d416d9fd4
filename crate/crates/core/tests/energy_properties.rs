use evanesce_core::delay::{hartman_sweep, total_group_delay};
use evanesce_core::energy::{energy_sweep, gap_field, stored_energy, train_model, train_model_continuous};
use evanesce_core::numerics::{correlation, linear_fit};
use evanesce_core::scattering::scatter;
use evanesce_core::{wavevectors, Channel, Execution, Polarization, Scenario};
use proptest::prelude::*;

fn kappa(s: &Scenario) -> f64 {
    wavevectors(s, s.omega()).unwrap().kappa
}

fn gaps(s: &Scenario, kd_lo: f64, kd_hi: f64, n: usize) -> Vec<f64> {
    let k = kappa(s);
    (0..n)
        .map(|i| (kd_lo + (kd_hi - kd_lo) * i as f64 / (n - 1) as f64) / k)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(200) })]

    #[test]
    fn tangential_fields_continuous(
        n in 1.05f64..4.0,
        f in 1e9f64..5e10,
        theta in 0.02f64..1.5,
        frac in 0.0f64..1.0,
        tm in any::<bool>(),
    ) {
        let pol = if tm { Polarization::Tm } else { Polarization::Te };
        let s = Scenario::new(n, f, theta, frac * 3.0 * 3e8 / f, pol).unwrap();
        let omega = s.omega();
        let k_x = s.k_x(omega);
        let res = scatter(&s, omega, k_x).unwrap();
        let p = gap_field(&s, omega, k_x, 3).unwrap();
        let last = p.field.len() - 1;
        let q = res.q_prism;
        // U and ∂U/∂z/(i p) on the prism side of each interface.
        let checks = [
            (p.field[0], 1.0 + res.r, 1.0),
            (p.derivative[0], q * (1.0 - res.r), q.norm()),
            (p.field[last], res.t, 1.0),
            (p.derivative[last], q * res.t, q.norm()),
        ];
        for (gap_side, prism_side, scale) in checks {
            prop_assert!((gap_side - prism_side).norm() <= 1e-10 * scale, "{gap_side} vs {prism_side}");
        }
        prop_assert!(p.energy_density.iter().all(|u| *u >= 0.0));
    }

    #[test]
    fn train_never_reaches_twice_the_first_car(first in 1u64..1_000_000, cars in 1u64..200) {
        let load = train_model(first, cars).unwrap();
        prop_assert!(load.total_passengers < 2 * first);
        prop_assert!(load.delay_proxy < 1.0);
        let (total, _) = train_model_continuous(first as f64, cars as f64).unwrap();
        // 2 − 2^{1−cars} rounds to exactly 2 in double precision past 53 cars.
        prop_assert!(total < 2.0 * first as f64 || cars > 53);
    }
}

#[test]
fn stored_energy_saturates_at_twice_kappa() {
    let s = Scenario::headline();
    let k = kappa(&s);
    let ds = gaps(&s, 0.1, 8.0, 80);
    let budgets = energy_sweep(&s, &ds, Execution::Parallel).unwrap();
    let w: Vec<f64> = budgets.iter().map(|b| b.energy_per_area).collect();
    assert!(w.windows(2).all(|p| p[1] >= p[0]));
    let w_inf = stored_energy(&s.with_gap(20.0 / k)).unwrap().energy_per_area;
    let (x, y): (Vec<f64>, Vec<f64>) = ds
        .iter()
        .zip(&w)
        .filter(|(d, _)| **d * k >= 3.0)
        .map(|(d, w)| (*d, (w_inf - w).ln()))
        .unzip();
    let (slope, _, _) = linear_fit(&x, &y);
    assert!((-slope / (2.0 * k) - 1.0).abs() < 0.1, "{}", -slope / (2.0 * k));
}

#[test]
fn dwell_and_group_delay_saturate_together() {
    let s = Scenario::headline();
    let ds = gaps(&s, 2.0, 6.0, 41);
    let budgets = energy_sweep(&s, &ds, Execution::Parallel).unwrap();
    let sweep = hartman_sweep(&s, &ds, Channel::Transmission, Execution::Parallel).unwrap();
    let dwell: Vec<f64> = budgets.iter().map(|b| b.dwell_time).collect();
    let tau: Vec<f64> = sweep.points.iter().map(|p| p.breakdown.tau_g).collect();
    let (dl, tl) = (*dwell.last().unwrap(), *tau.last().unwrap());
    let worst = dwell
        .iter()
        .zip(&tau)
        .map(|(a, b)| (a / dl - b / tl).abs() / (b / tl))
        .fold(0.0, f64::max);
    assert!(worst < 0.05, "{worst}");

    let u: Vec<f64> = budgets.iter().map(|b| b.stored - budgets.last().unwrap().stored).collect();
    let t: Vec<f64> = tau.iter().map(|x| x - tl).collect();
    let r = correlation(&u, &t);
    assert!(r > 0.999, "{r}");
}

#[test]
fn energy_sweep_matches_pointwise_and_is_execution_independent() {
    let s = Scenario::headline();
    let ds = [0.0, 0.01, 0.04];
    let seq = energy_sweep(&s, &ds, Execution::Sequential).unwrap();
    let par = energy_sweep(&s, &ds, Execution::Parallel).unwrap();
    assert_eq!(seq, par);
    assert_eq!(seq[2], stored_energy(&s.with_gap(0.04)).unwrap());
    assert_eq!(seq[0].stored, 0.0);
}

#[test]
fn dwell_is_comparable_to_group_delay() {
    let s = Scenario::headline();
    let dwell = stored_energy(&s).unwrap().dwell_time;
    let tau_g = total_group_delay(&s, Channel::Transmission).unwrap().tau_g;
    assert!(dwell > 0.5 * tau_g && dwell < 2.0 * tau_g, "{dwell} {tau_g}");
}
