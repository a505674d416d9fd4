use evanesce_core::delay::{goos_hanchen_shift, tau0};
use evanesce_core::wavesynth::{beam_centroid_shift, front_causality_check, propagate_pulse};
use evanesce_core::{critical_angle, vacuum_wavelength, BeamSpec, Channel, Polarization, PulseSpec, Scenario};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(24) })]

    #[test]
    fn long_pulses_keep_their_shape(
        n in 1.2f64..3.0,
        f in 5e9f64..2e10,
        frac in 0.05f64..0.9,
        d_frac in 0.0f64..2.0,
        cycles in 101.0f64..400.0,
        tm in any::<bool>(),
        reflect in any::<bool>(),
    ) {
        let theta_c = critical_angle(n).unwrap();
        let theta = theta_c + frac * (1.4 - theta_c);
        let pol = if tm { Polarization::Tm } else { Polarization::Te };
        let lambda = 3e8 / f;
        let s = Scenario::new(n, f, theta, (0.01 + d_frac) * lambda, pol).unwrap();
        let pulse = PulseSpec::gaussian(cycles / f, f).unwrap();
        let ch = if reflect { Channel::Reflection } else { Channel::Transmission };
        let (_, report) = propagate_pulse(&s, &pulse, ch).unwrap();
        prop_assert!(report.shape_correlation > 0.999, "{report:?}");
        let predicted = tau0(&s, ch).unwrap();
        prop_assert!((report.delay - predicted).abs() < 0.01 * pulse.fwhm);
    }
}

#[test]
fn no_signal_before_light_crosses_the_gap() {
    let pulse = PulseSpec::truncated(16e-9, 9.15e9, -3.0).unwrap();
    for d_mm in [5.0, 10.0, 20.0, 30.0, 40.0, 50.0] {
        let report = front_causality_check(&Scenario::headline().with_gap(d_mm * 1e-3), &pulse).unwrap();
        assert!(report.leakage < 1e-6, "{d_mm} mm: {report:?}");
        assert!(report.below_floor && report.converged, "{d_mm} mm: {report:?}");
    }
}

#[test]
fn beam_shift_matches_phase_slope_for_both_polarizations() {
    for pol in [Polarization::Te, Polarization::Tm] {
        let s = Scenario::headline().with_polarization(pol).with_gap(0.05);
        let beam = BeamSpec::new(20.0 * vacuum_wavelength(s.f).unwrap()).unwrap();
        for ch in [Channel::Transmission, Channel::Reflection] {
            let profile = beam_centroid_shift(&s, &beam, ch).unwrap();
            let slope = goos_hanchen_shift(&s, ch).unwrap();
            assert!((profile.centroid_shift / slope - 1.0).abs() < 0.02, "{pol:?} {ch:?}");
            let weighted: f64 = profile.x_samples.iter().zip(&profile.intensity).map(|(x, i)| x * i).sum::<f64>()
                / profile.intensity.iter().sum::<f64>();
            assert_eq!(weighted, profile.centroid);
        }
    }
}
