//! Small numerical building blocks: branch-safe complex helpers, finite
//! differences, quadrature and phase unwrapping.

pub mod diff;
pub mod quad;
pub mod unwrap;

use num_complex::Complex64;

/// Square root on the branch with Im ≥ 0 (decay toward +z for e^{ikz}).
pub fn sqrt_upper(z: Complex64) -> Complex64 {
    let s = z.sqrt();
    if s.im < 0.0 {
        -s
    } else {
        s
    }
}

/// cos(z)·e^{iz} = (1 + e^{2iz})/2, bounded for Im z ≥ 0.
pub fn cos_scaled(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    0.5 * (1.0 + (2.0 * i * z).exp())
}

/// sin(z)/z·e^{iz}, bounded for Im z ≥ 0 and regular at z = 0.
pub fn sinc_scaled(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    let norm = z.norm();
    if norm < 1e-8 {
        (i * z).exp()
    } else if norm < 0.5 {
        z.sin() / z * (i * z).exp()
    } else {
        ((2.0 * i * z).exp() - 1.0) / (2.0 * i * z)
    }
}

/// Wraps an angle into (−π, π].
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::PI;
    let w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Pearson correlation coefficient of two equal-length samples.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    sab / (saa * sbb).sqrt()
}

/// Least-squares line through (x, y); returns (slope, intercept, r²).
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - (slope * a + intercept)).powi(2))
        .sum();
    let ss_tot: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    (slope, intercept, 1.0 - ss_res / ss_tot)
}
