//! Root-raised-cosine pulse shaping.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

/// Continuous RRC impulse response at `t` (in chip durations), unnormalized.
pub fn rrc_value(t: f64, rolloff: f64) -> f64 {
    let b = rolloff;
    if t == 0.0 {
        return 1.0 + b * (4.0 / PI - 1.0);
    }
    let edge = 1.0 / (4.0 * b);
    if ((t.abs() - edge) / edge).abs() < 1e-10 {
        let a = PI / (4.0 * b);
        return b * FRAC_1_SQRT_2 * ((1.0 + 2.0 / PI) * a.sin() + (1.0 - 2.0 / PI) * a.cos());
    }
    let num = (PI * t * (1.0 - b)).sin() + 4.0 * b * t * (PI * t * (1.0 + b)).cos();
    let den = PI * t * (1.0 - (4.0 * b * t).powi(2));
    num / den
}

fn check(rolloff: f64) -> Result<()> {
    if !rolloff.is_finite() || !(rolloff > 0.0 && rolloff <= 1.0) {
        return Err(Error::config(format!("RRC roll-off {rolloff} outside (0, 1]")));
    }
    Ok(())
}

fn normalize(taps: &mut [f64]) {
    let energy: f64 = taps.iter().map(|x| x * x).sum();
    let s = energy.sqrt();
    taps.iter_mut().for_each(|x| *x /= s);
}

/// Unit-energy RRC taps spanning `span_chips` chips at `samples_per_chip`.
///
/// The taps are sampled symmetrically about a center tap; an odd
/// `span_chips * samples_per_chip` is rounded up by one sample.
pub fn rrc_taps(rolloff: f64, span_chips: usize, samples_per_chip: usize) -> Result<Vec<f64>> {
    check(rolloff)?;
    if span_chips < 4 {
        return Err(Error::config("RRC span must be at least 4 chips"));
    }
    if samples_per_chip == 0 {
        return Err(Error::config("samples_per_chip must be positive"));
    }
    let half = (span_chips * samples_per_chip).div_ceil(2);
    let spc = samples_per_chip as f64;
    let mut taps: Vec<f64> = (0..=2 * half)
        .map(|i| rrc_value((i as f64 - half as f64) / spc, rolloff))
        .collect();
    normalize(&mut taps);
    Ok(taps)
}

/// Chip-limited transmit pulse: the RRC main lobe restricted to one chip
/// interval and sampled at the `nu` channel-grid instants inside it
/// (sample midpoints), normalized to unit energy.
pub fn chip_pulse(rolloff: f64, nu: usize) -> Result<Vec<f64>> {
    check(rolloff)?;
    if nu == 0 {
        return Err(Error::config("samples per chip must be positive"));
    }
    let mut p: Vec<f64> = (0..nu)
        .map(|m| rrc_value((m as f64 + 0.5) / nu as f64 - 0.5, rolloff))
        .collect();
    normalize(&mut p);
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `h(t) = 2 ∫_0^{(1+β)/2} H(f) cos(2π f t) df` with the RRC amplitude
    /// spectrum `H`, integrated piecewise by composite Simpson.
    fn rrc_inverse_fourier(t: f64, b: f64) -> f64 {
        let f1 = (1.0 - b) / 2.0;
        let f2 = (1.0 + b) / 2.0;
        let spectrum = |f: f64| {
            if f <= f1 {
                1.0
            } else if f <= f2 {
                (0.5 * (1.0 + (PI / b * (f - f1)).cos())).sqrt()
            } else {
                0.0
            }
        };
        let simpson = |a: f64, z: f64, n: usize| {
            let h = (z - a) / n as f64;
            let g = |f: f64| spectrum(f) * (2.0 * PI * f * t).cos();
            let mut s = g(a) + g(z);
            for i in 1..n {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                s += w * g(a + i as f64 * h);
            }
            s * h / 3.0
        };
        2.0 * (simpson(0.0, f1, 20_000) + simpson(f1, f2, 20_000))
    }

    #[test]
    fn symmetric_with_central_peak() {
        for span in [4, 6, 8, 9] {
            for spc in [1, 2, 3, 4] {
                let taps = rrc_taps(0.5, span, spc).unwrap();
                let n = taps.len();
                assert_eq!(n % 2, 1);
                let c = n / 2;
                for i in 0..n {
                    assert!((taps[i] - taps[n - 1 - i]).abs() < 1e-15);
                    if i != c {
                        assert!(taps[i] < taps[c]);
                    }
                }
            }
        }
    }

    #[test]
    fn unit_energy() {
        for b in [0.1, 0.25, 0.5, 1.0] {
            for spc in [1, 4, 8] {
                let e: f64 = rrc_taps(b, 8, spc).unwrap().iter().map(|x| x * x).sum();
                assert!((e - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn singular_points_use_analytic_limits() {
        // β = 0.25 places the removable singularity at t = ±1, an integer sample.
        let b = 0.25;
        let exact = rrc_value(1.0, b);
        let near = rrc_value(1.0 + 1e-7, b);
        assert!((exact - near).abs() < 1e-5);
        assert!((rrc_value(0.0, b) - rrc_value(1e-9, b)).abs() < 1e-6);
        assert!(rrc_taps(b, 8, 1).unwrap().iter().all(|x| x.is_finite()));
    }

    #[test]
    fn matches_frequency_domain_oracle() {
        let (b, span) = (0.5, 8);
        let taps = rrc_taps(b, span, 1).unwrap();
        let half = taps.len() / 2;
        let mut oracle: Vec<f64> = (0..taps.len())
            .map(|i| rrc_inverse_fourier(i as f64 - half as f64, b))
            .collect();
        // Analytic and spectral forms agree before normalization.
        for (i, o) in oracle.iter().enumerate() {
            let t = i as f64 - half as f64;
            assert!((rrc_value(t, b) - o).abs() < 1e-6, "t={t}");
        }
        normalize(&mut oracle);
        for (a, o) in taps.iter().zip(&oracle) {
            assert!((a - o).abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(rrc_taps(f64::NAN, 8, 1).is_err());
        assert!(rrc_taps(0.0, 8, 1).is_err());
        assert!(rrc_taps(0.5, 3, 1).is_err());
        assert!(rrc_taps(0.5, 8, 0).is_err());
    }

    #[test]
    fn chip_pulse_collapses_at_chip_rate() {
        assert_eq!(chip_pulse(0.5, 1).unwrap(), vec![1.0]);
        let p = chip_pulse(0.5, 4).unwrap();
        assert!((p.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-14);
        assert!((p[0] - p[3]).abs() < 1e-15 && p[1] > p[0]);
    }
}
