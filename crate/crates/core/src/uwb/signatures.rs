use nalgebra::DVector;
use num_complex::Complex64;

use super::channel::ChannelRealization;
use super::codes::SpreadingCodes;
use super::config::{Dims, SystemConfig};
use super::matrices::{build_isi_partitions, build_toeplitz_channel, matched_filter_matrix, pulse_shaping_matrix};
use super::pulse::chip_pulse;
use crate::error::{Error, Result};
use crate::linalg::CVec;

/// Effective `M`-dimensional signatures of every user for the current
/// symbol and the `2G` neighbours, plus the noise level.
#[derive(Debug, Clone, PartialEq)]
pub struct SignatureSet {
    pub dims: Dims,
    pub desired: Vec<CVec>,
    /// `isi_minus[k][g-1]` multiplies `b_k(i-g)`.
    pub isi_minus: Vec<Vec<CVec>>,
    /// `isi_plus[k][g-1]` multiplies `b_k(i+g)`.
    pub isi_plus: Vec<Vec<CVec>>,
    /// Standard deviation of each complex noise sample, `E|n_m|^2 = σ_n^2`.
    pub noise_stddev: f64,
}

/// Noise standard deviation for a reference symbol energy: the complex
/// per-sample variance is `energy · 10^(-snr/10)`, i.e. `energy/2 · 10^(-snr/10)`
/// in each of the real and imaginary parts.
pub fn noise_stddev_for(reference_energy: f64, snr_db: f64) -> f64 {
    (reference_energy * 10f64.powf(-snr_db / 10.0)).sqrt()
}

pub fn build_signatures(cfg: &SystemConfig, codes: &SpreadingCodes, chan: &ChannelRealization) -> Result<SignatureSet> {
    let dims = cfg.dims()?;
    Error::check_len("spreading codes (users)", dims.k, codes.codes.len())?;
    Error::check_len("channel (users)", dims.k, chan.taps.len())?;
    let pulse = chip_pulse(cfg.rrc_rolloff, dims.nu)?;
    let pt = pulse_shaping_matrix(&dims, &pulse)?;
    let pr = matched_filter_matrix(&dims, &pulse)?;

    let mut desired = Vec::with_capacity(dims.k);
    let mut isi_minus = Vec::with_capacity(dims.k);
    let mut isi_plus = Vec::with_capacity(dims.k);
    for k in 0..dims.k {
        Error::check_len("spreading code length", dims.n_c, codes.codes[k].len())?;
        Error::check_len("channel taps", dims.l, chan.taps[k].len())?;
        let amp = cfg.user_energies[k].sqrt();
        let s = DVector::from_iterator(dims.n_c, codes.codes[k].iter().map(|x| Complex64::new(*x, 0.0)));
        let x = &pt * s * Complex64::new(amp, 0.0);
        let h = &chan.taps[k];
        let hk = build_toeplitz_channel(h, dims.ns)?;
        desired.push(&pr * (&hk * &x));
        let mut minus = Vec::with_capacity(dims.g);
        let mut plus = Vec::with_capacity(dims.g);
        for g in 1..=dims.g {
            let (hm, hp) = build_isi_partitions(h, dims.ns, g)?;
            minus.push(&pr * (hm * &x));
            plus.push(&pr * (hp * &x));
        }
        isi_minus.push(minus);
        isi_plus.push(plus);
    }
    let noise_stddev = noise_stddev_for(desired[0].norm_squared(), cfg.snr_db);
    Ok(SignatureSet {
        dims,
        desired,
        isi_minus,
        isi_plus,
        noise_stddev,
    })
}

impl SignatureSet {
    /// Every signature with its (user, lag) label; lag 0 is the current symbol.
    pub fn all(&self) -> impl Iterator<Item = (usize, i64, &CVec)> {
        (0..self.dims.k).flat_map(move |k| {
            std::iter::once((k, 0, &self.desired[k]))
                .chain(
                    self.isi_minus[k]
                        .iter()
                        .enumerate()
                        .map(move |(g, v)| (k, -(g as i64 + 1), v)),
                )
                .chain(
                    self.isi_plus[k]
                        .iter()
                        .enumerate()
                        .map(move |(g, v)| (k, g as i64 + 1, v)),
                )
        })
    }
}
