//! Direct waveform simulation of the uplink on a fine time grid.
//!
//! This path never forms the Toeplitz, ISI-partition or front-end matrices:
//! it lays the chips of every symbol on a grid of step `T_tau / oversample`,
//! shapes them with the chip pulse, passes each user's waveform through its
//! tapped delay line, integrates against the pulse over each chip interval
//! and samples at chip rate. The observation window is the span
//! `[0, m_h · T_tau)` of one symbol's channel response. It exists to check
//! the matrix-form synthesizer.

use super::channel::ChannelRealization;
use super::codes::SpreadingCodes;
use super::config::SystemConfig;
use super::pulse::chip_pulse;
use super::received::SymbolStreams;
use crate::error::{Error, Result};
use crate::linalg::{CVec, ZERO};

pub fn synthesize_received_oracle(
    cfg: &SystemConfig,
    codes: &SpreadingCodes,
    chan: &ChannelRealization,
    symbols: &SymbolStreams,
    i: i64,
    noise: &CVec,
    oversample: usize,
) -> Result<CVec> {
    let dims = cfg.dims()?;
    if oversample == 0 {
        return Err(Error::config("oracle grid must subdivide T_tau"));
    }
    Error::check_len("oracle noise", dims.m, noise.len())?;
    let g = dims.g as i64;
    if i - g < symbols.first || i + g > symbols.last() {
        return Err(Error::MissingSymbols {
            index: i,
            first: symbols.first,
            last: symbols.last(),
        });
    }

    let a = oversample;
    let chip_len = dims.nu * a;
    let sym_len = dims.n_c * chip_len;
    let pulse = chip_pulse(cfg.rrc_rolloff, dims.nu)?;
    let fine_pulse: Vec<f64> = (0..chip_len).map(|u| pulse[u / a]).collect();

    let window = dims.m_h * a;
    // Waveform support needed: [-(L-1) a, window).
    let lead = (dims.l - 1) * a;
    let span = lead + window;

    let mut z = vec![ZERO; window];
    for k in 0..dims.k {
        let amp = cfg.user_energies[k].sqrt();
        let mut x = vec![0.0f64; span];
        for j in (i - g - 1)..=(i + g + 1) {
            let Some(b) = symbols.get(k, j) else { continue };
            if b == 0 {
                continue;
            }
            let start = (j - i) * sym_len as i64;
            for (c, chip) in codes.codes[k].iter().enumerate() {
                for (u, p) in fine_pulse.iter().enumerate() {
                    let t = start + (c * chip_len + u) as i64 + lead as i64;
                    if (0..span as i64).contains(&t) {
                        x[t as usize] += amp * b as f64 * chip * p;
                    }
                }
            }
        }
        for (l, h) in chan.taps[k].iter().enumerate() {
            let delay = l * a;
            for (t, zt) in z.iter_mut().enumerate() {
                // x index of (t - delay) in window time
                *zt += h * x[t + lead - delay];
            }
        }
    }

    let mut r = CVec::from_element(dims.m, ZERO);
    for m in 0..dims.m {
        let mut acc = ZERO;
        for (u, p) in fine_pulse.iter().enumerate() {
            let t = m * chip_len + u;
            if t < window {
                acc += z[t] * *p;
            }
        }
        r[m] = acc / a as f64 + noise[m];
    }
    Ok(r)
}
