use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical-layer parameters of the DS-UWB uplink. Durations are in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub num_users: usize,
    pub spreading_gain: usize,
    pub symbol_duration: f64,
    pub chip_duration: f64,
    pub tap_spacing: f64,
    pub delay_spread: f64,
    /// Per-user transmit energy `E_k`, one entry per user.
    pub user_energies: Vec<f64>,
    pub snr_db: f64,
    pub rrc_rolloff: f64,
    pub rrc_span_chips: usize,
    pub seed: u64,
}

/// Integer dimensions derived from a validated [`SystemConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dims {
    /// Number of users `K`.
    pub k: usize,
    /// Spreading gain `N_c`.
    pub n_c: usize,
    /// Observation window length `M` in chips.
    pub m: usize,
    /// Number of multipath taps `L`.
    pub l: usize,
    /// ISI symbols per side `G`.
    pub g: usize,
    /// Channel-grid samples per symbol, `T_s / T_tau`.
    pub ns: usize,
    /// Channel-grid samples per chip, `T_c / T_tau`.
    pub nu: usize,
    /// Rows of the Toeplitz channel matrix, `ns + L - 1`.
    pub m_h: usize,
}

fn integer_ratio(num: f64, den: f64, what: &str) -> Result<usize> {
    if !(num.is_finite() && den.is_finite() && num > 0.0 && den > 0.0) {
        return Err(Error::config(format!("{what}: durations must be positive and finite")));
    }
    let ratio = num / den;
    let n = ratio.round();
    if n < 1.0 || (ratio - n).abs() > 1e-9 * n.max(1.0) {
        return Err(Error::config(format!("{what} = {ratio} is not a positive integer")));
    }
    Ok(n as usize)
}

impl SystemConfig {
    /// Reduced-size scenario used by the test suite: `T_s = 3 ns`,
    /// `T_DS = 7.5 ns`, `T_c = T_tau = 0.375 ns`, giving `N_c = 8`, `M = 28`,
    /// `L = 20`, `G = 3`. User energies are `1/N_c` so every user's
    /// signature carries unit energy per symbol.
    pub fn desk(num_users: usize, snr_db: f64) -> Self {
        let n_c = 8;
        SystemConfig {
            num_users,
            spreading_gain: n_c,
            symbol_duration: 3.0e-9,
            chip_duration: 0.375e-9,
            tap_spacing: 0.375e-9,
            delay_spread: 7.5e-9,
            user_energies: vec![1.0 / n_c as f64; num_users],
            snr_db,
            rrc_rolloff: 0.5,
            rrc_span_chips: 8,
            seed: 1,
        }
    }

    /// Full-size scenario: `T_s = 12 ns`, `T_DS = 30 ns`, `T_c = 0.375 ns`,
    /// spreading gain 32, `M = 112`, `L = 80`, `G = 3`.
    pub fn full_scale(num_users: usize, snr_db: f64) -> Self {
        let n_c = 32;
        SystemConfig {
            num_users,
            spreading_gain: n_c,
            symbol_duration: 12.0e-9,
            chip_duration: 0.375e-9,
            tap_spacing: 0.375e-9,
            delay_spread: 30.0e-9,
            user_energies: vec![1.0 / n_c as f64; num_users],
            snr_db,
            rrc_rolloff: 0.5,
            rrc_span_chips: 8,
            seed: 1,
        }
    }

    pub fn dims(&self) -> Result<Dims> {
        let k = self.num_users;
        if k == 0 {
            return Err(Error::config("num_users must be positive"));
        }
        if self.spreading_gain == 0 {
            return Err(Error::config("spreading_gain must be positive"));
        }
        let n_c = integer_ratio(self.symbol_duration, self.chip_duration, "T_s/T_c")?;
        if n_c != self.spreading_gain {
            return Err(Error::config(format!(
                "T_s/T_c = {n_c} disagrees with spreading_gain = {}",
                self.spreading_gain
            )));
        }
        let nu = integer_ratio(self.chip_duration, self.tap_spacing, "T_c/T_tau")?;
        let l = integer_ratio(self.delay_spread, self.tap_spacing, "T_DS/T_tau")?;
        let m = integer_ratio(
            self.symbol_duration + self.delay_spread,
            self.chip_duration,
            "(T_s + T_DS)/T_c",
        )?;
        let ns = n_c * nu;
        let g = l.div_ceil(ns);
        if self.user_energies.len() != k {
            return Err(Error::Dimension {
                what: "user_energies",
                expected: k,
                got: self.user_energies.len(),
            });
        }
        if self.user_energies.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
            return Err(Error::config("user energies must be finite and nonnegative"));
        }
        if !self.snr_db.is_finite() {
            return Err(Error::config("snr_db must be finite"));
        }
        if !(self.rrc_rolloff > 0.0 && self.rrc_rolloff <= 1.0) {
            return Err(Error::config("rrc_rolloff must lie in (0, 1]"));
        }
        if self.rrc_span_chips == 0 {
            return Err(Error::config("rrc_span_chips must be positive"));
        }
        Ok(Dims {
            k,
            n_c,
            m,
            l,
            g,
            ns,
            nu,
            m_h: ns + l - 1,
        })
    }

    pub fn with_users(mut self, num_users: usize) -> Self {
        let e = self
            .user_energies
            .first()
            .copied()
            .unwrap_or(1.0 / self.spreading_gain as f64);
        self.num_users = num_users;
        self.user_energies = vec![e; num_users];
        self
    }

    pub fn with_snr(mut self, snr_db: f64) -> Self {
        self.snr_db = snr_db;
        self
    }
}
