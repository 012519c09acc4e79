//! Clustered tap-delay channel generator and CIR file import.

use std::f64::consts::TAU;
use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use serde::{Deserialize, Serialize};

use super::config::{Dims, SystemConfig};
use crate::error::{Error, Result};

/// Saleh-Valenzuela style arrival and decay parameters.
///
/// Rates are in arrivals per second; a zero rate means a single cluster
/// (resp. a single ray per cluster). Decay constants are power time
/// constants in seconds and may be infinite for a flat profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterProfile {
    pub cluster_arrival_rate: f64,
    pub ray_arrival_rate: f64,
    pub cluster_decay: f64,
    pub ray_decay: f64,
}

impl Default for ClusterProfile {
    /// Residential NLOS-like values.
    fn default() -> Self {
        ClusterProfile {
            cluster_arrival_rate: 0.0305e9,
            ray_arrival_rate: 1.13e9,
            cluster_decay: 22.61e-9,
            ray_decay: 12.53e-9,
        }
    }
}

impl ClusterProfile {
    fn validate(&self) -> Result<()> {
        let rates_ok = [self.cluster_arrival_rate, self.ray_arrival_rate]
            .iter()
            .all(|r| r.is_finite() && *r >= 0.0);
        let decays_ok = [self.cluster_decay, self.ray_decay]
            .iter()
            .all(|d| !d.is_nan() && *d > 0.0);
        if rates_ok && decays_ok {
            Ok(())
        } else {
            Err(Error::config(format!("invalid cluster profile {self:?}")))
        }
    }
}

/// Per-user tap vectors `h_k` on the `T_tau` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub taps: Vec<Vec<Complex64>>,
}

fn normalize(h: &mut [Complex64]) {
    let e: f64 = h.iter().map(|z| z.norm_sqr()).sum();
    if e > 0.0 {
        let s = e.sqrt();
        h.iter_mut().for_each(|z| *z /= s);
    }
}

fn draw_user<R: Rng + ?Sized>(l: usize, tap: f64, profile: &ClusterProfile, rng: &mut R) -> Vec<Complex64> {
    let window = l as f64 * tap;
    let mut h = vec![Complex64::new(0.0, 0.0); l];
    let cluster_gap =
        (profile.cluster_arrival_rate > 0.0).then(|| Exp::new(profile.cluster_arrival_rate).expect("positive rate"));
    let ray_gap = (profile.ray_arrival_rate > 0.0).then(|| Exp::new(profile.ray_arrival_rate).expect("positive rate"));

    let mut cluster_start = 0.0;
    while cluster_start < window {
        let mut ray = 0.0;
        while cluster_start + ray < window {
            let power = (-cluster_start / profile.cluster_decay).exp() * (-ray / profile.ray_decay).exp();
            let amp = (power / 2.0).sqrt();
            let g = Complex64::new(
                amp * rng.sample::<f64, _>(StandardNormal),
                amp * rng.sample::<f64, _>(StandardNormal),
            );
            // Circular Gaussian: Rayleigh magnitude, phase uniform on [0, 2π).
            let idx = (((cluster_start + ray) / tap) + 1e-9).floor() as usize;
            h[idx.min(l - 1)] += g;
            match &ray_gap {
                Some(e) => ray += e.sample(rng),
                None => break,
            }
        }
        match &cluster_gap {
            Some(e) => cluster_start += e.sample(rng),
            None => break,
        }
    }
    if h.iter().all(|z| z.norm_sqr() == 0.0) {
        h[0] = Complex64::from_polar(1.0, TAU * rng.random::<f64>());
    }
    normalize(&mut h);
    h
}

pub fn generate_channel<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    profile: &ClusterProfile,
    rng: &mut R,
) -> Result<ChannelRealization> {
    let dims = cfg.dims()?;
    profile.validate()?;
    if dims.l == 0 {
        return Err(Error::config("channel needs at least one tap"));
    }
    let taps = (0..dims.k)
        .map(|_| draw_user(dims.l, cfg.tap_spacing, profile, rng))
        .collect();
    Ok(ChannelRealization { taps })
}

/// Parse a CIR file: one `re im` pair per line, `L` lines. Blank lines and
/// lines starting with `#` are ignored. The taps are used unnormalized.
pub fn parse_cir(text: &str, dims: &Dims, origin: &Path) -> Result<Vec<Complex64>> {
    let err = |message: String| Error::Parse {
        path: origin.to_path_buf(),
        message,
    };
    let mut taps = Vec::with_capacity(dims.l);
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(err(format!("line {}: expected `re im`", lineno + 1)));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(format!("line {}: bad number `{s}`", lineno + 1)))
        };
        taps.push(Complex64::new(parse(fields[0])?, parse(fields[1])?));
    }
    if taps.len() != dims.l {
        return Err(err(format!("expected {} taps, found {}", dims.l, taps.len())));
    }
    Ok(taps)
}

/// Load one CIR file per user.
pub fn load_channel<P: AsRef<Path>>(cfg: &SystemConfig, paths: &[P]) -> Result<ChannelRealization> {
    let dims = cfg.dims()?;
    Error::check_len("CIR files", dims.k, paths.len())?;
    let taps = paths
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p.as_ref())?;
            parse_cir(&text, &dims, p.as_ref())
        })
        .collect::<Result<_>>()?;
    Ok(ChannelRealization { taps })
}
