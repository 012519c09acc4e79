use rand::Rng;
use rand_distr::StandardNormal;

use super::config::Dims;
use super::signatures::SignatureSet;
use crate::error::{Error, Result};
use crate::linalg::{CVec, ZERO};
use num_complex::Complex64;

/// Per-user symbol streams indexed from `first`; entries are ±1 (zero is
/// accepted and silences a symbol).
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolStreams {
    pub first: i64,
    pub bits: Vec<Vec<i8>>,
}

impl SymbolStreams {
    /// Random streams for symbols `0..n`, padded with `G` independent random
    /// symbols on each side.
    pub fn random<R: Rng + ?Sized>(dims: &Dims, n: usize, rng: &mut R) -> Self {
        let len = n + 2 * dims.g;
        let bits = (0..dims.k)
            .map(|_| (0..len).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect())
            .collect();
        SymbolStreams {
            first: -(dims.g as i64),
            bits,
        }
    }

    pub fn last(&self) -> i64 {
        self.first + self.bits.first().map_or(0, |b| b.len() as i64) - 1
    }

    pub fn get(&self, k: usize, i: i64) -> Option<i8> {
        let idx = i - self.first;
        if idx < 0 {
            return None;
        }
        self.bits.get(k)?.get(idx as usize).copied()
    }

    pub fn set(&mut self, k: usize, i: i64, b: i8) {
        let idx = (i - self.first) as usize;
        self.bits[k][idx] = b;
    }
}

/// Noise-free `r(i)`: desired-symbol signatures plus the `2G` ISI terms.
pub fn synthesize_noiseless(sigs: &SignatureSet, symbols: &SymbolStreams, i: i64) -> Result<CVec> {
    let g = sigs.dims.g as i64;
    if symbols.bits.len() != sigs.dims.k || i - g < symbols.first || i + g > symbols.last() {
        return Err(Error::MissingSymbols {
            index: i,
            first: symbols.first,
            last: symbols.last(),
        });
    }
    let mut r = CVec::from_element(sigs.dims.m, ZERO);
    for (k, lag, v) in sigs.all() {
        let b = symbols.get(k, i + lag).expect("range checked") as f64;
        if b != 0.0 {
            r.axpy(Complex64::new(b, 0.0), v, Complex64::new(1.0, 0.0));
        }
    }
    Ok(r)
}

/// Circular complex Gaussian vector with `E|n_m|^2 = sigma^2`.
pub fn noise_vector<R: Rng + ?Sized>(sigma: f64, m: usize, rng: &mut R) -> CVec {
    let s = sigma * std::f64::consts::FRAC_1_SQRT_2;
    CVec::from_fn(m, |_, _| {
        Complex64::new(
            s * rng.sample::<f64, _>(StandardNormal),
            s * rng.sample::<f64, _>(StandardNormal),
        )
    })
}

pub fn synthesize_received<R: Rng + ?Sized>(
    sigs: &SignatureSet,
    symbols: &SymbolStreams,
    i: i64,
    rng: &mut R,
) -> Result<CVec> {
    let r = synthesize_noiseless(sigs, symbols, i)?;
    Ok(r + noise_vector(sigs.noise_stddev, sigs.dims.m, rng))
}

/// Received vectors `r(i)` with the desired user's symbol `b_1(i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedBatch {
    pub samples: Vec<(CVec, f64)>,
    pub symbols: SymbolStreams,
}

pub fn generate_batch<R: Rng + ?Sized>(sigs: &SignatureSet, n: usize, rng: &mut R) -> Result<ReceivedBatch> {
    let symbols = SymbolStreams::random(&sigs.dims, n, rng);
    let samples = (0..n as i64)
        .map(|i| {
            let r = synthesize_received(sigs, &symbols, i, rng)?;
            Ok((r, symbols.get(0, i).expect("in range") as f64))
        })
        .collect::<Result<_>>()?;
    Ok(ReceivedBatch { samples, symbols })
}
