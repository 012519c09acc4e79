use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitize, scaled_identity, CMat, CVec};
use crate::uwb::{ReceivedBatch, SignatureSet};

/// `R = E[r r^H]`, `p = E[d^* r]` and `σ_d^2 = E|d|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondOrderMoments {
    pub r: CMat,
    pub p: CVec,
    pub sigma_d_sq: f64,
}

impl SecondOrderMoments {
    pub fn dim(&self) -> usize {
        self.p.len()
    }
}

/// Exact moments for independent equiprobable ±1 symbols with `d = b_1(i)`:
/// every signature contributes its outer product and the noise adds
/// `σ_n^2 I`.
pub fn exact_moments(sigs: &SignatureSet) -> SecondOrderMoments {
    let m = sigs.dims.m;
    let mut r = scaled_identity(m, sigs.noise_stddev.powi(2));
    for (_, _, v) in sigs.all() {
        r.ger(Complex64::new(1.0, 0.0), v, &v.conjugate(), Complex64::new(1.0, 0.0));
    }
    hermitize(&mut r);
    SecondOrderMoments {
        r,
        p: sigs.desired[0].clone(),
        sigma_d_sq: 1.0,
    }
}

/// Moments by brute-force expectation over every symbol pattern of the
/// `K(2G+1)` contributing symbols. Exponential cost; meant for small systems.
pub fn exhaustive_moments(sigs: &SignatureSet) -> Result<SecondOrderMoments> {
    let vectors: Vec<(usize, i64, &CVec)> = sigs.all().collect();
    let n = vectors.len();
    if n > 24 {
        return Err(Error::config(format!("{n} symbols is too many to enumerate")));
    }
    let desired_idx = vectors
        .iter()
        .position(|(k, lag, _)| *k == 0 && *lag == 0)
        .expect("desired signature present");
    let m = sigs.dims.m;
    let patterns = 1u64 << n;
    let mut r = CMat::zeros(m, m);
    let mut p = CVec::zeros(m);
    let mut d_sq = 0.0;
    for pattern in 0..patterns {
        let mut x = CVec::zeros(m);
        for (bit, (_, _, v)) in vectors.iter().enumerate() {
            let b = if pattern >> bit & 1 == 1 { 1.0 } else { -1.0 };
            x.axpy(Complex64::new(b, 0.0), v, Complex64::new(1.0, 0.0));
        }
        let d = if pattern >> desired_idx & 1 == 1 { 1.0 } else { -1.0 };
        r.ger(Complex64::new(1.0, 0.0), &x, &x.conjugate(), Complex64::new(1.0, 0.0));
        p.axpy(Complex64::new(d, 0.0), &x, Complex64::new(1.0, 0.0));
        d_sq += d * d;
    }
    let scale = 1.0 / patterns as f64;
    r *= Complex64::new(scale, 0.0);
    for i in 0..m {
        r[(i, i)].re += sigs.noise_stddev.powi(2);
    }
    hermitize(&mut r);
    Ok(SecondOrderMoments {
        r,
        p: p * Complex64::new(scale, 0.0),
        sigma_d_sq: d_sq * scale,
    })
}

/// Sample moments of a training batch; `R̂` is symmetrized.
pub fn estimate_moments(batch: &ReceivedBatch) -> Result<SecondOrderMoments> {
    moments_from_samples(batch.samples.iter().map(|(r, d)| (r, Complex64::new(*d, 0.0))))
}

pub fn moments_from_samples<'a>(
    samples: impl IntoIterator<Item = (&'a CVec, Complex64)>,
) -> Result<SecondOrderMoments> {
    let mut it = samples.into_iter().peekable();
    let m = it
        .peek()
        .map(|(r, _)| r.len())
        .ok_or_else(|| Error::config("empty batch"))?;
    let mut r = CMat::zeros(m, m);
    let mut p = CVec::zeros(m);
    let mut d_sq = 0.0;
    let mut n = 0usize;
    for (x, d) in it {
        Error::check_len("sample length", m, x.len())?;
        r.ger(Complex64::new(1.0, 0.0), x, &x.conjugate(), Complex64::new(1.0, 0.0));
        p.axpy(d.conj(), x, Complex64::new(1.0, 0.0));
        d_sq += d.norm_sqr();
        n += 1;
    }
    let s = Complex64::new(1.0 / n as f64, 0.0);
    r *= s;
    hermitize(&mut r);
    Ok(SecondOrderMoments {
        r,
        p: p * s,
        sigma_d_sq: d_sq / n as f64,
    })
}
