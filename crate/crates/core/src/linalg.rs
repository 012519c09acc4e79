//! Small complex linear-algebra helpers shared by the receivers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CVec = DVector<Complex64>;
pub type CMat = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn is_finite_vec(v: &CVec) -> bool {
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn is_finite_mat(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `a^H b`.
pub fn inner(a: &CVec, b: &CVec) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Replace `m` by `(m + m^H) / 2`.
pub fn hermitize(m: &mut CMat) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)].im = 0.0;
        for j in (i + 1)..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

pub fn trace_re(m: &CMat) -> f64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)].re).sum()
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let mut h = m.clone();
    hermitize(&mut h);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

pub fn condition_estimate(m: &CMat) -> f64 {
    let ev = hermitian_eigenvalues(m);
    let (lo, hi) = (ev[0].abs(), ev[ev.len() - 1].abs());
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Solve `(A + eps·tr(A)/n·I) x = b` for Hermitian PSD `A` by Cholesky.
pub fn solve_hermitian_regularized(a: &CMat, b: &CVec, eps: f64) -> Result<CVec> {
    let n = a.nrows();
    Error::check_len("hermitian solve", n, b.len())?;
    if !is_finite_mat(a) || !is_finite_vec(b) {
        return Err(Error::NonFinite("hermitian solve"));
    }
    let mut reg = a.clone();
    hermitize(&mut reg);
    let tr = trace_re(&reg);
    let shift = if tr > 0.0 { eps * tr / n as f64 } else { 0.0 };
    for i in 0..n {
        reg[(i, i)].re += shift;
    }
    if tr <= 0.0 {
        return Err(Error::Singular {
            condition: f64::INFINITY,
        });
    }
    let condition = condition_estimate(&reg);
    if !(condition < 1e15) {
        return Err(Error::Singular { condition });
    }
    match reg.clone().cholesky() {
        Some(ch) => Ok(ch.solve(b)),
        None => Err(Error::Singular { condition }),
    }
}

/// `a I_n`.
pub fn scaled_identity(n: usize, a: f64) -> CMat {
    CMat::from_diagonal_element(n, n, Complex64::new(a, 0.0))
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
