use super::moments::SecondOrderMoments;
use crate::error::Result;
use crate::linalg::{inner, solve_hermitian_regularized, CVec};

/// Diagonal loading applied before factorization, relative to `tr(R)/M`.
pub const WIENER_LOADING: f64 = 1e-10;

/// `σ_d^2 - 2 Re(w^H p) + w^H R w`.
pub fn mse(m: &SecondOrderMoments, w: &CVec) -> f64 {
    let rw = &m.r * w;
    m.sigma_d_sq - 2.0 * inner(w, &m.p).re + inner(w, &rw).re
}

/// `w_o = R^{-1} p` and `MMSE = σ_d^2 - p^H R^{-1} p`.
pub fn wiener_solution(m: &SecondOrderMoments) -> Result<(CVec, f64)> {
    let w = solve_hermitian_regularized(&m.r, &m.p, WIENER_LOADING)?;
    let mmse = m.sigma_d_sq - inner(&m.p, &w).re;
    Ok((w, mmse))
}
