use super::book::PositionBook;
use crate::error::{Error, Result};
use crate::generic::{equivalent_filter, reduced_moments};
use crate::linalg::{solve_hermitian_regularized, CMat, CVec, ONE};
use crate::linear::{mse, SecondOrderMoments, WIENER_LOADING};

const MAX_ALTERNATIONS: usize = 10_000;
const TOLERANCE: f64 = 1e-12;

/// Converged point of the alternating MMSE design on one branch.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    pub w_bar: CVec,
    pub psi: CVec,
    pub mmse: f64,
    /// MSE after each `ψ` update.
    pub history: Vec<f64>,
}

/// `t = P_c ψ`, the stacked basis vectors.
pub fn expand_psi(book: &PositionBook, c: usize, psi: &CVec) -> CVec {
    let (m, q) = (book.observation_len(), book.block_len());
    let mut t = CVec::zeros(m * book.rank());
    for d in 0..book.rank() {
        let z = book.offset(c, d);
        for j in 0..q {
            t[d * m + z + j] = psi[d * q + j];
        }
    }
    t
}

/// `R_ψ = E[r_ψ r_ψ^H]` and `p_ψ = E[d r_ψ]` for fixed `w̄` on branch `c`.
pub fn psi_moments(m: &SecondOrderMoments, book: &PositionBook, c: usize, w_bar: &CVec) -> SecondOrderMoments {
    let q = book.block_len();
    let n = book.psi_len();
    let row = |i: usize| (i / q, book.offset(c, i / q) + i % q);
    let r = CMat::from_fn(n, n, |i, j| {
        let ((d, a), (e, b)) = (row(i), row(j));
        w_bar[d] * w_bar[e].conj() * m.r[(a, b)].conj()
    });
    let p = CVec::from_fn(n, |i, _| {
        let (d, a) = row(i);
        w_bar[d] * m.p[a].conj()
    });
    SecondOrderMoments {
        r,
        p,
        sigma_d_sq: m.sigma_d_sq,
    }
}

/// MSE of the pair `(w̄, ψ)` on branch `c`.
pub fn saabf_mse(m: &SecondOrderMoments, book: &PositionBook, c: usize, w_bar: &CVec, psi: &CVec) -> f64 {
    mse(m, &equivalent_filter(&expand_psi(book, c, psi), w_bar))
}

/// Alternates `w̄ = R̄^{-1} p̄` and `ψ = R_ψ^{-1} p_ψ` on the first branch,
/// starting from `ψ = 1`, until the MSE moves by less than `1e-12`.
pub fn saabf_mmse_fixed_point(m: &SecondOrderMoments, book: &PositionBook) -> Result<FixedPoint> {
    Error::check_len("moments", book.observation_len(), m.dim())?;
    let rank = book.rank();
    let mut psi = CVec::from_element(book.psi_len(), ONE);
    let mut history = Vec::new();
    let mut last = f64::INFINITY;
    for _ in 0..MAX_ALTERNATIONS {
        let t = expand_psi(book, 0, &psi);
        let reduced = reduced_moments(m, &t, rank)?;
        let w_bar = solve_hermitian_regularized(&reduced.r, &reduced.p, WIENER_LOADING)?;
        let pm = psi_moments(m, book, 0, &w_bar);
        psi = solve_hermitian_regularized(&pm.r, &pm.p, WIENER_LOADING)?;
        let current = saabf_mse(m, book, 0, &w_bar, &psi);
        history.push(current);
        if (last - current).abs() < TOLERANCE {
            // Finish on a w̄ step so the returned filter is optimal for ψ.
            let reduced = reduced_moments(m, &expand_psi(book, 0, &psi), rank)?;
            let w_bar = solve_hermitian_regularized(&reduced.r, &reduced.p, WIENER_LOADING)?;
            let mmse = saabf_mse(m, book, 0, &w_bar, &psi);
            history.push(mmse);
            return Ok(FixedPoint {
                w_bar,
                psi,
                mmse,
                history,
            });
        }
        last = current;
    }
    Err(Error::config(format!(
        "fixed point did not settle after {MAX_ALTERNATIONS} alternations"
    )))
}
