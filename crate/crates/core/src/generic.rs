//! Jointly adapted reduced-rank filtering with an unconstrained projection.
//!
//! The projection vector `t` stacks the `D` basis vectors `φ_1..φ_D`, each of
//! length `M`. The reduced observation is `r̄ = R_in t` where `R_in` is the
//! `D × MD` block-diagonal replication of `rᵀ`, so `r̄_d = rᵀ t_d`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{inner, is_finite_vec, solve_hermitian_regularized, CMat, CVec, ONE, ZERO};
use crate::linear::{mse, RlsInverse, SecondOrderMoments, WIENER_LOADING};

fn check_dims(r: &CVec, t: &CVec, rank: usize) -> Result<usize> {
    if rank == 0 {
        return Err(Error::config("rank must be at least 1"));
    }
    let m = r.len();
    Error::check_len("projection vector", m * rank, t.len())?;
    Ok(m)
}

/// `r̄ = R_in t` without forming `R_in`.
pub fn apply_input_matrix(r: &CVec, t: &CVec, rank: usize) -> Result<CVec> {
    let m = check_dims(r, t, rank)?;
    Ok(CVec::from_fn(rank, |d, _| (0..m).map(|a| r[a] * t[d * m + a]).sum()))
}

/// `R_in^H w̄`: block `d` is `w̄_d · conj(r)`.
pub fn input_matrix_adjoint(r: &CVec, w_bar: &CVec) -> CVec {
    let m = r.len();
    CVec::from_fn(m * w_bar.len(), |i, _| r[i % m].conj() * w_bar[i / m])
}

/// The explicit `D × MD` matrix `R_in`, for checks against the sparse forms.
pub fn dense_input_matrix(r: &CVec, rank: usize) -> CMat {
    let m = r.len();
    let mut out = CMat::zeros(rank, m * rank);
    for d in 0..rank {
        for a in 0..m {
            out[(d, d * m + a)] = r[a];
        }
    }
    out
}

/// The full-rank filter with the same output as the pair `(t, w̄)`:
/// `w̄^H R_in t = (Σ_d w̄_d conj(t_d))^H r`.
pub fn equivalent_filter(t: &CVec, w_bar: &CVec) -> CVec {
    let rank = w_bar.len();
    let m = t.len() / rank;
    CVec::from_fn(m, |a, _| (0..rank).map(|d| w_bar[d] * t[d * m + a].conj()).sum())
}

/// Moments of `r̄` for a fixed projection: `R̄ = Aᵀ R conj(A)`, `p̄ = Aᵀ p`
/// where `A = [t_1 .. t_D]`.
pub fn reduced_moments(m: &SecondOrderMoments, t: &CVec, rank: usize) -> Result<SecondOrderMoments> {
    let dim = m.dim();
    Error::check_len("projection vector", dim * rank, t.len())?;
    let a = CMat::from_fn(dim, rank, |i, d| t[d * dim + i]);
    let at = a.transpose();
    let mut r_bar = &at * &m.r * a.conjugate();
    crate::linalg::hermitize(&mut r_bar);
    Ok(SecondOrderMoments {
        r: r_bar,
        p: &at * &m.p,
        sigma_d_sq: m.sigma_d_sq,
    })
}

/// Optimal reduced-rank filter for a fixed projection and its MSE.
pub fn reduced_wiener(m: &SecondOrderMoments, t: &CVec, rank: usize) -> Result<(CVec, f64)> {
    let reduced = reduced_moments(m, t, rank)?;
    let w = solve_hermitian_regularized(&reduced.r, &reduced.p, WIENER_LOADING)?;
    let attained = mse(m, &equivalent_filter(t, &w));
    Ok((w, attained))
}

/// `R_w = E[R_in^H w̄ w̄^H R_in]` and `p_w = E[d R_in^H w̄]` from the
/// observation moments.
pub fn projection_moments(m: &SecondOrderMoments, w_bar: &CVec) -> SecondOrderMoments {
    let dim = m.dim();
    let rank = w_bar.len();
    let n = dim * rank;
    let r = CMat::from_fn(n, n, |i, j| {
        let (d, a) = (i / dim, i % dim);
        let (e, b) = (j / dim, j % dim);
        w_bar[d] * w_bar[e].conj() * m.r[(a, b)].conj()
    });
    let p = CVec::from_fn(n, |i, _| w_bar[i / dim] * m.p[i % dim].conj());
    SecondOrderMoments {
        r,
        p,
        sigma_d_sq: m.sigma_d_sq,
    }
}

/// `t_opt = R_w^{-1} p_w` for a fixed reduced-rank filter.
pub fn generic_optimum_t(m: &SecondOrderMoments, w_bar: &CVec) -> Result<CVec> {
    let pm = projection_moments(m, w_bar);
    solve_hermitian_regularized(&pm.r, &pm.p, WIENER_LOADING)
}

#[derive(Debug, Clone, PartialEq)]
pub enum GenericMode {
    Lms {
        mu_w: f64,
        mu_t: f64,
    },
    Rls {
        inverse_w: RlsInverse,
        inverse_t: RlsInverse,
    },
}

/// Joint adaptation of the projection vector `t` and the reduced-rank
/// filter `w̄`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenericFilter {
    pub t: CVec,
    pub w_bar: CVec,
    pub rank: usize,
    pub n_iter: usize,
    pub mode: GenericMode,
}

impl GenericFilter {
    fn initial(m: usize, rank: usize, n_iter: usize, mode: GenericMode) -> Result<Self> {
        if rank == 0 || m == 0 {
            return Err(Error::config("generic scheme needs M ≥ 1 and D ≥ 1"));
        }
        if n_iter == 0 {
            return Err(Error::config("iterations per symbol must be at least 1"));
        }
        // A null projection is a fixed point of the joint recursion.
        let t = CVec::from_element(m * rank, Complex64::new(1.0 / (m as f64).sqrt(), 0.0));
        Ok(GenericFilter {
            t,
            w_bar: CVec::zeros(rank),
            rank,
            n_iter,
            mode,
        })
    }

    pub fn new_lms(m: usize, rank: usize, mu_w: f64, mu_t: f64, n_iter: usize) -> Result<Self> {
        if !(mu_w > 0.0 && mu_t > 0.0 && mu_w.is_finite() && mu_t.is_finite()) {
            return Err(Error::config(format!("step sizes ({mu_w}, {mu_t}) must be positive")));
        }
        Self::initial(m, rank, n_iter, GenericMode::Lms { mu_w, mu_t })
    }

    pub fn new_rls(m: usize, rank: usize, lambda: f64, delta_w: f64, delta_t: f64, n_iter: usize) -> Result<Self> {
        let mode = GenericMode::Rls {
            inverse_w: RlsInverse::new(rank, lambda, delta_w)?,
            inverse_t: RlsInverse::new(m * rank, lambda, delta_t)?,
        };
        Self::initial(m, rank, n_iter, mode)
    }

    pub fn observation_len(&self) -> usize {
        self.t.len() / self.rank
    }

    pub fn reduce(&self, r: &CVec) -> Result<CVec> {
        apply_input_matrix(r, &self.t, self.rank)
    }

    pub fn output(&self, r: &CVec) -> Result<Complex64> {
        Ok(inner(&self.w_bar, &self.reduce(r)?))
    }

    /// Runs `n_iter` joint updates on one sample and returns the error of the
    /// last iteration, evaluated before that iteration's updates.
    pub fn step(&mut self, r: &CVec, d: Complex64) -> Result<Complex64> {
        Error::check_len("generic scheme input", self.observation_len(), r.len())?;
        if !is_finite_vec(r) || !d.re.is_finite() || !d.im.is_finite() {
            return Err(Error::NonFinite("generic scheme input"));
        }
        let mut e = ZERO;
        for _ in 0..self.n_iter {
            let r_bar = self.reduce(r)?;
            e = d - inner(&self.w_bar, &r_bar);
            match &mut self.mode {
                GenericMode::Lms { mu_w, mu_t } => {
                    self.w_bar.axpy(Complex64::new(*mu_w, 0.0) * e.conj(), &r_bar, ONE);
                    let r_t = input_matrix_adjoint(r, &self.w_bar);
                    self.t.axpy(Complex64::new(*mu_t, 0.0) * e, &r_t, ONE);
                }
                GenericMode::Rls { inverse_w, inverse_t } => {
                    let k_w = inverse_w.update(&r_bar)?;
                    self.w_bar.axpy(e.conj(), &k_w, ONE);
                    let r_t = input_matrix_adjoint(r, &self.w_bar);
                    let k_t = inverse_t.update(&r_t)?;
                    self.t.axpy(e, &k_t, ONE);
                }
            }
        }
        if !is_finite_vec(&self.w_bar) || !is_finite_vec(&self.t) {
            return Err(Error::NonFinite("generic scheme weights"));
        }
        Ok(e)
    }
}
