use std::sync::Arc;

use num_complex::Complex64;

use super::book::PositionBook;
use crate::error::{Error, Result};
use crate::linalg::{inner, is_finite_vec, CVec, ONE};
use crate::linear::{decide, RlsInverse};

/// `r̄ = R_in P_c ψ`: `r̄_d = Σ_j r[z_{c,d} + j] ψ[d q + j]`.
pub fn project(book: &PositionBook, c: usize, psi: &CVec, r: &CVec) -> CVec {
    let q = book.block_len();
    CVec::from_fn(book.rank(), |d, _| {
        let z = book.offset(c, d);
        (0..q).map(|j| r[z + j] * psi[d * q + j]).sum()
    })
}

/// `r_ψ = P_c^H R_in^H w̄`: `r_ψ[d q + j] = conj(r[z_{c,d} + j]) w̄_d`.
pub fn psi_regressor(book: &PositionBook, c: usize, r: &CVec, w_bar: &CVec) -> CVec {
    let q = book.block_len();
    CVec::from_fn(book.psi_len(), |i, _| {
        let (d, j) = (i / q, i % q);
        r[book.offset(c, d) + j].conj() * w_bar[d]
    })
}

/// Outcome of branch selection. `errors` holds `|e_c|^2` for the branches
/// that were evaluated, in order.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchDecision {
    pub branch: usize,
    pub e: Complex64,
    pub errors: Vec<f64>,
}

impl BranchDecision {
    /// Lowest squared error wins, ties going to the lowest branch index.
    pub fn from_errors(errors: &[Complex64]) -> Self {
        let mut best = 0;
        for (c, e) in errors.iter().enumerate() {
            if e.norm_sqr() < errors[best].norm_sqr() {
                best = c;
            }
        }
        BranchDecision {
            branch: best,
            e: errors[best],
            errors: errors.iter().map(|e| e.norm_sqr()).collect(),
        }
    }

    /// Selection without a reference: each branch is scored against its own
    /// hard decision, so the output lying nearest the constellation wins.
    /// `e` is then the distance to that decision.
    pub fn blind(outputs: &[Complex64]) -> Self {
        let errors: Vec<Complex64> = outputs
            .iter()
            .map(|&y| Complex64::new(decide(y) as f64, 0.0) - y)
            .collect();
        Self::from_errors(&errors)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SaabfMode {
    Lms {
        mu_w: f64,
        mu_psi: f64,
    },
    Rls {
        inverse_w: RlsInverse,
        inverse_psi: RlsInverse,
    },
}

/// Adaptation constants, independent of the book they are applied to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SaabfAdaptation {
    Lms { mu_w: f64, mu_psi: f64 },
    Rls { lambda: f64, delta_w: f64, delta_psi: f64 },
}

impl SaabfAdaptation {
    pub fn build(&self, book: Arc<PositionBook>) -> Result<SaabfFilter> {
        match *self {
            SaabfAdaptation::Lms { mu_w, mu_psi } => SaabfFilter::new_lms(book, mu_w, mu_psi),
            SaabfAdaptation::Rls {
                lambda,
                delta_w,
                delta_psi,
            } => SaabfFilter::new_rls(book, lambda, delta_w, delta_psi),
        }
    }
}

/// Per-symbol result of an adaptation step.
#[derive(Debug, Clone, PartialEq)]
pub struct SaabfStep {
    pub e: Complex64,
    pub branch: usize,
    pub branches_evaluated: usize,
}

/// Switched approximation of adaptive basis functions: a reduced-rank filter
/// `w̄` fed by `r̄ = R_in P_c ψ`, where the branch `c` is switched per
/// symbol to the one with the smallest instantaneous error.
#[derive(Debug, Clone, PartialEq)]
pub struct SaabfFilter {
    pub book: Arc<PositionBook>,
    pub w_bar: CVec,
    pub psi: CVec,
    pub mode: SaabfMode,
    /// With this off, `ψ` stays at its initial value.
    pub adapt_psi: bool,
    pub last_branch: usize,
}

impl SaabfFilter {
    fn initial(book: Arc<PositionBook>, mode: SaabfMode) -> Self {
        SaabfFilter {
            w_bar: CVec::zeros(book.rank()),
            psi: CVec::from_element(book.psi_len(), ONE),
            book,
            mode,
            adapt_psi: true,
            last_branch: 0,
        }
    }

    pub fn new_lms(book: Arc<PositionBook>, mu_w: f64, mu_psi: f64) -> Result<Self> {
        if !(mu_w > 0.0 && mu_w.is_finite() && mu_psi >= 0.0 && mu_psi.is_finite()) {
            return Err(Error::config(format!("step sizes ({mu_w}, {mu_psi}) out of range")));
        }
        Ok(Self::initial(book, SaabfMode::Lms { mu_w, mu_psi }))
    }

    pub fn new_rls(book: Arc<PositionBook>, lambda: f64, delta_w: f64, delta_psi: f64) -> Result<Self> {
        let mode = SaabfMode::Rls {
            inverse_w: RlsInverse::new(book.rank(), lambda, delta_w)?,
            inverse_psi: RlsInverse::new(book.psi_len(), lambda, delta_psi)?,
        };
        Ok(Self::initial(book, mode))
    }

    pub fn with_frozen_psi(mut self) -> Self {
        self.adapt_psi = false;
        self
    }

    pub fn reduce(&self, c: usize, r: &CVec) -> CVec {
        project(&self.book, c, &self.psi, r)
    }

    /// `w̄^H r̄` through branch `c`.
    pub fn output(&self, c: usize, r: &CVec) -> Complex64 {
        inner(&self.w_bar, &self.reduce(c, r))
    }

    pub fn branch_error(&self, c: usize, r: &CVec, d: Complex64) -> Complex64 {
        d - self.output(c, r)
    }

    pub fn check_input(&self, r: &CVec, d: Complex64) -> Result<()> {
        Error::check_len("SAABF input", self.book.observation_len(), r.len())?;
        if !is_finite_vec(r) || !d.re.is_finite() || !d.im.is_finite() {
            return Err(Error::NonFinite("SAABF input"));
        }
        Ok(())
    }

    /// Branch and soft output for detection when no reference is available.
    pub fn blind_output(&self, r: &CVec) -> (usize, Complex64) {
        let outputs: Vec<Complex64> = (0..self.book.branches()).map(|c| self.output(c, r)).collect();
        let c = BranchDecision::blind(&outputs).branch;
        (c, outputs[c])
    }

    /// Evaluates every branch with the current `w̄`, `ψ`.
    pub fn select_branch(&self, r: &CVec, d: Complex64) -> BranchDecision {
        let errors: Vec<Complex64> = (0..self.book.branches()).map(|c| self.branch_error(c, r, d)).collect();
        BranchDecision::from_errors(&errors)
    }

    /// Updates `w̄` then `ψ` through branch `c` using the error `e` from
    /// selection.
    pub fn adapt(&mut self, c: usize, r: &CVec, e: Complex64) -> Result<()> {
        let r_bar = self.reduce(c, r);
        match &mut self.mode {
            SaabfMode::Lms { mu_w, mu_psi } => {
                self.w_bar.axpy(Complex64::new(*mu_w, 0.0) * e.conj(), &r_bar, ONE);
                if self.adapt_psi {
                    let u = psi_regressor(&self.book, c, r, &self.w_bar);
                    self.psi.axpy(Complex64::new(*mu_psi, 0.0) * e, &u, ONE);
                }
            }
            SaabfMode::Rls { inverse_w, inverse_psi } => {
                let k_w = inverse_w.update(&r_bar)?;
                self.w_bar.axpy(e.conj(), &k_w, ONE);
                if self.adapt_psi {
                    let r_psi = psi_regressor(&self.book, c, r, &self.w_bar);
                    let k_psi = inverse_psi.update(&r_psi)?;
                    self.psi.axpy(e, &k_psi, ONE);
                }
            }
        }
        self.last_branch = c;
        if !is_finite_vec(&self.w_bar) || !is_finite_vec(&self.psi) {
            return Err(Error::NonFinite("SAABF weights"));
        }
        Ok(())
    }

    /// Selects the best branch over the whole book and adapts through it.
    pub fn step(&mut self, r: &CVec, d: Complex64) -> Result<SaabfStep> {
        self.check_input(r, d)?;
        let decision = self.select_branch(r, d);
        self.adapt(decision.branch, r, decision.e)?;
        Ok(SaabfStep {
            e: decision.e,
            branch: decision.branch,
            branches_evaluated: self.book.branches(),
        })
    }
}
