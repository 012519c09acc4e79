use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{inner, is_finite_mat, is_finite_vec, scaled_identity, CMat, CVec};

/// Hard decision `sign(Re y)`, with `sign(0) = +1`.
pub fn decide(y: Complex64) -> i8 {
    if y.re < 0.0 {
        -1
    } else {
        1
    }
}

pub fn detect(w: &CVec, r: &CVec) -> i8 {
    decide(inner(w, r))
}

pub(crate) fn check_input(r: &CVec, d: Complex64, what: &'static str) -> Result<()> {
    if is_finite_vec(r) && d.re.is_finite() && d.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Exponentially weighted inverse correlation matrix maintained with the
/// matrix inversion lemma.
#[derive(Debug, Clone, PartialEq)]
pub struct RlsInverse {
    pub p: CMat,
    pub lambda: f64,
}

impl RlsInverse {
    /// `P(0) = I / delta`.
    pub fn new(n: usize, lambda: f64, delta: f64) -> Result<Self> {
        if !(lambda > 0.9 && lambda <= 1.0) {
            return Err(Error::config(format!("forgetting factor {lambda} outside (0.9, 1]")));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::config(format!(
                "RLS initialization delta {delta} must be positive"
            )));
        }
        Ok(RlsInverse {
            p: scaled_identity(n, 1.0 / delta),
            lambda,
        })
    }

    /// Fold in the regressor `x`; returns the gain `k = P x / (λ + x^H P x)`
    /// and leaves `P ← (P - k x^H P) / λ`.
    pub fn update(&mut self, x: &CVec) -> Result<CVec> {
        let u = &self.p * x;
        let denom = self.lambda + inner(x, &u).re;
        let k = &u / Complex64::new(denom, 0.0);
        // k x^H P = u u^H / denom for Hermitian P.
        self.p.ger(
            Complex64::new(-1.0 / denom, 0.0),
            &u,
            &u.conjugate(),
            Complex64::new(1.0, 0.0),
        );
        self.p /= Complex64::new(self.lambda, 0.0);
        if !denom.is_finite() || !is_finite_mat(&self.p) {
            return Err(Error::NonFinite("RLS inverse"));
        }
        Ok(k)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FullRankLms {
    pub w: CVec,
    pub mu: f64,
}

impl FullRankLms {
    /// Starts from the null vector.
    pub fn new(m: usize, mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::config(format!("LMS step size {mu} must be positive")));
        }
        Ok(FullRankLms { w: CVec::zeros(m), mu })
    }

    pub fn output(&self, r: &CVec) -> Complex64 {
        inner(&self.w, r)
    }

    /// `e = d - w^H r`, then `w ← w + μ r e^*`. Returns the a priori error.
    pub fn step(&mut self, r: &CVec, d: Complex64) -> Result<Complex64> {
        Error::check_len("full-rank LMS input", self.w.len(), r.len())?;
        check_input(r, d, "full-rank LMS input")?;
        let e = d - self.output(r);
        self.w
            .axpy(Complex64::new(self.mu, 0.0) * e.conj(), r, Complex64::new(1.0, 0.0));
        if !is_finite_vec(&self.w) {
            return Err(Error::NonFinite("full-rank LMS weights"));
        }
        Ok(e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FullRankRls {
    pub w: CVec,
    pub inverse: RlsInverse,
}

impl FullRankRls {
    pub fn new(m: usize, lambda: f64, delta: f64) -> Result<Self> {
        Ok(FullRankRls {
            w: CVec::zeros(m),
            inverse: RlsInverse::new(m, lambda, delta)?,
        })
    }

    pub fn output(&self, r: &CVec) -> Complex64 {
        inner(&self.w, r)
    }

    pub fn step(&mut self, r: &CVec, d: Complex64) -> Result<Complex64> {
        Error::check_len("full-rank RLS input", self.w.len(), r.len())?;
        check_input(r, d, "full-rank RLS input")?;
        let e = d - self.output(r);
        let k = self.inverse.update(r)?;
        self.w.axpy(e.conj(), &k, Complex64::new(1.0, 0.0));
        if !is_finite_vec(&self.w) {
            return Err(Error::NonFinite("full-rank RLS weights"));
        }
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::linalg::{c, frobenius, ONE};
    use crate::uwb::noise_vector;

    fn e1(m: usize) -> CVec {
        let mut v = CVec::zeros(m);
        v[0] = ONE;
        v
    }

    #[test]
    fn decisions() {
        assert_eq!(decide(c(0.5, 3.0)), 1);
        assert_eq!(decide(c(-0.3, 0.0)), -1);
        assert_eq!(decide(c(0.0, -1.0)), 1);
        let w = CVec::from_vec(vec![c(0.0, 1.0)]);
        let r = CVec::from_vec(vec![c(0.0, -0.3)]);
        // w^H r = (-i)(-0.3 i) = -0.3
        assert_eq!(detect(&w, &r), -1);
    }

    #[test]
    fn lms_hand_step() {
        let mut f = FullRankLms::new(3, 0.1).unwrap();
        let e = f.step(&e1(3), ONE).unwrap();
        assert_eq!(e, ONE);
        assert!((&f.w - e1(3) * c(0.1, 0.0)).norm() < 1e-15);
        let w_before = f.w.clone();
        let e = f.step(&CVec::zeros(3), c(0.7, 0.0)).unwrap();
        assert_eq!(e, c(0.7, 0.0));
        assert_eq!(f.w, w_before);
        // e = 0 leaves w unchanged
        let r = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let y = f.output(&r);
        f.step(&r, y).unwrap();
        assert_eq!(f.w, w_before);
        assert!(f.step(&CVec::from_element(3, c(f64::NAN, 0.0)), ONE).is_err());
        assert!(FullRankLms::new(3, 0.0).is_err());
    }

    #[test]
    fn rls_hand_step() {
        let mut f = FullRankRls::new(2, 1.0, 10.0).unwrap();
        let e = f.step(&e1(2), ONE).unwrap();
        assert_eq!(e, ONE);
        assert!((f.w[0] - c(1.0 / 11.0, 0.0)).norm() < 1e-15);
        assert!(f.w[1].norm() == 0.0);
    }

    #[test]
    fn rls_inverse_tracks_direct_inverse() {
        let (m, n, lambda, delta) = (16, 200, 0.998, 10.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut f = FullRankRls::new(m, lambda, delta).unwrap();
        let mut acc = scaled_identity(m, delta);
        for _ in 0..n {
            let r = noise_vector(1.0, m, &mut rng);
            f.step(&r, ONE).unwrap();
            acc = acc * c(lambda, 0.0) + &r * r.adjoint();
        }
        let direct = acc.try_inverse().unwrap();
        let rel = frobenius(&(&f.inverse.p - &direct)) / frobenius(&direct);
        assert!(rel < 1e-6, "rel {rel}");
    }

    #[test]
    fn rls_recovers_least_squares_solution() {
        // λ = 1, tiny regularization, noiseless d = w*^H r.
        let m = 6;
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let truth = noise_vector(1.0, m, &mut rng);
        let mut f = FullRankRls::new(m, 1.0, 1e-12).unwrap();
        for _ in 0..m {
            let r = noise_vector(1.0, m, &mut rng);
            let d = inner(&truth, &r);
            f.step(&r, d).unwrap();
        }
        assert!(
            (&f.w - &truth).norm() < 1e-8 * truth.norm().max(1.0),
            "{}",
            (&f.w - &truth).norm()
        );
    }

    #[test]
    fn rls_rejects_bad_constants() {
        assert!(RlsInverse::new(3, 0.5, 10.0).is_err());
        assert!(RlsInverse::new(3, 0.99, 0.0).is_err());
    }
}
