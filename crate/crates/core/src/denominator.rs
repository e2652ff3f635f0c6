//! The inner denominator b2 of f0 and the analytic interpolant K = f0 b2.
//!
//! b2(z)      = I_q - (1-z) B* (I - zA*)^{-1} P^{-1} (I - A)^{-1} B
//! b2(z)^{-1} = I_q + (1-z) B* (I - A*)^{-1} P^{-1} (zI - A)^{-1} B
//!
//! K is never formed as the literal product f0 b2: the intertwining identity
//! (zI - A)^{-1} B b2(z) = P (I - A*) (I - zA*)^{-1} P^{-1} (I - A)^{-1} B
//! moves the evaluation to the right-hand side, so the poles of f0 inside
//! the disk cancel and K is evaluable on the whole closed disk.

use num_complex::Complex64 as c64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::realization::Realization;
use crate::stein::{GramianPair, COND_LIMIT};

#[derive(Debug, Clone)]
pub struct Denominator {
    realization: Realization,
    p: CMat,
    /// P^{-1} (I - A)^{-1} B; right-hand cache of both closed forms.
    v: CMat,
    /// B* (I - A*)^{-1} P^{-1}; left-hand cache of the inverse form.
    w: CMat,
    /// C P (I - A*); left factor of the pole-cancelling K formula.
    u: CMat,
    pub cond_p: f64,
}

impl Denominator {
    pub fn new(r: &Realization, g: &GramianPair) -> Result<Self> {
        let n = r.state_dim();
        let (vals_p, vecs_p) = linalg::eigh_hermitian(&g.p)?;
        let lo = vals_p.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals_p.iter().cloned().fold(0.0, f64::max);
        let cond_p = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        if !(cond_p.is_finite() && cond_p < COND_LIMIT) {
            return Err(Error::IllConditioned {
                cond: cond_p,
                limit: COND_LIMIT,
            });
        }
        let p_inv = linalg::hermitian_map(&vals_p, &vecs_p, |x| 1.0 / x);
        let eye = linalg::identity(n);
        let i_minus_a = &eye - r.a();
        let i_minus_astar = &eye - &linalg::adjoint(r.a());

        let (rc, iab) = linalg::rcond_solve(&i_minus_a, r.b())?;
        let iab = iab.ok_or(Error::SingularEvaluation {
            z: c64::new(1.0, 0.0),
            rcond: rc,
        })?;
        let v = p_inv.dot(&iab);

        let (rc2, ia_star_inv_pinv) = linalg::rcond_solve(&i_minus_astar, &p_inv)?;
        let ia_star_inv_pinv = ia_star_inv_pinv.ok_or(Error::SingularEvaluation {
            z: c64::new(1.0, 0.0),
            rcond: rc2,
        })?;
        let w = linalg::adjoint(r.b()).dot(&ia_star_inv_pinv);

        let u = r.c().dot(&g.p).dot(&i_minus_astar);

        Ok(Self {
            realization: r.clone(),
            p: g.p.clone(),
            v,
            w,
            u,
            cond_p,
        })
    }

    pub fn realization(&self) -> &Realization {
        &self.realization
    }

    /// (I - zA*)^{-1} v.
    fn conjugate_resolvent_apply(&self, z: c64) -> Result<CMat> {
        let n = self.realization.state_dim();
        let m = linalg::identity(n) - linalg::adjoint(self.realization.a()).mapv(|x| x * z);
        let (rcond, sol) = linalg::rcond_solve(&m, &self.v)?;
        sol.ok_or(Error::SingularEvaluation { z, rcond })
    }

    /// b2(z) (direct form) or b2(z)^{-1} (its own closed form; never obtained
    /// by inverting the other).
    pub fn b2_evaluate(&self, z: c64, inverse: bool) -> Result<CMat> {
        let r = &self.realization;
        let q = r.input_dim();
        let one = c64::new(1.0, 0.0);
        if inverse {
            let n = r.state_dim();
            let m = linalg::identity(n).mapv(|x| x * z) - r.a();
            let (rcond, sol) = linalg::rcond_solve(&m, r.b())?;
            let sol = sol.ok_or(Error::SingularEvaluation { z, rcond })?;
            let correction = self.w.dot(&sol).mapv(|x| x * (one - z));
            Ok(linalg::identity(q) + &correction)
        } else {
            let sol = self.conjugate_resolvent_apply(z)?;
            let correction = linalg::adjoint(r.b()).dot(&sol).mapv(|x| x * (one - z));
            Ok(linalg::identity(q) - &correction)
        }
    }

    /// K(z) = f0(z) b2(z) through the pole-cancelling identity; finite even
    /// at the eigenvalues of A.
    pub fn k_evaluate(&self, z: c64) -> Result<CMat> {
        let sol = self.conjugate_resolvent_apply(z)?;
        Ok(self.u.dot(&sol))
    }

    /// Frobenius defect between the two sides of the intertwining identity
    /// at z; a self-test that should sit at roundoff level.
    pub fn intertwining_defect(&self, z: c64) -> Result<f64> {
        let r = &self.realization;
        let n = r.state_dim();
        let m = linalg::identity(n).mapv(|x| x * z) - r.a();
        let (rcond, sol) = linalg::rcond_solve(&m, r.b())?;
        let sol = sol.ok_or(Error::SingularEvaluation { z, rcond })?;
        let lhs = sol.dot(&self.b2_evaluate(z, false)?);

        let eye = linalg::identity(n);
        let i_minus_astar = &eye - &linalg::adjoint(r.a());
        let rhs = self
            .p
            .dot(&i_minus_astar)
            .dot(&self.conjugate_resolvent_apply(z)?);
        Ok(linalg::fro_norm(&(&lhs - &rhs)))
    }
}
