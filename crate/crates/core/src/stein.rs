//! Lyapunov-Stein equations, gramians, Hankel spectrum, and the Pick matrix.
//!
//! Both equations are solved by squared-iterate doubling, which converges
//! quadratically for any strictly stable A and needs no Schur form:
//! X_{k+1} = X_k + A_k X_k A_k^*, A_{k+1} = A_k^2.

use num_complex::Complex64 as c64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::realization::Realization;

/// Which side the adjoint sits on.
///
/// `Forward` solves X - A X A* = R, `Adjoint` solves X - A* X A = R.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Forward,
    Adjoint,
}

#[derive(Debug, Clone)]
pub struct SteinSolution {
    pub x: CMat,
    pub residual: f64,
    pub iterations: usize,
}

const DOUBLING_CAP: usize = 60;
const UPDATE_TOL: f64 = 1e-14;
const RESIDUAL_TOL: f64 = 1e-10;

/// Default scale factor for the inertia boundary band.
pub const DEFAULT_INERTIA_TOL: f64 = 1e-9;

/// Condition-number ceiling for inverting the controllability gramian.
pub const COND_LIMIT: f64 = 1e12;

pub fn solve_stein(a: &CMat, r: &CMat, orientation: Orientation) -> Result<SteinSolution> {
    let n = a.nrows();
    linalg::expect_shape(r, n, n, "R")?;
    if a.ncols() != n {
        return Err(Error::DimensionMismatch("A must be square".into()));
    }
    let rho = linalg::spectral_radius(a)?;
    if rho >= 1.0 {
        return Err(Error::Unstable { rho });
    }
    let mut x = linalg::hermitize(r);
    let mut s = a.clone();
    let mut iterations = 0;
    for _ in 0..DOUBLING_CAP {
        iterations += 1;
        let update = match orientation {
            Orientation::Forward => s.dot(&x).dot(&linalg::adjoint(&s)),
            Orientation::Adjoint => linalg::adjoint(&s).dot(&x).dot(&s),
        };
        let unorm = linalg::fro_norm(&update);
        x += &update;
        if unorm < UPDATE_TOL * linalg::fro_norm(&x).max(1.0) {
            break;
        }
        s = s.dot(&s);
    }
    x = linalg::hermitize(&x);
    let reconstructed = match orientation {
        Orientation::Forward => &x - &a.dot(&x).dot(&linalg::adjoint(a)),
        Orientation::Adjoint => &x - &linalg::adjoint(a).dot(&x).dot(a),
    };
    let residual = linalg::fro_norm(&(&reconstructed - r));
    if residual > RESIDUAL_TOL * linalg::fro_norm(&x).max(1.0) {
        return Err(Error::NotConvergent {
            residual,
            iterations,
        });
    }
    Ok(SteinSolution {
        x,
        residual,
        iterations,
    })
}

/// Controllability gramian P (P - APA* = BB*) and observability gramian Q
/// (Q - A*QA = C*C), with residual certificates.
#[derive(Debug, Clone)]
pub struct GramianPair {
    pub p: CMat,
    pub q: CMat,
    pub residual_p: f64,
    pub residual_q: f64,
}

pub fn gramians(r: &Realization) -> Result<GramianPair> {
    let bb = r.b().dot(&linalg::adjoint(r.b()));
    let cc = linalg::adjoint(r.c()).dot(r.c());
    let sp = solve_stein(r.a(), &bb, Orientation::Forward)?;
    let sq = solve_stein(r.a(), &cc, Orientation::Adjoint)?;
    Ok(GramianPair {
        p: sp.x,
        q: sq.x,
        residual_p: sp.residual,
        residual_q: sq.residual,
    })
}

/// Hermitian square-root sandwich P^(1/2) Q P^(1/2); the workhorse behind
/// the Hankel spectrum and the negativity index.
fn gramian_sandwich(g: &GramianPair) -> Result<CMat> {
    let tol_p = indefiniteness_tol(&g.p)?;
    let (vals_p, vecs_p) = linalg::eigh_hermitian(&g.p)?;
    if let Some(&lo) = vals_p
        .iter()
        .filter(|&&v| v < -tol_p)
        .min_by(|x, y| x.partial_cmp(y).unwrap())
    {
        return Err(Error::IndefiniteGramian {
            eigenvalue: lo,
            tol: tol_p,
        });
    }
    let tol_q = indefiniteness_tol(&g.q)?;
    let (vals_q, _) = linalg::eigh_hermitian(&g.q)?;
    if let Some(&lo) = vals_q
        .iter()
        .filter(|&&v| v < -tol_q)
        .min_by(|x, y| x.partial_cmp(y).unwrap())
    {
        return Err(Error::IndefiniteGramian {
            eigenvalue: lo,
            tol: tol_q,
        });
    }
    let root = linalg::hermitian_map(&vals_p, &vecs_p, |v| v.max(0.0).sqrt());
    Ok(linalg::hermitize(&root.dot(&g.q).dot(&root)))
}

fn indefiniteness_tol(m: &CMat) -> Result<f64> {
    let (vals, _) = linalg::eigh_hermitian(m)?;
    let scale = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    Ok(1e-10 * (1.0 + scale))
}

/// Hankel singular values sqrt(lambda_i(PQ)), descending.
pub fn hankel_spectrum(g: &GramianPair) -> Result<Vec<f64>> {
    let w = gramian_sandwich(g)?;
    let (vals, _) = linalg::eigh_hermitian(&w)?;
    let mut sigma: Vec<f64> = vals.iter().map(|&v| v.max(0.0).sqrt()).collect();
    sigma.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(sigma)
}

pub fn negativity_index(g: &GramianPair) -> Result<usize> {
    negativity_index_with(g, DEFAULT_INERTIA_TOL)
}

/// nu_-(I - PQ) via the congruent Hermitian form I - P^(1/2) Q P^(1/2).
///
/// Eigenvalues inside the band tol * (1 + ||PQ||) around zero mean the
/// problem data violates 1 not in sigma(PQ) and are rejected.
pub fn negativity_index_with(g: &GramianPair, inertia_tol: f64) -> Result<usize> {
    let w = gramian_sandwich(g)?;
    let (vals, _) = linalg::eigh_hermitian(&w)?;
    let scale = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let band = inertia_tol * (1.0 + scale);
    let shifted: Vec<f64> = vals.iter().map(|&v| 1.0 - v).collect();
    if let Some(&inside) = shifted.iter().find(|v| v.abs() <= band) {
        return Err(Error::BoundaryDegenerate {
            eigenvalue: inside,
            band,
        });
    }
    Ok(shifted.iter().filter(|&&v| v < -band).count())
}

/// Pick matrix data for the reduced one-sided interpolation problem.
#[derive(Debug, Clone)]
pub struct PickData {
    /// P^{-1} - Q, from the closed form.
    pub p_tilde: CMat,
    /// Stacked interpolation directions [C; B*(I-A*)^{-1} P^{-1} (I-A)].
    pub c_tilde: CMat,
    pub kappa1: usize,
    /// Frobenius distance between the Stein-equation route and the closed
    /// form.
    pub cross_discrepancy: f64,
    /// Condition number of P.
    pub cond_p: f64,
}

/// Builds the Pick matrix both by solving the sign-adjusted adjoint Stein
/// equation with C-tilde and by the closed form P^{-1} - Q, and cross-checks
/// the two routes.
pub fn pick_matrix(r: &Realization, g: &GramianPair) -> Result<PickData> {
    let (n, p, q) = r.dims();
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
    let p_inv = linalg::hermitian_map(&vals_p, &vecs_p, |v| 1.0 / v);

    let eye = linalg::identity(n);
    let i_minus_a = &eye - r.a();
    let i_minus_astar = &eye - &linalg::adjoint(r.a());
    // B* (I-A*)^{-1} P^{-1} (I-A)
    let (rc, sol) = linalg::rcond_solve(&i_minus_astar, &p_inv.dot(&i_minus_a))?;
    let sol = sol.ok_or(Error::SingularEvaluation {
        z: c64::new(1.0, 0.0),
        rcond: rc,
    })?;
    let second = linalg::adjoint(r.b()).dot(&sol);

    let mut c_tilde = linalg::zeros(p + q, n);
    c_tilde.slice_mut(ndarray::s![..p, ..]).assign(r.c());
    c_tilde.slice_mut(ndarray::s![p.., ..]).assign(&second);

    // A* X A - X = Ct* j Ct  <=>  X - A* X A = -Ct* j Ct
    let j = linalg::signature_matrix(p, q);
    let rhs = linalg::adjoint(&c_tilde).dot(&j).dot(&c_tilde);
    let stein_route = solve_stein(r.a(), &rhs.mapv(|v| -v), Orientation::Adjoint)?;

    let closed = linalg::hermitize(&(&p_inv - &g.q));
    let cross_discrepancy = linalg::fro_norm(&(&stein_route.x - &closed));
    let allowed = 1e-8 * linalg::fro_norm(&closed);
    if cross_discrepancy > allowed {
        return Err(Error::CrossCheckFailure {
            difference: cross_discrepancy,
            allowed,
        });
    }

    let (vals_t, _) = linalg::eigh_hermitian(&closed)?;
    let scale = vals_t.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let band = DEFAULT_INERTIA_TOL * (1.0 + scale);
    let (kappa1, _, _) = linalg::inertia_counts(&vals_t, band);

    Ok(PickData {
        p_tilde: closed,
        c_tilde,
        kappa1,
        cross_discrepancy,
        cond_p,
    })
}
