//! State-space realizations f0(z) = C (zI - A)^{-1} B on the unit disk.

use num_complex::Complex64 as c64;

use crate::error::{Error, Result};
use crate::function::MatrixFunction;
use crate::linalg::{self, CMat};

/// Strict stability margin: spectral radii at or above 1 - this are rejected.
pub const STABILITY_MARGIN: f64 = 1e-12;

/// Default relative tolerance for numerical ranks (sigma_i > tol * sigma_max).
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// rho_omega(lambda) = 1 - lambda * conj(omega); positive at lambda = omega
/// exactly when omega lies inside the disk.
pub fn rho(lambda: c64, omega: c64) -> c64 {
    c64::new(1.0, 0.0) - lambda * omega.conj()
}

/// Reflection lambda -> 1 / conj(lambda) across the unit circle.
pub fn reflect(lambda: c64) -> c64 {
    c64::new(1.0, 0.0) / lambda.conj()
}

/// Stable state-space triple (A, B, C) with A n x n, B n x q, C p x n.
#[derive(Debug, Clone)]
pub struct Realization {
    a: CMat,
    b: CMat,
    c: CMat,
    spectral_radius: f64,
}

/// Controllability/observability diagnostics for a realization.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MinimalityReport {
    pub controllable: bool,
    pub observable: bool,
    pub spectral_radius: f64,
    pub rank_xi: usize,
    pub rank_omega: usize,
}

impl MinimalityReport {
    pub fn is_minimal(&self) -> bool {
        self.controllable && self.observable
    }
}

impl Realization {
    pub fn new(a: CMat, b: CMat, c: CMat) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "A must be square, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if n == 0 {
            return Err(Error::DimensionMismatch(
                "state dimension must be positive".into(),
            ));
        }
        if b.nrows() != n {
            return Err(Error::DimensionMismatch(format!(
                "B has {} rows, expected n = {}",
                b.nrows(),
                n
            )));
        }
        if c.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "C has {} columns, expected n = {}",
                c.ncols(),
                n
            )));
        }
        if b.ncols() == 0 || c.nrows() == 0 {
            return Err(Error::DimensionMismatch(
                "input and output dimensions must be positive".into(),
            ));
        }
        for (name, m) in [("A", &a), ("B", &b), ("C", &c)] {
            if !linalg::all_finite(m) {
                return Err(Error::NonFinite(name.into()));
            }
        }
        let spectral_radius = linalg::spectral_radius(&a)?;
        if spectral_radius >= 1.0 - STABILITY_MARGIN {
            return Err(Error::Unstable {
                rho: spectral_radius,
            });
        }
        Ok(Self {
            a,
            b,
            c,
            spectral_radius,
        })
    }

    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn output_dim(&self) -> usize {
        self.c.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.b.ncols()
    }

    /// (n, p, q).
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.state_dim(), self.output_dim(), self.input_dim())
    }

    pub fn a(&self) -> &CMat {
        &self.a
    }

    pub fn b(&self) -> &CMat {
        &self.b
    }

    pub fn c(&self) -> &CMat {
        &self.c
    }

    pub fn spectral_radius(&self) -> f64 {
        self.spectral_radius
    }

    /// f0(z) = C (zI - A)^{-1} B by a direct linear solve.
    pub fn evaluate(&self, z: c64) -> Result<CMat> {
        let n = self.state_dim();
        let zi_a = linalg::identity(n).mapv(|v| v * z) - &self.a;
        let (rcond, x) = linalg::rcond_solve(&zi_a, &self.b)?;
        let x = x.ok_or(Error::SingularEvaluation { z, rcond })?;
        Ok(self.c.dot(&x))
    }

    /// k-th Markov coefficient C A^{k-1} B (k >= 1), the k-th Fourier
    /// coefficient of f0.
    pub fn markov(&self, k: usize) -> Result<CMat> {
        if k == 0 {
            return Err(Error::InvalidParameter("Markov index starts at 1".into()));
        }
        let mut v = self.b.clone();
        for _ in 1..k {
            v = self.a.dot(&v);
        }
        Ok(self.c.dot(&v))
    }

    /// First `count` Markov coefficients, computed iteratively.
    pub fn markov_sequence(&self, count: usize) -> Vec<CMat> {
        let mut out = Vec::with_capacity(count);
        let mut v = self.b.clone();
        for k in 0..count {
            if k > 0 {
                v = self.a.dot(&v);
            }
            out.push(self.c.dot(&v));
        }
        out
    }

    /// Kalman block matrices Xi = [B AB ... A^{n-1}B] and
    /// Omega = [C; CA; ...; CA^{n-1}].
    pub fn kalman_matrices(&self) -> (CMat, CMat) {
        let (n, p, q) = self.dims();
        let mut xi = linalg::zeros(n, n * q);
        let mut omega = linalg::zeros(n * p, n);
        let mut ab = self.b.clone();
        let mut ca = self.c.clone();
        for k in 0..n {
            xi.slice_mut(ndarray::s![.., k * q..(k + 1) * q])
                .assign(&ab);
            omega
                .slice_mut(ndarray::s![k * p..(k + 1) * p, ..])
                .assign(&ca);
            if k + 1 < n {
                ab = self.a.dot(&ab);
                ca = ca.dot(&self.a);
            }
        }
        (xi, omega)
    }

    pub fn validate(&self) -> Result<MinimalityReport> {
        self.validate_with(DEFAULT_RANK_TOL)
    }

    /// Minimality report with an explicit rank tolerance.
    pub fn validate_with(&self, rank_tol: f64) -> Result<MinimalityReport> {
        let n = self.state_dim();
        let (xi, omega) = self.kalman_matrices();
        let rank_xi = linalg::numerical_rank(&xi, rank_tol)?;
        let rank_omega = linalg::numerical_rank(&omega, rank_tol)?;
        Ok(MinimalityReport {
            controllable: rank_xi == n,
            observable: rank_omega == n,
            spectral_radius: self.spectral_radius,
            rank_xi,
            rank_omega,
        })
    }
}

impl MatrixFunction for Realization {
    fn output_dim(&self) -> usize {
        self.c.nrows()
    }

    fn input_dim(&self) -> usize {
        self.b.ncols()
    }

    fn eval(&self, z: c64) -> Result<CMat> {
        self.evaluate(z)
    }
}
