//! Orchestration of the suboptimal Hankel approximation solve: solvability
//! check, resolvent construction, solution sampling through the linear
//! fractional transformation, and end-to-end certification.

use std::sync::Arc;

use num_complex::Complex64 as c64;

use crate::error::{Error, Result};
use crate::fourier;
use crate::function::MatrixFunction;
use crate::linalg::{self, CMat};
use crate::realization::Realization;
use crate::resolvent::{GammaGeneratingMatrix, ResolventData};
use crate::schur::BlaschkeProduct;
use crate::stein;
use crate::Tolerances;

pub use crate::fourier::{fourier_coefficients, hankel_rank, FourierCoefficients};

/// Solvability report: the problem admits solutions at budget kappa exactly
/// when kappa1 = nu_-(I - PQ) <= kappa.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SolverReport {
    pub kappa: usize,
    pub kappa1: usize,
    pub solvable: bool,
    pub hankel_spectrum: Vec<f64>,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct Diagnostics {
    pub stein_residual_p: f64,
    pub stein_residual_q: f64,
    pub cond_p: f64,
    pub pick_cross_discrepancy: f64,
    pub minimality: crate::realization::MinimalityReport,
    pub tolerances: Tolerances,
}

pub fn check(r: &Realization, kappa: usize, tols: &Tolerances) -> Result<SolverReport> {
    let minimality = r.validate_with(tols.rank)?;
    if !minimality.is_minimal() {
        let n = r.state_dim();
        return Err(Error::NotMinimal {
            rank_xi: minimality.rank_xi,
            rank_omega: minimality.rank_omega,
            n,
        });
    }
    let g = stein::gramians(r)?;
    let spectrum = stein::hankel_spectrum(&g)?;
    let kappa1 = stein::negativity_index_with(&g, tols.inertia)?;
    let pick = stein::pick_matrix(r, &g)?;
    Ok(SolverReport {
        kappa,
        kappa1,
        solvable: kappa1 <= kappa,
        hankel_spectrum: spectrum,
        diagnostics: Diagnostics {
            stein_residual_p: g.residual_p,
            stein_residual_q: g.residual_q,
            cond_p: pick.cond_p,
            pick_cross_discrepancy: pick.cross_discrepancy,
            minimality,
            tolerances: *tols,
        },
    })
}

/// Assembles the resolvent matrix after the solvability gate.
pub fn solve(r: &Realization, kappa: usize, tols: &Tolerances) -> Result<GammaGeneratingMatrix> {
    let report = check(r, kappa, tols)?;
    if !report.solvable {
        return Err(Error::NotSolvable {
            kappa,
            kappa1: report.kappa1,
        });
    }
    let g = stein::gramians(r)?;
    let data = ResolventData::assemble(r, &g, tols)?;
    Ok(GammaGeneratingMatrix::new(data))
}

/// The free parameter of the linear fractional transformation.
///
/// `Constant` is a contraction (sigma_max <= 1) and generates solutions at
/// the minimal budget; `BlaschkeScaled` is value / (scalar product), a
/// rational generalized Schur parameter whose pole count equals the product
/// degree.
#[derive(Debug, Clone)]
pub enum SchurParameter {
    Constant(CMat),
    BlaschkeScaled {
        product: BlaschkeProduct,
        value: CMat,
    },
}

impl SchurParameter {
    pub fn zero(p: usize, q: usize) -> Self {
        Self::Constant(linalg::zeros(p, q))
    }

    pub fn constant(value: CMat) -> Result<Self> {
        let smax = linalg::sigma_max(&value)?;
        if smax > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "constant parameter must be a contraction, sigma_max = {smax:.6}"
            )));
        }
        Ok(Self::Constant(value))
    }

    pub fn blaschke_scaled(poles: &[c64], value: CMat) -> Result<Self> {
        let smax = linalg::sigma_max(&value)?;
        if smax >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "scaled parameter needs a strict contraction, sigma_max = {smax:.6}"
            )));
        }
        let mut product = BlaschkeProduct::identity(1);
        for &pole in poles {
            if pole.norm() >= 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "parameter pole {pole} must lie inside the disk"
                )));
            }
            let dir = ndarray::arr1(&[c64::new(1.0, 0.0)]);
            product.push_front(crate::schur::BpFactor::primary(pole, &dir)?)?;
        }
        Ok(Self::BlaschkeScaled { product, value })
    }

    /// (rows, cols) of the parameter values.
    pub fn dims(&self) -> (usize, usize) {
        match self {
            Self::Constant(v) => (v.nrows(), v.ncols()),
            Self::BlaschkeScaled { value, .. } => (value.nrows(), value.ncols()),
        }
    }

    /// Number of interior poles the parameter contributes.
    pub fn pole_budget(&self) -> usize {
        match self {
            Self::Constant(_) => 0,
            Self::BlaschkeScaled { product, .. } => product.degree(),
        }
    }

    pub fn evaluate(&self, mu: c64) -> Result<CMat> {
        match self {
            Self::Constant(v) => Ok(v.clone()),
            Self::BlaschkeScaled { product, value } => {
                let d = product.evaluate(mu)?[(0, 0)];
                if d.norm() < 1e-280 {
                    return Err(Error::SingularEvaluation { z: mu, rcond: 0.0 });
                }
                Ok(value.mapv(|v| v / d))
            }
        }
    }
}

/// A solution f = (a11 eps + a12)(a21 eps + a22)^{-1}, evaluable pointwise.
#[derive(Clone)]
pub struct SolutionHandle {
    gamma: Arc<GammaGeneratingMatrix>,
    epsilon: SchurParameter,
    /// Probe-grid indices where the denominator was singular; solutions are
    /// boundary functions defined a.e., so these are reported, not hidden.
    flagged_probe_points: Vec<usize>,
}

const PROBE_GRID: usize = 64;

/// Builds the evaluator after checking dimensions and probing the
/// denominator on a coarse circle grid; more than 10% singular probe points
/// rejects the parameter.
pub fn sample_solution(
    gamma: &Arc<GammaGeneratingMatrix>,
    epsilon: SchurParameter,
) -> Result<SolutionHandle> {
    let (p, q) = gamma.block_dims();
    let (ep, eq) = epsilon.dims();
    if (ep, eq) != (p, q) {
        return Err(Error::DimensionMismatch(format!(
            "parameter is {ep}x{eq}, resolvent blocks need {p}x{q}"
        )));
    }
    let handle = SolutionHandle {
        gamma: Arc::clone(gamma),
        epsilon,
        flagged_probe_points: Vec::new(),
    };
    let mut flagged = Vec::new();
    for (idx, mu) in fourier::unit_circle(PROBE_GRID).into_iter().enumerate() {
        if handle.evaluate(mu).is_err() {
            flagged.push(idx);
        }
    }
    if flagged.len() * 10 > PROBE_GRID {
        return Err(Error::DenominatorSingularEverywhere {
            failed: flagged.len(),
            total: PROBE_GRID,
        });
    }
    Ok(SolutionHandle {
        flagged_probe_points: flagged,
        ..handle
    })
}

impl SolutionHandle {
    pub fn gamma(&self) -> &GammaGeneratingMatrix {
        &self.gamma
    }

    pub fn epsilon(&self) -> &SchurParameter {
        &self.epsilon
    }

    pub fn flagged_probe_points(&self) -> &[usize] {
        &self.flagged_probe_points
    }

    pub fn evaluate(&self, mu: c64) -> Result<CMat> {
        let b = self.gamma.blocks(mu)?;
        let e = self.epsilon.evaluate(mu)?;
        let numer = b.a11.dot(&e) + &b.a12;
        let denom = b.a21.dot(&e) + &b.a22;
        // A vanishing denominator block must be flagged even when it is
        // well-conditioned in isolation; the resolvent value sets the scale.
        let scale =
            (linalg::fro_norm(&b.a21) + linalg::fro_norm(&b.a22)) * linalg::fro_norm(&e).max(1.0);
        let (rc, f) = linalg::rcond_solve_right_scaled(&numer, &denom, scale)?;
        f.ok_or(Error::BlockSingular { mu, rcond: rc })
    }
}

impl MatrixFunction for SolutionHandle {
    fn output_dim(&self) -> usize {
        self.gamma.block_dims().0
    }

    fn input_dim(&self) -> usize {
        self.gamma.block_dims().1
    }

    fn eval(&self, z: c64) -> Result<CMat> {
        self.evaluate(z)
    }
}

/// Block-Hankel matrix of a coefficient sequence; block (i, j) = gamma_{i+j+1}.
#[derive(Debug, Clone)]
pub struct HankelMatrix {
    coeffs: Vec<CMat>,
    p: usize,
    q: usize,
}

impl HankelMatrix {
    pub fn from_coefficients(coeffs: Vec<CMat>) -> Result<Self> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty coefficient list".into()))?;
        let (p, q) = (first.nrows(), first.ncols());
        for (k, c) in coeffs.iter().enumerate() {
            if c.nrows() != p || c.ncols() != q {
                return Err(Error::DimensionMismatch(format!(
                    "coefficient {k} is {}x{}, expected {p}x{q}",
                    c.nrows(),
                    c.ncols()
                )));
            }
        }
        Ok(Self { coeffs, p, q })
    }

    pub fn coefficients(&self) -> &[CMat] {
        &self.coeffs
    }

    pub fn block_dims(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn assemble(&self) -> CMat {
        fourier::block_hankel(&self.coeffs)
    }

    pub fn singular_values(&self) -> Result<Vec<f64>> {
        fourier::hankel_singular_values(&self.coeffs)
    }

    pub fn rank(&self, rel_tol: f64) -> Result<usize> {
        fourier::hankel_rank(&self.coeffs, rel_tol)
    }
}

/// nu_-(I - H*H) for the assembled truncated Hankel matrix H.
///
/// The eigenvalues of I - H*H are 1 - sigma_i(H)^2 padded with ones, so the
/// count comes straight from the singular values of H.
pub fn truncated_hankel_negativity(coeffs: &[CMat], band_tol: f64) -> Result<usize> {
    let sv = fourier::hankel_singular_values(coeffs)?;
    let scale = sv.first().map(|s| s * s).unwrap_or(0.0);
    let band = band_tol * (1.0 + scale);
    for s in &sv {
        if (1.0 - s * s).abs() <= band {
            return Err(Error::BoundaryDegenerate {
                eigenvalue: 1.0 - s * s,
                band,
            });
        }
    }
    Ok(sv.iter().filter(|&&s| 1.0 - s * s < -band).count())
}

/// End-to-end certificate for one solution handle (or any injected
/// boundary evaluator).
#[derive(Debug, Clone, serde::Serialize)]
pub struct VerifyReport {
    pub kappa: usize,
    pub sup_norm: f64,
    pub hankel_rank: usize,
    pub pass: bool,
    /// Leading singular values of the difference Hankel matrix.
    pub difference_hankel_spectrum: Vec<f64>,
    /// Scale the rank decision was made against (max of the difference and
    /// problem Hankel norms).
    pub hankel_scale: f64,
    /// sigma_max(f) per circle grid point.
    pub sigma_max_grid: Vec<f64>,
    pub grid: usize,
    pub coefficient_count: usize,
    /// Aliasing estimate from the coefficient tail.
    pub tail_norm: f64,
    /// Grid indices where evaluation needed radial perturbation.
    pub perturbed_points: Vec<usize>,
    pub sup_tolerance: f64,
    pub tolerances: Tolerances,
}

pub const SUP_NORM_SLACK: f64 = 1e-7;

/// Checks ||f||_inf <= 1 on the circle grid and
/// rank(Hankel(gamma(f) - gamma(f0))) <= kappa.
pub fn verify_solution(
    f: &dyn MatrixFunction,
    r: &Realization,
    kappa: usize,
    tols: &Tolerances,
    grid: usize,
    coefficient_count: usize,
) -> Result<VerifyReport> {
    if grid == 0 || coefficient_count == 0 {
        return Err(Error::InvalidParameter(
            "verification needs a positive grid and coefficient count".into(),
        ));
    }
    let (p, q) = (r.output_dim(), r.input_dim());
    if f.output_dim() != p || f.input_dim() != q {
        return Err(Error::DimensionMismatch(format!(
            "solution is {}x{}, problem is {p}x{q}",
            f.output_dim(),
            f.input_dim()
        )));
    }
    let samples = fourier::sample_on_circle(f, grid)?;
    let mut sigma_max_grid = Vec::with_capacity(grid);
    let mut sup_norm = 0.0f64;
    for v in &samples.values {
        let s = linalg::sigma_max(v)?;
        sigma_max_grid.push(s);
        sup_norm = sup_norm.max(s);
    }

    let n_four = (4 * coefficient_count).next_power_of_two().max(256);
    let fc = fourier::fourier_coefficients(f, n_four, coefficient_count)?;
    let f0_coeffs = r.markov_sequence(coefficient_count);
    let diff: Vec<CMat> = fc
        .coeffs
        .iter()
        .zip(&f0_coeffs)
        .map(|(a, b)| a - b)
        .collect();
    let hankel = HankelMatrix::from_coefficients(diff)?;
    let spectrum = hankel.singular_values()?;
    // Rank relative to the problem scale, not the difference's own top
    // singular value: a numerically-zero difference must read as rank 0.
    let f0_scale = fourier::hankel_singular_values(&f0_coeffs)?
        .first()
        .copied()
        .unwrap_or(0.0);
    let scale = spectrum.first().copied().unwrap_or(0.0).max(f0_scale);
    let rank = spectrum
        .iter()
        .filter(|&&s| s > tols.hankel_rank * scale)
        .count();

    let pass = sup_norm <= 1.0 + SUP_NORM_SLACK && rank <= kappa;
    let mut perturbed = samples.perturbed;
    for idx in fc.perturbed {
        if !perturbed.contains(&idx) {
            perturbed.push(idx);
        }
    }
    Ok(VerifyReport {
        kappa,
        sup_norm,
        hankel_rank: rank,
        pass,
        difference_hankel_spectrum: spectrum.into_iter().take(16).collect(),
        hankel_scale: scale,
        sigma_max_grid,
        grid,
        coefficient_count,
        tail_norm: fc.tail_norm,
        perturbed_points: perturbed,
        sup_tolerance: SUP_NORM_SLACK,
        tolerances: *tols,
    })
}
