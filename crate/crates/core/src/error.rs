use num_complex::Complex64 as c64;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix contains non-finite entries: {0}")]
    NonFinite(String),

    #[error("state matrix is not strictly stable: spectral radius {rho:.15e}")]
    Unstable { rho: f64 },

    #[error(
        "realization is not minimal: rank(Xi) = {rank_xi}, rank(Omega) = {rank_omega}, n = {n}"
    )]
    NotMinimal {
        rank_xi: usize,
        rank_omega: usize,
        n: usize,
    },

    #[error("evaluation is numerically singular at z = {z} (rcond {rcond:.3e})")]
    SingularEvaluation { z: c64, rcond: f64 },

    #[error("Stein iteration stalled: residual {residual:.3e} after {iterations} doublings")]
    NotConvergent { residual: f64, iterations: usize },

    #[error("gramian has a negative eigenvalue {eigenvalue:.3e} (tolerance {tol:.3e})")]
    IndefiniteGramian { eigenvalue: f64, tol: f64 },

    #[error(
        "spectrum of PQ touches 1: eigenvalue {eigenvalue:.3e} of I - P^(1/2) Q P^(1/2) lies inside \
         the inertia band {band:.3e}"
    )]
    BoundaryDegenerate { eigenvalue: f64, band: f64 },

    #[error(
        "Pick matrix cross-check failed: routes differ by {difference:.3e} (allowed {allowed:.3e})"
    )]
    CrossCheckFailure { difference: f64, allowed: f64 },

    #[error("matrix is too ill-conditioned: cond = {cond:.3e} exceeds {limit:.1e}")]
    IllConditioned { cond: f64, limit: f64 },

    #[error("function is not contractive on the circle grid: max sigma = {sup:.6e}")]
    NotSchurOnCircle { sup: f64 },

    #[error("pole at {pole} not cancelled after {factors} factors (leading coefficient norm {norm:.3e})")]
    PoleNotCancelled {
        pole: c64,
        factors: usize,
        norm: f64,
    },

    #[error("contour radius {radius:.3e} at {center} is unreliable: halving it moved coefficients by {change:.3e}")]
    RadiusTooLarge {
        center: c64,
        radius: f64,
        change: f64,
    },

    #[error("matrix block is singular at mu = {mu} (rcond {rcond:.3e})")]
    BlockSingular { mu: c64, rcond: f64 },

    #[error("point is off the unit circle by {defect:.3e}")]
    NotOnCircle { defect: f64 },

    #[error("winding grid too coarse: phase step {step:.4} rad exceeds pi/2")]
    GridTooCoarse { step: f64 },

    #[error("kernel evaluation failed at {point}: point must lie strictly inside the disk and off the poles")]
    EvaluationAtPole { point: c64 },

    #[error("problem not solvable at budget kappa = {kappa}: negativity index kappa1 = {kappa1}")]
    NotSolvable { kappa: usize, kappa1: usize },

    #[error("a21*eps + a22 is singular on {failed} of {total} probe points")]
    DenominatorSingularEverywhere { failed: usize, total: usize },

    #[error("circle grid evaluation failed at {failures} points even after radial perturbation")]
    GridSingular { failures: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{0}")]
    Format(String),

    #[error("linear algebra backend failure: {0}")]
    Backend(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Backend(e.to_string())
    }
}
