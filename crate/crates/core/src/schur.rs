//! Blaschke-Potapov products, Krein-Langer factorization, pole multiplicity,
//! the Potapov-Ginzburg transform, and sampled negative-squares bounds.

use std::sync::Arc;

use num_complex::Complex64 as c64;

use crate::error::{Error, Result};
use crate::fourier;
use crate::function::{FnMatrix, MatrixFunction};
use crate::linalg::{self, CMat, CVec};
use crate::realization::rho;

/// Scalar Blaschke factor b_alpha(lambda) = (lambda - alpha)/(1 - lambda conj(alpha)).
pub fn blaschke_scalar(alpha: c64, lambda: c64) -> Result<c64> {
    let den = c64::new(1.0, 0.0) - lambda * alpha.conj();
    if den.norm() < 1e-300 {
        return Err(Error::SingularEvaluation {
            z: lambda,
            rcond: 0.0,
        });
    }
    Ok((lambda - alpha) / den)
}

/// Elementary Blaschke-Potapov factor I - P + b_alpha(lambda) P with an
/// orthogonal projector P.
#[derive(Debug, Clone)]
pub struct BpFactor {
    alpha: c64,
    projector: CMat,
    rank: usize,
}

impl BpFactor {
    pub fn new(alpha: c64, projector: CMat) -> Result<Self> {
        if alpha.norm() >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "Blaschke zero {alpha} must lie inside the disk"
            )));
        }
        if projector.nrows() != projector.ncols() {
            return Err(Error::DimensionMismatch("projector must be square".into()));
        }
        let herm = linalg::fro_norm(&(&projector - &linalg::adjoint(&projector)));
        let idem = linalg::fro_norm(&(&projector.dot(&projector) - &projector));
        if herm > 1e-10 || idem > 1e-10 {
            return Err(Error::InvalidParameter(
                "projector must be Hermitian and idempotent".into(),
            ));
        }
        let rank = projector.diag().iter().map(|v| v.re).sum::<f64>().round() as usize;
        if rank == 0 {
            return Err(Error::InvalidParameter("projector must be nonzero".into()));
        }
        Ok(Self {
            alpha,
            projector,
            rank,
        })
    }

    /// Rank-one factor projecting onto `direction`.
    pub fn primary(alpha: c64, direction: &CVec) -> Result<Self> {
        let norm_sq: f64 = direction.iter().map(|v| v.norm_sqr()).sum();
        if norm_sq <= 0.0 {
            return Err(Error::InvalidParameter(
                "projector direction is zero".into(),
            ));
        }
        let dim = direction.len();
        let mut proj = linalg::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                proj[(i, j)] = direction[i] * direction[j].conj() / c64::new(norm_sq, 0.0);
            }
        }
        Self::new(alpha, proj)
    }

    pub fn alpha(&self) -> c64 {
        self.alpha
    }

    pub fn projector(&self) -> &CMat {
        &self.projector
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.projector.nrows()
    }

    pub fn evaluate(&self, lambda: c64) -> Result<CMat> {
        let b = blaschke_scalar(self.alpha, lambda)?;
        let eye = linalg::identity(self.dim());
        Ok(&eye - &self.projector + &self.projector.mapv(|v| v * b))
    }

    /// (I - P + b P)^{-1} = I - P + b^{-1} P; singular at lambda = alpha.
    pub fn evaluate_inverse(&self, lambda: c64) -> Result<CMat> {
        let b = blaschke_scalar(self.alpha, lambda)?;
        if b.norm() < 1e-300 {
            return Err(Error::SingularEvaluation {
                z: lambda,
                rcond: 0.0,
            });
        }
        let eye = linalg::identity(self.dim());
        Ok(&eye - &self.projector + &self.projector.mapv(|v| v / b))
    }
}

/// Ordered product of elementary factors; the value is
/// `factors[0](lambda) * factors[1](lambda) * ...`
#[derive(Debug, Clone)]
pub struct BlaschkeProduct {
    dim: usize,
    factors: Vec<BpFactor>,
}

impl BlaschkeProduct {
    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            factors: Vec::new(),
        }
    }

    pub fn from_factors(dim: usize, factors: Vec<BpFactor>) -> Result<Self> {
        for f in &factors {
            if f.dim() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "factor dimension {} does not match product dimension {dim}",
                    f.dim()
                )));
            }
        }
        Ok(Self { dim, factors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn factors(&self) -> &[BpFactor] {
        &self.factors
    }

    /// Total projector rank.
    pub fn degree(&self) -> usize {
        self.factors.iter().map(|f| f.rank()).sum()
    }

    /// Prepends a factor (applied last on the left).
    pub fn push_front(&mut self, factor: BpFactor) -> Result<()> {
        if factor.dim() != self.dim {
            return Err(Error::DimensionMismatch("factor dimension mismatch".into()));
        }
        self.factors.insert(0, factor);
        Ok(())
    }

    pub fn evaluate(&self, lambda: c64) -> Result<CMat> {
        let mut out = linalg::identity(self.dim);
        for f in &self.factors {
            out = out.dot(&f.evaluate(lambda)?);
        }
        Ok(out)
    }

    /// Inverse value; poles at the factor zeros.
    pub fn evaluate_inverse(&self, lambda: c64) -> Result<CMat> {
        let mut out = linalg::identity(self.dim);
        for f in self.factors.iter().rev() {
            out = out.dot(&f.evaluate_inverse(lambda)?);
        }
        Ok(out)
    }
}

impl MatrixFunction for BlaschkeProduct {
    fn output_dim(&self) -> usize {
        self.dim
    }

    fn input_dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, z: c64) -> Result<CMat> {
        self.evaluate(z)
    }
}

/// Principal part of a Laurent expansion around a pole.
#[derive(Debug, Clone)]
pub struct LaurentExpansion {
    /// `coeffs[j]` = phi_{-(j+1)}, i.e. `[phi_-1, phi_-2, ...]`.
    pub coeffs: Vec<CMat>,
    /// Max value norm seen on the contour; the natural scale for
    /// cancellation decisions.
    pub contour_sup: f64,
    pub radius: f64,
}

const CONTOUR_POINTS_START: usize = 256;
const CONTOUR_POINTS_CAP: usize = 4096;
const CONTOUR_STABLE_TOL: f64 = 1e-10;

fn contour_coefficients(
    f: &dyn MatrixFunction,
    center: c64,
    depth: usize,
    radius: f64,
    points: usize,
) -> Result<(Vec<CMat>, f64)> {
    let (p, q) = (f.output_dim(), f.input_dim());
    let mut coeffs = vec![linalg::zeros(p, q); depth];
    let mut sup = 0.0f64;
    let mut samples = Vec::with_capacity(points);
    for m in 0..points {
        let theta = 2.0 * std::f64::consts::PI * m as f64 / points as f64;
        let z = center + c64::from_polar(radius, theta);
        let v = f.eval(z)?;
        sup = sup.max(linalg::fro_norm(&v));
        samples.push((theta, v));
    }
    // phi_{-j} = (r^j / N) sum_m f(center + r e^{i theta_m}) e^{i j theta_m}
    for j in 1..=depth {
        let rj = radius.powi(j as i32);
        let mut acc = linalg::zeros(p, q);
        for (theta, v) in &samples {
            let w = c64::from_polar(1.0, j as f64 * theta);
            acc = acc + v.mapv(|x| x * w);
        }
        coeffs[j - 1] = acc.mapv(|x| x * c64::new(rj / points as f64, 0.0));
    }
    Ok((coeffs, sup))
}

fn stable_contour(
    f: &dyn MatrixFunction,
    center: c64,
    depth: usize,
    radius: f64,
) -> Result<(Vec<CMat>, f64)> {
    let mut points = CONTOUR_POINTS_START;
    let (mut coeffs, mut sup) = contour_coefficients(f, center, depth, radius, points)?;
    while points < CONTOUR_POINTS_CAP {
        points *= 2;
        let (next, nsup) = contour_coefficients(f, center, depth, radius, points)?;
        let scale = 1.0f64.max(sup);
        let change = coeffs
            .iter()
            .zip(&next)
            .map(|(a, b)| linalg::fro_norm(&(a - b)))
            .fold(0.0, f64::max);
        coeffs = next;
        sup = nsup;
        if change <= CONTOUR_STABLE_TOL * scale {
            break;
        }
    }
    Ok((coeffs, sup))
}

/// Principal-part coefficients phi_{-1}..phi_{-depth} of `f` at `center` by
/// trapezoid contour integration on |z - center| = radius.
///
/// The point count is doubled until the result stabilizes, and the whole
/// computation is repeated at radius/2: a disagreement means the contour
/// encloses foreign singularities and raises `RadiusTooLarge`.
pub fn laurent_coefficients(
    f: &dyn MatrixFunction,
    center: c64,
    depth: usize,
    radius: f64,
) -> Result<LaurentExpansion> {
    if depth == 0 {
        return Err(Error::InvalidParameter(
            "Laurent depth must be positive".into(),
        ));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidParameter(
            "contour radius must be positive".into(),
        ));
    }
    let (coeffs, sup) = stable_contour(f, center, depth, radius)?;
    let (half, half_sup) = stable_contour(f, center, depth, radius / 2.0)?;
    let scale = 1.0f64.max(sup.min(half_sup));
    let change = coeffs
        .iter()
        .zip(&half)
        .map(|(a, b)| linalg::fro_norm(&(a - b)))
        .fold(0.0, f64::max);
    if !change.is_finite() || change > 1e-7 * scale {
        return Err(Error::RadiusTooLarge {
            center,
            radius,
            change,
        });
    }
    Ok(LaurentExpansion {
        coeffs: half,
        contour_sup: sup,
        radius,
    })
}

const MAX_POLE_ORDER: usize = 8;

/// Pole multiplicity of `f` at `center`: the rank of the lower-triangular
/// block-Toeplitz matrix built from the principal part.
pub fn pole_multiplicity(f: &dyn MatrixFunction, center: c64) -> Result<usize> {
    let radius = ((1.0 - center.norm()) / 4.0).clamp(1e-3, 0.2);
    pole_multiplicity_with(f, center, radius, MAX_POLE_ORDER)
}

pub fn pole_multiplicity_with(
    f: &dyn MatrixFunction,
    center: c64,
    radius: f64,
    depth: usize,
) -> Result<usize> {
    let exp = laurent_coefficients(f, center, depth, radius)?;
    Ok(principal_part_rank(&exp))
}

/// Rank of T(phi, center) = [[phi_-k .. 0], ..., [phi_-1 .. phi_-k]].
fn principal_part_rank(exp: &LaurentExpansion) -> usize {
    let tol = 1e-8 * 1.0f64.max(exp.contour_sup);
    let order = exp
        .coeffs
        .iter()
        .rposition(|c| linalg::fro_norm(c) > tol)
        .map(|idx| idx + 1);
    let order = match order {
        Some(k) => k,
        None => return 0,
    };
    let (p, q) = (exp.coeffs[0].nrows(), exp.coeffs[0].ncols());
    let mut t = linalg::zeros(order * p, order * q);
    for i in 0..order {
        for j in 0..=i {
            // Block (i, j) holds phi_{-(order - i + j)}.
            let idx = order - i + j;
            t.slice_mut(ndarray::s![i * p..(i + 1) * p, j * q..(j + 1) * q])
                .assign(&exp.coeffs[idx - 1]);
        }
    }
    linalg::numerical_rank(&t, 1e-8).unwrap_or(0)
}

/// Potapov-Ginzburg transform
/// S = [[w11, w12], [0, I]] [[I, 0], [w21, w22]]^{-1};
/// carries j-unitary values to unitary values.
pub fn pg_transform(w: &CMat, p: usize, q: usize) -> Result<CMat> {
    if w.nrows() != p + q || w.ncols() != p + q {
        return Err(Error::DimensionMismatch(format!(
            "PG transform expects {m}x{m}, got {}x{}",
            w.nrows(),
            w.ncols(),
            m = p + q
        )));
    }
    let (w11, w12, w21, w22) = linalg::split2x2(w, p, q);
    let eye_p = linalg::identity(p);
    let eye_q = linalg::identity(q);
    let zero_pq = linalg::zeros(p, q);
    let zero_qp = linalg::zeros(q, p);
    let numer = linalg::block2x2(&w11, &w12, &zero_qp, &eye_q);
    let denom = linalg::block2x2(&eye_p, &zero_pq, &w21, &w22);
    let (rc, s) = linalg::rcond_solve_right(&numer, &denom)?;
    s.ok_or(Error::BlockSingular {
        mu: c64::new(f64::NAN, 0.0),
        rcond: rc,
    })
}

/// Krein-Langer left factorization s = b_left^{-1} s_left of a rational
/// generalized Schur function with the given interior poles.
pub struct KlFactorization {
    pub b_left: BlaschkeProduct,
    /// Degree actually extracted (sum of projector ranks).
    pub kappa: usize,
    /// min over the disk grid of sigma_q([b_left(lambda) s_left(lambda)]).
    pub coprimality_certificate: f64,
    /// max over the disk grid of sigma_max(s_left).
    pub s_left_sup: f64,
    s: Arc<dyn MatrixFunction>,
}

impl KlFactorization {
    /// s_left(lambda) = b_left(lambda) s(lambda); analytic across the listed
    /// poles, so do not evaluate exactly on them.
    pub fn s_left_evaluate(&self, lambda: c64) -> Result<CMat> {
        Ok(self.b_left.evaluate(lambda)?.dot(&self.s.eval(lambda)?))
    }

    pub fn s_left_function(&self) -> impl MatrixFunction + '_ {
        FnMatrix::new(self.s.output_dim(), self.s.input_dim(), move |z| {
            self.s_left_evaluate(z)
        })
    }
}

const POLE_CANCEL_TOL: f64 = 1e-8;

/// Extracts one rank-one primary factor per pole-order step, projecting on
/// the principal left singular direction of the leading Laurent coefficient.
/// Poles are processed by ascending modulus, then phase.
pub fn kl_factorize(s: Arc<dyn MatrixFunction>, poles: &[(c64, usize)]) -> Result<KlFactorization> {
    let q = s.output_dim();

    // The data must be contractive on the boundary grid.
    let samples = fourier::sample_on_circle(&&*s, 64)?;
    let mut circle_sup = 0.0f64;
    for v in &samples.values {
        circle_sup = circle_sup.max(linalg::sigma_max(v)?);
    }
    if circle_sup > 1.0 + 1e-8 {
        return Err(Error::NotSchurOnCircle { sup: circle_sup });
    }

    let mut sorted: Vec<(c64, usize)> = poles.to_vec();
    for (pole, mult) in &sorted {
        if pole.norm() >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "listed pole {pole} is not inside the disk"
            )));
        }
        if *mult == 0 {
            return Err(Error::InvalidParameter(
                "pole multiplicity must be >= 1".into(),
            ));
        }
    }
    sorted.sort_by(|a, b| {
        (a.0.norm(), a.0.arg())
            .partial_cmp(&(b.0.norm(), b.0.arg()))
            .unwrap()
    });

    let mut b = BlaschkeProduct::identity(q);
    for (idx, &(pole, mult)) in sorted.iter().enumerate() {
        let mut nearest = f64::INFINITY;
        for (jdx, &(other, _)) in sorted.iter().enumerate() {
            if jdx != idx {
                nearest = nearest.min((other - pole).norm());
            }
        }
        let radius = (nearest / 2.0).min((1.0 - pole.norm()) / 2.0).max(1e-3);

        for _step in 0..mult {
            let snapshot = b.clone();
            let current = FnMatrix::new(q, s.input_dim(), |z| {
                Ok(snapshot.evaluate(z)?.dot(&s.eval(z)?))
            });
            let exp = laurent_coefficients(&current, pole, mult, radius)?;
            let tol = POLE_CANCEL_TOL * 1.0f64.max(exp.contour_sup);
            let leading = exp.coeffs.iter().rposition(|c| linalg::fro_norm(c) > tol);
            let leading = match leading {
                Some(k) => k,
                None => break,
            };
            let coeff = exp.coeffs[leading].clone();
            let (u, _, _) = ndarray_linalg::SVD::svd(&*coeff, true, false)?;
            let u = u.expect("requested U");
            let direction: CVec = u.column(0).to_owned();
            b.push_front(BpFactor::primary(pole, &direction)?)?;
        }

        // The pole must be gone now.
        let snapshot = b.clone();
        let current = FnMatrix::new(q, s.input_dim(), |z| {
            Ok(snapshot.evaluate(z)?.dot(&s.eval(z)?))
        });
        let exp = laurent_coefficients(&current, pole, mult, radius)?;
        let worst = exp.coeffs.iter().map(linalg::fro_norm).fold(0.0, f64::max);
        if worst > POLE_CANCEL_TOL * 1.0f64.max(exp.contour_sup) {
            return Err(Error::PoleNotCancelled {
                pole,
                factors: mult,
                norm: worst,
            });
        }
    }

    let kappa = b.degree();
    let fact = KlFactorization {
        b_left: b,
        kappa,
        coprimality_certificate: 0.0,
        s_left_sup: 0.0,
        s,
    };
    certify(fact, &sorted)
}

/// Fills in the coprimality certificate and the contractivity sup on a disk
/// grid enriched with small circles around each listed pole.
fn certify(mut fact: KlFactorization, poles: &[(c64, usize)]) -> Result<KlFactorization> {
    let q = fact.b_left.dim();
    let mut grid: Vec<c64> = Vec::new();
    for ir in 1..=6 {
        let r = 0.95 * ir as f64 / 6.0;
        for it in 0..16 {
            grid.push(c64::from_polar(
                r,
                2.0 * std::f64::consts::PI * it as f64 / 16.0,
            ));
        }
    }
    for &(pole, _) in poles {
        let r = (0.02f64).min((1.0 - pole.norm()) / 4.0).max(1e-3);
        for it in 0..8 {
            grid.push(pole + c64::from_polar(r, 2.0 * std::f64::consts::PI * it as f64 / 8.0));
        }
    }
    let mut certificate = f64::INFINITY;
    let mut sup = 0.0f64;
    for z in grid {
        let bz = fact.b_left.evaluate(z)?;
        let sz = match fact.s.eval(z) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let s_left = bz.dot(&sz);
        sup = sup.max(linalg::sigma_max(&s_left)?);
        let mut stacked = linalg::zeros(q, q + s_left.ncols());
        stacked.slice_mut(ndarray::s![.., ..q]).assign(&bz);
        stacked.slice_mut(ndarray::s![.., q..]).assign(&s_left);
        let sv = linalg::singular_values(&stacked)?;
        let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        certificate = certificate.min(smin);
    }
    fact.coprimality_certificate = certificate;
    fact.s_left_sup = sup;
    Ok(fact)
}

/// Lower bound for the number of negative squares of the Schur kernel
/// (I - s(lambda) s(omega)*) / rho_omega(lambda) from finitely many points
/// and directions.
pub fn kernel_negative_squares(
    s: &dyn MatrixFunction,
    points: &[c64],
    directions: &[CVec],
) -> Result<usize> {
    if points.len() != directions.len() {
        return Err(Error::DimensionMismatch(
            "points and directions must have equal length".into(),
        ));
    }
    if points.is_empty() {
        return Ok(0);
    }
    let q = s.output_dim();
    for (point, dir) in points.iter().zip(directions) {
        if point.norm() >= 1.0 {
            return Err(Error::EvaluationAtPole { point: *point });
        }
        if dir.len() != q {
            return Err(Error::DimensionMismatch(format!(
                "direction length {} does not match kernel dimension {q}",
                dir.len()
            )));
        }
    }
    let values: Vec<CMat> = points
        .iter()
        .map(|&w| s.eval(w).map_err(|_| Error::EvaluationAtPole { point: w }))
        .collect::<Result<_>>()?;

    let n = points.len();
    let mut gram = linalg::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            // K_{omega_k}(omega_j) = (I - s(omega_j) s(omega_k)*) / rho_{omega_k}(omega_j)
            let kernel = (linalg::identity(q) - &values[j].dot(&linalg::adjoint(&values[k])))
                .mapv(|v| v / rho(points[j], points[k]));
            let mut entry = c64::new(0.0, 0.0);
            for a in 0..q {
                for bidx in 0..q {
                    entry += directions[j][a].conj() * kernel[(a, bidx)] * directions[k][bidx];
                }
            }
            gram[(j, k)] = entry;
        }
    }
    let (vals, _) = linalg::eigh_hermitian(&gram)?;
    let scale = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let band = 1e-10 * (1.0 + scale);
    let (neg, _, _) = linalg::inertia_counts(&vals, band);
    Ok(neg)
}
