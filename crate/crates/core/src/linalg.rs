//! Dense complex linear algebra helpers shared by every module.
//!
//! Everything here is a thin layer over LAPACK (through `ndarray-linalg`):
//! checked solves with an explicit reciprocal-condition gate, Hermitian
//! eigenwork, numerical ranks, and the 2x2 block plumbing used by the
//! resolvent.

use ndarray::{s, Array1, Array2};
use ndarray_linalg::{Eig, Eigh, SVD, UPLO};
use num_complex::Complex64 as c64;

use crate::error::{Error, Result};

pub type CMat = Array2<c64>;
pub type CVec = Array1<c64>;

/// Solves whose reciprocal condition falls below this are reported singular.
pub const RCOND_FLOOR: f64 = 1e-13;

pub fn identity(n: usize) -> CMat {
    Array2::eye(n)
}

pub fn zeros(rows: usize, cols: usize) -> CMat {
    Array2::zeros((rows, cols))
}

/// Conjugate transpose.
pub fn adjoint(m: &CMat) -> CMat {
    let mut out = Array2::zeros((m.ncols(), m.nrows()));
    for ((i, j), v) in m.indexed_iter() {
        out[(j, i)] = v.conj();
    }
    out
}

pub fn fro_norm(m: &CMat) -> f64 {
    m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// (A + A*)/2; keeps Hermitian invariants against roundoff.
pub fn hermitize(m: &CMat) -> CMat {
    let adj = adjoint(m);
    (m + &adj).mapv(|v| 0.5 * v)
}

pub fn all_finite(m: &CMat) -> bool {
    m.iter().all(|v| v.re.is_finite() && v.im.is_finite())
}

/// Fresh row-major copy; LAPACK wrappers reject the zero strides that
/// size-one slices can carry.
fn standardize(m: &CMat) -> CMat {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m[(i, j)])
}

/// SVD-based solve of A X = B. Returns the reciprocal condition number and
/// `None` for X when A is singular at the `RCOND_FLOOR` threshold.
pub fn rcond_solve(a: &CMat, b: &CMat) -> Result<(f64, Option<CMat>)> {
    rcond_solve_scaled(a, b, 0.0)
}

/// Like `rcond_solve`, but treats A as singular when its smallest singular
/// value is tiny against an external `scale` as well. A near-zero block cut
/// out of a well-scaled matrix is "singular" in that sense even though its
/// own sigma_min/sigma_max ratio is harmless.
pub fn rcond_solve_scaled(a: &CMat, b: &CMat, scale: f64) -> Result<(f64, Option<CMat>)> {
    debug_assert_eq!(a.nrows(), a.ncols());
    debug_assert_eq!(a.nrows(), b.nrows());
    let (u, sv, vt) = standardize(a).svd(true, true)?;
    let u = u.expect("requested U");
    let vt = vt.expect("requested V^H");
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let denom = smax.max(scale);
    let rcond = if denom > 0.0 { smin / denom } else { 0.0 };
    if rcond < RCOND_FLOOR || !rcond.is_finite() {
        return Ok((rcond, None));
    }
    // X = V S^{-1} U^H B
    let utb = adjoint(&u).dot(b);
    let mut scaled = utb;
    for (i, row) in scaled.rows_mut().into_iter().enumerate() {
        let inv = c64::new(1.0 / sv[i], 0.0);
        for v in row {
            *v *= inv;
        }
    }
    let x = adjoint(&vt).dot(&scaled);
    Ok((rcond, Some(x)))
}

/// Right-sided solve X A = B, i.e. X = B A^{-1}.
pub fn rcond_solve_right(b: &CMat, a: &CMat) -> Result<(f64, Option<CMat>)> {
    rcond_solve_right_scaled(b, a, 0.0)
}

pub fn rcond_solve_right_scaled(b: &CMat, a: &CMat, scale: f64) -> Result<(f64, Option<CMat>)> {
    let (rcond, xt) = rcond_solve_scaled(&a.t().to_owned(), &b.t().to_owned(), scale)?;
    Ok((rcond, xt.map(|x| x.t().to_owned())))
}

/// Matrix inverse together with its 2-norm condition number.
pub fn inverse(a: &CMat) -> Result<(f64, Option<CMat>)> {
    let n = a.nrows();
    let (rcond, x) = rcond_solve(a, &identity(n))?;
    let cond = if rcond > 0.0 {
        1.0 / rcond
    } else {
        f64::INFINITY
    };
    Ok((cond, x))
}

pub fn singular_values(a: &CMat) -> Result<Array1<f64>> {
    let (_, sv, _) = standardize(a).svd(false, false)?;
    Ok(sv)
}

/// Count of singular values above `rel_tol * sigma_max`.
pub fn numerical_rank(a: &CMat, rel_tol: f64) -> Result<usize> {
    let sv = singular_values(a)?;
    Ok(rank_from_singular_values(sv.as_slice().unwrap(), rel_tol))
}

pub fn rank_from_singular_values(sv: &[f64], rel_tol: f64) -> usize {
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax <= 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

pub fn sigma_max(a: &CMat) -> Result<f64> {
    let sv = singular_values(a)?;
    Ok(sv.iter().cloned().fold(0.0, f64::max))
}

/// Eigenvalues of a general complex matrix.
pub fn eigenvalues(a: &CMat) -> Result<CVec> {
    let (vals, _) = standardize(a).eig()?;
    Ok(vals)
}

pub fn spectral_radius(a: &CMat) -> Result<f64> {
    if a.nrows() == 0 {
        return Ok(0.0);
    }
    let vals = eigenvalues(a)?;
    Ok(vals.iter().map(|v| v.norm()).fold(0.0, f64::max))
}

/// Hermitian eigendecomposition (input is symmetrized first); eigenvalues
/// ascending, eigenvectors in columns with A = V D V*.
pub fn eigh_hermitian(a: &CMat) -> Result<(Array1<f64>, CMat)> {
    let h = standardize(&hermitize(a));
    let (vals, vecs) = h.eigh(UPLO::Lower)?;
    // The backend hands back eigenvectors of the transposed (= conjugated)
    // matrix for complex Hermitian input; conjugating restores A = V D V*.
    Ok((vals, vecs.mapv(|v| v.conj())))
}

/// V f(D) V* for a Hermitian eigendecomposition.
pub fn hermitian_map(vals: &Array1<f64>, vecs: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let n = vals.len();
    let mut scaled = vecs.clone();
    for (j, mut col) in scaled.columns_mut().into_iter().enumerate() {
        let fv = c64::new(f(vals[j]), 0.0);
        for v in col.iter_mut() {
            *v *= fv;
        }
    }
    let mut out = Array2::zeros((n, n));
    // scaled * vecs^H
    let vh = adjoint(vecs);
    out.assign(&scaled.dot(&vh));
    out
}

/// Signature counts of a Hermitian spectrum: (negative, inside band, positive).
pub fn inertia_counts(vals: &Array1<f64>, band: f64) -> (usize, usize, usize) {
    let mut neg = 0;
    let mut zero = 0;
    let mut pos = 0;
    for &v in vals {
        if v < -band {
            neg += 1;
        } else if v > band {
            pos += 1;
        } else {
            zero += 1;
        }
    }
    (neg, zero, pos)
}

/// diag(I_p, -I_q).
pub fn signature_matrix(p: usize, q: usize) -> CMat {
    let mut j = identity(p + q);
    for k in p..p + q {
        j[(k, k)] = c64::new(-1.0, 0.0);
    }
    j
}

pub fn block_diag2(a: &CMat, d: &CMat) -> CMat {
    let (ra, ca) = (a.nrows(), a.ncols());
    let (rd, cd) = (d.nrows(), d.ncols());
    let mut out = Array2::zeros((ra + rd, ca + cd));
    out.slice_mut(s![..ra, ..ca]).assign(a);
    out.slice_mut(s![ra.., ca..]).assign(d);
    out
}

pub fn block2x2(a11: &CMat, a12: &CMat, a21: &CMat, a22: &CMat) -> CMat {
    let r1 = a11.nrows();
    let r2 = a21.nrows();
    let c1 = a11.ncols();
    let c2 = a12.ncols();
    debug_assert_eq!(a12.nrows(), r1);
    debug_assert_eq!(a22.nrows(), r2);
    debug_assert_eq!(a21.ncols(), c1);
    debug_assert_eq!(a22.ncols(), c2);
    let mut out = Array2::zeros((r1 + r2, c1 + c2));
    out.slice_mut(s![..r1, ..c1]).assign(a11);
    out.slice_mut(s![..r1, c1..]).assign(a12);
    out.slice_mut(s![r1.., ..c1]).assign(a21);
    out.slice_mut(s![r1.., c1..]).assign(a22);
    out
}

/// Split an m x m matrix into blocks of row sizes (p, q) and matching columns.
pub fn split2x2(m: &CMat, p: usize, q: usize) -> (CMat, CMat, CMat, CMat) {
    debug_assert_eq!(m.nrows(), p + q);
    debug_assert_eq!(m.ncols(), p + q);
    (
        m.slice(s![..p, ..p]).to_owned(),
        m.slice(s![..p, p..p + q]).to_owned(),
        m.slice(s![p..p + q, ..p]).to_owned(),
        m.slice(s![p..p + q, p..p + q]).to_owned(),
    )
}

/// Strict error if `m` is not `rows x cols`.
pub fn expect_shape(m: &CMat, rows: usize, cols: usize, name: &str) -> Result<()> {
    if m.nrows() != rows || m.ncols() != cols {
        return Err(Error::DimensionMismatch(format!(
            "{name}: expected {rows}x{cols}, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn c(re: f64, im: f64) -> c64 {
        c64::new(re, im)
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let m = array![[c(1.0, 2.0), c(3.0, -1.0)], [c(0.0, 1.0), c(2.0, 0.0)]];
        let a = adjoint(&m);
        assert_eq!(a[(0, 1)], c(0.0, -1.0));
        assert_eq!(a[(1, 0)], c(3.0, 1.0));
    }

    #[test]
    fn solve_recovers_known_solution() {
        let a = array![[c(2.0, 0.0), c(1.0, 1.0)], [c(0.0, -1.0), c(3.0, 0.0)]];
        let x_true = array![[c(1.0, 0.5)], [c(-2.0, 1.0)]];
        let b = a.dot(&x_true);
        let (rcond, x) = rcond_solve(&a, &b).unwrap();
        assert!(rcond > 1e-3);
        let x = x.unwrap();
        assert!(fro_norm(&(&x - &x_true)) < 1e-12);
    }

    #[test]
    fn solve_flags_singular_matrix() {
        let a = array![[c(1.0, 0.0), c(2.0, 0.0)], [c(2.0, 0.0), c(4.0, 0.0)]];
        let (_, x) = rcond_solve(&a, &identity(2)).unwrap();
        assert!(x.is_none());
    }

    #[test]
    fn inertia_counts_split_spectrum() {
        let vals = ndarray::arr1(&[-2.0, -1e-12, 0.5, 3.0]);
        let (neg, zero, pos) = inertia_counts(&vals, 1e-9);
        assert_eq!((neg, zero, pos), (1, 1, 2));
    }

    #[test]
    fn signature_squares_to_identity() {
        let j = signature_matrix(2, 3);
        let jj = j.dot(&j);
        assert!(fro_norm(&(&jj - &identity(5))) < 1e-15);
    }

    #[test]
    fn hermitian_map_builds_square_root() {
        let p = array![[c(2.0, 0.0), c(0.5, 0.5)], [c(0.5, -0.5), c(1.5, 0.0)]];
        let (vals, vecs) = eigh_hermitian(&p).unwrap();
        let root = hermitian_map(&vals, &vecs, |x| x.max(0.0).sqrt());
        let back = root.dot(&root);
        assert!(fro_norm(&(&back - &p)) < 1e-12);
    }
}
