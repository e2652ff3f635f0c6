//! Circle grids, Fourier coefficients, block-Hankel matrices, and winding
//! numbers.
//!
//! The coefficient convention follows the Hankel side of the problem:
//! gamma_k = (1/2pi) integral e^{ik theta} f(e^{i theta}) d theta for k >= 1,
//! i.e. the coefficient of z^{-k} in the boundary Laurent series.

use num_complex::Complex64 as c64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::function::MatrixFunction;
use crate::linalg::{self, CMat};

/// Radial retreat applied to circle points where evaluation is singular.
pub const RADIAL_PERTURBATION: f64 = 1e-9;

/// N-th roots of unity, theta_m = 2 pi m / n.
pub fn unit_circle(n: usize) -> Vec<c64> {
    (0..n)
        .map(|m| c64::from_polar(1.0, 2.0 * std::f64::consts::PI * m as f64 / n as f64))
        .collect()
}

/// Values of `f` on the n-point circle grid. Points where evaluation fails
/// are retried at (1 - 1e-9) mu and their indices reported; a point that
/// fails both ways aborts with `GridSingular`.
pub struct GridSamples {
    pub values: Vec<CMat>,
    pub perturbed: Vec<usize>,
}

pub fn sample_on_circle(f: &dyn MatrixFunction, n: usize) -> Result<GridSamples> {
    let mut values = Vec::with_capacity(n);
    let mut perturbed = Vec::new();
    let mut failures = 0usize;
    for (idx, mu) in unit_circle(n).into_iter().enumerate() {
        match f.eval(mu) {
            Ok(v) => values.push(v),
            Err(_) => {
                let retreated = mu * c64::new(1.0 - RADIAL_PERTURBATION, 0.0);
                match f.eval(retreated) {
                    Ok(v) => {
                        perturbed.push(idx);
                        values.push(v);
                    }
                    Err(_) => {
                        failures += 1;
                        values.push(linalg::zeros(f.output_dim(), f.input_dim()));
                    }
                }
            }
        }
    }
    if failures > 0 {
        return Err(Error::GridSingular { failures });
    }
    Ok(GridSamples { values, perturbed })
}

#[derive(Debug, Clone)]
pub struct FourierCoefficients {
    /// gamma_1 .. gamma_k.
    pub coeffs: Vec<CMat>,
    /// Max coefficient norm over indices (k, 2k]; an aliasing estimate.
    pub tail_norm: f64,
    /// Grid indices that needed radial perturbation.
    pub perturbed: Vec<usize>,
    pub grid: usize,
}

/// Anti-analytic Fourier coefficients gamma_1..gamma_k of `f` from an
/// n-point uniform circle grid (n a power of two, n >= 4k).
pub fn fourier_coefficients(
    f: &dyn MatrixFunction,
    n: usize,
    k: usize,
) -> Result<FourierCoefficients> {
    if !n.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "grid size {n} must be a power of two"
        )));
    }
    if k == 0 || n < 4 * k {
        return Err(Error::InvalidParameter(format!(
            "grid size {n} must be at least 4 * {k}"
        )));
    }
    let samples = sample_on_circle(f, n)?;
    let (p, q) = (f.output_dim(), f.input_dim());
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_inverse(n);
    let mut coeffs = vec![linalg::zeros(p, q); k];
    let tail_len = k.min(n / 2 - k);
    let mut tail_norm_sq = vec![0.0f64; tail_len];
    for i in 0..p {
        for j in 0..q {
            let mut line: Vec<c64> = samples.values.iter().map(|m| m[(i, j)]).collect();
            fft.process(&mut line);
            let scale = 1.0 / n as f64;
            for (idx, c) in coeffs.iter_mut().enumerate() {
                c[(i, j)] = line[idx + 1] * scale;
            }
            for (t, acc) in tail_norm_sq.iter_mut().enumerate() {
                let v = line[k + 1 + t] * scale;
                *acc += v.norm_sqr();
            }
        }
    }
    let tail_norm = tail_norm_sq.iter().map(|v| v.sqrt()).fold(0.0, f64::max);
    Ok(FourierCoefficients {
        coeffs,
        tail_norm,
        perturbed: samples.perturbed,
        grid: n,
    })
}

/// Block-Hankel matrix H with block (i, j) = coeffs[i + j]; sized to use
/// every available coefficient (rows = ceil(L/2) blocks).
pub fn block_hankel(coeffs: &[CMat]) -> CMat {
    assert!(!coeffs.is_empty());
    let l = coeffs.len();
    let rows = l.div_ceil(2);
    let cols = l + 1 - rows;
    let (p, q) = (coeffs[0].nrows(), coeffs[0].ncols());
    let mut h = linalg::zeros(rows * p, cols * q);
    for i in 0..rows {
        for j in 0..cols {
            h.slice_mut(ndarray::s![i * p..(i + 1) * p, j * q..(j + 1) * q])
                .assign(&coeffs[i + j]);
        }
    }
    h
}

pub fn hankel_singular_values(coeffs: &[CMat]) -> Result<Vec<f64>> {
    let h = block_hankel(coeffs);
    let sv = linalg::singular_values(&h)?;
    let mut out: Vec<f64> = sv.to_vec();
    out.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(out)
}

/// Numerical rank of the block-Hankel matrix of the coefficient sequence.
pub fn hankel_rank(coeffs: &[CMat], rel_tol: f64) -> Result<usize> {
    let sv = hankel_singular_values(coeffs)?;
    Ok(linalg::rank_from_singular_values(&sv, rel_tol))
}

/// Winding number of a scalar sequence around the origin, by summing
/// principal-branch phase increments over the closed grid.
///
/// Steps larger than pi/2 abort with `GridTooCoarse`; near-zero values make
/// the phase meaningless and abort the same way.
pub fn winding_number(values: &[c64]) -> Result<i64> {
    if values.len() < 4 {
        return Err(Error::InvalidParameter(
            "winding grid needs >= 4 points".into(),
        ));
    }
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale <= 0.0 {
        return Err(Error::GridTooCoarse {
            step: std::f64::consts::PI,
        });
    }
    let mut total = 0.0;
    for (idx, a) in values.iter().enumerate() {
        let b = &values[(idx + 1) % values.len()];
        if a.norm() < 1e-14 * scale || b.norm() < 1e-14 * scale {
            return Err(Error::GridTooCoarse {
                step: std::f64::consts::PI,
            });
        }
        let step = (b / a).arg();
        if step.abs() > std::f64::consts::FRAC_PI_2 {
            return Err(Error::GridTooCoarse { step });
        }
        total += step;
    }
    Ok((total / (2.0 * std::f64::consts::PI)).round() as i64)
}
