//! Pointwise-evaluable matrix-valued functions.
//!
//! Grids, Fourier analysis, Laurent expansions, and factorization routines
//! only ever need dimensions plus point evaluation, so they all consume this
//! trait instead of concrete types.

use num_complex::Complex64 as c64;

use crate::error::Result;
use crate::linalg::CMat;

pub trait MatrixFunction: Send + Sync {
    /// Number of rows of a value.
    fn output_dim(&self) -> usize;
    /// Number of columns of a value.
    fn input_dim(&self) -> usize;
    fn eval(&self, z: c64) -> Result<CMat>;
}

/// Closure adapter.
pub struct FnMatrix<F> {
    rows: usize,
    cols: usize,
    f: F,
}

impl<F> FnMatrix<F>
where
    F: Fn(c64) -> Result<CMat> + Send + Sync,
{
    pub fn new(rows: usize, cols: usize, f: F) -> Self {
        Self { rows, cols, f }
    }
}

impl<F> MatrixFunction for FnMatrix<F>
where
    F: Fn(c64) -> Result<CMat> + Send + Sync,
{
    fn output_dim(&self) -> usize {
        self.rows
    }

    fn input_dim(&self) -> usize {
        self.cols
    }

    fn eval(&self, z: c64) -> Result<CMat> {
        (self.f)(z)
    }
}

impl<T: MatrixFunction + ?Sized> MatrixFunction for &T {
    fn output_dim(&self) -> usize {
        (**self).output_dim()
    }

    fn input_dim(&self) -> usize {
        (**self).input_dim()
    }

    fn eval(&self, z: c64) -> Result<CMat> {
        (**self).eval(z)
    }
}

impl<T: MatrixFunction + ?Sized> MatrixFunction for std::sync::Arc<T> {
    fn output_dim(&self) -> usize {
        (**self).output_dim()
    }

    fn input_dim(&self) -> usize {
        (**self).input_dim()
    }

    fn eval(&self, z: c64) -> Result<CMat> {
        (**self).eval(z)
    }
}
