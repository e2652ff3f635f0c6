//! Reproducible random instances for tests, demos, and batch certification.

use num_complex::Complex64 as c64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::realization::Realization;
use crate::stein;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries i.i.d. standard complex normal.
pub fn complex_gaussian(rows: usize, cols: usize, rng: &mut impl Rng) -> CMat {
    let mut m = linalg::zeros(rows, cols);
    let scale = 0.5_f64.sqrt();
    for v in m.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *v = c64::new(re * scale, im * scale);
    }
    m
}

/// Random stable realization: Gaussian entries, A rescaled to spectral
/// radius 0.8. Minimal with probability one.
pub fn random_realization(n: usize, p: usize, q: usize, rng: &mut impl Rng) -> Result<Realization> {
    for _ in 0..64 {
        let mut a = complex_gaussian(n, n, rng);
        let rho = linalg::spectral_radius(&a)?;
        if rho < 1e-12 {
            continue;
        }
        let factor = c64::new(0.8 / rho, 0.0);
        a.mapv_inplace(|v| v * factor);
        let b = complex_gaussian(n, q, rng);
        let c = complex_gaussian(p, n, rng);
        return Realization::new(a, b, c);
    }
    Err(Error::InvalidParameter(
        "failed to draw a stable random realization".into(),
    ))
}

/// Random constant p x q contraction with top singular value drawn in
/// (0.1, 1.0] * sigma_cap.
pub fn random_contraction(p: usize, q: usize, sigma_cap: f64, rng: &mut impl Rng) -> CMat {
    let m = complex_gaussian(p, q, rng);
    let smax = linalg::singular_values(&m)
        .map(|sv| sv.iter().cloned().fold(0.0, f64::max))
        .unwrap_or(1.0);
    let target = sigma_cap * (0.1 + 0.9 * rng.random::<f64>());
    if smax <= 0.0 {
        return linalg::zeros(p, q);
    }
    let factor = c64::new(target / smax, 0.0);
    m.mapv(|v| v * factor)
}

/// Random minimal stable realization whose negativity index
/// nu_-(I - PQ) equals `kappa1`, with the Hankel spectrum kept a safe
/// distance from 1 so no instance is boundary degenerate.
///
/// Works by rescaling C: the Hankel singular values scale linearly with
/// the output map.
pub fn realization_with_negativity_index(
    n: usize,
    p: usize,
    q: usize,
    kappa1: usize,
    rng: &mut impl Rng,
) -> Result<Realization> {
    if kappa1 > n {
        return Err(Error::InvalidParameter(format!(
            "kappa1 = {kappa1} cannot exceed the state dimension {n}"
        )));
    }
    const MARGIN: f64 = 1.25;
    for _ in 0..256 {
        let r = random_realization(n, p, q, rng)?;
        let g = match stein::gramians(&r) {
            Ok(g) => g,
            Err(_) => continue,
        };
        let sigma = match stein::hankel_spectrum(&g) {
            Ok(s) => s,
            Err(_) => continue,
        };
        if sigma[n - 1] <= 0.0 {
            continue;
        }
        // Pick t with sigma_k * t > 1 > sigma_{k+1} * t and margin.
        let t = if kappa1 == 0 {
            1.0 / (MARGIN * sigma[0])
        } else if kappa1 == n {
            MARGIN / sigma[n - 1]
        } else {
            let hi = sigma[kappa1 - 1];
            let lo = sigma[kappa1];
            if hi / lo < MARGIN * MARGIN {
                continue;
            }
            1.0 / (hi * lo).sqrt()
        };
        let c_scaled = r.c().mapv(|v| v * c64::new(t, 0.0));
        let r2 = Realization::new(r.a().clone(), r.b().clone(), c_scaled)?;
        let g2 = match stein::gramians(&r2) {
            Ok(g) => g,
            Err(_) => continue,
        };
        match stein::negativity_index(&g2) {
            Ok(k) if k == kappa1 => return Ok(r2),
            _ => continue,
        }
    }
    Err(Error::InvalidParameter(format!(
        "failed to generate an instance with negativity index {kappa1}"
    )))
}
