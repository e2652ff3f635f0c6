//! The generalized gamma-generating resolvent matrix.
//!
//! From a minimal stable realization and its gramians we assemble
//!
//!   M = diag(-A, I),  N = diag(-I, A*),  Lambda = [-Q  I; I  -P],
//!   G(z) = diag(C, B*) (M - zN)^{-1},
//!   A(mu) = I_m - (1 - mu) G(mu) Lambda^{-1} G(1)* j_pq,
//!
//! and verify the class membership conditions numerically: j-unitarity on
//! the circle, the pole count of s21 = -a22^{-1} a21 inside the disk, and
//! winding-number surrogates for the outerness of the associated factors.

use ndarray_linalg::Determinant;
use num_complex::Complex64 as c64;

use crate::error::{Error, Result};
use crate::fourier;
use crate::function::{FnMatrix, MatrixFunction};
use crate::linalg::{self, CMat};
use crate::realization::Realization;
use crate::stein::{self, GramianPair};
use crate::Tolerances;

/// Tolerance for deciding whether a point lies on the unit circle.
pub const CIRCLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct ResolventData {
    pub m_mat: CMat,
    pub n_mat: CMat,
    pub lambda: CMat,
    pub lambda_inv: CMat,
    pub lambda_cond: f64,
    /// G(1)*, size 2n x m.
    pub g1_star: CMat,
    /// diag(C, B*), size m x 2n.
    pub output_map: CMat,
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub kappa1: usize,
}

impl ResolventData {
    /// Builds every cached block. Requires a minimal stable realization with
    /// 1 not in sigma(PQ); the latter is enforced through the inertia band.
    pub fn assemble(r: &Realization, g: &GramianPair, tols: &Tolerances) -> Result<Self> {
        let (n, p, q) = r.dims();
        let kappa1 = stein::negativity_index_with(g, tols.inertia)?;

        let eye = linalg::identity(n);
        let m_mat = linalg::block_diag2(&r.a().mapv(|v| -v), &eye);
        let n_mat = linalg::block_diag2(&eye.mapv(|v| -v), &linalg::adjoint(r.a()));
        let lambda = linalg::block2x2(&g.q.mapv(|v| -v), &eye, &eye, &g.p.mapv(|v| -v));
        let (lambda_cond, lambda_inv) = linalg::inverse(&lambda)?;
        let lambda_inv = match lambda_inv {
            Some(inv) => inv,
            None => {
                return Err(Error::BoundaryDegenerate {
                    eigenvalue: 0.0,
                    band: 1.0 / lambda_cond.max(1.0),
                })
            }
        };
        let output_map = linalg::block_diag2(r.c(), &linalg::adjoint(r.b()));

        let mut data = Self {
            m_mat,
            n_mat,
            lambda,
            lambda_inv,
            lambda_cond,
            g1_star: linalg::zeros(2 * n, p + q),
            output_map,
            n,
            p,
            q,
            kappa1,
        };
        let g1 = data.g_evaluate(c64::new(1.0, 0.0))?;
        data.g1_star = linalg::adjoint(&g1);
        Ok(data)
    }

    pub fn m_dim(&self) -> usize {
        self.p + self.q
    }

    pub fn j_signature(&self) -> CMat {
        linalg::signature_matrix(self.p, self.q)
    }

    /// G(z) = diag(C, B*) (M - zN)^{-1}, via the two block-diagonal solves
    /// C (zI - A)^{-1} and B* (I - zA*)^{-1}.
    pub fn g_evaluate(&self, z: c64) -> Result<CMat> {
        let n = self.n;
        let a = self.m_mat.slice(ndarray::s![..n, ..n]).mapv(|v| -v);
        let astar = self.n_mat.slice(ndarray::s![n.., n..]).to_owned();
        let c = self.output_map.slice(ndarray::s![..self.p, ..n]).to_owned();
        let bstar = self.output_map.slice(ndarray::s![self.p.., n..]).to_owned();

        let zi_a = linalg::identity(n).mapv(|v| v * z) - &a;
        let (rc1, top) = linalg::rcond_solve_right(&c, &zi_a)?;
        let top = top.ok_or(Error::SingularEvaluation { z, rcond: rc1 })?;

        let i_zastar = linalg::identity(n) - &astar.mapv(|v| v * z);
        let (rc2, bottom) = linalg::rcond_solve_right(&bstar, &i_zastar)?;
        let bottom = bottom.ok_or(Error::SingularEvaluation { z, rcond: rc2 })?;

        let mut g = linalg::zeros(self.m_dim(), 2 * n);
        g.slice_mut(ndarray::s![..self.p, ..n]).assign(&top);
        g.slice_mut(ndarray::s![self.p.., n..]).assign(&bottom);
        Ok(g)
    }
}

/// The resolvent matrix A(mu) with cached evaluation core.
#[derive(Debug, Clone)]
pub struct GammaGeneratingMatrix {
    data: ResolventData,
    /// Lambda^{-1} G(1)* j, size 2n x m.
    core: CMat,
}

/// Blocks of an m x m value of the resolvent matrix.
#[derive(Debug, Clone)]
pub struct Blocks {
    pub a11: CMat,
    pub a12: CMat,
    pub a21: CMat,
    pub a22: CMat,
}

impl GammaGeneratingMatrix {
    pub fn new(data: ResolventData) -> Self {
        let core = data.lambda_inv.dot(&data.g1_star).dot(&data.j_signature());
        Self { data, core }
    }

    pub fn data(&self) -> &ResolventData {
        &self.data
    }

    pub fn kappa1(&self) -> usize {
        self.data.kappa1
    }

    /// (p, q).
    pub fn block_dims(&self) -> (usize, usize) {
        (self.data.p, self.data.q)
    }

    /// A(mu) = I_m - (1 - mu) G(mu) Lambda^{-1} G(1)* j.
    pub fn gamma_evaluate(&self, mu: c64) -> Result<CMat> {
        let one = c64::new(1.0, 0.0);
        let g = self.data.g_evaluate(mu)?;
        let correction = g.dot(&self.core).mapv(|v| v * (one - mu));
        Ok(linalg::identity(self.data.m_dim()) - &correction)
    }

    pub fn blocks(&self, mu: c64) -> Result<Blocks> {
        let a = self.gamma_evaluate(mu)?;
        let (a11, a12, a21, a22) = linalg::split2x2(&a, self.data.p, self.data.q);
        Ok(Blocks { a11, a12, a21, a22 })
    }

    /// || A(mu) j A(mu)* - j ||_F for |mu| = 1.
    pub fn j_unitarity_defect(&self, mu: c64) -> Result<f64> {
        let defect = (mu.norm() - 1.0).abs();
        if defect > CIRCLE_TOL {
            return Err(Error::NotOnCircle { defect });
        }
        let a = self.gamma_evaluate(mu)?;
        let j = self.data.j_signature();
        let lhs = a.dot(&j).dot(&linalg::adjoint(&a));
        Ok(linalg::fro_norm(&(&lhs - &j)))
    }

    /// s21(mu) = -a22(mu)^{-1} a21(mu), plus the Frobenius distance to the
    /// dual formula -a12(mu)* (a11(mu)*)^{-1} (the two agree on the circle
    /// by j-unitarity).
    ///
    /// Block singularity is judged against the norm of the full resolvent
    /// value, so a vanishing a22 is flagged even in the scalar case.
    pub fn s21_evaluate(&self, mu: c64) -> Result<(CMat, f64)> {
        let a = self.gamma_evaluate(mu)?;
        let scale = linalg::fro_norm(&a);
        let (a11, a12, a21, a22) = linalg::split2x2(&a, self.data.p, self.data.q);
        let (rc, sol) = linalg::rcond_solve_scaled(&a22, &a21, scale)?;
        let sol = sol.ok_or(Error::BlockSingular { mu, rcond: rc })?;
        let primary = sol.mapv(|v| -v);

        let a11_star = linalg::adjoint(&a11);
        let a12_star = linalg::adjoint(&a12);
        let (rc2, dual) = linalg::rcond_solve_right_scaled(&a12_star, &a11_star, scale)?;
        let dual = dual.ok_or(Error::BlockSingular { mu, rcond: rc2 })?;
        let dual = dual.mapv(|v| -v);

        let discrepancy = linalg::fro_norm(&(&primary - &dual));
        Ok((primary, discrepancy))
    }

    fn s21_primary(&self, mu: c64) -> Result<CMat> {
        let a = self.gamma_evaluate(mu)?;
        let scale = linalg::fro_norm(&a);
        let (_, _, a21, a22) = linalg::split2x2(&a, self.data.p, self.data.q);
        let (rc, sol) = linalg::rcond_solve_scaled(&a22, &a21, scale)?;
        let sol = sol.ok_or(Error::BlockSingular { mu, rcond: rc })?;
        Ok(sol.mapv(|v| -v))
    }

    /// Adapter exposing s21 as a pointwise-evaluable q x p function.
    pub fn s21_function(&self) -> impl MatrixFunction + '_ {
        FnMatrix::new(self.data.q, self.data.p, move |mu| self.s21_primary(mu))
    }

    /// Numerical verification of the membership conditions for the
    /// generalized right gamma-generating class.
    pub fn membership_report(
        &self,
        grid_size: usize,
        tols: &Tolerances,
    ) -> Result<MembershipReport> {
        if grid_size < 16 {
            return Err(Error::InvalidParameter(
                "membership grid needs >= 16 points".into(),
            ));
        }
        let mut max_defect = 0.0f64;
        let mut det_a22 = Vec::with_capacity(grid_size);
        let mut det_a11_star = Vec::with_capacity(grid_size);
        for mu in fourier::unit_circle(grid_size) {
            max_defect = max_defect.max(self.j_unitarity_defect(mu)?);
            let b = self.blocks(mu)?;
            det_a22.push(b.a22.det()?);
            det_a11_star.push(linalg::adjoint(&b.a11).det()?);
        }
        let winding_det_a22 = fourier::winding_number(&det_a22)?;
        let winding_det_a11_star = fourier::winding_number(&det_a11_star)?;

        let s21 = self.s21_function();
        let coeffs = fourier::fourier_coefficients(&s21, 1024, 48)?;
        // s21 is contractive a.e. on the circle, so 1 is its natural scale;
        // without the floor a pole-free s21 would read noise as full rank.
        let sv = fourier::hankel_singular_values(&coeffs.coeffs)?;
        let scale = sv.first().copied().unwrap_or(0.0).max(1.0);
        let s21_pole_count = sv.iter().filter(|&&s| s > tols.hankel_rank * scale).count();

        Ok(MembershipReport {
            kappa1: self.data.kappa1,
            grid: grid_size,
            max_j_unitarity_defect: max_defect,
            s21_pole_count,
            winding_det_a22,
            winding_det_a11_star,
            s21_tail_norm: coeffs.tail_norm,
        })
    }
}

/// Grid evidence that the resolvent belongs to the generalized right
/// gamma-generating class with index kappa1.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MembershipReport {
    pub kappa1: usize,
    pub grid: usize,
    /// Condition (1): j-unitarity on the circle.
    pub max_j_unitarity_defect: f64,
    /// Condition (2): pole count of s21 in the disk (Hankel rank of its
    /// anti-analytic coefficients); the target is kappa1.
    pub s21_pole_count: usize,
    /// Condition (3) surrogate: winding numbers of det a22 and det a11*;
    /// both equal kappa1 exactly when the associated factors are outer.
    pub winding_det_a22: i64,
    pub winding_det_a11_star: i64,
    pub s21_tail_norm: f64,
}

impl MembershipReport {
    pub fn passes(&self) -> bool {
        self.max_j_unitarity_defect <= 1e-8
            && self.s21_pole_count == self.kappa1
            && self.winding_det_a22 == self.kappa1 as i64
            && self.winding_det_a11_star == self.kappa1 as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::unit_circle;
    use crate::stein;
    use ndarray::array;

    fn c(re: f64, im: f64) -> c64 {
        c64::new(re, im)
    }

    fn scalar_resolvent() -> GammaGeneratingMatrix {
        let r = Realization::new(
            array![[c(0.5, 0.0)]],
            array![[c(1.0, 0.0)]],
            array![[c(1.0, 0.0)]],
        )
        .unwrap();
        let g = stein::gramians(&r).unwrap();
        let data = ResolventData::assemble(&r, &g, &Tolerances::default()).unwrap();
        GammaGeneratingMatrix::new(data)
    }

    #[test]
    fn scalar_lambda_and_inverse() {
        let gg = scalar_resolvent();
        let d = gg.data();
        let expected_lambda = array![
            [c(-4.0 / 3.0, 0.0), c(1.0, 0.0)],
            [c(1.0, 0.0), c(-4.0 / 3.0, 0.0)]
        ];
        assert!(linalg::fro_norm(&(&d.lambda - &expected_lambda)) < 1e-13);
        let expected_inv = array![
            [c(-12.0 / 7.0, 0.0), c(-9.0 / 7.0, 0.0)],
            [c(-9.0 / 7.0, 0.0), c(-12.0 / 7.0, 0.0)]
        ];
        assert!(linalg::fro_norm(&(&d.lambda_inv - &expected_inv)) < 1e-12);
        assert_eq!(d.kappa1, 1);
    }

    #[test]
    fn scalar_g_values() {
        let gg = scalar_resolvent();
        let d = gg.data();
        let g1 = d.g_evaluate(c(1.0, 0.0)).unwrap();
        let expected = array![[c(2.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(2.0, 0.0)]];
        assert!(linalg::fro_norm(&(&g1 - &expected)) < 1e-13);
        // Consistency with the cached adjoint.
        assert!(linalg::fro_norm(&(&linalg::adjoint(&g1) - &d.g1_star)) < 1e-13);

        let g0 = d.g_evaluate(c(0.0, 0.0)).unwrap();
        let expected0 = array![[c(-2.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
        assert!(linalg::fro_norm(&(&g0 - &expected0)) < 1e-13);

        assert!(matches!(
            d.g_evaluate(c(0.5, 0.0)),
            Err(Error::SingularEvaluation { .. })
        ));
    }

    #[test]
    fn gamma_is_identity_at_one() {
        let gg = scalar_resolvent();
        let a = gg.gamma_evaluate(c(1.0, 0.0)).unwrap();
        assert!(linalg::fro_norm(&(&a - &linalg::identity(2))) < 1e-14);
    }

    #[test]
    fn scalar_gamma_frozen_values() {
        let gg = scalar_resolvent();
        let a_m1 = gg.gamma_evaluate(c(-1.0, 0.0)).unwrap();
        let expected_m1 = array![
            [c(-25.0 / 7.0, 0.0), c(24.0 / 7.0, 0.0)],
            [c(24.0 / 7.0, 0.0), c(-25.0 / 7.0, 0.0)]
        ];
        assert!(linalg::fro_norm(&(&a_m1 - &expected_m1)) < 1e-12);

        let a_0 = gg.gamma_evaluate(c(0.0, 0.0)).unwrap();
        let expected_0 = array![
            [c(-41.0 / 7.0, 0.0), c(36.0 / 7.0, 0.0)],
            [c(18.0 / 7.0, 0.0), c(-17.0 / 7.0, 0.0)]
        ];
        assert!(linalg::fro_norm(&(&a_0 - &expected_0)) < 1e-12);
    }

    #[test]
    fn scalar_j_unitarity() {
        let gg = scalar_resolvent();
        assert!(gg.j_unitarity_defect(c(-1.0, 0.0)).unwrap() <= 1e-12);
        assert!(gg.j_unitarity_defect(c(1.0, 0.0)).unwrap() <= 1e-14);
        assert!(matches!(
            gg.j_unitarity_defect(c(0.5, 0.0)),
            Err(Error::NotOnCircle { .. })
        ));
    }

    #[test]
    fn random_j_unitarity_on_circle() {
        let mut rng = crate::random::seeded_rng(53);
        let r = crate::random::random_realization(4, 2, 2, &mut rng).unwrap();
        let g = stein::gramians(&r).unwrap();
        let data = ResolventData::assemble(&r, &g, &Tolerances::default()).unwrap();
        let gg = GammaGeneratingMatrix::new(data);
        let mut max_defect = 0.0f64;
        for mu in unit_circle(128) {
            max_defect = max_defect.max(gg.j_unitarity_defect(mu).unwrap());
        }
        assert!(max_defect <= 1e-8, "max defect {max_defect:.3e}");
    }

    #[test]
    fn scalar_s21_values() {
        let gg = scalar_resolvent();
        let (s_m1, disc) = gg.s21_evaluate(c(-1.0, 0.0)).unwrap();
        assert!((s_m1[(0, 0)] - c(24.0 / 25.0, 0.0)).norm() < 1e-12);
        assert!(disc <= 1e-12);

        let (s_1, _) = gg.s21_evaluate(c(1.0, 0.0)).unwrap();
        assert!(s_1[(0, 0)].norm() < 1e-14);
    }

    #[test]
    fn s21_dual_formula_agrees_on_circle() {
        let mut rng = crate::random::seeded_rng(59);
        let r = crate::random::random_realization(3, 2, 2, &mut rng).unwrap();
        let g = stein::gramians(&r).unwrap();
        let gg = GammaGeneratingMatrix::new(
            ResolventData::assemble(&r, &g, &Tolerances::default()).unwrap(),
        );
        for mu in unit_circle(64) {
            let (_, disc) = gg.s21_evaluate(mu).unwrap();
            assert!(disc <= 1e-10, "mu = {mu}, discrepancy {disc:.3e}");
        }
    }

    #[test]
    fn boundary_degenerate_assembly_rejected() {
        let r = Realization::new(
            linalg::zeros(2, 2),
            linalg::identity(2),
            linalg::identity(2),
        )
        .unwrap();
        let g = stein::gramians(&r).unwrap();
        assert!(matches!(
            ResolventData::assemble(&r, &g, &Tolerances::default()),
            Err(Error::BoundaryDegenerate { .. })
        ));
    }

    #[test]
    fn scalar_membership_report() {
        let gg = scalar_resolvent();
        let report = gg.membership_report(128, &Tolerances::default()).unwrap();
        assert_eq!(report.s21_pole_count, 1);
        assert_eq!(report.winding_det_a22, 1);
        assert_eq!(report.winding_det_a11_star, 1);
        assert!(report.max_j_unitarity_defect <= 1e-10);
        assert!(report.passes());
    }

    #[test]
    fn membership_pole_count_tracks_negativity_index() {
        let mut rng = crate::random::seeded_rng(73);
        let tols = Tolerances::default();
        for target in 0..=2usize {
            let r = crate::random::realization_with_negativity_index(3, 2, 2, target, &mut rng)
                .unwrap();
            let g = stein::gramians(&r).unwrap();
            let gg = GammaGeneratingMatrix::new(ResolventData::assemble(&r, &g, &tols).unwrap());
            let report = gg.membership_report(256, &tols).unwrap();
            assert_eq!(report.s21_pole_count, target, "target {target}");
            assert!(report.passes(), "target {target}: {report:?}");
        }
    }

    #[test]
    fn diagonal_system_decouples_into_scalar_channels() {
        // For A = diag(a1, a2), B = C = I the resolvent splits, up to the
        // interleaving permutation, into the two scalar resolvents. The
        // scalar path is pinned to closed forms elsewhere, so this checks
        // the block wiring of the 2n-dimensional assembly.
        let tols = Tolerances::default();
        let a = [0.5, 0.3];
        let full = {
            let r = Realization::new(
                array![[c(a[0], 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(a[1], 0.0)]],
                linalg::identity(2),
                linalg::identity(2),
            )
            .unwrap();
            let g = stein::gramians(&r).unwrap();
            let data = ResolventData::assemble(&r, &g, &tols).unwrap();
            assert_eq!(data.kappa1, 2);
            GammaGeneratingMatrix::new(data)
        };
        let channels: Vec<GammaGeneratingMatrix> = a
            .iter()
            .map(|&ak| {
                let r = Realization::new(
                    array![[c(ak, 0.0)]],
                    array![[c(1.0, 0.0)]],
                    array![[c(1.0, 0.0)]],
                )
                .unwrap();
                let g = stein::gramians(&r).unwrap();
                GammaGeneratingMatrix::new(ResolventData::assemble(&r, &g, &tols).unwrap())
            })
            .collect();
        for mu in [c(0.1, 0.2), c(-0.8, 0.1), c64::from_polar(1.0, 1.3)] {
            let big = full.gamma_evaluate(mu).unwrap();
            for (k, channel) in channels.iter().enumerate() {
                let small = channel.gamma_evaluate(mu).unwrap();
                // Rows/cols {k, 2 + k} of the 4x4 value carry channel k.
                let idx = [k, 2 + k];
                for (i, &bi) in idx.iter().enumerate() {
                    for (j, &bj) in idx.iter().enumerate() {
                        assert!(
                            (big[(bi, bj)] - small[(i, j)]).norm() < 1e-12,
                            "mu = {mu}, channel {k}, entry ({i}, {j})"
                        );
                    }
                }
            }
            // Cross-channel blocks vanish.
            for &bi in &[0usize, 2] {
                for &bj in &[1usize, 3] {
                    assert!(big[(bi, bj)].norm() < 1e-12);
                    assert!(big[(bj, bi)].norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn g_matches_full_block_solve() {
        // The fast block-diagonal path must agree with the literal
        // output_map * (M - zN)^{-1} read off the exported matrices.
        let mut rng = crate::random::seeded_rng(79);
        let r = crate::random::random_realization(3, 2, 2, &mut rng).unwrap();
        let g = stein::gramians(&r).unwrap();
        let data = ResolventData::assemble(&r, &g, &Tolerances::default()).unwrap();
        for z in [c(0.2, 0.3), c(-0.7, 0.1), c64::from_polar(1.0, 2.1)] {
            let fast = data.g_evaluate(z).unwrap();
            let pencil = &data.m_mat - &data.n_mat.mapv(|v| v * z);
            let (_, slow) = linalg::rcond_solve_right(&data.output_map, &pencil).unwrap();
            let slow = slow.unwrap();
            assert!(linalg::fro_norm(&(&fast - &slow)) < 1e-11, "z = {z}");
        }
    }

    #[test]
    fn scalar_s21_pole_location() {
        // det a22 vanishes at mu = 34/41.
        let gg = scalar_resolvent();
        let mu = c(34.0 / 41.0, 0.0);
        let b = gg.blocks(mu).unwrap();
        assert!(b.a22[(0, 0)].norm() < 1e-12);
        // And s21 evaluation there reports the singular block.
        assert!(matches!(
            gg.s21_evaluate(mu),
            Err(Error::BlockSingular { .. })
        ));
    }

    #[test]
    fn lambda_inverse_matches_pick_block_formula() {
        // Lambda^{-1} = [ Pt^{-1}          Pt^{-1} P^{-1};
        //                 P^{-1} Pt^{-1}   -P^{-1} + P^{-1} Pt^{-1} P^{-1} ]
        // with Pt = P^{-1} - Q.
        let mut rng = crate::random::seeded_rng(61);
        let r = crate::random::random_realization(3, 1, 2, &mut rng).unwrap();
        let g = stein::gramians(&r).unwrap();
        let data = ResolventData::assemble(&r, &g, &Tolerances::default()).unwrap();
        let n = r.state_dim();
        let (_, p_inv) = linalg::inverse(&g.p).unwrap();
        let p_inv = p_inv.unwrap();
        let pt = &p_inv - &g.q;
        let (_, pt_inv) = linalg::inverse(&pt).unwrap();
        let pt_inv = pt_inv.unwrap();
        let b11 = pt_inv.clone();
        let b12 = pt_inv.dot(&p_inv);
        let b21 = p_inv.dot(&pt_inv);
        let b22 = &p_inv.dot(&pt_inv).dot(&p_inv) - &p_inv;
        let expected = linalg::block2x2(&b11, &b12, &b21, &b22);
        let err = linalg::fro_norm(&(&data.lambda_inv - &expected));
        assert!(err < 1e-9 * linalg::fro_norm(&expected), "err = {err:.3e}");
        let _ = n;
    }

    #[test]
    fn lambda_inertia_is_kappa1_plus_n() {
        let mut rng = crate::random::seeded_rng(67);
        for trial in 0..10 {
            let n = 1 + trial % 3;
            let r = crate::random::random_realization(n, 2, 2, &mut rng).unwrap();
            let g = stein::gramians(&r).unwrap();
            let data = match ResolventData::assemble(&r, &g, &Tolerances::default()) {
                Ok(d) => d,
                Err(_) => continue,
            };
            let (vals, _) = linalg::eigh_hermitian(&data.lambda).unwrap();
            let scale = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
            let (neg, _, _) = linalg::inertia_counts(&vals, 1e-12 * (1.0 + scale));
            assert_eq!(neg, data.kappa1 + n, "trial {trial}");
        }
    }

    #[test]
    fn second_block_row_is_analytic_in_the_disk() {
        // The lower block row of A(mu) must have vanishing anti-analytic
        // Fourier coefficients; multiplied by b2^{-1} it forms the H2 rows
        // of the associated j-inner function.
        let mut rng = crate::random::seeded_rng(71);
        let r = crate::random::random_realization(3, 2, 2, &mut rng).unwrap();
        let g = stein::gramians(&r).unwrap();
        let gg = GammaGeneratingMatrix::new(
            ResolventData::assemble(&r, &g, &Tolerances::default()).unwrap(),
        );
        let (p, q) = gg.block_dims();
        let row = FnMatrix::new(q, p + q, |mu| {
            let b = gg.blocks(mu)?;
            let mut out = linalg::zeros(q, p + q);
            out.slice_mut(ndarray::s![.., ..p]).assign(&b.a21);
            out.slice_mut(ndarray::s![.., p..]).assign(&b.a22);
            Ok(out)
        });
        let fc = fourier::fourier_coefficients(&row, 256, 16).unwrap();
        for (k, g) in fc.coeffs.iter().enumerate() {
            assert!(
                linalg::fro_norm(g) < 1e-11,
                "k = {}, norm = {:.3e}",
                k + 1,
                linalg::fro_norm(g)
            );
        }
    }
}
