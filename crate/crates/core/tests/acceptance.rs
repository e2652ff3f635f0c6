//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Every tolerance is pinned here, in code. The scalar system
//! (A, B, C) = (0.5, 1, 1) carries closed-form values used as the oracle
//! throughout; batch criteria run on seeded random instances.

use std::sync::Arc;
use std::time::Instant;

use ndarray::array;
use nehari::c64;
use nehari::fourier;
use nehari::function::{FnMatrix, MatrixFunction};
use nehari::linalg;
use nehari::nehari::{
    sample_solution, solve, truncated_hankel_negativity, verify_solution, SchurParameter,
};
use nehari::random;
use nehari::realization::Realization;
use nehari::resolvent::{GammaGeneratingMatrix, ResolventData};
use nehari::schur;
use nehari::stein;
use nehari::Tolerances;

fn c(re: f64, im: f64) -> c64 {
    c64::new(re, im)
}

fn conclude(criterion: usize, label: &str, pass: bool, details: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("acceptance criterion {criterion} ({label}): {verdict} - {details}");
    assert!(pass, "criterion {criterion} ({label}) failed: {details}");
}

fn scalar_system(a: f64, b: f64, cc: f64) -> Realization {
    Realization::new(
        array![[c(a, 0.0)]],
        array![[c(b, 0.0)]],
        array![[c(cc, 0.0)]],
    )
    .unwrap()
}

fn worked() -> Realization {
    scalar_system(0.5, 1.0, 1.0)
}

#[test]
fn criterion_1_scalar_closed_form_suite() {
    let start = Instant::now();
    let tol = 1e-10;
    let mut worst: f64 = 0.0;
    let mut note = |err: f64| worst = worst.max(err);

    let r = worked();
    let g = stein::gramians(&r).unwrap();
    note((g.p[(0, 0)] - c(4.0 / 3.0, 0.0)).norm());
    note((g.q[(0, 0)] - c(4.0 / 3.0, 0.0)).norm());

    let sigma = stein::hankel_spectrum(&g).unwrap();
    note((sigma[0] - 4.0 / 3.0).abs());

    let kappa1 = stein::negativity_index(&g).unwrap();
    assert_eq!(kappa1, 1);

    let pick = stein::pick_matrix(&r, &g).unwrap();
    note((pick.p_tilde[(0, 0)] - c(-7.0 / 12.0, 0.0)).norm());

    // b2 against its rational closed form at 16 points.
    let den = nehari::denominator::Denominator::new(&r, &g).unwrap();
    for k in 0..16 {
        let z = if k < 8 {
            c64::from_polar(1.0, 0.3 + k as f64 * 0.7)
        } else {
            c64::from_polar(0.11 * (k - 7) as f64, 1.1 * k as f64)
        };
        let expected = (z - c(0.5, 0.0)) / (c(1.0, 0.0) - c(0.5, 0.0) * z);
        let got = den.b2_evaluate(z, false).unwrap()[(0, 0)];
        note((got - expected).norm());
    }

    let tols = Tolerances::default();
    let data = ResolventData::assemble(&r, &g, &tols).unwrap();
    note((data.lambda_inv[(0, 0)] - c(-12.0 / 7.0, 0.0)).norm());
    note((data.lambda_inv[(0, 1)] - c(-9.0 / 7.0, 0.0)).norm());
    note((data.lambda_inv[(1, 0)] - c(-9.0 / 7.0, 0.0)).norm());
    note((data.lambda_inv[(1, 1)] - c(-12.0 / 7.0, 0.0)).norm());

    let gg = GammaGeneratingMatrix::new(data);
    let a_m1 = gg.gamma_evaluate(c(-1.0, 0.0)).unwrap();
    let expected_m1 = array![
        [c(-25.0 / 7.0, 0.0), c(24.0 / 7.0, 0.0)],
        [c(24.0 / 7.0, 0.0), c(-25.0 / 7.0, 0.0)]
    ];
    note(linalg::fro_norm(&(&a_m1 - &expected_m1)));

    // s21 pole at 34/41: the a22 block vanishes there.
    let blocks = gg.blocks(c(34.0 / 41.0, 0.0)).unwrap();
    note(blocks.a22[(0, 0)].norm());

    let elapsed = start.elapsed();
    let pass = worst <= tol && elapsed.as_secs_f64() < 1.0;
    conclude(
        1,
        "scalar closed-form suite",
        pass,
        format!(
            "max abs error {worst:.3e} (tol 1e-10), runtime {:.3}s (< 1s)",
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_2_stein_residuals() {
    let mut rng = random::seeded_rng(2024);
    let mut worst = 0.0f64;
    for trial in 0..100 {
        let n = 1 + trial % 8;
        let p = 1 + trial % 3;
        let q = 1 + (trial / 3) % 3;
        let r = random::random_realization(n, p, q, &mut rng).unwrap();
        let g = stein::gramians(&r).unwrap();
        let rel_p = g.residual_p / linalg::fro_norm(&g.p).max(1.0);
        let rel_q = g.residual_q / linalg::fro_norm(&g.q).max(1.0);
        worst = worst.max(rel_p).max(rel_q);
    }
    let pass = worst <= 1e-10;
    conclude(
        2,
        "Stein residuals on 100 random systems",
        pass,
        format!("worst relative residual {worst:.3e} (tol 1e-10)"),
    );
}

#[test]
fn criterion_3_hankel_spectrum_consistency() {
    let start = Instant::now();
    let mut rng = random::seeded_rng(3031);
    let mut worst = 0.0f64;
    for trial in 0..20 {
        let n = 1 + trial % 5;
        let p = 1 + trial % 2;
        let q = 1 + (trial / 2) % 2;
        let r = random::random_realization(n, p, q, &mut rng).unwrap();
        let g = stein::gramians(&r).unwrap();
        let sigma = stein::hankel_spectrum(&g).unwrap();
        let coeffs = r.markov_sequence(512);
        let truncated = fourier::hankel_singular_values(&coeffs).unwrap();
        for (i, &s) in sigma.iter().enumerate() {
            worst = worst.max((truncated[i] - s).abs());
        }
        // Everything past the state dimension must be numerically zero.
        if truncated.len() > n {
            worst = worst.max(truncated[n]);
        }
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-6 && elapsed.as_secs_f64() < 30.0;
    conclude(
        3,
        "truncated-Hankel spectrum matches sqrt(eig(PQ))",
        pass,
        format!(
            "worst deviation {worst:.3e} (tol 1e-6), batch runtime {:.2}s (< 30s)",
            elapsed.as_secs_f64()
        ),
    );
}

/// Random instances for criteria 4 and 8, kept to cond(Lambda) <= 1e8.
fn resolvent_instances(count: usize, seed: u64) -> Vec<GammaGeneratingMatrix> {
    let tols = Tolerances::default();
    let mut rng = random::seeded_rng(seed);
    let mut out = Vec::new();
    let mut trial = 0usize;
    while out.len() < count && trial < count * 10 {
        trial += 1;
        let n = 1 + trial % 4;
        let p = 1 + trial % 2;
        let q = 1 + (trial / 2) % 2;
        let r = random::random_realization(n, p, q, &mut rng).unwrap();
        let g = match stein::gramians(&r) {
            Ok(g) => g,
            Err(_) => continue,
        };
        let data = match ResolventData::assemble(&r, &g, &tols) {
            Ok(d) => d,
            Err(_) => continue,
        };
        if data.lambda_cond > 1e8 {
            continue;
        }
        out.push(GammaGeneratingMatrix::new(data));
    }
    assert_eq!(out.len(), count, "could not draw enough instances");
    out
}

#[test]
fn criterion_4_j_unitarity() {
    let instances = resolvent_instances(20, 404);
    let mut worst_defect = 0.0f64;
    let mut worst_normalization = 0.0f64;
    for gg in &instances {
        for mu in fourier::unit_circle(128) {
            worst_defect = worst_defect.max(gg.j_unitarity_defect(mu).unwrap());
        }
        let a1 = gg.gamma_evaluate(c(1.0, 0.0)).unwrap();
        let m = a1.nrows();
        worst_normalization =
            worst_normalization.max(linalg::fro_norm(&(&a1 - &linalg::identity(m))));
    }
    let pass = worst_defect <= 1e-8 && worst_normalization <= 1e-12;
    conclude(
        4,
        "j-unitarity on the circle",
        pass,
        format!(
            "max defect {worst_defect:.3e} (tol 1e-8) over 20 instances x 128 points, \
             max |A(1) - I| = {worst_normalization:.3e} (tol 1e-12)"
        ),
    );
}

#[test]
fn criterion_5_end_to_end_certification() {
    let tols = Tolerances::default();
    let mut rng = random::seeded_rng(505);
    let mut rank_equalities = 0usize;
    let mut worst_sup = 0.0f64;
    let mut all_pass = true;
    const RUNS: usize = 50;
    for trial in 0..RUNS {
        let kappa1 = trial % 3;
        let n = 2 + trial % 3;
        let p = 1 + trial % 2;
        let q = 1 + (trial / 2) % 2;
        let r = random::realization_with_negativity_index(n, p, q, kappa1, &mut rng).unwrap();
        let gg = Arc::new(solve(&r, kappa1, &tols).unwrap());
        let eps =
            SchurParameter::constant(random::random_contraction(p, q, 0.9, &mut rng)).unwrap();
        let h = sample_solution(&gg, eps).unwrap();
        let report = verify_solution(&h, &r, kappa1, &tols, 256, 48).unwrap();
        worst_sup = worst_sup.max(report.sup_norm);
        if !(report.sup_norm <= 1.0 + 1e-7 && report.hankel_rank <= kappa1) {
            all_pass = false;
            eprintln!(
                "trial {trial}: kappa1 = {kappa1}, sup = {}, rank = {}",
                report.sup_norm, report.hankel_rank
            );
        }
        if report.hankel_rank == kappa1 {
            rank_equalities += 1;
        }
    }
    let equality_rate = rank_equalities as f64 / RUNS as f64;
    let pass = all_pass && equality_rate >= 0.9;
    conclude(
        5,
        "end-to-end solution certification",
        pass,
        format!(
            "50 runs, worst sup {worst_sup:.9} (tol 1 + 1e-7), rank <= kappa1 everywhere, \
             rank equality rate {equality_rate:.2} (>= 0.90 required)"
        ),
    );
}

#[test]
fn criterion_6_inertia_equivalence() {
    // nu_-(I - Gamma_N* Gamma_N) with N = 256 block rows (511 coefficients)
    // against nu_-(I - PQ).
    let mut failures = Vec::new();

    for (label, r) in [
        ("scalar kappa1=1", worked()),
        ("scalar kappa1=0", scalar_system(0.5, 1.0, 0.5)),
    ] {
        let g = stein::gramians(&r).unwrap();
        let kappa1 = stein::negativity_index(&g).unwrap();
        let coeffs = r.markov_sequence(511);
        let nu = truncated_hankel_negativity(&coeffs, 1e-9).unwrap();
        if nu != kappa1 {
            failures.push(format!("{label}: {nu} vs {kappa1}"));
        }
    }

    let mut rng = random::seeded_rng(606);
    for trial in 0..20 {
        let target = trial % 3;
        let n = 2 + trial % 3;
        let p = 1 + trial % 2;
        let q = 1 + (trial / 2) % 2;
        let r = random::realization_with_negativity_index(n, p, q, target, &mut rng).unwrap();
        let g = stein::gramians(&r).unwrap();
        let kappa1 = stein::negativity_index(&g).unwrap();
        let coeffs = r.markov_sequence(511);
        let nu = truncated_hankel_negativity(&coeffs, 1e-9).unwrap();
        if nu != kappa1 {
            failures.push(format!("random trial {trial}: {nu} vs {kappa1}"));
        }
    }
    let pass = failures.is_empty();
    conclude(
        6,
        "truncated-Hankel inertia equals nu_-(I - PQ)",
        pass,
        if pass {
            "22 instances agree".to_string()
        } else {
            failures.join("; ")
        },
    );
}

#[test]
fn criterion_7_krein_langer_round_trip() {
    let mut rng = random::seeded_rng(707);
    let mut worst_sup = 0.0f64;
    let mut worst_certificate = f64::INFINITY;
    let mut all_degrees_ok = true;
    for degree in 1..=3usize {
        for _rep in 0..3 {
            let q = 2;
            let p = 2;
            // Distinct, well-separated interior zeros.
            let mut alphas: Vec<c64> = Vec::new();
            while alphas.len() < degree {
                let cand = random::complex_gaussian(1, 1, &mut rng)[(0, 0)] * c(0.35, 0.0);
                if cand.norm() < 0.6 && alphas.iter().all(|a| (*a - cand).norm() > 0.15) {
                    alphas.push(cand);
                }
            }
            let mut factors = Vec::new();
            for &alpha in &alphas {
                let dir = random::complex_gaussian(q, 1, &mut rng)
                    .column(0)
                    .to_owned();
                factors.push(schur::BpFactor::primary(alpha, &dir).unwrap());
            }
            let b = schur::BlaschkeProduct::from_factors(q, factors).unwrap();
            let s0 = random::random_contraction(q, p, 0.8, &mut rng);
            let b_for_s = b.clone();
            let s: Arc<dyn MatrixFunction> = Arc::new(FnMatrix::new(q, p, move |z| {
                Ok(b_for_s.evaluate_inverse(z)?.dot(&s0))
            }));
            let poles: Vec<(c64, usize)> = alphas.iter().map(|&a| (a, 1)).collect();
            let fact = schur::kl_factorize(s, &poles).unwrap();
            if fact.kappa != degree {
                all_degrees_ok = false;
                eprintln!("degree {degree}: recovered {}", fact.kappa);
            }
            worst_sup = worst_sup.max(fact.s_left_sup);
            worst_certificate = worst_certificate.min(fact.coprimality_certificate);
        }
    }
    let pass = all_degrees_ok && worst_sup <= 1.0 + 1e-8 && worst_certificate > 1e-6;
    conclude(
        7,
        "Krein-Langer round trip",
        pass,
        format!(
            "degrees 1..3 recovered, s_left sup {worst_sup:.9} (tol 1 + 1e-8), \
             coprimality certificate {worst_certificate:.3e} (> 1e-6)"
        ),
    );
}

#[test]
fn criterion_8_potapov_ginzburg() {
    let instances = resolvent_instances(5, 808);
    let mut worst = 0.0f64;
    for gg in &instances {
        let (p, q) = gg.block_dims();
        for mu in fourier::unit_circle(64) {
            let a = gg.gamma_evaluate(mu).unwrap();
            let s = schur::pg_transform(&a, p, q).unwrap();
            let m = s.nrows();
            let defect = linalg::fro_norm(&(&linalg::adjoint(&s).dot(&s) - &linalg::identity(m)));
            worst = worst.max(defect);
        }
    }
    let pass = worst <= 1e-10;
    conclude(
        8,
        "Potapov-Ginzburg transform is unitary on the circle",
        pass,
        format!("max unitarity defect {worst:.3e} (tol 1e-10) over 5 instances x 64 points"),
    );
}

#[test]
fn criterion_9_kronecker_rank() {
    let mut rng = random::seeded_rng(909);
    let mut failures = Vec::new();
    for n in 1..=5usize {
        let r = random::random_realization(n, 2, 2, &mut rng).unwrap();
        let coeffs = r.markov_sequence(64);
        let rank = fourier::hankel_rank(&coeffs, 1e-6).unwrap();
        if rank != n {
            failures.push(format!("n = {n}: rank {rank}"));
        }
    }
    let pass = failures.is_empty();
    conclude(
        9,
        "Kronecker rank equals the state dimension",
        pass,
        if pass {
            "ranks 1..5 recovered at rel_tol 1e-6".to_string()
        } else {
            failures.join("; ")
        },
    );
}
