//! Command-line front end: check / solve / sample / verify / spectrum /
//! selftest over JSON problem files.
//!
//! Exit codes: 0 success (solvable / verified), 2 negative decision
//! (not solvable / verification failed), 1 operational error.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use nehari::formats::{EpsilonFile, ProblemFile, ResolventExport};
use nehari::nehari::{sample_solution, verify_solution, SchurParameter};
use nehari::realization::Realization;
use nehari::resolvent::{GammaGeneratingMatrix, ResolventData};
use nehari::{c64, fourier, linalg, random, stein, Error, Tolerances};

#[derive(Parser)]
#[command(
    name = "nehari",
    version,
    about = "Rational matrix Nehari-Takagi solver on the unit disk"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy, Default)]
struct TolFlags {
    /// Relative SVD cutoff for numerical ranks (default 1e-10).
    #[arg(long = "tol-rank")]
    tol_rank: Option<f64>,
    /// Base width of the boundary band around eigenvalue 1 of PQ (default 1e-9).
    #[arg(long = "tol-inertia")]
    tol_inertia: Option<f64>,
    /// Relative cutoff for Hankel-rank decisions (default 1e-6).
    #[arg(long = "tol-hankel")]
    tol_hankel: Option<f64>,
}

impl TolFlags {
    fn apply(&self, base: Tolerances) -> Tolerances {
        let mut out = base;
        if let Some(v) = self.tol_rank {
            out.rank = v;
        }
        if let Some(v) = self.tol_inertia {
            out.inertia = v;
        }
        if let Some(v) = self.tol_hankel {
            out.hankel_rank = v;
        }
        out
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide solvability; prints the solver report as JSON.
    Check {
        path: PathBuf,
        #[command(flatten)]
        tols: TolFlags,
    },
    /// Assemble the resolvent matrix and write the export file.
    Solve {
        path: PathBuf,
        /// Output path for the resolvent export (JSON).
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        tols: TolFlags,
    },
    /// Evaluate a solution on a circle grid and write it as CSV.
    Sample {
        path: PathBuf,
        /// Reuse a resolvent export instead of re-solving.
        #[arg(long)]
        resolvent: Option<PathBuf>,
        /// Parameter: "zero", "random", or a parameter file path.
        #[arg(long, default_value = "zero")]
        epsilon: String,
        /// Number of circle grid points.
        #[arg(long, default_value_t = 256)]
        grid: usize,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Seed for "--epsilon random" (overrides the problem file's seed).
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        tols: TolFlags,
    },
    /// Certify a solution; prints the verification report as JSON.
    Verify {
        path: PathBuf,
        /// Reuse a resolvent export instead of re-solving.
        #[arg(long = "solution-resolvent")]
        solution_resolvent: Option<PathBuf>,
        /// Parameter: "zero", "random", or a parameter file path.
        #[arg(long, default_value = "zero")]
        epsilon: String,
        /// Budget to verify against (defaults to the problem file's kappa).
        #[arg(long)]
        kappa: Option<usize>,
        /// Number of circle grid points for the sup-norm.
        #[arg(long, default_value_t = 256)]
        grid: usize,
        /// Number of Fourier coefficients for the difference Hankel matrix.
        #[arg(long, default_value_t = 48)]
        coeffs: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        tols: TolFlags,
    },
    /// Print the Hankel singular values as JSON.
    Spectrum {
        path: PathBuf,
        #[command(flatten)]
        tols: TolFlags,
    },
    /// Run the scalar closed-form suite.
    Selftest,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    };
    std::process::exit(code);
}

fn run(command: Command) -> Result<i32, Error> {
    match command {
        Command::Check { path, tols } => cmd_check(&path, tols),
        Command::Solve { path, out, tols } => cmd_solve(&path, &out, tols),
        Command::Sample {
            path,
            resolvent,
            epsilon,
            grid,
            out,
            seed,
            tols,
        } => cmd_sample(
            &path,
            resolvent.as_deref(),
            &epsilon,
            grid,
            &out,
            seed,
            tols,
        ),
        Command::Verify {
            path,
            solution_resolvent,
            epsilon,
            kappa,
            grid,
            coeffs,
            seed,
            tols,
        } => cmd_verify(
            &path,
            solution_resolvent.as_deref(),
            &epsilon,
            kappa,
            grid,
            coeffs,
            seed,
            tols,
        ),
        Command::Spectrum { path, tols } => cmd_spectrum(&path, tols),
        Command::Selftest => Ok(cmd_selftest()),
    }
}

struct Problem {
    file: ProblemFile,
    realization: Realization,
    tolerances: Tolerances,
}

fn load_problem(path: &Path, flags: TolFlags) -> Result<Problem, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    let file = ProblemFile::parse(&text)?;
    let realization = file.realization()?;
    let tolerances = flags.apply(file.tolerances(Tolerances::default()));
    Ok(Problem {
        file,
        realization,
        tolerances,
    })
}

/// Print a line, exiting quietly if the reader closed the pipe.
fn emit(text: &str) {
    use std::io::Write;
    let mut stdout = std::io::stdout();
    if writeln!(stdout, "{text}").is_err() {
        std::process::exit(0);
    }
}

fn print_json<T: Serialize>(value: &T) {
    emit(&serde_json::to_string_pretty(value).expect("report serialization cannot fail"));
}

/// Write via a temporary file and rename, so failures leave no partial file.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Error> {
    let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
    std::fs::write(&tmp, contents)
        .map_err(|e| Error::Format(format!("cannot write {}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        Error::Format(format!("cannot move output into {}: {e}", path.display()))
    })?;
    Ok(())
}

fn cmd_check(path: &Path, flags: TolFlags) -> Result<i32, Error> {
    let problem = load_problem(path, flags)?;
    let report = nehari::nehari::check(
        &problem.realization,
        problem.file.kappa,
        &problem.tolerances,
    )?;
    print_json(&report);
    Ok(if report.solvable { 0 } else { 2 })
}

#[derive(Serialize)]
struct SolveSummary {
    kappa: usize,
    kappa1: usize,
    cond_lambda: f64,
    out: String,
}

fn cmd_solve(path: &Path, out: &Path, flags: TolFlags) -> Result<i32, Error> {
    let problem = load_problem(path, flags)?;
    match nehari::nehari::solve(
        &problem.realization,
        problem.file.kappa,
        &problem.tolerances,
    ) {
        Ok(gg) => {
            let export = ResolventExport::from_data(gg.data());
            write_atomic(out, &export.to_json_string())?;
            print_json(&SolveSummary {
                kappa: problem.file.kappa,
                kappa1: gg.kappa1(),
                cond_lambda: gg.data().lambda_cond,
                out: out.display().to_string(),
            });
            Ok(0)
        }
        Err(Error::NotSolvable { kappa, kappa1 }) => {
            eprintln!("not solvable: kappa1 = {kappa1} exceeds budget kappa = {kappa}");
            Ok(2)
        }
        Err(e) => Err(e),
    }
}

/// Resolvent from an export file (validated against the problem) or a fresh
/// assembly from the gramians.
fn obtain_resolvent(
    problem: &Problem,
    export_path: Option<&Path>,
) -> Result<GammaGeneratingMatrix, Error> {
    match export_path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Format(format!("{}: {e}", p.display())))?;
            let export = ResolventExport::parse(&text)?;
            export.matches_realization(&problem.realization)?;
            Ok(GammaGeneratingMatrix::new(export.to_data()?))
        }
        None => {
            let g = stein::gramians(&problem.realization)?;
            let data = ResolventData::assemble(&problem.realization, &g, &problem.tolerances)?;
            Ok(GammaGeneratingMatrix::new(data))
        }
    }
}

fn parse_epsilon(
    choice: &str,
    p: usize,
    q: usize,
    seed: Option<u64>,
    file_seed: Option<u64>,
) -> Result<SchurParameter, Error> {
    match choice {
        "zero" => Ok(SchurParameter::zero(p, q)),
        "random" => {
            let mut rng = random::seeded_rng(seed.or(file_seed).unwrap_or(0));
            SchurParameter::constant(random::random_contraction(p, q, 0.9, &mut rng))
        }
        path => {
            let text =
                std::fs::read_to_string(path).map_err(|e| Error::Format(format!("{path}: {e}")))?;
            EpsilonFile::parse(&text)?.to_parameter()
        }
    }
}

#[derive(Serialize)]
struct SampleSummary {
    sup_norm: f64,
    grid: usize,
    rows: usize,
    flagged_probe_points: Vec<usize>,
    perturbed_points: Vec<usize>,
    out: String,
    tolerances: Tolerances,
}

fn cmd_sample(
    path: &Path,
    resolvent: Option<&Path>,
    epsilon: &str,
    grid: usize,
    out: &Path,
    seed: Option<u64>,
    flags: TolFlags,
) -> Result<i32, Error> {
    if grid == 0 {
        return Err(Error::InvalidParameter("grid must be positive".into()));
    }
    let problem = load_problem(path, flags)?;
    let gg = Arc::new(obtain_resolvent(&problem, resolvent)?);
    let (p, q) = gg.block_dims();
    let eps = parse_epsilon(epsilon, p, q, seed, problem.file.seed)?;
    let handle = sample_solution(&gg, eps)?;

    let samples = fourier::sample_on_circle(&handle, grid)?;
    let mut csv = String::new();
    csv.push_str("theta,sigma_max");
    for i in 0..p {
        for j in 0..q {
            csv.push_str(&format!(",re_{i}_{j},im_{i}_{j}"));
        }
    }
    csv.push('\n');
    let mut sup_norm = 0.0f64;
    for (idx, value) in samples.values.iter().enumerate() {
        let theta = 2.0 * std::f64::consts::PI * idx as f64 / grid as f64;
        let smax = linalg::sigma_max(value)?;
        sup_norm = sup_norm.max(smax);
        csv.push_str(&format!("{theta},{smax}"));
        for i in 0..p {
            for j in 0..q {
                let v: c64 = value[(i, j)];
                csv.push_str(&format!(",{},{}", v.re, v.im));
            }
        }
        csv.push('\n');
    }
    write_atomic(out, &csv)?;
    print_json(&SampleSummary {
        sup_norm,
        grid,
        rows: grid,
        flagged_probe_points: handle.flagged_probe_points().to_vec(),
        perturbed_points: samples.perturbed,
        out: out.display().to_string(),
        tolerances: problem.tolerances,
    });
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    path: &Path,
    resolvent: Option<&Path>,
    epsilon: &str,
    kappa: Option<usize>,
    grid: usize,
    coeffs: usize,
    seed: Option<u64>,
    flags: TolFlags,
) -> Result<i32, Error> {
    let problem = load_problem(path, flags)?;
    let kappa = kappa.unwrap_or(problem.file.kappa);
    let gg = Arc::new(obtain_resolvent(&problem, resolvent)?);
    let (p, q) = gg.block_dims();
    let eps = parse_epsilon(epsilon, p, q, seed, problem.file.seed)?;
    let handle = sample_solution(&gg, eps)?;
    let report = verify_solution(
        &handle,
        &problem.realization,
        kappa,
        &problem.tolerances,
        grid,
        coeffs,
    )?;
    print_json(&report);
    Ok(if report.pass { 0 } else { 2 })
}

#[derive(Serialize)]
struct SpectrumReport {
    hankel_spectrum: Vec<f64>,
    kappa1: Option<usize>,
    tolerances: Tolerances,
}

fn cmd_spectrum(path: &Path, flags: TolFlags) -> Result<i32, Error> {
    let problem = load_problem(path, flags)?;
    let g = stein::gramians(&problem.realization)?;
    let spectrum = stein::hankel_spectrum(&g)?;
    let kappa1 = stein::negativity_index_with(&g, problem.tolerances.inertia).ok();
    print_json(&SpectrumReport {
        hankel_spectrum: spectrum,
        kappa1,
        tolerances: problem.tolerances,
    });
    Ok(0)
}

#[derive(Serialize)]
struct SelftestCheck {
    name: &'static str,
    error: f64,
    tol: f64,
    pass: bool,
}

#[derive(Serialize)]
struct SelftestReport {
    checks: Vec<SelftestCheck>,
    pass: bool,
}

/// Scalar closed-form suite: (A, B, C) = (0.5, 1, 1).
fn cmd_selftest() -> i32 {
    let tol = 1e-10;
    let mut checks: Vec<SelftestCheck> = Vec::new();
    let push = |checks: &mut Vec<SelftestCheck>, name: &'static str, error: f64| {
        checks.push(SelftestCheck {
            name,
            error,
            tol,
            pass: error <= tol,
        });
    };

    let one = c64::new(1.0, 0.0);
    let r = Realization::new(
        ndarray::array![[c64::new(0.5, 0.0)]],
        ndarray::array![[one]],
        ndarray::array![[one]],
    )
    .expect("scalar system is valid");
    let g = stein::gramians(&r).expect("gramians");
    push(
        &mut checks,
        "gramian P = 4/3",
        (g.p[(0, 0)].re - 4.0 / 3.0).abs(),
    );
    push(
        &mut checks,
        "gramian Q = 4/3",
        (g.q[(0, 0)].re - 4.0 / 3.0).abs(),
    );

    let sigma = stein::hankel_spectrum(&g).expect("spectrum");
    push(
        &mut checks,
        "Hankel sigma_1 = 4/3",
        (sigma[0] - 4.0 / 3.0).abs(),
    );

    let kappa1 = stein::negativity_index(&g).expect("negativity index");
    push(&mut checks, "kappa1 = 1", ((kappa1 as f64) - 1.0).abs());

    let pick = stein::pick_matrix(&r, &g).expect("Pick matrix");
    push(
        &mut checks,
        "Pick value = -7/12",
        (pick.p_tilde[(0, 0)].re + 7.0 / 12.0).abs(),
    );

    let den = nehari::denominator::Denominator::new(&r, &g).expect("denominator");
    let mut b2_err = 0.0f64;
    for k in 0..16 {
        let z = c64::from_polar(0.93, 0.4 * k as f64);
        let expected = (z - c64::new(0.5, 0.0)) / (one - c64::new(0.5, 0.0) * z);
        b2_err = b2_err.max((den.b2_evaluate(z, false).expect("b2")[(0, 0)] - expected).norm());
    }
    push(&mut checks, "b2 closed form at 16 points", b2_err);

    let tols = Tolerances::default();
    let data = ResolventData::assemble(&r, &g, &tols).expect("resolvent");
    let li = &data.lambda_inv;
    let err_li = (li[(0, 0)].re + 12.0 / 7.0)
        .abs()
        .max((li[(0, 1)].re + 9.0 / 7.0).abs())
        .max((li[(1, 0)].re + 9.0 / 7.0).abs())
        .max((li[(1, 1)].re + 12.0 / 7.0).abs());
    push(&mut checks, "Lambda inverse entries {-12/7, -9/7}", err_li);

    let gg = GammaGeneratingMatrix::new(data);
    let a = gg
        .gamma_evaluate(c64::new(-1.0, 0.0))
        .expect("resolvent value");
    let err_a = (a[(0, 0)].re + 25.0 / 7.0)
        .abs()
        .max((a[(0, 1)].re - 24.0 / 7.0).abs())
        .max((a[(1, 0)].re - 24.0 / 7.0).abs())
        .max((a[(1, 1)].re + 25.0 / 7.0).abs());
    push(&mut checks, "resolvent at -1", err_a);

    let blocks = gg.blocks(c64::new(34.0 / 41.0, 0.0)).expect("blocks");
    push(&mut checks, "s21 pole at 34/41", blocks.a22[(0, 0)].norm());

    let pass = checks.iter().all(|c| c.pass);
    for check in &checks {
        emit(&format!(
            "{}: {} (error {:.3e}, tol {:.0e})",
            check.name,
            if check.pass { "ok" } else { "FAILED" },
            check.error,
            check.tol
        ));
    }
    print_json(&SelftestReport { checks, pass });
    if pass {
        0
    } else {
        2
    }
}
