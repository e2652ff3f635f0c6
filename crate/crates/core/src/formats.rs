//! JSON wire formats: problem input, resolvent export, and parameter files.
//!
//! Complex numbers are two-element arrays [re, im]; matrices are row-major
//! arrays of rows. Parsing reports the offending field and position.

use num_complex::Complex64 as c64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::nehari::SchurParameter;
use crate::realization::Realization;
use crate::resolvent::ResolventData;
use crate::Tolerances;

pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &CMat) -> JsonMatrix {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

pub fn matrix_from_json(rows: &JsonMatrix, name: &str) -> Result<CMat> {
    if rows.is_empty() {
        return Err(Error::Format(format!("{name} must have at least one row")));
    }
    let cols = rows[0].len();
    if cols == 0 {
        return Err(Error::Format(format!(
            "{name} must have at least one column"
        )));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::Format(format!(
                "{name}[{i}] has {} entries, expected {cols} (matrix must be rectangular)",
                row.len()
            )));
        }
        for (j, entry) in row.iter().enumerate() {
            if !entry[0].is_finite() || !entry[1].is_finite() {
                return Err(Error::Format(format!("{name}[{i}][{j}] is not finite")));
            }
        }
    }
    let mut m = linalg::zeros(rows.len(), cols);
    for (i, row) in rows.iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            m[(i, j)] = c64::new(entry[0], entry[1]);
        }
    }
    Ok(m)
}

fn parse_json<'a, T: Deserialize<'a>>(text: &'a str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        Error::Format(format!(
            "{what}: parse error at line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })
}

fn render_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serialization cannot fail")
}

/// Optional per-file tolerance overrides.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inertia: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hankel_rank: Option<f64>,
}

/// Problem input: the realization, the budget, and optional knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemFile {
    #[serde(rename = "A")]
    pub a: JsonMatrix,
    #[serde(rename = "B")]
    pub b: JsonMatrix,
    #[serde(rename = "C")]
    pub c: JsonMatrix,
    pub kappa: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceOverrides>,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: Self = parse_json(text, "problem file")?;
        // Surface dimension problems now, with field names.
        let a = matrix_from_json(&file.a, "A")?;
        let b = matrix_from_json(&file.b, "B")?;
        let c = matrix_from_json(&file.c, "C")?;
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::Format(format!(
                "A must be square, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if b.nrows() != n {
            return Err(Error::Format(format!(
                "B has {} rows, expected n = {n}",
                b.nrows()
            )));
        }
        if c.ncols() != n {
            return Err(Error::Format(format!(
                "C has {} columns, expected n = {n}",
                c.ncols()
            )));
        }
        Ok(file)
    }

    pub fn from_realization(r: &Realization, kappa: usize) -> Self {
        Self {
            a: matrix_to_json(r.a()),
            b: matrix_to_json(r.b()),
            c: matrix_to_json(r.c()),
            kappa,
            seed: None,
            tolerances: None,
        }
    }

    pub fn realization(&self) -> Result<Realization> {
        Realization::new(
            matrix_from_json(&self.a, "A")?,
            matrix_from_json(&self.b, "B")?,
            matrix_from_json(&self.c, "C")?,
        )
    }

    /// Base tolerances with the file's overrides applied.
    pub fn tolerances(&self, base: Tolerances) -> Tolerances {
        let mut out = base;
        if let Some(t) = &self.tolerances {
            if let Some(v) = t.rank {
                out.rank = v;
            }
            if let Some(v) = t.inertia {
                out.inertia = v;
            }
            if let Some(v) = t.hankel_rank {
                out.hankel_rank = v;
            }
        }
        out
    }

    pub fn to_json_string(&self) -> String {
        render_json(self)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExportDims {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub m: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExportDiagnostics {
    pub cond_lambda: f64,
}

/// Resolvent export: everything needed to re-evaluate the resolvent matrix
/// without re-solving the Stein equations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResolventExport {
    pub dims: ExportDims,
    pub kappa1: usize,
    #[serde(rename = "Lambda")]
    pub lambda: JsonMatrix,
    #[serde(rename = "Lambda_inv")]
    pub lambda_inv: JsonMatrix,
    #[serde(rename = "M")]
    pub m_mat: JsonMatrix,
    #[serde(rename = "N")]
    pub n_mat: JsonMatrix,
    #[serde(rename = "G1_star")]
    pub g1_star: JsonMatrix,
    /// diag(C, B*); the output map of G(z).
    pub output_map: JsonMatrix,
    pub diagnostics: ExportDiagnostics,
}

impl ResolventExport {
    pub fn from_data(d: &ResolventData) -> Self {
        Self {
            dims: ExportDims {
                n: d.n,
                p: d.p,
                q: d.q,
                m: d.p + d.q,
            },
            kappa1: d.kappa1,
            lambda: matrix_to_json(&d.lambda),
            lambda_inv: matrix_to_json(&d.lambda_inv),
            m_mat: matrix_to_json(&d.m_mat),
            n_mat: matrix_to_json(&d.n_mat),
            g1_star: matrix_to_json(&d.g1_star),
            output_map: matrix_to_json(&d.output_map),
            diagnostics: ExportDiagnostics {
                cond_lambda: d.lambda_cond,
            },
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text, "resolvent file")
    }

    pub fn to_json_string(&self) -> String {
        render_json(self)
    }

    pub fn to_data(&self) -> Result<ResolventData> {
        let ExportDims { n, p, q, m } = self.dims;
        if m != p + q {
            return Err(Error::Format(format!(
                "dims: m = {m} must equal p + q = {}",
                p + q
            )));
        }
        let lambda = matrix_from_json(&self.lambda, "Lambda")?;
        let lambda_inv = matrix_from_json(&self.lambda_inv, "Lambda_inv")?;
        let m_mat = matrix_from_json(&self.m_mat, "M")?;
        let n_mat = matrix_from_json(&self.n_mat, "N")?;
        let g1_star = matrix_from_json(&self.g1_star, "G1_star")?;
        let output_map = matrix_from_json(&self.output_map, "output_map")?;
        for (name, mat, rows, cols) in [
            ("Lambda", &lambda, 2 * n, 2 * n),
            ("Lambda_inv", &lambda_inv, 2 * n, 2 * n),
            ("M", &m_mat, 2 * n, 2 * n),
            ("N", &n_mat, 2 * n, 2 * n),
            ("G1_star", &g1_star, 2 * n, m),
            ("output_map", &output_map, m, 2 * n),
        ] {
            if mat.nrows() != rows || mat.ncols() != cols {
                return Err(Error::Format(format!(
                    "{name}: expected {rows}x{cols}, got {}x{}",
                    mat.nrows(),
                    mat.ncols()
                )));
            }
        }
        let product = lambda.dot(&lambda_inv);
        let defect = linalg::fro_norm(&(&product - &linalg::identity(2 * n)));
        if defect > 1e-6 * (1.0 + linalg::fro_norm(&lambda_inv)) {
            return Err(Error::Format(format!(
                "Lambda_inv is not the inverse of Lambda (defect {defect:.3e})"
            )));
        }
        Ok(ResolventData {
            m_mat,
            n_mat,
            lambda,
            lambda_inv,
            lambda_cond: self.diagnostics.cond_lambda,
            g1_star,
            output_map,
            n,
            p,
            q,
            kappa1: self.kappa1,
        })
    }

    /// Checks that this export was produced from the given problem data
    /// (the M block must hold -A).
    pub fn matches_realization(&self, r: &Realization) -> Result<()> {
        let (n, p, q) = r.dims();
        if self.dims.n != n || self.dims.p != p || self.dims.q != q {
            return Err(Error::Format(format!(
                "resolvent dims (n={}, p={}, q={}) do not match problem (n={n}, p={p}, q={q})",
                self.dims.n, self.dims.p, self.dims.q
            )));
        }
        let m_mat = matrix_from_json(&self.m_mat, "M")?;
        let top = m_mat.slice(ndarray::s![..n, ..n]).to_owned();
        let defect = linalg::fro_norm(&(&top + r.a()));
        if defect > 1e-9 * (1.0 + linalg::fro_norm(r.a())) {
            return Err(Error::Format(format!(
                "resolvent file does not belong to this problem (state-block defect {defect:.3e})"
            )));
        }
        Ok(())
    }
}

/// Parameter file: a constant contraction or a Blaschke-scaled constant.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EpsilonFile {
    Constant {
        value: JsonMatrix,
    },
    BlaschkeScaled {
        value: JsonMatrix,
        poles: Vec<[f64; 2]>,
    },
}

impl EpsilonFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text, "parameter file")
    }

    pub fn to_json_string(&self) -> String {
        render_json(self)
    }

    pub fn to_parameter(&self) -> Result<SchurParameter> {
        match self {
            Self::Constant { value } => SchurParameter::constant(matrix_from_json(value, "value")?),
            Self::BlaschkeScaled { value, poles } => {
                let poles: Vec<c64> = poles.iter().map(|p| c64::new(p[0], p[1])).collect();
                SchurParameter::blaschke_scaled(&poles, matrix_from_json(value, "value")?)
            }
        }
    }

    pub fn from_parameter(eps: &SchurParameter) -> Self {
        match eps {
            SchurParameter::Constant(v) => Self::Constant {
                value: matrix_to_json(v),
            },
            SchurParameter::BlaschkeScaled { product, value } => Self::BlaschkeScaled {
                value: matrix_to_json(value),
                poles: product
                    .factors()
                    .iter()
                    .map(|f| [f.alpha().re, f.alpha().im])
                    .collect(),
            },
        }
    }
}
