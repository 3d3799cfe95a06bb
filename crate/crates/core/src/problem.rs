//! JSON problem files.
//!
//! ```json
//! {
//!   "dim": 2,
//!   "algebra": { "kind": "csl", "generators": [[[[1, 0], [0, 0]], [[0, 0], [0, 0]]]] },
//!   "x": [[0, 0], [1, 0]],
//!   "y": [[1, 0], [0, 0]],
//!   "tolerances": { "solver_tol": 1e-7 },
//!   "seed": 7
//! }
//! ```
//!
//! Complex numbers are `[re, im]` pairs and matrices are lists of rows. Unknown
//! keys are rejected.

use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraModel;
use crate::error::{Error, Result};
use crate::halmos::HalmosModel;
use crate::lattice::{lattice_closure, Projection};
use crate::linalg::{cx, CMat, CVec, Tolerances};

/// Closure cap used when a CSL entry gives none.
pub const DEFAULT_MAX_LATTICE: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub dim: usize,
    pub algebra: AlgebraSpec,
    pub x: Vec<[f64; 2]>,
    pub y: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgebraSpec {
    Full {
        /// Needed only inside a direct sum; defaults to the file dimension.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
    Csl {
        generators: Vec<Vec<Vec<[f64; 2]>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_size: Option<usize>,
    },
    TwoSubspace {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        spectrum: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b: Option<Vec<Vec<[f64; 2]>>>,
    },
    BlockVonNeumann {
        /// `[size, multiplicity]` per block.
        blocks: Vec<[usize; 2]>,
    },
    DirectSum {
        parts: Vec<AlgebraSpec>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eq_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver_tol: Option<f64>,
}

/// A validated problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub file: ProblemFile,
    pub model: AlgebraModel<f64>,
    pub x: CVec<f64>,
    pub y: CVec<f64>,
    pub tolerances: Tolerances<f64>,
}

/// Parses and validates; diagnostics name the offending path.
pub fn parse_problem(text: &str) -> Result<Problem> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: ProblemFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Parse { path, message: e.into_inner().to_string() }
    })?;
    validate(file)
}

/// Pretty JSON that parses back to an equal [`ProblemFile`].
pub fn emit_problem(file: &ProblemFile) -> String {
    serde_json::to_string_pretty(file).expect("problem files always serialize")
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Validation { path: path.into(), message: message.into() }
}

pub fn validate(file: ProblemFile) -> Result<Problem> {
    if file.dim == 0 {
        return Err(invalid("dim", "must be positive"));
    }
    let tolerances = tolerances(file.tolerances.as_ref())?;
    let model = build_model(&file.algebra, Some(file.dim), "algebra", &tolerances)?;
    if model.dim() != file.dim {
        return Err(invalid("dim", format!("algebra acts on dimension {}", model.dim())));
    }
    let x = vector(&file.x, file.dim, "x")?;
    let y = vector(&file.y, file.dim, "y")?;
    Ok(Problem { file, model, x, y, tolerances })
}

fn tolerances(spec: Option<&ToleranceSpec>) -> Result<Tolerances<f64>> {
    let mut t = Tolerances::default();
    if let Some(s) = spec {
        for (name, value, slot) in [
            ("eq_tol", s.eq_tol, &mut t.eq_tol),
            ("rank_tol", s.rank_tol, &mut t.rank_tol),
            ("solver_tol", s.solver_tol, &mut t.solver_tol),
        ] {
            if let Some(v) = value {
                if !(v.is_finite() && v > 0.0) {
                    return Err(invalid(format!("tolerances.{name}"), "must be positive and finite"));
                }
                *slot = v;
            }
        }
    }
    t.validate().map_err(|e| invalid("tolerances", e.to_string()))?;
    Ok(t)
}

fn vector(entries: &[[f64; 2]], dim: usize, path: &str) -> Result<CVec<f64>> {
    if entries.len() != dim {
        return Err(invalid(path, format!("expected {dim} entries, found {}", entries.len())));
    }
    for (i, e) in entries.iter().enumerate() {
        if !(e[0].is_finite() && e[1].is_finite()) {
            return Err(invalid(format!("{path}[{i}]"), "non-finite entry"));
        }
    }
    Ok(CVec::from_iterator(dim, entries.iter().map(|e| cx(e[0], e[1]))))
}

fn matrix(rows: &[Vec<[f64; 2]>], path: &str) -> Result<CMat<f64>> {
    let n = rows.len();
    if n == 0 {
        return Err(invalid(path, "matrix is empty"));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(invalid(format!("{path}[{i}]"), format!("expected {n} entries, found {}", row.len())));
        }
        for (j, e) in row.iter().enumerate() {
            if !(e[0].is_finite() && e[1].is_finite()) {
                return Err(invalid(format!("{path}[{i}][{j}]"), "non-finite entry"));
            }
        }
    }
    Ok(CMat::from_fn(n, n, |i, j| cx(rows[i][j][0], rows[i][j][1])))
}

fn build_model(spec: &AlgebraSpec, dim: Option<usize>, path: &str, tol: &Tolerances<f64>) -> Result<AlgebraModel<f64>> {
    let wrap = |e: Error| invalid(path, e.to_string());
    match spec {
        AlgebraSpec::Full { dim: own } => {
            let n = own.or(dim).ok_or_else(|| invalid(format!("{path}.dim"), "required inside a direct sum"))?;
            AlgebraModel::full(n).map_err(|e| invalid(format!("{path}.dim"), e.to_string()))
        }
        AlgebraSpec::Csl { generators, max_size } => {
            if generators.is_empty() {
                return Err(invalid(format!("{path}.generators"), "at least one generator required"));
            }
            let mut gens = Vec::with_capacity(generators.len());
            for (k, g) in generators.iter().enumerate() {
                let gp = format!("{path}.generators[{k}]");
                let m = matrix(g, &gp)?;
                if gens.first().is_some_and(|p: &Projection<f64>| p.dim() != m.nrows()) {
                    return Err(invalid(gp, "generators must share one dimension"));
                }
                gens.push(Projection::from_matrix(m, tol).map_err(|e| invalid(gp, e.to_string()))?);
            }
            let n = gens[0].dim();
            let cap = max_size.unwrap_or(DEFAULT_MAX_LATTICE);
            let lattice = lattice_closure(n, &gens, cap, tol).map_err(|e| invalid(format!("{path}.generators"), e.to_string()))?;
            AlgebraModel::csl(lattice, tol).map_err(|e| invalid(format!("{path}.generators"), e.to_string()))
        }
        AlgebraSpec::TwoSubspace { spectrum, b } => {
            let model = match (spectrum, b) {
                (Some(s), None) => {
                    if s.is_empty() {
                        return Err(invalid(format!("{path}.spectrum"), "must be nonempty"));
                    }
                    for (i, &v) in s.iter().enumerate() {
                        if !(v.is_finite() && v > 0.0 && v < 1.0) {
                            return Err(invalid(format!("{path}.spectrum[{i}]"), format!("{v} lies outside (0, 1)")));
                        }
                    }
                    HalmosModel::from_spectrum(s, tol)
                        .map_err(|e| invalid(format!("{path}.spectrum"), e.to_string()))?
                }
                (None, Some(m)) => {
                    let bp = format!("{path}.b");
                    let m = matrix(m, &bp)?;
                    HalmosModel::new(m, tol).map_err(|e| invalid(bp, e.to_string()))?
                }
                _ => return Err(invalid(path, "exactly one of `spectrum` and `b` is required")),
            };
            Ok(AlgebraModel::two_subspace(model))
        }
        AlgebraSpec::BlockVonNeumann { blocks } => {
            for (i, b) in blocks.iter().enumerate() {
                if b[0] == 0 || b[1] == 0 {
                    return Err(invalid(format!("{path}.blocks[{i}]"), "sizes must be positive"));
                }
            }
            AlgebraModel::block_von_neumann(blocks.iter().map(|b| (b[0], b[1])).collect()).map_err(wrap)
        }
        AlgebraSpec::DirectSum { parts } => {
            if parts.is_empty() {
                return Err(invalid(format!("{path}.parts"), "at least one part required"));
            }
            let models = parts
                .iter()
                .enumerate()
                .map(|(i, p)| build_model(p, None, &format!("{path}.parts[{i}]"), tol))
                .collect::<Result<Vec<_>>>()?;
            AlgebraModel::direct_sum(models).map_err(wrap)
        }
    }
}
